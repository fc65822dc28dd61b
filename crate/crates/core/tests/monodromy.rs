use num_complex::Complex64;

use pluri_core::monodromy::{germ_monodromy, monodromy_on_line, strong_local_irreducibility, MonodromyConfig, Verdict};
use pluri_core::verify::{counterexample_chart, parity_chart, plane_chart};

fn unit(a: f64, b: f64) -> Vec<Complex64> {
    let n = a.hypot(b);
    vec![Complex64::new(a / n, 0.0), Complex64::new(0.0, b / n)]
}

// On the line (z, w) = t(a, b) the fiber is ξ = ±t^{k/2}·(a^k + b^l t^{l-k})^{1/2}:
// the small loop swaps the sheets exactly when k is odd.
#[test]
fn single_loops_follow_the_parity_of_k() {
    let cfg = MonodromyConfig::default();
    for (k, l) in [(2, 3), (3, 3), (3, 5), (4, 5), (5, 7)] {
        let (_, chart) = parity_chart(k, l, 0).unwrap();
        let germ = germ_monodromy(&chart, &unit(0.8, 0.6), &cfg).unwrap();
        assert!(germ.settled);
        assert_eq!(germ.report.transitive, k % 2 == 1, "(k, l) = ({k}, {l})");
        assert_eq!(germ.report.discriminant_winding, k as i64, "(k, l) = ({k}, {l})");
    }
}

#[test]
fn counterexample_is_not_strongly_irreducible() {
    let (_, chart) = counterexample_chart(0).unwrap();
    let v = strong_local_irreducibility(&chart, 20, 3, &MonodromyConfig::default()).unwrap();
    assert_eq!(v.verdict, Verdict::Not);
    assert_eq!(v.num_lines, 20);
}

#[test]
fn hyperplanes_are_trivially_irreducible() {
    let (_, chart) = plane_chart(0).unwrap();
    let v = strong_local_irreducibility(&chart, 20, 3, &MonodromyConfig::default()).unwrap();
    assert_eq!(v.verdict, Verdict::StronglyLocallyIrreducible);
    assert_eq!(v.fraction, 1.0);
}

#[test]
fn too_few_lines_is_an_error() {
    let (_, chart) = plane_chart(0).unwrap();
    assert!(strong_local_irreducibility(&chart, 5, 0, &MonodromyConfig::default()).is_err());
}

#[test]
fn reversed_loops_invert() {
    let (_, chart) = parity_chart(3, 4, 0).unwrap();
    let cfg = MonodromyConfig::default();
    let u = unit(0.3, 0.9);
    let rho = 0.01 * chart.base_radius();
    let fwd = monodromy_on_line(&chart, &u, rho, &cfg).unwrap();
    let back = monodromy_on_line(&chart, &u, rho, &MonodromyConfig { turns: -1, ..cfg }).unwrap();
    assert_eq!(back.permutation, fwd.permutation.inverse());
}

#[test]
fn loops_outside_the_chart_are_rejected() {
    let (_, chart) = parity_chart(3, 4, 0).unwrap();
    let r = chart.base_radius();
    assert!(monodromy_on_line(&chart, &unit(1.0, 0.0), 2.0 * r, &MonodromyConfig::default()).is_err());
}

#[test]
fn verdicts_serialize_with_their_report_names() {
    let json = serde_json::to_string(&Verdict::StronglyLocallyIrreducible).unwrap();
    assert_eq!(json, "\"strong-locally-irreducible\"");
}
