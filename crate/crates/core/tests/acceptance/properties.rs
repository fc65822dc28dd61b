//! Seed-pinned randomized property suites, 200 instances per property.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use pluri_core::lelong::{
    lelong_circle_max_1d, lelong_circle_mean_1d, lelong_generic_line, lelong_sphere_max, LelongConfig, RadiiSchedule,
    SphereConfig,
};
use pluri_core::monodromy::{germ_monodromy, monodromy_on_line, strong_local_irreducibility, MonodromyConfig, Verdict};
use pluri_core::poly::{track_roots, RootConfig, SparsePoly, Substitution, TrackConfig, UniPoly, Variables};
use pluri_core::pshfun::{fiber_transform, PshExpr, Transform};
use pluri_core::variety::{make_chart, HypersurfaceChart, SearchParams};
use pluri_core::verify::CheckRow;
use pluri_core::{par, rng, Error};

const INSTANCES: usize = 200;
const SEED: u64 = 0x5EED_2024;

type Check = std::result::Result<(), String>;

/// Runs `f` on `INSTANCES` seeds; a tracking collision redraws the instance
/// (up to three times), any other failure counts against the property.
fn property<F>(module: &str, name: &str, tag: u64, f: F) -> CheckRow
where
    F: Fn(&mut ChaCha8Rng) -> std::result::Result<Check, Error> + Sync + Send,
{
    let results: Vec<Check> = par::map_indices(INSTANCES, |i| {
        let mut last = Err("no attempt".to_string());
        for attempt in 0..3u64 {
            let mut g = rng::stream(SEED, &[tag, i as u64, attempt]);
            match f(&mut g) {
                Ok(c) => return c,
                Err(e @ (Error::Collision { .. } | Error::DegreeDrop { .. })) => {
                    last = Err(format!("instance {i}: {e}"))
                }
                Err(e) => return Err(format!("instance {i}: {e}")),
            }
        }
        last
    });
    let failures: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    for f in failures.iter().take(3) {
        eprintln!("  {module}/{name}: {f}");
    }
    let label = format!("{module}: {name}");
    CheckRow::text(label, format!("{INSTANCES}/{INSTANCES}"), format!("{}/{INSTANCES}", INSTANCES - failures.len()))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gauss(g: &mut ChaCha8Rng) -> Complex64 {
    rng::complex_gaussian(g)
}

fn origin(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

// ---------------------------------------------------------------- poly

fn random_uni(g: &mut ChaCha8Rng, degree: usize) -> UniPoly {
    if g.random_bool(0.5) {
        UniPoly::new((0..=degree).map(|_| gauss(g)).collect())
    } else {
        // from roots, with one repeated root
        let mut roots: Vec<Complex64> = (0..degree.saturating_sub(1)).map(|_| gauss(g)).collect();
        if let Some(&r) = roots.first() {
            roots.push(r);
        } else {
            roots.push(gauss(g));
        }
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        UniPoly::new(coeffs)
    }
}

fn homotopy(a: UniPoly, b: UniPoly) -> impl Fn(f64) -> UniPoly + Sync {
    move |s: f64| UniPoly::new(a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x * (1.0 - s) + y * s).collect())
}

fn random_poly(g: &mut ChaCha8Rng, n: usize, terms: usize, max_deg: u32) -> SparsePoly {
    let t: Vec<(Vec<u32>, Complex64)> =
        (0..terms).map(|_| ((0..n).map(|_| g.random_range(0..=max_deg)).collect(), gauss(g))).collect();
    SparsePoly::from_terms(n, t).expect("valid terms")
}

fn abs_scale(p: &SparsePoly, x: &[Complex64]) -> f64 {
    p.terms().map(|(e, c)| c.norm() * e.iter().zip(x).map(|(&k, v)| v.norm().powi(k as i32)).product::<f64>()).sum()
}

fn poly_suite() -> Vec<CheckRow> {
    let cfg = RootConfig::default();
    let tcfg = TrackConfig::default();
    vec![
        property("poly", "multiplicities sum to the degree, residual within tolerance", 1, |g| {
            let d = g.random_range(1..=10);
            let p = random_uni(g, d);
            let set = p.roots(&cfg)?;
            Ok(ensure(
                set.degree == d && set.total_multiplicity() == d && set.residual_bound <= cfg.residual_tol,
                || {
                    format!(
                        "degree {d}: got {} / {} residual {:e}",
                        set.degree,
                        set.total_multiplicity(),
                        set.residual_bound
                    )
                },
            ))
        }),
        property("poly", "reversed path inverts the correspondence", 2, |g| {
            let d = g.random_range(2..=6);
            let a = UniPoly::new((0..=d).map(|_| gauss(g)).collect());
            let b = UniPoly::new((0..=d).map(|_| gauss(g)).collect());
            let fwd_family = homotopy(a.clone(), b.clone());
            let start = a.roots(&cfg)?.raw;
            let fwd = track_roots(&fwd_family, &start, &tcfg)?;
            let back_family = homotopy(b, a);
            let back = track_roots(&back_family, &fwd.end_roots, &tcfg)?;
            let perm = back.permutation_onto(&start)?;
            Ok(ensure(perm.is_identity(), || format!("round trip gives {:?}", perm.as_slice())))
        }),
        property("poly", "tracking over a concatenated path composes", 3, |g| {
            let d = g.random_range(2..=6);
            let a = UniPoly::new((0..=d).map(|_| gauss(g)).collect());
            let b = UniPoly::new((0..=d).map(|_| gauss(g)).collect());
            let split: f64 = g.random_range(0.2..0.8);
            let whole = homotopy(a.clone(), b.clone());
            let start = a.roots(&cfg)?.raw;
            let direct = track_roots(&whole, &start, &tcfg)?;
            let first = track_roots(&|s: f64| whole(s * split), &start, &tcfg)?;
            let second = track_roots(&|s: f64| whole(split + s * (1.0 - split)), &first.end_roots, &tcfg)?;
            let perm = second.permutation_onto(&direct.end_roots)?;
            Ok(ensure(perm.is_identity(), || format!("split at {split}: {:?}", perm.as_slice())))
        }),
        property("poly", "eval after specialize equals eval", 4, |g| {
            let n = g.random_range(2..=4);
            let terms = g.random_range(1..=8);
            let p = random_poly(g, n, terms, 5);
            let subs: Vec<Substitution> = (0..n)
                .map(|_| match g.random_range(0..3) {
                    0 => Substitution::Keep,
                    1 => Substitution::Value(gauss(g)),
                    _ => Substitution::Affine { offset: gauss(g), slope: gauss(g) },
                })
                .collect();
            let q = p.specialize(&subs)?;
            let t = gauss(g);
            let mut rest = Vec::new();
            let mut full = Vec::new();
            for s in &subs {
                match *s {
                    Substitution::Keep => {
                        let v = gauss(g);
                        rest.push(v);
                        full.push(v);
                    }
                    Substitution::Value(v) => full.push(v),
                    Substitution::Affine { offset, slope } => full.push(offset + slope * t),
                }
            }
            if subs.iter().any(|s| matches!(s, Substitution::Affine { .. })) {
                rest.push(t);
            }
            let lhs = q.eval(&rest)?;
            let rhs = p.eval(&full)?;
            let scale = abs_scale(&p, &full).max(1e-300);
            Ok(ensure((lhs - rhs).norm() <= 1e-10 * scale, || format!("{lhs} vs {rhs}")))
        }),
    ]
}

// ---------------------------------------------------------------- charts

struct Germ {
    text: &'static str,
    chart: HypersurfaceChart,
    mult: usize,
}

fn germ(text: &'static str, names: [&str; 3], base: [usize; 2], mult: usize) -> Germ {
    let vars = Variables::new(names).expect("valid names");
    let p = SparsePoly::parse(text, &vars).expect("valid polynomial");
    Germ { text, chart: make_chart(&p, &origin(3), &base, SearchParams::default()).expect("valid chart"), mult }
}

fn germs() -> Vec<Germ> {
    vec![
        germ("x^2 - y^2 + z^3", ["x", "y", "z"], [0, 2], 2),
        germ("xi^2 - z^3 - w^4", ["z", "w", "xi"], [0, 1], 2),
        germ("xi^2 - z^2 - w^4", ["z", "w", "xi"], [0, 1], 2),
        germ("xi^2 - z^5 - w^6", ["z", "w", "xi"], [0, 1], 2),
        germ("z3", ["z1", "z2", "z3"], [0, 1], 1),
        germ("y - x^2", ["x", "y", "z"], [0, 2], 1),
    ]
}

fn random_base_point(g: &mut ChaCha8Rng, chart: &HypersurfaceChart, frac: f64) -> Vec<Complex64> {
    let u = rng::unit_direction(g, chart.base_dim());
    let r = chart.base_radius() * frac * g.random_range(0.05f64..1.0).sqrt();
    u.into_iter().map(|z| z * r).collect()
}

fn variety_suite(germs: &[Germ]) -> Vec<CheckRow> {
    vec![
        property("variety", "sheet count is constant off the discriminant", 11, |g| {
            let gm = &germs[g.random_range(0..germs.len())];
            let b = random_base_point(g, &gm.chart, 0.99);
            let f = gm.chart.fiber(&b)?;
            Ok(ensure(f.total_multiplicity() == gm.chart.sheets() && f.raw.len() == gm.chart.sheets(), || {
                format!("{} points over {b:?}", f.total_multiplicity())
            }))
        }),
        property("variety", "fiber points obey the chart bound", 12, |g| {
            let gm = &germs[g.random_range(0..germs.len())];
            let ch = &gm.chart;
            let b = random_base_point(g, ch, 0.99);
            let f = ch.fiber(&b)?;
            let base_norm = pluri_core::norm(&b);
            let c = ch.properness_constant();
            for y in &f.raw {
                let x = ch.complete(&b, *y)?;
                let amb = pluri_core::norm(&x);
                let fiber_norm = (y - ch.center_fiber()).norm();
                if fiber_norm > c * base_norm || amb < base_norm * (1.0 - 1e-12) || amb > (1.0 + c) * base_norm {
                    return Ok(Err(format!("|x''| = {fiber_norm:e}, |x'| = {base_norm:e}, C = {c}")));
                }
            }
            Ok(Ok(()))
        }),
        property("variety", "multiplicity is invariant under unitary reframing", 13, |g| {
            let gm = &germs[g.random_range(0..germs.len())];
            // frames nearly tangent to the tangent cone admit no chart; like
            // `multiplicity`, skip them and draw another
            let mut framed = None;
            for _ in 0..5 {
                let u = rng::random_unitary(g, 3);
                let params = SearchParams { seed: g.random(), ..Default::default() };
                match gm.chart.reframed(&u, params) {
                    Ok(c) => {
                        framed = Some(c);
                        break;
                    }
                    Err(Error::NotProper(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            let Some(framed) = framed else {
                return Ok(Err(format!("{}: five inadmissible frames in a row", gm.text)));
            };
            Ok(ensure(framed.sheets() == gm.mult, || format!("{} sheets, expected {}", framed.sheets(), gm.mult)))
        }),
    ]
}

// ---------------------------------------------------------------- pshfun

fn random_linear(g: &mut ChaCha8Rng) -> SparsePoly {
    let t: Vec<(Vec<u32>, Complex64)> = (0..3)
        .map(|i| {
            let mut e = vec![0; 3];
            e[i] = 1;
            (e, gauss(g))
        })
        .collect();
    SparsePoly::from_terms(3, t).expect("valid terms")
}

fn random_psh(g: &mut ChaCha8Rng, depth: u32) -> PshExpr {
    let kind = if depth == 0 { g.random_range(0..2) } else { g.random_range(0..5) };
    match kind {
        0 => {
            let h = random_linear(g);
            if g.random_bool(0.5) {
                PshExpr::LogAbs(h)
            } else {
                PshExpr::LogAbs(h.mul(&random_linear(g)).expect("same arity"))
            }
        }
        1 => PshExpr::LogSumAbsPow(
            (0..g.random_range(1..=3)).map(|_| (random_linear(g), g.random_range(0.5..3.0))).collect(),
        ),
        2 => PshExpr::Sum(vec![
            random_psh(g, depth - 1),
            random_psh(g, depth - 1),
            PshExpr::Const(g.random_range(-2.0..2.0)),
        ]),
        3 => PshExpr::ScalarMul(g.random_range(0.1..3.0), Box::new(random_psh(g, depth - 1))),
        _ => PshExpr::Max(vec![random_psh(g, depth - 1), random_psh(g, depth - 1)]),
    }
}

/// Trapezoid mean over the circle, doubling the node count from 256 until it
/// settles; circles through the discriminant are redrawn.
fn circle_mean(
    ch: &HypersurfaceChart,
    phi: &PshExpr,
    t: Transform,
    center: &[Complex64],
    dir: &[Complex64],
    rho: f64,
) -> pluri_core::Result<f64> {
    let mut prev = f64::NAN;
    let mut nodes = 256;
    loop {
        let mut sum = 0.0;
        for k in 0..nodes {
            let w = Complex64::from_polar(rho, std::f64::consts::TAU * (k as f64 + 0.5) / nodes as f64);
            let p: Vec<Complex64> = center.iter().zip(dir).map(|(c, d)| c + d * w).collect();
            let v = fiber_transform(phi, ch, &p)?;
            if v.near_discriminant {
                return Err(Error::Collision { s: k as f64 / nodes as f64 });
            }
            sum += v.get(t);
        }
        let mean = sum / nodes as f64;
        if (mean - prev).abs() <= 1e-9 || nodes >= 8192 {
            return Ok(mean);
        }
        prev = mean;
        nodes *= 2;
    }
}

fn pshfun_suite(germs: &[Germ]) -> Vec<CheckRow> {
    vec![
        property("pshfun", "aver <= max", 21, |g| {
            let gm = &germs[g.random_range(0..germs.len())];
            let phi = random_psh(g, 2);
            let b = random_base_point(g, &gm.chart, 0.9);
            let v = fiber_transform(&phi, &gm.chart, &b)?;
            Ok(ensure(v.aver <= v.max, || format!("aver {} > max {}", v.aver, v.max)))
        }),
        property("pshfun", "aver is linear", 22, |g| {
            let gm = &germs[g.random_range(0..germs.len())];
            let (phi, psi) = (random_psh(g, 1), random_psh(g, 1));
            let (a, b): (f64, f64) = (g.random_range(0.0..3.0), g.random_range(0.0..3.0));
            let x = random_base_point(g, &gm.chart, 0.9);
            let combo = PshExpr::Sum(vec![phi.clone().scaled(a), psi.clone().scaled(b)]);
            let lhs = fiber_transform(&combo, &gm.chart, &x)?.aver;
            let rhs = a * fiber_transform(&phi, &gm.chart, &x)?.aver + b * fiber_transform(&psi, &gm.chart, &x)?.aver;
            Ok(ensure(lhs == rhs || (lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), || format!("{lhs} vs {rhs}")))
        }),
        property("pshfun", "max of max is max of maxes", 23, |g| {
            let gm = &germs[g.random_range(0..germs.len())];
            let (phi, psi) = (random_psh(g, 1), random_psh(g, 1));
            let x = random_base_point(g, &gm.chart, 0.9);
            let lhs = fiber_transform(&phi.clone().max_with(psi.clone()), &gm.chart, &x)?.max;
            let rhs = fiber_transform(&phi, &gm.chart, &x)?.max.max(fiber_transform(&psi, &gm.chart, &x)?.max);
            Ok(ensure(lhs == rhs, || format!("{lhs} vs {rhs}")))
        }),
        property("pshfun", "sub-mean-value on random circles", 24, |g| {
            let gm = &germs[g.random_range(0..germs.len())];
            let phi = random_psh(g, 1);
            let ch = &gm.chart;
            let center = random_base_point(g, ch, 0.5);
            let dir = rng::unit_direction(g, ch.base_dim());
            let rho = 0.4 * ch.base_radius() * g.random_range(0.01f64..1.0);
            for t in [Transform::Aver, Transform::Max] {
                let at_center = fiber_transform(&phi, ch, &center)?.get(t);
                let mean = circle_mean(ch, &phi, t, &center, &dir, rho)?;
                if at_center.is_nan() || mean.is_nan() || at_center > mean + 1e-6 {
                    return Ok(Err(format!(
                        "{} with phi = {}, {t}: center {at_center} > mean {mean}",
                        gm.text,
                        phi.to_string_with(&Variables::new(["x1", "x2", "x3"]).expect("valid names"))
                    )));
                }
            }
            Ok(Ok(()))
        }),
    ]
}

// ---------------------------------------------------------------- lelong

fn coarse() -> LelongConfig {
    LelongConfig {
        num_lines: 3,
        nodes: 16,
        seed: 0,
        sphere: SphereConfig { points_per_dim: 8, max_doublings: 1, ..Default::default() },
        cross_check: false,
    }
}

enum Est {
    Aver,
    Max,
    Sphere,
}

fn estimate(
    which: &Est,
    phi: &PshExpr,
    ch: &HypersurfaceChart,
    cfg: &LelongConfig,
) -> pluri_core::Result<pluri_core::lelong::LelongEstimate> {
    let s = RadiiSchedule::default();
    match which {
        Est::Aver => lelong_generic_line(Transform::Aver, ch, phi, &s, cfg),
        Est::Max => lelong_generic_line(Transform::Max, ch, phi, &s, cfg),
        Est::Sphere => lelong_sphere_max(phi, ch, &s, cfg),
    }
}

fn pick_estimator(g: &mut ChaCha8Rng) -> Est {
    match g.random_range(0..3) {
        0 => Est::Aver,
        1 => Est::Max,
        _ => Est::Sphere,
    }
}

fn lelong_suite(germs: &[Germ]) -> Vec<CheckRow> {
    vec![
        property("lelong", "scaling is bit-exact", 31, |g| {
            let gm = &germs[g.random_range(0..germs.len())];
            let phi = random_psh(g, 1);
            let a = g.random_range(0.01..5.0);
            let which = pick_estimator(g);
            let cfg = LelongConfig { seed: g.random(), ..coarse() };
            let base = estimate(&which, &phi, &gm.chart, &cfg)?;
            let scaled = estimate(&which, &phi.clone().scaled(a), &gm.chart, &cfg)?;
            Ok(ensure(scaled.value == a * base.value, || format!("{} vs {}", scaled.value, a * base.value)))
        }),
        property("lelong", "constant shifts do not move the estimate", 32, |g| {
            let gm = &germs[g.random_range(0..germs.len())];
            let phi = random_psh(g, 1);
            let c = g.random_range(-10.0..10.0);
            let which = pick_estimator(g);
            let cfg = LelongConfig { seed: g.random(), ..coarse() };
            let base = estimate(&which, &phi, &gm.chart, &cfg)?;
            let shifted = estimate(&which, &phi.clone().plus(PshExpr::Const(c)), &gm.chart, &cfg)?;
            Ok(ensure(base.value == shifted.value || (base.value - shifted.value).abs() <= 1e-9, || {
                format!("{} vs {}", base.value, shifted.value)
            }))
        }),
        property("lelong", "aver estimate >= max estimate - combined error", 33, |g| {
            let gm = &germs[g.random_range(0..germs.len())];
            let phi = random_psh(g, 1);
            let cfg = LelongConfig { seed: g.random(), ..Default::default() };
            let aver = estimate(&Est::Aver, &phi, &gm.chart, &cfg)?;
            let max = estimate(&Est::Max, &phi, &gm.chart, &cfg)?;
            let tol = aver.std_error.hypot(max.std_error) + 1e-9;
            Ok(ensure(aver.value >= max.value - tol, || {
                format!(
                    "{} with phi = {}: aver {} < max {} - {tol:e}",
                    gm.text,
                    phi.to_string_with(&Variables::new(["x1", "x2", "x3"]).expect("valid names")),
                    aver.value,
                    max.value
                )
            }))
        }),
        property("lelong", "sphere max statistic is monotone in r", 34, |g| {
            let gm = &germs[g.random_range(0..germs.len())];
            let phi = random_psh(g, 1);
            let cfg = LelongConfig { seed: g.random(), ..coarse() };
            let e = estimate(&Est::Sphere, &phi, &gm.chart, &cfg)?;
            let bad = e.samples.windows(2).find(|w| w[0].1 < w[1].1 - 1e-6);
            Ok(ensure(bad.is_none(), || format!("M drops: {bad:?}")))
        }),
        property("lelong", "circle mean and circle max agree", 35, |g| {
            let c = [0.5, 1.0, 1.5, 2.0, 3.0][g.random_range(0..5)];
            let a = gauss(g) * 2.0;
            let b = g.random_range(0.0..2.0);
            let psi = move |t: Complex64| Ok(c * t.norm().ln() + (1.0 + a * t).norm().ln() + b * (1.0 + t.norm()).ln());
            let s = RadiiSchedule::default();
            let mean = lelong_circle_mean_1d(psi, &s)?;
            let max = lelong_circle_max_1d(psi, &s)?;
            Ok(ensure((mean.value - max.value).abs() <= 0.02, || format!("c = {c}: {} vs {}", mean.value, max.value)))
        }),
    ]
}

// ---------------------------------------------------------------- monodromy

fn parity_germ(k: u32, l: u32) -> HypersurfaceChart {
    let text: &'static str = format!("xi^2 - z^{k} - w^{l}").leak();
    germ(text, ["z", "w", "xi"], [0, 1], 2).chart
}

fn monodromy_suite(germs: &[Germ]) -> Vec<CheckRow> {
    let branched: Vec<&Germ> = germs.iter().filter(|g| g.chart.sheets() > 1).collect();
    let cfg = MonodromyConfig::default();
    let mut pairs = Vec::new();
    for k in 2..=7u32 {
        for l in k..=7u32 {
            pairs.push((k, l, parity_germ(k, l)));
        }
    }
    vec![
        property("monodromy", "loop reversal inverts the permutation", 41, |g| {
            let gm = branched[g.random_range(0..branched.len())];
            let u = rng::unit_direction(g, 2);
            let rho = gm.chart.base_radius() * g.random_range(0.01..0.5);
            let fwd = monodromy_on_line(&gm.chart, &u, rho, &cfg)?;
            let back = monodromy_on_line(&gm.chart, &u, rho, &MonodromyConfig { turns: -1, ..cfg })?;
            Ok(ensure(back.permutation == fwd.permutation.inverse(), || {
                format!("{:?} vs {:?}", back.permutation, fwd.permutation)
            }))
        }),
        property("monodromy", "a double loop squares the permutation", 42, |g| {
            let gm = branched[g.random_range(0..branched.len())];
            let u = rng::unit_direction(g, 2);
            let rho = gm.chart.base_radius() * g.random_range(0.01..0.5);
            let once = monodromy_on_line(&gm.chart, &u, rho, &cfg)?;
            let twice = monodromy_on_line(&gm.chart, &u, rho, &MonodromyConfig { turns: 2, ..cfg })?;
            Ok(ensure(twice.permutation == once.permutation.pow(2), || {
                format!("{:?} vs {:?}", twice.permutation, once.permutation)
            }))
        }),
        property("monodromy", "orbit sizes agree at rho and rho/2", 43, |g| {
            let gm = branched[g.random_range(0..branched.len())];
            let u = rng::unit_direction(g, 2);
            let germ = germ_monodromy(&gm.chart, &u, &cfg)?;
            let rho = germ.report.loop_radius;
            let half = monodromy_on_line(&gm.chart, &u, rho / 2.0, &cfg)?;
            Ok(ensure(half.permutation.cycle_type() == germ.report.permutation.cycle_type(), || {
                format!("{:?} vs {:?}", half.permutation.cycle_type(), germ.report.permutation.cycle_type())
            }))
        }),
        property("monodromy", "sampled verdicts follow the parity of k", 44, |g| {
            let (k, l, chart) = &pairs[g.random_range(0..pairs.len())];
            let v = strong_local_irreducibility(chart, 20, g.random(), &cfg)?;
            let expect = if k % 2 == 1 { Verdict::StronglyLocallyIrreducible } else { Verdict::Not };
            Ok(ensure(v.verdict == expect, || format!("(k, l) = ({k}, {l}): {} at fraction {}", v.verdict, v.fraction)))
        }),
    ]
}

pub fn run_all() -> Vec<CheckRow> {
    let germs = germs();
    let mut rows = poly_suite();
    rows.extend(variety_suite(&germs));
    rows.extend(pshfun_suite(&germs));
    rows.extend(lelong_suite(&germs));
    rows.extend(monodromy_suite(&germs));
    rows
}
