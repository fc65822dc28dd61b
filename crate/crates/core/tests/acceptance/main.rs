//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output.

mod properties;

use std::time::{Duration, Instant};

use pluri_core::par;
use pluri_core::verify::{self, CheckRow, Suite, PARITY_PAIRS};

const SEED: u64 = 20240611;

type Criterion = Box<dyn FnOnce() -> Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn summarize(rows: &[CheckRow]) -> Outcome {
    let failing: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}: expected {} observed {}", r.label, r.expected, r.observed))
        .collect();
    let shown: Vec<String> = rows.iter().map(|r| format!("{}={}", r.label, r.observed)).collect();
    Outcome { pass: failing.is_empty(), detail: if failing.is_empty() { shown.join("; ") } else { failing.join("; ") } }
}

fn timed(limit: Option<Duration>, rows: impl FnOnce() -> Vec<CheckRow>) -> Outcome {
    let start = Instant::now();
    let rows = rows();
    let elapsed = start.elapsed();
    let mut out = summarize(&rows);
    if let Some(limit) = limit {
        if elapsed > limit {
            out.pass = false;
        }
        out.detail = format!("{} [{:.1}s, limit {}s]", out.detail, elapsed.as_secs_f64(), limit.as_secs());
    } else {
        out.detail = format!("{} [{:.1}s]", out.detail, elapsed.as_secs_f64());
    }
    out
}

fn pick(rows: Vec<CheckRow>, labels: &[&str]) -> Vec<CheckRow> {
    rows.into_iter().filter(|r| labels.iter().any(|l| r.label.starts_with(l))).collect()
}

fn main() {
    let criteria: Vec<(&str, Criterion)> = vec![
        (
            "1 counterexample reproduction",
            Box::new(|| {
                timed(Some(Duration::from_secs(60)), || {
                    par::with_threads(1, || verify::run_suite(Suite::Counterexample, SEED).rows)
                })
            }),
        ),
        (
            "2 parity law",
            Box::new(|| timed(Some(Duration::from_secs(120)), || verify::parity_rows(&PARITY_PAIRS, 50, SEED))),
        ),
        (
            "3 equality on a strongly irreducible germ",
            Box::new(|| {
                timed(None, || {
                    pick(
                        verify::run_suite(Suite::TheoremA, SEED).rows,
                        &["nu_aver (log|xi|)", "nu_max (log|xi|)", "|nu_aver - nu_max|"],
                    )
                })
            }),
        ),
        (
            "4 strict gap on the counterexample",
            Box::new(|| {
                timed(None, || pick(verify::run_suite(Suite::Counterexample, SEED).rows, &["nu_aver - nu_max"]))
            }),
        ),
        ("5 calculus rules", Box::new(|| timed(None, || verify::run_suite(Suite::Calculus, SEED).rows))),
        (
            "6 vanishing multiplicity",
            Box::new(|| timed(None, || pick(verify::run_suite(Suite::Vanishing, SEED).rows, &["z1^", "xi on"]))),
        ),
        (
            "7 estimator cross-validation",
            Box::new(|| timed(None, || pick(verify::run_suite(Suite::Estimators, SEED).rows, &["mean vs max"]))),
        ),
        (
            "8 min over branches",
            Box::new(|| {
                timed(None, || pick(verify::run_suite(Suite::Branches, SEED).rows, &["branch z1 = 0", "combined"]))
            }),
        ),
        ("9 property suites", Box::new(|| timed(None, properties::run_all))),
    ];

    let mut all_pass = true;
    for (name, run) in criteria {
        let o = run();
        all_pass &= o.pass;
        println!("criterion {name}: {} -- {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if !all_pass {
        std::process::exit(1);
    }
}
