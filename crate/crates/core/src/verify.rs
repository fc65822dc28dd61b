//! Bundled verification suites: reference germs with known Lelong numbers,
//! multiplicities and irreducibility verdicts, checked at fixed tolerances.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lelong::{
    check_calculus, lelong_circle_max_1d, lelong_circle_mean_1d, lelong_generic_line, lelong_min_over_branches,
    lelong_number, lelong_sphere_max, projective_mass, vanishing_mult, LelongConfig, RadiiSchedule,
};
use crate::monodromy::{strong_local_irreducibility, MonodromyConfig, Verdict};
use crate::poly::{SparsePoly, Variables};
use crate::pshfun::{PshExpr, Transform};
use crate::serde_ext;
use crate::variety::{make_chart, multiplicity, HypersurfaceChart, SearchParams};

pub const COUNTEREXAMPLE: &str = "x^2 - y^2 + z^3";
pub const COUNTEREXAMPLE_PHI: &str = "log(|(x+y)^2| + |x-y| + |z^2|)";
pub const PARITY_PAIRS: [(u32, u32); 6] = [(2, 2), (2, 4), (4, 6), (3, 3), (3, 4), (5, 6)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Counterexample,
    TheoremA,
    Parity,
    Calculus,
    Estimators,
    Vanishing,
    Branches,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Counterexample,
        Suite::TheoremA,
        Suite::Parity,
        Suite::Calculus,
        Suite::Estimators,
        Suite::Vanishing,
        Suite::Branches,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Counterexample => "counterexample",
            Suite::TheoremA => "theorem-a",
            Suite::Parity => "parity",
            Suite::Calculus => "calculus",
            Suite::Estimators => "estimators",
            Suite::Vanishing => "vanishing",
            Suite::Branches => "branches",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(#[serde(with = "serde_ext")] f64),
    Text(String),
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quantity::Number(v) if v.is_infinite() => write!(f, "{}inf", if *v > 0.0 { "+" } else { "-" }),
            Quantity::Number(v) => write!(f, "{v:.4}"),
            Quantity::Text(t) => f.write_str(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub label: String,
    pub expected: Quantity,
    pub observed: Quantity,
    /// Absolute tolerance; a leading `>=` in the label marks a lower bound.
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn near(label: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        let pass = expected == observed || (observed - expected).abs() <= tolerance;
        Self {
            label: label.into(),
            expected: Quantity::Number(expected),
            observed: Quantity::Number(observed),
            tolerance,
            pass,
        }
    }

    pub fn at_least(label: impl Into<String>, bound: f64, observed: f64) -> Self {
        Self {
            label: label.into(),
            expected: Quantity::Text(format!(">= {bound}")),
            observed: Quantity::Number(observed),
            tolerance: 0.0,
            pass: observed >= bound,
        }
    }

    pub fn at_most(label: impl Into<String>, bound: f64, observed: f64) -> Self {
        Self {
            label: label.into(),
            expected: Quantity::Text(format!("<= {bound}")),
            observed: Quantity::Number(observed),
            tolerance: 0.0,
            pass: observed <= bound,
        }
    }

    pub fn text(label: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>) -> Self {
        let (e, o) = (expected.into(), observed.into());
        Self {
            label: label.into(),
            pass: e == o,
            expected: Quantity::Text(e),
            observed: Quantity::Text(o),
            tolerance: 0.0,
        }
    }

    fn failed(label: impl Into<String>, err: &Error) -> Self {
        Self {
            label: label.into(),
            expected: Quantity::Text("success".into()),
            observed: Quantity::Text(format!("error: {err}")),
            tolerance: 0.0,
            pass: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub rows: Vec<CheckRow>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn table(&self) -> String {
        let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(5).max(5);
        let mut out =
            format!("{:<width$}  {:>14}  {:>14}  {:>9}  result\n", "check", "expected", "observed", "tolerance");
        for r in &self.rows {
            out.push_str(&format!(
                "{:<width$}  {:>14}  {:>14}  {:>9}  {}\n",
                r.label,
                r.expected.to_string(),
                r.observed.to_string(),
                format!("{}", r.tolerance),
                if r.pass { "PASS" } else { "FAIL" }
            ));
        }
        out
    }
}

fn origin(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

pub fn counterexample_chart(seed: u64) -> Result<(Variables, HypersurfaceChart)> {
    let vars = Variables::new(["x", "y", "z"])?;
    let p = SparsePoly::parse(COUNTEREXAMPLE, &vars)?;
    let chart = make_chart(&p, &origin(3), &[0, 2], SearchParams { seed, ..Default::default() })?;
    Ok((vars, chart))
}

/// Chart of `ξ² = z^k + w^l` over the `(z, w)` plane.
pub fn parity_chart(k: u32, l: u32, seed: u64) -> Result<(Variables, HypersurfaceChart)> {
    let vars = Variables::new(["z", "w", "xi"])?;
    let p = SparsePoly::parse(&format!("xi^2 - z^{k} - w^{l}"), &vars)?;
    let chart = make_chart(&p, &origin(3), &[0, 1], SearchParams { seed, ..Default::default() })?;
    Ok((vars, chart))
}

/// The hyperplane `z3 = 0` in C^3 over the `(z1, z2)` plane.
pub fn plane_chart(seed: u64) -> Result<(Variables, HypersurfaceChart)> {
    let vars = Variables::indexed(3);
    let p = SparsePoly::parse("z3", &vars)?;
    let chart = make_chart(&p, &origin(3), &[0, 1], SearchParams { seed, ..Default::default() })?;
    Ok((vars, chart))
}

fn row_or_fail(label: &str, f: impl FnOnce() -> Result<Vec<CheckRow>>) -> Vec<CheckRow> {
    f().unwrap_or_else(|e| vec![CheckRow::failed(label, &e)])
}

fn config(seed: u64) -> LelongConfig {
    LelongConfig { seed, ..Default::default() }
}

fn counterexample_rows(seed: u64) -> Vec<CheckRow> {
    row_or_fail("counterexample", || {
        let (vars, chart) = counterexample_chart(seed)?;
        let phi = PshExpr::parse(COUNTEREXAMPLE_PHI, &vars)?;
        let s = RadiiSchedule::default();
        let cfg = config(seed);
        let nu_max = lelong_generic_line(Transform::Max, &chart, &phi, &s, &cfg)?;
        let pm = projective_mass(&phi, &chart, &s, &cfg)?;
        Ok(vec![
            CheckRow::near("nu_max", 1.0, nu_max.value, 0.05),
            CheckRow::near("nu_aver", 1.5, pm.aver.value, 0.05),
            CheckRow::near("multiplicity", 2.0, pm.multiplicity as f64, 0.0),
            CheckRow::near("projective mass", 3.0, pm.value, 0.15),
            CheckRow::at_least("nu_aver - nu_max", 0.40, pm.aver.value - nu_max.value),
        ])
    })
}

fn theorem_a_rows(seed: u64) -> Vec<CheckRow> {
    let mut rows = row_or_fail("theorem-a (xi^2 = z^3 + w^4)", || {
        let (vars, chart) = parity_chart(3, 4, seed)?;
        let phi = PshExpr::parse("log|xi|", &vars)?;
        let s = RadiiSchedule::default();
        let cfg = config(seed);
        let aver = lelong_generic_line(Transform::Aver, &chart, &phi, &s, &cfg)?;
        let max = lelong_generic_line(Transform::Max, &chart, &phi, &s, &cfg)?;
        let sphere = lelong_sphere_max(&phi, &chart, &s, &cfg)?;
        let sli = strong_local_irreducibility(&chart, 20, seed, &MonodromyConfig::default())?;
        Ok(vec![
            CheckRow::text(
                "verdict (xi^2 = z^3 + w^4)",
                Verdict::StronglyLocallyIrreducible.to_string(),
                sli.verdict.to_string(),
            ),
            CheckRow::near("nu_aver (log|xi|)", 1.5, aver.value, 0.05),
            CheckRow::near("nu_max (log|xi|)", 1.5, max.value, 0.05),
            CheckRow::near("sphere max (log|xi|)", 1.5, sphere.value, 0.05),
            CheckRow::at_most("|nu_aver - nu_max|", 0.05, (aver.value - max.value).abs()),
        ])
    });
    rows.extend(row_or_fail("theorem-a (counterexample)", || {
        let (vars, chart) = counterexample_chart(seed)?;
        let phi = PshExpr::parse(COUNTEREXAMPLE_PHI, &vars)?;
        let s = RadiiSchedule::default();
        let cfg = config(seed);
        let aver = lelong_generic_line(Transform::Aver, &chart, &phi, &s, &cfg)?;
        let nu = lelong_number(&phi, &chart, &s, &cfg)?;
        let sli = strong_local_irreducibility(&chart, 20, seed, &MonodromyConfig::default())?;
        let sphere = nu.cross_check.as_ref().map_or(f64::NAN, |c| c.value);
        Ok(vec![
            CheckRow::text("verdict (counterexample)", Verdict::Not.to_string(), sli.verdict.to_string()),
            CheckRow::near("nu_phi = nu_max (counterexample)", 1.0, nu.value, 0.05),
            CheckRow::near("sphere max (counterexample)", 1.0, sphere, 0.05),
            CheckRow::at_least("nu_aver - nu_max (counterexample)", 0.40, aver.value - nu.value),
        ])
    }));
    rows
}

/// Rows for the parity law over `pairs`, `num_lines` lines each.
pub fn parity_rows(pairs: &[(u32, u32)], num_lines: usize, seed: u64) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for &(k, l) in pairs {
        let label = format!("xi^2 = z^{k} + w^{l}");
        rows.extend(row_or_fail(&label, || {
            let (_, chart) = parity_chart(k, l, seed)?;
            let v = strong_local_irreducibility(&chart, num_lines, seed, &MonodromyConfig::default())?;
            let (expected, frac_row) = if k % 2 == 1 {
                (Verdict::StronglyLocallyIrreducible, CheckRow::at_least(format!("{label} fraction"), 0.95, v.fraction))
            } else {
                (Verdict::Not, CheckRow::at_most(format!("{label} fraction"), 0.05, v.fraction))
            };
            Ok(vec![CheckRow::text(format!("{label} verdict"), expected.to_string(), v.verdict.to_string()), frac_row])
        }));
    }
    rows
}

fn calculus_rows(seed: u64) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for (a, name) in [(2.0, "2"), (1.0 / 3.0, "1/3")] {
        rows.extend(row_or_fail(&format!("calculus a = {name}"), || {
            let (vars, chart) = plane_chart(seed)?;
            let phi = PshExpr::parse("log|z1|", &vars)?;
            let psi = PshExpr::parse("log|z2|", &vars)?;
            let r = check_calculus(&phi, &psi, &chart, a, &RadiiSchedule::default(), &config(seed))?;
            Ok(vec![
                CheckRow::near(format!("scaling residual (a = {name})"), 0.0, r.scaling_residual, 0.0),
                CheckRow::at_most(format!("additivity residual (a = {name})"), 0.05, r.additivity_residual),
                CheckRow::at_most(format!("max-min residual (a = {name})"), 0.05, r.max_residual),
                CheckRow::near(format!("nu(phi + psi) (a = {name})"), 2.0, r.nu_sum.value, 0.05),
                CheckRow::near(format!("nu(max) (a = {name})"), 1.0, r.nu_max.value, 0.05),
            ])
        }));
    }
    rows
}

/// Circle-mean vs circle-max rows on `c·log|t| + log(1 + |t|)`.
pub fn estimator_rows(seed: u64) -> Vec<CheckRow> {
    let s = RadiiSchedule::default();
    let mut rows = row_or_fail("log|t|", || {
        let mean = lelong_circle_mean_1d(|t: Complex64| Ok(t.norm().ln()), &s)?;
        let max = lelong_circle_max_1d(|t: Complex64| Ok(t.norm().ln()), &s)?;
        Ok(vec![
            CheckRow::near("circle mean (log|t|)", 1.0, mean.value, 1e-10),
            CheckRow::near("circle max (log|t|)", 1.0, max.value, 1e-10),
        ])
    });
    for c in [0.5, 1.0, 1.5, 2.0, 3.0] {
        rows.extend(row_or_fail(&format!("c = {c}"), || {
            let psi = move |t: Complex64| Ok(c * t.norm().ln() + (1.0 + t.norm()).ln());
            let mean = lelong_circle_mean_1d(psi, &s)?;
            let max = lelong_circle_max_1d(psi, &s)?;
            Ok(vec![
                CheckRow::near(format!("mean vs max (c = {c})"), 0.0, mean.value - max.value, 0.02),
                CheckRow::near(format!("circle mean (c = {c})"), c, mean.value, 0.02),
            ])
        }));
    }
    rows.extend(row_or_fail("graph y = x^2", || {
        let vars = Variables::new(["x", "y"])?;
        let p = SparsePoly::parse("y - x^2", &vars)?;
        let chart = make_chart(&p, &origin(2), &[0], SearchParams { seed, ..Default::default() })?;
        let phi = PshExpr::parse("log|y|", &vars)?;
        let nu = lelong_number(&phi, &chart, &s, &config(seed))?;
        Ok(vec![CheckRow::near("log|y| on y = x^2", 2.0, nu.value, 0.05)])
    }));
    rows
}

fn vanishing_rows(seed: u64) -> Vec<CheckRow> {
    let s = RadiiSchedule::default();
    let mut rows = Vec::new();
    for d in [1u32, 2, 3, 5] {
        rows.extend(row_or_fail(&format!("z1^{d}"), || {
            let (vars, chart) = plane_chart(seed)?;
            let f = SparsePoly::parse(&format!("z1^{d}"), &vars)?;
            let v = vanishing_mult(&f, &chart, &s, &config(seed))?;
            Ok(vec![CheckRow::near(format!("z1^{d} on a hyperplane"), d as f64, v.value, 0.0)])
        }));
    }
    rows.extend(row_or_fail("xi", || {
        let (vars, chart) = parity_chart(3, 4, seed)?;
        let f = SparsePoly::parse("xi", &vars)?;
        let v = vanishing_mult(&f, &chart, &s, &config(seed))?;
        Ok(vec![CheckRow::near("xi on xi^2 = z^3 + w^4", 1.5, v.value, 0.0)])
    }));
    rows.extend(row_or_fail("x + y", || {
        let (vars, chart) = counterexample_chart(seed)?;
        let f = SparsePoly::parse("x + y", &vars)?;
        let v = vanishing_mult(&f, &chart, &s, &config(seed))?;
        Ok(vec![CheckRow::near("x + y on the counterexample", 1.0, v.value, 0.0)])
    }));
    rows
}

fn branch_rows(seed: u64) -> Vec<CheckRow> {
    row_or_fail("branches", || {
        let vars = Variables::indexed(2);
        let params = SearchParams { seed, ..Default::default() };
        let b1 = make_chart(&SparsePoly::parse("z1", &vars)?, &origin(2), &[1], params)?;
        let b2 = make_chart(&SparsePoly::parse("z2", &vars)?, &origin(2), &[0], params)?;
        let phi = PshExpr::parse("log|z1|", &vars)?;
        let r = lelong_min_over_branches(&phi, &[b1, b2], &RadiiSchedule::default(), &config(seed))?;
        let mult =
            multiplicity(&make_chart(&SparsePoly::parse("z1*z2", &vars)?, &origin(2), &[0], params)?, true, seed)?;
        Ok(vec![
            CheckRow::near("branch z1 = 0", f64::INFINITY, r.per_branch[0].value, 0.0),
            CheckRow::near("branch z2 = 0", 1.0, r.per_branch[1].value, 0.02),
            CheckRow::near("combined", 1.0, r.combined.value, 0.02),
            CheckRow::near("multiplicity of z1*z2 = 0", 2.0, mult as f64, 0.0),
        ])
    })
}

pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let rows = match suite {
        Suite::Counterexample => counterexample_rows(seed),
        Suite::TheoremA => theorem_a_rows(seed),
        Suite::Parity => parity_rows(&PARITY_PAIRS, 50, seed),
        Suite::Calculus => calculus_rows(seed),
        Suite::Estimators => estimator_rows(seed),
        Suite::Vanishing => vanishing_rows(seed),
        Suite::Branches => branch_rows(seed),
    };
    let passed = rows.iter().all(|r| r.pass);
    SuiteReport { suite: suite.name().into(), seed, rows, passed }
}
