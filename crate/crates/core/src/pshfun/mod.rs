//! Plurisubharmonic expressions, their evaluation on `[-∞, +∞)`, and the
//! fiber transforms `φ_aver` and `φ_max` over a chart.
//!
//! Conventions for `-∞`: a `Sum` with a `-∞` child is `-∞`; `Max` ignores
//! `-∞` children unless all are `-∞`; `ScalarMul(0, -∞)` is `0`; the fiber
//! average is `-∞` as soon as one sheet value is.

mod parse;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{SparsePoly, Variables};
use crate::variety::{HypersurfaceChart, LinePencil};

/// Expression tree of a psh function built from log-type pieces.
#[derive(Clone, Debug, PartialEq)]
pub enum PshExpr {
    /// `log|h|`
    LogAbs(SparsePoly),
    /// `log(Σ |h_i|^{α_i})`, `α_i > 0`
    LogSumAbsPow(Vec<(SparsePoly, f64)>),
    Sum(Vec<PshExpr>),
    /// `c · φ`, `c ≥ 0`
    ScalarMul(f64, Box<PshExpr>),
    Max(Vec<PshExpr>),
    Const(f64),
}

/// Which fiber transform to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Aver,
    Max,
}

impl std::fmt::Display for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Transform::Aver => "aver",
            Transform::Max => "max",
        })
    }
}

impl std::str::FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aver" => Ok(Transform::Aver),
            "max" => Ok(Transform::Max),
            other => Err(Error::InvalidArgument(format!("unknown transform `{other}` (aver|max)"))),
        }
    }
}

impl PshExpr {
    pub fn log_abs(h: SparsePoly) -> Self {
        PshExpr::LogAbs(h)
    }

    /// `log ‖z‖ = ½ log Σ |z_i|²` in `n` variables.
    pub fn log_norm(n: usize) -> Self {
        let parts = (0..n).map(|i| (SparsePoly::var(n, i).expect("in range"), 2.0)).collect();
        PshExpr::ScalarMul(0.5, Box::new(PshExpr::LogSumAbsPow(parts)))
    }

    pub fn scaled(self, c: f64) -> Self {
        PshExpr::ScalarMul(c, Box::new(self))
    }

    pub fn plus(self, other: PshExpr) -> Self {
        PshExpr::Sum(vec![self, other])
    }

    pub fn max_with(self, other: PshExpr) -> Self {
        PshExpr::Max(vec![self, other])
    }

    pub fn parse(text: &str, vars: &Variables) -> Result<Self> {
        let e = parse::parse_psh(text, vars)?;
        e.validate(vars.len())?;
        Ok(e)
    }

    pub fn to_string_with(&self, vars: &Variables) -> String {
        parse::print_psh(self, vars)
    }

    /// Checks multipliers, powers, arities and that every polynomial has
    /// `num_vars` variables.
    pub fn validate(&self, num_vars: usize) -> Result<()> {
        let check_poly = |h: &SparsePoly| {
            if h.num_vars() != num_vars {
                Err(Error::DimensionMismatch { expected: num_vars, got: h.num_vars() })
            } else {
                Ok(())
            }
        };
        match self {
            PshExpr::LogAbs(h) => check_poly(h),
            PshExpr::LogSumAbsPow(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidArgument("empty log-sum".into()));
                }
                for (h, a) in parts {
                    check_poly(h)?;
                    if !(a.is_finite() && *a > 0.0) {
                        return Err(Error::InvalidArgument(format!("power {a} must be positive")));
                    }
                }
                Ok(())
            }
            PshExpr::Sum(children) | PshExpr::Max(children) => {
                if children.is_empty() {
                    return Err(Error::InvalidArgument("empty sum or max".into()));
                }
                children.iter().try_for_each(|c| c.validate(num_vars))
            }
            PshExpr::ScalarMul(c, child) => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(Error::InvalidArgument(format!("multiplier {c} must be nonnegative")));
                }
                child.validate(num_vars)
            }
            PshExpr::Const(c) => {
                if c.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument("constant must be finite".into()))
                }
            }
        }
    }

    /// Evaluates at an ambient point.
    pub fn eval(&self, point: &[Complex64]) -> Result<f64> {
        self.validate(point.len())?;
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked(&self, point: &[Complex64]) -> f64 {
        match self {
            PshExpr::LogAbs(h) => h.eval_unchecked(point).norm().ln(),
            PshExpr::LogSumAbsPow(parts) => parts
                .iter()
                .map(|(h, a)| {
                    let m = h.eval_unchecked(point).norm();
                    if *a == 1.0 {
                        m
                    } else if *a == 2.0 {
                        m * m
                    } else {
                        m.powf(*a)
                    }
                })
                .sum::<f64>()
                .ln(),
            PshExpr::Sum(children) => children.iter().map(|c| c.eval_unchecked(point)).sum(),
            PshExpr::ScalarMul(c, child) => {
                if *c == 0.0 {
                    0.0
                } else {
                    c * child.eval_unchecked(point)
                }
            }
            PshExpr::Max(children) => {
                children.iter().map(|c| c.eval_unchecked(point)).fold(f64::NEG_INFINITY, f64::max)
            }
            PshExpr::Const(c) => *c,
        }
    }
}

/// `φ_aver` and `φ_max` at one base point.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberValue {
    pub base_point: Vec<Complex64>,
    /// One value per sheet (multiplicity-weighted).
    pub sheet_values: Vec<f64>,
    pub aver: f64,
    pub max: f64,
    pub near_discriminant: bool,
}

impl FiberValue {
    fn from_values(base_point: Vec<Complex64>, sheet_values: Vec<f64>, near_discriminant: bool) -> Self {
        let p = sheet_values.len() as f64;
        let aver = sheet_values.iter().sum::<f64>() / p;
        let max = sheet_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { base_point, sheet_values, aver, max, near_discriminant }
    }

    pub fn get(&self, t: Transform) -> f64 {
        match t {
            Transform::Aver => self.aver,
            Transform::Max => self.max,
        }
    }
}

fn check_arity(phi: &PshExpr, chart: &HypersurfaceChart) -> Result<()> {
    phi.validate(chart.ambient_dim())
}

/// Evaluates `φ` on every point of the fiber over `base_point`.
pub fn fiber_transform(phi: &PshExpr, chart: &HypersurfaceChart, base_point: &[Complex64]) -> Result<FiberValue> {
    check_arity(phi, chart)?;
    if base_point.len() != chart.base_dim() {
        return Err(Error::DimensionMismatch { expected: chart.base_dim(), got: base_point.len() });
    }
    let offset: Vec<Complex64> = base_point.iter().zip(chart.center_base()).map(|(a, c)| a - c).collect();
    let fiber = chart.fiber_offset(&offset)?;
    let values = fiber.offsets.iter().map(|&eta| phi.eval_unchecked(&chart.complete_offset(&offset, eta))).collect();
    Ok(FiberValue::from_values(base_point.to_vec(), values, fiber.near_discriminant))
}

/// `t ↦ φ_{aver|max}(center' + t·u)` on a complex line through the base
/// center.
#[derive(Clone, Debug)]
pub struct LineRestriction<'a> {
    chart: &'a HypersurfaceChart,
    phi: &'a PshExpr,
    direction: Vec<Complex64>,
    pencil: LinePencil,
    transform: Transform,
}

impl<'a> LineRestriction<'a> {
    pub fn direction(&self) -> &[Complex64] {
        &self.direction
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    /// Largest `|t|` for which the line stays in the chart.
    pub fn t_max(&self) -> f64 {
        self.chart.base_radius()
    }

    pub fn fiber_value(&self, t: Complex64) -> Result<FiberValue> {
        let fiber = self.chart.line_fiber(&self.pencil, t)?;
        let offset: Vec<Complex64> = self.direction.iter().map(|u| u * t).collect();
        let values = fiber
            .offsets
            .iter()
            .map(|&eta| self.phi.eval_unchecked(&self.chart.complete_offset(&offset, eta)))
            .collect();
        let base: Vec<Complex64> = offset.iter().zip(self.chart.center_base()).map(|(o, c)| o + c).collect();
        Ok(FiberValue::from_values(base, values, fiber.near_discriminant))
    }

    pub fn value(&self, t: Complex64) -> Result<f64> {
        Ok(self.fiber_value(t)?.get(self.transform))
    }
}

/// Restricts a fiber transform of `φ` to the base line with unit direction `u`.
pub fn restrict_to_base_line<'a>(
    transform: Transform,
    chart: &'a HypersurfaceChart,
    phi: &'a PshExpr,
    u: &[Complex64],
) -> Result<LineRestriction<'a>> {
    check_arity(phi, chart)?;
    let n = crate::norm(u);
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("direction must be a unit vector (|u| = {n})")));
    }
    let pencil = chart.line_pencil(u)?;
    Ok(LineRestriction { chart, phi, direction: u.to_vec(), pencil, transform })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::{make_chart, SearchParams};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn xyz() -> Variables {
        Variables::new(["x", "y", "z"]).unwrap()
    }

    const PHI: &str = "log(|(x+y)^2| + |x-y| + |z^2|)";

    #[test]
    fn eval_examples() {
        let v = Variables::indexed(2);
        let e = PshExpr::parse("log|z1|", &v).unwrap();
        assert_eq!(e.eval(&[c(0.0), c(7.0)]).unwrap(), f64::NEG_INFINITY);
        let phi = PshExpr::parse(PHI, &xyz()).unwrap();
        assert!((phi.eval(&[c(1.0), c(1.0), c(0.0)]).unwrap() - 4f64.ln()).abs() < 1e-15);
        let m = PshExpr::parse("max(log|z1|, log|z2|)", &v).unwrap();
        assert_eq!(m.eval(&[c(std::f64::consts::E), c(1.0)]).unwrap(), 1.0);
    }

    #[test]
    fn neg_infinity_conventions() {
        let v = Variables::indexed(2);
        let p = [c(0.0), c(2.0)];
        let sum = PshExpr::parse("log|z1| + log|z2|", &v).unwrap();
        assert_eq!(sum.eval(&p).unwrap(), f64::NEG_INFINITY);
        let zero = PshExpr::parse("0*log|z1|", &v).unwrap();
        assert_eq!(zero.eval(&p).unwrap(), 0.0);
        let mx = PshExpr::parse("max(log|z1|, log|z2|)", &v).unwrap();
        assert_eq!(mx.eval(&p).unwrap(), 2f64.ln());
        let all = PshExpr::parse("max(log|z1|, 3*log|z1|)", &v).unwrap();
        assert_eq!(all.eval(&p).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn validation_rejects_bad_nodes() {
        let h = SparsePoly::var(2, 0).unwrap();
        assert!(PshExpr::ScalarMul(-1.0, Box::new(PshExpr::LogAbs(h.clone()))).validate(2).is_err());
        assert!(PshExpr::LogSumAbsPow(vec![(h.clone(), 0.0)]).validate(2).is_err());
        assert!(PshExpr::LogAbs(h).eval(&[c(1.0)]).is_err());
    }

    #[test]
    fn transform_on_counterexample_slice() {
        let vars = xyz();
        let p = SparsePoly::parse("x^2 - y^2 + z^3", &vars).unwrap();
        let ch = make_chart(&p, &[c(0.0); 3], &[0, 2], SearchParams::default()).unwrap();
        let phi = PshExpr::parse("log|y|", &vars).unwrap();
        let fv = fiber_transform(&phi, &ch, &[c(0.1), c(0.0)]).unwrap();
        assert!((fv.max - 0.1f64.ln()).abs() < 1e-14);
        assert!((fv.aver - 0.1f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn transform_on_cusp() {
        let vars = Variables::new(["z", "w", "xi"]).unwrap();
        let p = SparsePoly::parse("xi^2 - z^3 - w^4", &vars).unwrap();
        let ch = make_chart(&p, &[c(0.0); 3], &[0, 1], SearchParams::default()).unwrap();
        let phi = PshExpr::parse("log|xi|", &vars).unwrap();
        let t = Complex64::new(0.003, 0.004);
        let fv = fiber_transform(&phi, &ch, &[t, c(0.0)]).unwrap();
        let expect = 1.5 * t.norm().ln();
        assert!((fv.max - expect).abs() < 1e-12);
        assert!((fv.aver - expect).abs() < 1e-12);
    }

    #[test]
    fn single_sheet_transforms_agree() {
        let vars = xyz();
        let p = SparsePoly::parse("y - x*z", &vars).unwrap();
        let ch = make_chart(&p, &[c(0.0); 3], &[0, 2], SearchParams::default()).unwrap();
        let phi = PshExpr::parse(PHI, &vars).unwrap();
        let base = [Complex64::new(0.1, 0.2), c(-0.3)];
        let fv = fiber_transform(&phi, &ch, &base).unwrap();
        let direct = phi.eval(&[base[0], base[0] * base[1], base[1]]).unwrap();
        assert_eq!(fv.aver, fv.max);
        assert!((fv.max - direct).abs() < 1e-14);
    }

    #[test]
    fn line_restriction_of_constant_is_zero() {
        let vars = xyz();
        let p = SparsePoly::parse("x^2 - y^2 + z^3", &vars).unwrap();
        let ch = make_chart(&p, &[c(0.0); 3], &[0, 2], SearchParams::default()).unwrap();
        let zero = PshExpr::Const(0.0);
        let u = [c(0.6), Complex64::new(0.0, 0.8)];
        for t in [Transform::Aver, Transform::Max] {
            let r = restrict_to_base_line(t, &ch, &zero, &u).unwrap();
            assert_eq!(r.value(Complex64::new(0.01, 0.02)).unwrap(), 0.0);
        }
        assert!(restrict_to_base_line(Transform::Max, &ch, &zero, &[c(1.0), c(1.0)]).is_err());
    }

    #[test]
    fn line_restriction_matches_fiber_transform() {
        let vars = xyz();
        let p = SparsePoly::parse("x^2 - y^2 + z^3", &vars).unwrap();
        let ch = make_chart(&p, &[c(0.0); 3], &[0, 2], SearchParams::default()).unwrap();
        let phi = PshExpr::parse(PHI, &vars).unwrap();
        let u = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let r = restrict_to_base_line(Transform::Aver, &ch, &phi, &u).unwrap();
        let t = Complex64::new(0.02, -0.01);
        let direct = fiber_transform(&phi, &ch, &[u[0] * t, u[1] * t]).unwrap();
        let along = r.fiber_value(t).unwrap();
        assert!((direct.aver - along.aver).abs() < 1e-12);
        assert!((direct.max - along.max).abs() < 1e-12);
    }
}
