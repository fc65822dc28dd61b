//! Univariate root solving: Aberth-Ehrlich iteration seeded from the Newton
//! polygon, two Newton polish steps, then multiplicity clustering.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::SparsePoly;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RootConfig {
    /// Bound on the backward error `|p(z)| / Σ|a_i||z|^i` of every root.
    pub residual_tol: f64,
    /// Roots within `cluster_tol * (1 + |z|)` merge into one multiple root.
    pub cluster_tol: f64,
    /// Coefficients below `leading_threshold * max|a_i|` at the top are dropped.
    pub leading_threshold: f64,
    pub max_iterations: usize,
    pub polish_steps: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self { residual_tol: 1e-10, cluster_tol: 1e-6, leading_threshold: 1e-14, max_iterations: 1000, polish_steps: 2 }
    }
}

/// Dense univariate polynomial, coefficients from low to high degree.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RootWarning {
    /// Leading coefficients fell below the threshold and were dropped.
    DegreeDrop { nominal: usize, effective: usize },
    /// Some root did not reach the residual tolerance.
    ResidualAboveTolerance { residual: f64 },
}

/// All roots of a polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    /// Clustered roots with multiplicities, sorted by `(re, im)`.
    pub roots: Vec<Root>,
    /// Unclustered roots, sorted by `(re, im)`; one entry per root counted
    /// with multiplicity.
    pub raw: Vec<Complex64>,
    /// Largest backward error over `raw`.
    pub residual_bound: f64,
    /// Effective degree after the leading-coefficient threshold.
    pub degree: usize,
    pub warnings: Vec<RootWarning>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn has_clusters(&self) -> bool {
        self.roots.iter().any(|r| r.multiplicity > 1)
    }
}

pub(crate) fn lex_cmp(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then_with(|| a.im.total_cmp(&b.im))
}

impl UniPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Index of the highest nonzero coefficient.
    pub fn nominal_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != ZERO)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    fn abs_eval(coeffs: &[Complex64], r: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Backward error of `z` as a root.
    pub fn relative_residual(&self, z: Complex64) -> f64 {
        let scale = Self::abs_eval(&self.coeffs, z.norm());
        if scale == 0.0 {
            0.0
        } else {
            self.eval(z).norm() / scale
        }
    }

    pub fn roots(&self, cfg: &RootConfig) -> Result<RootSet> {
        let nominal = self.nominal_degree().ok_or(Error::ZeroPolynomial)?;
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !max.is_finite() {
            return Err(Error::IllConditioned("non-finite coefficient".into()));
        }
        let effective = self.coeffs.iter().rposition(|c| c.norm() >= cfg.leading_threshold * max).unwrap_or(0);
        let mut warnings = Vec::new();
        if effective < nominal {
            warnings.push(RootWarning::DegreeDrop { nominal, effective });
        }
        let coeffs = &self.coeffs[..=effective];
        let zeros = coeffs.iter().position(|c| *c != ZERO).unwrap_or(0);
        let reduced = &coeffs[zeros..];

        let mut found = solve_reduced(reduced, cfg)?;
        for z in found.iter_mut() {
            for _ in 0..cfg.polish_steps {
                let (p, dp) = Self::eval_with_derivative(coeffs, *z);
                if dp == ZERO {
                    break;
                }
                let cand = *z - p / dp;
                if cand.is_finite() && Self::eval_with_derivative(coeffs, cand).0.norm() < p.norm() {
                    *z = cand;
                }
            }
            if !z.is_finite() {
                return Err(Error::IllConditioned("root iteration diverged".into()));
            }
        }

        let mut raw: Vec<Complex64> = std::iter::repeat_n(ZERO, zeros).chain(found).collect();
        raw.sort_by(lex_cmp);
        let truncated = UniPoly::new(coeffs.to_vec());
        let residual_bound = raw.iter().map(|z| truncated.relative_residual(*z)).fold(0.0, f64::max);
        if residual_bound > cfg.residual_tol {
            warnings.push(RootWarning::ResidualAboveTolerance { residual: residual_bound });
        }
        let roots = cluster(&raw, cfg.cluster_tol);
        Ok(RootSet { roots, raw, residual_bound, degree: effective, warnings })
    }
}

fn solve_reduced(a: &[Complex64], cfg: &RootConfig) -> Result<Vec<Complex64>> {
    let n = a.len() - 1;
    match n {
        0 => Ok(Vec::new()),
        1 => Ok(vec![-a[0] / a[1]]),
        2 => {
            let (c, b, lead) = (a[0], a[1], a[2]);
            let disc = (b * b - 4.0 * lead * c).sqrt();
            let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
            if q == ZERO {
                return Err(Error::IllConditioned("degenerate quadratic".into()));
            }
            Ok(vec![q / lead, c / q])
        }
        _ => Ok(aberth(a, cfg)),
    }
}

/// Initial guesses on circles whose radii come from the upper convex hull of
/// `(i, ln|a_i|)`, one circle per hull edge.
fn newton_polygon_guesses(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    let pts: Vec<(usize, f64)> =
        a.iter().enumerate().filter(|(_, c)| **c != ZERO).map(|(i, c)| (i, c.norm().ln())).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (i1, y1) = hull[hull.len() - 2];
            let (i2, y2) = hull[hull.len() - 1];
            // drop the middle point if it lies on or below the chord
            let cross = (i2 as f64 - i1 as f64) * (p.1 - y1) - (y2 - y1) * (p.0 as f64 - i1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut guesses = Vec::with_capacity(n);
    for (e, w) in hull.windows(2).enumerate() {
        let (i, yi) = w[0];
        let (j, yj) = w[1];
        let m = j - i;
        let radius = ((yi - yj) / m as f64).exp();
        let shift = 0.4 + 1.7 * e as f64 / n as f64;
        for k in 0..m {
            let theta = TAU * k as f64 / m as f64 + shift;
            guesses.push(Complex64::from_polar(radius, theta));
        }
    }
    guesses
}

fn aberth(a: &[Complex64], cfg: &RootConfig) -> Vec<Complex64> {
    let n = a.len() - 1;
    let mut z = newton_polygon_guesses(a);
    debug_assert_eq!(z.len(), n);
    let eps = f64::EPSILON;
    for _ in 0..cfg.max_iterations {
        let mut moved = false;
        for i in 0..n {
            let (p, dp) = UniPoly::eval_with_derivative(a, z[i]);
            if p.norm() <= 4.0 * eps * UniPoly::abs_eval(a, z[i].norm()) {
                continue;
            }
            let ratio = p / dp;
            let mut s = ZERO;
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                if w.norm() > eps * z[i].norm() {
                    moved = true;
                }
                z[i] -= w;
            } else {
                let kick = Complex64::from_polar(1e-8 * (1.0 + z[i].norm()), i as f64);
                z[i] += kick;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    z
}

fn cluster(sorted: &[Complex64], tol: f64) -> Vec<Root> {
    let n = sorted.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = 1.0 + sorted[i].norm().max(sorted[j].norm());
            if (sorted[i] - sorted[j]).norm() <= tol * scale {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for (i, &z) in sorted.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += z;
                g.2 += 1;
            }
            None => groups.push((r, z, 1)),
        }
    }
    let mut roots: Vec<Root> =
        groups.into_iter().map(|(_, sum, m)| Root { value: sum / m as f64, multiplicity: m }).collect();
    roots.sort_by(|a, b| lex_cmp(&a.value, &b.value));
    roots
}

/// Roots of a polynomial in one variable with the default configuration.
pub fn univariate_roots(p: &SparsePoly) -> Result<RootSet> {
    p.to_univariate()?.roots(&RootConfig::default())
}
