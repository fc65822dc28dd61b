//! Lelong-number estimators.
//!
//! Every estimator evaluates a statistic `S(r)` (circle mean, circle max or
//! sphere max of `φ`) on a geometric schedule of radii and fits the slope of
//! `S` against `log r` over the smallest half of the schedule.
//!
//! Restricted to a line the max and mean of a psh function are convex in
//! `log r`, so a slope measured over a window of positive radii can only
//! overestimate the limit; the generic-line estimator therefore takes the
//! minimum over lines.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monodromy::{strong_local_irreducibility, IrreducibilityVerdict, MonodromyConfig, Verdict};
use crate::poly::SparsePoly;
use crate::pshfun::{restrict_to_base_line, PshExpr, Transform};
use crate::variety::{multiplicity, HypersurfaceChart};
use crate::{par, rng, serde_ext};

const STREAM_LINES: u64 = 0x1E1E;
const STREAM_SPHERE: u64 = 0x5FE7;
const STREAM_VANISH: u64 = 0x7A1C;
const MIN_TAIL: usize = 3;
const JITTER_ATTEMPTS: usize = 5;

/// Radii `r_j = r_max·ρ^j`, `j = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiiSchedule {
    pub r_max: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for RadiiSchedule {
    fn default() -> Self {
        Self { r_max: 0.1, ratio: 0.7, count: 14 }
    }
}

impl RadiiSchedule {
    pub fn new(r_max: f64, ratio: f64, count: usize) -> Result<Self> {
        let s = Self { r_max, ratio, count };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(Error::InvalidArgument(format!("r_max = {} must be positive", self.r_max)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidArgument(format!("ratio = {} must lie in (0, 1)", self.ratio)));
        }
        if self.count < 4 {
            return Err(Error::InvalidArgument(format!("count = {} must be at least 4", self.count)));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.r_max * self.ratio.powi(j as i32)).collect()
    }

    /// Index of the first radius used by the slope fit: the last `⌈m/2⌉`
    /// radii, but at least three.
    pub fn tail_start(&self) -> usize {
        self.count - self.count.div_ceil(2).max(MIN_TAIL).min(self.count)
    }

    /// Caps `r_max` at `limit`; reports whether it had to.
    fn clamped(&self, limit: f64) -> (Self, Option<EstimateFlag>) {
        if self.r_max <= limit {
            (*self, None)
        } else {
            (Self { r_max: limit, ..*self }, Some(EstimateFlag::ScheduleClamped { r_max: limit }))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SphereMax,
    CircleMean,
    CircleMax,
    GenericLine,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EstimateFlag {
    /// The restriction is `-∞` everywhere it was sampled; the value is `+∞`.
    IdenticallyNegInfinity,
    DroppedCircles {
        count: usize,
    },
    DroppedLines {
        count: usize,
    },
    ScheduleClamped {
        r_max: f64,
    },
    SamplingNotConverged {
        change: f64,
    },
    EstimatorDisagreement {
        primary: f64,
        cross_check: f64,
        tolerance: f64,
    },
    Unsnapped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LelongEstimate {
    #[serde(with = "serde_ext")]
    pub value: f64,
    #[serde(with = "serde_ext")]
    pub std_error: f64,
    /// `(log r_j, S(r_j))` in decreasing `log r`.
    #[serde(with = "serde_ext::pairs")]
    pub samples: Vec<(f64, f64)>,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<Transform>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lines_used: Option<usize>,
    #[serde(with = "serde_ext::list", skip_serializing_if = "Vec::is_empty")]
    pub per_line: Vec<f64>,
    pub flags: Vec<EstimateFlag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<Box<LelongEstimate>>,
}

impl LelongEstimate {
    fn infinite(method: Method) -> Self {
        Self {
            value: f64::INFINITY,
            std_error: 0.0,
            samples: Vec::new(),
            method,
            transform: None,
            lines_used: None,
            per_line: Vec::new(),
            flags: vec![EstimateFlag::IdenticallyNegInfinity],
            cross_check: None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }

    pub fn has_flag(&self, pred: impl Fn(&EstimateFlag) -> bool) -> bool {
        self.flags.iter().any(pred)
    }

    /// The estimate for `c·φ` given this one for `φ`, `c > 0`.
    pub fn scaled(mut self, c: f64) -> Self {
        self.value *= c;
        self.std_error *= c;
        for s in &mut self.samples {
            s.1 *= c;
        }
        for v in &mut self.per_line {
            *v *= c;
        }
        self.cross_check = self.cross_check.map(|x| Box::new(x.scaled(c)));
        self
    }

    /// Samples as CSV with header `log_r,statistic`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("log_r,statistic\n");
        for (x, y) in &self.samples {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}

/// Least-squares fit of `S = ν·x + a + Σ b_j·r^{jκ}` (`x = log r`,
/// `j = 1..=corrections`); returns `ν` and its regression standard error.
/// Short tails drop correction columns so that one degree of freedom is
/// left, down to the plain line.
fn fit_slope(points: &[(f64, f64)], kappa: f64, corrections: usize) -> (f64, f64) {
    let n = points.len();
    let corrections = n.saturating_sub(3).min(corrections);
    let cols = 2 + corrections;
    if n < cols {
        return (f64::NAN, f64::INFINITY);
    }
    let design = DMatrix::from_fn(n, cols, |i, j| {
        let x = points[i].0;
        match j {
            0 => x,
            1 => 1.0,
            j => (kappa * (j - 1) as f64 * x).exp(),
        }
    });
    // unit columns keep the decomposition well scaled
    let norms: Vec<f64> = (0..cols).map(|j| design.column(j).norm()).collect();
    let mut scaled = design.clone();
    for (j, nj) in norms.iter().enumerate() {
        scaled.column_mut(j).unscale_mut(*nj);
    }
    let y = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let svd = scaled.clone().svd(true, true);
    let Ok(coef) = svd.solve(&y, 1e-14) else {
        return (f64::NAN, f64::INFINITY);
    };
    let slope = coef[0] / norms[0];
    if n == cols {
        return (slope, 0.0);
    }
    let residual = &y - &scaled * &coef;
    let sigma2 = residual.norm_squared() / (n - cols) as f64;
    let v_t = svd.v_t.as_ref().expect("computed");
    let var0: f64 = (0..cols)
        .map(|k| {
            let sk = svd.singular_values[k];
            if sk > 0.0 {
                (v_t[(k, 0)] / sk).powi(2)
            } else {
                0.0
            }
        })
        .sum();
    (slope, (sigma2 * var0).sqrt() / norms[0])
}

/// One statistic per radius, `None` for a dropped radius.
enum RadiusStat {
    Value(f64),
    NegInfinity,
    Dropped,
}

fn slope_from_stats(
    schedule: &RadiiSchedule,
    stats: Vec<RadiusStat>,
    method: Method,
    kappa: f64,
) -> Result<LelongEstimate> {
    let radii = schedule.radii();
    let mut samples = Vec::new();
    let mut tail = Vec::new();
    let mut dropped = 0;
    let mut neg_inf = 0;
    for (j, st) in stats.into_iter().enumerate() {
        match st {
            RadiusStat::Value(v) => {
                let p = (radii[j].ln(), v);
                samples.push(p);
                if j >= schedule.tail_start() {
                    tail.push(p);
                }
            }
            RadiusStat::NegInfinity => neg_inf += 1,
            RadiusStat::Dropped => dropped += 1,
        }
    }
    if samples.is_empty() && neg_inf > 0 {
        return Ok(LelongEstimate::infinite(method));
    }
    if tail.len() < MIN_TAIL {
        return Err(Error::TooFewSamples { got: tail.len(), need: MIN_TAIL });
    }
    let (slope, se) = fit_slope(&tail, 1.0, 1);
    // truncation bias shows up as disagreement between expansion models
    let mut alternatives = vec![fit_slope(&tail, 1.0, 0).0, fit_slope(&tail, 1.0, 2).0];
    if kappa != 1.0 {
        alternatives.push(fit_slope(&tail, kappa, 1).0);
    }
    let model = alternatives.iter().filter(|v| v.is_finite()).map(|v| (v - slope).abs()).fold(0.0, f64::max);
    let se = se.hypot(model);
    let mut flags = Vec::new();
    if dropped + neg_inf > 0 {
        flags.push(EstimateFlag::DroppedCircles { count: dropped + neg_inf });
    }
    Ok(LelongEstimate {
        value: if slope < 0.0 { 0.0 } else { slope },
        std_error: se,
        samples,
        method,
        transform: None,
        lines_used: None,
        per_line: Vec::new(),
        flags,
        cross_check: None,
    })
}

#[derive(Clone, Copy)]
enum CircleStat {
    Mean,
    Max,
}

fn node_angle(k: usize, attempt: usize, nodes: usize) -> f64 {
    // jittered nodes move by irrational fractions of the spacing
    let shift = 0.5 + 0.618_033_988_749_895 * attempt as f64;
    std::f64::consts::TAU * (k as f64 + shift.fract()) / nodes as f64
}

fn circle_statistic<F>(psi: &F, r: f64, nodes: usize, stat: CircleStat) -> Result<RadiusStat>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    let mut acc = 0.0;
    let mut best = f64::NEG_INFINITY;
    let mut used = 0usize;
    let mut saw_neg_inf = false;
    for k in 0..nodes {
        let mut value = None;
        for attempt in 0..=JITTER_ATTEMPTS {
            let v = psi(Complex64::from_polar(r, node_angle(k, attempt, nodes)))?;
            if v.is_finite() {
                value = Some(v);
                break;
            }
            if v == f64::NEG_INFINITY {
                saw_neg_inf = true;
                if matches!(stat, CircleStat::Max) {
                    break;
                }
            }
        }
        match (value, stat) {
            (Some(v), _) => {
                acc += v;
                best = best.max(v);
                used += 1;
            }
            (None, CircleStat::Mean) => {
                return Ok(if saw_neg_inf { RadiusStat::NegInfinity } else { RadiusStat::Dropped });
            }
            (None, CircleStat::Max) => {}
        }
    }
    if used == 0 {
        return Ok(if saw_neg_inf { RadiusStat::NegInfinity } else { RadiusStat::Dropped });
    }
    Ok(RadiusStat::Value(match stat {
        CircleStat::Mean => acc / used as f64,
        CircleStat::Max => best,
    }))
}

fn circle_estimate<F>(
    psi: &F,
    schedule: &RadiiSchedule,
    nodes: usize,
    stat: CircleStat,
    kappa: f64,
) -> Result<LelongEstimate>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    schedule.validate()?;
    if nodes < 4 {
        return Err(Error::InvalidArgument(format!("{nodes} quadrature nodes are too few")));
    }
    let radii = schedule.radii();
    let stats =
        par::map_slice(&radii, |&r| circle_statistic(psi, r, nodes, stat)).into_iter().collect::<Result<Vec<_>>>()?;
    let method = match stat {
        CircleStat::Mean => Method::CircleMean,
        CircleStat::Max => Method::CircleMax,
    };
    slope_from_stats(schedule, stats, method, kappa)
}

/// Slope of the mean of `ψ` over `|t| = r` against `log r` (64 nodes).
/// `ψ` may return NaN to exclude a node; excluded or `-∞` nodes are
/// jittered up to five times before the circle is dropped.
pub fn lelong_circle_mean_1d<F>(psi: F, schedule: &RadiiSchedule) -> Result<LelongEstimate>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    circle_estimate(&psi, schedule, 64, CircleStat::Mean, 1.0)
}

/// Slope of the max of `ψ` over `|t| = r` against `log r` (64 nodes).
pub fn lelong_circle_max_1d<F>(psi: F, schedule: &RadiiSchedule) -> Result<LelongEstimate>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    circle_estimate(&psi, schedule, 64, CircleStat::Max, 1.0)
}

/// Sampling density of the ambient sphere-max estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SphereConfig {
    /// Base points per shell and per base dimension at the first level.
    pub points_per_dim: usize,
    /// Relative half-width of the ambient band `| ‖x‖ - r | ≤ δ r`.
    pub band: f64,
    /// Ratio between consecutive base shells.
    pub shell_ratio: f64,
    /// Stop doubling once no `S(r_j)` moves by more than this.
    pub tolerance: f64,
    pub max_doublings: u32,
}

impl Default for SphereConfig {
    fn default() -> Self {
        Self { points_per_dim: 64, band: 0.05, shell_ratio: 1.05, tolerance: 1e-3, max_doublings: 4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LelongConfig {
    pub num_lines: usize,
    pub nodes: usize,
    pub seed: u64,
    pub sphere: SphereConfig,
    /// Run the sphere-max cross-check in [`lelong_number`].
    pub cross_check: bool,
}

impl Default for LelongConfig {
    fn default() -> Self {
        Self { num_lines: 8, nodes: 64, seed: 0, sphere: SphereConfig::default(), cross_check: true }
    }
}

/// Strips top-level nonnegative multipliers, outermost first.
fn peel(phi: &PshExpr) -> (Vec<f64>, &PshExpr) {
    let mut factors = Vec::new();
    let mut cur = phi;
    while let PshExpr::ScalarMul(c, child) = cur {
        factors.push(*c);
        cur = child;
    }
    (factors, cur)
}

const ZERO_EXPR: PshExpr = PshExpr::Const(0.0);

/// Runs `est` on the unscaled core of `φ` and reapplies the multipliers
/// innermost first, so that `est(a·φ) = a·est(φ)` holds bit for bit.
fn with_peeled<F>(phi: &PshExpr, est: F) -> Result<LelongEstimate>
where
    F: Fn(&PshExpr) -> Result<LelongEstimate>,
{
    let (factors, core) = peel(phi);
    if factors.contains(&0.0) {
        return est(&ZERO_EXPR);
    }
    let mut e = est(core)?;
    for &c in factors.iter().rev() {
        e = e.scaled(c);
    }
    Ok(e)
}

fn line_directions(chart: &HypersurfaceChart, cfg: &LelongConfig) -> Vec<Vec<Complex64>> {
    (0..cfg.num_lines)
        .map(|i| {
            let mut g = rng::stream(cfg.seed, &[STREAM_LINES, i as u64]);
            rng::unit_direction(&mut g, chart.base_dim())
        })
        .collect()
}

fn generic_line_core(
    transform: Transform,
    chart: &HypersurfaceChart,
    phi: &PshExpr,
    schedule: &RadiiSchedule,
    cfg: &LelongConfig,
) -> Result<LelongEstimate> {
    schedule.validate()?;
    phi.validate(chart.ambient_dim())?;
    if cfg.num_lines < 3 {
        return Err(Error::TooFewLines { got: cfg.num_lines, need: 3 });
    }
    let (schedule, clamp) = schedule.clamped(0.5 * chart.base_radius());
    // symmetric functions of the sheets are analytic in t; single sheets
    // expand in powers of t^{1/p}
    let (stat, kappa) = match transform {
        Transform::Aver => (CircleStat::Mean, 1.0),
        Transform::Max => (CircleStat::Max, 1.0 / chart.sheets() as f64),
    };
    let dirs = line_directions(chart, cfg);
    let per_line: Vec<Result<LelongEstimate>> = par::map_slice(&dirs, |u| {
        let line = restrict_to_base_line(transform, chart, phi, u)?;
        let psi = |t: Complex64| -> Result<f64> { line.value(t) };
        circle_estimate(&psi, &schedule, cfg.nodes, stat, kappa)
    });
    let mut estimates = Vec::new();
    let mut dropped = 0;
    for e in per_line {
        match e {
            Ok(e) => estimates.push(e),
            Err(Error::TooFewSamples { .. } | Error::NotProper(_)) => dropped += 1,
            Err(e) => return Err(e),
        }
    }
    if estimates.len() < 3 {
        return Err(Error::TooFewLines { got: estimates.len(), need: 3 });
    }
    let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    let (best, _) = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("at least three lines");
    let chosen = &estimates[best];
    let mut out = if chosen.is_infinite() {
        LelongEstimate::infinite(Method::GenericLine)
    } else {
        let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        let mean = finite.iter().sum::<f64>() / finite.len() as f64;
        let spread = if finite.len() > 1 {
            (finite.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (finite.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        LelongEstimate {
            value: chosen.value,
            std_error: spread.hypot(chosen.std_error),
            samples: chosen.samples.clone(),
            method: Method::GenericLine,
            transform: None,
            lines_used: None,
            per_line: Vec::new(),
            flags: chosen.flags.clone(),
            cross_check: None,
        }
    };
    out.transform = Some(transform);
    out.lines_used = Some(estimates.len());
    out.per_line = values;
    if dropped > 0 {
        out.flags.push(EstimateFlag::DroppedLines { count: dropped });
    }
    if let Some(f) = clamp {
        out.flags.push(f);
    }
    Ok(out)
}

/// Minimum over random lines through the base center of the 1-D Lelong
/// number of `φ_aver` (circle mean) or `φ_max` (circle max).
pub fn lelong_generic_line(
    transform: Transform,
    chart: &HypersurfaceChart,
    phi: &PshExpr,
    schedule: &RadiiSchedule,
    cfg: &LelongConfig,
) -> Result<LelongEstimate> {
    with_peeled(phi, |core| generic_line_core(transform, chart, core, schedule, cfg))
}

fn sphere_max_core(
    phi: &PshExpr,
    chart: &HypersurfaceChart,
    schedule: &RadiiSchedule,
    cfg: &LelongConfig,
) -> Result<LelongEstimate> {
    schedule.validate()?;
    phi.validate(chart.ambient_dim())?;
    let sc = cfg.sphere;
    if !(sc.band > 0.0 && sc.band < 1.0 && sc.shell_ratio > 1.0 && sc.points_per_dim > 0) {
        return Err(Error::InvalidArgument("sphere sampling parameters out of range".into()));
    }
    let (schedule, clamp) = schedule.clamped(0.5 * chart.base_radius() / (1.0 + sc.band));
    let k = chart.base_dim();
    let c = chart.properness_constant();
    let radii = schedule.radii();
    // base shells bracketing the ambient band
    let shells: Vec<(usize, usize, f64)> = radii
        .iter()
        .enumerate()
        .flat_map(|(j, &r)| {
            let hi = r * (1.0 + sc.band);
            let lo = r * (1.0 - sc.band) / (1.0 + c);
            let n = ((hi / lo).ln() / sc.shell_ratio.ln()).ceil().max(1.0) as usize;
            (0..=n).map(move |i| (j, i, hi * (lo / hi).powf(i as f64 / n as f64)))
        })
        .collect();
    let base_count = sc.points_per_dim * k;
    let sample_range = |from: usize, to: usize| -> Result<Vec<f64>> {
        par::map_slice(&shells, |&(j, i, s)| -> Result<f64> {
            let r = radii[j];
            let mut best = f64::NEG_INFINITY;
            for idx in from..to {
                let mut g = rng::stream(cfg.seed, &[STREAM_SPHERE, j as u64, i as u64, idx as u64]);
                let offset: Vec<Complex64> = rng::unit_direction(&mut g, k).into_iter().map(|d| d * s).collect();
                let fiber = chart.fiber_offset(&offset)?;
                for &eta in &fiber.offsets {
                    let amb = (s * s + eta.norm_sqr()).sqrt();
                    if (amb - r).abs() <= sc.band * r * (1.0 + 1e-12) {
                        best = best.max(phi.eval_unchecked(&chart.complete_offset(&offset, eta)));
                    }
                }
            }
            Ok(best)
        })
        .into_iter()
        .collect()
    };
    let reduce = |shell_max: &[f64], m: &mut [f64]| {
        for (&(j, _, _), &v) in shells.iter().zip(shell_max) {
            m[j] = m[j].max(v);
        }
    };
    let mut m = vec![f64::NEG_INFINITY; radii.len()];
    reduce(&sample_range(0, base_count)?, &mut m);
    let mut drawn = base_count;
    let mut last_change = f64::INFINITY;
    for _ in 0..sc.max_doublings {
        let mut next = m.clone();
        reduce(&sample_range(drawn, 2 * drawn)?, &mut next);
        drawn *= 2;
        last_change = m.iter().zip(&next).map(|(a, b)| if a == b { 0.0 } else { (b - a).abs() }).fold(0.0, f64::max);
        m = next;
        if last_change < sc.tolerance {
            break;
        }
    }
    let stats = m
        .iter()
        .map(|&v| if v == f64::NEG_INFINITY { RadiusStat::NegInfinity } else { RadiusStat::Value(v) })
        .collect();
    let mut est = slope_from_stats(&schedule, stats, Method::SphereMax, 1.0 / chart.sheets() as f64)?;
    if (last_change.is_nan() || last_change >= sc.tolerance) && !est.is_infinite() {
        est.flags.push(EstimateFlag::SamplingNotConverged { change: last_change });
    }
    if let Some(f) = clamp {
        est.flags.push(f);
    }
    Ok(est)
}

/// Slope of `max{φ(x) : x ∈ A, |‖x - a‖ - r| ≤ δ r}` against `log r`, with
/// variety points generated as fibers over base shells.
pub fn lelong_sphere_max(
    phi: &PshExpr,
    chart: &HypersurfaceChart,
    schedule: &RadiiSchedule,
    cfg: &LelongConfig,
) -> Result<LelongEstimate> {
    with_peeled(phi, |core| sphere_max_core(core, chart, schedule, cfg))
}

fn agree(a: &LelongEstimate, b: &LelongEstimate) -> Option<EstimateFlag> {
    if a.value == b.value {
        return None;
    }
    let tolerance = (3.0 * a.std_error.hypot(b.std_error)).max(0.05);
    if (a.value - b.value).abs() <= tolerance {
        None
    } else {
        Some(EstimateFlag::EstimatorDisagreement { primary: a.value, cross_check: b.value, tolerance })
    }
}

/// `ν_φ(center)`: the generic-line estimate of `φ_max`, cross-checked
/// against the ambient sphere max when `cfg.cross_check` is set.
pub fn lelong_number(
    phi: &PshExpr,
    chart: &HypersurfaceChart,
    schedule: &RadiiSchedule,
    cfg: &LelongConfig,
) -> Result<LelongEstimate> {
    with_peeled(phi, |core| {
        let mut primary = generic_line_core(Transform::Max, chart, core, schedule, cfg)?;
        if cfg.cross_check {
            let cross = sphere_max_core(core, chart, schedule, cfg)?;
            if let Some(flag) = agree(&primary, &cross) {
                primary.flags.push(flag);
            }
            primary.cross_check = Some(Box::new(cross));
        }
        Ok(primary)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchEstimate {
    pub combined: LelongEstimate,
    pub per_branch: Vec<LelongEstimate>,
    /// Index of the branch attaining the minimum.
    pub argmin: usize,
}

/// Minimum of the per-branch Lelong numbers; branches where `φ ≡ -∞`
/// report `+∞`.
pub fn lelong_min_over_branches(
    phi: &PshExpr,
    charts: &[HypersurfaceChart],
    schedule: &RadiiSchedule,
    cfg: &LelongConfig,
) -> Result<BranchEstimate> {
    if charts.is_empty() {
        return Err(Error::InvalidArgument("at least one branch is required".into()));
    }
    let center = charts[0].center();
    for ch in &charts[1..] {
        if ch.ambient_dim() != charts[0].ambient_dim()
            || ch.center().iter().zip(center).any(|(a, b)| (a - b).norm() > 1e-12)
        {
            return Err(Error::InvalidArgument("branches must share the center".into()));
        }
    }
    let per_branch = charts.iter().map(|ch| lelong_number(phi, ch, schedule, cfg)).collect::<Result<Vec<_>>>()?;
    let (argmin, _) = per_branch.iter().enumerate().min_by(|a, b| a.1.value.total_cmp(&b.1.value)).expect("nonempty");
    Ok(BranchEstimate { combined: per_branch[argmin].clone(), per_branch, argmin })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingOrder {
    #[serde(with = "serde_ext")]
    pub value: f64,
    /// `(numerator, denominator)` when the estimate snapped to the grid.
    pub snapped: Option<(u64, u64)>,
    pub estimate: LelongEstimate,
}

/// Nearest fraction `q/d` with `d ≤ max_den`, preferring small `d` on ties.
fn snap(value: f64, max_den: usize, tol: f64) -> Option<(u64, u64)> {
    let mut best: Option<(f64, u64, u64)> = None;
    for d in 1..=max_den.max(1) as u64 {
        let q = (value * d as f64).round();
        if q < 0.0 {
            continue;
        }
        let err = (value - q / d as f64).abs();
        if err <= tol && best.is_none_or(|(e, _, _)| err < e - 1e-12) {
            best = Some((err, q as u64, d));
        }
    }
    best.map(|(_, q, d)| {
        let g = gcd(q, d);
        (q / g, d / g)
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Fails when some sheet of `f` vanishes at most sampled base points.
fn check_not_vanishing(f: &SparsePoly, chart: &HypersurfaceChart, seed: u64) -> Result<()> {
    const SAMPLES: usize = 8;
    let k = chart.base_dim();
    let mut hits = 0;
    for i in 0..SAMPLES {
        let mut g = rng::stream(seed, &[STREAM_VANISH, i as u64]);
        let offset: Vec<Complex64> =
            rng::unit_direction(&mut g, k).into_iter().map(|d| d * 0.3 * chart.base_radius()).collect();
        let fiber = chart.fiber_offset(&offset)?;
        let vanishes = fiber.offsets.iter().any(|&eta| {
            let x = chart.complete_offset(&offset, eta);
            let scale = f.abs_eval_unchecked(&x);
            f.eval_unchecked(&x).norm() <= 1e-10 * scale.max(f64::MIN_POSITIVE)
        });
        if vanishes {
            hits += 1;
        }
    }
    if 2 * hits >= SAMPLES {
        Err(Error::VanishesIdentically)
    } else {
        Ok(())
    }
}

/// `ν_{log|f|}(center)` snapped to `(1/d)·ℤ`, `d ≤ p`, when within 0.05.
pub fn vanishing_mult(
    f: &SparsePoly,
    chart: &HypersurfaceChart,
    schedule: &RadiiSchedule,
    cfg: &LelongConfig,
) -> Result<VanishingOrder> {
    if f.num_vars() != chart.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: chart.ambient_dim(), got: f.num_vars() });
    }
    if f.is_zero() {
        return Err(Error::VanishesIdentically);
    }
    check_not_vanishing(f, chart, cfg.seed)?;
    let mut estimate = lelong_number(&PshExpr::LogAbs(f.clone()), chart, schedule, cfg)?;
    if estimate.is_infinite() {
        return Err(Error::VanishesIdentically);
    }
    let snapped = snap(estimate.value, chart.sheets(), 0.05);
    let value = match snapped {
        Some((q, d)) => q as f64 / d as f64,
        None => {
            estimate.flags.push(EstimateFlag::Unsnapped);
            estimate.value
        }
    };
    Ok(VanishingOrder { value, snapped, estimate })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectiveMass {
    #[serde(with = "serde_ext")]
    pub value: f64,
    #[serde(with = "serde_ext")]
    pub std_error: f64,
    pub multiplicity: usize,
    pub aver: LelongEstimate,
}

/// `ν̄_φ(center) = mult(A, center) · ν_{φ_aver}(center)`.
pub fn projective_mass(
    phi: &PshExpr,
    chart: &HypersurfaceChart,
    schedule: &RadiiSchedule,
    cfg: &LelongConfig,
) -> Result<ProjectiveMass> {
    let mult = multiplicity(chart, true, cfg.seed)?;
    let aver = lelong_generic_line(Transform::Aver, chart, phi, schedule, cfg)?;
    Ok(ProjectiveMass {
        value: mult as f64 * aver.value,
        std_error: mult as f64 * aver.std_error,
        multiplicity: mult,
        aver,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalculusReport {
    pub a: f64,
    pub nu_phi: LelongEstimate,
    pub nu_psi: LelongEstimate,
    pub nu_scaled: LelongEstimate,
    pub nu_sum: LelongEstimate,
    pub nu_max: LelongEstimate,
    /// `|ν(aφ) - a·ν(φ)|`
    #[serde(with = "serde_ext")]
    pub scaling_residual: f64,
    /// `|ν(φ+ψ) - ν(φ) - ν(ψ)|`
    #[serde(with = "serde_ext")]
    pub additivity_residual: f64,
    /// `|ν(max(φ,ψ)) - min(ν(φ), ν(ψ))|`
    #[serde(with = "serde_ext")]
    pub max_residual: f64,
    pub irreducibility: IrreducibilityVerdict,
}

fn residual(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

/// Residuals of the scaling, additivity and max-min rules.
pub fn check_calculus(
    phi: &PshExpr,
    psi: &PshExpr,
    chart: &HypersurfaceChart,
    a: f64,
    schedule: &RadiiSchedule,
    cfg: &LelongConfig,
) -> Result<CalculusReport> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::InvalidArgument(format!("multiplier {a} must be nonnegative")));
    }
    let irreducibility = strong_local_irreducibility(chart, 20, cfg.seed, &MonodromyConfig::default())?;
    if irreducibility.verdict != Verdict::StronglyLocallyIrreducible {
        return Err(Error::Precondition(format!(
            "the germ is not strongly locally irreducible (verdict: {}, fraction {:.2})",
            irreducibility.verdict, irreducibility.fraction
        )));
    }
    let nu = |e: &PshExpr| lelong_number(e, chart, schedule, cfg);
    let nu_phi = nu(phi)?;
    let nu_psi = nu(psi)?;
    let nu_scaled = nu(&phi.clone().scaled(a))?;
    let nu_sum = nu(&phi.clone().plus(psi.clone()))?;
    let nu_max = nu(&phi.clone().max_with(psi.clone()))?;
    let scaled_expect = if a == 0.0 { 0.0 } else { nu_phi.value * a };
    Ok(CalculusReport {
        a,
        scaling_residual: residual(nu_scaled.value, scaled_expect),
        additivity_residual: residual(nu_sum.value, nu_phi.value + nu_psi.value),
        max_residual: residual(nu_max.value, nu_phi.value.min(nu_psi.value)),
        nu_phi,
        nu_psi,
        nu_scaled,
        nu_sum,
        nu_max,
        irreducibility,
    })
}
