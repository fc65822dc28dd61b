//! Hypersurface charts `A = {P = 0}` near a center, the ramified covering
//! `Π: A → base` given by dropping the fiber coordinate, and its fibers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{parse_complex, RootConfig, RootSet, SparsePoly, Substitution, UniPoly, Variables};
use crate::{norm, par, rng};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative gap below which a base point counts as near the discriminant.
pub const NEAR_DISCRIMINANT_GAP: f64 = 1e-5;

const STREAM_CHART: u64 = 0xC4A7;
const STREAM_MULT: u64 = 0x4D17;

/// Fixed chart radii, bypassing the search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedRadii {
    pub base: f64,
    pub fiber: f64,
}

/// Parameters of the radii search in [`make_chart`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchParams {
    pub initial_base_radius: f64,
    pub shrink: f64,
    pub max_shrinks: usize,
    /// Base points sampled per trial radius.
    pub samples: usize,
    /// A fiber root `η` over `x'` is local when `|η| ≤ local_ratio · |x'|`.
    pub local_ratio: f64,
    /// Non-local roots must satisfy `|η| ≥ far_factor · local_ratio · r'`.
    pub far_factor: f64,
    pub seed: u64,
    pub fixed: Option<FixedRadii>,
    pub roots: RootConfig,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            initial_base_radius: 0.5,
            shrink: 0.5,
            max_shrinks: 20,
            samples: 64,
            local_ratio: 32.0,
            far_factor: 4.0,
            seed: 0,
            fixed: None,
            roots: RootConfig::default(),
        }
    }
}

/// A chart of a hypersurface near `center`, with a proper projection onto
/// the base coordinates.
#[derive(Clone, Debug)]
pub struct HypersurfaceChart {
    defining: SparsePoly,
    /// `Σ_d pencil[d](x') η^d = P(center + (x', η))`, base variables ordered
    /// as `base_dims`.
    pencil: Vec<SparsePoly>,
    base_dims: Vec<usize>,
    fiber_dim: usize,
    center: Vec<Complex64>,
    base_radius: f64,
    fiber_radius: f64,
    properness_constant: f64,
    sheets: usize,
    params: SearchParams,
}

/// The local fiber `Π^{-1}(x')` over one base point.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberSet {
    pub base_point: Vec<Complex64>,
    /// Fiber coordinates with multiplicities (clustered).
    pub points: Vec<crate::poly::Root>,
    /// Unclustered fiber coordinates, one per sheet.
    pub raw: Vec<Complex64>,
    pub residual_bound: f64,
    pub near_discriminant: bool,
    /// Smallest distance between two local roots (infinite for one sheet).
    pub min_gap: f64,
}

impl FiberSet {
    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|r| r.multiplicity).sum()
    }
}

/// Local fiber in chart-relative coordinates.
#[derive(Clone, Debug)]
pub(crate) struct LocalFiber {
    pub offsets: Vec<Complex64>,
    pub set: RootSet,
    pub near_discriminant: bool,
    pub min_gap: f64,
}

/// The fiber polynomial along the base line `t ↦ center' + t·u`.
#[derive(Clone, Debug)]
pub struct LinePencil {
    /// `coeffs[d]` is the dense polynomial in `t` multiplying `η^d`.
    coeffs: Vec<Vec<Complex64>>,
}

impl LinePencil {
    pub fn at(&self, t: Complex64) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c.iter().rev().fold(ZERO, |acc, a| acc * t + a)).collect())
    }
}

impl HypersurfaceChart {
    pub fn defining(&self) -> &SparsePoly {
        &self.defining
    }

    pub fn ambient_dim(&self) -> usize {
        self.center.len()
    }

    pub fn base_dim(&self) -> usize {
        self.base_dims.len()
    }

    pub fn base_dims(&self) -> &[usize] {
        &self.base_dims
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn center(&self) -> &[Complex64] {
        &self.center
    }

    pub fn center_base(&self) -> Vec<Complex64> {
        self.base_dims.iter().map(|&i| self.center[i]).collect()
    }

    pub fn center_fiber(&self) -> Complex64 {
        self.center[self.fiber_dim]
    }

    pub fn base_radius(&self) -> f64 {
        self.base_radius
    }

    pub fn fiber_radius(&self) -> f64 {
        self.fiber_radius
    }

    pub fn properness_constant(&self) -> f64 {
        self.properness_constant
    }

    /// Number of sheets `p` of the covering.
    pub fn sheets(&self) -> usize {
        self.sheets
    }

    pub fn search_params(&self) -> &SearchParams {
        &self.params
    }

    /// Ambient point `center + (offset', η)`.
    pub(crate) fn complete_offset(&self, base_offset: &[Complex64], eta: Complex64) -> Vec<Complex64> {
        let mut x = self.center.clone();
        for (k, &i) in self.base_dims.iter().enumerate() {
            x[i] += base_offset[k];
        }
        x[self.fiber_dim] += eta;
        x
    }

    /// Ambient point over an absolute base point with fiber coordinate `y`.
    pub fn complete(&self, base_point: &[Complex64], y: Complex64) -> Result<Vec<Complex64>> {
        if base_point.len() != self.base_dim() {
            return Err(Error::DimensionMismatch { expected: self.base_dim(), got: base_point.len() });
        }
        let mut x = vec![ZERO; self.ambient_dim()];
        for (k, &i) in self.base_dims.iter().enumerate() {
            x[i] = base_point[k];
        }
        x[self.fiber_dim] = y;
        Ok(x)
    }

    fn pencil_at(&self, offset: &[Complex64]) -> UniPoly {
        UniPoly::new(self.pencil.iter().map(|c| c.eval_unchecked(offset)).collect())
    }

    /// Fiber polynomial restricted to the base line through the center with
    /// direction `u`.
    pub fn line_pencil(&self, u: &[Complex64]) -> Result<LinePencil> {
        if u.len() != self.base_dim() {
            return Err(Error::DimensionMismatch { expected: self.base_dim(), got: u.len() });
        }
        let subs: Vec<Substitution> = u.iter().map(|&s| Substitution::Affine { offset: ZERO, slope: s }).collect();
        let coeffs = self
            .pencil
            .iter()
            .map(|c| {
                let line = c.specialize(&subs)?;
                if line.num_vars() == 0 {
                    return Ok(vec![line.coefficient(&[])]);
                }
                Ok(line.to_univariate()?.coeffs().to_vec())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LinePencil { coeffs })
    }

    pub(crate) fn local_fiber(&self, poly: UniPoly, base_scale: f64) -> Result<LocalFiber> {
        let set = poly.roots(&self.params.roots)?;
        let offsets: Vec<Complex64> = set.raw.iter().copied().filter(|z| z.norm() <= self.fiber_radius).collect();
        if offsets.len() != self.sheets {
            return Err(Error::NotProper(format!(
                "{} local fiber points where {} sheets were expected",
                offsets.len(),
                self.sheets
            )));
        }
        let mut min_gap = f64::INFINITY;
        for i in 0..offsets.len() {
            for j in (i + 1)..offsets.len() {
                min_gap = min_gap.min((offsets[i] - offsets[j]).norm());
            }
        }
        let scale = offsets.iter().map(|z| z.norm()).fold(base_scale, f64::max);
        let near_discriminant = min_gap < NEAR_DISCRIMINANT_GAP * scale || (self.sheets > 1 && scale == 0.0);
        Ok(LocalFiber { offsets, set, near_discriminant, min_gap })
    }

    pub(crate) fn fiber_offset(&self, offset: &[Complex64]) -> Result<LocalFiber> {
        let r = norm(offset);
        if r > self.base_radius * (1.0 + 1e-12) {
            return Err(Error::OutsideChart { norm: r, radius: self.base_radius });
        }
        self.local_fiber(self.pencil_at(offset), r)
    }

    pub(crate) fn line_fiber(&self, pencil: &LinePencil, t: Complex64) -> Result<LocalFiber> {
        let r = t.norm();
        if r > self.base_radius * (1.0 + 1e-12) {
            return Err(Error::OutsideChart { norm: r, radius: self.base_radius });
        }
        self.local_fiber(pencil.at(t), r)
    }

    /// All fiber points over an absolute base point, with multiplicities.
    pub fn fiber(&self, base_point: &[Complex64]) -> Result<FiberSet> {
        if base_point.len() != self.base_dim() {
            return Err(Error::DimensionMismatch { expected: self.base_dim(), got: base_point.len() });
        }
        let offset: Vec<Complex64> = base_point.iter().zip(self.center_base()).map(|(a, c)| a - c).collect();
        let local = self.fiber_offset(&offset)?;
        let c = self.center_fiber();
        let points = local
            .set
            .roots
            .iter()
            .filter(|r| r.value.norm() <= self.fiber_radius)
            .map(|r| crate::poly::Root { value: r.value + c, multiplicity: r.multiplicity })
            .collect();
        Ok(FiberSet {
            base_point: base_point.to_vec(),
            points,
            raw: local.offsets.iter().map(|z| z + c).collect(),
            residual_bound: local.set.residual_bound,
            near_discriminant: local.near_discriminant,
            min_gap: local.min_gap,
        })
    }

    /// The same germ in the frame `x = center + U w`.
    pub fn reframed(&self, unitary: &[Vec<Complex64>], params: SearchParams) -> Result<Self> {
        let n = self.ambient_dim();
        let shifted = self.defining.compose_affine(&self.center, unitary)?;
        make_chart(&shifted, &vec![ZERO; n], &self.base_dims, params)
    }
}

struct Trial {
    sheets: usize,
    max_ratio: f64,
    scale: f64,
}

fn check_residual(p: &SparsePoly, center: &[Complex64]) -> Result<()> {
    let value = p.eval(center)?.norm();
    let scale = p.abs_eval_unchecked(center).max(p.max_coefficient_norm());
    if value > 1e-10 * scale {
        return Err(Error::CenterOffVariety { residual: value });
    }
    Ok(())
}

/// Builds a chart of `{P = 0}` around `center` projecting onto `base_dims`.
///
/// The base radius shrinks geometrically from `initial_base_radius` until,
/// on every sampled base point, each fiber root is either local
/// (`|η| ≤ local_ratio·|x'|`) or far (`|η| ≥ far_factor·local_ratio·r'`) and
/// the local count is the same everywhere.
pub fn make_chart(
    p: &SparsePoly,
    center: &[Complex64],
    base_dims: &[usize],
    params: SearchParams,
) -> Result<HypersurfaceChart> {
    let n = p.num_vars();
    if center.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: center.len() });
    }
    if n < 2 || base_dims.len() != n - 1 {
        return Err(Error::InvalidArgument(format!(
            "a hypersurface in C^{n} needs {} base coordinates, got {}",
            n.saturating_sub(1),
            base_dims.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in base_dims {
        if i >= n {
            return Err(Error::VariableOutOfRange { index: i, num_vars: n });
        }
        if seen[i] {
            return Err(Error::InvalidArgument(format!("base coordinate {i} repeated")));
        }
        seen[i] = true;
    }
    let fiber_dim = seen.iter().position(|s| !s).expect("one coordinate left");
    check_residual(p, center)?;
    if p.degree_in(fiber_dim).unwrap_or(0) == 0 {
        return Err(Error::FiberIndependent);
    }

    // Q(w) = P(center + w), with w reordered as (base_dims..., fiber)
    let mut rows = vec![vec![ZERO; n]; n];
    for (k, &i) in base_dims.iter().enumerate() {
        rows[i][k] = Complex64::new(1.0, 0.0);
    }
    rows[fiber_dim][n - 1] = Complex64::new(1.0, 0.0);
    let local = p.compose_affine(center, &rows)?;
    let pencil = local.coefficients_in(n - 1)?;

    let mut chart = HypersurfaceChart {
        defining: p.clone(),
        pencil,
        base_dims: base_dims.to_vec(),
        fiber_dim,
        center: center.to_vec(),
        base_radius: params.initial_base_radius,
        fiber_radius: 0.0,
        properness_constant: 0.0,
        sheets: 0,
        params,
    };

    let k = n - 1;
    let attempts = if params.fixed.is_some() { 1 } else { params.max_shrinks + 1 };
    let mut last_reason = String::from("no attempt made");
    for attempt in 0..attempts {
        let (r_base, r_fiber) = match params.fixed {
            Some(f) => (f.base, f.fiber),
            None => {
                let r = params.initial_base_radius * params.shrink.powi(attempt as i32);
                (r, 2.0 * params.local_ratio * r)
            }
        };
        let far = params.far_factor * params.local_ratio * r_base;
        let results: Vec<std::result::Result<Trial, String>> = par::map_indices(params.samples, |i| {
            let mut g = rng::stream(params.seed, &[STREAM_CHART, attempt as u64, i as u64]);
            let dir = rng::unit_direction(&mut g, k);
            let s = if i % 4 == 0 { r_base } else { r_base * (1.0f64 / 64.0).powf(rand::Rng::random::<f64>(&mut g)) };
            let offset: Vec<Complex64> = dir.iter().map(|d| d * s).collect();
            let set = chart.pencil_at(&offset).roots(&params.roots).map_err(|e| e.to_string())?;
            let mut sheets = 0;
            let mut max_ratio: f64 = 0.0;
            for z in &set.raw {
                let d = z.norm();
                let is_local = match params.fixed {
                    Some(_) => d <= r_fiber,
                    None => d <= params.local_ratio * s,
                };
                if is_local {
                    sheets += 1;
                    max_ratio = max_ratio.max(d / s);
                } else if params.fixed.is_none() && d < far {
                    return Err(format!("fiber root at distance {d:e} is neither local nor far at r' = {r_base:e}"));
                }
            }
            Ok(Trial { sheets, max_ratio, scale: s })
        });
        let mut ok = true;
        let mut sheets = None;
        let mut max_ratio: f64 = 0.0;
        let (mut ratio_inner, mut ratio_outer) = (0.0f64, 0.0f64);
        for r in results {
            match r {
                Ok(t) => {
                    if t.sheets == 0 || sheets.is_some_and(|p| p != t.sheets) {
                        ok = false;
                        last_reason = format!("local sheet count varies at r' = {r_base:e}");
                        break;
                    }
                    sheets = Some(t.sheets);
                    max_ratio = max_ratio.max(t.max_ratio);
                    if t.scale <= r_base / 16.0 {
                        ratio_inner = ratio_inner.max(t.max_ratio);
                    } else if t.scale >= r_base / 4.0 {
                        ratio_outer = ratio_outer.max(t.max_ratio);
                    }
                }
                Err(reason) => {
                    ok = false;
                    last_reason = reason;
                    break;
                }
            }
        }
        // fiber points must stay in a cone |x''| <= C |x'|
        if ok && params.fixed.is_none() && ratio_inner > 2.0 * ratio_outer && ratio_inner > 1e-9 {
            ok = false;
            last_reason = format!(
                "fiber points leave every cone |x''| <= C|x'| (ratio {ratio_inner:.3e} near the center vs {ratio_outer:.3e} at r' = {r_base:e})"
            );
        }
        if ok {
            chart.base_radius = r_base;
            chart.fiber_radius = r_fiber;
            chart.sheets = sheets.unwrap_or(0);
            chart.properness_constant = (1.25 * max_ratio).max(1e-6);
            return Ok(chart);
        }
    }
    Err(Error::NotProper(last_reason))
}

/// Parameters of [`multiplicity`] with `randomize` set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MultiplicityConfig {
    pub trials: usize,
    pub max_trials: usize,
}

impl Default for MultiplicityConfig {
    fn default() -> Self {
        Self { trials: 5, max_trials: 12 }
    }
}

/// Local multiplicity at the chart center as the sheet count of a
/// projection. With `randomize`, random unitary frames are drawn and the
/// smallest count seen at least twice is returned.
pub fn multiplicity(chart: &HypersurfaceChart, randomize: bool, seed: u64) -> Result<usize> {
    multiplicity_with(chart, randomize, seed, MultiplicityConfig::default())
}

pub fn multiplicity_with(
    chart: &HypersurfaceChart,
    randomize: bool,
    seed: u64,
    cfg: MultiplicityConfig,
) -> Result<usize> {
    if !randomize {
        return Ok(chart.sheets());
    }
    let n = chart.ambient_dim();
    let trial = |t: usize| -> Option<usize> {
        let mut g = rng::stream(seed, &[STREAM_MULT, t as u64]);
        let u = rng::random_unitary(&mut g, n);
        let params =
            SearchParams { seed: rng::derive_seed(seed, &[STREAM_MULT, t as u64, 1]), fixed: None, ..chart.params };
        chart.reframed(&u, params).ok().map(|c| c.sheets())
    };
    let mut counts: Vec<usize> = par::map_indices(cfg.trials, trial).into_iter().flatten().collect();
    let mut next = cfg.trials;
    loop {
        if let Some(&min) = counts.iter().min() {
            let hits = counts.iter().filter(|&&c| c == min).count();
            if hits >= 2 || cfg.max_trials <= 1 {
                return Ok(min);
            }
        }
        if next >= cfg.max_trials {
            return Err(Error::UnstableMultiplicity(counts));
        }
        if let Some(c) = trial(next) {
            counts.push(c);
        }
        next += 1;
    }
}

/// A complex number in a problem file: a bare number, a literal such as
/// `"1-2i"`, or a `[re, im]` pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

impl ComplexInput {
    pub fn value(&self) -> Result<Complex64> {
        match self {
            ComplexInput::Real(r) => Ok(Complex64::new(*r, 0.0)),
            ComplexInput::Pair([re, im]) => Ok(Complex64::new(*re, *im)),
            ComplexInput::Text(s) => parse_complex(s),
        }
    }
}

/// Serializable chart description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDescription {
    pub polynomial: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<ComplexInput>>,
    pub base: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<FixedRadii>,
}

impl ChartDescription {
    /// Variables named in the description, or inferred from the polynomial.
    pub fn resolve_variables(&self) -> Result<Variables> {
        match &self.variables {
            Some(v) => Variables::new(v),
            None => Variables::infer([&self.polynomial]),
        }
    }

    pub fn build(&self, vars: &Variables, params: SearchParams) -> Result<HypersurfaceChart> {
        let p = SparsePoly::parse(&self.polynomial, vars)?;
        let center = match &self.center {
            Some(c) => c.iter().map(ComplexInput::value).collect::<Result<Vec<_>>>()?,
            None => vec![ZERO; vars.len()],
        };
        let base = self
            .base
            .iter()
            .map(|name| vars.index_of(name).ok_or_else(|| Error::UnknownVariable(name.clone())))
            .collect::<Result<Vec<_>>>()?;
        let params = SearchParams { fixed: self.radii, ..params };
        make_chart(&p, &center, &base, params)
    }

    /// Describes an existing chart; fixed radii are recorded from the chart.
    pub fn describe(chart: &HypersurfaceChart, vars: &Variables) -> Self {
        Self {
            polynomial: chart.defining().to_string_with(vars),
            variables: Some(vars.names().to_vec()),
            center: Some(chart.center().iter().map(|z| ComplexInput::Pair([z.re, z.im])).collect()),
            base: chart.base_dims().iter().map(|&i| vars.names()[i].clone()).collect(),
            radii: Some(FixedRadii { base: chart.base_radius(), fiber: chart.fiber_radius() }),
        }
    }
}
