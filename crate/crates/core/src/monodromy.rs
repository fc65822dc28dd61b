//! Monodromy of the covering restricted to complex lines through the base
//! center, and the sampled strong-local-irreducibility test.
//!
//! On a line `t ↦ t·u` the local discriminant is `t^m g(t)` with `g(0) ≠ 0`.
//! A loop of radius `ρ` winds `m + #{zeros of g inside}` times around it, so
//! the germ's monodromy is read off once the winding stops changing as `ρ`
//! shrinks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{track_roots, Permutation, TrackConfig, UniPoly};
use crate::variety::HypersurfaceChart;
use crate::{par, rng};

const STREAM_LINES: u64 = 0x11E5;
const RESAMPLES: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonodromyConfig {
    /// Initial steps per turn.
    pub steps: usize,
    /// Maximal number of radius halvings when searching for the germ loop.
    pub ladder_depth: u32,
    /// Consecutive radii that must agree on the discriminant winding.
    pub ladder_agree: usize,
    /// The ladder keeps shrinking at least down to this fraction of the
    /// starting radius.
    pub descent: f64,
    /// Starting loop radius; `None` means half the base radius.
    pub loop_radius: Option<f64>,
    /// Signed number of turns around the loop.
    pub turns: i32,
    pub track: TrackConfig,
}

impl Default for MonodromyConfig {
    fn default() -> Self {
        Self {
            steps: 256,
            ladder_depth: 48,
            ladder_agree: 4,
            descent: 1e-9,
            loop_radius: None,
            turns: 1,
            track: TrackConfig::default(),
        }
    }
}

/// Permutation of the sheets after one trip around `|t| = ρ` on a line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonodromyReport {
    pub direction: Vec<Complex64>,
    pub loop_radius: f64,
    /// One-line notation on sheets sorted by `(re, im)` at `t = ρ`.
    pub permutation: Permutation,
    pub orbits: Vec<Vec<usize>>,
    pub transitive: bool,
    #[serde(serialize_with = "crate::serde_ext::serialize")]
    pub min_gap: f64,
    pub steps: usize,
    pub refinements: usize,
    pub discriminant_winding: i64,
}

/// Radii visited while shrinking the loop onto the germ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderRung {
    pub loop_radius: f64,
    pub discriminant_winding: i64,
    pub cycle_type: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GermMonodromy {
    pub report: MonodromyReport,
    pub ladder: Vec<LadderRung>,
    /// False when the ladder ran out before the winding settled.
    pub settled: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "strong-locally-irreducible")]
    StronglyLocallyIrreducible,
    #[serde(rename = "not")]
    Not,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::StronglyLocallyIrreducible => "strong-locally-irreducible",
            Verdict::Not => "not",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineOutcome {
    pub index: usize,
    pub resamples: usize,
    pub germ: GermMonodromy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IrreducibilityVerdict {
    /// Lines that produced a monodromy permutation.
    pub num_lines: usize,
    pub num_irreducible: usize,
    pub fraction: f64,
    pub verdict: Verdict,
    pub seed: u64,
    /// Lines replaced after a tracking failure.
    pub resampled: usize,
    pub failed: usize,
    pub per_line: Vec<LineOutcome>,
}

fn check_direction(chart: &HypersurfaceChart, u: &[Complex64]) -> Result<()> {
    if u.len() != chart.base_dim() {
        return Err(Error::DimensionMismatch { expected: chart.base_dim(), got: u.len() });
    }
    let n = crate::norm(u);
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("direction must be a unit vector (|u| = {n})")));
    }
    Ok(())
}

fn lex_sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// Tracks the local sheets once around `t = ρ e^{iθ}` on the line with
/// direction `u`.
pub fn monodromy_on_line(
    chart: &HypersurfaceChart,
    u: &[Complex64],
    rho: f64,
    cfg: &MonodromyConfig,
) -> Result<MonodromyReport> {
    check_direction(chart, u)?;
    if !(rho > 0.0 && rho <= chart.base_radius()) {
        return Err(Error::InvalidArgument(format!("loop radius {rho:e} must lie in (0, {:e}]", chart.base_radius())));
    }
    if cfg.turns == 0 {
        return Err(Error::InvalidArgument("a loop needs a nonzero number of turns".into()));
    }
    let pencil = chart.line_pencil(u)?;
    let start_fiber = chart.line_fiber(&pencil, Complex64::new(rho, 0.0))?;
    if start_fiber.min_gap == 0.0 {
        return Err(Error::Collision { s: 0.0 });
    }
    let start = lex_sorted(start_fiber.offsets);
    let p = start.len();
    if p == 1 {
        return Ok(MonodromyReport {
            direction: u.to_vec(),
            loop_radius: rho,
            permutation: Permutation::identity(1),
            orbits: vec![vec![0]],
            transitive: true,
            min_gap: f64::INFINITY,
            steps: 0,
            refinements: 0,
            discriminant_winding: 0,
        });
    }
    let turns = cfg.turns as f64;
    let family = |s: f64| -> UniPoly { pencil.at(Complex64::from_polar(rho, std::f64::consts::TAU * turns * s)) };
    let tcfg = TrackConfig { initial_steps: cfg.steps * cfg.turns.unsigned_abs() as usize, ..cfg.track };
    let tr = track_roots(&family, &start, &tcfg)?;
    let permutation = tr.permutation_onto(&start)?;
    let orbits = permutation.cycles();
    Ok(MonodromyReport {
        direction: u.to_vec(),
        loop_radius: rho,
        transitive: orbits.len() == 1,
        orbits,
        permutation,
        min_gap: tr.min_gap,
        steps: tr.steps,
        refinements: tr.refinements,
        discriminant_winding: tr.discriminant_winding.round() as i64,
    })
}

/// Shrinks the loop until it is below `descent` times the starting radius
/// and the discriminant winding is the same on `ladder_agree` consecutive
/// radii, i.e. until no discriminant point other than the center is enclosed.
pub fn germ_monodromy(chart: &HypersurfaceChart, u: &[Complex64], cfg: &MonodromyConfig) -> Result<GermMonodromy> {
    let mut rho = cfg.loop_radius.unwrap_or(0.5 * chart.base_radius()).min(chart.base_radius());
    let floor = rho * cfg.descent;
    let mut ladder: Vec<LadderRung> = Vec::new();
    let mut last: Option<MonodromyReport> = None;
    let agree = cfg.ladder_agree.max(1);
    for _ in 0..=cfg.ladder_depth {
        let rep = match monodromy_on_line(chart, u, rho, cfg) {
            Ok(r) => r,
            // a discriminant point on or near the circle: step past it
            Err(Error::Collision { .. }) => {
                rho *= 0.83;
                continue;
            }
            Err(e) => return Err(e),
        };
        ladder.push(LadderRung {
            loop_radius: rho,
            discriminant_winding: rep.discriminant_winding,
            cycle_type: rep.permutation.cycle_type(),
        });
        let p = rep.permutation.len();
        last = Some(rep);
        if p == 1 {
            break;
        }
        if ladder.len() >= agree && rho <= floor {
            let tail = &ladder[ladder.len() - agree..];
            if tail.iter().all(|r| r.discriminant_winding == tail[0].discriminant_winding) {
                let report = last.expect("just set");
                return Ok(GermMonodromy { report, ladder, settled: true });
            }
        }
        rho *= 0.5;
    }
    match last {
        Some(report) => {
            let settled = report.permutation.len() == 1;
            Ok(GermMonodromy { report, ladder, settled })
        }
        None => Err(Error::Collision { s: 0.0 }),
    }
}

/// Samples `num_lines` random lines through the base center and classifies
/// the germ by the fraction of lines with transitive monodromy.
pub fn strong_local_irreducibility(
    chart: &HypersurfaceChart,
    num_lines: usize,
    seed: u64,
    cfg: &MonodromyConfig,
) -> Result<IrreducibilityVerdict> {
    if num_lines < 20 {
        return Err(Error::TooFewLines { got: num_lines, need: 20 });
    }
    let k = chart.base_dim();
    let outcomes: Vec<std::result::Result<LineOutcome, Error>> = par::map_indices(num_lines, |i| {
        let mut last_err = Error::Collision { s: 0.0 };
        for attempt in 0..RESAMPLES {
            let mut g = rng::stream(seed, &[STREAM_LINES, i as u64, attempt]);
            let u = rng::unit_direction(&mut g, k);
            match germ_monodromy(chart, &u, cfg) {
                Ok(germ) if germ.settled => {
                    return Ok(LineOutcome { index: i, resamples: attempt as usize, germ });
                }
                Ok(_) => last_err = Error::Collision { s: 0.0 },
                Err(e @ (Error::Collision { .. } | Error::DegreeDrop { .. } | Error::NotProper(_))) => last_err = e,
                Err(e) => return Err(e),
            }
        }
        Err(last_err)
    });
    let mut per_line = Vec::new();
    let mut failed = 0;
    for o in outcomes {
        match o {
            Ok(l) => per_line.push(l),
            Err(Error::Collision { .. } | Error::DegreeDrop { .. } | Error::NotProper(_)) => failed += 1,
            Err(e) => return Err(e),
        }
    }
    if 2 * failed > num_lines {
        return Err(Error::TrackingFailures { failed, total: num_lines });
    }
    let resampled = per_line.iter().map(|l| l.resamples).sum();
    let n = per_line.len();
    let num_irreducible = per_line.iter().filter(|l| l.germ.report.transitive).count();
    let fraction = num_irreducible as f64 / n as f64;
    let verdict = if fraction >= 0.95 {
        Verdict::StronglyLocallyIrreducible
    } else if fraction <= 0.05 {
        Verdict::Not
    } else {
        Verdict::Inconclusive
    };
    Ok(IrreducibilityVerdict { num_lines: n, num_irreducible, fraction, verdict, seed, resampled, failed, per_line })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{SparsePoly, Variables};
    use crate::variety::{make_chart, SearchParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn parity_chart(k: u32, l: u32) -> HypersurfaceChart {
        let vars = Variables::new(["z", "w", "xi"]).unwrap();
        let p = SparsePoly::parse(&format!("xi^2 - z^{k} - w^{l}"), &vars).unwrap();
        make_chart(&p, &[c(0.0, 0.0); 3], &[0, 1], SearchParams::default()).unwrap()
    }

    fn unit(a: Complex64, b: Complex64) -> Vec<Complex64> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        vec![a / n, b / n]
    }

    #[test]
    fn odd_cusp_swaps_sheets() {
        let ch = parity_chart(3, 4);
        let u = unit(c(0.8, 0.1), c(-0.3, 0.5));
        let g = germ_monodromy(&ch, &u, &MonodromyConfig::default()).unwrap();
        assert!(g.settled);
        assert!(g.report.transitive);
        assert_eq!(g.report.permutation.as_slice(), &[1, 0]);
        assert_eq!(g.report.discriminant_winding, 3);
    }

    #[test]
    fn even_cusp_keeps_sheets() {
        let ch = parity_chart(2, 4);
        let u = unit(c(0.8, 0.1), c(-0.3, 0.5));
        let g = germ_monodromy(&ch, &u, &MonodromyConfig::default()).unwrap();
        assert!(!g.report.transitive);
        assert_eq!(g.report.orbits, vec![vec![0], vec![1]]);
        assert_eq!(g.report.discriminant_winding, 2);
    }

    #[test]
    fn large_loop_sees_extra_branch_points() {
        // x^2 - y^2 + z^3 on the line (x, z) = t(a, b): extra branch point at -a^2/b^3
        let vars = Variables::new(["x", "y", "z"]).unwrap();
        let p = SparsePoly::parse("x^2 - y^2 + z^3", &vars).unwrap();
        let ch = make_chart(&p, &[c(0.0, 0.0); 3], &[0, 2], SearchParams::default()).unwrap();
        let u = unit(c(0.2, 0.0), c(0.9, 0.0));
        let t_star = (u[0] * u[0] / (u[1] * u[1] * u[1])).norm();
        let cfg = MonodromyConfig::default();
        let outer = monodromy_on_line(&ch, &u, (2.0 * t_star).min(ch.base_radius()), &cfg).unwrap();
        assert!(outer.transitive);
        let inner = monodromy_on_line(&ch, &u, 0.5 * t_star, &cfg).unwrap();
        assert!(!inner.transitive);
        let germ = germ_monodromy(&ch, &u, &cfg).unwrap();
        assert!(!germ.report.transitive);
    }

    #[test]
    fn reversal_and_doubling() {
        let ch = parity_chart(3, 3);
        let u = unit(c(0.6, 0.2), c(0.1, -0.7));
        let cfg = MonodromyConfig { turns: 1, ..Default::default() };
        let rho = 0.01;
        let fwd = monodromy_on_line(&ch, &u, rho, &cfg).unwrap();
        let back = monodromy_on_line(&ch, &u, rho, &MonodromyConfig { turns: -1, ..cfg }).unwrap();
        assert_eq!(back.permutation, fwd.permutation.inverse());
        let twice = monodromy_on_line(&ch, &u, rho, &MonodromyConfig { turns: 2, ..cfg }).unwrap();
        assert_eq!(twice.permutation, fwd.permutation.pow(2));
    }

    #[test]
    fn smooth_chart_is_trivial() {
        let vars = Variables::new(["x", "y", "z"]).unwrap();
        let p = SparsePoly::parse("y", &vars).unwrap();
        let ch = make_chart(&p, &[c(0.0, 0.0); 3], &[0, 2], SearchParams::default()).unwrap();
        let v = strong_local_irreducibility(&ch, 20, 1, &MonodromyConfig::default()).unwrap();
        assert_eq!(v.verdict, Verdict::StronglyLocallyIrreducible);
        assert_eq!(v.fraction, 1.0);
        assert!(strong_local_irreducibility(&ch, 5, 1, &MonodromyConfig::default()).is_err());
    }

    #[test]
    fn sampled_verdicts() {
        let cfg = MonodromyConfig::default();
        let odd = strong_local_irreducibility(&parity_chart(3, 4), 20, 7, &cfg).unwrap();
        assert_eq!(odd.verdict, Verdict::StronglyLocallyIrreducible);
        let even = strong_local_irreducibility(&parity_chart(2, 4), 20, 7, &cfg).unwrap();
        assert_eq!(even.verdict, Verdict::Not);
    }
}
