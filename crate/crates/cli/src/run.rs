use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use serde::Serialize;
use serde_json::{json, Value};

use pluri_core::lelong::{
    check_calculus, lelong_generic_line, lelong_min_over_branches, lelong_number, projective_mass, LelongEstimate,
};
use pluri_core::monodromy::{strong_local_irreducibility, IrreducibilityVerdict, MonodromyConfig};
use pluri_core::poly::Variables;
use pluri_core::pshfun::{PshExpr, Transform};
use pluri_core::variety::{multiplicity_with, ChartDescription, HypersurfaceChart, MultiplicityConfig, SearchParams};
use pluri_core::verify::{run_suite, Suite, SuiteReport};

use crate::problem::{Effective, ProblemSpec, PshSpec, Task};

pub const SCHEMA_VERSION: u32 = 1;

/// Failure class, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad problem file, flags or expressions (exit code 2).
    Input(anyhow::Error),
    /// The computation itself failed (exit code 1).
    Compute(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Compute(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "input error: {e:#}"),
            Failure::Compute(e) => write!(f, "computation failed: {e:#}"),
        }
    }
}

fn input(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

/// Library errors that describe the input rather than the numerics.
fn classify(e: pluri_core::Error, what: &str) -> Failure {
    use pluri_core::Error as E;
    let is_input = matches!(
        e,
        E::Parse { .. }
            | E::UnknownVariable(_)
            | E::DimensionMismatch { .. }
            | E::VariableOutOfRange { .. }
            | E::InvalidArgument(_)
            | E::ZeroPolynomial
            | E::CenterOffVariety { .. }
            | E::FiberIndependent
    );
    let err = anyhow::Error::new(e).context(what.to_string());
    if is_input {
        Failure::Input(err)
    } else {
        Failure::Compute(err)
    }
}

#[derive(Serialize)]
pub struct Inputs {
    pub problem: ProblemSpec,
    /// Charts as built, with the radii the search settled on.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub charts: Vec<ChartDescription>,
}

#[derive(Serialize)]
pub struct Params {
    #[serde(flatten)]
    pub effective: Effective,
    pub monodromy: MonodromyConfig,
    pub chart_search: SearchParams,
    pub multiplicity: MultiplicityConfig,
}

#[derive(Serialize)]
pub struct Versions {
    pub pluri_core: &'static str,
    pub pluri_cli: &'static str,
}

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub task: Task,
    pub inputs: Inputs,
    pub params: Params,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monodromy: Option<IrreducibilityVerdict>,
    pub flags: Vec<Value>,
    pub versions: Versions,
    pub seed: u64,
    pub wall_time_s: f64,
    /// Human summary for standard output.
    #[serde(skip)]
    pub summary: String,
    /// Sample curve for the CSV export.
    #[serde(skip)]
    pub samples: Option<LelongEstimate>,
    #[serde(skip)]
    pub passed: bool,
}

struct Setup<'a> {
    problem: &'a ProblemSpec,
    search: SearchParams,
}

impl Setup<'_> {
    fn variables(&self, d: &ChartDescription, label: &str) -> Result<Variables, Failure> {
        d.resolve_variables().map_err(|e| classify(e, &format!("{label}: variables")))
    }

    fn chart(&self) -> Result<(Variables, HypersurfaceChart), Failure> {
        let d = self.problem.variety.as_ref().ok_or_else(|| input(anyhow!("task needs a [variety] table")))?;
        let vars = self.variables(d, "variety")?;
        let chart = d.build(&vars, self.search).map_err(|e| classify(e, "variety"))?;
        Ok((vars, chart))
    }

    fn psh(&self, vars: &Variables, field: &str) -> Result<PshExpr, Failure> {
        let PshSpec { phi, psi, .. } = &self.problem.psh;
        let text = match field {
            "phi" => phi,
            _ => psi,
        };
        let text = text.as_ref().ok_or_else(|| input(anyhow!("task needs psh.{field}")))?;
        PshExpr::parse(text, vars).map_err(|e| classify(e, &format!("psh.{field}")))
    }
}

fn estimate_summary(e: &LelongEstimate) -> String {
    if e.is_infinite() {
        "+inf (phi is -inf along the germ)".to_string()
    } else {
        format!("{:.4} +- {:.4}", e.value, e.std_error)
    }
}

fn flags_of(e: &LelongEstimate) -> Vec<Value> {
    let mut out: Vec<Value> = e.flags.iter().map(|f| serde_json::to_value(f).expect("plain data")).collect();
    if let Some(c) = &e.cross_check {
        out.extend(flags_of(c));
    }
    out
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports hold plain data")
}

pub fn run(problem: ProblemSpec, task: Task, seed: Option<u64>) -> Result<Report, Failure> {
    let eff = Effective::resolve(&problem.params, seed).map_err(input)?;
    let search = SearchParams { seed: eff.seed, ..SearchParams::default() };
    let mono = MonodromyConfig::default();
    let mult_cfg = MultiplicityConfig::default();
    let ctx = Setup { problem: &problem, search };
    let start = Instant::now();

    let mut charts = Vec::new();
    let mut flags = Vec::new();
    let mut monodromy = None;
    let mut samples = None;
    let mut passed = true;
    let (results, summary) = match task {
        Task::Lelong if !problem.branches.is_empty() => {
            let mut built = Vec::new();
            let mut vars = None;
            for (i, d) in problem.branches.iter().enumerate() {
                let v = ctx.variables(d, &format!("branches[{i}]"))?;
                let c = d.build(&v, search).map_err(|e| classify(e, &format!("branches[{i}]")))?;
                charts.push(ChartDescription::describe(&c, &v));
                built.push(c);
                if vars.as_ref().is_some_and(|w: &Variables| w != &v) {
                    return Err(input(anyhow!("branches must share their variables")));
                }
                vars = Some(v);
            }
            let vars = vars.expect("at least one branch");
            let phi = ctx.psh(&vars, "phi")?;
            let est = lelong_min_over_branches(&phi, &built, &eff.schedule, &eff.lelong)
                .map_err(|e| classify(e, "lelong"))?;
            flags.extend(flags_of(&est.combined));
            let summary = format!(
                "nu = {} (minimum over {} branches, attained on branch {})",
                estimate_summary(&est.combined),
                built.len(),
                est.argmin
            );
            samples = Some(est.combined.clone());
            (to_value(&est), summary)
        }
        Task::Lelong => {
            let (vars, chart) = ctx.chart()?;
            charts.push(ChartDescription::describe(&chart, &vars));
            let phi = ctx.psh(&vars, "phi")?;
            let est = lelong_number(&phi, &chart, &eff.schedule, &eff.lelong).map_err(|e| classify(e, "lelong"))?;
            flags.extend(flags_of(&est));
            let summary = format!("nu = {}", estimate_summary(&est));
            samples = Some(est.clone());
            (json!({ "estimate": est }), summary)
        }
        Task::TransformSlope => {
            let (vars, chart) = ctx.chart()?;
            charts.push(ChartDescription::describe(&chart, &vars));
            let phi = ctx.psh(&vars, "phi")?;
            let t = problem.psh.transform.unwrap_or(Transform::Aver);
            let est = lelong_generic_line(t, &chart, &phi, &eff.schedule, &eff.lelong)
                .map_err(|e| classify(e, "transform-slope"))?;
            flags.extend(flags_of(&est));
            let summary = format!("nu(phi_{t}) = {}", estimate_summary(&est));
            samples = Some(est.clone());
            (json!({ "transform": t, "estimate": est }), summary)
        }
        Task::Pmass => {
            let (vars, chart) = ctx.chart()?;
            charts.push(ChartDescription::describe(&chart, &vars));
            let phi = ctx.psh(&vars, "phi")?;
            let m = projective_mass(&phi, &chart, &eff.schedule, &eff.lelong).map_err(|e| classify(e, "pmass"))?;
            flags.extend(flags_of(&m.aver));
            let summary = format!(
                "projective mass = {:.4} +- {:.4} (multiplicity {} x nu(phi_aver) {})",
                m.value,
                m.std_error,
                m.multiplicity,
                estimate_summary(&m.aver)
            );
            samples = Some(m.aver.clone());
            (json!({ "projective_mass": m }), summary)
        }
        Task::Mult => {
            let (vars, chart) = ctx.chart()?;
            charts.push(ChartDescription::describe(&chart, &vars));
            let m = multiplicity_with(&chart, true, eff.seed, mult_cfg).map_err(|e| classify(e, "mult"))?;
            let summary = format!("multiplicity = {m} (sheets of the given projection: {})", chart.sheets());
            (json!({ "multiplicity": m, "sheets": chart.sheets() }), summary)
        }
        Task::Irreducible => {
            let (vars, chart) = ctx.chart()?;
            charts.push(ChartDescription::describe(&chart, &vars));
            let v = strong_local_irreducibility(&chart, eff.irreducibility_lines, eff.seed, &mono)
                .map_err(|e| classify(e, "irreducible"))?;
            let summary = format!(
                "verdict: {} ({} of {} lines transitive, fraction {:.3}, {} resampled)",
                v.verdict, v.num_irreducible, v.num_lines, v.fraction, v.resampled
            );
            let results = json!({ "verdict": v.verdict, "fraction": v.fraction });
            monodromy = Some(v);
            (results, summary)
        }
        Task::Props => {
            let (vars, chart) = ctx.chart()?;
            charts.push(ChartDescription::describe(&chart, &vars));
            let phi = ctx.psh(&vars, "phi")?;
            let psi = ctx.psh(&vars, "psi")?;
            let a = problem.psh.scale.ok_or_else(|| input(anyhow!("task needs psh.scale")))?;
            let r =
                check_calculus(&phi, &psi, &chart, a, &eff.schedule, &eff.lelong).map_err(|e| classify(e, "props"))?;
            for e in [&r.nu_phi, &r.nu_psi, &r.nu_scaled, &r.nu_sum, &r.nu_max] {
                flags.extend(flags_of(e));
            }
            let summary = format!(
                "residuals: scaling {:.2e}, additivity {:.2e}, max-min {:.2e}",
                r.scaling_residual, r.additivity_residual, r.max_residual
            );
            monodromy = Some(r.irreducibility.clone());
            (to_value(&r), summary)
        }
        Task::Verify => {
            let name = problem.suite.as_deref().ok_or_else(|| input(anyhow!("task verify needs `suite`")))?;
            let report = verify(name, eff.seed)?;
            passed = report.passed;
            let summary = format!(
                "{}{} checks, {}",
                report.table(),
                report.rows.len(),
                if passed { "all passed" } else { "FAILED" }
            );
            (to_value(&report), summary)
        }
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        task,
        inputs: Inputs { problem, charts },
        params: Params { effective: eff.clone(), monodromy: mono, chart_search: search, multiplicity: mult_cfg },
        results,
        monodromy,
        flags,
        versions: Versions { pluri_core: pluri_core::VERSION, pluri_cli: env!("CARGO_PKG_VERSION") },
        seed: eff.seed,
        wall_time_s,
        summary,
        samples,
        passed,
    })
}

pub fn verify(name: &str, seed: u64) -> Result<SuiteReport, Failure> {
    let suite: Suite = name.parse().map_err(|e| classify(e, "suite"))?;
    Ok(run_suite(suite, seed))
}

pub fn write_report(report: &Report, path: &std::path::Path) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_csv(est: &LelongEstimate, path: &std::path::Path) -> anyhow::Result<()> {
    if est.samples.is_empty() {
        bail!("the estimate has no samples (phi is -inf along the germ)");
    }
    std::fs::write(path, est.to_csv()).with_context(|| format!("cannot write {}", path.display()))
}
