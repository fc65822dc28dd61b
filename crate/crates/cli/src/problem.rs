//! Problem files: TOML, or JSON when the file name ends in `.json`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use pluri_core::lelong::{LelongConfig, RadiiSchedule, SphereConfig};
use pluri_core::pshfun::Transform;
use pluri_core::variety::ChartDescription;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Lelong,
    Mult,
    TransformSlope,
    Irreducible,
    Pmass,
    Props,
    Verify,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Lelong => "lelong",
            Task::Mult => "mult",
            Task::TransformSlope => "transform-slope",
            Task::Irreducible => "irreducible",
            Task::Pmass => "pmass",
            Task::Props => "props",
            Task::Verify => "verify",
        }
    }

    /// Tasks whose main estimate has a sample curve.
    pub fn has_samples(self) -> bool {
        matches!(self, Task::Lelong | Task::TransformSlope | Task::Pmass)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PshSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    /// Multiplier `a` of the calculus checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<Transform>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub r_max: Option<f64>,
    pub ratio: Option<f64>,
    pub count: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default)]
    pub schedule: ScheduleSpec,
    /// Lines for the generic-line estimators and the irreducibility sampler.
    pub num_lines: Option<usize>,
    pub nodes: Option<usize>,
    pub cross_check: Option<bool>,
    pub sphere: Option<SphereConfig>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub task: Option<Task>,
    pub variety: Option<ChartDescription>,
    /// Local branches of a reducible germ, each with its own chart.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<ChartDescription>,
    #[serde(default)]
    pub psh: PshSpec,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSpec,
    /// Suite name for `task = "verify"`.
    pub suite: Option<String>,
}

impl ProblemSpec {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON problem", path.display()))
        } else {
            toml::from_str(&text).with_context(|| format!("{}: invalid problem file", path.display()))
        }
    }
}

pub const IRREDUCIBILITY_LINES: usize = 50;

/// All numerical parameters after defaults and overrides.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Effective {
    pub seed: u64,
    pub schedule: RadiiSchedule,
    pub lelong: LelongConfig,
    pub irreducibility_lines: usize,
}

impl Effective {
    pub fn resolve(params: &Params, seed_override: Option<u64>) -> anyhow::Result<Self> {
        let seed = seed_override.or(params.seed).unwrap_or(0);
        let d = RadiiSchedule::default();
        let s = params.schedule;
        let schedule =
            RadiiSchedule::new(s.r_max.unwrap_or(d.r_max), s.ratio.unwrap_or(d.ratio), s.count.unwrap_or(d.count))
                .context("params.schedule")?;
        let base = LelongConfig::default();
        let lelong = LelongConfig {
            num_lines: params.num_lines.unwrap_or(base.num_lines),
            nodes: params.nodes.unwrap_or(base.nodes),
            seed,
            sphere: params.sphere.unwrap_or(base.sphere),
            cross_check: params.cross_check.unwrap_or(base.cross_check),
        };
        if lelong.num_lines < 3 {
            bail!("params.num_lines must be at least 3");
        }
        Ok(Self { seed, schedule, lelong, irreducibility_lines: params.num_lines.unwrap_or(IRREDUCIBILITY_LINES) })
    }
}
