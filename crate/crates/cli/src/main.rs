//! `pluri`: batch front end. Problem files in, JSON reports and CSV sample
//! curves out; standard output carries only a human summary.

mod problem;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Parser, Subcommand};

use problem::{ProblemSpec, Task};
use run::Failure;

#[derive(Parser, Debug)]
#[command(name = "pluri", version, about = "Lelong numbers, multiplicities and monodromy on hypersurface germs")]
struct Cli {
    /// Problem file (TOML, or JSON with a `.json` extension).
    #[arg(long, global = true)]
    problem: Option<PathBuf>,
    /// Task to run; overrides `task` in the problem file.
    #[arg(long, value_enum, global = true)]
    task: Option<Task>,
    /// Master seed; overrides `params.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker cap (0 = all cores); results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Report path; overrides `output.report`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// CSV path for the sample curve; overrides `output.csv`.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Directory for reports without an explicit path.
    #[arg(long, env = "PLURI_OUT_DIR", default_value = ".", global = true)]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a bundled verification suite and print its table.
    Verify {
        /// counterexample | theorem-a | parity | calculus | estimators | vanishing | branches
        suite: String,
    },
}

fn execute(cli: Cli) -> Result<bool, Failure> {
    let mut problem = match &cli.problem {
        Some(path) => ProblemSpec::load(path).map_err(Failure::Input)?,
        None => ProblemSpec::default(),
    };
    if let Some(Command::Verify { suite }) = &cli.command {
        problem.task = Some(Task::Verify);
        problem.suite = Some(suite.clone());
    }
    if let Some(t) = cli.task {
        problem.task = Some(t);
    }
    let task = problem
        .task
        .ok_or_else(|| Failure::Input(anyhow!("no task: pass --task or set `task` in the problem file")))?;
    let out = cli
        .out
        .clone()
        .or_else(|| problem.output.report.clone())
        .unwrap_or_else(|| cli.out_dir.join(format!("{}-report.json", task.name())));
    let csv = cli.csv.clone().or_else(|| problem.output.csv.clone());
    if csv.is_some() && !task.has_samples() {
        return Err(Failure::Input(anyhow!("task {} produces no sample curve for --csv", task.name())));
    }

    let report = pluri_core::par::with_threads(cli.threads, || run::run(problem, task, cli.seed))?;
    run::write_report(&report, &out).map_err(Failure::Compute)?;
    if let (Some(path), Some(est)) = (&csv, &report.samples) {
        run::write_csv(est, path).map_err(Failure::Compute)?;
    }
    println!("task {} (seed {})", task.name(), report.seed);
    println!("{}", report.summary.trim_end());
    println!("report: {}", out.display());
    if let Some(path) = csv {
        println!("samples: {}", path.display());
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("pluri: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
