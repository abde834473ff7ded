//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use csa_core::analysis::{analyze_trace, compare_modes, AnalyzeOptions};
use csa_core::Mode;

use crate::config::Scenario;
use crate::error::{Result, SimError};
use crate::report;
use crate::runner;
use crate::trace_csv::{read_trace_file, write_trace_file};

#[derive(Debug, Parser)]
#[command(name = "csa-sim", version, about = "Channel-static antenna simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the measurement modes on a synthetic field and write one CSV per mode.
    Simulate(SimulateArgs),
    /// Generate a trace from the piecewise-static statistical model.
    Model(ModelArgs),
    /// Analyze one or more CSV traces.
    Analyze(AnalyzeArgs),
    /// Compare traces recorded on the same device grid.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file (TOML). Defaults are used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Field seed override.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Noise seed override.
    #[arg(long)]
    pub noise_seed: Option<u64>,
    /// Number of seeds to run; member i uses seed + i.
    #[arg(long)]
    pub ensemble: Option<u32>,
    /// Restrict to these modes (repeatable).
    #[arg(long = "mode")]
    pub modes: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Model seed override.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub ensemble: Option<u32>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(required = true)]
    pub traces: Vec<PathBuf>,
    /// Directory for report files. Only the summary is printed when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Segment by magnitude-change threshold instead of recorded interval ids.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(required = true)]
    pub traces: Vec<PathBuf>,
    /// Comparison CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => simulate(a, stdout),
        Command::Model(a) => model(a, stdout),
        Command::Analyze(a) => analyze(a, stdout),
        Command::Compare(a) => compare(a, stdout),
    }
}

fn load(config: Option<&Path>) -> Result<Scenario> {
    config.map_or_else(|| Ok(Scenario::default()), Scenario::load)
}

fn ensemble_size(arg: Option<u32>, scenario: &Scenario) -> Result<u32> {
    match arg.unwrap_or(scenario.ensemble) {
        0 => Err(SimError::Config("--ensemble must be at least 1".into())),
        n => Ok(n),
    }
}

fn print(stdout: &mut dyn Write, text: &str) -> Result<()> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| SimError::io("<stdout>", e))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| SimError::io(path, e))
}

fn simulate(a: SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut s = load(a.config.as_deref())?;
    if let Some(seed) = a.seed {
        s.field.seed = seed;
    }
    if let Some(seed) = a.noise_seed {
        s.noise_seed = seed;
    }
    if !a.modes.is_empty() {
        let mut modes = Vec::new();
        for m in &a.modes {
            let mode: Mode = m
                .parse()
                .map_err(|e: csa_core::Error| SimError::Config(format!("--mode: {e}")))?;
            if mode == Mode::Model {
                return Err(SimError::Config(
                    "--mode: use the `model` command for model traces".into(),
                ));
            }
            if !modes.contains(&mode) {
                modes.push(mode);
            }
        }
        s.modes = modes;
    }
    let count = ensemble_size(a.ensemble, &s)?;
    let runs = runner::simulate_ensemble(&s, count)?;

    create_dir(&a.out)?;
    for run in &runs {
        let seed = (count > 1).then_some(run.field_seed);
        for t in &run.traces {
            let path = a.out.join(runner::trace_file_name(&s.name, t.mode, seed));
            write_trace_file(t, &path)?;
            print(stdout, &format!("wrote {}\n", path.display()))?;
        }
    }
    Ok(())
}

fn model(a: ModelArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut s = load(a.config.as_deref())?;
    if let Some(seed) = a.seed {
        s.model.seed = seed;
    }
    let count = ensemble_size(a.ensemble, &s)?;
    let traces = runner::model_ensemble(&s, count)?;

    create_dir(&a.out)?;
    for t in &traces {
        let seed = (count > 1).then(|| t.meta.noise_seed.unwrap_or_default());
        let path = a
            .out
            .join(runner::trace_file_name(&s.name, Mode::Model, seed));
        write_trace_file(t, &path)?;
        print(stdout, &format!("wrote {}\n", path.display()))?;
    }
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".into())
}

fn analyze(a: AnalyzeArgs, stdout: &mut dyn Write) -> Result<()> {
    if let Some(eps) = a.epsilon {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(SimError::Config("--epsilon must be positive".into()));
        }
    }
    if let Some(dir) = &a.out {
        create_dir(dir)?;
    }
    let options = AnalyzeOptions { epsilon: a.epsilon };
    let mut depths = Vec::with_capacity(a.traces.len());
    for path in &a.traces {
        let trace = read_trace_file(path)?;
        let r = analyze_trace(&trace, options)?;
        let source = path.display().to_string();
        print(stdout, &format!("{}\n", report::summary_line(&source, &r)))?;
        if let Some(dir) = &a.out {
            let name = stem(path);
            write_text(
                &dir.join(format!("{name}.report.txt")),
                &report::report_text(&source, &r),
            )?;
            write_text(
                &dir.join(format!("{name}.intervals.csv")),
                &report::intervals_csv(&r),
            )?;
        }
        depths.push(r.fade_depth.db);
    }

    if depths.len() > 1 {
        let summary = report::fade_summary(&depths).expect("non-empty");
        let text = report::fade_summary_text(&summary);
        print(stdout, &text)?;
        if let Some(dir) = &a.out {
            write_text(&dir.join("ensemble.report.txt"), &text)?;
        }
    }
    Ok(())
}

fn compare(a: CompareArgs, stdout: &mut dyn Write) -> Result<()> {
    let traces = a
        .traces
        .iter()
        .map(|p| read_trace_file(p))
        .collect::<Result<Vec<_>>>()?;
    let rows = compare_modes(&traces).map_err(|e| match e {
        csa_core::Error::InvalidInput(msg) => SimError::schema(
            a.traces
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(", "),
            msg,
        ),
        other => other.into(),
    })?;
    let csv = report::comparison_csv(&rows);
    match &a.out {
        Some(path) => write_text(path, &csv),
        None => print(stdout, &csv),
    }
}
