//! Front end for model files: argument parsing, dispatch and exit codes.

pub mod commands;
pub mod model;
pub mod report;

use clap::{Parser, Subcommand};
use commands::{Context, Failure};
use involute_core::expr::{default_probe_config, set_default_probe_config};
use model::Model;
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "involute", version, about = "Distributions, symmetries and flows of model files")]
pub struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Lie series truncation order.
    #[arg(long, global = true, default_value_t = 12)]
    pub max_order: usize,
    /// Random evaluations used by the zero test.
    #[arg(long, global = true, default_value_t = 8)]
    pub probes: usize,
    /// Threshold for numeric verdicts.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rank, annihilator and involutivity of the model's distribution.
    Check {
        model: PathBuf,
        /// Exit with status 2 unless the distribution is involutive.
        #[arg(long)]
        require_involutive: bool,
    },
    /// Classify candidates (all declared candidates when none are named).
    Symmetry { model: PathBuf, candidates: Vec<String> },
    /// List the determining system of an ansatz.
    Determining {
        model: PathBuf,
        /// Named `[ansatz NAME]` section; default is fully general.
        #[arg(long)]
        ansatz: Option<String>,
        /// Substitute a candidate and report every residual.
        #[arg(long)]
        verify: Option<String>,
    },
    /// Lie series of a field's flow.
    Flow {
        model: PathBuf,
        field: String,
        #[arg(long)]
        order: Option<usize>,
        /// Evaluate the series at this parameter value.
        #[arg(long)]
        at: Option<String>,
    },
    /// Move a fixture solution along a vertical flow and measure residuals.
    Transport {
        model: PathBuf,
        fixture: String,
        field: String,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.025])]
        s: Vec<f64>,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn load(path: &std::path::Path) -> Result<Model, Output> {
    Model::load(path).map_err(|e| Output { stdout: String::new(), stderr: format!("error: {e}\n"), code: 1 })
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { stdout: text, stderr: String::new(), code }
            } else {
                Output { stdout: String::new(), stderr: text, code }
            };
        }
    };
    if cli.probes == 0 {
        return Output { stdout: String::new(), stderr: "error: --probes must be positive\n".into(), code: 1 };
    }
    let mut cfg = default_probe_config();
    cfg.probes = cli.probes;
    set_default_probe_config(cfg);
    match execute(&cli) {
        Ok(out) => out,
        Err(out) => out,
    }
}

fn execute(cli: &Cli) -> Result<Output, Output> {
    let (path, name) = match &cli.command {
        Command::Check { model, .. } => (model, "check"),
        Command::Symmetry { model, .. } => (model, "symmetry"),
        Command::Determining { model, .. } => (model, "determining"),
        Command::Flow { model, .. } => (model, "flow"),
        Command::Transport { model, .. } => (model, "transport"),
    };
    let model = load(path)?;
    let cx = Context::new(&model, name, cli.max_order, cli.tolerance);
    let outcome = match &cli.command {
        Command::Check { require_involutive, .. } => commands::check(cx, *require_involutive),
        Command::Symmetry { candidates, .. } => commands::symmetry(cx, candidates),
        Command::Determining { ansatz, verify, .. } => commands::determining(cx, ansatz.as_deref(), verify.as_deref()),
        Command::Flow { field, order, at, .. } => commands::flow(cx, field, *order, at.as_deref()),
        Command::Transport { fixture, field, s, .. } => commands::transport(cx, fixture, field, s),
    };
    let render = |r: &report::Report| if cli.json { r.to_json() } else { r.to_text() };
    Ok(match outcome {
        Ok(r) => Output { stdout: render(&r), stderr: String::new(), code: 0 },
        Err(Failure::Check(r)) => Output { stdout: render(&r), stderr: String::new(), code: 2 },
        Err(Failure::Input(msg)) => Output { stdout: String::new(), stderr: format!("error: {msg}\n"), code: 1 },
    })
}
