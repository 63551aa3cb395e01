//! `quietpump`: identify a thermal model, run one closed-loop simulation or
//! a full η sweep, all driven by one TOML config.
//!
//! Exit codes: 0 success, 2 bad config or arguments, 3 identification,
//! solver or run failure, 4 file I/O.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use log::info;

use quietpump_core::config::RunConfig;
use quietpump_core::harness::{
    compute_metrics, full_sweep, identify_plant, run_closed_loop, summarize, write_outputs,
    Environment, HarnessError, MetricsRow, SweepRun,
};
use quietpump_core::lin_model::ArxModel;
use quietpump_core::mpc::{CostOption, MpcConfig};

#[derive(Parser)]
#[command(name = "quietpump", version, about = "Noise-aware MPC for a heat pump")]
struct Cli {
    /// Log progress to stderr (RUST_LOG overrides).
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run config; built-in defaults when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    /// Overrides the master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Excite the plant, fit the ARX model and write `model.toml` plus
    /// `fit_report.txt`.
    Identify {
        #[command(flatten)]
        common: Common,
    },
    /// One closed-loop run; writes `<option>/trace_<eta>.csv` and
    /// `metrics.csv`.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Noise weight; defaults to `controller.eta`.
        #[arg(long)]
        eta: Option<f64>,
        /// ratio, exceedance or baseline; defaults to `controller.cost_option`.
        #[arg(long)]
        option: Option<CostOption>,
        /// Simulated days; defaults to `sweep.days`.
        #[arg(long)]
        days: Option<usize>,
        /// Identified model file; overrides `io.model`.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Both noise options over the η grid plus the baseline; writes traces,
    /// `metrics.csv` and `summary.md`.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Simulated days; overrides `sweep.days`.
        #[arg(long)]
        days: Option<usize>,
        /// Identified model file; overrides `io.model`.
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

/// Error tagged with the process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn config(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: error.into() }
    }

    fn run(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 3, error: error.into() }
    }

    fn io(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 4, error: error.into() }
    }

    fn harness(e: HarnessError) -> Self {
        match e {
            HarnessError::Io { .. } => Failure::io(e),
            HarnessError::Setup(_) | HarnessError::Series(_) => Failure::config(e),
            _ => Failure::run(e),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::Identify { common } => identify(&common),
        Command::Simulate {
            common,
            eta,
            option,
            days,
            model,
        } => simulate(&common, eta, option, days, model),
        Command::Sweep {
            common,
            days,
            model,
        } => sweep(&common, days, model),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

/// Loads the config, applies flag overrides, then validates the result.
fn load_config(
    common: &Common,
    edit: impl FnOnce(&mut RunConfig),
) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path).map_err(Failure::config)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    edit(&mut cfg);
    cfg.validate().map_err(Failure::config)?;
    Ok(cfg)
}

fn create_dir(dir: &Path) -> Outcome {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create {}", dir.display()))
        .map_err(Failure::io)
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::io)
}

fn identify(common: &Common) -> Outcome {
    let cfg = load_config(common, |_| {})?;
    let env = Environment::build(&cfg, 0).map_err(Failure::harness)?;
    let fit = identify_plant(&cfg, &env).map_err(Failure::harness)?;
    create_dir(&common.out)?;
    write_file(&common.out.join("model.toml"), &fit.model.to_toml())?;
    let report = fit.to_text();
    write_file(&common.out.join("fit_report.txt"), &report)?;
    print!("{report}");
    Ok(())
}

/// The configured model file, or an in-process identification when none
/// is set.
fn obtain_model(cfg: &RunConfig, env: &Environment) -> Result<ArxModel, Failure> {
    match &cfg.io.model {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("missing model file {}", path.display()))
                .map_err(Failure::io)?;
            ArxModel::from_toml(&text)
                .with_context(|| format!("bad model file {}", path.display()))
                .map_err(Failure::config)
        }
        None => {
            info!("no model file configured; identifying in-process");
            Ok(identify_plant(cfg, env).map_err(Failure::harness)?.model)
        }
    }
}

fn simulate(
    common: &Common,
    eta: Option<f64>,
    option: Option<CostOption>,
    days: Option<usize>,
    model: Option<PathBuf>,
) -> Outcome {
    let cfg = load_config(common, |c| {
        if let Some(e) = eta {
            c.controller.eta = e;
        }
        if let Some(o) = option {
            c.controller.cost_option = o;
        }
        if let Some(d) = days {
            c.sweep.days = d;
        }
        if model.is_some() {
            c.io.model = model;
        }
    })?;
    let days = cfg.sweep.days;
    let env = Environment::build(&cfg, days).map_err(Failure::harness)?;
    let model = obtain_model(&cfg, &env)?;
    let mpc: MpcConfig = cfg.controller.clone();
    let (option, eta) = (mpc.cost_option, mpc.eta);
    let run = match run_closed_loop(&cfg, &env, &model, &mpc, cfg.plant.kind, days) {
        Ok(trace) => {
            let row = compute_metrics(&trace, option, eta, &cfg.noise.curve())
                .map_err(Failure::harness)?;
            SweepRun { row, trace }
        }
        Err(HarnessError::Controller {
            step,
            source,
            partial,
        }) => {
            let row = MetricsRow::failed(eta, option, source.to_string());
            let run = SweepRun {
                row,
                trace: *partial,
            };
            write_outputs(&common.out, &[run], None, cfg.io.record_timing)
                .map_err(Failure::harness)?;
            return Err(Failure::run(anyhow!(
                "controller failed at step {step}: {source}; partial trace written"
            )));
        }
        Err(e) => return Err(Failure::harness(e)),
    };
    write_outputs(&common.out, std::slice::from_ref(&run), None, cfg.io.record_timing)
        .map_err(Failure::harness)?;
    let r = &run.row;
    println!(
        "{} eta={}: {} steps, energy cost {:.3}, J_n {:.3}, L_den {:.2} dB, L_quiet {:.2} dB, domination {:.2} h/day",
        option.as_str(),
        eta,
        run.trace.len(),
        r.energy_cost,
        r.jn,
        r.l_den,
        r.l_quiet,
        r.domination_h
    );
    Ok(())
}

fn sweep(common: &Common, days: Option<usize>, model: Option<PathBuf>) -> Outcome {
    let cfg = load_config(common, |c| {
        if let Some(d) = days {
            c.sweep.days = d;
        }
        if model.is_some() {
            c.io.model = model;
        }
    })?;
    let env = Environment::build(&cfg, cfg.sweep.days).map_err(Failure::harness)?;
    let model = obtain_model(&cfg, &env)?;
    let runs = full_sweep(&cfg, &env, &model);
    let rows: Vec<MetricsRow> = runs.iter().map(|r| r.row.clone()).collect();
    let failed: Vec<&MetricsRow> = rows.iter().filter(|r| r.failed.is_some()).collect();
    let baseline = rows.iter().find(|r| r.option == CostOption::Baseline);
    let summary = if failed.is_empty() {
        Some(summarize(&rows, baseline).map_err(Failure::harness)?)
    } else {
        None
    };
    write_outputs(&common.out, &runs, summary.as_ref(), cfg.io.record_timing)
        .map_err(Failure::harness)?;
    if let Some(s) = &summary {
        print!("{}", s.to_markdown());
    }
    if !failed.is_empty() {
        for r in &failed {
            eprintln!(
                "run {} eta={} failed: {}",
                r.option.as_str(),
                r.eta,
                r.failed.as_deref().unwrap_or("")
            );
        }
        return Err(Failure::run(anyhow!("{} of {} runs failed", failed.len(), rows.len())));
    }
    Ok(())
}
