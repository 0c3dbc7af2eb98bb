use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tailcr::commands::{self, InferenceOptions};
use tailcr::config::{apply_seed_override, load_config, render_config};
use tailcr::dataset::read_dataset;
use tailcr::{CliError, CliResult};
use tailcr_core::{paper_presets, preset, ThresholdChoice};

/// Cause-specific tail index and extreme quantile estimation for censored
/// competing-risks data.
#[derive(Parser)]
#[command(name = "tailcr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the tail index of one cause with a confidence interval.
    Fit(FitArgs),
    /// Weissman extreme quantile of one cause with a confidence interval.
    Quantile(QuantileArgs),
    /// Run a Monte Carlo scenario and write the report CSV.
    Simulate(SimulateArgs),
    /// List the built-in scenarios, or print one as JSON config.
    Presets { name: Option<String> },
}

#[derive(Args)]
struct Inference {
    /// Censoring tail index; estimated from the data when omitted.
    #[arg(long = "gamma-c")]
    gamma_c: Option<f64>,
    /// Limit share of the cause in the tail; estimated when omitted.
    #[arg(long)]
    c: Option<f64>,
    /// Bias scale of the limit law.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Second-order parameter of the cause (<= 0).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    rho: f64,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

impl Inference {
    fn options(&self) -> InferenceOptions {
        InferenceOptions {
            gamma_c: self.gamma_c,
            c: self.c,
            lambda: self.lambda,
            rho: self.rho,
            level: self.level,
        }
    }
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("thr").required(true).args(["kn", "threshold"]))]
struct FitArgs {
    dataset: PathBuf,
    #[arg(long, default_value_t = 1)]
    cause: u32,
    /// Use the (n - kn)-th order statistic as threshold.
    #[arg(long)]
    kn: Option<usize>,
    /// Use a fixed threshold value.
    #[arg(long)]
    threshold: Option<f64>,
    #[command(flatten)]
    inference: Inference,
}

#[derive(Args)]
struct QuantileArgs {
    dataset: PathBuf,
    #[arg(long, default_value_t = 1)]
    cause: u32,
    #[arg(long)]
    kn: usize,
    /// Exceedance probability of the target quantile.
    #[arg(long)]
    p: f64,
    #[command(flatten)]
    inference: Inference,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("scenario").required(true).args(["config", "preset"]))]
struct SimulateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Override the number of replications.
    #[arg(long)]
    reps: Option<usize>,
}

fn print<T: serde::Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(value).expect("report serializes")
        );
    } else {
        print!("{}", text());
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Fit(a) => {
            let sample = read_dataset(&a.dataset)?;
            let threshold = match (a.kn, a.threshold) {
                (Some(k), None) => ThresholdChoice::TopOrder(k),
                (None, Some(t)) => ThresholdChoice::Deterministic(t),
                _ => unreachable!("clap enforces exactly one"),
            };
            let r = commands::fit(&sample, a.cause, threshold, &a.inference.options())?;
            print(a.inference.json, &r, || r.to_text());
        }
        Command::Quantile(a) => {
            let sample = read_dataset(&a.dataset)?;
            let r = commands::quantile(&sample, a.cause, a.kn, a.p, &a.inference.options())?;
            print(a.inference.json, &r, || r.to_text());
        }
        Command::Simulate(a) => {
            let mut config = match (&a.config, &a.preset) {
                (Some(path), None) => load_config(path)?,
                (None, Some(name)) => preset(name)
                    .ok_or_else(|| CliError::Usage(format!("unknown preset {name:?}")))?,
                _ => unreachable!("clap enforces exactly one"),
            };
            if let Some(reps) = a.reps {
                config.n_rep = reps;
            }
            apply_seed_override(&mut config)?;
            commands::simulate(&config, a.workers, &a.out)?;
        }
        Command::Presets { name: None } => {
            for p in paper_presets() {
                println!("{}", p.name);
            }
        }
        Command::Presets { name: Some(name) } => {
            let p =
                preset(&name).ok_or_else(|| CliError::Usage(format!("unknown preset {name:?}")))?;
            print!("{}", render_config(&p));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
