//! `linespec` command-line frontend.
//!
//! Exit codes: 0 on success, 2 for configuration or input errors, 3 for
//! runtime and numerical errors.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use linespec::bench::bounds_table;
use linespec::map::EstimateResult;
use linespec::output::{load_samples, write_benchmark, write_bounds_csv};
use linespec::scenario_file::{load_scenario, THREE_TONE_SNR_SWEEP};
use linespec::{estimate, run_scenario, Error, Scenario, SolverConfig, VonMisesPrior};
use serde_json::json;

#[derive(Parser)]
#[command(name = "linespec", version, about = "MAP line-spectrum estimation with von Mises frequency priors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate frequencies and amplitudes from a sample file.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo scenario and write rmse.csv and report.json.
    Benchmark(BenchmarkArgs),
    /// Write CRB and ACRB curves for a scenario to bounds.csv.
    Bounds(BoundsArgs),
    /// Print the built-in three-tone scenario file.
    Template,
}

#[derive(Args)]
struct EstimateArgs {
    /// CSV file with one `re,im` sample per line; a header line is optional.
    #[arg(long)]
    input: PathBuf,
    /// Prior as `MU_OVER_PI:KAPPA`, once per frequency.
    #[arg(long = "prior", required = true, allow_hyphen_values = true, value_name = "MU_OVER_PI:KAPPA")]
    priors: Vec<String>,
    /// Grid points per one-dimensional search.
    #[arg(long, default_value_t = 500)]
    g: usize,
    /// Refinement levels.
    #[arg(long, default_value_t = 10)]
    levels: usize,
    /// Sweep cap per refinement level.
    #[arg(long, default_value_t = 50)]
    max_sweeps: usize,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Include the estimate after every sweep.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Three tones, m = 32, SNR from -10 to 20 dB.
    SnrSweep,
    /// Three tones, 0 dB, m from 8 to 128.
    SamplesSweep,
}

#[derive(Args)]
struct ScenarioArgs {
    /// TOML scenario file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in scenario.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Override the number of Monte Carlo trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Domain(_) | Error::Unsupported(_) => Self::config(e.to_string()),
            Error::Singular(_) | Error::Io(_) | Error::Json(_) => Self::runtime(e.to_string()),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn parse_prior(text: &str, index: usize) -> std::result::Result<VonMisesPrior, Failure> {
    let field = format!("prior[{}]", index + 1);
    let (mu, kappa) = text
        .split_once(':')
        .ok_or_else(|| Failure::config(format!("invalid `{field}`: expected MU_OVER_PI:KAPPA, got `{text}`")))?;
    let number = |s: &str, what: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Failure::config(format!("invalid `{field}.{what}`: `{s}` is not a finite number")))
    };
    let (mu, kappa) = (number(mu, "mu_over_pi")?, number(kappa, "kappa")?);
    VonMisesPrior::new(mu * PI, kappa).map_err(|e| Failure::config(format!("invalid `{field}`: {e}")))
}

fn estimate_json(result: &EstimateResult, m: usize, trace: bool) -> serde_json::Value {
    let amplitudes: Vec<_> = result
        .s_hat
        .iter()
        .map(|s| json!({ "re": s.re, "im": s.im, "magnitude": s.norm(), "phase_rad": s.arg() }))
        .collect();
    let mut out = json!({
        "m": m,
        "d": result.omegas.len(),
        "omegas_rad": result.omegas,
        "omegas_over_pi": result.omegas.iter().map(|w| w / PI).collect::<Vec<_>>(),
        "amplitudes": amplitudes,
        "sigma2_hat": result.sigma2_hat,
        "converged": result.converged,
        "sweeps_per_level": result.sweeps_per_level,
        "total_sweeps": result.total_sweeps(),
    });
    if trace {
        out["history_rad"] = json!(result.history);
    }
    out
}

fn print_estimate(result: &EstimateResult, m: usize, trace: bool) {
    println!("m = {m}, d = {}", result.omegas.len());
    println!(
        "{:>3}  {:>22}  {:>12}  {:>22}  {:>22}  {:>12}  {:>10}",
        "i", "omega_rad", "omega/pi", "re", "im", "magnitude", "phase_rad"
    );
    for (i, (w, s)) in result.omegas.iter().zip(&result.s_hat).enumerate() {
        println!(
            "{:>3}  {:>22.15e}  {:>12.8}  {:>22.15e}  {:>22.15e}  {:>12.6e}  {:>10.6}",
            i + 1,
            w,
            w / PI,
            s.re,
            s.im,
            s.norm(),
            s.arg()
        );
    }
    println!("sigma2_hat = {:e}", result.sigma2_hat);
    println!(
        "converged = {}, sweeps per level = {:?}, total sweeps = {}",
        result.converged,
        result.sweeps_per_level,
        result.total_sweeps()
    );
    if trace {
        for (k, omegas) in result.history.iter().enumerate() {
            let over_pi: Vec<String> = omegas.iter().map(|w| format!("{:.8}", w / PI)).collect();
            println!("sweep {k:>4}: omega/pi = [{}]", over_pi.join(", "));
        }
    }
}

fn cmd_estimate(args: &EstimateArgs) -> CliResult {
    let priors = args
        .priors
        .iter()
        .enumerate()
        .map(|(i, p)| parse_prior(p, i))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let config = SolverConfig {
        grid_points: args.g,
        levels: args.levels,
        max_sweeps_per_level: args.max_sweeps,
        ..SolverConfig::default()
    };
    config.validate()?;
    let y = load_samples(&args.input)?;
    let m = y.len();
    if m <= priors.len() {
        return Err(Failure::config(format!(
            "invalid `input`: {m} samples cannot resolve {} frequencies (need m > d)",
            priors.len()
        )));
    }
    let result = estimate(&y, &priors, &config).map_err(|e| match e {
        Error::Domain(msg) => Failure::runtime(msg),
        other => other.into(),
    })?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&estimate_json(&result, m, args.trace)).expect("serializable"));
    } else {
        print_estimate(&result, m, args.trace);
    }
    Ok(())
}

fn resolve_scenario(args: &ScenarioArgs) -> std::result::Result<Scenario, Failure> {
    let mut scenario = match (&args.scenario, args.preset) {
        (Some(path), _) => load_scenario(path)?,
        (None, Some(Preset::SnrSweep)) => Scenario::three_tone_snr_sweep(),
        (None, Some(Preset::SamplesSweep)) => Scenario::three_tone_samples_sweep(),
        (None, None) => return Err(Failure::config("either --scenario or --preset is required")),
    };
    if let Some(trials) = args.trials {
        scenario.trials = trials;
    }
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    scenario.validate()?;
    Ok(scenario)
}

fn prepare_out_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::runtime(format!("cannot create output directory {}: {e}", dir.display())))
}

fn cmd_benchmark(args: &BenchmarkArgs) -> CliResult {
    let scenario = resolve_scenario(&args.scenario)?;
    if args.threads == Some(0) {
        return Err(Failure::config("invalid `threads`: must be at least 1"));
    }
    prepare_out_dir(&args.out)?;
    let start = Instant::now();
    let outcome = run_scenario(&scenario, args.threads)?;
    write_benchmark(&args.out, &scenario, &outcome, args.threads)?;
    let failures: usize = outcome.report.rows.iter().map(|r| r.failures).sum();
    eprintln!(
        "{} sweep points x {} trials in {:.2?}, {failures} estimator failures; wrote {}",
        scenario.sweep_points().len(),
        scenario.trials,
        start.elapsed(),
        args.out.display()
    );
    Ok(())
}

fn cmd_bounds(args: &BoundsArgs) -> CliResult {
    let scenario = resolve_scenario(&args.scenario)?;
    prepare_out_dir(&args.out)?;
    let rows = bounds_table(&scenario)?;
    let mut warned = Vec::new();
    for row in &rows {
        if let Some(w) = &row.warning {
            if !warned.contains(&row.sweep_value.to_bits()) {
                warned.push(row.sweep_value.to_bits());
                eprintln!("warning: sweep value {}: {w}", row.sweep_value);
            }
        }
    }
    let mut csv = Vec::new();
    write_bounds_csv(&rows, scenario.sweep_var(), &mut csv)?;
    let path = args.out.join("bounds.csv");
    fs::write(&path, csv).map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Benchmark(args) => cmd_benchmark(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Template => {
            print!("{THREE_TONE_SNR_SWEEP}");
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
