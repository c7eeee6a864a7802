//! `nch` — command-line driver.
//!
//! ```text
//! nch run      [config] [--key=value ...]
//! nch converge [config] [--key=value ...]
//! nch sweep    [config] [--key=value ...]
//! nch count    <snapshot> [--threshold=x] [--minority]
//! ```
//!
//! Overrides use the same keys as the config file and take precedence over
//! it. Exit status: 0 success, 2 configuration error, 3 solver error,
//! 4 blowup of an unprojected scheme.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nch_core::experiments::{convergence_study, count_minority_structures, count_structures, sigma_sweep};
use nch_core::run::{run, write_outputs, RunStatus};
use nch_core::snapshot;
use nch_core::{parse_config_with, Error, Preset, SimulationConfig};

#[derive(Parser)]
#[command(name = "nch", version, about = "Projected ETD solver for the nonlocal Cahn-Hilliard equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write diagnostics and snapshots.
    Run(ConfigArgs),
    /// Temporal convergence study of `scheme` against a fine benchmark.
    Converge(ConfigArgs),
    /// Structure counts of the final state for every σ in `sigma_list`.
    Sweep(ConfigArgs),
    /// Count connected structures in a snapshot file.
    Count {
        snapshot: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        threshold: f64,
        /// Count the minority phase instead of `{u > threshold}`.
        #[arg(long)]
        minority: bool,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// Optional config file followed by `--key=value` overrides.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "CONFIG | --KEY=VALUE")]
    args: Vec<String>,
}

enum Failure {
    Config(String),
    Solver(String),
    Blowup(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Blowup(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Solver(m) | Failure::Blowup(m) => m,
        }
    }
}

fn config_error(context: &str, e: impl std::fmt::Display) -> Failure {
    Failure::Config(format!("{context}: {e}"))
}

fn solver_error(context: &str, e: Error) -> Failure {
    match e {
        Error::ConfigParse { .. } | Error::Validation(_) => config_error(context, e),
        other => Failure::Solver(format!("{context}: {other}")),
    }
}

/// Builds the configuration from the preset, the optional file and overrides.
fn load_config(preset: Preset, args: &[String]) -> Result<SimulationConfig, Failure> {
    let mut text = String::new();
    let mut config_path: Option<&str> = None;
    let mut overrides = Vec::new();
    for arg in args {
        if let Some(kv) = arg.strip_prefix("--") {
            if !kv.contains('=') {
                return Err(Failure::Config(format!("override '{arg}' must have the form --key=value")));
            }
            overrides.push(kv);
        } else if config_path.replace(arg).is_some() {
            return Err(Failure::Config(format!("unexpected extra argument '{arg}'")));
        }
    }
    if let Some(path) = config_path {
        text = fs::read_to_string(path).map_err(|e| config_error(&format!("reading {path}"), e))?;
        if !text.ends_with('\n') {
            text.push('\n');
        }
    }
    for kv in overrides {
        text.push_str(kv);
        text.push('\n');
    }
    let source = config_path.unwrap_or("command line");
    parse_config_with(&text, SimulationConfig::preset(preset)).map_err(|e| config_error(source, e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Failure::Solver(format!("creating {}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::Solver(format!("writing {}: {e}", path.display())))
}

fn cmd_run(args: &[String]) -> Result<(), Failure> {
    let config = load_config(Preset::Run, args)?;
    nch_core::run::initial_field(&config).map_err(|e| config_error("initial data", e))?;
    let output = run(&config).map_err(|e| solver_error("run", e))?;
    write_outputs(&config, &output, &config.output_dir).map_err(|e| solver_error("writing outputs", e))?;
    let last = output.diagnostics.last().expect("diagnostics always contain u0");
    println!(
        "{}: {} steps to t={}, sup-norm {:.6}, mass drift {:.3e}; outputs in {}",
        config.scheme,
        last.step,
        last.t,
        last.sup_norm,
        last.mass_increment,
        config.output_dir.display()
    );
    match output.status {
        RunStatus::Completed => Ok(()),
        RunStatus::Blowup { step, t } => Err(Failure::Blowup(format!(
            "{} left (-1, 1) at step {step} (t={t}); diagnostics written",
            config.scheme
        ))),
    }
}

fn cmd_converge(args: &[String]) -> Result<(), Failure> {
    let config = load_config(Preset::Converge, args)?;
    nch_core::run::initial_field(&config).map_err(|e| config_error("initial data", e))?;
    let report = convergence_study(&config, config.scheme).map_err(|e| solver_error("convergence", e))?;
    let stem = format!("convergence_{}", config.scheme);
    write_file(&config.output_dir.join(format!("{stem}.csv")), &report.to_csv())?;
    write_file(&config.output_dir.join(format!("{stem}.txt")), &report.to_table())?;
    print!("{}", report.to_table());
    Ok(())
}

fn cmd_sweep(args: &[String]) -> Result<(), Failure> {
    let config = load_config(Preset::Sweep, args)?;
    nch_core::run::initial_field(&config).map_err(|e| config_error("initial data", e))?;
    let report = sigma_sweep(&config).map_err(|e| solver_error("sweep", e))?;
    let dir = &config.output_dir;
    write_file(&dir.join("sweep.csv"), &report.to_csv())?;
    write_file(&dir.join("sweep.txt"), &report.to_table())?;
    for (count, field) in report.counts.iter().zip(&report.final_fields) {
        let path = dir.join(format!("final_sigma{}.grid", count.sigma));
        snapshot::write_snapshot(&path, field, config.t_final).map_err(|e| solver_error("writing snapshot", e))?;
        if config.pgm {
            snapshot::write_pgm(path.with_extension("pgm"), field).map_err(|e| solver_error("writing image", e))?;
        }
    }
    print!("{}", report.to_table());
    Ok(())
}

fn cmd_count(path: &Path, threshold: f64, minority: bool) -> Result<(), Failure> {
    let snap = snapshot::read_snapshot(path).map_err(|e| config_error("reading snapshot", e))?;
    let n = if minority {
        count_minority_structures(&snap.field, threshold)
    } else {
        count_structures(&snap.field, threshold)
    };
    println!("{n}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(&a.args),
        Command::Converge(a) => cmd_converge(&a.args),
        Command::Sweep(a) => cmd_sweep(&a.args),
        Command::Count {
            snapshot,
            threshold,
            minority,
        } => cmd_count(snapshot, *threshold, *minority),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("nch: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
