//! Driver loop: initial data, stepping to `T`, diagnostics and snapshots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::projection::ProjectionOptions;
use crate::snapshot::{self, Snapshot};
use crate::stepper::{StepDiagnostics, StepState, StepStatus, Stepper};

pub const DIAGNOSTICS_HEADER: &str = "step,t,sup_norm,mass,mass_increment,energy,xi,lambda_sup,projection_iterations,clamped_fraction,status";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RunStatus {
    Completed,
    /// An unprojected scheme left `(-1, 1)` at this step.
    Blowup { step: usize, t: f64 },
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    /// Row 0 describes `u^0`; row `n` the state after step `n`.
    pub diagnostics: Vec<StepDiagnostics>,
    pub snapshots: Vec<Snapshot>,
    pub status: RunStatus,
    pub final_state: StepState,
}

pub fn build_stepper(config: &SimulationConfig) -> Result<Stepper> {
    let projection = ProjectionOptions {
        rel_tol: config.projection.rel_tol,
        max_iter: config.projection.max_iter,
        first_step: config.params.tau,
    };
    Stepper::new(config.params, config.scheme, config.mass_target, projection)
}

pub fn initial_field(config: &SimulationConfig) -> Result<GridFunction> {
    let u0 = config.initial.build(config.params.m, config.params.length)?;
    let (i, j, value) = u0.argmax_abs();
    if value.abs() >= 1.0 {
        return Err(Error::BoundViolation { i, j, value });
    }
    Ok(u0)
}

/// Step index closest to each requested snapshot time.
fn snapshot_steps(times: &[f64], tau: f64) -> Vec<usize> {
    let mut steps: Vec<usize> = times.iter().map(|&t| (t / tau).round() as usize).collect();
    steps.sort_unstable();
    steps.dedup();
    steps
}

pub fn run(config: &SimulationConfig) -> Result<RunOutput> {
    config.validate()?;
    let stepper = build_stepper(config)?;
    let u0 = initial_field(config)?;
    run_from(&stepper, u0, config.n_steps(), &config.snapshot_times)
}

pub fn run_from(stepper: &Stepper, u0: GridFunction, n_steps: usize, snapshot_times: &[f64]) -> Result<RunOutput> {
    let tau = stepper.params().tau;
    let wanted = snapshot_steps(snapshot_times, tau);
    let mut state = StepState::new(u0);
    let mut diagnostics = Vec::with_capacity(n_steps + 1);
    let mut snapshots = Vec::new();
    diagnostics.push(stepper.observe(&state)?);
    if wanted.first() == Some(&0) {
        snapshots.push(Snapshot { t: 0.0, field: state.u.clone() });
    }
    let mut status = RunStatus::Completed;
    for _ in 0..n_steps {
        let (next, diag) = stepper.step(&state)?;
        state = next;
        diagnostics.push(diag);
        if diag.status == StepStatus::Blowup {
            status = RunStatus::Blowup { step: diag.step, t: diag.t };
            break;
        }
        if wanted.binary_search(&state.step_index).is_ok() {
            snapshots.push(Snapshot { t: state.t, field: state.u.clone() });
        }
    }
    Ok(RunOutput {
        diagnostics,
        snapshots,
        status,
        final_state: state,
    })
}

pub fn format_diagnostics(rows: &[StepDiagnostics]) -> String {
    let mut out = String::with_capacity(rows.len() * 220);
    out.push_str(DIAGNOSTICS_HEADER);
    out.push('\n');
    for d in rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{}",
            d.step,
            d.t,
            d.sup_norm,
            d.mass,
            d.mass_increment,
            d.energy,
            d.xi,
            d.lambda_sup,
            d.projection_iterations,
            d.clamped_fraction,
            d.status
        )
        .unwrap();
    }
    out
}

pub fn snapshot_file_name(t: f64) -> String {
    format!("snapshot_t{t:012.4}.grid")
}

/// Writes `diagnostics.csv`, `config.txt` and one snapshot file per recorded
/// time (plus PGM images when enabled). Returns the written paths.
pub fn write_outputs(config: &SimulationConfig, output: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let diag_path = dir.join("diagnostics.csv");
    fs::write(&diag_path, format_diagnostics(&output.diagnostics))?;
    written.push(diag_path);
    let cfg_path = dir.join("config.txt");
    fs::write(&cfg_path, config.render())?;
    written.push(cfg_path);
    for snap in &output.snapshots {
        let path = dir.join(snapshot_file_name(snap.t));
        snapshot::write_snapshot(&path, &snap.field, snap.t)?;
        if config.pgm {
            let pgm = path.with_extension("pgm");
            snapshot::write_pgm(&pgm, &snap.field)?;
            written.push(pgm);
        }
        written.push(path);
    }
    Ok(written)
}
