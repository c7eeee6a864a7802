//! Reproduction harness: temporal convergence tables, structure counting and
//! the σ sweep.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::config::{steps_for, SimulationConfig};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::params::ModelParams;
use crate::projection::ProjectionOptions;
use crate::run::{build_stepper, initial_field};
use crate::stepper::{MassTarget, Scheme, Stepper};

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub l2_error: f64,
    /// `log2(error(2τ) / error(τ))`; absent for the first row.
    pub rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub scheme: Scheme,
    pub benchmark_scheme: Scheme,
    pub benchmark_tau: f64,
    pub t_final: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,l2_error,rate\n");
        for r in &self.rows {
            let rate = r.rate.map(|v| format!("{v:.16e}")).unwrap_or_default();
            writeln!(out, "{:.16e},{:.16e},{}", r.tau, r.l2_error, rate).unwrap();
        }
        out
    }

    /// Text table with one column per τ.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{} at T={} vs {} benchmark (tau={:e})",
            self.scheme, self.t_final, self.benchmark_scheme, self.benchmark_tau
        )
        .unwrap();
        let mut tau_line = format!("{:<10}", "tau");
        let mut err_line = format!("{:<10}", "L2 Error");
        let mut rate_line = format!("{:<10}", "Rate");
        for r in &self.rows {
            write!(tau_line, " {:>12.4e}", r.tau).unwrap();
            write!(err_line, " {:>12.4e}", r.l2_error).unwrap();
            match r.rate {
                Some(v) => write!(rate_line, " {v:>12.4}").unwrap(),
                None => write!(rate_line, " {:>12}", "-").unwrap(),
            }
        }
        writeln!(out, "{tau_line}\n{err_line}\n{rate_line}").unwrap();
        out
    }
}

/// Successive rates `log2(e_{k-1} / e_k)` for halved steps.
pub fn rates_from_errors(taus: &[f64], errors: &[f64]) -> Vec<ConvergenceRow> {
    taus.iter()
        .zip(errors)
        .enumerate()
        .map(|(k, (&tau, &err))| ConvergenceRow {
            tau,
            l2_error: err,
            rate: (k > 0).then(|| (errors[k - 1] / err).ln() / (taus[k - 1] / tau).ln()),
        })
        .collect()
}

/// Integrates `u0` to `t_final` with `scheme` at step `tau`.
pub fn solve_to(
    params: ModelParams,
    scheme: Scheme,
    mass_target: MassTarget,
    projection: ProjectionOptions,
    u0: &GridFunction,
    t_final: f64,
    tau: f64,
) -> Result<GridFunction> {
    let stepper = Stepper::new(params.with_tau(tau), scheme, mass_target, projection)?;
    stepper.integrate(u0.clone(), steps_for(t_final, tau))
}

/// Errors of `scheme` against a precomputed benchmark field.
pub fn convergence_against(
    config: &SimulationConfig,
    scheme: Scheme,
    u0: &GridFunction,
    benchmark: &GridFunction,
) -> Result<ConvergenceReport> {
    let errors = config
        .tau_list
        .iter()
        .map(|&tau| {
            let u = solve_to(
                config.params,
                scheme,
                config.mass_target,
                config.projection,
                u0,
                config.t_final,
                tau,
            )?;
            Ok(u.sub(benchmark)?.norm2())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        scheme,
        benchmark_scheme: config.benchmark_scheme,
        benchmark_tau: config.benchmark_tau,
        t_final: config.t_final,
        rows: rates_from_errors(&config.tau_list, &errors),
    })
}

pub fn benchmark_solution(config: &SimulationConfig, u0: &GridFunction) -> Result<GridFunction> {
    solve_to(
        config.params,
        config.benchmark_scheme,
        config.mass_target,
        config.projection,
        u0,
        config.t_final,
        config.benchmark_tau,
    )
}

/// Runs `scheme` at every `tau_list` entry from the configured initial data
/// and compares against the benchmark run at `benchmark_tau`.
pub fn convergence_study(config: &SimulationConfig, scheme: Scheme) -> Result<ConvergenceReport> {
    config.validate()?;
    let u0 = initial_field(config)?;
    let benchmark = benchmark_solution(config, &u0)?;
    convergence_against(config, scheme, &u0, &benchmark)
}

/// Number of 4-connected components of `{u > threshold}` with periodic wrap.
pub fn count_structures(u: &GridFunction, threshold: f64) -> usize {
    let m = u.m();
    let above: Vec<bool> = u.values().iter().map(|&v| v > threshold).collect();
    let mut seen = vec![false; m * m];
    let mut queue = VecDeque::new();
    let mut count = 0;
    for start in 0..m * m {
        if !above[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            let (i, j) = (p / m, p % m);
            let neighbours = [
                ((i + 1) % m) * m + j,
                ((i + m - 1) % m) * m + j,
                i * m + (j + 1) % m,
                i * m + (j + m - 1) % m,
            ];
            for q in neighbours {
                if above[q] && !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    count
}

/// Counts the connected structures of the minority phase: `{u < threshold}`
/// when the field mostly sits above the threshold, `{u > threshold}`
/// otherwise. With an off-critical mean the majority phase forms a single
/// connected matrix, so its own count carries no information about domain
/// size.
pub fn count_minority_structures(u: &GridFunction, threshold: f64) -> usize {
    if u.mean() > threshold {
        count_structures(&u.scaled(-1.0), -threshold)
    } else {
        count_structures(u, threshold)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureCount {
    pub sigma: f64,
    pub count: usize,
    pub threshold: f64,
    pub t_final: f64,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub counts: Vec<StructureCount>,
    /// Least-squares slope of `ln N` against `ln σ`; `None` with fewer than two
    /// usable points (any zero count is skipped).
    pub slope: Option<f64>,
    pub final_fields: Vec<GridFunction>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma,count,threshold,t_final\n");
        for c in &self.counts {
            writeln!(out, "{},{},{},{}", c.sigma, c.count, c.threshold, c.t_final).unwrap();
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("sigma        N_sigma\n");
        for c in &self.counts {
            writeln!(out, "{:<12} {}", c.sigma, c.count).unwrap();
        }
        match self.slope {
            Some(s) => writeln!(out, "log-log slope: {s:.4}").unwrap(),
            None => writeln!(out, "log-log slope: undefined").unwrap(),
        }
        out
    }
}

pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let points: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Thread count for independent runs: `NCH_THREADS` if set, else all cores.
pub fn thread_count() -> usize {
    std::env::var("NCH_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs the configured scheme to `T` for every σ in `sigma_list` from the
/// same initial data and counts minority-phase structures in each final field.
pub fn sigma_sweep(config: &SimulationConfig) -> Result<SweepReport> {
    config.validate()?;
    let u0 = initial_field(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    let finals = pool.install(|| {
        config
            .sigma_list
            .par_iter()
            .map(|&sigma| {
                let mut cfg = config.clone();
                cfg.params = cfg.params.with_sigma(sigma);
                let stepper = build_stepper(&cfg)?;
                stepper.integrate(u0.clone(), cfg.n_steps())
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let counts: Vec<StructureCount> = config
        .sigma_list
        .iter()
        .zip(&finals)
        .map(|(&sigma, u)| StructureCount {
            sigma,
            count: count_minority_structures(u, config.threshold),
            threshold: config.threshold,
            t_final: config.t_final,
        })
        .collect();
    let ys: Vec<f64> = counts.iter().map(|c| c.count as f64).collect();
    let slope = log_log_slope(&config.sigma_list, &ys);
    Ok(SweepReport {
        counts,
        slope,
        final_fields: finals,
    })
}
