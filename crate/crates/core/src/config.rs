//! Plain `key=value` run configuration.
//!
//! One key per line, `#` starts a comment, blank lines are ignored and a
//! repeated key overrides earlier occurrences (command-line overrides are
//! appended this way). Unknown keys are rejected.
//!
//! | key | meaning | default (`run` preset) |
//! |-----|---------|---------|
//! | `scheme` | `etd1`, `etdrk2`, `p-etd1`, `p-etdrk2` | `p-etdrk2` |
//! | `epsilon`, `theta`, `theta_c`, `sigma`, `kappa`, `delta` | model constants | 0.02, 0.8, 1.6, 30, 2, 0.05 |
//! | `L`, `M`, `tau`, `T` | domain edge, mesh count, step, final time | 1, 128, 0.1, 100 |
//! | `initial` | `sine`, `random` or `file` | `random` |
//! | `amplitude`, `offset`, `seed`, `initial_file` | initial data | 0.05, 0.2, 1, - |
//! | `snapshot_times` | comma-separated times in `[0, T]` | empty |
//! | `output_dir` | output directory | `out` |
//! | `mass_target` | `predictor` or `initial` | `predictor` |
//! | `tol`, `max_iter` | projection residual tolerance (times `L²`), iteration cap | 1e-13, 100 |
//! | `threshold` | structure-count level | 0 |
//! | `tau_list`, `benchmark_tau`, `benchmark_scheme` | convergence study | 1e-4·2^-k (k=0..4), 1e-6, `p-etdrk2` |
//! | `sigma_list` | σ sweep | 10,30,70 |
//! | `pgm` | also write PGM images of snapshots | false |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::initial::InitialCondition;
use crate::params::ModelParams;
use crate::projection::ProjectionOptions;
use crate::stepper::{MassTarget, Scheme};

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub scheme: Scheme,
    pub params: ModelParams,
    pub t_final: f64,
    pub initial: InitialCondition,
    pub snapshot_times: Vec<f64>,
    pub output_dir: PathBuf,
    pub mass_target: MassTarget,
    /// `first_step` always mirrors `params.tau`.
    pub projection: ProjectionOptions,
    pub threshold: f64,
    pub tau_list: Vec<f64>,
    pub benchmark_tau: f64,
    pub benchmark_scheme: Scheme,
    pub sigma_list: Vec<f64>,
    pub pgm: bool,
}

/// Starting points matching the three experiment families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Projected vs classic comparison: κ=2, τ=0.1, σ=30, `0.2 + 0.05 rand`.
    Run,
    /// Temporal convergence: κ=1, T=0.02, `0.1 sin sin`, τ = 1e-4·2^-k.
    Converge,
    /// σ sweep: κ=2, τ=0.1, M=256, T=500, `0.3 + 0.05 rand`.
    Sweep,
}

const KEYS: &[&str] = &[
    "scheme",
    "epsilon",
    "theta",
    "theta_c",
    "sigma",
    "kappa",
    "delta",
    "L",
    "M",
    "tau",
    "T",
    "initial",
    "amplitude",
    "offset",
    "seed",
    "initial_file",
    "snapshot_times",
    "output_dir",
    "mass_target",
    "tol",
    "max_iter",
    "threshold",
    "tau_list",
    "benchmark_tau",
    "benchmark_scheme",
    "sigma_list",
    "pgm",
];

impl Default for SimulationConfig {
    fn default() -> Self {
        Self::preset(Preset::Run)
    }
}

impl SimulationConfig {
    pub fn preset(preset: Preset) -> Self {
        let params = ModelParams::default();
        let base = SimulationConfig {
            scheme: Scheme::PEtdrk2,
            params,
            t_final: 100.0,
            initial: InitialCondition::Random {
                offset: 0.2,
                amplitude: 0.05,
                seed: 1,
            },
            snapshot_times: Vec::new(),
            output_dir: PathBuf::from("out"),
            mass_target: MassTarget::Predictor,
            projection: ProjectionOptions::default().with_first_step(params.tau),
            threshold: 0.0,
            tau_list: (0..5).map(|k| 1e-4 / f64::from(1u32 << k)).collect(),
            benchmark_tau: 1e-6,
            benchmark_scheme: Scheme::PEtdrk2,
            sigma_list: vec![10.0, 30.0, 70.0],
            pgm: false,
        };
        match preset {
            Preset::Run => base,
            Preset::Converge => {
                let params = ModelParams {
                    kappa: 1.0,
                    tau: 1e-4,
                    ..params
                };
                SimulationConfig {
                    params,
                    t_final: 0.02,
                    initial: InitialCondition::Sine { amplitude: 0.1 },
                    projection: base.projection.with_first_step(params.tau),
                    ..base
                }
            }
            Preset::Sweep => SimulationConfig {
                params: ModelParams { m: 256, ..params },
                t_final: 500.0,
                initial: InitialCondition::Random {
                    offset: 0.3,
                    amplitude: 0.05,
                    seed: 1,
                },
                ..base
            },
        }
    }

    /// Number of steps to reach `T`; `T` must be a multiple of `tau`.
    pub fn n_steps(&self) -> usize {
        steps_for(self.t_final, self.params.tau)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::Validation(format!("T > 0 violated (T = {})", self.t_final)));
        }
        check_multiple(self.t_final, self.params.tau, "tau")?;
        if let Some(t) = self
            .snapshot_times
            .iter()
            .find(|&&t| !(t >= 0.0 && t <= self.t_final))
        {
            return Err(Error::Validation(format!(
                "snapshot time {t} outside [0, T = {}]",
                self.t_final
            )));
        }
        if !(self.projection.rel_tol > 0.0) {
            return Err(Error::Validation("tol > 0 violated".into()));
        }
        if self.projection.max_iter == 0 {
            return Err(Error::Validation("max_iter >= 1 violated".into()));
        }
        if !self.threshold.is_finite() {
            return Err(Error::Validation("threshold must be finite".into()));
        }
        match &self.initial {
            InitialCondition::Sine { amplitude } if !(amplitude.abs() < 1.0) => {
                return Err(Error::Validation(format!("|amplitude| < 1 violated ({amplitude})")));
            }
            InitialCondition::Random { offset, amplitude, .. } if !(offset.abs() + amplitude.abs() < 1.0) => {
                return Err(Error::Validation(format!(
                    "|offset| + |amplitude| < 1 violated ({offset}, {amplitude})"
                )));
            }
            _ => {}
        }
        if self.tau_list.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::Validation("tau_list entries must be positive".into()));
        }
        if self.tau_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Validation("tau_list must be strictly decreasing".into()));
        }
        for &tau in &self.tau_list {
            check_multiple(self.t_final, tau, "tau_list entry")?;
        }
        if !(self.benchmark_tau > 0.0) {
            return Err(Error::Validation("benchmark_tau > 0 violated".into()));
        }
        if let Some(&min) = self.tau_list.last() {
            if self.benchmark_tau >= min {
                return Err(Error::Validation(format!(
                    "benchmark_tau {} must be below min(tau_list) = {min}",
                    self.benchmark_tau
                )));
            }
        }
        check_multiple(self.t_final, self.benchmark_tau, "benchmark_tau")?;
        if self.sigma_list.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Validation("sigma_list entries must be positive".into()));
        }
        if self.sigma_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation("sigma_list must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Serializes every key; `parse_config(&c.render())` reproduces `c`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let p = &self.params;
        writeln!(out, "scheme={}", self.scheme).unwrap();
        writeln!(out, "epsilon={}", p.epsilon).unwrap();
        writeln!(out, "theta={}", p.theta).unwrap();
        writeln!(out, "theta_c={}", p.theta_c).unwrap();
        writeln!(out, "sigma={}", p.sigma).unwrap();
        writeln!(out, "kappa={}", p.kappa).unwrap();
        writeln!(out, "delta={}", p.delta).unwrap();
        writeln!(out, "L={}", p.length).unwrap();
        writeln!(out, "M={}", p.m).unwrap();
        writeln!(out, "tau={}", p.tau).unwrap();
        writeln!(out, "T={}", self.t_final).unwrap();
        match &self.initial {
            InitialCondition::Sine { amplitude } => {
                writeln!(out, "initial=sine").unwrap();
                writeln!(out, "amplitude={amplitude}").unwrap();
            }
            InitialCondition::Random { offset, amplitude, seed } => {
                writeln!(out, "initial=random").unwrap();
                writeln!(out, "offset={offset}").unwrap();
                writeln!(out, "amplitude={amplitude}").unwrap();
                writeln!(out, "seed={seed}").unwrap();
            }
            InitialCondition::File(path) => {
                writeln!(out, "initial=file").unwrap();
                writeln!(out, "initial_file={}", path.display()).unwrap();
            }
        }
        writeln!(out, "snapshot_times={}", list(&self.snapshot_times)).unwrap();
        writeln!(out, "output_dir={}", self.output_dir.display()).unwrap();
        writeln!(out, "mass_target={}", self.mass_target).unwrap();
        writeln!(out, "tol={}", self.projection.rel_tol).unwrap();
        writeln!(out, "max_iter={}", self.projection.max_iter).unwrap();
        writeln!(out, "threshold={}", self.threshold).unwrap();
        writeln!(out, "tau_list={}", list(&self.tau_list)).unwrap();
        writeln!(out, "benchmark_tau={}", self.benchmark_tau).unwrap();
        writeln!(out, "benchmark_scheme={}", self.benchmark_scheme).unwrap();
        writeln!(out, "sigma_list={}", list(&self.sigma_list)).unwrap();
        writeln!(out, "pgm={}", self.pgm).unwrap();
        out
    }
}

pub(crate) fn steps_for(t_final: f64, tau: f64) -> usize {
    (t_final / tau).round() as usize
}

fn check_multiple(t_final: f64, tau: f64, what: &str) -> Result<()> {
    let n = steps_for(t_final, tau);
    if n == 0 || ((n as f64) * tau - t_final).abs() > 1e-9 * t_final {
        return Err(Error::Validation(format!(
            "T = {t_final} is not a positive multiple of {what} = {tau}"
        )));
    }
    Ok(())
}

/// Parses with the `run` preset as the base.
pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    parse_config_with(text, SimulationConfig::default())
}

/// Parses `text` on top of `base`; keys absent from `text` keep their base value.
pub fn parse_config_with(text: &str, base: SimulationConfig) -> Result<SimulationConfig> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
            line: line_no,
            message: format!("expected key=value, got '{line}'"),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::ConfigParse {
                line: line_no,
                message: format!("unknown key '{key}'"),
            });
        }
        entries.insert(key, (line_no, value.trim()));
    }

    let mut cfg = base;
    let get = |key: &str| entries.get(key).copied();

    fn parse_value<T: std::str::FromStr>(key: &str, entry: (usize, &str)) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        entry.1.parse::<T>().map_err(|e| Error::ConfigParse {
            line: entry.0,
            message: format!("{key}: cannot parse '{}': {e}", entry.1),
        })
    }
    fn parse_list(key: &str, entry: (usize, &str)) -> Result<Vec<f64>> {
        if entry.1.is_empty() {
            return Ok(Vec::new());
        }
        entry
            .1
            .split(',')
            .map(|s| parse_value::<f64>(key, (entry.0, s.trim())))
            .collect()
    }

    macro_rules! set {
        ($key:literal, $target:expr) => {
            if let Some(e) = get($key) {
                $target = parse_value($key, e)?;
            }
        };
    }

    set!("scheme", cfg.scheme);
    set!("epsilon", cfg.params.epsilon);
    set!("theta", cfg.params.theta);
    set!("theta_c", cfg.params.theta_c);
    set!("sigma", cfg.params.sigma);
    set!("kappa", cfg.params.kappa);
    set!("delta", cfg.params.delta);
    set!("L", cfg.params.length);
    set!("M", cfg.params.m);
    set!("tau", cfg.params.tau);
    set!("T", cfg.t_final);
    set!("mass_target", cfg.mass_target);
    set!("tol", cfg.projection.rel_tol);
    set!("max_iter", cfg.projection.max_iter);
    set!("threshold", cfg.threshold);
    set!("benchmark_tau", cfg.benchmark_tau);
    set!("benchmark_scheme", cfg.benchmark_scheme);
    set!("pgm", cfg.pgm);
    if let Some(e) = get("output_dir") {
        cfg.output_dir = PathBuf::from(e.1);
    }
    if let Some(e) = get("snapshot_times") {
        cfg.snapshot_times = parse_list("snapshot_times", e)?;
    }
    if let Some(e) = get("tau_list") {
        cfg.tau_list = parse_list("tau_list", e)?;
    }
    if let Some(e) = get("sigma_list") {
        cfg.sigma_list = parse_list("sigma_list", e)?;
    }
    cfg.projection.first_step = cfg.params.tau;

    let kind = match get("initial") {
        Some((line, v)) => match v {
            "sine" | "random" | "file" => v.to_string(),
            other => {
                return Err(Error::ConfigParse {
                    line,
                    message: format!("unknown initial '{other}' (expected sine, random or file)"),
                })
            }
        },
        None => cfg.initial.kind().to_string(),
    };
    let (base_offset, base_amplitude, base_seed) = match &cfg.initial {
        InitialCondition::Sine { amplitude } => (0.0, *amplitude, 1),
        InitialCondition::Random { offset, amplitude, seed } => (*offset, *amplitude, *seed),
        InitialCondition::File(_) => (0.0, 0.0, 1),
    };
    let amplitude = match get("amplitude") {
        Some(e) => parse_value("amplitude", e)?,
        None => base_amplitude,
    };
    cfg.initial = match kind.as_str() {
        "sine" => InitialCondition::Sine { amplitude },
        "random" => InitialCondition::Random {
            offset: match get("offset") {
                Some(e) => parse_value("offset", e)?,
                None => base_offset,
            },
            amplitude,
            seed: match get("seed") {
                Some(e) => parse_value("seed", e)?,
                None => base_seed,
            },
        },
        _ => match (get("initial_file"), &cfg.initial) {
            (Some(e), _) => InitialCondition::File(PathBuf::from(e.1)),
            (None, InitialCondition::File(p)) => InitialCondition::File(p.clone()),
            (None, _) => return Err(Error::Validation("initial=file requires initial_file".into())),
        },
    };

    cfg.validate()?;
    Ok(cfg)
}
