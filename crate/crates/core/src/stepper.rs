//! Exponential time differencing predictors and the projected schemes.
//!
//! Every scheme integrates `du/dt + L_h u = F(u)` over one step by the
//! variation-of-constants formula with `F` frozen (ETD1) or linearly
//! interpolated between `u^n` and a midpoint stage (ETDRK2). The projected
//! variants follow each predictor with [`project`].

use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::operators::Operators;
use crate::params::ModelParams;
use crate::projection::{project, ProjectionOptions, ProjectionResult};
use crate::spectral::SpectralField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Etd1,
    Etdrk2,
    PEtd1,
    PEtdrk2,
}

impl Scheme {
    pub fn is_projected(self) -> bool {
        matches!(self, Scheme::PEtd1 | Scheme::PEtdrk2)
    }

    pub fn order(self) -> u32 {
        match self {
            Scheme::Etd1 | Scheme::PEtd1 => 1,
            Scheme::Etdrk2 | Scheme::PEtdrk2 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Etd1 => "etd1",
            Scheme::Etdrk2 => "etdrk2",
            Scheme::PEtd1 => "p-etd1",
            Scheme::PEtdrk2 => "p-etdrk2",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "etd1" => Ok(Scheme::Etd1),
            "etdrk2" => Ok(Scheme::Etdrk2),
            "p-etd1" | "petd1" => Ok(Scheme::PEtd1),
            "p-etdrk2" | "petdrk2" => Ok(Scheme::PEtdrk2),
            other => Err(format!("unknown scheme '{other}' (expected etd1, etdrk2, p-etd1, p-etdrk2)")),
        }
    }
}

/// Which mass the projection enforces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MassTarget {
    /// `<ũ^{n+1}, 1>`, the predictor's own mass.
    #[default]
    Predictor,
    /// `<u^0, 1>`, the exact initial mass.
    Initial,
}

impl fmt::Display for MassTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MassTarget::Predictor => "predictor",
            MassTarget::Initial => "initial",
        })
    }
}

impl FromStr for MassTarget {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "predictor" => Ok(MassTarget::Predictor),
            "initial" => Ok(MassTarget::Initial),
            other => Err(format!("unknown mass_target '{other}' (expected predictor or initial)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepState {
    pub u: GridFunction,
    pub t: f64,
    pub step_index: usize,
    pub initial_mass: f64,
}

impl StepState {
    pub fn new(u0: GridFunction) -> Self {
        let initial_mass = u0.mass();
        Self {
            u: u0,
            t: 0.0,
            step_index: 0,
            initial_mass,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepStatus {
    Ok,
    /// An unprojected scheme left `(-1, 1)`; the logarithms are undefined from here on.
    Blowup,
}

impl fmt::Display for StepStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepStatus::Ok => "ok",
            StepStatus::Blowup => "blowup",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub sup_norm: f64,
    pub mass: f64,
    pub mass_increment: f64,
    /// NaN on a blowup row.
    pub energy: f64,
    pub xi: f64,
    pub lambda_sup: f64,
    pub projection_iterations: usize,
    pub clamped_fraction: f64,
    pub status: StepStatus,
}

/// One-step integrator for a fixed parameter set and scheme.
#[derive(Clone, Debug)]
pub struct Stepper {
    ops: Operators,
    scheme: Scheme,
    mass_target: MassTarget,
    projection: ProjectionOptions,
}

/// Spectra of `u` and `F(u)`, shared between the stages of one step.
struct Stage {
    u_hat: SpectralField,
    f_hat: SpectralField,
}

impl Stepper {
    pub fn new(
        params: ModelParams,
        scheme: Scheme,
        mass_target: MassTarget,
        projection: ProjectionOptions,
    ) -> Result<Self> {
        Ok(Self {
            ops: Operators::new(params)?,
            scheme,
            mass_target,
            projection: projection.with_first_step(params.tau),
        })
    }

    pub fn with_defaults(params: ModelParams, scheme: Scheme) -> Result<Self> {
        Self::new(params, scheme, MassTarget::default(), ProjectionOptions::default())
    }

    pub fn params(&self) -> &ModelParams {
        self.ops.params()
    }

    pub fn operators(&self) -> &Operators {
        &self.ops
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn set_tau(&mut self, tau: f64) -> Result<()> {
        self.ops.set_tau(tau)?;
        self.projection.first_step = tau;
        Ok(())
    }

    fn stage(&self, u: &GridFunction) -> Result<Stage> {
        let f = self.ops.nonlinear_f(u)?;
        self.stage_with_forcing(u, &f)
    }

    fn stage_with_forcing(&self, u: &GridFunction, forcing: &GridFunction) -> Result<Stage> {
        let dft = self.ops.dft();
        Ok(Stage {
            u_hat: dft.forward(u)?,
            f_hat: dft.forward(forcing)?,
        })
    }

    /// `Σ_k column_k ⊙ coeff_k · spectrum_k`, transformed back.
    fn combine(&self, terms: &[(&SpectralField, &[f64], f64)]) -> Result<GridFunction> {
        let first = terms[0].0;
        let mut out = first.clone();
        for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (s, column, scale) in terms {
                acc += s.coeffs()[idx] * (column[idx] * scale);
            }
            *c = acc;
        }
        self.ops.dft().inverse(&out)
    }

    fn etd1_from_stage(&self, stage: &Stage) -> Result<GridFunction> {
        let phi = self.ops.phi();
        let tau = phi.tau;
        self.combine(&[(&stage.u_hat, &phi.phi0, 1.0), (&stage.f_hat, &phi.phi1, tau)])
    }

    /// `ũ = φ₀(τL_h) u + τ φ₁(τL_h) F(u)`
    pub fn etd1_predict(&self, u: &GridFunction) -> Result<GridFunction> {
        self.etd1_from_stage(&self.stage(u)?)
    }

    /// ETD1 predictor with a caller-supplied frozen forcing in place of `F(u)`.
    pub fn etd1_predict_with(&self, u: &GridFunction, forcing: &GridFunction) -> Result<GridFunction> {
        u.check_shape(forcing)?;
        self.etd1_from_stage(&self.stage_with_forcing(u, forcing)?)
    }

    fn etdrk2_from_stage(&self, stage: &Stage, u_mid: &GridFunction) -> Result<GridFunction> {
        let f_mid = self.ops.nonlinear_f(u_mid)?;
        let f_mid_hat = self.ops.dft().forward(&f_mid)?;
        let phi = self.ops.phi();
        let tau = phi.tau;
        self.combine(&[
            (&stage.u_hat, &phi.phi0, 1.0),
            (&stage.f_hat, &phi.phi1m2, tau),
            (&f_mid_hat, &phi.phi2, tau),
        ])
    }

    /// `ũ = φ₀(τL_h) u + τ [(φ₁ − φ₂)(τL_h) F(u) + φ₂(τL_h) F(u_mid)]`
    pub fn etdrk2_predict(&self, u: &GridFunction, u_mid: &GridFunction) -> Result<GridFunction> {
        u.check_shape(u_mid)?;
        self.etdrk2_from_stage(&self.stage(u)?, u_mid)
    }

    fn project_onto(&self, utilde: &GridFunction, state: &StepState) -> Result<ProjectionResult> {
        let target = match self.mass_target {
            MassTarget::Predictor => utilde.mass(),
            MassTarget::Initial => state.initial_mass,
        };
        project(utilde, self.params().delta, target, &self.projection)
    }

    fn advance(&self, state: &StepState, u: GridFunction) -> StepState {
        let step_index = state.step_index + 1;
        StepState {
            u,
            t: step_index as f64 * self.params().tau,
            step_index,
            initial_mass: state.initial_mass,
        }
    }

    fn diagnostics(&self, state: &StepState, projection: Option<&ProjectionResult>) -> Result<StepDiagnostics> {
        let sup_norm = state.u.norm_inf();
        let mass = state.u.mass();
        let blowup = sup_norm >= 1.0;
        let energy = if blowup { f64::NAN } else { self.ops.energy(&state.u)? };
        let (xi, lambda_sup, projection_iterations, clamped_fraction) = match projection {
            Some(p) => (p.xi, p.lambda.norm_inf(), p.iterations, p.clamped_fraction()),
            None => (0.0, 0.0, 0, 0.0),
        };
        Ok(StepDiagnostics {
            step: state.step_index,
            t: state.t,
            sup_norm,
            mass,
            mass_increment: mass - state.initial_mass,
            energy,
            xi,
            lambda_sup,
            projection_iterations,
            clamped_fraction,
            status: if blowup { StepStatus::Blowup } else { StepStatus::Ok },
        })
    }

    /// Diagnostics of a state that was not produced by a step (e.g. `u^0`).
    pub fn observe(&self, state: &StepState) -> Result<StepDiagnostics> {
        self.diagnostics(state, None)
    }

    pub fn p_etd1_step(&self, state: &StepState) -> Result<(StepState, StepDiagnostics)> {
        let utilde = self.etd1_predict(&state.u)?;
        let result = self.project_onto(&utilde, state)?;
        let next = self.advance(state, result.u.clone());
        let diag = self.diagnostics(&next, Some(&result))?;
        Ok((next, diag))
    }

    pub fn p_etdrk2_step(&self, state: &StepState) -> Result<(StepState, StepDiagnostics)> {
        let stage = self.stage(&state.u)?;
        let mid_tilde = self.etd1_from_stage(&stage)?;
        let mid = self.project_onto(&mid_tilde, state)?;
        let utilde = self.etdrk2_from_stage(&stage, &mid.u)?;
        let result = self.project_onto(&utilde, state)?;
        let next = self.advance(state, result.u.clone());
        let diag = self.diagnostics(&next, Some(&result))?;
        Ok((next, diag))
    }

    /// Classic ETD1; the new state may leave `(-1, 1)`, reported as blowup.
    pub fn etd1_step(&self, state: &StepState) -> Result<(StepState, StepDiagnostics)> {
        let utilde = self.etd1_predict(&state.u)?;
        let next = self.advance(state, utilde);
        let diag = self.diagnostics(&next, None)?;
        Ok((next, diag))
    }

    /// Classic ETDRK2. A midpoint stage outside `(-1, 1)` ends the step as
    /// blowup with the offending stage as the new state.
    pub fn etdrk2_step(&self, state: &StepState) -> Result<(StepState, StepDiagnostics)> {
        let stage = self.stage(&state.u)?;
        let mid = self.etd1_from_stage(&stage)?;
        let u_new = match self.etdrk2_from_stage(&stage, &mid) {
            Ok(u) => u,
            Err(Error::BoundViolation { .. }) => mid,
            Err(e) => return Err(e),
        };
        let next = self.advance(state, u_new);
        let diag = self.diagnostics(&next, None)?;
        Ok((next, diag))
    }

    pub fn step(&self, state: &StepState) -> Result<(StepState, StepDiagnostics)> {
        match self.scheme {
            Scheme::Etd1 => self.etd1_step(state),
            Scheme::Etdrk2 => self.etdrk2_step(state),
            Scheme::PEtd1 => self.p_etd1_step(state),
            Scheme::PEtdrk2 => self.p_etdrk2_step(state),
        }
    }

    /// Steps `n_steps` times without recording diagnostics. Stops with a
    /// bound-violation error if an unprojected scheme leaves `(-1, 1)`.
    pub fn integrate(&self, u0: GridFunction, n_steps: usize) -> Result<GridFunction> {
        let mut state = StepState::new(u0);
        for _ in 0..n_steps {
            let next_u = match self.scheme {
                Scheme::Etd1 => self.etd1_predict(&state.u)?,
                Scheme::Etdrk2 => {
                    let stage = self.stage(&state.u)?;
                    let mid = self.etd1_from_stage(&stage)?;
                    self.etdrk2_from_stage(&stage, &mid)?
                }
                Scheme::PEtd1 => {
                    let utilde = self.etd1_predict(&state.u)?;
                    self.project_onto(&utilde, &state)?.u
                }
                Scheme::PEtdrk2 => {
                    let stage = self.stage(&state.u)?;
                    let mid_tilde = self.etd1_from_stage(&stage)?;
                    let mid = self.project_onto(&mid_tilde, &state)?;
                    let utilde = self.etdrk2_from_stage(&stage, &mid.u)?;
                    self.project_onto(&utilde, &state)?.u
                }
            };
            state = self.advance(&state, next_u);
        }
        Ok(state.u)
    }
}
