//! Spectral representation of the stabilized linear operator
//! `L_h = ε² Δ_h² − κ Δ_h + σ I`, the φ-functions of exponential integrators,
//! the explicit nonlinearity `F` and the discrete free energy.
//!
//! The periodic five-point Laplacian is diagonalized by the DFT, so every
//! matrix function of `L_h` is applied as a per-mode multiplication.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{gradient, laplace_stencil, GridFunction};
use crate::params::ModelParams;
use crate::spectral::{Dft, SpectralField};

/// Below this argument φ₁ is evaluated by its Taylor series.
pub const PHI1_SERIES_THRESHOLD: f64 = 1e-2;
/// Below this argument φ₂ and φ₁ − φ₂ are evaluated by their Taylor series.
/// The closed forms lose about `2 eps / a` relative digits to cancellation.
pub const PHI2_SERIES_THRESHOLD: f64 = 1.0;

const SERIES_TERMS: usize = 30;

fn check_arg(a: f64) -> Result<()> {
    if a.is_finite() && a >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("phi-function argument must be finite and >= 0, got {a}")))
    }
}

/// Σ_{k≥0} weight(k) (−a)^k / (k + offset)!
fn series(a: f64, offset: usize, weight: impl Fn(usize) -> f64) -> f64 {
    let mut factorial_term = 1.0;
    for n in 2..=offset {
        factorial_term /= n as f64;
    }
    // factorial_term = (−a)^k / (k + offset)!
    let mut sum = 0.0;
    for k in 0..SERIES_TERMS {
        sum += weight(k) * factorial_term;
        factorial_term *= -a / (k + offset + 1) as f64;
    }
    sum
}

/// `φ₀(a) = e^{−a}`
pub fn phi0(a: f64) -> Result<f64> {
    check_arg(a)?;
    Ok((-a).exp())
}

/// `φ₁(a) = (1 − e^{−a}) / a`, with `φ₁(0) = 1`.
pub fn phi1(a: f64) -> Result<f64> {
    check_arg(a)?;
    if a < PHI1_SERIES_THRESHOLD {
        Ok(series(a, 1, |_| 1.0))
    } else {
        Ok(-(-a).exp_m1() / a)
    }
}

/// `φ₂(a) = (e^{−a} − 1 + a) / a²`, with `φ₂(0) = 1/2`.
pub fn phi2(a: f64) -> Result<f64> {
    check_arg(a)?;
    if a < PHI2_SERIES_THRESHOLD {
        Ok(series(a, 2, |_| 1.0))
    } else {
        Ok(((-a).exp_m1() + a) / (a * a))
    }
}

/// `φ₁(a) − φ₂(a) = (1 − (1 + a) e^{−a}) / a²`, evaluated without forming
/// the difference (both terms tend to `1/a` for large `a`).
pub fn phi1_minus_phi2(a: f64) -> Result<f64> {
    check_arg(a)?;
    if a < PHI2_SERIES_THRESHOLD {
        Ok(series(a, 2, |k| (k + 1) as f64))
    } else {
        Ok((-(-a).exp_m1() - a * (-a).exp()) / (a * a))
    }
}

/// Eigenvalues of the periodic five-point Laplacian, indexed like the DFT.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplaceSymbol {
    m: usize,
    d: Vec<f64>,
}

impl LaplaceSymbol {
    pub fn new(m: usize, length: f64) -> Self {
        let h = length / m as f64;
        let s: Vec<f64> = (0..m).map(|k| (PI * k as f64 / m as f64).sin().powi(2)).collect();
        let scale = -4.0 / (h * h);
        let mut d = Vec::with_capacity(m * m);
        for sk in &s {
            for sl in &s {
                d.push(scale * (sk + sl));
            }
        }
        Self { m, d }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.d
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.d[k * self.m + l]
    }
}

/// φ-functions of `τ L_h` tabulated per Fourier mode.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiTable {
    pub tau: f64,
    /// Eigenvalues ℓ of `L_h`.
    pub ell: Vec<f64>,
    pub phi0: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub phi1m2: Vec<f64>,
}

impl PhiTable {
    pub fn new(params: &ModelParams, symbol: &LaplaceSymbol) -> Result<Self> {
        let n = symbol.d.len();
        let mut table = PhiTable {
            tau: params.tau,
            ell: Vec::with_capacity(n),
            phi0: Vec::with_capacity(n),
            phi1: Vec::with_capacity(n),
            phi2: Vec::with_capacity(n),
            phi1m2: Vec::with_capacity(n),
        };
        let eps2 = params.epsilon * params.epsilon;
        for &d in &symbol.d {
            let ell = eps2 * d * d - params.kappa * d + params.sigma;
            let a = params.tau * ell;
            table.ell.push(ell);
            table.phi0.push(phi0(a)?);
            table.phi1.push(phi1(a)?);
            table.phi2.push(phi2(a)?);
            table.phi1m2.push(phi1_minus_phi2(a)?);
        }
        Ok(table)
    }
}

/// Bundles the spectral machinery for one parameter set.
#[derive(Clone, Debug)]
pub struct Operators {
    params: ModelParams,
    dft: Dft,
    symbol: LaplaceSymbol,
    phi: PhiTable,
}

impl Operators {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        let symbol = LaplaceSymbol::new(params.m, params.length);
        let phi = PhiTable::new(&params, &symbol)?;
        Ok(Self {
            params,
            dft: Dft::new(params.m),
            symbol,
            phi,
        })
    }

    /// Rebuilds the φ-table only when τ actually changes.
    pub fn set_tau(&mut self, tau: f64) -> Result<()> {
        if tau != self.params.tau {
            let params = self.params.with_tau(tau);
            params.validate()?;
            self.phi = PhiTable::new(&params, &self.symbol)?;
            self.params = params;
        }
        Ok(())
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dft(&self) -> &Dft {
        &self.dft
    }

    pub fn symbol(&self) -> &LaplaceSymbol {
        &self.symbol
    }

    pub fn phi(&self) -> &PhiTable {
        &self.phi
    }

    pub fn apply_phi(&self, v: &GridFunction, column: &[f64]) -> Result<GridFunction> {
        apply_phi(&self.dft, v, column)
    }

    pub fn nonlinear_f(&self, u: &GridFunction) -> Result<GridFunction> {
        nonlinear_f(u, &self.params)
    }

    pub fn energy(&self, u: &GridFunction) -> Result<f64> {
        energy_with(u, &self.params, &self.dft, &self.symbol)
    }

    /// `‖(−Δ_h)^{−1/2}(u − ū)‖²`
    pub fn nonlocal_norm_sq(&self, u: &GridFunction) -> Result<f64> {
        nonlocal_norm_sq(u, &self.dft, &self.symbol)
    }
}

/// `φ(τ L_h) v` for a tabulated φ: `IDFT(column ⊙ DFT(v))`.
pub fn apply_phi(dft: &Dft, v: &GridFunction, column: &[f64]) -> Result<GridFunction> {
    let s = dft.forward(v)?.scale_by(column)?;
    dft.inverse(&s)
}

pub(crate) fn check_bounds(u: &GridFunction) -> Result<()> {
    let (i, j, value) = u.argmax_abs();
    if value.abs() >= 1.0 {
        Err(Error::BoundViolation { i, j, value })
    } else {
        Ok(())
    }
}

/// `F(u) = Δ_h[(θ/2)(ln(1+u) − ln(1−u)) − (θ_c + κ) u] + σ ū`
pub fn nonlinear_f(u: &GridFunction, params: &ModelParams) -> Result<GridFunction> {
    check_bounds(u)?;
    let half_theta = 0.5 * params.theta;
    let linear = params.theta_c + params.kappa;
    let mu = u.map(|v| half_theta * (v.ln_1p() - (-v).ln_1p()) - linear * v);
    let mean_term = params.sigma * u.mean();
    Ok(laplace_stencil(&mu).map(|v| v + mean_term))
}

fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

pub fn nonlocal_norm_sq(u: &GridFunction, dft: &Dft, symbol: &LaplaceSymbol) -> Result<f64> {
    let s: SpectralField = dft.forward(u)?;
    if symbol.m() != s.m() {
        return Err(Error::shape(symbol.m(), s.m()));
    }
    let sum: f64 = s
        .coeffs()
        .iter()
        .zip(symbol.values())
        .skip(1)
        .map(|(c, &d)| c.norm_sqr() / (-d))
        .sum();
    let m4 = (u.m() as f64).powi(4);
    Ok(u.length() * u.length() / m4 * sum)
}

/// Discrete free energy
/// `h² Σ [(θ/2)((1+u)ln(1+u) + (1−u)ln(1−u)) − (θ_c/2)u²] + (ε²/2)‖∇_h u‖² + (σ/2)‖(−Δ_h)^{−1/2}(u − ū)‖²`.
pub fn energy(u: &GridFunction, params: &ModelParams) -> Result<f64> {
    let dft = Dft::new(u.m());
    let symbol = LaplaceSymbol::new(u.m(), u.length());
    energy_with(u, params, &dft, &symbol)
}

fn energy_with(u: &GridFunction, params: &ModelParams, dft: &Dft, symbol: &LaplaceSymbol) -> Result<f64> {
    let (i, j, value) = u.argmax_abs();
    if value.abs() > 1.0 {
        return Err(Error::BoundViolation { i, j, value });
    }
    let h = u.h();
    let local: f64 = u
        .values()
        .iter()
        .map(|&v| 0.5 * params.theta * (x_ln_x(1.0 + v) + x_ln_x(1.0 - v)) - 0.5 * params.theta_c * v * v)
        .sum();
    let grad = gradient(u).norm2().powi(2);
    let nonlocal = nonlocal_norm_sq(u, dft, symbol)?;
    Ok(h * h * local + 0.5 * params.epsilon * params.epsilon * grad + 0.5 * params.sigma * nonlocal)
}
