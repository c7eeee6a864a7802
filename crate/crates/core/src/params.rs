use crate::error::{Error, Result};

/// Physical and numerical constants of one simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Interface width ε.
    pub epsilon: f64,
    /// Absolute temperature θ.
    pub theta: f64,
    /// Critical temperature θ_c.
    pub theta_c: f64,
    /// Nonlocal interaction strength σ.
    pub sigma: f64,
    /// Stabilization constant κ.
    pub kappa: f64,
    /// Bound gap δ; solutions stay in `[-1 + δ, 1 - δ]`.
    pub delta: f64,
    /// Domain edge L.
    pub length: f64,
    /// Mesh points per direction M.
    pub m: usize,
    /// Time step τ.
    pub tau: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            epsilon: 0.02,
            theta: 0.8,
            theta_c: 1.6,
            sigma: 30.0,
            kappa: 2.0,
            delta: 0.05,
            length: 1.0,
            m: 128,
            tau: 0.1,
        }
    }
}

impl ModelParams {
    pub fn h(&self) -> f64 {
        self.length / self.m as f64
    }

    pub fn bound(&self) -> f64 {
        1.0 - self.delta
    }

    pub fn area(&self) -> f64 {
        self.length * self.length
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Validation(format!("{name} > 0 violated ({name} = {v})")))
            }
        };
        positive("epsilon", self.epsilon)?;
        positive("theta", self.theta)?;
        positive("theta_c", self.theta_c)?;
        positive("sigma", self.sigma)?;
        positive("L", self.length)?;
        positive("tau", self.tau)?;
        if self.theta >= self.theta_c {
            return Err(Error::Validation(format!(
                "θ<θ_c violated (theta = {}, theta_c = {})",
                self.theta, self.theta_c
            )));
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::Validation(format!("kappa >= 0 violated (kappa = {})", self.kappa)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Validation(format!("0 < delta < 1 violated (delta = {})", self.delta)));
        }
        if self.m == 0 {
            return Err(Error::Validation("M > 0 violated".into()));
        }
        Ok(())
    }
}
