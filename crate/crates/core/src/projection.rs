//! Discrete L² projection onto the admissible set
//! `{ v : ‖v‖_∞ ≤ 1 − δ, <v, 1> = target }`.
//!
//! The KKT system decouples once the scalar mass multiplier ξ is known: every
//! entry of `ũ + ξ` is clamped to `[-(1 − δ), 1 − δ]` and the pointwise
//! multiplier λ absorbs the clamped excess. ξ is the root of the
//! piecewise-linear, nondecreasing mass residual, found by a secant iteration
//! started at `ξ₀ = 0, ξ₁ = τ` and safeguarded by bisection on the saturation
//! bracket.

use crate::error::{Error, Result};
use crate::grid::GridFunction;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionOptions {
    /// Residual tolerance relative to the domain area `L²`.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Second secant seed `ξ₁`; the time step in the projected schemes.
    pub first_step: f64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            max_iter: 100,
            first_step: 0.1,
        }
    }
}

impl ProjectionOptions {
    pub fn with_first_step(mut self, first_step: f64) -> Self {
        self.first_step = first_step;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionResult {
    pub u: GridFunction,
    /// Pointwise multiplier, nonnegative and zero wherever the bound is inactive.
    pub lambda: GridFunction,
    pub xi: f64,
    pub iterations: usize,
    /// `|F(ξ)|` at exit.
    pub residual: f64,
}

impl ProjectionResult {
    /// Fraction of mesh points sitting on the bound with a positive multiplier.
    pub fn clamped_fraction(&self) -> f64 {
        let n = self.lambda.values().iter().filter(|&&l| l > 0.0).count();
        n as f64 / self.lambda.values().len() as f64
    }
}

/// Result of the scalar multiplier solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiSolution {
    pub xi: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// `g(x) = (1 − δ)² − x²`
pub fn constraint(x: f64, delta: f64) -> f64 {
    let b = 1.0 - delta;
    b * b - x * x
}

fn constraint_slope(x: f64) -> f64 {
    -2.0 * x
}

#[inline]
fn clamp_entry(s: f64, bound: f64) -> f64 {
    if s > bound {
        bound
    } else if s < -bound {
        -bound
    } else {
        s
    }
}

/// Closed-form solution of the pointwise KKT conditions for a given ξ.
/// Returns `(u, λ)`.
pub fn clamp_with_multiplier(utilde: &GridFunction, xi: f64, delta: f64) -> (GridFunction, GridFunction) {
    let bound = 1.0 - delta;
    let mut u = utilde.clone();
    let mut lambda = GridFunction::zeros(utilde.m(), utilde.length());
    for (k, (uv, lv)) in u.values_mut().iter_mut().zip(lambda.values_mut()).enumerate() {
        let s = utilde.values()[k] + xi;
        if s > bound {
            *uv = bound;
            *lv = (bound - s) / constraint_slope(bound);
        } else if s < -bound {
            *uv = -bound;
            *lv = (-bound - s) / constraint_slope(-bound);
        } else {
            *uv = s;
        }
    }
    (u, lambda)
}

/// `F(ξ) = <clamp(ũ + ξ), 1> − target`
pub fn mass_residual(utilde: &GridFunction, xi: f64, delta: f64, target_mass: f64) -> f64 {
    let bound = 1.0 - delta;
    let h = utilde.h();
    let sum: f64 = utilde.values().iter().map(|&v| clamp_entry(v + xi, bound)).sum();
    h * h * sum - target_mass
}

/// Finds ξ with `|F(ξ)| ≤ tol` (absolute).
pub fn solve_xi(
    utilde: &GridFunction,
    delta: f64,
    target_mass: f64,
    tol: f64,
    max_iter: usize,
    first_step: f64,
) -> Result<XiSolution> {
    let bound = 1.0 - delta;
    let area = utilde.length() * utilde.length();
    let max_mass = area * bound;
    if !(target_mass.is_finite() && target_mass.abs() < max_mass) {
        return Err(Error::Infeasible {
            target: target_mass,
            min: -max_mass,
            max: max_mass,
        });
    }
    let f = |xi: f64| mass_residual(utilde, xi, delta, target_mass);

    let mut x_prev = 0.0;
    let mut f_prev = f(x_prev);
    if f_prev.abs() <= tol {
        return Ok(XiSolution {
            xi: 0.0,
            iterations: 0,
            residual: f_prev.abs(),
        });
    }

    let (min, max) = utilde
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    // F < 0 when every entry clamps low, F > 0 when every entry clamps high.
    let mut lo = -bound - max;
    let mut hi = bound - min;
    let tighten = |x: f64, fx: f64, lo: &mut f64, hi: &mut f64| {
        if fx < 0.0 {
            *lo = lo.max(x);
        } else {
            *hi = hi.min(x);
        }
    };
    tighten(x_prev, f_prev, &mut lo, &mut hi);

    let mut x = if first_step > lo && first_step < hi {
        first_step
    } else {
        0.5 * (lo + hi)
    };
    let mut fx = f(x);
    let mut iterations = 1;
    let mut force_bisect = false;
    loop {
        if fx.abs() <= tol {
            let (xi, residual) = polish(utilde, bound, x, fx, &f);
            return Ok(XiSolution {
                xi,
                iterations,
                residual,
            });
        }
        if iterations >= max_iter {
            return Err(Error::Convergence {
                iterations,
                residual: fx.abs(),
            });
        }
        tighten(x, fx, &mut lo, &mut hi);

        let denom = fx - f_prev;
        let secant = if denom.abs() > 1e-300 {
            x - fx * (x - x_prev) / denom
        } else {
            f64::NAN
        };
        let next = if !force_bisect && secant.is_finite() && secant > lo && secant < hi {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let f_next = f(next);
        iterations += 1;
        // Slow progress means the secant is straddling kinks; bisect once.
        force_bisect = f_next.abs() > 0.5 * fx.abs();
        x_prev = x;
        f_prev = fx;
        x = next;
        fx = f_next;
    }
}

/// One Newton step on the current linear piece of `F`. Accepted only if it
/// lowers the residual, so an accepted root never gets worse; in practice it
/// brings `|F|` down to roundoff and stops the mass from drifting over long
/// runs.
fn polish(utilde: &GridFunction, bound: f64, x: f64, fx: f64, f: &impl Fn(f64) -> f64) -> (f64, f64) {
    let h = utilde.h();
    let free = utilde.values().iter().filter(|&&v| (v + x).abs() < bound).count();
    if free == 0 || fx == 0.0 {
        return (x, fx.abs());
    }
    let candidate = x - fx / (h * h * free as f64);
    let fc = f(candidate);
    if fc.abs() < fx.abs() {
        (candidate, fc.abs())
    } else {
        (x, fx.abs())
    }
}

/// Projects `ũ` onto the admissible set with mass `target_mass`.
pub fn project(
    utilde: &GridFunction,
    delta: f64,
    target_mass: f64,
    options: &ProjectionOptions,
) -> Result<ProjectionResult> {
    let area = utilde.length() * utilde.length();
    let sol = solve_xi(
        utilde,
        delta,
        target_mass,
        options.rel_tol * area,
        options.max_iter,
        options.first_step,
    )?;
    let (u, lambda) = clamp_with_multiplier(utilde, sol.xi, delta);
    Ok(ProjectionResult {
        u,
        lambda,
        xi: sol.xi,
        iterations: sol.iterations,
        residual: sol.residual,
    })
}

/// Largest entrywise residual of `u − ũ − λ g'(u) − ξ = 0`.
pub fn kkt_residual(utilde: &GridFunction, result: &ProjectionResult) -> f64 {
    utilde
        .values()
        .iter()
        .zip(result.u.values())
        .zip(result.lambda.values())
        .map(|((&ut, &u), &l)| (u - ut - l * constraint_slope(u) - result.xi).abs())
        .fold(0.0, f64::max)
}
