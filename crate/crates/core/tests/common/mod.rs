//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls into the spectral machinery of `nch_core`; the oracles
//! are built from dense linear algebra, exact rational arithmetic, explicit
//! stencils and plain bisection.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use nch_core::{GridFunction, ModelParams};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_field(rng: &mut ChaCha8Rng, m: usize, length: f64, lo: f64, hi: f64) -> GridFunction {
    let values = (0..m * m).map(|_| rng.random_range(lo..hi)).collect();
    GridFunction::new(m, length, values).unwrap()
}

pub fn l2_sq(a: &[f64], b: &[f64], h: f64) -> f64 {
    h * h * a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
}

// ---------------------------------------------------------------------------
// Stencils and dense operators

/// Five-point periodic Laplacian written out by hand.
pub fn stencil_laplacian(values: &[f64], m: usize, h: f64) -> Vec<f64> {
    let idx = |i: usize, j: usize| (i % m) * m + (j % m);
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            out[idx(i, j)] = (values[idx(i + 1, j)] + values[idx(i + m - 1, j)] + values[idx(i, j + 1)]
                + values[idx(i, j + m - 1)]
                - 4.0 * values[idx(i, j)])
                / (h * h);
        }
    }
    out
}

pub fn dense_laplacian(m: usize, h: f64) -> DMatrix<f64> {
    let n = m * m;
    let mut a = DMatrix::zeros(n, n);
    let idx = |i: usize, j: usize| (i % m) * m + (j % m);
    let w = 1.0 / (h * h);
    for i in 0..m {
        for j in 0..m {
            let p = idx(i, j);
            a[(p, p)] -= 4.0 * w;
            for q in [idx(i + 1, j), idx(i + m - 1, j), idx(i, j + 1), idx(i, j + m - 1)] {
                a[(p, q)] += w;
            }
        }
    }
    a
}

/// `ε² Δ² − κ Δ + σ I` as a dense matrix.
pub fn dense_linear_operator(params: &ModelParams) -> DMatrix<f64> {
    let lap = dense_laplacian(params.m, params.h());
    let n = lap.nrows();
    let eps2 = params.epsilon * params.epsilon;
    &lap * &lap * eps2 - &lap * params.kappa + DMatrix::identity(n, n) * params.sigma
}

/// Explicit nonlinearity from the stencil, without any transform.
pub fn oracle_nonlinearity(u: &[f64], params: &ModelParams) -> Vec<f64> {
    let m = params.m;
    let mu: Vec<f64> = u
        .iter()
        .map(|&v| 0.5 * params.theta * ((1.0 + v).ln() - (1.0 - v).ln()) - (params.theta_c + params.kappa) * v)
        .collect();
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    stencil_laplacian(&mu, m, params.h())
        .into_iter()
        .map(|v| v + params.sigma * mean)
        .collect()
}

/// Matrix functions of a symmetric matrix via its eigendecomposition.
pub struct DenseFunctions {
    eigen: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl DenseFunctions {
    pub fn new(a: DMatrix<f64>) -> Self {
        Self { eigen: SymmetricEigen::new(a) }
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigen.eigenvalues
    }

    /// `f(A) v`
    pub fn apply(&self, f: impl Fn(f64) -> f64, v: &[f64]) -> Vec<f64> {
        let q = &self.eigen.eigenvectors;
        let coeffs = q.transpose() * DVector::from_column_slice(v);
        let scaled = DVector::from_iterator(
            coeffs.len(),
            coeffs.iter().zip(self.eigen.eigenvalues.iter()).map(|(c, &l)| c * f(l)),
        );
        (q * scaled).as_slice().to_vec()
    }
}

// ---------------------------------------------------------------------------
// Projection by bisection

pub fn clamp(x: f64, b: f64) -> f64 {
    x.max(-b).min(b)
}

pub fn bisection_xi(utilde: &[f64], h: f64, bound: f64, target: f64) -> f64 {
    let mass = |xi: f64| h * h * utilde.iter().map(|&v| clamp(v + xi, bound)).sum::<f64>() - target;
    let max = utilde.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = utilde.iter().cloned().fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (-bound - max, bound - min);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn bisection_projection(utilde: &[f64], h: f64, bound: f64, target: f64) -> Vec<f64> {
    let xi = bisection_xi(utilde, h, bound, target);
    utilde.iter().map(|&v| clamp(v + xi, bound)).collect()
}

/// Random admissible field with mean `target / area`: a random fluctuation,
/// shrunk around the prescribed mean until it fits inside the bound.
pub fn random_admissible(rng: &mut ChaCha8Rng, n: usize, bound: f64, mean: f64) -> Vec<f64> {
    let z: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let zm = z.iter().sum::<f64>() / n as f64;
    let spread = z.iter().map(|v| (v - zm).abs()).fold(0.0, f64::max);
    let room = bound - mean.abs();
    let s = if spread > 0.0 { (room / spread).min(1.0) * rng.random_range(0.0..1.0) } else { 0.0 };
    z.iter().map(|v| clamp(mean + s * (v - zm), bound)).collect()
}

// ---------------------------------------------------------------------------
// Exact rational φ-functions

fn rational(a: f64) -> BigRational {
    BigRational::from_float(a).unwrap()
}

/// `e^{a}` for a dyadic rational `a ≥ 0`, from the positive Taylor series
/// truncated once the terms are below `2^-200` of the partial sum.
fn exp_positive(a: &BigRational) -> BigRational {
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let cutoff = BigRational::new(BigInt::one(), BigInt::one() << 200usize);
    let mut k = 1u32;
    loop {
        term = term * a / BigRational::from_integer(BigInt::from(k));
        sum += &term;
        if k as f64 > 2.0 * a.to_f64().unwrap() + 10.0 && &term < &(&sum * &cutoff) {
            return sum;
        }
        k += 1;
    }
}

/// Exact-arithmetic values of `(φ₀, φ₁, φ₂, φ₁ − φ₂)` at `a > 0`, rounded to f64.
pub fn exact_phi(a: f64) -> [f64; 4] {
    let x = rational(a);
    let e = BigRational::one() / exp_positive(&x);
    let one = BigRational::one();
    let phi0 = e.clone();
    let phi1 = (&one - &e) / &x;
    let phi2 = (&e - &one + &x) / (&x * &x);
    let diff = &phi1 - &phi2;
    debug_assert!(!diff.is_negative() && !diff.is_zero());
    [phi0, phi1, phi2, diff].map(|r| r.to_f64().unwrap())
}
