//! Two-dimensional DFT on the periodic mesh.
//!
//! Convention: unnormalized forward transform
//! `v̂_{kl} = Σ_{i,j} v_{ij} exp(-2πi (ik + jl) / M)` and a `1/M²`-scaled
//! inverse. With it, mode `(0, 0)` equals `M² · mean(v)` and Parseval reads
//! `h² Σ |v|² = (L² / M⁴) Σ |v̂|²`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// DFT coefficients of a grid function, laid out like [`GridFunction`]
/// (`coeffs[k * M + l]`).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    m: usize,
    length: f64,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        self.coeffs[k * self.m + l]
    }

    /// Entrywise product with a real per-mode table.
    pub fn scale_by(&self, table: &[f64]) -> Result<SpectralField> {
        if table.len() != self.coeffs.len() {
            return Err(Error::shape(self.coeffs.len(), table.len()));
        }
        Ok(SpectralField {
            m: self.m,
            length: self.length,
            coeffs: self.coeffs.iter().zip(table).map(|(c, &t)| c * t).collect(),
        })
    }

    /// Largest deviation from conjugate symmetry `v̂_{-k,-l} = conj(v̂_{kl})`.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let m = self.m;
        let mut worst = 0.0_f64;
        for k in 0..m {
            for l in 0..m {
                let mk = (m - k) % m;
                let ml = (m - l) % m;
                let d = self.get(k, l) - self.get(mk, ml).conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }
}

/// Reusable FFT plans for one mesh size.
#[derive(Clone)]
pub struct Dft {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Dft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft").field("m", &self.m).finish()
    }
}

impl Dft {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn transform_2d(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let m = self.m;
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        // rows (contiguous in j)
        for row in data.chunks_exact_mut(m) {
            fft.process_with_scratch(row, &mut scratch);
        }
        // columns
        let mut column = vec![Complex64::default(); m];
        for j in 0..m {
            for i in 0..m {
                column[i] = data[i * m + j];
            }
            fft.process_with_scratch(&mut column, &mut scratch);
            for i in 0..m {
                data[i * m + j] = column[i];
            }
        }
    }

    pub fn forward(&self, v: &GridFunction) -> Result<SpectralField> {
        if v.m() != self.m {
            return Err(Error::shape(self.m, v.m()));
        }
        let mut coeffs: Vec<Complex64> = v.values().iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform_2d(&mut coeffs, &self.forward);
        Ok(SpectralField {
            m: self.m,
            length: v.length(),
            coeffs,
        })
    }

    /// Inverse transform, discarding the imaginary residue. Returns the field
    /// together with the largest discarded imaginary part.
    pub fn inverse_with_residue(&self, s: &SpectralField) -> Result<(GridFunction, f64)> {
        if s.m != self.m {
            return Err(Error::shape(self.m, s.m));
        }
        let mut data = s.coeffs.clone();
        self.transform_2d(&mut data, &self.inverse);
        let scale = 1.0 / (self.m * self.m) as f64;
        let mut residue = 0.0_f64;
        let values = data
            .iter()
            .map(|c| {
                residue = residue.max((c.im * scale).abs());
                c.re * scale
            })
            .collect();
        Ok((GridFunction::new(self.m, s.length, values)?, residue))
    }

    pub fn inverse(&self, s: &SpectralField) -> Result<GridFunction> {
        self.inverse_with_residue(s).map(|(v, _)| v)
    }
}
