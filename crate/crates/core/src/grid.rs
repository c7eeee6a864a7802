//! Uniform periodic mesh on the square `(0, L)²` and grid-function arithmetic.
//!
//! Values are stored densely in row-major order, `values[i * M + j]` holding
//! the value at mesh point `(x_i, y_j)`. Indices run `0..M` internally; the
//! mesh point coordinates are `x_i = (i + 1) h`, so index 0 corresponds to the
//! first interior point `h` and index `M - 1` to the point `L` (identified with
//! 0 by periodicity). Neighbour access wraps arithmetically; there are no ghost
//! cells.

use crate::error::{Error, Result};

/// A real periodic field on an `M x M` mesh of spacing `h = L / M`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    m: usize,
    length: f64,
    values: Vec<f64>,
}

/// A pair of grid functions, the x- and y-components of a discrete vector field.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorGridFunction {
    pub x: GridFunction,
    pub y: GridFunction,
}

impl GridFunction {
    pub fn new(m: usize, length: f64, values: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("mesh count M must be positive".into()));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Domain(format!("domain length must be positive, got {length}")));
        }
        if values.len() != m * m {
            return Err(Error::shape(m * m, values.len()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite value {} at ({}, {})",
                values[pos],
                pos / m,
                pos % m
            )));
        }
        Ok(Self { m, length, values })
    }

    pub fn zeros(m: usize, length: f64) -> Self {
        Self::constant(m, length, 0.0)
    }

    pub fn constant(m: usize, length: f64, c: f64) -> Self {
        assert!(m > 0 && length > 0.0);
        Self {
            m,
            length,
            values: vec![c; m * m],
        }
    }

    /// Samples `f(x_i, y_j)` at every mesh point.
    pub fn from_fn(m: usize, length: f64, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        assert!(m > 0 && length > 0.0);
        let h = length / m as f64;
        let mut values = Vec::with_capacity(m * m);
        for i in 0..m {
            let x = (i + 1) as f64 * h;
            for j in 0..m {
                let y = (j + 1) as f64 * h;
                values.push(f(x, y));
            }
        }
        Self { m, length, values }
    }

    /// Builds a field from index-based values `f(i, j)`.
    pub fn from_indices(m: usize, length: f64, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(m > 0 && length > 0.0);
        let mut values = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                values.push(f(i, j));
            }
        }
        Self { m, length, values }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn h(&self) -> f64 {
        self.length / self.m as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.m + j] = v;
    }

    /// Periodic access: any integer index is wrapped into `0..M`.
    #[inline]
    pub fn at(&self, i: isize, j: isize) -> f64 {
        let m = self.m as isize;
        self.get(i.rem_euclid(m) as usize, j.rem_euclid(m) as usize)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.m == other.m && self.length == other.length
    }

    pub(crate) fn check_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::shape((self.m, self.length), (other.m, other.length)))
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            m: self.m,
            length: self.length,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            m: self.m,
            length: self.length,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    /// `self + a * other`
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.zip_map(other, |u, v| u + a * v)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |u, v| u - v)
    }

    /// Plain sum of entries, without the `h²` weight.
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Discrete mass `<v, 1>`.
    pub fn mass(&self) -> f64 {
        let h = self.h();
        h * h * self.sum()
    }

    /// `<v, 1> / L²`
    pub fn mean(&self) -> f64 {
        self.sum() / (self.m * self.m) as f64
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    pub fn norm2(&self) -> f64 {
        let h = self.h();
        h * self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Index and value of the entry with the largest magnitude.
    pub fn argmax_abs(&self) -> (usize, usize, f64) {
        let (pos, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |(bp, bv), (p, &v)| {
                if v.abs() > bv.abs() {
                    (p, v)
                } else {
                    (bp, bv)
                }
            });
        (pos / self.m, pos % self.m, v)
    }
}

impl VectorGridFunction {
    pub fn new(x: GridFunction, y: GridFunction) -> Result<Self> {
        x.check_shape(&y)?;
        Ok(Self { x, y })
    }

    pub fn norm2(&self) -> f64 {
        self.x.norm2().hypot(self.y.norm2())
    }
}

/// Five-point periodic Laplacian `Δ_h v`.
pub fn laplace_stencil(v: &GridFunction) -> GridFunction {
    let m = v.m;
    let inv_h2 = 1.0 / (v.h() * v.h());
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        let ip = if i + 1 == m { 0 } else { i + 1 };
        let im = if i == 0 { m - 1 } else { i - 1 };
        for j in 0..m {
            let jp = if j + 1 == m { 0 } else { j + 1 };
            let jm = if j == 0 { m - 1 } else { j - 1 };
            let c = v.values[i * m + j];
            out[i * m + j] = (v.values[ip * m + j] + v.values[im * m + j] + v.values[i * m + jm]
                + v.values[i * m + jp]
                - 4.0 * c)
                * inv_h2;
        }
    }
    GridFunction {
        m,
        length: v.length,
        values: out,
    }
}

/// Forward-difference gradient `∇_h v` with periodic wrap.
pub fn gradient(v: &GridFunction) -> VectorGridFunction {
    let m = v.m;
    let inv_h = 1.0 / v.h();
    let mut gx = vec![0.0; m * m];
    let mut gy = vec![0.0; m * m];
    for i in 0..m {
        let ip = (i + 1) % m;
        for j in 0..m {
            let jp = (j + 1) % m;
            let c = v.values[i * m + j];
            gx[i * m + j] = (v.values[ip * m + j] - c) * inv_h;
            gy[i * m + j] = (v.values[i * m + jp] - c) * inv_h;
        }
    }
    let wrap = |values| GridFunction {
        m,
        length: v.length,
        values,
    };
    VectorGridFunction {
        x: wrap(gx),
        y: wrap(gy),
    }
}

/// Discrete L² inner product `h² Σ v w`.
pub fn inner(v: &GridFunction, w: &GridFunction) -> Result<f64> {
    v.check_shape(w)?;
    let h = v.h();
    Ok(h * h * v.values.iter().zip(&w.values).map(|(a, b)| a * b).sum::<f64>())
}

pub fn inner_vec(v: &VectorGridFunction, w: &VectorGridFunction) -> Result<f64> {
    Ok(inner(&v.x, &w.x)? + inner(&v.y, &w.y)?)
}
