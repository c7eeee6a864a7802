use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::snapshot;

/// Initial data `u^0`.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    /// `amplitude · sin(2πx/L) sin(2πy/L)`
    Sine { amplitude: f64 },
    /// `offset + amplitude · r_{ij}` with `r_{ij}` uniform in `[-1, 1)`, drawn
    /// from a ChaCha8 stream seeded by `seed` in row-major mesh order.
    Random { offset: f64, amplitude: f64, seed: u64 },
    /// A previously written snapshot.
    File(PathBuf),
}

impl InitialCondition {
    pub fn build(&self, m: usize, length: f64) -> Result<GridFunction> {
        match self {
            InitialCondition::Sine { amplitude } => Ok(GridFunction::from_fn(m, length, |x, y| {
                amplitude * (2.0 * PI * x / length).sin() * (2.0 * PI * y / length).sin()
            })),
            InitialCondition::Random { offset, amplitude, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok(GridFunction::from_indices(m, length, |_, _| {
                    offset + amplitude * rng.random_range(-1.0..1.0)
                }))
            }
            InitialCondition::File(path) => {
                let snap = snapshot::read_snapshot(path)?;
                if snap.field.m() != m || snap.field.length() != length {
                    return Err(Error::Snapshot {
                        path: path.clone(),
                        message: format!(
                            "mesh M={} L={} does not match configured M={m} L={length}",
                            snap.field.m(),
                            snap.field.length()
                        ),
                    });
                }
                Ok(snap.field)
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InitialCondition::Sine { .. } => "sine",
            InitialCondition::Random { .. } => "random",
            InitialCondition::File(_) => "file",
        }
    }
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCondition::Sine { amplitude } => write!(f, "{amplitude}*sin(2pi x)sin(2pi y)"),
            InitialCondition::Random { offset, amplitude, seed } => {
                write!(f, "{offset}+{amplitude}*rand (seed {seed})")
            }
            InitialCondition::File(p) => write!(f, "file {}", p.display()),
        }
    }
}
