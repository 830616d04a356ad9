//! Initial data for the numerical experiments on `(-pi, pi)`.

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::{forward_dft, GridSpec, SpectralField};

/// `psi(x, 0) = 1 / (2 + cos^2 x + sin x)`.
pub fn psi0(x: f64) -> f64 {
    1.0 / (2.0 + x.cos().powi(2) + x.sin())
}

/// `psi_t(x, 0) = 1 / (2 + sin^2 x + cos x)`.
pub fn psi1(x: f64) -> f64 {
    1.0 / (2.0 + x.sin().powi(2) + x.cos())
}

/// Source of `(psi(0), psi_t(0))` samples on an arbitrary grid.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// The smooth pair [`psi0`], [`psi1`].
    Standard,
    /// Trigonometric interpolants of user-supplied samples.
    Samples {
        position: SpectralField,
        velocity: SpectralField,
    },
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::Standard
    }
}

impl InitialData {
    /// Wraps samples given on `grid`; other grids evaluate their interpolant.
    pub fn from_samples(grid: &GridSpec, position: &[Complex64], velocity: &[Complex64]) -> Result<Self> {
        Ok(InitialData::Samples {
            position: forward_dft(grid, position)?,
            velocity: forward_dft(grid, velocity)?,
        })
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        match self {
            InitialData::Standard => Ok((
                grid.sample(|x| Complex64::new(psi0(x), 0.0)),
                grid.sample(|x| Complex64::new(psi1(x), 0.0)),
            )),
            InitialData::Samples { position, velocity } => {
                if !position.grid().same_domain(grid) {
                    return Err(Error::Grid(format!(
                        "initial samples live on ({}, {}), requested grid on ({}, {})",
                        position.grid().a(),
                        position.grid().b(),
                        grid.a(),
                        grid.b()
                    )));
                }
                Ok((
                    grid.sample(|x| position.evaluate(x)),
                    grid.sample(|x| velocity.evaluate(x)),
                ))
            }
        }
    }

    /// Stable identifier used in reference-cache keys.
    pub fn key(&self) -> String {
        match self {
            InitialData::Standard => "standard".to_string(),
            InitialData::Samples { position, velocity } => {
                let mut h = Sha256::new();
                for f in [position, velocity] {
                    for c in f.as_fft_order() {
                        h.update(c.re.to_le_bytes());
                        h.update(c.im.to_le_bytes());
                    }
                }
                format!("samples-{}", &hex::encode(h.finalize())[..16])
            }
        }
    }
}
