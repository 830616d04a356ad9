//! Exponential wave integrator Fourier pseudospectral (EWI-FP) solver for
//! the 1D nonlinear Schrodinger equation with wave operator
//!
//! ```text
//! i psi_t - alpha psi_tt + psi_xx - eps^{2p} |psi|^{2p} psi = 0
//! ```
//!
//! on a periodic interval, together with the tooling used to study its
//! long-time accuracy on `[0, T / eps^beta]`: an RK4 oracle, a cached
//! fine-mesh reference, norms and conserved quantities, and a study harness.
//!
//! Rescaling `phi = eps psi` turns the weak-nonlinearity problem into one
//! with unit nonlinearity and `O(eps)` initial data; the solver works with
//! the weak-nonlinearity form only.

pub mod coefficients;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod harness;
pub mod initial_data;
pub mod oracle;
pub mod stepper;

pub use coefficients::{build_table, mode_frequencies, stable_sinc, CoefficientTable, ModeFrequencies, TableCache};
pub use diagnostics::{conserved, error_report, grid_norms, observed_order, sobolev_norm, ConservedQuantities, ErrorReport};
pub use error::{Error, Result};
pub use grid::{forward_dft, inverse_dft, FourierTransform, GridSpec, SpectralField};
pub use initial_data::InitialData;
pub use oracle::{make_reference, rk4_integrate, OdeState, ReferenceCache};
pub use stepper::{initial_g, integrate, nonlinearity, EwiStepper, ModelParams, StepperConfig, StepperState};
