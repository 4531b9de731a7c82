//! Conservative Fourier pseudo-spectral integrators for the space-fractional
//! Klein-Gordon-Schrödinger system
//!
//! ```text
//! i φ_t - ½ (-Δ)^{α/2} φ + u φ = 0
//! u_tt + (-Δ)^{β/2} u + u - |φ|² = 0
//! ```
//!
//! on periodic boxes in one or two dimensions.
//!
//! * [`spectral`]: grids, fractional-Laplacian multipliers, transforms and
//!   Fourier-diagonal solves, plus a dense 1D matrix for cross-checking.
//! * [`avf`]: closed forms of the averaged-gradient integrals.
//! * [`model`]: the real phase-space state `(U, V, P, Q)`, initial data,
//!   mass and energy.
//! * [`integrators`]: the FAVF, FPAVF, adjoint FPAVF, FPAVF-C and FPAVF-P
//!   one-step maps and the time loop.
//! * [`harness`]: built-in examples, error tables, invariant series, CSV
//!   output and the `fkgs` command line.

pub mod avf;
pub mod error;
pub mod harness;
pub mod integrators;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
pub use integrators::{evolve, SchemeKind, StepReport, Stepper};
pub use model::{energy, initialize, mass, InitialData, Params, State};
pub use spectral::{GridSpec, RealField, SpectralMultiplier};
