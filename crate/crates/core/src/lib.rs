//! Pseudospectral Galerkin engine for complexified inviscid fluid models.
//!
//! Fields live on the periodic box `[0, 2π]^d` as truncated Fourier series.
//! The crate evolves the Euler, SQG, Boussinesq, Elsässer-MHD and
//! analytic-nonlinearity models along complex-time rays `ζ = s·e^{iθ}`,
//! tracks Gevrey norms whose radius shrinks linearly in `s`, evaluates the
//! certified analyticity radii, and measures the constants hidden in the
//! a-priori nonlinear estimates.
//!
//! Module map:
//! - [`spectral`]: lattice, fields, FFT transforms, multipliers, Leray
//!   projection, dealiased bilinear advection, GFLD1 snapshots.
//! - [`gevrey`]: Gevrey/Wiener/Sobolev norms, the embedding constant and
//!   the shrinking-radius norm.
//! - [`models`]: model states, right-hand sides, Elsässer variables,
//!   analytic series and the initial-data catalog.
//! - [`engine`]: complex-time ray integration, certified regions, θ sweeps,
//!   Galerkin convergence, energy budgets and disk chaining.
//! - [`lab`]: brute-force convolution oracle and the inequality lab.

pub mod engine;
pub mod error;
pub mod gevrey;
pub mod lab;
pub mod models;
pub mod random;
pub mod spectral;

pub use error::{Error, Result};
pub use gevrey::{GevreyParams, NormReport};
pub use models::{AnalyticSeries, ModelKind, ModelState, ModelTag};
pub use spectral::{Dealias, GridSpec, MultiplierSpec, SpectralField};

pub use num_complex::Complex64;
