//! Truncated Fourier representation of periodic fields on `[0, 2π]^d`.

mod advect;
mod fft;
mod field;
mod grid;
mod multiplier;
pub mod snapshot;

pub use advect::{
    bilinear_advect, elsasser_advect, pointwise_product, self_advect_solenoidal, truncated_power_series, SOLENOIDAL_TOL,
};
pub use field::{FieldFlags, PhysicalField, SpectralField, DIV_FREE_TOL, HERMITIAN_TOL};
pub use grid::{Band, Dealias, GridSpec};
pub use multiplier::{apply_multiplier, galerkin_truncate, leray_project, MultiplierSpec, MultiplierTable};

pub(crate) use multiplier::LOG_DOMAIN_THRESHOLD;
