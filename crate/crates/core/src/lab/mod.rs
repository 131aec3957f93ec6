//! Inequality lab: convolution oracle, measured estimate ratios, lattice
//! lemma sweeps and empirical constants.

mod ensemble;
mod estimates;
mod lemmas;
pub mod oracle;

pub use ensemble::{
    empirical_constant, random_state, sample_seed, ConstantReport, Ensemble, Histogram, DEGENERATE_RATIO,
    MIN_ENSEMBLE, SAFETY_FACTOR,
};
pub use estimates::{
    nonlinear_pairing, state_ratio, verify_analytic_estimate, verify_boussinesq_estimate, verify_euler_estimate,
    verify_mhd_estimate, verify_sqg_estimate, verify_state_estimate, EstimateReport, SampleMeta, TermReport,
};
pub use lemmas::{elementary_power_holds, verify_wavenumber_lemmas, LemmaCheck, LemmaReport, LemmaSweep};
