//! Empirical instantiation of the absolute constant in the nonlinear estimates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimates::{verify_state_estimate, EstimateReport};
use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelState, ModelTag};
use crate::random::random_complexified_with;
use crate::spectral::GridSpec;

pub const MIN_ENSEMBLE: usize = 100;
pub const SAFETY_FACTOR: f64 = 1.1;
/// Ratios at or below this count as "no nonlinear transfer".
pub const DEGENERATE_RATIO: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum Ensemble {
    /// `count` complexified random states of `kind`, sample `i` drawn from
    /// its own stream derived from `(seed, i)`.
    Random { kind: ModelKind, grid: GridSpec, count: usize, seed: u64, beta_decay: f64 },
    Explicit(Vec<ModelState>),
}

/// Seed of sample `i` in an ensemble seeded with `seed`.
pub fn sample_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)
}

/// One complexified random state: coefficients `e^{−β_decay|k|}·U·e^{iφ}`,
/// mean-free, vector members Leray-projected.
pub fn random_state(kind: &ModelKind, grid: GridSpec, beta_decay: f64, seed: u64) -> Result<ModelState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields = kind
        .member_components(grid.dim())
        .into_iter()
        .map(|c| random_complexified_with(grid, c, beta_decay, true, &mut rng))
        .collect();
    ModelState::new(kind.clone(), fields)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    fn build(values: &[f64], bins: usize) -> Self {
        let top = values.iter().copied().fold(0.0, f64::max);
        let width = if top > 0.0 { top / bins as f64 } else { 1.0 };
        let edges = (0..=bins).map(|i| i as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for v in values {
            let b = ((v / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Self { edges, counts }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub model: ModelTag,
    pub c_emp: f64,
    pub max_ratio: f64,
    pub safety_factor: f64,
    pub degenerate: bool,
    pub count: usize,
    pub seed: Option<u64>,
    pub r: f64,
    pub beta: f64,
    pub histogram: Histogram,
    #[serde(skip)]
    pub samples: Vec<EstimateReport>,
}

/// `C_emp = 1.1 × max ratio` over the ensemble, with `C_emp = 1` and the
/// degenerate flag when no member shows any nonlinear transfer.
pub fn empirical_constant(ensemble: &Ensemble, r: f64, beta: f64) -> Result<ConstantReport> {
    let (samples, seed) = match ensemble {
        Ensemble::Random { kind, grid, count, seed, beta_decay } => {
            if *count < MIN_ENSEMBLE {
                return Err(Error::Precondition(format!("ensemble of {count} < {MIN_ENSEMBLE} fields")));
            }
            let samples = (0..*count)
                .into_par_iter()
                .map(|i| {
                    let s = sample_seed(*seed, i);
                    let mut rep = verify_state_estimate(&random_state(kind, *grid, *beta_decay, s)?, r, beta)?;
                    rep.meta.seed = Some(s);
                    Ok(rep)
                })
                .collect::<Result<Vec<_>>>()?;
            (samples, Some(*seed))
        }
        Ensemble::Explicit(states) => {
            if states.len() < MIN_ENSEMBLE {
                return Err(Error::Precondition(format!("ensemble of {} < {MIN_ENSEMBLE} fields", states.len())));
            }
            let samples =
                states.par_iter().map(|s| verify_state_estimate(s, r, beta)).collect::<Result<Vec<_>>>()?;
            (samples, None)
        }
    };
    let model = samples[0].model;
    if samples.iter().any(|s| s.model != model) {
        return Err(Error::Precondition("ensemble mixes models".into()));
    }
    if let Some(bad) = samples.iter().find(|s| !s.ratio.is_finite()) {
        return Err(Error::Overflow { k_norm: bad.meta.cutoff as f64 });
    }
    let ratios: Vec<f64> = samples.iter().map(|s| s.ratio).collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let degenerate = max_ratio <= DEGENERATE_RATIO;
    Ok(ConstantReport {
        model,
        c_emp: if degenerate { 1.0 } else { SAFETY_FACTOR * max_ratio },
        max_ratio,
        safety_factor: SAFETY_FACTOR,
        degenerate,
        count: samples.len(),
        seed,
        r,
        beta,
        histogram: Histogram::build(&ratios, 20),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{initial_data, CatalogEntry};

    #[test]
    fn steady_ensemble_is_degenerate() {
        let g = GridSpec::new(2, 16, 5).unwrap();
        let tg = initial_data(&CatalogEntry::TaylorGreen2d, ModelKind::Euler, g).unwrap();
        let rep = empirical_constant(&Ensemble::Explicit(vec![tg; 100]), 2.0, 0.3).unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.c_emp, 1.0);
    }

    #[test]
    fn small_ensembles_are_refused() {
        let g = GridSpec::new(2, 16, 5).unwrap();
        let e = Ensemble::Random { kind: ModelKind::Euler, grid: g, count: 10, seed: 1, beta_decay: 0.8 };
        assert!(matches!(empirical_constant(&e, 2.0, 0.3), Err(Error::Precondition(_))));
    }

    #[test]
    fn random_ensemble_is_reproducible() {
        let g = GridSpec::new(2, 16, 5).unwrap();
        let e = Ensemble::Random { kind: ModelKind::Sqg, grid: g, count: 100, seed: 3, beta_decay: 0.8 };
        let a = empirical_constant(&e, 2.0, 0.3).unwrap();
        let b = empirical_constant(&e, 2.0, 0.3).unwrap();
        assert_eq!(a.c_emp, b.c_emp);
        assert_eq!(a.samples, b.samples);
        assert!(!a.degenerate && a.c_emp > 0.0 && a.c_emp.is_finite());
        assert_eq!(a.histogram.counts.iter().sum::<u64>(), 100);
    }
}
