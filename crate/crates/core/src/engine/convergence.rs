//! Galerkin convergence: the same ray at several radial cutoffs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ray::{RaySpec, RayStatus, RayStepper};
use crate::error::{Error, Result};
use crate::gevrey::{sobolev_norm, GevreyParams};
use crate::models::ModelState;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffDeviation {
    pub cutoff: usize,
    /// `max_s ‖u_K(s) − u_{Kmax}(s)‖_{H^r}` (root-sum-square over members).
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub r: f64,
    pub theta: f64,
    pub s_reached: f64,
    pub entries: Vec<CutoffDeviation>,
    /// Set when some cutoff broke down before `s_max`.
    pub breakdown: Option<RayStatus>,
}

impl ConvergenceReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].deviation < w[0].deviation)
    }
}

/// Integrates `state0` truncated to each cutoff in `cutoffs` in lockstep and
/// records the largest `H^r` distance to the finest cutoff over the sampled
/// arclengths. The datum's grid supplies the lattice; every cutoff is
/// dealiased on its own product grid.
pub fn galerkin_convergence(
    state0: &ModelState,
    params: &GevreyParams,
    ray: &RaySpec,
    cutoffs: &[usize],
) -> Result<ConvergenceReport> {
    if cutoffs.len() < 2 {
        return Err(Error::Precondition("at least two cutoffs are needed".into()));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition(format!("cutoffs {cutoffs:?} are not increasing")));
    }
    let fine = *state0.grid();
    let kmax = *cutoffs.last().unwrap();
    if kmax > fine.cutoff() {
        return Err(Error::Precondition(format!("cutoff {kmax} exceeds the grid cutoff {}", fine.cutoff())));
    }
    let ray = ray.with_stop_at_radius(false);
    let mut steppers = cutoffs
        .iter()
        .map(|&k| {
            let s = state0.on_grid(fine.with_cutoff(k)?)?;
            RayStepper::new(s, *params, ray, f64::INFINITY)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst = vec![0.0; cutoffs.len()];
    let mut s_reached = 0.0;
    let breakdown;
    loop {
        let top = steppers.last().unwrap().state().on_grid(fine)?;
        for (w, st) in worst.iter_mut().zip(&steppers) {
            let mut sq = 0.0;
            for (a, b) in st.state().on_grid(fine)?.fields().iter().zip(top.fields()) {
                sq += sobolev_norm(&a.sub(b)?, params.r)?.powi(2);
            }
            *w = f64::max(*w, sq.sqrt());
        }
        let stepped = steppers.par_iter_mut().map(|st| st.advance()).collect::<Result<Vec<_>>>()?;
        if stepped.iter().any(Option::is_none) {
            breakdown = steppers
                .iter()
                .filter_map(|st| st.status().cloned())
                .find(|s| !matches!(s, RayStatus::Completed));
            break;
        }
        s_reached = steppers[0].s();
    }
    Ok(ConvergenceReport {
        r: params.r,
        theta: ray.theta,
        s_reached,
        entries: cutoffs.iter().zip(worst).map(|(&cutoff, deviation)| CutoffDeviation { cutoff, deviation }).collect(),
        breakdown,
    })
}
