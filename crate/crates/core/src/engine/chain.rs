//! Chaining certified disks along the real time axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gevrey::cwien;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchedulePoint {
    pub t: f64,
    pub beta: f64,
    /// `‖u(t)‖_{β(t)}`.
    pub m: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub epsilon: f64,
    pub beta_inf: f64,
    pub m_max: f64,
    pub t_end: f64,
    pub disks: Vec<Disk>,
    /// Disk radius over center spacing.
    pub overlap_factor: f64,
    pub adjacent_overlap: bool,
    pub covers: bool,
}

/// Disks of radius `ε = β_inf/(C 2^r C_W M)` centered at `jε/2`, `j = 1, 2, …`,
/// enough of them to cover `(0, T)`. `T` is `t_end` or the last schedule time.
pub fn chain_disks(
    schedule: &[SchedulePoint],
    r: f64,
    dim: usize,
    constant: f64,
    t_end: Option<f64>,
) -> Result<Coverage> {
    if schedule.is_empty() {
        return Err(Error::Precondition("empty schedule".into()));
    }
    for (i, p) in schedule.iter().enumerate() {
        if !(p.beta > 0.0 && p.beta.is_finite()) {
            return Err(Error::Precondition(format!("schedule row {i}: beta = {} must be positive", p.beta)));
        }
        if !(p.m > 0.0 && p.m.is_finite()) {
            return Err(Error::Precondition(format!("schedule row {i}: M = {} must be positive", p.m)));
        }
        if !(p.t >= 0.0 && p.t.is_finite()) {
            return Err(Error::Precondition(format!("schedule row {i}: t = {} must be nonnegative", p.t)));
        }
    }
    if schedule.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(Error::Precondition("schedule times must increase".into()));
    }
    if schedule[0].t != 0.0 {
        return Err(Error::Precondition(format!("schedule starts at t = {}, not 0", schedule[0].t)));
    }
    if !(constant > 0.0) {
        return Err(Error::Parameter(format!("constant {constant} must be positive")));
    }
    let t_last = schedule.last().unwrap().t;
    let t_end = t_end.unwrap_or(t_last);
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Precondition(format!("T = {t_end} must be nonnegative")));
    }
    if t_end > t_last && schedule.len() > 1 {
        return Err(Error::Precondition(format!("schedule ends at {t_last} < T = {t_end}")));
    }
    let beta_inf = schedule.iter().map(|p| p.beta).fold(f64::INFINITY, f64::min);
    let m_max = schedule.iter().map(|p| p.m).fold(0.0, f64::max);
    let epsilon = beta_inf / (constant * 2f64.powf(r) * cwien(r, dim)? * m_max);
    let step = 0.5 * epsilon;
    // smallest J with Jε/2 + ε >= T
    let count = (((t_end - epsilon) / step).ceil().max(1.0)) as usize;
    let disks: Vec<Disk> = (1..=count).map(|j| Disk { center: j as f64 * step, radius: epsilon }).collect();
    let adjacent_overlap = disks.windows(2).all(|w| w[1].center - w[0].center < w[0].radius + w[1].radius);
    let first = disks[0];
    let last = disks[disks.len() - 1];
    let covers = adjacent_overlap && first.center - first.radius <= 0.0 && last.center + last.radius >= t_end;
    Ok(Coverage {
        epsilon,
        beta_inf,
        m_max,
        t_end,
        disks,
        overlap_factor: epsilon / step,
        adjacent_overlap,
        covers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn constant_schedule(t: f64, beta: f64, m: f64) -> Vec<SchedulePoint> {
        (0..=10).map(|i| SchedulePoint { t: t * i as f64 / 10.0, beta, m }).collect()
    }

    #[test]
    fn constant_schedule_closed_form() {
        let cov = chain_disks(&constant_schedule(2.0, 0.5, 1.0), 2.0, 2, 1.0, None).unwrap();
        assert!((cov.epsilon - PI / 8.0).abs() < 1e-12);
        assert!((cov.disks[0].center - PI / 16.0).abs() < 1e-12);
        assert!((cov.disks[1].center - 2.0 * PI / 16.0).abs() < 1e-12);
        assert_eq!(cov.overlap_factor, 2.0);
        assert!(cov.covers && cov.adjacent_overlap);
        let last = cov.disks.last().unwrap();
        assert!(last.center + last.radius >= 2.0);
        assert!(last.center - 0.5 * cov.epsilon + cov.epsilon < 2.0);
    }

    #[test]
    fn one_disk_for_short_horizons() {
        let s = [SchedulePoint { t: 0.0, beta: 0.5, m: 1.0 }];
        let cov = chain_disks(&s, 2.0, 2, 1.0, Some(0.1)).unwrap();
        assert_eq!(cov.disks.len(), 1);
        assert!(cov.covers);
    }

    #[test]
    fn decreasing_radius_uses_the_minimum() {
        let s: Vec<_> = (0..=4).map(|i| SchedulePoint { t: i as f64 * 0.5, beta: 0.5 - 0.1 * i as f64, m: 1.0 }).collect();
        let cov = chain_disks(&s, 2.0, 2, 1.0, None).unwrap();
        assert!((cov.beta_inf - 0.1).abs() < 1e-15);
        assert!((cov.epsilon - 0.1 * PI / 4.0).abs() < 1e-12);
        assert!(cov.covers);
    }

    #[test]
    fn bad_schedules() {
        assert!(chain_disks(&[], 2.0, 2, 1.0, None).is_err());
        let s = [SchedulePoint { t: 0.0, beta: 0.0, m: 1.0 }];
        assert!(chain_disks(&s, 2.0, 2, 1.0, None).is_err());
        let s = [SchedulePoint { t: 0.5, beta: 0.5, m: 1.0 }];
        assert!(chain_disks(&s, 2.0, 2, 1.0, None).is_err());
    }
}
