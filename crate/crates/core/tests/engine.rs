use std::f64::consts::PI;

use gevrey_flow::engine::{
    calibrate_constant, certified_radius, chain_disks, energy_budget, integrate_ray, sweep_theta, CalibrationSettings,
    RaySpec, RayStatus, SchedulePoint, MAX_SPACING,
};
use gevrey_flow::models::{initial_data, CatalogEntry};
use gevrey_flow::{GevreyParams, GridSpec, ModelKind};

fn sqg_two_mode() -> gevrey_flow::ModelState {
    initial_data(&CatalogEntry::SqgTwoMode, ModelKind::Sqg, GridSpec::new(2, 16, 7).unwrap()).unwrap()
}

#[test]
fn calibrated_sweep_is_consistent_and_monotone() {
    let s0 = sqg_two_mode();
    let p = GevreyParams::new(2.0, 0.5, 0.0, 2).unwrap();
    let cal = calibrate_constant(&s0, &p, &CalibrationSettings { samples: 40, ..Default::default() }).unwrap();
    let p = p.with_constant(cal.c_emp);
    let region = certified_radius(&s0, &p).unwrap();
    let template = RaySpec::new(0.0, region.s_certified / 50.0, 1.5 * region.s_certified).unwrap();
    let sweep = sweep_theta(&s0, &p, 8, &template, 1e6).unwrap();
    assert!(sweep.region.flagged().is_empty());
    assert!(sweep.region.min_empirical().unwrap() >= region.s_certified);
    for t in &sweep.trajectories {
        for w in t.samples.windows(2).filter(|w| w[1].s <= region.s_certified) {
            assert!(w[1].combined <= w[0].combined * (1.0 + 1e-8), "theta {} at s {}", t.theta, w[1].s);
        }
    }
}

#[test]
fn energy_budget_holds_inside_the_region() {
    let s0 = sqg_two_mode();
    let p = GevreyParams::new(2.0, 0.5, 0.0, 2).unwrap();
    let cal = calibrate_constant(&s0, &p, &CalibrationSettings { samples: 40, ..Default::default() }).unwrap();
    let region = certified_radius(&s0, &p.with_constant(cal.c_emp)).unwrap();
    let ds = 0.5 * MAX_SPACING * region.s_certified;
    let ray = RaySpec::new(PI / 3.0, ds, 0.5 * region.s_certified).unwrap();
    let t = integrate_ray(&s0, &region.params(), &ray, 1e6).unwrap();
    assert_eq!(t.status, RayStatus::Completed);
    let rep = energy_budget(&t, s0.kind(), &region.params()).unwrap();
    assert!(rep.holds, "max margin {}", rep.max_margin);
}

#[test]
fn chained_disks_cover_a_constant_schedule() {
    let schedule: Vec<SchedulePoint> =
        (0..=10).map(|i| SchedulePoint { t: i as f64 * 0.1, beta: 0.5, m: 1.0 }).collect();
    let cov = chain_disks(&schedule, 2.0, 2, 1.0, None).unwrap();
    assert!((cov.epsilon - PI / 8.0).abs() < 1e-14);
    assert!(cov.covers);
    let last = cov.disks.last().unwrap();
    assert!(last.center + last.radius >= 1.0);
}
