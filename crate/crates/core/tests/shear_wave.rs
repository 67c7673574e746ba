//! Two-dimensional oblique shear wave: the decay rate of the relaxation
//! solution against the slow root of its linear dispersion relation.

use std::f64::consts::PI;

use maxwell_flow::experiment::InitialCondition;
use maxwell_flow::grid::Grid;
use maxwell_flow::params::PhysParams;
use maxwell_flow::relax_solver::{run, SolverConfig};

fn observed_rate(n: usize, p: &PhysParams) -> f64 {
    let ic = InitialCondition {
        rho_amp: 0.0,
        vel_amp: 0.1,
        wavevector: [1, 1, 0],
        phases: [0.0, PI, 0.0],
        ..Default::default()
    };
    let traj = run(&ic.relax_field(Grid::new_2d(n, n).unwrap(), p).unwrap(), &SolverConfig::new(0.08, 4), p).unwrap();
    let amp = |k: usize| {
        traj.snapshots[k]
            .field
            .cells()
            .iter()
            .map(|c| c.velocity()[0].abs())
            .fold(0.0, f64::max)
    };
    (amp(2) / amp(3)).ln() / (traj.snapshots[3].time - traj.snapshots[2].time)
}

#[test]
fn shear_wave_decays_at_relaxation_rate() {
    let p = PhysParams::default().with_eps(0.05);
    let viscous = 4.0 * PI * PI * 2.0 * p.nu;
    let a = 1.0 / (p.nu * p.eps1 * p.eps1);
    let slow = 0.5 * (a - (a * a - 4.0 * a * viscous).sqrt());
    let coarse = observed_rate(32, &p);
    let fine = observed_rate(64, &p);
    assert!((fine - slow).abs() < (coarse - slow).abs(), "{coarse} {fine} {slow}");
    assert!((fine - slow).abs() / slow < 0.01, "{fine} vs {slow}");
}

#[test]
fn shear_wave_keeps_density_and_cross_velocity() {
    let p = PhysParams::default().with_eps(0.1);
    let ic = InitialCondition {
        rho_amp: 0.0,
        vel_amp: 0.1,
        wavevector: [1, 1, 0],
        phases: [0.0, PI, 0.0],
        ..Default::default()
    };
    let traj = run(&ic.relax_field(Grid::new_2d(16, 16).unwrap(), &p).unwrap(), &SolverConfig::new(0.02, 1), &p).unwrap();
    let f = traj.final_field().unwrap();
    for c in f.cells() {
        let v = c.velocity();
        assert!((v[0] + v[1]).abs() < 1e-12, "{v:?}");
        assert!((c.rho - 1.0).abs() < 1e-12);
        assert!(c.tau2.abs() < 1e-12);
    }
}
