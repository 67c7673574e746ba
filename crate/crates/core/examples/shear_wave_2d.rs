//! Decay of an oblique shear wave on the periodic unit square.
//!
//! `cargo run --release --example shear_wave_2d [cells]`

use std::f64::consts::PI;

use maxwell_flow::experiment::InitialCondition;
use maxwell_flow::grid::Grid;
use maxwell_flow::params::PhysParams;
use maxwell_flow::relax_solver::{run, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(48), |s| s.parse())?;
    let p = PhysParams::default().with_eps(0.05);
    // Velocity along (1, -1) varying along k = (1, 1): divergence free.
    let ic = InitialCondition {
        rho_amp: 0.0,
        vel_amp: 0.1,
        wavevector: [1, 1, 0],
        phases: [0.0, PI, 0.0],
        ..Default::default()
    };
    let traj = run(&ic.relax_field(Grid::new_2d(n, n)?, &p)?, &SolverConfig::new(0.1, 5), &p)?;
    // Viscous decay rate r of the amplitude, and the slow root of
    // s^2 - a s + a r = 0 with a = 1 / (nu eps1^2) for the relaxation model.
    let r = 4.0 * PI * PI * 2.0 * p.nu;
    let a = 1.0 / (p.nu * p.eps1 * p.eps1);
    let slow = 0.5 * (a - (a * a - 4.0 * a * r).sqrt());
    println!("{n}x{n} cells, {} steps", traj.steps());
    println!("predicted decay rate: viscous {r:.3}, relaxation {slow:.3}");
    let amps: Vec<(f64, f64)> = traj
        .snapshots
        .iter()
        .map(|s| (s.time, s.field.cells().iter().map(|c| c.velocity()[0].abs()).fold(0.0, f64::max)))
        .collect();
    for w in amps.windows(2) {
        let observed = (w[0].1 / w[1].1).ln() / (w[1].0 - w[0].0);
        println!("t {:.3}: max |v_x| {:.5e}, observed rate {observed:.3}", w[1].0, w[1].1);
    }
    Ok(())
}
