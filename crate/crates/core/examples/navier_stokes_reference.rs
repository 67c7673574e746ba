//! The reference Navier-Stokes run and its closure stresses for several
//! relaxation scales.
//!
//! `cargo run --release --example navier_stokes_reference [cells]`

use maxwell_flow::experiment::InitialCondition;
use maxwell_flow::grid::Grid;
use maxwell_flow::ns_solver::{ns_run, NSConfig};
use maxwell_flow::params::PhysParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cells: usize = std::env::args().nth(1).map_or(Ok(128), |s| s.parse())?;
    let p = PhysParams::default();
    let ic = InitialCondition {
        vel_amp: 0.1,
        ..Default::default()
    };
    let init = ic.ns_field(Grid::new_1d(cells)?, &p)?;
    let traj = ns_run(&init, &NSConfig::new(0.2, 4), &p)?;
    println!("{cells} cells, {} steps, smallest dt {:.3e}", traj.steps(), traj.dt.iter().copied().fold(f64::INFINITY, f64::min));

    for s in &traj.snapshots {
        let f = &s.field;
        let (lo, hi) = f
            .cells()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.rho), hi.max(c.rho)));
        println!("t {:.3}: rho in [{lo:.6}, {hi:.6}], mass {:.12}", s.time, f.total_mass());
    }

    println!("\nclosure stresses at the final time scale with eps:");
    for eps in [0.1, 0.05, 0.025] {
        let closed = traj.with_params(&p.with_eps(eps))?;
        let last = &closed.snapshots.last().unwrap().field;
        let t1 = last.tau1_ce().iter().map(|t| t.norm_sq().sqrt()).fold(0.0, f64::max);
        let t2 = last.tau2_ce().iter().map(|t| t.abs()).fold(0.0, f64::max);
        println!("eps {eps:<6} max |tau1| {t1:.4e}, max |tau2| {t2:.4e}");
    }
    Ok(())
}
