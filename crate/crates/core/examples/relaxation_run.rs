//! A one-dimensional run of the relaxation system from closure-initialised
//! data, with mass, entropy and stress norms per snapshot.
//!
//! `cargo run --release --example relaxation_run [cells] [eps]`

use maxwell_flow::experiment::InitialCondition;
use maxwell_flow::grid::Grid;
use maxwell_flow::params::PhysParams;
use maxwell_flow::relax_solver::{entropy_totals, run, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let cells: usize = args.next().map_or(Ok(256), |s| s.parse())?;
    let eps: f64 = args.next().map_or(Ok(0.1), |s| s.parse())?;

    let p = PhysParams::default().with_eps(eps);
    let ic = InitialCondition {
        vel_amp: 0.1,
        ..Default::default()
    };
    let init = ic.relax_field(Grid::new_1d(cells)?, &p)?;
    let traj = run(&init, &SolverConfig::new(0.2, 10), &p)?;

    println!("{cells} cells, eps {eps}, {} steps", traj.steps());
    println!("{:>6} {:>14} {:>14} {:>12}", "t", "mass", "entropy", "max |tau1|");
    for s in &traj.snapshots {
        let tau = s
            .field
            .cells()
            .iter()
            .map(|c| c.tau1.norm_sq().sqrt())
            .fold(0.0, f64::max);
        let h = entropy_totals(&s.field, &p)?.entropy;
        println!("{:>6.3} {:>14.12} {:>14.8e} {tau:>12.4e}", s.time, s.field.total_mass(), h);
    }
    Ok(())
}
