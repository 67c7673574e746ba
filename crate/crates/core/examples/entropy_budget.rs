//! Discrete entropy balance: monotonicity and the budget residual under
//! grid refinement.
//!
//! `cargo run --release --example entropy_budget`

use maxwell_flow::diagnostics::entropy_budget;
use maxwell_flow::experiment::InitialCondition;
use maxwell_flow::grid::Grid;
use maxwell_flow::params::PhysParams;
use maxwell_flow::relax_solver::{run, SolverConfig};

fn main() -> maxwell_flow::error::Result<()> {
    let p = PhysParams::default().with_eps(0.1);
    let ic = InitialCondition::default();
    let mut previous: Option<f64> = None;
    println!("{:>6} {:>8} {:>16} {:>14} {:>8}", "cells", "steps", "non-increasing", "max residual", "ratio");
    for cells in [64, 128, 256, 512] {
        let traj = run(&ic.relax_field(Grid::new_1d(cells)?, &p)?, &SolverConfig::new(0.2, 1), &p)?;
        let b = entropy_budget(&traj);
        let ratio = previous.map_or(String::from("-"), |r| format!("{:.3}", r / b.max_abs_residual));
        println!(
            "{cells:>6} {:>8} {:>16} {:>14.4e} {ratio:>8}",
            traj.steps(),
            b.non_increasing(),
            b.max_abs_residual
        );
        previous = Some(b.max_abs_residual);
    }
    Ok(())
}
