//! Observed spatial order of both solvers from three nested grids.
//!
//! `cargo run --release --example self_convergence [coarse cells]`

use maxwell_flow::config::parse_config;
use maxwell_flow::experiment::richardson_order;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let coarse: usize = std::env::args().nth(1).map_or(Ok(64), |s| s.parse())?;
    let mut relax = Vec::new();
    let mut ns = Vec::new();
    for cells in [coarse, 2 * coarse, 4 * coarse] {
        let setup = parse_config(&format!("cells = {cells}\nvel_amp = 0.05\nsnapshots = 1"))?.comparison()?;
        relax.push(setup.relaxation(0.1)?.final_field().cloned().expect("final snapshot"));
        ns.push(setup.reference()?.snapshots.last().expect("final snapshot").field.to_relax_field());
    }
    for (name, f) in [("relaxation", &relax), ("navier-stokes", &ns)] {
        let (order, e1, e2) = richardson_order(&f[0], &f[1], &f[2])?;
        println!("{name:<14} differences {e1:.3e} {e2:.3e}, observed order {order:.3}");
    }
    Ok(())
}
