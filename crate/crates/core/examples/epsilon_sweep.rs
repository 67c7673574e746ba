//! Relaxation runs against the Navier-Stokes reference for a list of
//! relaxation scales, with the fitted convergence rate.
//!
//! `cargo run --release --example epsilon_sweep [cells]`

use maxwell_flow::config::parse_config;
use maxwell_flow::cli::verdict;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cells: usize = std::env::args().nth(1).map_or(Ok(256), |s| s.parse())?;
    let cfg = parse_config(&format!("cells = {cells}"))?;
    let sweep = cfg.comparison()?.sweep(&cfg.eps_list)?;

    println!("{:>8} {:>12} {:>12} {:>12}", "eps", "sup total", "sup rho", "sup tau1");
    for r in &sweep.runs {
        let sup = |f: fn(&maxwell_flow::diagnostics::ErrorRow) -> f64| r.errors.rows.iter().map(f).fold(0.0, f64::max);
        println!(
            "{:>8} {:>12.4e} {:>12.4e} {:>12.4e}",
            r.eps,
            r.errors.sup,
            sup(|row| row.rho),
            sup(|row| row.tau1)
        );
    }
    println!("{}", verdict(&sweep.fit, cfg.slope_band));
    Ok(())
}
