//! Certifies the symmetrizer and coupling identities on random states and
//! compares the exact wave speeds with the time-step bound.
//!
//! `cargo run --release --example structure_check`

use maxwell_flow::params::PhysParams;
use maxwell_flow::structure::{assemble, check_structure, max_wavespeed, sample_states};

fn main() -> maxwell_flow::error::Result<()> {
    let p = PhysParams::default().with_eps(0.1);
    let samples = sample_states(100, 42);
    let report = check_structure(&samples, &p, 1e-9);
    println!("{report}");

    println!("\n{:>8} {:>12} {:>12}", "sample", "max |lambda|", "bound");
    for (i, u) in samples.iter().take(5).enumerate() {
        let m = assemble(&u.flow(), &[1.0, 0.0, 0.0], &p)?;
        let radius = m
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        println!("{i:>8} {radius:>12.6} {:>12.6}", max_wavespeed(u, &p)?);
    }
    Ok(())
}
