//! Pressure law, potential and entropy of a few states.
//!
//! `cargo run --release --example entropy_function`

use maxwell_flow::eos::{dissipation_rate, entropy, entropy_flux, phi, pressure, sound_speed};
use maxwell_flow::params::PhysParams;
use maxwell_flow::state::RelaxState;
use maxwell_flow::tensor::SymTraceless3;

fn main() -> maxwell_flow::error::Result<()> {
    let p = PhysParams::default().with_eps(0.1);
    println!("A = {}, gamma = {}", p.eos_a, p.eos_gamma);
    println!("{:>6} {:>10} {:>10} {:>10}", "rho", "p", "c", "Phi");
    for rho in [0.5, 0.9, 1.0, 1.1, 2.0] {
        println!(
            "{rho:>6} {:>10.6} {:>10.6} {:>10.6}",
            pressure(rho, &p)?,
            sound_speed(rho, &p)?,
            phi(rho, &p)?
        );
    }

    let s = RelaxState {
        rho: 1.2,
        mom: [0.3, -0.1, 0.0],
        tau1: SymTraceless3::from_components([0.2, -0.1, 0.05, 0.0, 0.1]),
        tau2: -0.3,
    };
    let e = entropy(&s, &p)?;
    println!("\nstate {s:?}");
    println!(
        "eta = {:.6} (4 Phi {:.6}, kinetic {:.6}, tau2 {:.6}, tau1 {:.6})",
        e.total, e.phi_part, e.kinetic_part, e.tau2_part, e.tau1_part
    );
    println!("entropy flux = {:.6?}", entropy_flux(&s, &p)?);
    println!("dissipation rate = {:.6}", dissipation_rate(&s, &p)?);
    Ok(())
}
