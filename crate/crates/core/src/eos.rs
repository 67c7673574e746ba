//! Pressure law and the entropy structure of the relaxation system.
//!
//! With `Phi(rho) = rho * int_1^rho p(z)/z^2 dz`, smooth solutions satisfy
//!
//! ```text
//! d/dt (4 Phi + 2 rho |v|^2 + 2 tau2^2 + |tau1|^2)
//!   + div(4 Phi v + 2 rho |v|^2 v + 4 p v + 4 tau2 v / eps2 + 4 tau1 v / eps1)
//!   = -4 tau2^2 / (kappa eps2^2) - 2 |tau1|^2 / (nu eps1^2)
//! ```
//!
//! The entropy is strictly convex in `(rho, rho v, tau1, tau2)` whenever the
//! pressure is strictly increasing, and the right-hand side is never positive.

use crate::error::{Error, Result};
use crate::params::PhysParams;
use crate::state::RelaxState;
use crate::tensor::{dot, Vec3};

#[inline]
fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { rho })
    }
}

/// `p = A rho^gamma`.
pub fn pressure(rho: f64, p: &PhysParams) -> Result<f64> {
    check_rho(rho)?;
    Ok(p.eos_a * rho.powf(p.eos_gamma))
}

/// `dp/drho = A gamma rho^(gamma - 1)`, strictly positive.
pub fn pressure_deriv(rho: f64, p: &PhysParams) -> Result<f64> {
    check_rho(rho)?;
    Ok(p.eos_a * p.eos_gamma * rho.powf(p.eos_gamma - 1.0))
}

pub fn sound_speed(rho: f64, p: &PhysParams) -> Result<f64> {
    pressure_deriv(rho, p).map(f64::sqrt)
}

/// Entropy potential, in closed form for the gamma-law:
/// `Phi = A (rho^gamma - rho) / (gamma - 1)`.
pub fn phi(rho: f64, p: &PhysParams) -> Result<f64> {
    check_rho(rho)?;
    Ok(p.eos_a * (rho.powf(p.eos_gamma) - rho) / (p.eos_gamma - 1.0))
}

/// `Phi''(rho) = p'(rho) / rho`.
pub fn phi_second(rho: f64, p: &PhysParams) -> Result<f64> {
    Ok(pressure_deriv(rho, p)? / rho)
}

/// The four additive pieces of the entropy `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyBreakdown {
    /// `4 Phi(rho)`
    pub phi_part: f64,
    /// `2 rho |v|^2`
    pub kinetic_part: f64,
    /// `2 tau2^2`
    pub tau2_part: f64,
    /// `|tau1|^2 = trace(tau1^T tau1)`
    pub tau1_part: f64,
    pub total: f64,
}

pub fn entropy(s: &RelaxState, p: &PhysParams) -> Result<EntropyBreakdown> {
    let phi_part = 4.0 * phi(s.rho, p)?;
    let kinetic_part = 2.0 * dot(&s.mom, &s.mom) / s.rho;
    let tau2_part = 2.0 * s.tau2 * s.tau2;
    let tau1_part = s.tau1.norm_sq();
    Ok(EntropyBreakdown {
        phi_part,
        kinetic_part,
        tau2_part,
        tau1_part,
        total: phi_part + kinetic_part + tau2_part + tau1_part,
    })
}

/// The entropy flux vector
/// `4 Phi v + 2 rho |v|^2 v + 4 p v + 4 tau2 v / eps2 + 4 tau1 v / eps1`.
pub fn entropy_flux(s: &RelaxState, p: &PhysParams) -> Result<Vec3> {
    let v = s.velocity();
    let scalar = 4.0 * phi(s.rho, p)?
        + 2.0 * s.rho * dot(&v, &v)
        + 4.0 * pressure(s.rho, p)?
        + 4.0 * s.tau2 / p.eps2;
    let tv = s.tau1.mul_vec(&v);
    Ok([0, 1, 2].map(|i| scalar * v[i] + 4.0 * tv[i] / p.eps1))
}

/// Entropy production `-4 tau2^2 / (kappa eps2^2) - 2 |tau1|^2 / (nu eps1^2)`.
pub fn dissipation_rate(s: &RelaxState, p: &PhysParams) -> Result<f64> {
    check_rho(s.rho)?;
    Ok(-4.0 * s.tau2 * s.tau2 / (p.kappa * p.eps2 * p.eps2)
        - 2.0 * s.tau1.norm_sq() / (p.nu * p.eps1 * p.eps1))
}
