//! Fluxes of the relaxation system in conservation form.
//!
//! Every equation is a divergence: along axis `j`
//!
//! ```text
//! rho  : m_j
//! m_i  : m_i v_j + p delta_ij + tau1_ij / eps1 + tau2 delta_ij / eps2
//! tau1 : (e_j (x) v + v (x) e_j - 2/3 v_j I) / eps1     (packed)
//! tau2 : v_j / eps2
//! ```
//!
//! so the flow part carries a constant coupling to the stresses and the stress
//! part depends on the flow only through `v = m / rho`.

use crate::params::PhysParams;
use crate::state::NVARS;
use crate::tensor::{Mat3, PACKED_INDICES};

/// Whether the `1/eps` flow-stress coupling is active. `Off` leaves plain
/// isentropic gas dynamics plus passive stresses and exists for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coupling {
    #[default]
    On,
    Off,
}

/// Basis matrices of the packed deviatoric components: `tau1 = sum_k t_k E_k`.
pub(crate) const PACKED_BASIS: [Mat3; 5] = [
    [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]],
    [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]],
    [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
    [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
];

/// Coefficients `G[k][b]` with `g_j(v)_k = sum_b G[k][b] v_b` for the packed
/// stress flux along `axis` (rows 0..5 deviatoric, row 5 bulk), without the
/// `1/eps` factors.
pub(crate) fn stress_flux_coefficients(axis: usize) -> [[f64; 3]; 6] {
    let mut g = [[0.0; 3]; 6];
    for (k, &(a, b)) in PACKED_INDICES.iter().enumerate() {
        if axis == a {
            g[k][b] += 1.0;
        }
        if axis == b {
            g[k][a] += 1.0;
        }
        if a == b {
            g[k][axis] -= 2.0 / 3.0;
        }
    }
    g[5][axis] = 1.0;
    g
}

/// Physical flux of the full system along `axis`. Assumes `u[0] > 0`.
#[inline]
pub fn axis_flux(u: &[f64; NVARS], axis: usize, p: &PhysParams, coupling: Coupling) -> [f64; NVARS] {
    axis_flux_speed(u, axis, p, coupling).0
}

/// [`axis_flux`] together with [`speed_bound`] for the same state, sharing
/// the pressure evaluation.
#[inline]
pub fn axis_flux_speed(
    u: &[f64; NVARS],
    axis: usize,
    p: &PhysParams,
    coupling: Coupling,
) -> ([f64; NVARS], f64) {
    let rho = u[0];
    let inv_rho = 1.0 / rho;
    let m = [u[1], u[2], u[3]];
    let v = [m[0] * inv_rho, m[1] * inv_rho, m[2] * inv_rho];
    let vd = v[axis];
    let pres = gamma_power(rho, p) * p.eos_a;
    let c2 = p.eos_gamma * pres * inv_rho;

    let mut f = [0.0; NVARS];
    f[0] = m[axis];
    for i in 0..3 {
        f[1 + i] = m[i] * vd;
    }
    f[1 + axis] += pres;

    let beta = match coupling {
        Coupling::Off => 0.0,
        Coupling::On => {
            let inv1 = 1.0 / p.eps1;
            let inv2 = 1.0 / p.eps2;
            let (xx, yy, xy, xz, yz) = (u[4], u[5], u[6], u[7], u[8]);
            // Column `axis` of the reconstructed deviatoric tensor.
            let col = match axis {
                0 => [xx, xy, xz],
                1 => [xy, yy, yz],
                _ => [xz, yz, -(xx + yy)],
            };
            for i in 0..3 {
                f[1 + i] += col[i] * inv1;
            }
            f[1 + axis] += u[9] * inv2;

            let two_thirds = 2.0 / 3.0 * vd;
            // e_j (x) v + v (x) e_j - 2/3 v_j I, packed as (xx, yy, xy, xz, yz)
            let (sxx, syy, sxy, sxz, syz) = match axis {
                0 => (2.0 * v[0] - two_thirds, -two_thirds, v[1], v[2], 0.0),
                1 => (-two_thirds, 2.0 * v[1] - two_thirds, v[0], 0.0, v[2]),
                _ => (-two_thirds, -two_thirds, 0.0, v[0], v[1]),
            };
            f[4] = sxx * inv1;
            f[5] = syy * inv1;
            f[6] = sxy * inv1;
            f[7] = sxz * inv1;
            f[8] = syz * inv1;
            f[9] = vd * inv2;
            p.coupling_strength()
        }
    };
    (f, vd.abs() + (c2 + beta * inv_rho).sqrt())
}

/// `rho^gamma`, avoiding `powf` for the common integer exponents.
#[inline]
pub(crate) fn gamma_power(rho: f64, p: &PhysParams) -> f64 {
    if p.eos_gamma == 2.0 {
        rho * rho
    } else if p.eos_gamma == 3.0 {
        rho * rho * rho
    } else {
        rho.powf(p.eos_gamma)
    }
}

/// Upper bound on the characteristic speeds of the system along an axis
/// whose normal velocity is `vn`:
///
/// ```text
/// |vn| + sqrt(p'(rho) + ((4/3)/eps1^2 + 1/eps2^2) / rho)
/// ```
///
/// Along a direction the spectrum splits into a longitudinal cubic
/// `(l - vn)^2 l - c^2 l - (beta/rho)(l - vn) = 0`, two transverse quadratics
/// `l^2 - vn l - 1/(rho eps1^2) = 0` and zeros. All roots lie inside the bound,
/// which is attained when `vn = 0`.
#[inline]
pub fn speed_bound(rho: f64, vn: f64, p: &PhysParams, coupling: Coupling) -> f64 {
    let c2 = p.eos_a * p.eos_gamma * gamma_power(rho, p) / rho;
    let beta = match coupling {
        Coupling::On => p.coupling_strength(),
        Coupling::Off => 0.0,
    };
    vn.abs() + (c2 + beta / rho).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{dev_sym, SymTraceless3};

    #[test]
    fn packed_basis_reconstructs_matrix() {
        let t = SymTraceless3::from_components([0.3, -0.2, 0.7, 0.1, -0.4]);
        let mut m = [[0.0; 3]; 3];
        for (k, c) in t.components().iter().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += c * PACKED_BASIS[k][i][j];
                }
            }
        }
        assert_eq!(m, t.to_matrix());
    }

    #[test]
    fn stress_flux_is_dev_sym_of_outer_product() {
        let v = [0.3, -1.1, 0.6];
        for axis in 0..3 {
            // grad v = e_axis (x) v: row `axis` holds v.
            let mut grad = [[0.0; 3]; 3];
            grad[axis] = v;
            let expect = dev_sym(&grad).components();
            let g = stress_flux_coefficients(axis);
            for k in 0..5 {
                let got: f64 = (0..3).map(|b| g[k][b] * v[b]).sum();
                assert!((got - expect[k]).abs() < 1e-15);
            }
            let u = [1.0, v[0], v[1], v[2], 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
            let p = PhysParams::default().with_eps(1.0);
            let f = axis_flux(&u, axis, &p, Coupling::On);
            for k in 0..5 {
                assert!((f[4 + k] - expect[k]).abs() < 1e-15);
            }
            assert_eq!(f[9], v[axis]);
        }
    }

    #[test]
    fn decoupled_flux_is_euler() {
        let u = [2.0, 1.0, 0.5, 0.0, 0.3, 0.1, 0.2, 0.0, 0.4, 0.9];
        let p = PhysParams::default();
        let f = axis_flux(&u, 0, &p, Coupling::Off);
        assert_eq!(f[0], 1.0);
        assert_eq!(f[1], 0.5 + 4.0);
        assert_eq!(f[2], 0.25);
        assert!(f[4..].iter().all(|&x| x == 0.0));
    }
}
