//! Numerical certificate of the entropy-dissipation structure.
//!
//! Writing `U = (w, z)` with `w = (rho, m)` and `z = (tau1, tau2)` (packed,
//! six components), the system reads
//!
//! ```text
//! w_t + sum_j f_j(w)_{x_j} + sum_j C_j E z_{x_j} = 0
//! z_t + sum_j E g_j(w)_{x_j}                   = -E^2 S z
//! ```
//!
//! where `E = diag(1/eps1 (x5), 1/eps2)`, `C_j` is constant and
//! `S = diag(1/nu (x5), 1/kappa)`. With `D = eta_ww` and `H = eta_zz` from the
//! entropy Hessian, the checks are: `D A_j` symmetric, `eta_UU` positive
//! definite, and `D C_j = B_j^T H` where `A_j = f_j'(w)`, `B_j = g_j'(w)`.

use std::fmt;
use std::io::{self, Write};

use nalgebra::{SMatrix, SVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eos;
use crate::error::{Error, Result};
use crate::params::PhysParams;
use crate::state::{FlowState, RelaxState, NFLOW, NVARS};
use crate::system::{self, Coupling, PACKED_BASIS};
use crate::tensor::{dot, Vec3};

pub type Mat4 = SMatrix<f64, NFLOW, NFLOW>;
pub type Mat6x4 = SMatrix<f64, 6, NFLOW>;
pub type Mat4x6 = SMatrix<f64, NFLOW, 6>;
pub type Mat6 = SMatrix<f64, 6, 6>;
pub type Mat10 = SMatrix<f64, NVARS, NVARS>;

/// Multiplier applied to the characteristic-speed bound for time-step control.
pub const WAVESPEED_SAFETY: f64 = 1.2;

/// The quasilinear blocks of the system at one flow state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasilinearSystem {
    /// Flow flux Jacobians `A_j = df_j/dw`.
    pub a: [Mat4; 3],
    /// Stress flux Jacobians `B_j = dg_j/dw`, without `1/eps`.
    pub b: [Mat6x4; 3],
    /// Constant coupling matrices `C_j`, without `1/eps`.
    pub c: [Mat4x6; 3],
    /// Diagonal of the relaxation matrix `S`.
    pub s: SVector<f64, 6>,
    pub eps1: f64,
    pub eps2: f64,
}

impl QuasilinearSystem {
    pub fn at(w: &FlowState, p: &PhysParams) -> Result<Self> {
        let c2 = eos::pressure_deriv(w.rho, p)?;
        let v = w.velocity();
        let a = [0, 1, 2].map(|j| euler_jacobian(&v, c2, j));
        let dv_dw = velocity_jacobian(w.rho, &v);
        let b = [0, 1, 2].map(|j| {
            let g = system::stress_flux_coefficients(j);
            let g = SMatrix::<f64, 6, 3>::from_fn(|r, c| g[r][c]);
            g * dv_dw
        });
        let mut s = SVector::<f64, 6>::from_element(1.0 / p.nu);
        s[5] = 1.0 / p.kappa;
        Ok(Self {
            a,
            b,
            c: [0, 1, 2].map(coupling_matrix),
            s,
            eps1: p.eps1,
            eps2: p.eps2,
        })
    }

    /// `diag(1/eps1 (x5), 1/eps2)`.
    fn eps_scaling(&self) -> Mat6 {
        let mut e = SVector::<f64, 6>::from_element(1.0 / self.eps1);
        e[5] = 1.0 / self.eps2;
        Mat6::from_diagonal(&e)
    }
}

/// Isentropic Euler flux Jacobian along `axis` in conservative variables.
fn euler_jacobian(v: &Vec3, c2: f64, axis: usize) -> Mat4 {
    let mut a = Mat4::zeros();
    a[(0, 1 + axis)] = 1.0;
    for i in 0..3 {
        a[(1 + i, 0)] = -v[i] * v[axis];
        a[(1 + i, 1 + i)] += v[axis];
        a[(1 + i, 1 + axis)] += v[i];
    }
    a[(1 + axis, 0)] += c2;
    a
}

/// `dv/dw` for `v = m / rho`.
fn velocity_jacobian(rho: f64, v: &Vec3) -> SMatrix<f64, 3, NFLOW> {
    SMatrix::<f64, 3, NFLOW>::from_fn(|b, c| match c {
        0 => -v[b] / rho,
        _ if c - 1 == b => 1.0 / rho,
        _ => 0.0,
    })
}

/// `C_j`: derivative of the stress part of the momentum flux with respect to
/// the packed stresses.
pub fn coupling_matrix(axis: usize) -> Mat4x6 {
    let mut c = Mat4x6::zeros();
    for i in 0..3 {
        for k in 0..5 {
            c[(1 + i, k)] = PACKED_BASIS[k][i][axis];
        }
    }
    c[(1 + axis, 5)] = 1.0;
    c
}

/// Directional flux Jacobian `M(xi) = sum_j xi_j dF_j/dU` with block
/// structure `[[A(xi), C(xi) E], [E B(xi), 0]]`.
pub fn assemble(w: &FlowState, dir: &Vec3, p: &PhysParams) -> Result<Mat10> {
    assemble_with(w, dir, p, Coupling::On)
}

pub fn assemble_with(w: &FlowState, dir: &Vec3, p: &PhysParams, coupling: Coupling) -> Result<Mat10> {
    let q = QuasilinearSystem::at(w, p)?;
    let e = q.eps_scaling();
    let mut m = Mat10::zeros();
    for j in 0..3 {
        if dir[j] == 0.0 {
            continue;
        }
        let mut blk = m.fixed_view_mut::<NFLOW, NFLOW>(0, 0);
        blk += q.a[j] * dir[j];
        if coupling == Coupling::On {
            let mut blk = m.fixed_view_mut::<NFLOW, 6>(0, NFLOW);
            blk += q.c[j] * e * dir[j];
            let mut blk = m.fixed_view_mut::<6, NFLOW>(NFLOW, 0);
            blk += e * q.b[j] * dir[j];
        }
    }
    Ok(m)
}

/// Constant Hessian of `2 tau2^2 + |tau1|^2` in the packed variables.
pub fn stress_hessian() -> Mat6 {
    let mut h = Mat6::zeros();
    // |tau1|^2 = xx^2 + yy^2 + (xx + yy)^2 + 2 (xy^2 + xz^2 + yz^2)
    h[(0, 0)] = 4.0;
    h[(1, 1)] = 4.0;
    h[(0, 1)] = 2.0;
    h[(1, 0)] = 2.0;
    for k in 2..5 {
        h[(k, k)] = 4.0;
    }
    h[(5, 5)] = 4.0;
    h
}

/// Hessian of `4 Phi(rho) + 2 |m|^2 / rho` with respect to `(rho, m)`.
pub fn flow_hessian(w: &FlowState, p: &PhysParams) -> Result<Mat4> {
    let rho = w.rho;
    let phi2 = eos::phi_second(rho, p)?;
    let m = w.mom;
    let mut d = Mat4::zeros();
    d[(0, 0)] = 4.0 * phi2 + 4.0 * dot(&m, &m) / (rho * rho * rho);
    for i in 0..3 {
        let off = -4.0 * m[i] / (rho * rho);
        d[(0, 1 + i)] = off;
        d[(1 + i, 0)] = off;
        d[(1 + i, 1 + i)] = 4.0 / rho;
    }
    Ok(d)
}

/// Hessian of the entropy in `(rho, m, tau1 packed, tau2)`. Block diagonal:
/// the flow block depends on `(rho, m)`, the stress block is constant.
pub fn entropy_hessian(u: &RelaxState, p: &PhysParams) -> Result<Mat10> {
    let mut h = Mat10::zeros();
    h.fixed_view_mut::<NFLOW, NFLOW>(0, 0)
        .copy_from(&flow_hessian(&u.flow(), p)?);
    h.fixed_view_mut::<6, 6>(NFLOW, NFLOW)
        .copy_from(&stress_hessian());
    Ok(h)
}

/// Bound on the spectral radius of `M(xi)` over all unit `xi`, including the
/// safety factor [`WAVESPEED_SAFETY`]. Scales like `1/eps` as `eps -> 0`.
pub fn max_wavespeed(u: &RelaxState, p: &PhysParams) -> Result<f64> {
    max_wavespeed_with(u, p, Coupling::On)
}

pub fn max_wavespeed_with(u: &RelaxState, p: &PhysParams, coupling: Coupling) -> Result<f64> {
    if !(u.rho > 0.0) {
        return Err(Error::Domain { rho: u.rho });
    }
    let speed = dot(&u.mom, &u.mom).sqrt() / u.rho;
    Ok(WAVESPEED_SAFETY * system::speed_bound(u.rho, speed, p, coupling))
}

/// Residuals of the structural identities at one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    pub index: usize,
    pub rho: f64,
    /// `false` when the sample is outside the state domain; the residuals
    /// are then NaN.
    pub valid: bool,
    /// `max_j |D A_j - (D A_j)^T|_F`.
    pub symmetry_residual: f64,
    /// Smallest eigenvalue of the entropy Hessian.
    pub min_eigenvalue: f64,
    /// `max_j |D C_j - B_j^T H|_F`.
    pub identity_residual: f64,
    /// `max_j |P M(e_j) - (P M(e_j))^T|_F` with `P = blockdiag(D, H)`.
    pub system_residual: f64,
    pub passed: bool,
}

/// Aggregate of [`check_structure`].
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub tol: f64,
    pub samples: Vec<SampleReport>,
    pub worst_symmetry: f64,
    pub worst_identity: f64,
    pub worst_system: f64,
    pub min_eigenvalue: f64,
    pub invalid: usize,
    pub passed: bool,
}

impl StructureReport {
    pub const CSV_HEADER: &'static str =
        "sample,rho,valid,symmetry_residual,min_eigenvalue,identity_residual,system_residual,pass";

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for s in &self.samples {
            writeln!(
                out,
                "{},{:e},{},{:e},{:e},{:e},{:e},{}",
                s.index,
                s.rho,
                s.valid,
                s.symmetry_residual,
                s.min_eigenvalue,
                s.identity_residual,
                s.system_residual,
                s.passed
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for StructureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "structure {}: {} samples ({} invalid), tol {:e}, worst symmetry {:e}, worst identity {:e}, worst system {:e}, min eigenvalue {:e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.samples.len(),
            self.invalid,
            self.tol,
            self.worst_symmetry,
            self.worst_identity,
            self.worst_system,
            self.min_eigenvalue
        )
    }
}

/// Runs the three structural checks on every sample with tolerance `tol`.
pub fn check_structure(samples: &[RelaxState], p: &PhysParams, tol: f64) -> StructureReport {
    check_structure_with(samples, p, tol, 0.0)
}

/// As [`check_structure`], adding `c_perturbation` to one entry of every
/// `C_j` (the `m_j`/`tau1_xx` coupling). Nonzero values are a negative
/// control: the identity `D C_j = B_j^T H` must then fail.
pub fn check_structure_with(
    samples: &[RelaxState],
    p: &PhysParams,
    tol: f64,
    c_perturbation: f64,
) -> StructureReport {
    let h = stress_hessian();
    let rows: Vec<SampleReport> = samples
        .iter()
        .enumerate()
        .map(|(index, u)| match sample_residuals(u, p, &h, c_perturbation) {
            Ok((sym, min_eig, ident, system)) => SampleReport {
                index,
                rho: u.rho,
                valid: true,
                symmetry_residual: sym,
                min_eigenvalue: min_eig,
                identity_residual: ident,
                system_residual: system,
                passed: sym <= tol && ident <= tol && min_eig > 0.0,
            },
            Err(_) => SampleReport {
                index,
                rho: u.rho,
                valid: false,
                symmetry_residual: f64::NAN,
                min_eigenvalue: f64::NAN,
                identity_residual: f64::NAN,
                system_residual: f64::NAN,
                passed: false,
            },
        })
        .collect();

    let valid = || rows.iter().filter(|r| r.valid);
    let worst = |f: fn(&SampleReport) -> f64| valid().map(f).fold(0.0, f64::max);
    let invalid = rows.iter().filter(|r| !r.valid).count();
    StructureReport {
        tol,
        worst_symmetry: worst(|r| r.symmetry_residual),
        worst_identity: worst(|r| r.identity_residual),
        worst_system: worst(|r| r.system_residual),
        min_eigenvalue: valid().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min),
        invalid,
        passed: !rows.is_empty() && rows.iter().all(|r| r.passed),
        samples: rows,
    }
}

fn sample_residuals(
    u: &RelaxState,
    p: &PhysParams,
    h: &Mat6,
    c_perturbation: f64,
) -> Result<(f64, f64, f64, f64)> {
    if !(u.rho > 0.0) {
        return Err(Error::Domain { rho: u.rho });
    }
    let w = u.flow();
    let q = QuasilinearSystem::at(&w, p)?;
    let d = flow_hessian(&w, p)?;
    let hess = entropy_hessian(u, p)?;
    let min_eig = SymmetricEigen::new(hess).eigenvalues.min();

    let mut sym: f64 = 0.0;
    let mut ident: f64 = 0.0;
    let mut system: f64 = 0.0;
    for j in 0..3 {
        let da = d * q.a[j];
        sym = sym.max((da - da.transpose()).norm());

        let mut c = q.c[j];
        c[(1 + j, 0)] += c_perturbation;
        ident = ident.max((d * c - q.b[j].transpose() * h).norm());

        let mut dir = [0.0; 3];
        dir[j] = 1.0;
        let m = assemble(&w, &dir, p)?;
        let pm = hess * m;
        system = system.max((pm - pm.transpose()).norm());
    }
    Ok((sym, min_eig, ident, system))
}

/// Reproducible random states with `rho in [0.5, 2]`, `|v| <= 1` and every
/// stress component in `[-1, 1]`.
pub fn sample_states(n: usize, seed: u64) -> Vec<RelaxState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let rho = rng.gen_range(0.5..=2.0);
            let v = loop {
                let v: Vec3 = [0.0; 3].map(|_| rng.gen_range(-1.0..=1.0));
                if dot(&v, &v) <= 1.0 {
                    break v;
                }
            };
            RelaxState {
                rho,
                mom: v.map(|c| rho * c),
                tau1: crate::tensor::SymTraceless3::from_components(
                    [0.0; 5].map(|_| rng.gen_range(-1.0..=1.0)),
                ),
                tau2: rng.gen_range(-1.0..=1.0),
            }
        })
        .collect()
}
