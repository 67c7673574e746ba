//! Reference isentropic Navier-Stokes solver and the Chapman-Enskog stresses
//! built from its velocity.
//!
//! The convective part uses the same reconstruction and local Lax-Friedrichs
//! machinery as [`crate::relax_solver`]. The viscous stress
//!
//! ```text
//! sigma = -nu (grad v + grad v^T - 2/3 div v I) - kappa div v I
//! ```
//!
//! is formed at cell centres from central differences and then differenced
//! centrally again, which is the operator the relaxation scheme reduces to
//! on the equilibrium manifold. Nothing here depends on `eps`: only the
//! attached closure stresses do.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::NSField;
use crate::fv::{accumulate_axis, in_pool, central_gradient, Reconstruction, Scratch, PAR_CHUNK};
use crate::grid::Grid;
use crate::params::PhysParams;
use crate::relax_solver::{next_step, uniform_schedule, validate_schedule};
use crate::state::{check_density, FlowState, StateViolation, DEFAULT_DENSITY_FLOOR, NFLOW};
use crate::system::gamma_power;
use crate::tensor::{dev_sym, trace, Mat3, SymTraceless3, Vec3};

pub type Flow = [f64; NFLOW];

/// Controls for [`ns_run`].
#[derive(Debug, Clone, PartialEq)]
pub struct NSConfig {
    pub cfl_advective: f64,
    /// Fraction of the explicit diffusive limit `rho / ((4/3 nu + kappa) sum_d dx_d^-2)`.
    pub viscous_factor: f64,
    pub reconstruction: Reconstruction,
    pub t_end: f64,
    pub snapshots: Vec<f64>,
    pub density_floor: f64,
}

impl NSConfig {
    pub fn new(t_end: f64, count: usize) -> Self {
        Self {
            cfl_advective: 0.45,
            viscous_factor: 1.5,
            reconstruction: Reconstruction::default(),
            t_end,
            snapshots: uniform_schedule(t_end, count),
            density_floor: DEFAULT_DENSITY_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_advective > 0.0 && self.cfl_advective < 1.0) {
            return Err(Error::Param {
                name: "cfl_advective",
                reason: format!("must lie in (0, 1), got {}", self.cfl_advective),
            });
        }
        if !(self.viscous_factor > 0.0 && self.viscous_factor <= 1.8) {
            return Err(Error::Param {
                name: "viscous_factor",
                reason: format!("must lie in (0, 1.8], got {}", self.viscous_factor),
            });
        }
        validate_schedule(self.t_end, &self.snapshots)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NSSnapshot {
    pub time: f64,
    pub field: NSField,
}

/// Output of [`ns_run`]. Every snapshot carries the closure stresses for
/// `params`; [`NSTrajectory::with_params`] recomputes them for other scales.
#[derive(Debug, Clone, PartialEq)]
pub struct NSTrajectory {
    pub grid: Grid,
    pub params: PhysParams,
    pub snapshots: Vec<NSSnapshot>,
    pub dt: Vec<f64>,
    pub failure: Option<StateViolation>,
}

impl NSTrajectory {
    pub fn steps(&self) -> usize {
        self.dt.len()
    }

    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    /// The same flow with closure stresses for different `eps1`, `eps2`.
    /// `nu`, `kappa` and the pressure law must be unchanged.
    pub fn with_params(&self, params: &PhysParams) -> Result<Self> {
        let same_flow = params.nu == self.params.nu
            && params.kappa == self.params.kappa
            && params.eos_a == self.params.eos_a
            && params.eos_gamma == self.params.eos_gamma;
        if !same_flow {
            return Err(Error::Param {
                name: "params",
                reason: "only eps1 and eps2 may differ from the run parameters".into(),
            });
        }
        let snapshots = self
            .snapshots
            .par_iter()
            .map(|s| {
                Ok(NSSnapshot {
                    time: s.time,
                    field: s.field.with_params(params)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: *params,
            snapshots,
            ..self.clone()
        })
    }
}

/// `tau1 = -eps1 nu dev_sym(grad v)` and `tau2 = -eps2 kappa div v`, with
/// gradients by second-order central differences.
pub fn ce_closure(
    velocity: &[Vec3],
    grid: &Grid,
    p: &PhysParams,
) -> Result<(Vec<SymTraceless3>, Vec<f64>)> {
    if velocity.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} velocities for a grid of {} cells",
            velocity.len(),
            grid.len()
        )));
    }
    let mut grad = Vec::new();
    central_gradient(velocity, grid, &mut grad);
    let s1 = -p.eps1 * p.nu;
    let s2 = -p.eps2 * p.kappa;
    Ok(grad
        .par_iter()
        .with_min_len(PAR_CHUNK)
        .map(|g| (dev_sym(g).scale(s1), s2 * trace(g)))
        .unzip())
}

/// Viscous stress `sigma` at every cell from the velocity gradients.
fn viscous_stress(grad: &[Mat3], p: &PhysParams, out: &mut Vec<Mat3>) {
    out.resize(grad.len(), [[0.0; 3]; 3]);
    out.par_iter_mut()
        .with_min_len(PAR_CHUNK)
        .zip(grad.par_iter())
        .for_each(|(s, g)| {
            let mut m = dev_sym(g).scale(-p.nu).to_matrix();
            let bulk = -p.kappa * trace(g);
            for a in 0..3 {
                m[a][a] += bulk;
            }
            *s = m;
        });
}

fn euler_flux_speed(w: &Flow, axis: usize, p: &PhysParams) -> (Flow, f64) {
    let rho = w[0];
    let vd = w[1 + axis] / rho;
    let pres = p.eos_a * gamma_power(rho, p);
    let mut f = [w[1 + axis], w[1] * vd, w[2] * vd, w[3] * vd];
    f[1 + axis] += pres;
    (f, vd.abs() + (p.eos_gamma * pres / rho).sqrt())
}

#[derive(Default)]
struct Buffers {
    scratch: Scratch<NFLOW>,
    velocity: Vec<Vec3>,
    grad: Vec<Mat3>,
    stress: Vec<Mat3>,
}

fn tendency(
    w: &[Flow],
    grid: &Grid,
    p: &PhysParams,
    recon: Reconstruction,
    floor: f64,
    buf: &mut Buffers,
    tend: &mut [Flow],
) -> Result<(), StateViolation> {
    if let Some((i, c)) = w.iter().enumerate().find(|(_, c)| !(c[0] >= floor)) {
        check_density(c[0], floor, i)?;
    }
    tend.iter_mut().for_each(|t| *t = [0.0; NFLOW]);
    for axis in 0..grid.dim() {
        accumulate_axis(
            w,
            grid,
            axis,
            recon,
            &mut buf.scratch,
            |i, l, r| {
                check_density(l[0], floor, i)?;
                check_density(r[0], floor, grid.shift(i, axis, 1))?;
                let (fl, sl) = euler_flux_speed(l, axis, p);
                let (fr, sr) = euler_flux_speed(r, axis, p);
                let lam = sl.max(sr);
                let mut f = [0.0; NFLOW];
                for k in 0..NFLOW {
                    f[k] = 0.5 * (fl[k] + fr[k]) - 0.5 * lam * (r[k] - l[k]);
                }
                Ok(f)
            },
            tend,
        )?;
    }

    buf.velocity.clear();
    buf.velocity
        .extend(w.iter().map(|c| [c[1] / c[0], c[2] / c[0], c[3] / c[0]]));
    central_gradient(&buf.velocity, grid, &mut buf.grad);
    viscous_stress(&buf.grad, p, &mut buf.stress);
    let stress = &buf.stress;
    let dim = grid.dim();
    let dx = grid.dx();
    tend.par_iter_mut()
        .with_min_len(PAR_CHUNK)
        .enumerate()
        .for_each(|(i, t)| {
            for a in 0..dim {
                let sp = &stress[grid.shift(i, a, 1)];
                let sm = &stress[grid.shift(i, a, -1)];
                let inv = 0.5 / dx[a];
                for b in 0..3 {
                    t[1 + b] -= (sp[a][b] - sm[a][b]) * inv;
                }
            }
        });
    Ok(())
}

/// Tendency `-div(rho v (x) v + p I + sigma)` and `-div(rho v)` of the
/// Navier-Stokes equations.
pub fn ns_rhs(
    field: &NSField,
    p: &PhysParams,
    recon: Reconstruction,
    floor: f64,
) -> Result<Vec<Flow>> {
    field.validate(floor)?;
    let w: Vec<Flow> = field.cells().iter().map(FlowState::to_array).collect();
    let mut tend = vec![[0.0; NFLOW]; w.len()];
    tendency(&w, field.grid(), p, recon, floor, &mut Buffers::default(), &mut tend)?;
    Ok(tend)
}

/// `min(advective, viscous)` stable step for the field.
pub fn ns_stable_dt(field: &NSField, p: &PhysParams, cfg: &NSConfig) -> Result<f64> {
    let w: Vec<Flow> = field.cells().iter().map(FlowState::to_array).collect();
    stable_dt(&w, field.grid(), p, cfg).map_err(Error::State)
}

fn stable_dt(w: &[Flow], grid: &Grid, p: &PhysParams, cfg: &NSConfig) -> Result<f64, StateViolation> {
    let (lam, rho_min) = w.iter().enumerate().try_fold((0.0f64, f64::INFINITY), |(lam, rmin), (i, c)| {
        check_density(c[0], f64::MIN_POSITIVE, i)?;
        let v = (c[1] * c[1] + c[2] * c[2] + c[3] * c[3]).sqrt() / c[0];
        let cs = (p.eos_a * p.eos_gamma * gamma_power(c[0], p) / c[0]).sqrt();
        Ok((lam.max(v + cs), rmin.min(c[0])))
    })?;
    let dims = &grid.dx()[..grid.dim()];
    let inv_dx: f64 = dims.iter().map(|d| 1.0 / d).sum();
    let inv_dx2: f64 = dims.iter().map(|d| 1.0 / (d * d)).sum();
    let adv = cfg.cfl_advective / (lam * inv_dx);
    let visc = cfg.viscous_factor * rho_min / ((4.0 / 3.0 * p.nu + p.kappa) * inv_dx2);
    Ok(adv.min(visc))
}

fn to_field(grid: &Grid, w: &[Flow], p: &PhysParams) -> Result<NSField> {
    NSField::new(*grid, w.iter().map(FlowState::from_array).collect(), p)
}

/// Advances `init` with SSP-RK2 to `cfg.t_end`, landing on every snapshot
/// time. Each snapshot carries [`ce_closure`] of its velocity.
pub fn ns_run(init: &NSField, cfg: &NSConfig, p: &PhysParams) -> Result<NSTrajectory> {
    in_pool(|| ns_run_inner(init, cfg, p))
}

fn ns_run_inner(init: &NSField, cfg: &NSConfig, p: &PhysParams) -> Result<NSTrajectory> {
    p.validate()?;
    cfg.validate()?;
    let grid = *init.grid();
    let mut traj = NSTrajectory {
        grid,
        params: *p,
        snapshots: Vec::new(),
        dt: Vec::new(),
        failure: None,
    };
    if let Err(v) = init.validate(cfg.density_floor) {
        traj.failure = Some(v);
        return Ok(traj);
    }
    let init = init.with_params(p)?;

    let mut w: Vec<Flow> = init.cells().iter().map(FlowState::to_array).collect();
    let mut t = 0.0;
    let mut next = 0;
    while next < cfg.snapshots.len() && cfg.snapshots[next] <= t {
        traj.snapshots.push(NSSnapshot {
            time: cfg.snapshots[next],
            field: init.clone(),
        });
        next += 1;
    }

    let n = w.len();
    let mut buf = Buffers::default();
    let mut stage = vec![[0.0; NFLOW]; n];
    let mut tend = vec![[0.0; NFLOW]; n];
    let (recon, floor) = (cfg.reconstruction, cfg.density_floor);
    while t < cfg.t_end {
        let target = cfg.snapshots.get(next).copied().unwrap_or(cfg.t_end);
        let result = stable_dt(&w, &grid, p, cfg).and_then(|dt_max| {
            let (dt, t_next) = next_step(t, dt_max, target);
            tendency(&w, &grid, p, recon, floor, &mut buf, &mut tend)?;
            stage
                .par_iter_mut()
                .with_min_len(PAR_CHUNK)
                .zip(w.par_iter())
                .zip(tend.par_iter())
                .for_each(|((s, c), k)| {
                    for q in 0..NFLOW {
                        s[q] = c[q] + dt * k[q];
                    }
                });
            tendency(&stage, &grid, p, recon, floor, &mut buf, &mut tend)?;
            w.par_iter_mut()
                .with_min_len(PAR_CHUNK)
                .zip(stage.par_iter())
                .zip(tend.par_iter())
                .for_each(|((c, s), k)| {
                    for q in 0..NFLOW {
                        c[q] = 0.5 * (c[q] + s[q] + dt * k[q]);
                    }
                });
            if let Some((i, c)) = w.iter().enumerate().find(|(_, c)| !(c[0] >= floor)) {
                check_density(c[0], floor, i)?;
            }
            Ok((dt, t_next))
        });
        match result {
            Ok((dt, t_next)) => {
                t = t_next;
                traj.dt.push(dt);
            }
            Err(v) => {
                traj.failure = Some(v);
                break;
            }
        }
        if next < cfg.snapshots.len() && t >= cfg.snapshots[next] {
            traj.snapshots.push(NSSnapshot {
                time: t,
                field: to_field(&grid, &w, p)?,
            });
            next += 1;
        }
    }
    Ok(traj)
}
