//! Initial data and the relaxation-versus-Navier-Stokes comparison pipeline.

use std::f64::consts::PI;

use crate::diagnostics::{error_vs_reference, fit_rate, ErrorSeries, RateFit};
use crate::error::{Error, Result};
use crate::field::{NSField, RelaxField};
use crate::grid::Grid;
use crate::ns_solver::{ns_run, NSConfig, NSTrajectory};
use crate::params::PhysParams;
use crate::reduce::pairwise_sum_by;
use crate::relax_solver::{run, SolverConfig, Trajectory};
use crate::state::{FlowState, RelaxState, NVARS};

/// `rho = rho0 + rho_amp sin(2 pi k.x)`, `v_i = vel_amp sin(2 pi k.x + phase_i)`.
///
/// Relaxation runs start from the closure stresses of this velocity, so the
/// data is well prepared for every `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    pub rho0: f64,
    pub rho_amp: f64,
    pub vel_amp: f64,
    pub wavevector: [i32; 3],
    pub phases: [f64; 3],
}

impl Default for InitialCondition {
    fn default() -> Self {
        Self {
            rho0: 1.0,
            rho_amp: 0.1,
            vel_amp: 0.0,
            wavevector: [1, 0, 0],
            phases: [0.0; 3],
        }
    }
}

impl InitialCondition {
    pub fn flow_at(&self, x: [f64; 3]) -> FlowState {
        let k = self.wavevector;
        let arg = 2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2]);
        let rho = self.rho0 + self.rho_amp * arg.sin();
        let v = self.phases.map(|ph| self.vel_amp * (arg + ph).sin());
        FlowState {
            rho,
            mom: v.map(|vi| rho * vi),
        }
    }

    /// Smallest density the profile reaches.
    pub fn min_density(&self) -> f64 {
        self.rho0 - self.rho_amp.abs()
    }

    pub fn ns_field(&self, grid: Grid, p: &PhysParams) -> Result<NSField> {
        NSField::from_fn(grid, p, |x| self.flow_at(x))
    }

    /// `(rho, rho v, tau1_ce, tau2_ce)` at `t = 0`.
    pub fn relax_field(&self, grid: Grid, p: &PhysParams) -> Result<RelaxField> {
        Ok(self.ns_field(grid, p)?.to_relax_field())
    }
}

/// Everything needed to compare relaxation runs with the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSetup {
    pub grid: Grid,
    pub initial: InitialCondition,
    /// Flow parameters; `eps1`, `eps2` are replaced per run.
    pub params: PhysParams,
    pub relax: SolverConfig,
    pub ns: NSConfig,
    pub norm_order: usize,
}

impl ComparisonSetup {
    /// Parameters with both relaxation scales set to `eps`.
    pub fn params_at(&self, eps: f64) -> PhysParams {
        self.params.with_eps(eps)
    }

    /// The reference run. It does not depend on `eps`; its closure stresses
    /// are attached for `self.params`.
    pub fn reference(&self) -> Result<NSTrajectory> {
        let init = self.initial.ns_field(self.grid, &self.params)?;
        let traj = ns_run(&init, &self.ns, &self.params)?;
        match traj.failure {
            Some(v) => Err(Error::State(v)),
            None => Ok(traj),
        }
    }

    /// Relaxation run at `eps`, failing on a state violation.
    pub fn relaxation(&self, eps: f64) -> Result<Trajectory> {
        let p = self.params_at(eps);
        let traj = run(&self.initial.relax_field(self.grid, &p)?, &self.relax, &p)?;
        match traj.failure {
            Some(v) => Err(Error::State(v)),
            None => Ok(traj),
        }
    }

    /// Relaxation run at `eps` and its errors against `reference`.
    pub fn compare(&self, reference: &NSTrajectory, eps: f64) -> Result<ComparisonRun> {
        let trajectory = self.relaxation(eps)?;
        let closure = reference.with_params(&self.params_at(eps))?;
        let errors = error_vs_reference(&trajectory, &closure, self.norm_order)?;
        Ok(ComparisonRun {
            eps,
            trajectory,
            errors,
        })
    }

    /// One reference run, one relaxation run per `eps`, and the rate fit.
    pub fn sweep(&self, eps_list: &[f64]) -> Result<Sweep> {
        let reference = self.reference()?;
        let runs = eps_list
            .iter()
            .map(|&eps| self.compare(&reference, eps))
            .collect::<Result<Vec<_>>>()?;
        let points: Vec<(f64, f64)> = runs.iter().map(|r| (r.eps, r.errors.sup)).collect();
        let fit = fit_rate(&points)?;
        Ok(Sweep {
            reference,
            runs,
            fit,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRun {
    pub eps: f64,
    pub trajectory: Trajectory,
    pub errors: ErrorSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub reference: NSTrajectory,
    pub runs: Vec<ComparisonRun>,
    pub fit: RateFit,
}

impl Sweep {
    pub fn within(&self, band: (f64, f64)) -> bool {
        (band.0..=band.1).contains(&self.fit.slope)
    }
}

/// Averages each block of `2^dim` fine cells onto the grid with half the
/// cells per axis.
pub fn restrict(field: &RelaxField) -> Result<RelaxField> {
    let fine = field.grid();
    let coarse = fine.coarsened()?;
    let dim = fine.dim();
    let weight = 1.0 / (1usize << dim) as f64;
    let cells = (0..coarse.len())
        .map(|i| {
            let c = coarse.coords(i);
            let mut acc = [0.0; NVARS];
            for corner in 0..(1usize << dim) {
                let mut f = [0usize; 3];
                for a in 0..3 {
                    f[a] = if a < dim { 2 * c[a] + ((corner >> a) & 1) } else { 0 };
                }
                let u = field.cells()[fine.index(f[0], f[1], f[2])].to_array();
                for k in 0..NVARS {
                    acc[k] += weight * u[k];
                }
            }
            RelaxState::from_array(&acc)
        })
        .collect();
    RelaxField::new(coarse, cells)
}

/// Root-mean-square over cells and all unknowns of `a - b`.
pub fn rms_difference(a: &RelaxField, b: &RelaxField) -> Result<f64> {
    a.grid().ensure_same(b.grid())?;
    let (ca, cb) = (a.cells(), b.cells());
    let sum = pairwise_sum_by(ca.len(), |i| {
        let (x, y) = (ca[i].to_array(), cb[i].to_array());
        (0..NVARS).map(|k| (x[k] - y[k]).powi(2)).sum::<f64>()
    });
    Ok((sum / ca.len() as f64).sqrt())
}

/// Observed order from solutions on three grids, each refining the previous
/// by two: `log2(|u_c - R u_m| / |u_m - R u_f|)`, with both differences.
pub fn richardson_order(coarse: &RelaxField, mid: &RelaxField, fine: &RelaxField) -> Result<(f64, f64, f64)> {
    let e1 = rms_difference(coarse, &restrict(mid)?)?;
    let e2 = rms_difference(mid, &restrict(fine)?)?;
    Ok(((e1 / e2).log2(), e1, e2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_profile() {
        let ic = InitialCondition::default();
        let s = ic.flow_at([0.25, 0.0, 0.0]);
        assert!((s.rho - 1.1).abs() < 1e-15);
        assert_eq!(s.mom, [0.0; 3]);
        assert!((ic.min_density() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn velocity_phases() {
        let ic = InitialCondition {
            vel_amp: 0.2,
            phases: [0.0, PI / 2.0, PI],
            ..Default::default()
        };
        let s = ic.flow_at([0.0; 3]);
        assert!((s.mom[1] - 0.2).abs() < 1e-15);
        assert!(s.mom[0].abs() < 1e-15 && s.mom[2].abs() < 1e-15);
    }

    #[test]
    fn restriction_preserves_means() {
        let g = Grid::new_2d(16, 8).unwrap();
        let f = RelaxField::from_fn(g, |x| RelaxState {
            rho: 1.0 + x[0] * x[1],
            ..Default::default()
        });
        let r = restrict(&f).unwrap();
        assert_eq!(r.grid().cells(), [8, 4, 1]);
        assert!((r.total_mass() - f.total_mass()).abs() < 1e-15);
    }

    #[test]
    fn richardson_on_exact_quadratic_error() {
        // Cell data of a smooth profile plus a synthetic h^2 error.
        let field = |n: usize| {
            let g = Grid::new_1d(n).unwrap();
            let h = 1.0 / n as f64;
            RelaxField::from_fn(g, |x| {
                RelaxState::at_rest(2.0 + (2.0 * PI * x[0]).sin() + h * h * (2.0 * PI * x[0]).cos())
            })
        };
        let (order, _, _) = richardson_order(&field(64), &field(128), &field(256)).unwrap();
        assert!((order - 2.0).abs() < 0.05, "{order}");
    }
}
