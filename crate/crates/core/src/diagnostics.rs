//! Discrete norms, relaxation-versus-reference error series, rate fits and
//! the entropy budget of a run.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::RelaxField;
use crate::grid::Grid;
use crate::ns_solver::NSTrajectory;
use crate::reduce::pairwise_sum_by;
use crate::relax_solver::{Snapshot, Trajectory};

/// Discrete Sobolev-type norm of a vector field given as scalar components.
///
/// Order 0 is `sqrt(sum_c sum_i u_c^2 dV)`. Order 1 adds the squared
/// central-difference first derivatives along every active axis, order 2
/// also adds all second derivatives `d_a d_b u` (three-point stencil on the
/// diagonal, composed central differences off it).
pub fn discrete_norm(components: &[&[f64]], grid: &Grid, order: usize) -> Result<f64> {
    if order > 2 {
        return Err(Error::Param {
            name: "norm_order",
            reason: format!("must be 0, 1 or 2, got {order}"),
        });
    }
    if let Some(c) = components.iter().find(|c| c.len() != grid.len()) {
        return Err(Error::GridMismatch(format!(
            "component of length {} for a grid of {} cells",
            c.len(),
            grid.len()
        )));
    }
    let dim = grid.dim();
    let dx = grid.dx();
    let n = grid.len();
    let sum = pairwise_sum_by(n, |i| {
        let mut acc = 0.0;
        for u in components {
            acc += u[i] * u[i];
            if order == 0 {
                continue;
            }
            for a in 0..dim {
                let (p, m) = (grid.shift(i, a, 1), grid.shift(i, a, -1));
                let d = (u[p] - u[m]) / (2.0 * dx[a]);
                acc += d * d;
                if order == 1 {
                    continue;
                }
                for b in 0..dim {
                    let d2 = if a == b {
                        (u[p] - 2.0 * u[i] + u[m]) / (dx[a] * dx[a])
                    } else {
                        let pp = grid.shift(p, b, 1);
                        let pm = grid.shift(p, b, -1);
                        let mp = grid.shift(m, b, 1);
                        let mm = grid.shift(m, b, -1);
                        (u[pp] - u[pm] - u[mp] + u[mm]) / (4.0 * dx[a] * dx[b])
                    };
                    acc += d2 * d2;
                }
            }
        }
        acc
    });
    Ok((sum * grid.cell_volume()).sqrt())
}

/// Differences `a - b` split into the four error groups. The deviatoric
/// stress is expanded so that squared sums give the full Frobenius norm.
struct Differences {
    rho: Vec<f64>,
    mom: [Vec<f64>; 3],
    tau1: [Vec<f64>; 6],
    tau2: Vec<f64>,
}

fn differences(a: &RelaxField, b: &RelaxField) -> Differences {
    let n = a.cells().len();
    let mut d = Differences {
        rho: Vec::with_capacity(n),
        mom: Default::default(),
        tau1: Default::default(),
        tau2: Vec::with_capacity(n),
    };
    let r2 = std::f64::consts::SQRT_2;
    for (x, y) in a.cells().iter().zip(b.cells()) {
        d.rho.push(x.rho - y.rho);
        for k in 0..3 {
            d.mom[k].push(x.mom[k] - y.mom[k]);
        }
        let t = x.tau1 - y.tau1;
        for (k, v) in [t.xx, t.yy, t.zz(), r2 * t.xy, r2 * t.xz, r2 * t.yz]
            .into_iter()
            .enumerate()
        {
            d.tau1[k].push(v);
        }
        d.tau2.push(x.tau2 - y.tau2);
    }
    d
}

/// Norms of the difference between two states at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub time: f64,
    pub rho: f64,
    pub mom: f64,
    pub tau1: f64,
    pub tau2: f64,
    /// Root sum of squares of the four group norms.
    pub total: f64,
}

/// Per-snapshot errors of one relaxation run against its reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub eps: f64,
    pub order: usize,
    pub rows: Vec<ErrorRow>,
    /// Largest `total` over the rows.
    pub sup: f64,
}

impl ErrorSeries {
    pub const CSV_HEADER: &'static str = "epsilon,time,err_rho,err_mom,err_tau1,err_tau2,err_total";

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        self.write_csv_rows(&mut out)
    }

    /// Rows without the header, for concatenating several series.
    pub fn write_csv_rows<W: Write>(&self, mut out: W) -> io::Result<()> {
        for r in &self.rows {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                self.eps, r.time, r.rho, r.mom, r.tau1, r.tau2, r.total
            )?;
        }
        Ok(())
    }
}

/// Error rows between two equally scheduled snapshot lists.
///
/// The result is symmetric in `a` and `b`. Snapshot times must agree to
/// within `1e-12` relative to the final time.
pub fn error_between(eps: f64, a: &[Snapshot], b: &[Snapshot], order: usize) -> Result<ErrorSeries> {
    if a.len() != b.len() {
        return Err(Error::ScheduleMismatch(format!(
            "{} snapshots vs {}",
            a.len(),
            b.len()
        )));
    }
    let scale = a.last().map_or(1.0, |s| s.time.abs().max(1.0));
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        if (x.time - y.time).abs() > 1e-12 * scale {
            return Err(Error::ScheduleMismatch(format!(
                "snapshot {k} at t = {} vs t = {}",
                x.time, y.time
            )));
        }
        x.field.grid().ensure_same(y.field.grid())?;
    }
    let rows = a
        .par_iter()
        .zip(b.par_iter())
        .map(|(x, y)| {
            let grid = x.field.grid();
            let d = differences(&x.field, &y.field);
            let mom: Vec<&[f64]> = d.mom.iter().map(Vec::as_slice).collect();
            let tau1: Vec<&[f64]> = d.tau1.iter().map(Vec::as_slice).collect();
            let rho = discrete_norm(&[&d.rho], grid, order)?;
            let mom = discrete_norm(&mom, grid, order)?;
            let tau1 = discrete_norm(&tau1, grid, order)?;
            let tau2 = discrete_norm(&[&d.tau2], grid, order)?;
            let total = (rho * rho + mom * mom + tau1 * tau1 + tau2 * tau2).sqrt();
            Ok(ErrorRow {
                time: 0.5 * (x.time + y.time),
                rho,
                mom,
                tau1,
                tau2,
                total,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sup = rows.iter().map(|r| r.total).fold(0.0, f64::max);
    Ok(ErrorSeries {
        eps,
        order,
        rows,
        sup,
    })
}

/// Errors of a relaxation run against a Navier-Stokes run with its closure
/// stresses, at every shared snapshot. `ns` must carry the closure for the
/// relaxation run's parameters.
pub fn error_vs_reference(relax: &Trajectory, ns: &NSTrajectory, order: usize) -> Result<ErrorSeries> {
    if relax.params != ns.params {
        return Err(Error::Param {
            name: "params",
            reason: "reference closure was built for different parameters".into(),
        });
    }
    let reference: Vec<Snapshot> = ns
        .snapshots
        .iter()
        .map(|s| Snapshot {
            time: s.time,
            field: s.field.to_relax_field(),
        })
        .collect();
    error_between(relax.params.eps1, &relax.snapshots, &reference, order)
}

/// Least-squares power law `err = K eps^slope` through `(eps, err)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    /// `log K`.
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
}

impl RateFit {
    pub const CSV_HEADER: &'static str = "epsilon,sup_error,slope,intercept,fit_residual";

    /// Empirical constant `K = exp(intercept)`.
    pub fn constant(&self) -> f64 {
        self.intercept.exp()
    }

    /// `err(eps_k) / err(eps_{k+1})` for consecutive points.
    pub fn pairwise_ratios(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| w[0].1 / w[1].1).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for (eps, err) in &self.points {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e}",
                eps, err, self.slope, self.intercept, self.residual
            )?;
        }
        Ok(())
    }
}

/// Ordinary least squares of `log err` against `log eps`.
///
/// Needs at least three points with distinct positive `eps` and positive
/// finite errors.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    for &(eps, err) in points {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::DegenerateFit(format!("eps {eps} is not positive")));
        }
        if !(err > 0.0 && err.is_finite()) {
            return Err(Error::DegenerateFit(format!(
                "error {err} at eps {eps} is not positive"
            )));
        }
    }
    for (i, a) in points.iter().enumerate() {
        if points[i + 1..].iter().any(|b| b.0 == a.0) {
            return Err(Error::DegenerateFit(format!("eps {} repeated", a.0)));
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    if !slope.is_finite() {
        return Err(Error::DegenerateFit("slope is not finite".into()));
    }
    Ok(RateFit {
        points: points.to_vec(),
        slope,
        intercept,
        residual,
    })
}

/// Per-step audit of `dH/dt = D` on a recorded trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyBudget {
    /// `(H_{n+1} - H_n) / dt_n - D_n`.
    pub residuals: Vec<f64>,
    /// `H_{n+1} - H_n`.
    pub increments: Vec<f64>,
    /// Round-off allowance on each increment.
    pub tolerances: Vec<f64>,
    pub max_abs_residual: f64,
    /// Largest increment; positive means `H` grew at some step.
    pub max_increment: f64,
}

impl EntropyBudget {
    /// Whether `H` never grew by more than round-off.
    pub fn non_increasing(&self) -> bool {
        self.increments
            .iter()
            .zip(&self.tolerances)
            .all(|(d, tol)| *d <= *tol)
    }

    /// Index of the first step where `H` grew beyond round-off.
    pub fn first_increase(&self) -> Option<usize> {
        self.increments
            .iter()
            .zip(&self.tolerances)
            .position(|(d, tol)| *d > *tol)
    }
}

/// Relative round-off allowance on one entropy increment.
pub const ENTROPY_ROUNDOFF: f64 = 64.0 * f64::EPSILON;

/// Budget residuals of a trajectory's entropy and dissipation series. The
/// flux term integrates to zero on the periodic domain.
pub fn entropy_budget(traj: &Trajectory) -> EntropyBudget {
    let steps = traj.steps();
    let mut b = EntropyBudget {
        residuals: Vec::with_capacity(steps),
        increments: Vec::with_capacity(steps),
        tolerances: Vec::with_capacity(steps),
        max_abs_residual: 0.0,
        max_increment: f64::NEG_INFINITY,
    };
    for n in 0..steps {
        let dh = traj.entropy[n + 1] - traj.entropy[n];
        let r = dh / traj.dt[n] - traj.dissipation[n];
        let scale = traj.entropy_magnitude[n].max(traj.entropy_magnitude[n + 1]);
        b.increments.push(dh);
        b.residuals.push(r);
        b.tolerances.push(ENTROPY_ROUNDOFF * scale);
        b.max_abs_residual = b.max_abs_residual.max(r.abs());
        b.max_increment = b.max_increment.max(dh);
    }
    b
}
