//! Shared finite-volume machinery: piecewise-linear reconstruction and
//! conservative flux differencing on the periodic grid.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::grid::Grid;
use crate::state::StateViolation;

/// Cells per rayon task; small 1D grids run as a single task.
pub(crate) const PAR_CHUNK: usize = 4096;

/// Runs `f` on a rayon worker so the many short parallel loops of a time
/// step do not each pay a cross-thread handoff.
pub(crate) fn in_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    rayon::scope(|_| f())
}

/// Interface reconstruction used by both solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reconstruction {
    /// Piecewise-constant states, first order in space.
    FirstOrder,
    /// Piecewise-linear states with minmod-limited slopes. Robust near
    /// steep gradients but first order at smooth extrema.
    MusclMinmod,
    /// Piecewise-linear states with unlimited centred slopes. Keeps second
    /// order through smooth extrema; meant for smooth data.
    #[default]
    MusclCentral,
}

impl Reconstruction {
    #[inline]
    pub(crate) fn slope(self, left: f64, centre: f64, right: f64) -> f64 {
        match self {
            Reconstruction::FirstOrder => 0.0,
            Reconstruction::MusclMinmod => minmod(centre - left, right - centre),
            Reconstruction::MusclCentral => 0.5 * (right - left),
        }
    }
}

#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

impl fmt::Display for Reconstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reconstruction::FirstOrder => "first-order",
            Reconstruction::MusclMinmod => "muscl-minmod",
            Reconstruction::MusclCentral => "muscl-central",
        })
    }
}

impl FromStr for Reconstruction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first-order" => Ok(Reconstruction::FirstOrder),
            "muscl-minmod" => Ok(Reconstruction::MusclMinmod),
            "muscl-central" => Ok(Reconstruction::MusclCentral),
            other => Err(format!(
                "unknown reconstruction `{other}` (expected first-order, muscl-minmod or muscl-central)"
            )),
        }
    }
}

/// Scratch buffers for [`accumulate_axis`], reused across stages.
#[derive(Debug, Default)]
pub(crate) struct Scratch<const N: usize> {
    slopes: Vec<[f64; N]>,
    fluxes: Vec<[f64; N]>,
}

/// Adds `-(F_{i+1/2} - F_{i-1/2}) / dx` along `axis` to `tend`, where the
/// interface flux comes from `face_flux(left_state, right_state)`.
///
/// `face_flux` receives the index of the cell left of the interface for
/// error reporting.
pub(crate) fn accumulate_axis<const N: usize, F>(
    u: &[[f64; N]],
    grid: &Grid,
    axis: usize,
    recon: Reconstruction,
    scratch: &mut Scratch<N>,
    face_flux: F,
    tend: &mut [[f64; N]],
) -> Result<(), StateViolation>
where
    F: Fn(usize, &[f64; N], &[f64; N]) -> Result<[f64; N], StateViolation> + Sync,
{
    let n = u.len();
    let inv_dx = 1.0 / grid.dx()[axis];
    scratch.slopes.resize(n, [0.0; N]);
    scratch.fluxes.resize(n, [0.0; N]);

    scratch
        .slopes
        .par_iter_mut()
        .with_min_len(PAR_CHUNK)
        .enumerate()
        .for_each(|(i, s)| {
            if recon == Reconstruction::FirstOrder {
                *s = [0.0; N];
                return;
            }
            let l = &u[grid.shift(i, axis, -1)];
            let c = &u[i];
            let r = &u[grid.shift(i, axis, 1)];
            for k in 0..N {
                s[k] = recon.slope(l[k], c[k], r[k]);
            }
        });

    let slopes = &scratch.slopes;
    scratch
        .fluxes
        .par_iter_mut()
        .with_min_len(PAR_CHUNK)
        .enumerate()
        .try_for_each(|(i, f)| {
            let ip = grid.shift(i, axis, 1);
            let mut left = u[i];
            let mut right = u[ip];
            for k in 0..N {
                left[k] += 0.5 * slopes[i][k];
                right[k] -= 0.5 * slopes[ip][k];
            }
            *f = face_flux(i, &left, &right)?;
            Ok(())
        })?;

    let fluxes = &scratch.fluxes;
    tend.par_iter_mut()
        .with_min_len(PAR_CHUNK)
        .enumerate()
        .for_each(|(i, t)| {
            let im = grid.shift(i, axis, -1);
            for k in 0..N {
                t[k] -= (fluxes[i][k] - fluxes[im][k]) * inv_dx;
            }
        });
    Ok(())
}

/// Cell-centred second-order central differences of a vector field:
/// `out[c][a][b] = d v_b / d x_a`, zero along inactive axes.
pub(crate) fn central_gradient(v: &[[f64; 3]], grid: &Grid, out: &mut Vec<[[f64; 3]; 3]>) {
    out.resize(v.len(), [[0.0; 3]; 3]);
    let dim = grid.dim();
    let dx = grid.dx();
    out.par_iter_mut()
        .with_min_len(PAR_CHUNK)
        .enumerate()
        .for_each(|(i, g)| {
            *g = [[0.0; 3]; 3];
            for a in 0..dim {
                let vp = &v[grid.shift(i, a, 1)];
                let vm = &v[grid.shift(i, a, -1)];
                let inv = 0.5 / dx[a];
                for b in 0..3 {
                    g[a][b] = (vp[b] - vm[b]) * inv;
                }
            }
        });
}
