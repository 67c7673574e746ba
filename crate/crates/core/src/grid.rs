use crate::error::{Error, Result};

/// Uniform cell-centred grid on the periodic unit torus `[0, 1)^dim`.
///
/// Cells are stored x-fastest. Inactive axes (beyond `dim`) have one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    cells: [usize; 3],
    dx: [f64; 3],
}

impl Grid {
    pub fn new(dim: usize, cells: &[usize]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Param {
                name: "dim",
                reason: format!("must be 1, 2 or 3, got {dim}"),
            });
        }
        if cells.len() != dim {
            return Err(Error::Param {
                name: "cells",
                reason: format!("expected {dim} cell counts, got {}", cells.len()),
            });
        }
        let mut n = [1usize; 3];
        let mut dx = [1.0; 3];
        for (axis, &c) in cells.iter().enumerate() {
            // MUSCL stencils reach two cells on each side.
            if c < 4 {
                return Err(Error::Param {
                    name: "cells",
                    reason: format!("need at least 4 cells per axis, got {c}"),
                });
            }
            n[axis] = c;
            dx[axis] = 1.0 / c as f64;
        }
        Ok(Self { dim, cells: n, dx })
    }

    pub fn new_1d(cells: usize) -> Result<Self> {
        Self::new(1, &[cells])
    }

    pub fn new_2d(nx: usize, ny: usize) -> Result<Self> {
        Self::new(2, &[nx, ny])
    }

    pub fn new_3d(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        Self::new(3, &[nx, ny, nz])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cells per axis; inactive axes report 1.
    pub fn cells(&self) -> [usize; 3] {
        self.cells
    }

    pub fn dx(&self) -> [f64; 3] {
        self.dx
    }

    /// Smallest cell width over the active axes.
    pub fn min_dx(&self) -> f64 {
        self.dx[..self.dim].iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one cell, `prod dx` over active axes.
    pub fn cell_volume(&self) -> f64 {
        self.dx[..self.dim].iter().product()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.cells[0] * (j + self.cells[1] * k)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let nx = self.cells[0];
        let ny = self.cells[1];
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    /// Index of the cell `offset` steps away along `axis`, wrapping periodically.
    #[inline]
    pub fn shift(&self, idx: usize, axis: usize, offset: isize) -> usize {
        let n = self.cells[axis];
        let (stride, c) = match axis {
            0 => (1, if self.dim == 1 { idx } else { idx % n }),
            1 => (self.cells[0], (idx / self.cells[0]) % n),
            _ => {
                let s = self.cells[0] * self.cells[1];
                (s, idx / s)
            }
        };
        let target = match offset {
            1 => if c + 1 == n { 0 } else { c + 1 },
            -1 => if c == 0 { n - 1 } else { c - 1 },
            _ => (c as isize + offset).rem_euclid(n as isize) as usize,
        };
        idx + target * stride - c * stride
    }

    pub fn cell_center(&self, idx: usize) -> [f64; 3] {
        let c = self.coords(idx);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = (c[axis] as f64 + 0.5) * self.dx[axis];
        }
        x
    }

    /// Whether `other` can be compared cell by cell with `self`.
    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                &self.cells[..self.dim],
                &other.cells[..other.dim]
            )))
        }
    }

    /// Grid with half the cells per axis; used for restriction in
    /// self-convergence studies.
    pub fn coarsened(&self) -> Result<Self> {
        let cells: Vec<usize> = self.cells[..self.dim]
            .iter()
            .map(|&c| {
                if c % 2 == 0 {
                    Ok(c / 2)
                } else {
                    Err(Error::GridMismatch(format!("cannot coarsen odd axis of {c} cells")))
                }
            })
            .collect::<Result<_>>()?;
        Self::new(self.dim, &cells)
    }
}
