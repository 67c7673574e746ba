use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ns_solver::ce_closure;
use crate::params::PhysParams;
use crate::reduce::pairwise_sum_by;
use crate::state::{validate_state, FlowState, RelaxState, StateViolation};
use crate::tensor::{SymTraceless3, Vec3};

/// Relaxation-system unknowns on every cell of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxField {
    grid: Grid,
    cells: Vec<RelaxState>,
}

impl RelaxField {
    pub fn new(grid: Grid, cells: Vec<RelaxState>) -> Result<Self> {
        if cells.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} states for a grid of {} cells",
                cells.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, cells })
    }

    pub fn uniform(grid: Grid, state: RelaxState) -> Self {
        Self {
            grid,
            cells: vec![state; grid.len()],
        }
    }

    /// Samples `f` at every cell centre.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> RelaxState) -> Self {
        let cells = (0..grid.len()).map(|i| f(grid.cell_center(i))).collect();
        Self { grid, cells }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[RelaxState] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [RelaxState] {
        &mut self.cells
    }

    /// First cell (in storage order) outside the state domain.
    pub fn validate(&self, floor: f64) -> Result<(), StateViolation> {
        self.cells
            .iter()
            .enumerate()
            .try_for_each(|(i, s)| validate_state(s, floor).map_err(|v| v.at_cell(i)))
    }

    pub fn velocities(&self) -> Vec<Vec3> {
        self.cells.iter().map(RelaxState::velocity).collect()
    }

    /// Cell-summed mass, `sum rho dV`.
    pub fn total_mass(&self) -> f64 {
        self.grid.cell_volume() * pairwise_sum_by(self.cells.len(), |i| self.cells[i].rho)
    }

    pub fn total_momentum(&self) -> Vec3 {
        let dv = self.grid.cell_volume();
        [0, 1, 2].map(|c| dv * pairwise_sum_by(self.cells.len(), |i| self.cells[i].mom[c]))
    }
}

/// Navier-Stokes unknowns `(rho, rho v)` together with the stresses
/// reconstructed from the velocity by the Chapman-Enskog closure.
#[derive(Debug, Clone, PartialEq)]
pub struct NSField {
    grid: Grid,
    cells: Vec<FlowState>,
    tau1_ce: Vec<SymTraceless3>,
    tau2_ce: Vec<f64>,
}

impl NSField {
    /// Builds the field and caches its closure stresses for `params`.
    pub fn new(grid: Grid, cells: Vec<FlowState>, params: &PhysParams) -> Result<Self> {
        if cells.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} states for a grid of {} cells",
                cells.len(),
                grid.len()
            )));
        }
        let velocity: Vec<Vec3> = cells.iter().map(FlowState::velocity).collect();
        let (tau1_ce, tau2_ce) = ce_closure(&velocity, &grid, params)?;
        Ok(Self {
            grid,
            cells,
            tau1_ce,
            tau2_ce,
        })
    }

    pub fn from_fn(
        grid: Grid,
        params: &PhysParams,
        f: impl Fn([f64; 3]) -> FlowState,
    ) -> Result<Self> {
        let cells = (0..grid.len()).map(|i| f(grid.cell_center(i))).collect();
        Self::new(grid, cells, params)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[FlowState] {
        &self.cells
    }

    pub fn tau1_ce(&self) -> &[SymTraceless3] {
        &self.tau1_ce
    }

    pub fn tau2_ce(&self) -> &[f64] {
        &self.tau2_ce
    }

    pub fn velocities(&self) -> Vec<Vec3> {
        self.cells.iter().map(FlowState::velocity).collect()
    }

    /// Same flow with the closure recomputed for different relaxation scales.
    pub fn with_params(&self, params: &PhysParams) -> Result<Self> {
        Self::new(self.grid, self.cells.clone(), params)
    }

    /// `(rho, rho v, tau1_ce, tau2_ce)`: well-prepared data for the
    /// relaxation system and the state it is compared against.
    pub fn to_relax_field(&self) -> RelaxField {
        let cells = self
            .cells
            .iter()
            .zip(self.tau1_ce.iter().zip(&self.tau2_ce))
            .map(|(w, (&tau1, &tau2))| RelaxState {
                rho: w.rho,
                mom: w.mom,
                tau1,
                tau2,
            })
            .collect();
        RelaxField {
            grid: self.grid,
            cells,
        }
    }

    pub fn validate(&self, floor: f64) -> Result<(), StateViolation> {
        self.cells.iter().enumerate().try_for_each(|(i, w)| {
            let s = RelaxState {
                rho: w.rho,
                mom: w.mom,
                ..Default::default()
            };
            validate_state(&s, floor).map_err(|v| v.at_cell(i))
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.grid.cell_volume() * pairwise_sum_by(self.cells.len(), |i| self.cells[i].rho)
    }

    pub fn total_momentum(&self) -> Vec3 {
        let dv = self.grid.cell_volume();
        [0, 1, 2].map(|c| dv * pairwise_sum_by(self.cells.len(), |i| self.cells[i].mom[c]))
    }
}
