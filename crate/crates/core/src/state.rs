use std::fmt;

use thiserror::Error;

use crate::tensor::{SymTraceless3, Vec3};

/// Number of independent unknowns per cell: density, three momentum
/// components, five deviatoric stress components and the bulk stress.
pub const NVARS: usize = 10;

/// Number of conserved flow unknowns `(rho, m)`.
pub const NFLOW: usize = 4;

/// Default density floor below which a state is reported as a violation.
pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-8;

/// Column names of the flat `[f64; NVARS]` layout.
pub const VAR_NAMES: [&str; NVARS] = [
    "rho", "mx", "my", "mz", "tau1_xx", "tau1_yy", "tau1_xy", "tau1_xz", "tau1_yz", "tau2",
];

/// Pointwise unknowns `(rho, rho v, tau1, tau2)` of the relaxation system.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RelaxState {
    pub rho: f64,
    pub mom: Vec3,
    pub tau1: SymTraceless3,
    pub tau2: f64,
}

impl RelaxState {
    /// Fluid at rest with density `rho` and vanishing stresses.
    pub fn at_rest(rho: f64) -> Self {
        Self {
            rho,
            ..Self::default()
        }
    }

    pub fn velocity(&self) -> Vec3 {
        self.mom.map(|m| m / self.rho)
    }

    pub fn flow(&self) -> FlowState {
        FlowState {
            rho: self.rho,
            mom: self.mom,
        }
    }

    pub fn to_array(&self) -> [f64; NVARS] {
        let t = &self.tau1;
        [
            self.rho, self.mom[0], self.mom[1], self.mom[2], t.xx, t.yy, t.xy, t.xz, t.yz,
            self.tau2,
        ]
    }

    pub fn from_array(u: &[f64; NVARS]) -> Self {
        Self {
            rho: u[0],
            mom: [u[1], u[2], u[3]],
            tau1: SymTraceless3::from_components([u[4], u[5], u[6], u[7], u[8]]),
            tau2: u[9],
        }
    }
}

/// Conserved flow variables `(rho, rho v)`, the slow part of the system.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlowState {
    pub rho: f64,
    pub mom: Vec3,
}

impl FlowState {
    pub fn velocity(&self) -> Vec3 {
        self.mom.map(|m| m / self.rho)
    }

    pub fn to_array(&self) -> [f64; NFLOW] {
        [self.rho, self.mom[0], self.mom[1], self.mom[2]]
    }

    pub fn from_array(w: &[f64; NFLOW]) -> Self {
        Self {
            rho: w[0],
            mom: [w[1], w[2], w[3]],
        }
    }
}

/// Which part of a state failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateField {
    Rho,
    Mom,
    Tau1,
    Tau2,
}

impl fmt::Display for StateField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateField::Rho => "rho",
            StateField::Mom => "mom",
            StateField::Tau1 => "tau1",
            StateField::Tau2 => "tau2",
        })
    }
}

/// A state left the admissible domain `rho > 0` (or became non-finite).
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("state violation in `{field}` (value {value}){}", cell_suffix(.cell))]
pub struct StateViolation {
    pub field: StateField,
    pub value: f64,
    /// Flat cell index, when the state came from a grid field.
    pub cell: Option<usize>,
}

fn cell_suffix(cell: &Option<usize>) -> String {
    match cell {
        Some(c) => format!(" at cell {c}"),
        None => String::new(),
    }
}

impl StateViolation {
    pub fn at_cell(self, cell: usize) -> Self {
        Self {
            cell: Some(cell),
            ..self
        }
    }
}

/// Checks membership in the state domain with a density floor.
pub fn validate_state(s: &RelaxState, floor: f64) -> Result<(), StateViolation> {
    if !(s.rho >= floor) {
        return Err(StateViolation {
            field: StateField::Rho,
            value: s.rho,
            cell: None,
        });
    }
    if let Some(&m) = s.mom.iter().find(|m| !m.is_finite()) {
        return Err(StateViolation {
            field: StateField::Mom,
            value: m,
            cell: None,
        });
    }
    if let Some(t) = s.tau1.components().into_iter().find(|t| !t.is_finite()) {
        return Err(StateViolation {
            field: StateField::Tau1,
            value: t,
            cell: None,
        });
    }
    if !s.tau2.is_finite() {
        return Err(StateViolation {
            field: StateField::Tau2,
            value: s.tau2,
            cell: None,
        });
    }
    Ok(())
}

/// Density-only check used inside the flux kernels.
#[inline]
pub(crate) fn check_density(rho: f64, floor: f64, cell: usize) -> Result<(), StateViolation> {
    if rho >= floor {
        Ok(())
    } else {
        Err(StateViolation {
            field: StateField::Rho,
            value: rho,
            cell: Some(cell),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_state_is_valid() {
        assert!(validate_state(&RelaxState::at_rest(1.0), DEFAULT_DENSITY_FLOOR).is_ok());
    }

    #[test]
    fn zero_density_rejected() {
        let err = validate_state(&RelaxState::at_rest(0.0), DEFAULT_DENSITY_FLOOR).unwrap_err();
        assert_eq!(err.field, StateField::Rho);
        assert_eq!(err.cell, None);
    }

    #[test]
    fn below_floor_rejected() {
        let err = validate_state(&RelaxState::at_rest(1e-9), 1e-8).unwrap_err();
        assert_eq!(err.field, StateField::Rho);
        assert_eq!(err.value, 1e-9);
    }

    #[test]
    fn nan_density_rejected() {
        assert!(validate_state(&RelaxState::at_rest(f64::NAN), 1e-8).is_err());
    }

    #[test]
    fn non_finite_stress_named() {
        let mut s = RelaxState::at_rest(1.0);
        s.tau1.xy = f64::INFINITY;
        assert_eq!(validate_state(&s, 1e-8).unwrap_err().field, StateField::Tau1);
        let mut s = RelaxState::at_rest(1.0);
        s.tau2 = f64::NAN;
        assert_eq!(validate_state(&s, 1e-8).unwrap_err().field, StateField::Tau2);
    }

    #[test]
    fn violation_message_locates_cell() {
        let v = validate_state(&RelaxState::at_rest(-0.5), 1e-8)
            .unwrap_err()
            .at_cell(17);
        assert!(v.to_string().contains("at cell 17"), "{v}");
    }

    #[test]
    fn array_layout_round_trip() {
        let s = RelaxState {
            rho: 1.5,
            mom: [0.1, -0.2, 0.3],
            tau1: SymTraceless3::from_components([1.0, 2.0, 3.0, 4.0, 5.0]),
            tau2: -0.7,
        };
        assert_eq!(RelaxState::from_array(&s.to_array()), s);
    }
}
