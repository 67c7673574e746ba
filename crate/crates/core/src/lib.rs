//! Relaxation model of compressible viscoelastic flow with a Maxwell-type
//! stress law, a reference isentropic Navier-Stokes solver, and the
//! diagnostics that measure how fast the first approaches the second as the
//! relaxation scale shrinks.
//!
//! Modules by layer:
//!
//! - [`eos`], [`params`], [`state`], [`tensor`]: pressure law, entropy and
//!   the packed state vector.
//! - [`system`], [`structure`]: fluxes, wave-speed bounds and the numerical
//!   certificate of the symmetrizer identities.
//! - [`grid`], [`field`], [`fv`]: periodic grids, cell fields and the shared
//!   finite-volume machinery.
//! - [`relax_solver`], [`ns_solver`]: the two time integrators.
//! - [`diagnostics`], [`experiment`]: norms, error series, rate fits, the
//!   entropy budget and the comparison pipeline.
//! - [`config`], [`cli`], [`io`]: the experiment runner behind the
//!   `maxwell-flow` binary.
//!
//! Runnable examples (`cargo run --release --example <name>`):
//!
//! | example | shows |
//! |---|---|
//! | `entropy_function` | pressure, potential, entropy and its flux |
//! | `structure_check` | symmetrizer identities and wave-speed bound |
//! | `relaxation_run` | one relaxation run with mass and entropy history |
//! | `navier_stokes_reference` | reference run and closure stresses |
//! | `epsilon_sweep` | errors against the reference and the fitted rate |
//! | `entropy_budget` | entropy monotonicity and budget residual refinement |
//! | `self_convergence` | observed spatial order of both solvers |
//! | `shear_wave_2d` | two-dimensional decay against the dispersion relation |

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod eos;
pub mod error;
pub mod experiment;
pub mod field;
pub mod fv;
pub mod grid;
pub mod io;
pub mod ns_solver;
pub mod params;
pub mod reduce;
pub mod relax_solver;
pub mod state;
pub mod structure;
pub mod system;
pub mod tensor;
