//! Experiment configuration files: one `key = value` per line, `#` starts a
//! comment, unknown keys are rejected.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::experiment::{ComparisonSetup, InitialCondition};
use crate::fv::Reconstruction;
use crate::grid::Grid;
use crate::ns_solver::NSConfig;
use crate::params::PhysParams;
use crate::relax_solver::{uniform_schedule, SolverConfig};
use crate::state::DEFAULT_DENSITY_FLOOR;

/// Which initial profile to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    /// [`InitialCondition`] with the configured amplitudes.
    Sine,
    /// `rho0` at rest.
    Uniform,
}

/// Reference used by `compare`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareMode {
    /// Navier-Stokes with closure stresses.
    Reference,
    /// A second, identical relaxation run; errors must vanish.
    SelfCheck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub cells: Vec<usize>,
    pub params: PhysParams,
    pub eps_list: Vec<f64>,
    pub initial_kind: InitialKind,
    pub initial: InitialCondition,
    pub t_end: f64,
    pub snapshots: usize,
    pub cfl: f64,
    pub cfl_advective: f64,
    pub viscous_factor: f64,
    pub reconstruction: Reconstruction,
    pub density_floor: f64,
    pub norm_order: usize,
    pub slope_band: (f64, f64),
    pub structure_samples: usize,
    pub structure_tol: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub relaxation_source: bool,
    pub corrupt_coupling: f64,
    pub compare_mode: CompareMode,
    /// Snapshot count of the reference run; differs from `snapshots` only to
    /// exercise schedule checks.
    pub ns_snapshots: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            cells: vec![512],
            params: PhysParams::default(),
            eps_list: vec![0.1, 0.05, 0.025, 0.0125],
            initial_kind: InitialKind::Sine,
            initial: InitialCondition::default(),
            t_end: 0.2,
            snapshots: 20,
            cfl: 0.45,
            cfl_advective: 0.45,
            viscous_factor: 1.5,
            reconstruction: Reconstruction::default(),
            density_floor: DEFAULT_DENSITY_FLOOR,
            norm_order: 0,
            slope_band: (1.7, 2.3),
            structure_samples: 100,
            structure_tol: 1e-9,
            seed: 42,
            output_dir: PathBuf::from("out"),
            relaxation_source: true,
            corrupt_coupling: 0.0,
            compare_mode: CompareMode::Reference,
            ns_snapshots: None,
        }
    }
}

/// Documented keys with their defaults, as shown by `--help`.
pub const KEY_HELP: &str = "\
Config keys (`key = value`, `#` comments):
  dim = 1                      grid dimension (1..3)
  cells = 512                  cells per axis, one value or one per axis
  nu = 1, kappa = 1            shear and bulk viscosity
  eos_a = 1, eos_gamma = 2     pressure law p = A rho^gamma (gamma > 1)
  eps_list = 0.1,0.05,0.025,0.0125
                               relaxation scales, strictly decreasing
  initial = sine               sine | uniform
  rho0 = 1, rho_amp = 0.1      rho = rho0 + rho_amp sin(2 pi k.x)
  vel_amp = 0                  v_i = vel_amp sin(2 pi k.x + phase_i)
  wavevector = 1,0,0           integer k
  phases = 0,0,0               velocity phases in radians
  t_end = 0.2, snapshots = 20  uniform output schedule
  cfl = 0.45                   relaxation solver CFL number
  cfl_advective = 0.45         reference solver CFL number
  viscous_factor = 1.5         reference solver diffusive step fraction
  reconstruction = muscl-central
                               first-order | muscl-minmod | muscl-central
  density_floor = 1e-8
  norm_order = 0               0, 1 or 2
  slope_min = 1.7, slope_max = 2.3
                               accepted band for the sweep rate
  structure_samples = 100, structure_tol = 1e-9, seed = 42
  output_dir = out             overridden by --out
Diagnostic switches:
  relaxation_source = true     false removes the stress damping
  corrupt_coupling = 0         perturbation added to the coupling blocks
  compare_mode = reference     reference | self
  ns_snapshots = <snapshots>   reference run schedule length";

/// A config file that could not be read or validated.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Syntax { line: usize, message: String },
    Invalid { key: &'static str, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax { line, message } => write!(f, "line {line}: {message}"),
            ConfigError::Invalid { key, message } => write!(f, "invalid `{key}`: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn parse_scalar<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| ConfigError::Syntax {
        line,
        message: format!("`{key}`: cannot parse `{value}`: {e}"),
    })
}

fn parse_list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(|v| parse_scalar(line, key, v.trim()))
        .collect()
}

fn parse_triple<T: FromStr + Copy>(line: usize, key: &str, value: &str) -> Result<[T; 3], ConfigError>
where
    T::Err: fmt::Display,
{
    let v: Vec<T> = parse_list(line, key, value)?;
    v.try_into().map_err(|_| ConfigError::Syntax {
        line,
        message: format!("`{key}` needs exactly three values"),
    })
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(ConfigError::Syntax {
            line,
            message: format!("`{key}`: expected true or false, got `{value}`"),
        }),
    }
}

/// Parses and validates a config, filling in defaults for absent keys.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    let mut seen = std::collections::HashSet::new();
    let (mut slope_min, mut slope_max) = cfg.slope_band;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                message: format!("`{key}` has no value"),
            });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::Syntax {
                line,
                message: format!("`{key}` given twice"),
            });
        }
        let p = &mut cfg.params;
        let ic = &mut cfg.initial;
        match key {
            "dim" => cfg.dim = parse_scalar(line, key, value)?,
            "cells" => cfg.cells = parse_list(line, key, value)?,
            "nu" => p.nu = parse_scalar(line, key, value)?,
            "kappa" => p.kappa = parse_scalar(line, key, value)?,
            "eos_a" => p.eos_a = parse_scalar(line, key, value)?,
            "eos_gamma" => p.eos_gamma = parse_scalar(line, key, value)?,
            "eps_list" => cfg.eps_list = parse_list(line, key, value)?,
            "initial" => {
                cfg.initial_kind = match value {
                    "sine" => InitialKind::Sine,
                    "uniform" => InitialKind::Uniform,
                    _ => {
                        return Err(ConfigError::Syntax {
                            line,
                            message: format!("`initial`: expected sine or uniform, got `{value}`"),
                        })
                    }
                }
            }
            "rho0" => ic.rho0 = parse_scalar(line, key, value)?,
            "rho_amp" => ic.rho_amp = parse_scalar(line, key, value)?,
            "vel_amp" => ic.vel_amp = parse_scalar(line, key, value)?,
            "wavevector" => ic.wavevector = parse_triple(line, key, value)?,
            "phases" => ic.phases = parse_triple(line, key, value)?,
            "t_end" => cfg.t_end = parse_scalar(line, key, value)?,
            "snapshots" => cfg.snapshots = parse_scalar(line, key, value)?,
            "cfl" => cfg.cfl = parse_scalar(line, key, value)?,
            "cfl_advective" => cfg.cfl_advective = parse_scalar(line, key, value)?,
            "viscous_factor" => cfg.viscous_factor = parse_scalar(line, key, value)?,
            "reconstruction" => cfg.reconstruction = parse_scalar(line, key, value)?,
            "density_floor" => cfg.density_floor = parse_scalar(line, key, value)?,
            "norm_order" => cfg.norm_order = parse_scalar(line, key, value)?,
            "slope_min" => slope_min = parse_scalar(line, key, value)?,
            "slope_max" => slope_max = parse_scalar(line, key, value)?,
            "structure_samples" => cfg.structure_samples = parse_scalar(line, key, value)?,
            "structure_tol" => cfg.structure_tol = parse_scalar(line, key, value)?,
            "seed" => cfg.seed = parse_scalar(line, key, value)?,
            "output_dir" => cfg.output_dir = PathBuf::from(value),
            "relaxation_source" => cfg.relaxation_source = parse_bool(line, key, value)?,
            "corrupt_coupling" => cfg.corrupt_coupling = parse_scalar(line, key, value)?,
            "compare_mode" => {
                cfg.compare_mode = match value {
                    "reference" => CompareMode::Reference,
                    "self" => CompareMode::SelfCheck,
                    _ => {
                        return Err(ConfigError::Syntax {
                            line,
                            message: format!("`compare_mode`: expected reference or self, got `{value}`"),
                        })
                    }
                }
            }
            "ns_snapshots" => cfg.ns_snapshots = Some(parse_scalar(line, key, value)?),
            _ => {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("unknown key `{key}`"),
                })
            }
        }
    }
    cfg.slope_band = (slope_min, slope_max);
    if cfg.cells.len() == 1 {
        cfg.cells = vec![cfg.cells[0]; cfg.dim.clamp(1, 3)];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn invalid(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid()?;
        if let Err(crate::error::Error::Param { name, reason }) = self.params.validate() {
            return Err(invalid(name, reason));
        }
        if self.eps_list.is_empty() {
            return Err(invalid("eps_list", "is empty"));
        }
        if self.eps_list.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(invalid("eps_list", "values must be positive"));
        }
        if self.eps_list.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(invalid("eps_list", "must be strictly decreasing"));
        }
        if !(self.initial.rho0 > 0.0) {
            return Err(invalid("rho0", "must be positive"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", "must be finite and >= 0"));
        }
        if self.snapshots == 0 {
            return Err(invalid("snapshots", "must be at least 1"));
        }
        if self.ns_snapshots == Some(0) {
            return Err(invalid("ns_snapshots", "must be at least 1"));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(invalid("cfl", "must lie in (0, 1)"));
        }
        if !(self.cfl_advective > 0.0 && self.cfl_advective < 1.0) {
            return Err(invalid("cfl_advective", "must lie in (0, 1)"));
        }
        if !(self.viscous_factor > 0.0 && self.viscous_factor <= 1.8) {
            return Err(invalid("viscous_factor", "must lie in (0, 1.8]"));
        }
        if !(self.density_floor >= 0.0) {
            return Err(invalid("density_floor", "must be >= 0"));
        }
        if self.norm_order > 2 {
            return Err(invalid("norm_order", "must be 0, 1 or 2"));
        }
        if !(self.slope_band.0 < self.slope_band.1) {
            return Err(invalid("slope_min", "must be below slope_max"));
        }
        if self.structure_samples == 0 {
            return Err(invalid("structure_samples", "must be at least 1"));
        }
        if !(self.structure_tol > 0.0) {
            return Err(invalid("structure_tol", "must be positive"));
        }
        if !self.corrupt_coupling.is_finite() {
            return Err(invalid("corrupt_coupling", "must be finite"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        if self.cells.len() != self.dim {
            return Err(invalid(
                "cells",
                format!("{} values for dim = {}", self.cells.len(), self.dim),
            ));
        }
        Grid::new(self.dim, &self.cells).map_err(|e| match e {
            crate::error::Error::Param { name: "dim", reason } => invalid("dim", reason),
            other => invalid("cells", other.to_string()),
        })
    }

    /// Parameters at the first (largest) `eps`.
    pub fn first_params(&self) -> PhysParams {
        self.params.with_eps(self.eps_list[0])
    }

    pub fn initial_condition(&self) -> InitialCondition {
        match self.initial_kind {
            InitialKind::Sine => self.initial,
            InitialKind::Uniform => InitialCondition {
                rho_amp: 0.0,
                vel_amp: 0.0,
                ..self.initial
            },
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            cfl: self.cfl,
            reconstruction: self.reconstruction,
            t_end: self.t_end,
            snapshots: uniform_schedule(self.t_end, self.snapshots),
            density_floor: self.density_floor,
            relaxation_source: self.relaxation_source,
        }
    }

    pub fn ns_config(&self) -> NSConfig {
        NSConfig {
            cfl_advective: self.cfl_advective,
            viscous_factor: self.viscous_factor,
            reconstruction: self.reconstruction,
            t_end: self.t_end,
            snapshots: uniform_schedule(self.t_end, self.ns_snapshots.unwrap_or(self.snapshots)),
            density_floor: self.density_floor,
        }
    }

    pub fn comparison(&self) -> Result<ComparisonSetup, ConfigError> {
        Ok(ComparisonSetup {
            grid: self.grid()?,
            initial: self.initial_condition(),
            params: self.first_params(),
            relax: self.solver_config(),
            ns: self.ns_config(),
            norm_order: self.norm_order,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.grid().unwrap().len(), 512);
        assert_eq!(cfg.eps_list, vec![0.1, 0.05, 0.025, 0.0125]);
        assert_eq!(cfg.params.eos_gamma, 2.0);
        assert_eq!(cfg.t_end, 0.2);
        assert_eq!(cfg.solver_config().snapshots.len(), 20);
    }

    #[test]
    fn comments_and_values() {
        let cfg = parse_config(
            "# sweep\n dim = 2 \ncells = 32, 16 # per axis\neps_list = 0.2,0.1,0.05\nrelaxation_source = false\n",
        )
        .unwrap();
        assert_eq!(cfg.cells, vec![32, 16]);
        assert_eq!(cfg.eps_list.len(), 3);
        assert!(!cfg.relaxation_source);
        let cfg = parse_config("dim = 3\ncells = 8").unwrap();
        assert_eq!(cfg.cells, vec![8, 8, 8]);
    }

    #[test]
    fn gamma_below_one_names_the_key() {
        let err = parse_config("eos_gamma = 0.9").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "eos_gamma", .. }), "{err}");
    }

    #[test]
    fn eps_list_must_decrease() {
        let err = parse_config("eps_list = 0.1,0.1").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "eps_list", .. }));
        assert!(parse_config("eps_list = 0.1,-0.05").is_err());
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_config("nu = 1\n\nbogus = 3").unwrap_err();
        assert_eq!(
            err,
            ConfigError::Syntax {
                line: 3,
                message: "unknown key `bogus`".into()
            }
        );
        assert!(matches!(
            parse_config("nu 1"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("t_end = soon"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("nu = 1\nnu = 2"),
            Err(ConfigError::Syntax { line: 2, .. })
        ));
        assert!(parse_config("cells = 3").is_err());
        assert!(parse_config("dim = 2\ncells = 8,8,8").is_err());
    }

    #[test]
    fn help_lists_every_key() {
        for key in [
            "dim", "cells", "nu", "kappa", "eos_a", "eos_gamma", "eps_list", "initial", "rho0",
            "rho_amp", "vel_amp", "wavevector", "phases", "t_end", "snapshots", "cfl",
            "cfl_advective", "viscous_factor", "reconstruction", "density_floor", "norm_order",
            "slope_min", "slope_max", "structure_samples", "structure_tol", "seed", "output_dir",
            "relaxation_source", "corrupt_coupling", "compare_mode", "ns_snapshots",
        ] {
            assert!(KEY_HELP.contains(key), "{key}");
            let value = match key {
                "initial" => "sine",
                "reconstruction" => "first-order",
                "compare_mode" => "self",
                "relaxation_source" => "true",
                "eps_list" => "0.1",
                "wavevector" => "1,0,0",
                "phases" => "0,0,0",
                "output_dir" => "x",
                "slope_max" => "3",
                "cfl" | "cfl_advective" => "0.3",
                "dim" => "1",
                "cells" => "16",
                "rho0" | "eos_gamma" => "2",
                "structure_tol" => "1e-9",
                "snapshots" | "ns_snapshots" | "structure_samples" | "seed" | "viscous_factor" => "1",
                _ => "0",
            };
            let text = format!("{key} = {value}");
            let res = parse_config(&text);
            assert!(
                !matches!(res, Err(ConfigError::Syntax { .. })),
                "{key}: {res:?}"
            );
        }
    }
}
