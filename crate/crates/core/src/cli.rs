//! The four experiment commands behind the `maxwell-flow` binary.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 state
//! violation, 3 rate outside the accepted band, 4 structure check failed.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::config::{parse_config, CompareMode, ExperimentConfig};
use crate::diagnostics::{error_between, ErrorSeries, RateFit};
use crate::error::Error;
use crate::io::{write_entropy_csv, write_file, write_relax_csv, write_snapshot_file};
use crate::relax_solver::{run, Trajectory};
use crate::structure::{check_structure_with, sample_states};

/// Name of the marker file left in the output directory by a failed run.
pub const FAILED_MARKER: &str = "FAILED";

/// Environment variable read for the default worker count.
pub const THREADS_ENV: &str = "MAXWELL_FLOW_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Compare,
    Sweep,
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Usage,
    StateViolation,
    RateFailure,
    StructureFailure,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Usage => 1,
            Outcome::StateViolation => 2,
            Outcome::RateFailure => 3,
            Outcome::StructureFailure => 4,
        }
    }
}

/// A command failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub outcome: Outcome,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let outcome = match e {
            Error::State(_) | Error::Domain { .. } => Outcome::StateViolation,
            Error::DegenerateFit(_) => Outcome::RateFailure,
            _ => Outcome::Usage,
        };
        Failure {
            outcome,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        usage(format!("i/o error: {e}"))
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        outcome: Outcome::Usage,
        message: message.into(),
    }
}

/// Reads a config file, or returns the defaults when `path` is `None`.
pub fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, Failure> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    parse_config(&text).map_err(|e| usage(format!("config: {e}")))
}

/// Sizes the global rayon pool. Returns an error if it was already built.
pub fn configure_threads(threads: Option<usize>) -> Result<(), Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    builder
        .build_global()
        .map_err(|e| usage(format!("thread pool: {e}")))
}

/// Runs `cmd`, writing outputs under `cfg.output_dir` and a one-line
/// summary to `log`. On failure a `FAILED` marker with the message is left
/// in the output directory.
pub fn execute<W: Write>(cmd: Command, cfg: &ExperimentConfig, log: &mut W) -> Outcome {
    let dir = &cfg.output_dir;
    let marker = dir.join(FAILED_MARKER);
    let prepared = fs::create_dir_all(dir).and_then(|_| match fs::remove_file(&marker) {
        Err(e) if e.kind() != io::ErrorKind::NotFound => Err(e),
        _ => Ok(()),
    });
    if let Err(e) = prepared {
        let _ = writeln!(log, "error: cannot prepare {}: {e}", dir.display());
        return Outcome::Usage;
    }
    let result = match cmd {
        Command::Simulate => cmd_simulate(cfg, log),
        Command::Compare => cmd_compare(cfg, log),
        Command::Sweep => cmd_sweep(cfg, log),
        Command::Check => cmd_check(cfg, log),
    };
    match result {
        Ok(outcome) => outcome,
        Err(f) => {
            let _ = writeln!(log, "error: {f}");
            let _ = fs::write(&marker, format!("{f}\n"));
            f.outcome
        }
    }
}

fn state_failure(traj: &Trajectory) -> Option<Failure> {
    traj.failure.map(|v| Failure {
        outcome: Outcome::StateViolation,
        message: format!("{v} (t = {})", traj.times.last().copied().unwrap_or(0.0)),
    })
}

fn density_warning<W: Write>(cfg: &ExperimentConfig, log: &mut W) -> io::Result<()> {
    let min = cfg.initial_condition().min_density();
    if min < 0.5 {
        writeln!(log, "warning: initial density reaches {min}, below 0.5")?;
    }
    Ok(())
}

fn write_trajectory(dir: &Path, traj: &Trajectory) -> io::Result<()> {
    for (k, s) in traj.snapshots.iter().enumerate() {
        write_snapshot_file(&dir.join(format!("snapshot_{k:04}.bin")), &s.field, s.time, &traj.params)?;
        if s.field.grid().dim() == 1 {
            write_file(&dir.join(format!("snapshot_{k:04}.csv")), |o| write_relax_csv(o, &s.field))?;
        }
    }
    write_file(&dir.join("entropy.csv"), |o| write_entropy_csv(o, traj))
}

/// Relaxation run at the first `eps`: snapshot files and `entropy.csv`.
pub fn cmd_simulate<W: Write>(cfg: &ExperimentConfig, log: &mut W) -> Result<Outcome, Failure> {
    density_warning(cfg, log)?;
    let grid = cfg.grid().map_err(|e| usage(e.to_string()))?;
    let p = cfg.first_params();
    let init = cfg.initial_condition().relax_field(grid, &p)?;
    let traj = run(&init, &cfg.solver_config(), &p)?;
    write_trajectory(&cfg.output_dir, &traj)?;
    if let Some(f) = state_failure(&traj) {
        return Err(f);
    }
    writeln!(
        log,
        "simulate: eps {}, {} steps, {} snapshots in {}",
        p.eps1,
        traj.steps(),
        traj.snapshots.len(),
        cfg.output_dir.display()
    )?;
    Ok(Outcome::Success)
}

fn write_errors(path: &Path, series: &[ErrorSeries]) -> io::Result<()> {
    write_file(path, |o| {
        writeln!(o, "{}", ErrorSeries::CSV_HEADER)?;
        series.iter().try_for_each(|s| s.write_csv_rows(&mut *o))
    })
}

/// Relaxation run at the first `eps` against its reference: `errors.csv`.
pub fn cmd_compare<W: Write>(cfg: &ExperimentConfig, log: &mut W) -> Result<Outcome, Failure> {
    density_warning(cfg, log)?;
    let setup = cfg.comparison().map_err(|e| usage(e.to_string()))?;
    let eps = cfg.eps_list[0];
    let (errors, traj) = match cfg.compare_mode {
        CompareMode::Reference => {
            let reference = setup.reference()?;
            let run = setup.compare(&reference, eps)?;
            (run.errors, run.trajectory)
        }
        CompareMode::SelfCheck => {
            let a = setup.relaxation(eps)?;
            let b = setup.relaxation(eps)?;
            (error_between(eps, &a.snapshots, &b.snapshots, cfg.norm_order)?, a)
        }
    };
    write_errors(&cfg.output_dir.join("errors.csv"), std::slice::from_ref(&errors))?;
    write_file(&cfg.output_dir.join("entropy.csv"), |o| write_entropy_csv(o, &traj))?;
    writeln!(
        log,
        "compare: eps {eps}, {} snapshots, sup error {:e}",
        errors.rows.len(),
        errors.sup
    )?;
    Ok(Outcome::Success)
}

/// One-line verdict of a sweep.
pub fn verdict(fit: &RateFit, band: (f64, f64)) -> String {
    let pass = (band.0..=band.1).contains(&fit.slope);
    let ratios: Vec<String> = fit.pairwise_ratios().iter().map(|r| format!("{r:.3}")).collect();
    format!(
        "{} slope {:.4} (band [{}, {}]), K {:.4e}, fit residual {:.2e}, ratios [{}]",
        if pass { "PASS" } else { "FAIL" },
        fit.slope,
        band.0,
        band.1,
        fit.constant(),
        fit.residual,
        ratios.join(", ")
    )
}

/// Full `eps` sweep with rate fit: `errors.csv`, `rate.csv`, `verdict.txt`.
pub fn cmd_sweep<W: Write>(cfg: &ExperimentConfig, log: &mut W) -> Result<Outcome, Failure> {
    if cfg.eps_list.len() < 3 {
        return Err(usage(format!(
            "sweep needs at least 3 eps values, got {}",
            cfg.eps_list.len()
        )));
    }
    density_warning(cfg, log)?;
    let setup = cfg.comparison().map_err(|e| usage(e.to_string()))?;
    let sweep = setup.sweep(&cfg.eps_list)?;
    let series: Vec<ErrorSeries> = sweep.runs.iter().map(|r| r.errors.clone()).collect();
    write_errors(&cfg.output_dir.join("errors.csv"), &series)?;
    write_file(&cfg.output_dir.join("rate.csv"), |o| sweep.fit.write_csv(o))?;
    let line = verdict(&sweep.fit, cfg.slope_band);
    fs::write(cfg.output_dir.join("verdict.txt"), format!("{line}\n"))?;
    writeln!(log, "sweep: {line}")?;
    Ok(if sweep.within(cfg.slope_band) {
        Outcome::Success
    } else {
        Outcome::RateFailure
    })
}

/// Structural checks on sampled states: `structure.csv`.
pub fn cmd_check<W: Write>(cfg: &ExperimentConfig, log: &mut W) -> Result<Outcome, Failure> {
    let samples = sample_states(cfg.structure_samples, cfg.seed);
    let report = check_structure_with(
        &samples,
        &cfg.first_params(),
        cfg.structure_tol,
        cfg.corrupt_coupling,
    );
    write_file(&cfg.output_dir.join("structure.csv"), |o| report.write_csv(o))?;
    writeln!(log, "check: {report}")?;
    Ok(if report.passed {
        Outcome::Success
    } else {
        Outcome::StructureFailure
    })
}
