//! Snapshot and series files.
//!
//! Binary snapshots are a short text header terminated by a line `end`,
//! followed by the cell data as little-endian `f64`, cell-major in the
//! order of [`VAR_NAMES`]:
//!
//! ```text
//! maxwell-flow snapshot 1
//! dim 1
//! cells 512 1 1
//! dx 0.001953125 1 1
//! time 0.2
//! params nu=1 kappa=1 eps1=0.1 eps2=0.1 eos_a=1 eos_gamma=2
//! vars rho mx my mz tau1_xx tau1_yy tau1_xy tau1_xz tau1_yz tau2
//! end
//! ```

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::field::{NSField, RelaxField};
use crate::grid::Grid;
use crate::params::PhysParams;
use crate::relax_solver::Trajectory;
use crate::state::{RelaxState, NVARS, VAR_NAMES};

const MAGIC: &str = "maxwell-flow snapshot 1";

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

pub fn write_snapshot<W: Write>(mut out: W, field: &RelaxField, time: f64, p: &PhysParams) -> io::Result<()> {
    let g = field.grid();
    let c = g.cells();
    let dx = g.dx();
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "dim {}", g.dim())?;
    writeln!(out, "cells {} {} {}", c[0], c[1], c[2])?;
    writeln!(out, "dx {:e} {:e} {:e}", dx[0], dx[1], dx[2])?;
    writeln!(out, "time {time:e}")?;
    writeln!(
        out,
        "params nu={:e} kappa={:e} eps1={:e} eps2={:e} eos_a={:e} eos_gamma={:e}",
        p.nu, p.kappa, p.eps1, p.eps2, p.eos_a, p.eos_gamma
    )?;
    writeln!(out, "vars {}", VAR_NAMES.join(" "))?;
    writeln!(out, "end")?;
    for s in field.cells() {
        for v in s.to_array() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn write_snapshot_file(path: &Path, field: &RelaxField, time: f64, p: &PhysParams) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_snapshot(&mut out, field, time, p)?;
    out.flush()
}

/// A snapshot read back from [`write_snapshot`].
#[derive(Debug, Clone, PartialEq)]
pub struct StoredSnapshot {
    pub time: f64,
    pub params: PhysParams,
    pub field: RelaxField,
}

pub fn read_snapshot<R: Read>(input: R) -> io::Result<StoredSnapshot> {
    let mut input = BufReader::new(input);
    let mut header = Vec::new();
    loop {
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Err(invalid("header not terminated"));
        }
        let line = line.trim_end().to_string();
        if line == "end" {
            break;
        }
        header.push(line);
    }
    if header.first().map(String::as_str) != Some(MAGIC) {
        return Err(invalid("not a snapshot file"));
    }
    let value = |key: &str| -> io::Result<Vec<&str>> {
        header
            .iter()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
            .map(|r| r.split_whitespace().collect())
            .ok_or_else(|| invalid(format!("missing `{key}`")))
    };
    let num = |s: &str| s.parse::<f64>().map_err(|e| invalid(format!("`{s}`: {e}")));
    let dim: usize = value("dim")?[0].parse().map_err(|_| invalid("bad dim"))?;
    let cells: Vec<usize> = value("cells")?
        .iter()
        .map(|s| s.parse().map_err(|_| invalid("bad cells")))
        .collect::<io::Result<_>>()?;
    if cells.len() != 3 || !(1..=3).contains(&dim) {
        return Err(invalid("bad grid header"));
    }
    let grid = Grid::new(dim, &cells[..dim]).map_err(|e| invalid(e.to_string()))?;
    let time = num(value("time")?[0])?;
    let mut params = PhysParams::default();
    for kv in value("params")? {
        let (k, v) = kv.split_once('=').ok_or_else(|| invalid("bad params"))?;
        let v = num(v)?;
        match k {
            "nu" => params.nu = v,
            "kappa" => params.kappa = v,
            "eps1" => params.eps1 = v,
            "eps2" => params.eps2 = v,
            "eos_a" => params.eos_a = v,
            "eos_gamma" => params.eos_gamma = v,
            other => return Err(invalid(format!("unknown parameter `{other}`"))),
        }
    }
    let mut states = Vec::with_capacity(grid.len());
    let mut buf = [0u8; 8 * NVARS];
    for _ in 0..grid.len() {
        input.read_exact(&mut buf)?;
        let mut u = [0.0; NVARS];
        for (k, chunk) in buf.chunks_exact(8).enumerate() {
            u[k] = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        }
        states.push(RelaxState::from_array(&u));
    }
    let field = RelaxField::new(grid, states).map_err(|e| invalid(e.to_string()))?;
    Ok(StoredSnapshot { time, params, field })
}

fn coordinate_header(grid: &Grid) -> &'static str {
    ["x", "x,y", "x,y,z"][grid.dim() - 1]
}

fn write_coordinates<W: Write>(out: &mut W, grid: &Grid, i: usize) -> io::Result<()> {
    let x = grid.cell_center(i);
    for (a, xa) in x.iter().enumerate().take(grid.dim()) {
        if a > 0 {
            out.write_all(b",")?;
        }
        write!(out, "{xa:e}")?;
    }
    Ok(())
}

/// One row per cell: cell-centre coordinates then all unknowns.
pub fn write_relax_csv<W: Write>(mut out: W, field: &RelaxField) -> io::Result<()> {
    let g = field.grid();
    writeln!(out, "{},{}", coordinate_header(g), VAR_NAMES.join(","))?;
    for (i, s) in field.cells().iter().enumerate() {
        write_coordinates(&mut out, g, i)?;
        for v in s.to_array() {
            write!(out, ",{v:e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Like [`write_relax_csv`] with the closure stresses named `tau1_ce_*` and
/// `tau2_ce`.
pub fn write_ns_csv<W: Write>(mut out: W, field: &NSField) -> io::Result<()> {
    let g = field.grid();
    writeln!(
        out,
        "{},rho,mx,my,mz,tau1_ce_xx,tau1_ce_yy,tau1_ce_xy,tau1_ce_xz,tau1_ce_yz,tau2_ce",
        coordinate_header(g)
    )?;
    for (i, u) in field.to_relax_field().cells().iter().enumerate() {
        write_coordinates(&mut out, g, i)?;
        for v in u.to_array() {
            write!(out, ",{v:e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Per-step entropy series: `step,time,dt,entropy,dissipation`, where `dt`
/// is the step that ended at `time` (0 on the first row).
pub fn write_entropy_csv<W: Write>(mut out: W, traj: &Trajectory) -> io::Result<()> {
    writeln!(out, "step,time,dt,entropy,dissipation")?;
    for n in 0..traj.times.len() {
        let dt = if n == 0 { 0.0 } else { traj.dt[n - 1] };
        writeln!(
            out,
            "{n},{:e},{dt:e},{:e},{:e}",
            traj.times[n], traj.entropy[n], traj.dissipation[n]
        )?;
    }
    Ok(())
}

pub fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    f(&mut out)?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::FlowState;
    use crate::tensor::SymTraceless3;

    fn field() -> RelaxField {
        let g = Grid::new_2d(6, 4).unwrap();
        RelaxField::from_fn(g, |x| RelaxState {
            rho: 1.0 + x[0],
            mom: [x[1], -x[0], 0.1],
            tau1: SymTraceless3::from_components([0.1, x[0], 0.3, -0.2, x[1]]),
            tau2: 1.0 / 3.0,
        })
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let f = field();
        let p = PhysParams::default().with_eps(0.0125);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.1 + 0.2, &p).unwrap();
        let back = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back.field, f);
        assert_eq!(back.time, 0.1 + 0.2);
        assert_eq!(back.params, p);
    }

    #[test]
    fn truncated_binary_is_rejected() {
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &field(), 0.0, &PhysParams::default()).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_snapshot(buf.as_slice()).is_err());
        assert!(read_snapshot(&b"hello\nend\n"[..]).is_err());
    }

    #[test]
    fn csv_columns() {
        let g = Grid::new_1d(8).unwrap();
        let f = RelaxField::uniform(g, RelaxState::at_rest(1.0));
        let mut buf = Vec::new();
        write_relax_csv(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "x,rho,mx,my,mz,tau1_xx,tau1_yy,tau1_xy,tau1_xz,tau1_yz,tau2"
        );
        assert_eq!(lines.count(), 8);

        let p = PhysParams::default();
        let ns = NSField::from_fn(g, &p, |_| FlowState {
            rho: 1.0,
            mom: [0.0; 3],
        })
        .unwrap();
        let mut buf = Vec::new();
        write_ns_csv(&mut buf, &ns).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.ends_with("tau1_ce_yz,tau2_ce"));
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 11));
    }
}
