//! CSV and metadata files.
//!
//! Every writer has a matching reader; floats are written with 17
//! significant digits so a write/read cycle reproduces them bit for bit.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{BenchRow, DiagnosticsRow, ErrorRow, ErrorTable, Refinement, RunConfig};
use crate::error::{Error, Result};
use crate::model::{phi_magnitude, State};
use crate::spectral::{GridSpec, RealField};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const ERRORS_TIME_FILE: &str = "errors_time.csv";
pub const ERRORS_SPACE_FILE: &str = "errors_space.csv";
pub const FIELDS_FILE: &str = "fields.csv";
pub const BENCH_FILE: &str = "bench.csv";
pub const METADATA_FILE: &str = "metadata.toml";

const DIAGNOSTICS_HEADER: [&str; 7] = ["step", "t", "mass", "energy", "rm", "rh", "iters"];
const BENCH_HEADER: [&str; 4] = ["scheme", "steps", "iterations", "seconds"];

/// `x` with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: `{s}`")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a count: `{s}`")))
}

fn open(path: &Path, expected: &[&str]) -> Result<csv::Reader<fs::File>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<&str> = rdr.headers()?.iter().collect();
    if header != expected {
        return Err(Error::Parse(format!(
            "{}: expected header {}, found {}",
            path.display(),
            expected.join(","),
            header.join(",")
        )));
    }
    Ok(rdr)
}

pub fn write_diagnostics(path: &Path, rows: &[DiagnosticsRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(DIAGNOSTICS_HEADER)?;
    for r in rows {
        w.write_record([
            r.step.to_string(),
            fmt_float(r.t),
            fmt_float(r.mass),
            fmt_float(r.energy),
            fmt_float(r.rm),
            fmt_float(r.rh),
            r.iters.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRow>> {
    let mut rdr = open(path, &DIAGNOSTICS_HEADER)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok(DiagnosticsRow {
                step: parse_usize(&rec[0])?,
                t: parse_f64(&rec[1])?,
                mass: parse_f64(&rec[2])?,
                energy: parse_f64(&rec[3])?,
                rm: parse_f64(&rec[4])?,
                rh: parse_f64(&rec[5])?,
                iters: parse_usize(&rec[6])?,
            })
        })
        .collect()
}

fn error_header(kind: Refinement) -> [&'static str; 3] {
    match kind {
        Refinement::Time => ["tau", "error", "order"],
        Refinement::Space => ["n", "error", "order"],
    }
}

pub fn write_error_table(path: &Path, table: &ErrorTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(error_header(table.refinement))?;
    for r in &table.rows {
        let param = match table.refinement {
            Refinement::Time => fmt_float(r.param),
            Refinement::Space => (r.param as usize).to_string(),
        };
        let order = r.order.map(fmt_float).unwrap_or_default();
        w.write_record([param, fmt_float(r.error), order])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads either table kind; the first header column decides which.
pub fn read_error_table(path: &Path) -> Result<ErrorTable> {
    let first = csv::Reader::from_path(path)?
        .headers()?
        .get(0)
        .unwrap_or_default()
        .to_string();
    let refinement = if first == "n" {
        Refinement::Space
    } else {
        Refinement::Time
    };
    let mut rdr = open(path, &error_header(refinement))?;
    let rows = rdr
        .records()
        .map(|rec| {
            let rec = rec?;
            let order = match rec[2].trim() {
                "" => None,
                s => Some(parse_f64(s)?),
            };
            Ok(ErrorRow {
                param: parse_f64(&rec[0])?,
                error: parse_f64(&rec[1])?,
                order,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorTable { refinement, rows })
}

fn fields_header(dim: usize) -> Vec<&'static str> {
    let mut h = if dim == 1 { vec!["x"] } else { vec!["x", "y"] };
    h.extend(["u", "v", "p", "q", "abs_phi"]);
    h
}

/// One row per node: coordinates, the four fields and `|φ|`.
pub fn write_fields(path: &Path, state: &State) -> Result<()> {
    let grid = state.grid();
    let dim = grid.dim();
    let abs_phi = phi_magnitude(state);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(fields_header(dim))?;
    for i in 0..grid.len() {
        let c = grid.coords(i);
        let mut rec: Vec<String> = c[..dim].iter().map(|&x| fmt_float(x)).collect();
        for f in [&state.u, &state.v, &state.p, &state.q, &abs_phi] {
            rec.push(fmt_float(f.values()[i]));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a snapshot back onto `grid`; rows must list the grid nodes in order.
pub fn read_fields(path: &Path, grid: &GridSpec) -> Result<State> {
    let dim = grid.dim();
    let mut rdr = open(path, &fields_header(dim))?;
    let mut cols: Vec<Vec<f64>> = (0..4).map(|_| Vec::with_capacity(grid.len())).collect();
    let tol = grid.axes().iter().map(|a| a.length()).fold(0.0, f64::max) * 1e-9;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if i >= grid.len() {
            return Err(Error::Shape(format!(
                "{}: more rows than the {} grid nodes",
                path.display(),
                grid.len()
            )));
        }
        let c = grid.coords(i);
        for d in 0..dim {
            let x = parse_f64(&rec[d])?;
            if (x - c[d]).abs() > tol {
                return Err(Error::Shape(format!(
                    "{}: row {} sits at {x}, expected node {}",
                    path.display(),
                    i + 1,
                    c[d]
                )));
            }
        }
        for (k, col) in cols.iter_mut().enumerate() {
            col.push(parse_f64(&rec[dim + k])?);
        }
    }
    if cols[0].len() != grid.len() {
        return Err(Error::Shape(format!(
            "{}: {} rows for {} grid nodes",
            path.display(),
            cols[0].len(),
            grid.len()
        )));
    }
    let mut it = cols.into_iter().map(|c| RealField::new(grid, c));
    let mut next = || it.next().expect("four columns");
    State::from_fields(next()?, next()?, next()?, next()?, 0.0)
}

pub fn write_bench(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(BENCH_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheme.name().to_string(),
            r.steps.to_string(),
            r.iterations.to_string(),
            fmt_float(r.seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_bench(path: &Path) -> Result<Vec<BenchRow>> {
    let mut rdr = open(path, &BENCH_HEADER)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok(BenchRow {
                scheme: rec[0].parse()?,
                steps: parse_usize(&rec[1])?,
                iterations: parse_usize(&rec[2])?,
                seconds: parse_f64(&rec[3])?,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    config: &'a RunConfig,
}

/// Records the command and the resolved configuration (including the `u`
/// variant used by ex41).
pub fn write_metadata(path: &Path, command: &str, config: &RunConfig) -> Result<()> {
    let meta = Metadata {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
    };
    let text = toml::to_string(&meta).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

/// Reads back the configuration stored by [`write_metadata`].
pub fn read_metadata(path: &Path) -> Result<RunConfig> {
    #[derive(serde::Deserialize)]
    struct Stored {
        config: RunConfig,
    }
    let text = fs::read_to_string(path)?;
    let stored: Stored = toml::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(stored.config)
}
