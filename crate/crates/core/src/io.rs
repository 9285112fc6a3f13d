//! Snapshot and time-series files.
//!
//! Snapshots are plain text: a header `# n N t` followed by one `theta rho`
//! pair per node, all floats with 17 significant digits so that a reload is
//! bit-identical.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::graph::RadialGraph;
use crate::grid::{GridKind, SphereGrid};

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_snapshot(path: &Path, graph: &RadialGraph, t: f64) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "# {} {} {}", graph.dimension(), graph.len(), fmt(t))?;
    for (theta, rho) in graph.grid().theta().iter().zip(graph.rho()) {
        writeln!(out, "{} {}", fmt(*theta), fmt(*rho))?;
    }
    out.flush()?;
    Ok(())
}

/// Reload a snapshot; returns the graph (about the origin) and its time.
pub fn read_snapshot(path: &Path) -> Result<(RadialGraph, f64)> {
    let bad = |msg: String| Error::Io(format!("{}: {msg}", path.display()));
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines.next().ok_or_else(|| bad("empty snapshot".into()))??;
    let fields: Vec<&str> = header
        .strip_prefix('#')
        .ok_or_else(|| bad("missing '# n N t' header".into()))?
        .split_whitespace()
        .collect();
    if fields.len() != 3 {
        return Err(bad(format!("malformed header {header:?}")));
    }
    let n: usize = fields[0].parse().map_err(|_| bad("bad n".into()))?;
    let nodes: usize = fields[1].parse().map_err(|_| bad("bad N".into()))?;
    let t: f64 = fields[2].parse().map_err(|_| bad("bad t".into()))?;
    let grid = SphereGrid::new(GridKind::from_dimension(n)?, nodes)?;

    let mut rho = Vec::with_capacity(nodes);
    for (j, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let theta: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(format!("bad theta on line {}", j + 2)))?;
        let r: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(format!("bad rho on line {}", j + 2)))?;
        if grid.theta().get(rho.len()) != Some(&theta) {
            return Err(bad(format!("theta on line {} does not match the grid", j + 2)));
        }
        rho.push(r);
    }
    Ok((RadialGraph::new(grid, rho)?, t))
}

/// Column names of the diagnostics series for dimension `n`.
pub fn series_header(n: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string(), "volume".to_string(), "A_minus1".to_string()];
    cols.extend((0..=n).map(|k| format!("A_{k}")));
    cols.extend(
        [
            "Kbar",
            "osc_K_L1",
            "kappa_min",
            "K_max",
            "b_max",
            "r_fit",
            "hausdorff_proxy",
            "osc_rho",
            "dA_pred",
        ]
        .map(String::from),
    );
    cols
}

fn series_row(r: &DiagnosticsRecord) -> Vec<String> {
    let mut row = vec![fmt(r.t), fmt(r.volume)];
    row.extend(r.quermass.iter().map(|v| fmt(*v)));
    row.extend(
        [
            r.kbar,
            r.osc_k_l1,
            r.kappa_min,
            r.k_max,
            r.b_max,
            r.r_fit,
            r.hausdorff_proxy,
            r.osc_rho,
            r.da_pred,
        ]
        .map(fmt),
    );
    row
}

pub fn write_series(path: &Path, n: usize, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    w.write_record(series_header(n)).map_err(|e| Error::Io(e.to_string()))?;
    for r in records {
        w.write_record(series_row(r)).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// One parsed row of `series.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub volume: f64,
    pub quermass: Vec<f64>,
    pub kbar: f64,
    pub osc_k_l1: f64,
    pub kappa_min: f64,
    pub k_max: f64,
    pub b_max: f64,
    pub r_fit: f64,
    pub hausdorff_proxy: f64,
    pub osc_rho: f64,
    pub da_pred: f64,
}

/// Read a series file; returns the dimension inferred from the columns and
/// the rows.
pub fn read_series(path: &Path) -> Result<(usize, Vec<SeriesRow>)> {
    let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(io)?;
    let header: Vec<String> = rdr.headers().map_err(io)?.iter().map(String::from).collect();
    let n = match header.len() {
        l if l == series_header(1).len() && header == series_header(1) => 1,
        l if l == series_header(2).len() && header == series_header(2) => 2,
        _ => return Err(Error::Io(format!("{}: unrecognized series header", path.display()))),
    };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(io)?;
        let v: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let q = n + 2;
        let tail = &v[2 + q..];
        rows.push(SeriesRow {
            t: v[0],
            volume: v[1],
            quermass: v[2..2 + q].to_vec(),
            kbar: tail[0],
            osc_k_l1: tail[1],
            kappa_min: tail[2],
            k_max: tail[3],
            b_max: tail[4],
            r_fit: tail[5],
            hausdorff_proxy: tail[6],
            osc_rho: tail[7],
            da_pred: tail[8],
        });
    }
    Ok((n, rows))
}
