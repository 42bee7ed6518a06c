//! CSV formats: data sets (`x0,...,x{d-1}[,y]`), per-trial results and
//! per-axis medians.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use superteach::harness::{SummaryRow, TrialRecord};
use superteach::{Example, TrainingSet};

use crate::Failure;

pub const RESULTS_HEADER: [&str; 12] = [
    "task",
    "teacher",
    "n",
    "d",
    "trial",
    "seed",
    "risk_full",
    "risk_subset",
    "ratio",
    "subset_size",
    "wall_ms",
    "error",
];

pub const MEDIANS_HEADER: [&str; 4] = ["n_or_d", "median_ratio", "median_subset_fraction", "median_time_s"];

/// 17 significant digits, enough to round-trip any f64.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// How coordinates and labels are rendered in a data CSV.
#[derive(Debug, Clone, Copy)]
pub struct DataFormat {
    pub integer_x: bool,
    pub integer_y: bool,
}

fn render(v: f64, integer: bool) -> String {
    if integer {
        format!("{}", v as i64)
    } else {
        num(v)
    }
}

/// Opens `path` for writing, or standard output when absent.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(io::BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Failure::runtime(format!("cannot create {}: {e}", p.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn write_failed(e: impl std::fmt::Display) -> Failure {
    Failure::runtime(format!("write failed: {e}"))
}

pub fn data_header(d: usize, labeled: bool) -> Vec<String> {
    let mut header: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
    if labeled {
        header.push("y".into());
    }
    header
}

/// Writes `set` with an optional extra 0/1 column marking selected rows.
pub fn write_data(
    set: &TrainingSet,
    format: DataFormat,
    selected: Option<&[bool]>,
    out: impl Write,
) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = data_header(set.dim(), set.is_labeled());
    if selected.is_some() {
        header.push("selected".into());
    }
    w.write_record(&header).map_err(write_failed)?;
    for (i, e) in set.examples().iter().enumerate() {
        let mut row: Vec<String> = e.x.iter().map(|&v| render(v, format.integer_x)).collect();
        if let Some(y) = e.y {
            row.push(render(y, format.integer_y));
        }
        if let Some(sel) = selected {
            row.push(if sel[i] { "1" } else { "0" }.into());
        }
        w.write_record(&row).map_err(write_failed)?;
    }
    w.flush().map_err(write_failed)
}

/// Reads a data CSV; the header must be exactly `x0..x{d-1}` with an
/// optional trailing `y`.
pub fn read_data(path: &Path) -> Result<TrainingSet, Failure> {
    let bad = |msg: String| Failure::usage(format!("{}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let labeled = header.last().map(String::as_str) == Some("y");
    let d = header.len() - usize::from(labeled);
    if d == 0 || header != data_header(d, labeled) {
        return Err(bad(format!(
            "expected header x0,...,x{{d-1}}[,y], got {}",
            header.join(",")
        )));
    }
    let mut examples = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let values: Vec<f64> = record
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", line + 1)))?;
        examples.push(if labeled {
            Example::labeled(values[..d].to_vec(), values[d])
        } else {
            Example::unlabeled(values)
        });
    }
    TrainingSet::new(d, examples).map_err(|e| bad(e.to_string()))
}

pub fn write_results(records: &[TrialRecord], omit_timing: bool, out: impl Write) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER).map_err(write_failed)?;
    for r in records {
        let wall_ms = if omit_timing {
            0.0
        } else {
            r.wall_time.as_secs_f64() * 1e3
        };
        w.write_record([
            r.task.clone(),
            r.teacher.clone(),
            r.n.to_string(),
            r.d.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            opt_num(r.risk_full),
            opt_num(r.risk_subset),
            opt_num(r.ratio),
            r.subset_size.map(|k| k.to_string()).unwrap_or_default(),
            num(wall_ms),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(write_failed)?;
    }
    w.flush().map_err(write_failed)
}

pub fn write_medians(rows: &[SummaryRow], omit_timing: bool, out: impl Write) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MEDIANS_HEADER).map_err(write_failed)?;
    for row in rows {
        let time = if omit_timing { 0.0 } else { row.median_time_s };
        w.write_record([
            row.key.to_string(),
            opt_num(row.median_ratio),
            opt_num(row.median_subset_fraction),
            num(time),
        ])
        .map_err(write_failed)?;
    }
    w.flush().map_err(write_failed)
}

/// One results row, reduced to the columns the rate fit needs.
#[derive(Debug, serde::Deserialize)]
pub struct RiskRow {
    pub n: usize,
    pub risk_full: Option<f64>,
    pub risk_subset: Option<f64>,
}

pub fn read_risk_rows(path: &Path) -> Result<Vec<RiskRow>, Failure> {
    let bad = |msg: String| Failure::usage(format!("{}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    for column in ["n", "risk_full", "risk_subset"] {
        if !header.iter().any(|h| h == column) {
            return Err(bad(format!("missing column `{column}`")));
        }
    }
    r.deserialize().map(|row| row.map_err(|e| bad(e.to_string()))).collect()
}
