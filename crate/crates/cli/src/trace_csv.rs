//! Plot-ready CSV export of solver traces.

use std::path::Path;

use gfista::{Trace, TraceRecord};

pub const CSV_HEADER: [&str; 11] = [
    "k",
    "objective",
    "gap",
    "relative_gap",
    "lipschitz_estimate",
    "tau",
    "t_k",
    "omega_k",
    "beta_k",
    "n_backtracks",
    "certificate_bound",
];

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("trace is empty")]
    Empty,
    #[error("{path}: row {row}: {message}")]
    Malformed { path: String, row: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One CSV row: the plotted subset of a [`TraceRecord`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub k: usize,
    pub objective: f64,
    pub gap: Option<f64>,
    pub relative_gap: Option<f64>,
    pub lipschitz_estimate: f64,
    pub tau: f64,
    pub t_k: f64,
    pub omega_k: f64,
    pub beta_k: f64,
    pub n_backtracks: usize,
    pub certificate_bound: Option<f64>,
}

impl From<&TraceRecord> for CsvRecord {
    fn from(r: &TraceRecord) -> Self {
        Self {
            k: r.k,
            objective: r.objective,
            gap: r.gap,
            relative_gap: r.relative_gap,
            lipschitz_estimate: r.lipschitz_estimate,
            tau: r.tau,
            t_k: r.t_k,
            omega_k: r.omega_k,
            beta_k: r.beta_k,
            n_backtracks: r.n_backtracks,
            certificate_bound: r.certificate_bound,
        }
    }
}

/// 17 significant digits, enough to reproduce every `f64` exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_optional(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

pub fn write_records<W: std::io::Write>(records: &[CsvRecord], out: W) -> Result<(), CsvError> {
    if records.is_empty() {
        return Err(CsvError::Empty);
    }
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for r in records {
        writer.write_record([
            r.k.to_string(),
            format_float(r.objective),
            format_optional(r.gap),
            format_optional(r.relative_gap),
            format_float(r.lipschitz_estimate),
            format_float(r.tau),
            format_float(r.t_k),
            format_float(r.omega_k),
            format_float(r.beta_k),
            r.n_backtracks.to_string(),
            format_optional(r.certificate_bound),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn emit_csv<P>(trace: &Trace<P>, path: impl AsRef<Path>) -> Result<(), CsvError> {
    let records: Vec<CsvRecord> = trace.records.iter().map(CsvRecord::from).collect();
    write_records(&records, std::fs::File::create(path)?)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRecord>, CsvError> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(CsvError::Malformed {
            path: name,
            row: 0,
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let bad = |message: String| CsvError::Malformed {
            path: name.clone(),
            row: i + 1,
            message,
        };
        let float = |j: usize| row[j].parse::<f64>().map_err(|e| bad(format!("{}: {e}", CSV_HEADER[j])));
        let optional = |j: usize| if row[j].is_empty() { Ok(None) } else { float(j).map(Some) };
        let integer = |j: usize| row[j].parse::<usize>().map_err(|e| bad(format!("{}: {e}", CSV_HEADER[j])));
        out.push(CsvRecord {
            k: integer(0)?,
            objective: float(1)?,
            gap: optional(2)?,
            relative_gap: optional(3)?,
            lipschitz_estimate: float(4)?,
            tau: float(5)?,
            t_k: float(6)?,
            omega_k: float(7)?,
            beta_k: float(8)?,
            n_backtracks: integer(9)?,
            certificate_bound: optional(10)?,
        });
    }
    Ok(out)
}

/// First row whose gap exceeds its bound by more than
/// `rel_slack (1 + |F*|)`, with `F* = objective - gap`.
pub fn first_violation(records: &[CsvRecord], rel_slack: f64) -> Option<&CsvRecord> {
    records.iter().find(|r| match (r.gap, r.certificate_bound) {
        (Some(gap), Some(bound)) => gap > bound + rel_slack * (1.0 + (r.objective - gap).abs()),
        _ => false,
    })
}
