use std::path::Path;

use super::runner::ExperimentResult;
use crate::error::{Error, Result};

/// A numeric table as written to CSV. Missing cells are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Metadata line, without the leading `#`.
    pub metadata: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

/// Scientific notation with ten significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.9e}")
}

/// The value that survives a CSV round trip.
pub fn round_value(x: f64) -> f64 {
    format_value(x).parse().expect("formatted float parses")
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Metadata value for `key` in `key=value` pairs.
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .split_whitespace()
            .find_map(|kv| kv.strip_prefix(key).and_then(|rest| rest.strip_prefix('=')))
    }

    /// Distinct algorithm labels, in column order.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for h in &self.header {
            if let Some((_, label)) = h.split_once(':') {
                if !out.iter().any(|l| l == label) {
                    out.push(label.to_string());
                }
            }
        }
        out
    }

    pub fn is_sweep(&self) -> bool {
        self.header.first().is_some_and(|h| h == "sweep_value")
    }
}

fn cell(v: Option<f64>) -> Option<f64> {
    v.map(round_value)
}

fn metadata(result: &ExperimentResult) -> String {
    format!(
        "name={} spec_sha256={} seed={} trials={} provenance={}",
        result.name,
        result.spec_hash,
        result.seed,
        result.num_trials,
        result.provenance.replace(' ', "_")
    )
}

/// Sweep runs give one row per sweep value with data-phase BER and final
/// MSE per algorithm. Other runs give one row per symbol with the learning
/// curves and any structural traces.
pub fn result_table(result: &ExperimentResult) -> Table {
    let metadata = metadata(result);
    if result.sweep_axis.is_some() {
        let mut header = vec!["sweep_value".to_string(), "mmse".to_string()];
        if let Some(p) = result.points.first() {
            for a in &p.algorithms {
                header.push(format!("ber:{}", a.label));
                header.push(format!("mse_final:{}", a.label));
            }
        }
        let rows = result
            .points
            .iter()
            .map(|p| {
                let mut row = vec![cell(p.sweep_value), cell(Some(p.mean_mmse))];
                for a in &p.algorithms {
                    row.push(cell(a.data_ber()));
                    row.push(cell(Some(a.final_mse)));
                }
                row
            })
            .collect();
        return Table { metadata, header, rows };
    }

    let point = &result.points[0];
    let n = result.num_training_symbols + result.num_data_symbols;
    let mut header = vec!["symbol_index".to_string()];
    let mut columns: Vec<&[f64]> = Vec::new();
    for a in &point.algorithms {
        header.push(format!("mse:{}", a.label));
        columns.push(&a.mse_curve);
        header.push(format!("ber:{}", a.label));
        columns.push(&a.ber_curve);
        for (name, trace) in [
            ("branch", &a.traces.branch),
            ("branches", &a.traces.branches_evaluated),
            ("order", &a.traces.order),
        ] {
            if let Some(t) = trace {
                header.push(format!("{name}:{}", a.label));
                columns.push(t);
            }
        }
    }
    let rows = (0..n)
        .map(|i| {
            let mut row = vec![Some(i as f64)];
            row.extend(columns.iter().map(|c| cell(c.get(i).copied())));
            row
        })
        .collect();
    Table { metadata, header, rows }
}

pub fn write_table(table: &Table, path: &Path) -> Result<()> {
    let mut text = format!("# {}\n", table.metadata);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header)?;
    let indexed = table.header.first().is_some_and(|h| h == "symbol_index");
    for row in &table.rows {
        w.write_record(row.iter().enumerate().map(|(col, v)| match v {
            Some(x) if col == 0 && indexed && x.fract() == 0.0 && *x >= 0.0 => format!("{}", *x as u64),
            Some(x) => format_value(*x),
            None => String::new(),
        }))?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    text.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    std::fs::write(path, text)?;
    Ok(())
}

pub fn export_csv(result: &ExperimentResult, path: &Path) -> Result<Table> {
    let table = result_table(result);
    write_table(&table, path)?;
    Ok(table)
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path)?;
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let (first, body) = text.split_once('\n').unwrap_or((text.as_str(), ""));
    let metadata = first
        .strip_prefix('#')
        .ok_or_else(|| parse_err("missing metadata line".into()))?
        .trim()
        .to_string();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse::<f64>()
                        .map(Some)
                        .map_err(|_| parse_err(format!("bad number `{s}`")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(Table { metadata, header, rows })
}
