//! CSV formats owned by the CLI. Headers are fixed strings:
//! `repeat_id,first_success_iter` (empty field = no success),
//! `iter,successes,n`, `p1,p2,n,frac_correct_order,frac_no_overlap`,
//! and `p_true,trial,rel_error`.

use crate::errors::{io, CliError, CliResult};
use repeatstat::metrics::{RunRecord, SuccessCurve};
use repeatstat::sim::ComparisonRow;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct CurveRow {
    iter: u64,
    successes: u64,
    n: u64,
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for rec in records {
        writer.serialize(rec).map_err(csv_err(path))?;
    }
    writer.flush().map_err(|e| io("flushing records CSV", e))
}

pub fn read_records(path: &Path) -> CliResult<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut records = Vec::new();
    for row in reader.deserialize() {
        let rec: RunRecord = row.map_err(csv_err(path))?;
        records.push(rec);
    }
    Ok(records)
}

pub fn write_curve(path: &Path, curve: &SuccessCurve) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for (iter, successes) in curve.iter_counts() {
        writer
            .serialize(CurveRow {
                iter,
                successes,
                n: curve.repeats(),
            })
            .map_err(csv_err(path))?;
    }
    writer.flush().map_err(|e| io("flushing curve CSV", e))
}

pub fn read_curve(path: &Path) -> CliResult<SuccessCurve> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut counts = Vec::new();
    let mut repeats: Option<u64> = None;
    for (idx, row) in reader.deserialize().enumerate() {
        let row: CurveRow = row.map_err(csv_err(path))?;
        let expected = idx as u64 + 1;
        if row.iter != expected {
            return Err(CliError::Data(format!(
                "{}: curve rows must cover budgets 1..k in order; row {} has iter {}",
                path.display(),
                idx + 1,
                row.iter
            )));
        }
        match repeats {
            None => repeats = Some(row.n),
            Some(n) if n != row.n => {
                return Err(CliError::Data(format!(
                    "{}: inconsistent repeat count (rows carry both {n} and {})",
                    path.display(),
                    row.n
                )));
            }
            _ => {}
        }
        counts.push(row.successes);
    }
    let n = repeats.ok_or_else(|| CliError::Data(format!("{}: empty curve", path.display())))?;
    SuccessCurve::from_cumulative(counts, n).map_err(crate::errors::data)
}

pub fn write_compare(path: &Path, rows: &[ComparisonRow]) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_err(path))?;
    writer
        .write_record(["p1", "p2", "n", "frac_correct_order", "frac_no_overlap"])
        .map_err(csv_err(path))?;
    for row in rows {
        writer
            .write_record([
                row.p1.to_string(),
                row.p2.to_string(),
                row.n.to_string(),
                row.frac_correct_order.to_string(),
                row.frac_no_overlap.to_string(),
            ])
            .map_err(csv_err(path))?;
    }
    writer.flush().map_err(|e| io("flushing comparison CSV", e))
}

pub fn write_relerr(path: &Path, stats: &[repeatstat::sim::RelErrStats]) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_err(path))?;
    writer
        .write_record(["p_true", "trial", "rel_error"])
        .map_err(csv_err(path))?;
    for stat in stats {
        for (trial, err) in stat.rel_errors.iter().enumerate() {
            writer
                .write_record([stat.p_true.to_string(), trial.to_string(), err.to_string()])
                .map_err(csv_err(path))?;
        }
    }
    writer
        .flush()
        .map_err(|e| io("flushing relative-error CSV", e))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}
