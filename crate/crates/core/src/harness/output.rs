use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{RunRecord, RunStatus, Scheme};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => invalid(format!("unknown output format `{s}`, expected csv or json")),
        }
    }
}

/// Means over the runs of one `(r_max, scheme)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub r_max: f64,
    pub scheme: Scheme,
    pub n_runs: usize,
    pub mean_n_associated: f64,
    pub mean_n_satisfied: f64,
    pub mean_sum_rate_bps: f64,
    pub mean_rf_chains_used_step1: f64,
    pub n_budget_exhausted: usize,
}

/// Groups in order of first appearance, so a sweep's aggregate follows the
/// sweep order and the experiment's scheme order.
pub fn aggregate(records: &[RunRecord]) -> Vec<Aggregate> {
    let mut keys: Vec<(u64, Scheme)> = Vec::new();
    for r in records {
        let k = (r.r_max.to_bits(), r.scheme);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(bits, scheme)| {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.r_max.to_bits() == bits && r.scheme == scheme)
                .collect();
            let n = group.len() as f64;
            let mean = |f: &dyn Fn(&RunRecord) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / n;
            Aggregate {
                r_max: f64::from_bits(bits),
                scheme,
                n_runs: group.len(),
                mean_n_associated: mean(&|r| r.n_associated as f64),
                mean_n_satisfied: mean(&|r| r.n_satisfied as f64),
                mean_sum_rate_bps: mean(&|r| r.sum_rate_bps),
                mean_rf_chains_used_step1: mean(&|r| r.rf_chains_used_step1 as f64),
                n_budget_exhausted: group
                    .iter()
                    .filter(|r| r.status == RunStatus::BudgetExhausted)
                    .count(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedFiles {
    pub records: PathBuf,
    pub aggregate: PathBuf,
}

/// Writes `records.<ext>` and `aggregate.<ext>` into `dir`, creating it if
/// needed.
pub fn emit_results(
    records: &[RunRecord],
    format: OutputFormat,
    dir: impl AsRef<Path>,
) -> Result<EmittedFiles> {
    if records.is_empty() {
        return invalid("no records to write");
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let files = EmittedFiles {
        records: dir.join(format!("records.{}", format.extension())),
        aggregate: dir.join(format!("aggregate.{}", format.extension())),
    };
    let agg = aggregate(records);
    match format {
        OutputFormat::Csv => {
            write_csv(records, File::create(&files.records)?)?;
            write_csv(&agg, File::create(&files.aggregate)?)?;
        }
        OutputFormat::Json => {
            write_json(records, File::create(&files.records)?)?;
            write_json(&agg, File::create(&files.aggregate)?)?;
        }
    }
    Ok(files)
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    serde_json::to_writer_pretty(&mut w, rows)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_records_csv(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

pub fn read_records_json(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
