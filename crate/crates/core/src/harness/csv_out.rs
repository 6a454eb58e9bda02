use std::io::Write;
use std::path::Path;

use super::{HarnessError, RunRecord};

pub const CSV_HEADER: [&str; 14] = [
    "benchmark",
    "config",
    "ratio",
    "mode",
    "dfo",
    "typing",
    "time_s",
    "reps",
    "trans_ops",
    "proxy_allocs",
    "heap_allocs",
    "float_boxes",
    "germ_checks",
    "outcome",
];

fn row(r: &RunRecord) -> [String; 14] {
    let c = &r.counters;
    // A run that failed a cast has no meaningful time.
    let time = if r.outcome.is_blame() { String::new() } else { format!("{:.6}", r.time_s) };
    [
        r.benchmark.clone(),
        r.config.clone(),
        format!("{:.4}", r.ratio),
        r.mode.to_string(),
        r.dfo.to_string(),
        r.typing.name().to_string(),
        time,
        r.reps.to_string(),
        c.trans_ops.to_string(),
        c.proxy_allocs.to_string(),
        c.heap_allocs.to_string(),
        c.float_boxes.to_string(),
        c.germ_checks.to_string(),
        r.outcome.label().to_string(),
    ]
}

/// Writes records sorted by benchmark and ratio after the fixed header.
pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<(), csv::Error> {
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.benchmark.cmp(&b.benchmark).then(a.ratio.total_cmp(&b.ratio)));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in sorted {
        w.write_record(row(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[RunRecord], path: &Path) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    write_csv(records, file).map_err(|source| HarnessError::Csv { path: path.to_path_buf(), source })
}
