//! Artifact writers and readers. Profiles travel as CSV rows, events as
//! line-delimited JSON, reports as JSON documents. Every float is printed in
//! shortest round-trip decimal form, so re-importing an artifact reproduces
//! the original values bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::nonaut::CauchyStudy;
use crate::stepfn::StepFunction;
use crate::tracker::{EventRecord, Solution};
use crate::verify::ComparisonReport;

fn art_err(path: &Path, detail: String) -> Error {
    Error::Artifact(format!("{}: {detail}", path.display()))
}

/// Evenly spaced output times `0 = t_0 < … < t_n = horizon`.
pub fn profile_times(horizon: f64, samples: usize) -> Vec<f64> {
    (0..=samples)
        .map(|i| horizon * i as f64 / samples as f64)
        .collect()
}

/// One profile row: the time, then `[piece start, piece value]` pairs. The
/// first pair starts at the domain's left end, so a row with `2k` trailing
/// fields encodes `k` pieces.
fn profile_row(t: f64, profile: &StepFunction) -> String {
    let mut row = String::new();
    let _ = write!(row, "{t}");
    let mut start = profile.domain().lo;
    for (i, v) in profile.values().iter().enumerate() {
        let _ = write!(row, ",{start},{v}");
        if i < profile.breaks().len() {
            start = profile.breaks()[i];
        }
    }
    row
}

/// Write sampled profiles as CSV, one row per time.
pub fn write_profiles(path: &Path, rows: &[(f64, StepFunction)]) -> Result<()> {
    let mut text = String::new();
    for (t, profile) in rows {
        text.push_str(&profile_row(*t, profile));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn parse_field(path: &Path, line_no: usize, field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| art_err(path, format!("line {line_no}: bad float {field:?}")))
}

/// Re-import a profiles CSV written by [`write_profiles`]. The spatial
/// domain is not stored in the file and must be supplied.
pub fn read_profiles(path: &Path, domain: Interval) -> Result<Vec<(f64, StepFunction)>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| art_err(path, e.to_string()))?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 3 || fields.len() % 2 == 0 {
            return Err(art_err(
                path,
                format!("line {line_no}: expected t plus [start, value] pairs, got {} fields", fields.len()),
            ));
        }
        let t = parse_field(path, line_no, fields[0])?;
        let mut breaks = Vec::new();
        let mut values = Vec::new();
        for (i, pair) in fields[1..].chunks(2).enumerate() {
            let x = parse_field(path, line_no, pair[0])?;
            let v = parse_field(path, line_no, pair[1])?;
            if i == 0 {
                if x != domain.lo {
                    return Err(art_err(
                        path,
                        format!("line {line_no}: first piece starts at {x}, domain starts at {}", domain.lo),
                    ));
                }
            } else {
                breaks.push(x);
            }
            values.push(v);
        }
        let profile = StepFunction::new(domain, breaks, values)
            .map_err(|e| art_err(path, format!("line {line_no}: {e}")))?;
        rows.push((t, profile));
    }
    Ok(rows)
}

/// Write the full event log, one compact JSON record per line.
pub fn write_events(path: &Path, sol: &Solution) -> Result<()> {
    let mut text = String::new();
    for record in sol.records() {
        text.push_str(&serde_json::to_string(record)?);
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Re-import a line-delimited event log.
pub fn read_events(path: &Path) -> Result<Vec<EventRecord>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| art_err(path, e.to_string()))?;
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let record: EventRecord = serde_json::from_str(line)
            .map_err(|e| art_err(path, format!("line {}: {e}", idx + 1)))?;
        records.push(record);
    }
    Ok(records)
}

/// Write any report as pretty-printed JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| art_err(path, e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| art_err(path, e.to_string()))
}

/// Stability rows `(t, measured, bound, pass)` with a header line.
pub fn write_stability(path: &Path, report: &ComparisonReport) -> Result<()> {
    let mut text = String::from("t,measured,bound,pass\n");
    for i in 0..report.times.len() {
        let pass = report.distances[i]
            <= report.bounds[i] * (1.0 + crate::verify::COMPARISON_REL)
                + crate::verify::COMPARISON_ABS;
        let _ = writeln!(
            text,
            "{},{},{},{}",
            report.times[i], report.distances[i], report.bounds[i], pass
        );
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Depth-refinement rows `(depth, distance, bound, ratio)` with a header.
pub fn write_cauchy(path: &Path, study: &CauchyStudy) -> Result<()> {
    let mut text = String::from("depth,distance,bound,ratio\n");
    for row in &study.rows {
        let _ = writeln!(
            text,
            "{},{},{},{}",
            row.depth, row.distance, row.bound, row.ratio
        );
    }
    std::fs::write(path, text)?;
    Ok(())
}
