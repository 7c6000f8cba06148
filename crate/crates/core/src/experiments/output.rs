use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::ResultRow;
use crate::error::{Error, Result};

/// First line of every results file.
pub const SCHEMA_TAG: &str = "schema=dpbandit.v1";

pub const CSV_COLUMNS: [&str; 9] =
    ["instance_id", "seed", "label", "epsilon", "s", "t", "cumulative_regret", "time_avg_regret", "eliminated_optimal"];

/// Rounds to 9 significant digits and prints the shortest decimal that
/// parses back to the rounded value.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("scientific notation parses");
    rounded.to_string()
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::from(io),
        other => Error::Io(format!("csv: {other:?}")),
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().flexible(true).from_writer(out);
    writer.write_record([SCHEMA_TAG]).map_err(csv_err)?;
    writer.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in rows {
        writer
            .write_record([
                r.instance_id.to_string(),
                r.seed.to_string(),
                r.label.clone(),
                format_float(r.epsilon),
                format_float(r.s),
                r.t.to_string(),
                format_float(r.cumulative_regret),
                format_float(r.time_avg_regret),
                r.eliminated_optimal.to_string(),
            ])
            .map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_csv_path(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))?;
    write_csv(rows, BufWriter::new(file))
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, line: u64) -> Result<T> {
    let raw = record.get(idx).unwrap_or_default();
    raw.parse().map_err(|_| Error::Io(format!("line {line}: bad value {raw:?} in column {}", CSV_COLUMNS[idx])))
}

/// Parses a file written by [`write_csv`], checking the schema tag and header.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut records = reader.records();
    let tag = records.next().transpose().map_err(csv_err)?;
    if tag.as_ref().and_then(|r| r.get(0)) != Some(SCHEMA_TAG) {
        return Err(Error::Io(format!("missing schema tag {SCHEMA_TAG}")));
    }
    let header = records.next().transpose().map_err(csv_err)?;
    if !header.is_some_and(|h| h.iter().eq(CSV_COLUMNS)) {
        return Err(Error::Io("unexpected column header".into()));
    }
    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != CSV_COLUMNS.len() {
            return Err(Error::Io(format!("line {line}: expected {} fields", CSV_COLUMNS.len())));
        }
        rows.push(ResultRow {
            instance_id: field(&record, 0, line)?,
            seed: field(&record, 1, line)?,
            label: record[2].to_string(),
            epsilon: field(&record, 3, line)?,
            s: field(&record, 4, line)?,
            t: field(&record, 5, line)?,
            cumulative_regret: field(&record, 6, line)?,
            time_avg_regret: field(&record, 7, line)?,
            eliminated_optimal: field(&record, 8, line)?,
        });
    }
    Ok(rows)
}

pub fn read_csv_path(path: &Path) -> Result<Vec<ResultRow>> {
    let file = File::open(path).map_err(|e| Error::Io(format!("cannot open {}: {e}", path.display())))?;
    read_csv(std::io::BufReader::new(file))
}
