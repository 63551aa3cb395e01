//! Uniformly sampled time series on a 900 s grid and their CSV form.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate, NaiveDateTime, Timelike, Weekday};
use thiserror::Error;

pub const STEP_SECONDS: i64 = 900;
pub const STEPS_PER_DAY: usize = 96;
pub const STEP_HOURS: f64 = 0.25;
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("expected header `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("row {row}: timestamp {found} is not {STEP_SECONDS} s after the previous one")]
    Spacing { row: usize, found: String },
    #[error("series is empty")]
    Empty,
}

/// Midnight on Monday 2024-01-01, the default origin of every generated series.
pub fn default_start() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2024, 1, 1)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid constant date")
}

pub fn timestamp_at(start: NaiveDateTime, step: usize) -> NaiveDateTime {
    start + chrono::Duration::seconds(STEP_SECONDS * step as i64)
}

pub fn format_timestamp(ts: NaiveDateTime) -> String {
    ts.format(TIMESTAMP_FORMAT).to_string()
}

pub fn parse_timestamp(s: &str) -> Result<NaiveDateTime, chrono::ParseError> {
    NaiveDateTime::parse_from_str(s.trim(), TIMESTAMP_FORMAT)
}

/// Hours since midnight, fractional.
pub fn hour_of_day(ts: NaiveDateTime) -> f64 {
    ts.hour() as f64 + ts.minute() as f64 / 60.0 + ts.second() as f64 / 3600.0
}

pub fn is_weekend(ts: NaiveDateTime) -> bool {
    matches!(ts.weekday(), Weekday::Sat | Weekday::Sun)
}

/// True when `hour` lies in the half-open window `[from, to)`, which may wrap
/// past midnight.
pub fn in_window(hour: f64, from: f64, to: f64) -> bool {
    if from <= to {
        hour >= from && hour < to
    } else {
        hour >= from || hour < to
    }
}

/// Timestamped numeric table read from CSV: the first column holds
/// timestamps, the rest are floats.
pub(crate) struct Table {
    pub start: NaiveDateTime,
    pub columns: Vec<Vec<f64>>,
}

pub(crate) fn read_table(reader: impl Read, header: &[&str]) -> Result<Table, SeriesError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(SeriesError::Header {
            expected: header.join(","),
            found: found.join(","),
        });
    }
    let mut columns = vec![Vec::new(); header.len() - 1];
    let mut start = None;
    let mut prev: Option<NaiveDateTime> = None;
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let ts = parse_timestamp(&record[0]).map_err(|e| SeriesError::Row {
            row,
            message: format!("bad timestamp {:?}: {e}", &record[0]),
        })?;
        if let Some(p) = prev {
            if (ts - p).num_seconds() != STEP_SECONDS {
                return Err(SeriesError::Spacing {
                    row,
                    found: record[0].to_string(),
                });
            }
        }
        start.get_or_insert(ts);
        prev = Some(ts);
        for (c, col) in columns.iter_mut().enumerate() {
            let v: f64 = record[c + 1].parse().map_err(|_| SeriesError::Row {
                row,
                message: format!("{} is not a number: {:?}", header[c + 1], &record[c + 1]),
            })?;
            col.push(v);
        }
    }
    Ok(Table {
        start: start.ok_or(SeriesError::Empty)?,
        columns,
    })
}

pub(crate) fn write_table(
    writer: impl Write,
    header: &[&str],
    start: NaiveDateTime,
    columns: &[&[f64]],
) -> Result<(), SeriesError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(header)?;
    let len = columns.first().map_or(0, |c| c.len());
    for k in 0..len {
        let mut rec = Vec::with_capacity(header.len());
        rec.push(format_timestamp(timestamp_at(start, k)));
        for col in columns {
            rec.push(col[k].to_string());
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

pub(crate) fn open(path: &Path) -> Result<File, SeriesError> {
    Ok(File::open(path)?)
}

pub(crate) fn create(path: &Path) -> Result<File, SeriesError> {
    Ok(File::create(path)?)
}
