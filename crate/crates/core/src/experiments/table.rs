//! CSV and JSON-lines emission of result tables.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// A row type with a fixed CSV header.
pub trait TableRow: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    JsonLines,
}

impl TableFormat {
    /// `.jsonl` / `.json` select JSON lines, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") | Some("ndjson") => TableFormat::JsonLines,
            _ => TableFormat::Csv,
        }
    }
}

pub fn write_csv<R: TableRow, W: Write>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(R::HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: TableRow, In: Read>(input: In) -> Result<Vec<R>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != R::HEADER {
        return Err(Error::Format(format!("unexpected header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_jsonl<R: TableRow, W: Write>(mut out: W, rows: &[R]) -> Result<()> {
    for r in rows {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<R: TableRow, In: Read>(input: In) -> Result<Vec<R>> {
    let mut rows = Vec::new();
    for line in BufReader::new(input).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line)?);
    }
    Ok(rows)
}

/// Write `rows` to `path` in the given format.
pub fn emit<R: TableRow>(rows: &[R], path: &Path, format: TableFormat) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    match format {
        TableFormat::Csv => write_csv(out, rows),
        TableFormat::JsonLines => write_jsonl(out, rows),
    }
}

pub fn read_table<R: TableRow>(path: &Path, format: TableFormat) -> Result<Vec<R>> {
    let input = File::open(path)?;
    match format {
        TableFormat::Csv => read_csv(input),
        TableFormat::JsonLines => read_jsonl(input),
    }
}

/// Serde helper for reals that may be infinite or NaN: finite values stay
/// numbers, the rest become the strings `inf`, `-inf`, `nan` (JSON has no
/// literal for them).
pub mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t
                .trim()
                .parse::<f64>()
                .map_err(|_| serde::de::Error::custom(format!("not a number: `{t}`"))),
        }
    }
}
