//! Per-iteration run records.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub rel_err: Option<f64>,
    pub residual: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIters,
    Error(String),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    records: Vec<TraceRecord>,
    status: Option<Status>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a record; iteration numbers must strictly increase.
    pub fn push(&mut self, record: TraceRecord) -> Result<()> {
        if self.status.is_some() {
            return Err(Error::InvalidParameter("trace already finished".into()));
        }
        if let Some(last) = self.records.last() {
            if record.iter <= last.iter {
                return Err(Error::InvalidParameter(format!(
                    "trace iteration {} after {}",
                    record.iter, last.iter
                )));
            }
        }
        self.records.push(record);
        Ok(())
    }

    /// Set the terminal status. Fails if already set.
    pub fn finish(&mut self, status: Status) -> Result<()> {
        if self.status.is_some() {
            return Err(Error::InvalidParameter("trace status already set".into()));
        }
        self.status = Some(status);
        Ok(())
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn status(&self) -> Option<&Status> {
        self.status.as_ref()
    }

    pub fn converged(&self) -> bool {
        self.status == Some(Status::Converged)
    }

    /// Iteration index of the last record (0 if empty).
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn final_rel_err(&self) -> Option<f64> {
        self.last().and_then(|r| r.rel_err)
    }

    /// CSV with header `iter,rel_err,residual,seconds`. Missing values and,
    /// unless `with_time`, the timing column are left empty so repeated runs
    /// give identical bytes.
    pub fn write_csv<W: Write>(&self, out: W, with_time: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iter", "rel_err", "residual", "seconds"])?;
        for r in &self.records {
            w.write_record([
                r.iter.to_string(),
                r.rel_err.map(|v| format!("{v:e}")).unwrap_or_default(),
                format!("{:e}", r.residual),
                if with_time {
                    format!("{:.6}", r.seconds)
                } else {
                    String::new()
                },
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(iter: usize) -> TraceRecord {
        TraceRecord {
            iter,
            rel_err: Some(0.5),
            residual: 0.25,
            seconds: 0.0,
        }
    }

    #[test]
    fn iterations_must_increase() {
        let mut t = Trace::new();
        t.push(rec(0)).unwrap();
        t.push(rec(1)).unwrap();
        assert!(t.push(rec(1)).is_err());
        assert_eq!(t.iterations(), 1);
    }

    #[test]
    fn status_is_set_once() {
        let mut t = Trace::new();
        t.finish(Status::MaxIters).unwrap();
        assert!(t.finish(Status::Converged).is_err());
        assert!(t.push(rec(0)).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut t = Trace::new();
        t.push(rec(0)).unwrap();
        t.push(TraceRecord {
            iter: 1,
            rel_err: None,
            residual: 1.0,
            seconds: 2.0,
        })
        .unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf, false).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "iter,rel_err,residual,seconds\n0,5e-1,2.5e-1,\n1,,1e0,\n"
        );
    }
}
