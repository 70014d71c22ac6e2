//! Per-step record of a sequential test, for debugging and plots.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: u64,
    pub assertion: String,
    #[serde(rename = "T")]
    pub t: f64,
    pub mu: f64,
    pub eta: f64,
    pub u: f64,
}

/// Collected trace rows. Audits append to it when one is supplied.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn push(&mut self, step: u64, assertion: &str, t: f64, mu: f64, eta: f64, u: f64) {
        self.rows.push(TraceRow {
            step,
            assertion: assertion.to_string(),
            t,
            mu,
            eta,
            u,
        });
    }

    /// Writes `step,assertion,T,mu,eta,u` CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(["step", "assertion", "T", "mu", "eta", "u"])?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}
