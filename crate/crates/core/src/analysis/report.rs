use std::io::Write;

use serde::Serialize;

use crate::params::{CodeParams, Scheme};

pub const CSV_HEADER: &str = "scheme,n,k,q,policy,seed,writes,deficiency,bound";

/// Outcome of driving one code to erasure (or of an exact oracle run).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeficiencyReport {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    pub q: usize,
    pub policy: String,
    pub seed: Option<u64>,
    pub writes: u64,
    pub deficiency: i64,
    pub bound: u64,
}

impl DeficiencyReport {
    pub fn new(params: &CodeParams, policy: &str, seed: Option<u64>, writes: u64, bound: u64) -> Self {
        DeficiencyReport {
            scheme: params.scheme,
            n: params.n,
            k: params.k,
            q: params.q,
            policy: policy.to_string(),
            seed,
            writes,
            deficiency: params.total_levels() as i64 - writes as i64,
            bound,
        }
    }

    pub fn within_bound(&self) -> bool {
        self.deficiency <= self.bound as i64
    }
}

pub fn write_csv<W: Write>(out: W, reports: &[DeficiencyReport]) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    if reports.is_empty() {
        writer.write_record(CSV_HEADER.split(','))?;
    }
    for report in reports {
        writer.serialize(report)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json_lines<W: Write>(mut out: W, reports: &[DeficiencyReport]) -> std::io::Result<()> {
    for report in reports {
        serde_json::to_writer(&mut out, report)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
