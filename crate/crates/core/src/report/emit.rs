use super::config::ExperimentConfig;
use super::experiments::{Outcome, ReportRow};
use super::paper::Comparison;
use crate::dram::{CommandTrace, TimingParams};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// JSON results document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<Comparison>,
}

impl Report {
    pub fn new(command: &str, cfg: &ExperimentConfig, rows: Vec<ReportRow>, comparisons: Vec<Comparison>) -> Self {
        Report {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
            rows,
            comparisons,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "experiment,case,backend,latency_ns,pim_latency_ns,host_ns,energy_pj,throughput_gops,\
             latency_ratio,energy_ratio,aap,ap,act,rd,wr,prea,compute_cycles,verified,config_hash,seed\n",
        );
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            let m = r.macro_counts;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.experiment,
                r.case,
                r.backend.name(),
                r.latency_ns,
                r.pim_latency_ns,
                r.host_ns,
                r.energy_pj,
                r.throughput_gops,
                opt(r.latency_ratio),
                opt(r.energy_ratio),
                m.aap,
                m.ap,
                m.act,
                m.rd,
                m.wr,
                m.prea,
                m.compute_cycles,
                r.verified,
                self.config_hash,
                self.seed
            );
        }
        s
    }
}

/// Write `<stem>.json` and `<stem>.csv` into `dir`, plus the command trace
/// of every row under `dir/traces` when `outcome` is given.
pub fn emit_report(report: &Report, outcome: Option<&Outcome>, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    if report.rows.is_empty() && report.comparisons.is_empty() {
        return Err(Error::Argument("nothing to report".into()));
    }
    std::fs::create_dir_all(dir)?;
    let json = dir.join(format!("{stem}.json"));
    let csv = dir.join(format!("{stem}.csv"));
    std::fs::write(&json, report.to_json())?;
    std::fs::write(&csv, report.to_csv())?;
    let mut files = vec![json, csv];
    if let Some(o) = outcome {
        let tdir = dir.join("traces");
        std::fs::create_dir_all(&tdir)?;
        for (row, trace) in o.rows.iter().zip(&o.traces) {
            let p = tdir.join(row.trace_name());
            std::fs::write(&p, trace.to_csv())?;
            files.push(p);
        }
    }
    Ok(files)
}

/// Latency ratio of two traces, recomputed from the CSV files alone.
pub fn recompute_ratio(num_csv: &str, den_csv: &str, timing: &TimingParams, group_size: u32) -> Result<f64> {
    let a = CommandTrace::from_csv(num_csv, group_size)?.recompute_latency(timing);
    let b = CommandTrace::from_csv(den_csv, group_size)?.recompute_latency(timing);
    if b == 0 {
        return Err(Error::Invalid("empty reference trace".into()));
    }
    Ok(a as f64 / b as f64)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into())
}

/// Ratio table, CIDAN = 1, one line per case and back-end.
pub fn render_table(rows: &[ReportRow]) -> String {
    let mut s = format!(
        "{:<11} {:<18} {:<7} {:>14} {:>14} {:>9} {:>9} {:>10} {}\n",
        "experiment", "case", "backend", "latency_ns", "energy_pj", "lat/CIDAN", "en/CIDAN", "GOps/s", "ok"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<11} {:<18} {:<7} {:>14.2} {:>14.1} {:>9} {:>9} {:>10.2} {}",
            r.experiment,
            r.case,
            r.backend.label(),
            r.latency_ns,
            r.energy_pj,
            fmt_opt(r.latency_ratio),
            fmt_opt(r.energy_ratio),
            r.throughput_gops,
            if r.verified { "yes" } else { "MISMATCH" }
        );
    }
    s
}

pub fn render_comparisons(cmps: &[Comparison]) -> String {
    let mut s = format!(
        "{:<36} {:>9} {:>10} {:>8} {:>6}  {}\n",
        "metric", "paper", "measured", "dev", "tol", "result"
    );
    for c in cmps {
        let verdict = match (c.pass, c.gated) {
            (true, _) => "pass",
            (false, true) => "FAIL",
            (false, false) => "off (not gated)",
        };
        let _ = writeln!(
            s,
            "{:<36} {:>9.3} {:>10} {:>7.1}% {:>5.0}%  {}",
            c.id,
            c.paper,
            fmt_opt(c.measured),
            c.deviation().unwrap_or(f64::NAN) * 100.0,
            c.tolerance * 100.0,
            verdict
        );
    }
    s
}
