use super::config::ExperimentConfig;
use super::experiments::{run_aes, run_dna, run_graph, run_microbench_suite, Outcome, ReportRow};
use crate::backends::BackendKind;
use crate::error::{Error, Result};
use crate::workloads::{aes, host_only_ns};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

const PAPER_CONSTANTS: &str = include_str!("../../data/paper_constants.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperMetric {
    pub id: String,
    pub value: f64,
    /// Relative tolerance.
    pub tolerance: f64,
    #[serde(default = "yes")]
    pub gated: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperConstants {
    pub version: u32,
    pub metric: Vec<PaperMetric>,
}

impl PaperConstants {
    /// The constants shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(PAPER_CONSTANTS).expect("bundled constants parse")
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| crate::dram::toml_error(text, &e))
    }

    pub fn get(&self, id: &str) -> Option<&PaperMetric> {
        self.metric.iter().find(|m| m.id == id)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub id: String,
    pub paper: f64,
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub gated: bool,
    pub pass: bool,
}

impl Comparison {
    pub fn deviation(&self) -> Option<f64> {
        self.measured.map(|m| m / self.paper - 1.0)
    }
}

/// Measured counterparts of the published metrics, keyed like the
/// constants file.
#[derive(Clone, Debug, Default)]
pub struct Measurements {
    pub values: BTreeMap<String, f64>,
    pub outcome: Outcome,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn ratio_metrics(rows: &[ReportRow], prefix: impl Fn(&ReportRow) -> String, into: &mut BTreeMap<String, f64>) {
    let mut acc: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.backend != BackendKind::Cidan) {
        let p = prefix(r);
        let b = r.backend.name();
        if let Some(x) = r.latency_ratio {
            acc.entry(format!("{p}.latency.{b}")).or_default().push(x);
        }
        if let Some(x) = r.energy_ratio {
            acc.entry(format!("{p}.energy.{b}")).or_default().push(x);
        }
    }
    for (k, v) in acc {
        into.insert(k, mean(&v));
    }
}

/// Run every experiment on CIDAN, ReDRAM and Ambit and derive the metrics.
pub fn measure(cfg: &ExperimentConfig) -> Result<Measurements> {
    let mut cfg = cfg.clone();
    cfg.backends = vec![BackendKind::Cidan, BackendKind::Redram, BackendKind::Ambit];
    let mut values = BTreeMap::new();

    let micro = run_microbench_suite(&cfg)?;
    let op_of = |r: &ReportRow| r.case.split('/').next().unwrap_or_default().to_string();
    ratio_metrics(&micro.rows, |r| format!("microbench.{}", op_of(r)), &mut values);
    let mut tput: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in &micro.rows {
        tput.entry(format!("microbench.{}.throughput.{}", op_of(r), r.backend.name()))
            .or_default()
            .push(r.throughput_gops);
    }
    values.extend(tput.into_iter().map(|(k, v)| (k, mean(&v))));

    let aes_out = run_aes(&cfg)?;
    ratio_metrics(&aes_out.rows, |_| "aes".into(), &mut values);
    if let Some(c) = aes_out.rows.iter().find(|r| r.backend == BackendKind::Cidan) {
        let rounds = aes::rounds_for(&vec![0; cfg.aes.key_bits as usize / 8])?;
        values.insert("aes.latency.cpu".into(), host_only_ns(cfg.aes.blocks, rounds, &cfg.aes.host) / c.latency_ns);
    }

    let graph = run_graph(&cfg)?;
    ratio_metrics(&graph.rows, |r| format!("graph.{}", r.case), &mut values);

    let dna = run_dna(&cfg)?;
    ratio_metrics(&dna.rows, |_| "dna".into(), &mut values);

    let mut outcome = micro;
    outcome.extend(aes_out);
    outcome.extend(graph);
    outcome.extend(dna);
    Ok(Measurements { values, outcome })
}

/// Check measurements against the constants; a metric never measured fails.
pub fn compare(measured: &BTreeMap<String, f64>, constants: &PaperConstants) -> Vec<Comparison> {
    constants
        .metric
        .iter()
        .map(|m| {
            let got = measured.get(&m.id).copied();
            Comparison {
                id: m.id.clone(),
                paper: m.value,
                measured: got,
                tolerance: m.tolerance,
                gated: m.gated,
                pass: got.is_some_and(|x| (x / m.value - 1.0).abs() <= m.tolerance),
            }
        })
        .collect()
}

pub fn comparisons_pass(cmps: &[Comparison]) -> bool {
    cmps.iter().all(|c| c.pass || !c.gated)
}

pub fn against(target: &str) -> Result<PaperConstants> {
    match target {
        "paper" => Ok(PaperConstants::bundled()),
        other => Err(Error::Argument(format!("unknown comparison target {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_constants_are_sane() {
        let c = PaperConstants::bundled();
        assert_eq!(c.version, 1);
        assert!(c.metric.iter().all(|m| m.value > 0.0 && m.tolerance > 0.0));
        let mut ids: Vec<_> = c.metric.iter().map(|m| &m.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), c.metric.len());
        assert_eq!(c.get("microbench.and.latency.redram").unwrap().value, 3.24);
    }

    #[test]
    fn tolerance_is_relative() {
        let c = PaperConstants::parse("version = 1\n[[metric]]\nid = \"x\"\nvalue = 2.0\ntolerance = 0.1\n").unwrap();
        let m = |v| BTreeMap::from([("x".to_string(), v)]);
        assert!(compare(&m(2.19), &c)[0].pass);
        assert!(!compare(&m(2.21), &c)[0].pass);
        assert!(!compare(&BTreeMap::new(), &c)[0].pass);
        assert!(PaperConstants::parse("version = 1\nmetric = 3\n").is_err());
    }
}
