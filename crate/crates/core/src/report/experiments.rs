use super::config::ExperimentConfig;
use crate::backends::{BackendKind, MacroCounts, RunStats};
use crate::dram::CommandTrace;
use crate::error::{Error, Result};
use crate::workloads::{
    aes_encrypt, edit_distances_dp, encrypt_block_reference, matching_index_batch, myers_search, parse_size,
    partition_graph, run_microbench, Block, GraphDataset, MicrobenchSpec, OpMix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One back-end's result for one case of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub case: String,
    pub backend: BackendKind,
    /// In-memory time plus host time.
    pub latency_ns: f64,
    pub pim_latency_ns: f64,
    pub host_ns: f64,
    pub energy_pj: f64,
    pub throughput_gops: f64,
    /// Relative to CIDAN on the same case, when CIDAN was run.
    pub latency_ratio: Option<f64>,
    pub energy_ratio: Option<f64>,
    pub macro_counts: MacroCounts,
    pub op_mix: OpMix,
    /// Output matched the host oracle.
    pub verified: bool,
}

impl ReportRow {
    fn new(experiment: &str, case: &str, stats: &RunStats, host_ns: f64, op_mix: OpMix, verified: bool) -> Self {
        ReportRow {
            experiment: experiment.into(),
            case: case.into(),
            backend: stats.backend,
            latency_ns: stats.latency_ns + host_ns,
            pim_latency_ns: stats.latency_ns,
            host_ns,
            energy_pj: stats.energy_pj,
            throughput_gops: stats.throughput_gops(),
            latency_ratio: None,
            energy_ratio: None,
            macro_counts: stats.macro_counts,
            op_mix,
            verified,
        }
    }

    /// File name of this row's command trace.
    pub fn trace_name(&self) -> String {
        let case: String = self
            .case
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .collect();
        format!("{}_{}_{}.csv", self.experiment, case, self.backend.name())
    }
}

/// Rows of a run plus the command trace behind each row.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub rows: Vec<ReportRow>,
    pub traces: Vec<CommandTrace>,
}

impl Outcome {
    fn push(&mut self, row: ReportRow, trace: CommandTrace) {
        self.rows.push(row);
        self.traces.push(trace);
    }

    pub fn extend(&mut self, other: Outcome) {
        self.rows.extend(other.rows);
        self.traces.extend(other.traces);
    }

    pub fn all_verified(&self) -> bool {
        self.rows.iter().all(|r| r.verified)
    }

    /// Fill in the ratios to the CIDAN row of each case.
    pub fn normalize(&mut self) {
        let mut base: BTreeMap<(String, String), (f64, f64)> = BTreeMap::new();
        for r in self.rows.iter().filter(|r| r.backend == BackendKind::Cidan) {
            base.insert((r.experiment.clone(), r.case.clone()), (r.latency_ns, r.energy_pj));
        }
        for r in &mut self.rows {
            if let Some(&(l, e)) = base.get(&(r.experiment.clone(), r.case.clone())) {
                r.latency_ratio = (l > 0.0).then(|| r.latency_ns / l);
                r.energy_ratio = (e > 0.0).then(|| r.energy_pj / e);
            }
        }
    }
}

fn rng(cfg: &ExperimentConfig, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(stream);
    r
}

pub fn run_microbench_suite(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sim = cfg.sim();
    let mut out = Outcome::default();
    for &op in &cfg.microbench.ops {
        for size in &cfg.microbench.sizes {
            let bits = parse_size(size)?;
            for &backend in &cfg.backends {
                let spec = MicrobenchSpec {
                    op,
                    size_bits: bits,
                    backend,
                };
                let r = run_microbench(spec, &sim, cfg.seed)?;
                let case = format!("{}/{}", op.name(), size);
                let rows = bits.div_ceil(sim.geometry.row_bits() as u64);
                let mix = OpMix::from([(op.name().to_string(), rows)]);
                out.push(ReportRow::new("microbench", &case, &r.stats, 0.0, mix, r.verified), r.stats.trace);
            }
        }
    }
    out.normalize();
    Ok(out)
}

pub fn run_aes(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sim = cfg.sim();
    let mut rng = rng(cfg, 1);
    let key: Vec<u8> = (0..cfg.aes.key_bits / 8).map(|_| rng.gen()).collect();
    let blocks: Vec<Block> = (0..cfg.aes.blocks).map(|_| rng.gen()).collect();
    let want = blocks
        .iter()
        .map(|b| encrypt_block_reference(b, &key))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    for &backend in &cfg.backends {
        let r = aes_encrypt(&blocks, &key, backend, &sim, &cfg.aes.host)?;
        let case = format!("aes-{}", cfg.aes.key_bits);
        let row = ReportRow::new("aes", &case, &r.pim.stats, r.host_ns, r.pim.op_mix, r.ciphertexts == want);
        out.push(row, r.pim.stats.trace);
    }
    out.normalize();
    Ok(out)
}

fn graphs(cfg: &ExperimentConfig) -> Result<Vec<GraphDataset>> {
    if let Some(path) = &cfg.graph.edge_list {
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("graph");
        return Ok(vec![GraphDataset::parse_edge_list(name, &std::fs::read_to_string(path)?)?]);
    }
    cfg.graph
        .datasets
        .iter()
        .enumerate()
        .map(|(k, name)| GraphDataset::dataset(name, cfg.seed.wrapping_add(k as u64)))
        .collect()
}

pub fn run_graph(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sim = cfg.sim();
    let mut out = Outcome::default();
    for (k, g) in graphs(cfg)?.iter().enumerate() {
        let n = g.vertices();
        if n < 2 {
            return Err(Error::Argument(format!("graph {} has fewer than two vertices", g.name)));
        }
        let mut rng = rng(cfg, 100 + k as u64);
        let pairs: Vec<(usize, usize)> = (0..cfg.graph.pairs)
            .map(|_| {
                let i = rng.gen_range(0..n);
                let j = (i + rng.gen_range(1..n)) % n;
                (i, j)
            })
            .collect();
        let want: Vec<(u64, u64)> = pairs
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (g.row(i), g.row(j));
                (a.and(&b).count_ones(), a.or(&b).count_ones())
            })
            .collect();
        let part = partition_graph(g, sim.geometry.banks_per_chip as usize);
        for &backend in &cfg.backends {
            let r = matching_index_batch(g, &pairs, &part, backend, &sim, &cfg.graph.host)?;
            let got: Vec<(u64, u64)> = r.results.iter().map(|m| (m.common, m.union)).collect();
            let mix = OpMix::from([("and".to_string(), pairs.len() as u64), ("or".to_string(), pairs.len() as u64)]);
            out.push(ReportRow::new("graph", &g.name, &r.stats, r.host_ns, mix, got == want), r.stats.trace);
        }
    }
    out.normalize();
    Ok(out)
}

fn read_sequence(path: &std::path::Path) -> Result<Vec<u8>> {
    Ok(std::fs::read_to_string(path)?
        .bytes()
        .filter(|b| !b.is_ascii_whitespace())
        .collect())
}

pub fn run_dna(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sim = cfg.sim();
    let mut rng = rng(cfg, 2);
    let alpha = cfg.dna.alphabet.as_bytes();
    let mut random = |len: usize| -> Vec<u8> { (0..len).map(|_| alpha[rng.gen_range(0..alpha.len())]).collect() };
    let pattern = match (&cfg.dna.pattern, &cfg.dna.pattern_file) {
        (Some(s), _) => s.as_bytes().to_vec(),
        (None, Some(p)) => read_sequence(p)?,
        (None, None) => random(cfg.dna.pattern_len),
    };
    let text = match (&cfg.dna.text, &cfg.dna.text_file) {
        (Some(s), _) => s.as_bytes().to_vec(),
        (None, Some(p)) => read_sequence(p)?,
        (None, None) => random(cfg.dna.text_len),
    };
    let want = edit_distances_dp(&pattern, &text);
    let mut out = Outcome::default();
    for &backend in &cfg.backends {
        let r = myers_search(&pattern, &text, backend, &sim, cfg.dna.add, &cfg.dna.host)?;
        let case = format!("myers-{}x{}", pattern.len(), text.len());
        let ok = r.distances == want;
        out.push(ReportRow::new("dna", &case, &r.pim.stats, r.host_ns, r.pim.op_mix, ok), r.pim.stats.trace);
    }
    out.normalize();
    Ok(out)
}
