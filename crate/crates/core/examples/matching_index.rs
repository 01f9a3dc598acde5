// Matching index of vertex pairs in a synthetic graph the size of the
// Facebook social-circles dataset.

use cidan::dram::SimConfig;
use cidan::workloads::{matching_index_batch, partition_graph, GraphDataset, HostCostModel};
use cidan::BackendKind;

pub fn run_example() -> anyhow::Result<()> {
    let cfg = SimConfig::default();
    let g = GraphDataset::dataset("facebook", 7)?;
    let part = partition_graph(&g, cfg.geometry.banks_per_chip as usize);
    let pairs = [(0, 1), (10, 4000), (2021, 17), (3333, 42)];
    let mut base = None;
    for backend in [BackendKind::Cidan, BackendKind::Redram, BackendKind::Ambit] {
        let r = matching_index_batch(&g, &pairs, &part, backend, &cfg, &HostCostModel::ZERO)?;
        let cidan = *base.get_or_insert(r.stats.latency_ns);
        let vals: Vec<String> = r.results.iter().map(|m| format!("{}/{}", m.common, m.union)).collect();
        println!("{:<7} {:>9.1} ns  x{:.3}  {}", backend.label(), r.stats.latency_ns, r.stats.latency_ns / cidan, vals.join(" "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
