// Myers bit-vector search of a short read in a DNA text.

use cidan::dram::SimConfig;
use cidan::workloads::{edit_distances_dp, myers_search, AddStrategy, HostCostModel};
use cidan::BackendKind;

pub fn run_example() -> anyhow::Result<()> {
    let cfg = SimConfig::default();
    let pattern = b"GATTACAGATTACA";
    let text = b"CCGATTACAGTTTACATTGATTACAGATTACAGG";
    let want = edit_distances_dp(pattern, text);
    let mut base = None;
    for backend in [BackendKind::Cidan, BackendKind::Redram, BackendKind::Ambit] {
        let r = myers_search(pattern, text, backend, &cfg, AddStrategy::Host, &HostCostModel::ZERO)?;
        anyhow::ensure!(r.distances == want, "distance mismatch on {backend}");
        let cidan = *base.get_or_insert(r.pim.stats.latency_ns);
        println!(
            "{:<7} best {} at {:?}  {:>9.1} ns  x{:.3}  ops {:?}",
            backend.label(),
            r.best().unwrap_or(0),
            r.distances.iter().position(|&d| Some(d) == r.best()),
            r.pim.stats.latency_ns,
            r.pim.stats.latency_ns / cidan,
            r.pim.op_mix
        );
    }
    let r = myers_search(pattern, text, BackendKind::Cidan, &cfg, AddStrategy::TransposedPim, &HostCostModel::ZERO)?;
    anyhow::ensure!(r.distances == want, "in-memory add gave different distances");
    println!("CIDAN with in-memory add: {:?}", r.pim.op_mix);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
