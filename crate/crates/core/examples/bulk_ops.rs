// Bulk NOT/AND/OR/XOR over a 1 Mb vector on each back-end, normalised to CIDAN.

use cidan::dram::SimConfig;
use cidan::workloads::{run_microbench, MicrobenchSpec, MEGABIT};
use cidan::{BackendKind, TlpeFunc};

pub fn run_example() -> anyhow::Result<()> {
    let cfg = SimConfig::default();
    for op in [TlpeFunc::Not, TlpeFunc::And, TlpeFunc::Or, TlpeFunc::Xor] {
        let mut base = None;
        for backend in [BackendKind::Cidan, BackendKind::Redram, BackendKind::Ambit] {
            let spec = MicrobenchSpec {
                op,
                size_bits: MEGABIT,
                backend,
            };
            let r = run_microbench(spec, &cfg, 1)?;
            anyhow::ensure!(r.verified, "{backend} {op} gave a wrong result");
            let cidan = *base.get_or_insert(r.stats.latency_ns);
            println!(
                "{:<4} {:<7} {:>10.1} ns  x{:.2}  {:>7.1} GOps/s",
                op.name(),
                backend.label(),
                r.stats.latency_ns,
                r.stats.latency_ns / cidan,
                r.throughput_gops
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
