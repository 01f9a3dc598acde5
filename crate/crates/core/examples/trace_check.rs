// Schedule a CIDAN AND, export the trace as CSV and check it independently.

use cidan::dram::{check_trace, CommandTrace};
use cidan::{Backend, BackendKind, BitRow, RowAddr, TlpeFunc};

pub fn run_example() -> anyhow::Result<()> {
    let backend = Backend::with_defaults(BackendKind::Cidan);
    let mut mem = backend.memory()?;
    let width = mem.width();
    mem.write(RowAddr::new(0, 5), BitRow::ones(width))?;
    mem.write(RowAddr::new(1, 6), BitRow::zeros(width))?;
    let stats = backend.exec_rowop(&mut mem, TlpeFunc::And, RowAddr::new(0, 5), Some(RowAddr::new(1, 6)), RowAddr::new(2, 7))?;
    let csv = stats.trace.to_csv();
    print!("{csv}");
    let back = CommandTrace::from_csv(&csv, backend.config.geometry.bank_group_size)?;
    let violations = check_trace(&back, &backend.config.timing, BackendKind::Cidan.capabilities());
    anyhow::ensure!(violations.is_empty(), "violations: {violations:?}");
    let recomputed = back.recompute_latency(&backend.config.timing);
    println!("latency {:.2} ns (recomputed from CSV: {:.2} ns), 0 violations", stats.latency_ns, recomputed as f64 / 1000.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
