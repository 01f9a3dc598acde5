// Run a small microbenchmark, emit JSON/CSV plus traces, and recompute a
// ratio from the trace files alone.

use cidan::report::{emit_report, recompute_ratio, run_microbench_suite, ExperimentConfig, Report};
use cidan::TlpeFunc;

pub fn run_example() -> anyhow::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.microbench.ops = vec![TlpeFunc::Or];
    cfg.microbench.sizes = vec!["64Kb".into()];
    let out = run_microbench_suite(&cfg)?;
    let report = Report::new("microbench", &cfg, out.rows.clone(), Vec::new());
    let dir = tempfile::tempdir()?;
    let files = emit_report(&report, Some(&out), dir.path(), "microbench")?;
    for f in &files {
        println!("{}", f.strip_prefix(dir.path())?.display());
    }
    let trace = |i: usize| std::fs::read_to_string(dir.path().join("traces").join(out.rows[i].trace_name()));
    let ratio = recompute_ratio(&trace(1)?, &trace(0)?, &cfg.timing, cfg.geometry.bank_group_size)?;
    let reported = out.rows[1].latency_ratio.unwrap_or_default();
    println!("reported {reported:.4}, from traces {ratio:.4}");
    anyhow::ensure!((ratio - reported).abs() < 1e-9, "ratio not reproducible from traces");
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
