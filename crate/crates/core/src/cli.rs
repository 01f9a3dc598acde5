//! Command-line front end.

use crate::backends::BackendKind;
use crate::dram::{check_trace, Capabilities, CommandTrace};
use crate::error::{Error, Result};
use crate::report::{
    against, compare, comparisons_pass, emit_report, measure, render_comparisons, render_table, run_aes, run_dna,
    run_graph, run_microbench_suite, ExperimentConfig, Outcome, Report,
};
use crate::threshold::TlpeFunc;
use crate::workloads::{parse_size, AddStrategy, HostCostModel};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "cidan", version, about = "Bulk-bitwise processing-in-DRAM simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Experiment config (TOML); defaults are used for anything not given.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated back-ends, e.g. cidan,redram,ambit.
    #[arg(long, global = true, value_delimiter = ',')]
    backends: Option<Vec<BackendKind>>,
    /// Directory for JSON/CSV results and command traces.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print only; write no files.
    #[arg(long, global = true)]
    no_write: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum HostProfile {
    /// Host stages cost nothing (compare back-ends only).
    Zero,
    /// Calibrated host cost for end-to-end timing.
    EndToEnd,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Caps {
    Standard,
    All,
    Cidan,
    Ambit,
    Redram,
    Drisa,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Bulk operation over a vector.
    Microbench {
        #[command(flatten)]
        common: Common,
        /// Comma-separated operations.
        #[arg(long, value_delimiter = ',')]
        op: Option<Vec<TlpeFunc>>,
        /// Comma-separated vector sizes such as 1Mb,4Mb or a bit count.
        #[arg(long, value_delimiter = ',')]
        size: Option<Vec<String>>,
    },
    /// Bit-sliced AES with MixColumns and AddRoundKey in memory.
    Aes {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        key_bits: Option<u32>,
        #[arg(long)]
        blocks: Option<usize>,
        #[arg(long, value_enum)]
        host_profile: Option<HostProfile>,
        /// Encrypt one block: hex key (with --plaintext).
        #[arg(long, requires = "plaintext")]
        key: Option<String>,
        #[arg(long, requires = "key")]
        plaintext: Option<String>,
    },
    /// Matching index over graph adjacency rows.
    Graph {
        #[command(flatten)]
        common: Common,
        /// Comma-separated dataset names (synthetic stand-ins of the same size).
        #[arg(long, value_delimiter = ',')]
        dataset: Option<Vec<String>>,
        /// Edge-list file, one "u v" pair per line.
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Myers bit-vector pattern search.
    Dna {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long)]
        text: Option<String>,
        #[arg(long)]
        pattern_file: Option<PathBuf>,
        #[arg(long)]
        text_file: Option<PathBuf>,
        #[arg(long)]
        pattern_len: Option<usize>,
        #[arg(long)]
        text_len: Option<usize>,
        #[arg(long, value_enum)]
        add: Option<AddArg>,
    },
    /// Run all experiments and check them against published figures.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "paper")]
        against: String,
    },
    /// Check a command trace CSV for timing and protocol violations.
    CheckTrace {
        trace: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Commands the device is allowed to use.
        #[arg(long, value_enum, default_value = "all")]
        caps: Caps,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum AddArg {
    Host,
    TransposedPim,
}

impl clap::ValueEnum for BackendKind {
    fn value_variants<'a>() -> &'a [Self] {
        &[BackendKind::Cidan, BackendKind::Ambit, BackendKind::Redram, BackendKind::Drisa]
    }
    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.name()))
    }
}

impl clap::ValueEnum for TlpeFunc {
    fn value_variants<'a>() -> &'a [Self] {
        &TlpeFunc::ALL
    }
    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.name()))
    }
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(b) = &common.backends {
        cfg.backends = b.clone();
    }
    if let Some(o) = &common.out {
        cfg.output_dir = Some(o.clone());
    }
    Ok(cfg)
}

fn hex_bytes(s: &str) -> Result<Vec<u8>> {
    let s = s.trim();
    if s.len() % 2 != 0 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::Argument(format!("bad hex string {s:?}")));
    }
    Ok((0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&s[i..i + 2], 16).expect("checked hex"))
        .collect())
}

fn finish(name: &str, cfg: &ExperimentConfig, common: &Common, outcome: Outcome) -> Result<i32> {
    print!("{}", render_table(&outcome.rows));
    let report = Report::new(name, cfg, outcome.rows.clone(), Vec::new());
    write(name, cfg, common, &report, Some(&outcome))?;
    if outcome.all_verified() {
        Ok(0)
    } else {
        eprintln!("oracle mismatch");
        Ok(1)
    }
}

fn write(name: &str, cfg: &ExperimentConfig, common: &Common, report: &Report, outcome: Option<&Outcome>) -> Result<()> {
    if common.no_write {
        return Ok(());
    }
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("cidan-results"));
    let files = emit_report(report, outcome, &dir, name)?;
    println!("wrote {} and {} other files under {}", files[0].display(), files.len() - 1, dir.display());
    Ok(())
}

/// Parse `argv` (program name first) and run. Usage errors are printed and
/// give clap's exit code; other failures are returned.
pub fn run<I, T>(argv: I) -> Result<i32>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return Ok(e.exit_code());
        }
    };
    match cli.cmd {
        Cmd::Microbench { common, op, size } => {
            let mut cfg = load_config(&common)?;
            if let Some(op) = op {
                cfg.microbench.ops = op;
            }
            if let Some(size) = size {
                for s in &size {
                    parse_size(s)?;
                }
                cfg.microbench.sizes = size;
            }
            finish("microbench", &cfg, &common, run_microbench_suite(&cfg)?)
        }
        Cmd::Aes {
            common,
            key_bits,
            blocks,
            host_profile,
            key,
            plaintext,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(k) = key_bits {
                cfg.aes.key_bits = k;
            }
            if let Some(b) = blocks {
                cfg.aes.blocks = b;
            }
            match host_profile {
                Some(HostProfile::Zero) => cfg.aes.host = HostCostModel::ZERO,
                Some(HostProfile::EndToEnd) => cfg.aes.host = crate::report::AesConfig::default().host,
                None => {}
            }
            cfg.validate()?;
            if let (Some(k), Some(p)) = (key, plaintext) {
                let key = hex_bytes(&k)?;
                let block: crate::workloads::Block = hex_bytes(&p)?
                    .try_into()
                    .map_err(|_| Error::Argument("plaintext must be 16 bytes".into()))?;
                let want = crate::workloads::encrypt_block_reference(&block, &key)?;
                let mut code = 0;
                for &b in &cfg.backends {
                    let r = crate::workloads::aes_encrypt(&[block], &key, b, &cfg.sim(), &cfg.aes.host)?;
                    let hex: String = r.ciphertexts[0].iter().map(|x| format!("{x:02x}")).collect();
                    let ok = r.ciphertexts[0] == want;
                    println!("{:<7} {hex} {}", b.label(), if ok { "ok" } else { "MISMATCH" });
                    if !ok {
                        code = 1;
                    }
                }
                return Ok(code);
            }
            finish("aes", &cfg, &common, run_aes(&cfg)?)
        }
        Cmd::Graph {
            common,
            dataset,
            edges,
            pairs,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(d) = dataset {
                cfg.graph.datasets = d;
            }
            if let Some(e) = edges {
                cfg.graph.edge_list = Some(e);
            }
            if let Some(p) = pairs {
                cfg.graph.pairs = p;
            }
            cfg.validate()?;
            cfg.check_files()?;
            finish("graph", &cfg, &common, run_graph(&cfg)?)
        }
        Cmd::Dna {
            common,
            pattern,
            text,
            pattern_file,
            text_file,
            pattern_len,
            text_len,
            add,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(n) = pattern_len {
                cfg.dna.pattern_len = n;
            }
            if let Some(n) = text_len {
                cfg.dna.text_len = n;
            }
            if let Some(a) = add {
                cfg.dna.add = match a {
                    AddArg::Host => AddStrategy::Host,
                    AddArg::TransposedPim => AddStrategy::TransposedPim,
                };
            }
            if pattern.is_some() {
                cfg.dna.pattern = pattern;
            }
            if text.is_some() {
                cfg.dna.text = text;
            }
            if pattern_file.is_some() {
                cfg.dna.pattern_file = pattern_file;
            }
            if text_file.is_some() {
                cfg.dna.text_file = text_file;
            }
            cfg.validate()?;
            cfg.check_files()?;
            finish("dna", &cfg, &common, run_dna(&cfg)?)
        }
        Cmd::Compare { common, against: target } => {
            let cfg = load_config(&common)?;
            let constants = against(&target)?;
            let m = measure(&cfg)?;
            let cmps = compare(&m.values, &constants);
            print!("{}", render_comparisons(&cmps));
            let gated: Vec<_> = cmps.iter().filter(|c| c.gated).collect();
            let passed = gated.iter().filter(|c| c.pass).count();
            println!("{passed}/{} gated metrics within tolerance", gated.len());
            let report = Report::new("compare", &cfg, m.outcome.rows.clone(), cmps.clone());
            write("compare", &cfg, &common, &report, None)?;
            let ok = comparisons_pass(&cmps) && m.outcome.all_verified();
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::CheckTrace { trace, config, caps } => {
            let cfg = match config {
                Some(p) => ExperimentConfig::load(&p)?,
                None => ExperimentConfig::default(),
            };
            let caps = match caps {
                Caps::Standard => Capabilities::STANDARD,
                Caps::All => Capabilities::ALL,
                Caps::Cidan => BackendKind::Cidan.capabilities(),
                Caps::Ambit => BackendKind::Ambit.capabilities(),
                Caps::Redram => BackendKind::Redram.capabilities(),
                Caps::Drisa => BackendKind::Drisa.capabilities(),
            };
            let text = std::fs::read_to_string(&trace)?;
            let t = CommandTrace::from_csv(&text, cfg.geometry.bank_group_size)?;
            let v = check_trace(&t, &cfg.timing, caps);
            for x in &v {
                println!("{}: command {} ({})", x.rule, x.second + 1, x.detail);
            }
            println!("{} commands, {} violations", t.commands.len(), v.len());
            Ok(if v.is_empty() { 0 } else { 1 })
        }
    }
}

/// [`run`], printing errors; returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run(argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
