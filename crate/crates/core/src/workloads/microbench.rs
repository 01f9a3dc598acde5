use crate::backends::{Backend, BackendKind, RunStats};
use crate::bits::BitRow;
use crate::dram::SimConfig;
use crate::error::{Error, Result};
use crate::isa::{allocate, execute, load_vector, lower, store_vector, BbopInstruction, Operand};
use crate::threshold::TlpeFunc;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

pub const MEGABIT: u64 = 1 << 20;

/// One bulk operation over a vector of `size_bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MicrobenchSpec {
    pub op: TlpeFunc,
    pub size_bits: u64,
    pub backend: BackendKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicrobenchResult {
    pub spec: MicrobenchSpec,
    pub stats: RunStats,
    pub throughput_gops: f64,
    /// The result vector matched the host computation.
    pub verified: bool,
}

/// `"4Mb"`, `"512Kb"` or a plain bit count.
pub fn parse_size(text: &str) -> Result<u64> {
    let t = text.trim();
    let lower = t.to_ascii_lowercase();
    let (num, mul) = if let Some(n) = lower.strip_suffix("mb") {
        (n, MEGABIT)
    } else if let Some(n) = lower.strip_suffix("kb") {
        (n, 1 << 10)
    } else if let Some(n) = lower.strip_suffix('b') {
        (n, 1)
    } else {
        (lower.as_str(), 1)
    };
    let n: u64 = num
        .trim()
        .parse()
        .map_err(|_| Error::Argument(format!("bad vector size {text:?}")))?;
    let bits = n
        .checked_mul(mul)
        .ok_or_else(|| Error::Argument(format!("vector size {text:?} overflows")))?;
    if bits == 0 {
        return Err(Error::Argument("vector size must be positive".into()));
    }
    Ok(bits)
}

/// Run `dest = op(src1, src2)` over random vectors and check the result.
///
/// The vector is split into rows that alternate between bank groups, so the
/// groups work in parallel as far as the shared command bus and the
/// activation window allow.
pub fn run_microbench(spec: MicrobenchSpec, config: &SimConfig, seed: u64) -> Result<MicrobenchResult> {
    if spec.size_bits == 0 {
        return Err(Error::Argument("vector size must be positive".into()));
    }
    if spec.op == TlpeFunc::AddBit {
        return Err(Error::Argument("ADD is a bit-serial operation, not a bulk bbop".into()));
    }
    spec.backend.require(spec.op)?;
    let backend = Backend::new(spec.backend, *config)?;
    let bytes = spec.size_bits.div_ceil(8);
    let instr = BbopInstruction {
        func: spec.op,
        dest: 2 * bytes,
        src1: 0,
        src2: (!spec.op.is_unary()).then_some(bytes),
        len_bits: Some(spec.size_bits),
        backend: spec.backend,
    };
    let placement = allocate(&instr, &config.geometry)?;
    let mut mem = backend.memory()?;
    let len = usize::try_from(spec.size_bits).map_err(|_| Error::Capacity("vector too large".into()))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let a = BitRow::random(len, &mut rng);
    let b = BitRow::random(len, &mut rng);
    store_vector(&mut mem, &placement.rows(Operand::Src1), &a)?;
    if instr.src2.is_some() {
        store_vector(&mut mem, &placement.rows(Operand::Src2), &b)?;
    }
    let stats = execute(&backend, &mut mem, &lower(&placement))?;
    let got = load_vector(&mem, &placement.rows(Operand::Dest), len)?;
    let want = match spec.op {
        TlpeFunc::Copy => a.clone(),
        TlpeFunc::Not => a.not(),
        TlpeFunc::And => a.and(&b),
        TlpeFunc::Or => a.or(&b),
        TlpeFunc::Nand => a.and(&b).not(),
        TlpeFunc::Nor => a.or(&b).not(),
        TlpeFunc::Xor => a.xor(&b),
        TlpeFunc::Xnor => a.xor(&b).not(),
        TlpeFunc::AddBit => unreachable!(),
    };
    Ok(MicrobenchResult {
        spec,
        throughput_gops: stats.throughput_gops(),
        stats,
        verified: got == want,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_parse() {
        assert_eq!(parse_size("4Mb").unwrap(), 4 << 20);
        assert_eq!(parse_size("512kb").unwrap(), 512 << 10);
        assert_eq!(parse_size("8192").unwrap(), 8192);
        assert!(parse_size("0").is_err());
        assert!(parse_size("lots").is_err());
    }

    #[test]
    fn small_run_verifies() {
        let cfg = SimConfig::default();
        for backend in [BackendKind::Cidan, BackendKind::Drisa] {
            let spec = MicrobenchSpec {
                op: TlpeFunc::And,
                size_bits: 3 * 8192 + 5,
                backend,
            };
            let r = run_microbench(spec, &cfg, 3).unwrap();
            assert!(r.verified);
            assert_eq!(r.stats.bit_ops, spec.size_bits);
        }
        let bad = MicrobenchSpec {
            op: TlpeFunc::Xor,
            size_bits: 64,
            backend: BackendKind::Drisa,
        };
        assert!(matches!(run_microbench(bad, &cfg, 0), Err(Error::Unsupported(_))));
    }
}
