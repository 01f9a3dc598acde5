use super::syntax::BbopInstruction;
use crate::backends::{plan_fixups, user_rows, Backend, BackendKind, FixupPlan, MemoryImage, RowAddr, RunStats};
use crate::bits::BitRow;
use crate::dram::DramGeometry;
use crate::error::{Error, Result};
use crate::threshold::TlpeFunc;
use serde::{Deserialize, Serialize};

/// Where each operand's first chunk lives when the caller fixes placement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pins {
    pub dest: RowAddr,
    pub src1: RowAddr,
    pub src2: Option<RowAddr>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkPlacement {
    pub group: u32,
    /// Meaningful bits in this chunk; the rest of the row is padding.
    pub valid_bits: u32,
    pub dest: RowAddr,
    pub src1: RowAddr,
    pub src2: Option<RowAddr>,
    /// Staging a CIDAN chunk needs; `None` when operands are already legal.
    pub fixup: Option<FixupPlan>,
}

/// Row-level placement of one instruction's vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorPlacement {
    pub backend: BackendKind,
    pub func: TlpeFunc,
    pub len_bits: u64,
    pub chunks: Vec<ChunkPlacement>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operand {
    Dest,
    Src1,
    Src2,
}

impl VectorPlacement {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("placement serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad placement JSON: {e}")))
    }

    /// Home row of `op` for every chunk.
    pub fn rows(&self, op: Operand) -> Vec<RowAddr> {
        self.chunks
            .iter()
            .filter_map(|c| match op {
                Operand::Dest => Some(c.dest),
                Operand::Src1 => Some(c.src1),
                Operand::Src2 => c.src2,
            })
            .collect()
    }

    /// Static legality: CIDAN chunks (after their fix-ups) use distinct banks
    /// of one group; other back-ends keep each chunk in one bank.
    pub fn validate(&self, geo: &DramGeometry) -> Result<()> {
        for (k, c) in self.chunks.iter().enumerate() {
            let srcs: Vec<RowAddr> = std::iter::once(c.src1).chain(c.src2).collect();
            if self.backend == BackendKind::Cidan {
                let plan = plan_fixups(geo, &srcs, c.dest)?;
                let expect = (!plan.is_direct()).then_some(plan);
                if expect != c.fixup {
                    return Err(Error::Allocation(format!("chunk {k}: recorded fix-up does not match operands")));
                }
                let mut banks: Vec<u32> = srcs.iter().map(|s| s.bank).collect();
                if let Some(s) = plan.stage_src2 {
                    banks[1] = s.bank;
                }
                banks.dedup();
                banks.push(plan.compute_at.bank);
                let mut sorted = banks.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != banks.len() || banks.iter().any(|&b| geo.group_of(b) != c.group) {
                    return Err(Error::Allocation(format!("chunk {k}: operands not in distinct banks of group {}", c.group)));
                }
            } else if srcs.iter().any(|s| s.bank != c.dest.bank) {
                return Err(Error::Allocation(format!("chunk {k}: operands must share one bank")));
            }
        }
        Ok(())
    }
}

fn chunk_count(len: u64, row_bits: u64) -> u64 {
    len.div_ceil(row_bits)
}

fn finish(
    instr: &BbopInstruction,
    geo: &DramGeometry,
    len: u64,
    chunks: Vec<(u32, RowAddr, RowAddr, Option<RowAddr>)>,
) -> Result<VectorPlacement> {
    let row_bits = geo.row_bits() as u64;
    let limit = user_rows(geo);
    let mut out = Vec::with_capacity(chunks.len());
    for (k, (group, dest, src1, src2)) in chunks.into_iter().enumerate() {
        for a in [Some(dest), Some(src1), src2].into_iter().flatten() {
            if a.row >= limit || a.bank >= geo.banks_per_chip {
                return Err(Error::Capacity(format!(
                    "chunk {k} needs {a}, beyond the {limit} user rows per bank"
                )));
            }
        }
        let fixup = if instr.backend == BackendKind::Cidan {
            let srcs: Vec<RowAddr> = std::iter::once(src1).chain(src2).collect();
            let plan = plan_fixups(geo, &srcs, dest)?;
            (!plan.is_direct()).then_some(plan)
        } else {
            if src1.bank != dest.bank || src2.is_some_and(|s| s.bank != dest.bank) {
                return Err(Error::Allocation(format!(
                    "{} needs all operands of a chunk in one bank",
                    instr.backend.label()
                )));
            }
            None
        };
        let valid = (len - k as u64 * row_bits).min(row_bits) as u32;
        out.push(ChunkPlacement {
            group,
            valid_bits: valid,
            dest,
            src1,
            src2,
            fixup,
        });
    }
    Ok(VectorPlacement {
        backend: instr.backend,
        func: instr.func,
        len_bits: len,
        chunks: out,
    })
}

/// Automatic placement. Chunk `k` runs in group `k mod G`, so consecutive
/// chunks alternate between TLPE groups. Every operand address is an offset
/// within its own slot: for CIDAN, src1, src2 and dest live in banks 0, 1
/// and 2 of the group; the other back-ends keep all three in bank 0. The
/// row is `addr / row_bytes + k / G`.
pub fn allocate(instr: &BbopInstruction, geo: &DramGeometry) -> Result<VectorPlacement> {
    geo.validate()?;
    let row_bits = geo.row_bits() as u64;
    let len = instr.len_or(row_bits);
    let groups = geo.groups() as u64;
    let row_of = |addr: u64, k: u64| -> Result<u32> {
        let r = addr / geo.row_bytes() + k / groups;
        u32::try_from(r).map_err(|_| Error::Capacity(format!("address {addr:#x} is beyond the device")))
    };
    let slot = |i: u32| if instr.backend == BackendKind::Cidan { i } else { 0 };
    let mut chunks = Vec::new();
    for k in 0..chunk_count(len, row_bits) {
        let group = (k % groups) as u32;
        let bank = |i| group * geo.bank_group_size + slot(i);
        let src2 = match instr.src2 {
            Some(a) => Some(RowAddr::new(bank(1), row_of(a, k)?)),
            None => None,
        };
        chunks.push((
            group,
            RowAddr::new(bank(2), row_of(instr.dest, k)?),
            RowAddr::new(bank(0), row_of(instr.src1, k)?),
            src2,
        ));
    }
    finish(instr, geo, len, chunks)
}

/// Caller-fixed placement: chunk `k` of each operand sits `k` rows below
/// its pinned start, all in the destination's group. Collisions are left
/// to the back-end's fix-ups (CIDAN) or rejected (others).
pub fn allocate_pinned(instr: &BbopInstruction, geo: &DramGeometry, pins: Pins) -> Result<VectorPlacement> {
    geo.validate()?;
    if instr.src2.is_some() != pins.src2.is_some() {
        return Err(Error::Argument("pins must match the instruction's operands".into()));
    }
    let row_bits = geo.row_bits() as u64;
    let len = instr.len_or(row_bits);
    let group = geo.group_of(pins.dest.bank);
    let at = |a: RowAddr, k: u64| -> Result<RowAddr> {
        let row = u32::try_from(a.row as u64 + k).map_err(|_| Error::Capacity("row index overflow".into()))?;
        Ok(RowAddr::new(a.bank, row))
    };
    let mut chunks = Vec::new();
    for k in 0..chunk_count(len, row_bits) {
        let src2 = match pins.src2 {
            Some(a) => Some(at(a, k)?),
            None => None,
        };
        chunks.push((group, at(pins.dest, k)?, at(pins.src1, k)?, src2));
    }
    finish(instr, geo, len, chunks)
}

/// One row-level operation of a lowered instruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowCall {
    pub func: TlpeFunc,
    pub src1: RowAddr,
    pub src2: Option<RowAddr>,
    pub dest: RowAddr,
    pub valid_bits: u32,
}

/// One row call per chunk. Bits past the vector length are don't-care.
pub fn lower(placement: &VectorPlacement) -> Vec<RowCall> {
    placement
        .chunks
        .iter()
        .map(|c| RowCall {
            func: placement.func,
            src1: c.src1,
            src2: c.src2,
            dest: c.dest,
            valid_bits: c.valid_bits,
        })
        .collect()
}

/// Spread `value` over `rows`, one row-width chunk each, zero-padding the
/// last one.
pub fn store_vector(mem: &mut MemoryImage, rows: &[RowAddr], value: &BitRow) -> Result<()> {
    let w = mem.width();
    if rows.len() != value.width().div_ceil(w) {
        return Err(Error::Argument(format!(
            "{} bits need {} rows, placement has {}",
            value.width(),
            value.width().div_ceil(w),
            rows.len()
        )));
    }
    for (k, &r) in rows.iter().enumerate() {
        mem.write(r, value.extract(k * w, w, w))?;
    }
    Ok(())
}

/// Gather `len` bits back from `rows`.
pub fn load_vector(mem: &MemoryImage, rows: &[RowAddr], len: usize) -> Result<BitRow> {
    let w = mem.width();
    let mut out = BitRow::zeros(len);
    for (k, &r) in rows.iter().enumerate() {
        let chunk = mem.read(r)?;
        out.insert(k * w, &chunk, w.min(len.saturating_sub(k * w)));
    }
    Ok(out)
}

/// Run lowered calls on `backend`, overlapping chunks of different groups.
pub fn execute(backend: &Backend, mem: &mut MemoryImage, calls: &[RowCall]) -> Result<RunStats> {
    let mut programs = Vec::with_capacity(calls.len());
    let mut bits = 0u64;
    for c in calls {
        programs.push(backend.plan_rowop(mem, c.func, c.src1, c.src2, c.dest)?);
        bits += c.valid_bits as u64;
    }
    let (trace, _) = backend.run_programs(&programs)?;
    Ok(backend.stats(trace, bits))
}
