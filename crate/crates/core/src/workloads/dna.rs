//! Approximate pattern search with the Myers bit-vector recurrence.
//!
//! Lane `i` of every state row belongs to pattern position `i`. The Boolean
//! steps run on the back-end; the carry-propagating add and the one-lane
//! shifts run on the host unless the transposed in-memory add is chosen.

use super::host::HostCostModel;
use super::machine::{MachineReport, RowId, RowMachine};
use crate::backends::BackendKind;
use crate::bits::BitRow;
use crate::dram::SimConfig;
use crate::error::{Error, Result};
use crate::threshold::TlpeFunc;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AddStrategy {
    /// Word-wide add on the host.
    #[default]
    Host,
    /// Host transposes the operands into one-bit planes and the TLPE array
    /// adds them bit-serially, carry in the latches. CIDAN only.
    TransposedPim,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MyersRun {
    pub backend: BackendKind,
    /// Entry `j` is the smallest edit distance between the pattern and any
    /// substring of the text ending just after position `j`.
    pub distances: Vec<u32>,
    pub pim: MachineReport,
    pub host_ns: f64,
}

impl MyersRun {
    pub fn best(&self) -> Option<u32> {
        self.distances.iter().copied().min()
    }
}

/// Dynamic-programming reference with a free start anywhere in the text.
pub fn edit_distances_dp(pattern: &[u8], text: &[u8]) -> Vec<u32> {
    let m = pattern.len();
    let mut col: Vec<u32> = (0..=m as u32).collect();
    let mut out = Vec::with_capacity(text.len());
    for &t in text {
        let mut diag = col[0];
        col[0] = 0;
        for i in 1..=m {
            let up = col[i];
            let sub = diag + u32::from(pattern[i - 1] != t);
            col[i] = sub.min(up + 1).min(col[i - 1] + 1);
            diag = up;
        }
        out.push(col[m]);
    }
    out
}

pub fn myers_search(
    pattern: &[u8],
    text: &[u8],
    backend: BackendKind,
    config: &SimConfig,
    strategy: AddStrategy,
    host: &HostCostModel,
) -> Result<MyersRun> {
    host.validate()?;
    let m = pattern.len();
    if m == 0 {
        return Err(Error::Argument("empty pattern".into()));
    }
    if m > config.geometry.row_bits() {
        return Err(Error::Capacity(format!(
            "pattern of {m} symbols is longer than a {}-bit row",
            config.geometry.row_bits()
        )));
    }
    if strategy == AddStrategy::TransposedPim && backend != BackendKind::Cidan {
        return Err(Error::Unsupported(format!("{} has no in-memory add", backend.label())));
    }
    let mut mch = RowMachine::new(backend, config, m)?;
    let mut peq: BTreeMap<u8, RowId> = BTreeMap::new();
    for &c in pattern {
        if !peq.contains_key(&c) {
            let row = BitRow::from_bits(pattern.iter().map(|&p| p == c));
            peq.insert(c, mch.load(&row)?);
        }
    }
    let zero = mch.load(&BitRow::zeros(m))?;
    let mut pv = mch.load(&BitRow::ones(m))?;
    let mut mv = zero;
    let mut score = m as u32;
    let mut distances = Vec::with_capacity(text.len());
    let top = m - 1;
    let words = m.div_ceil(64) as f64;
    let mut host_words = 0.0;
    use TlpeFunc::{And, Not, Or, Xor};
    for &c in text {
        let eq = peq.get(&c).copied().unwrap_or(zero);
        let xv = mch.op(Or, eq, Some(mv))?;
        let t = mch.op(And, eq, Some(pv))?;
        let sum = match strategy {
            AddStrategy::Host => {
                let v = mch.get(t).wrapping_add(&mch.get(pv));
                host_words += words;
                mch.host(&[t, pv], &v)?
            }
            AddStrategy::TransposedPim => add_transposed(&mut mch, t, pv, m)?,
        };
        let x = mch.op(Xor, sum, Some(pv))?;
        let xh = mch.op(Or, x, Some(eq))?;
        let y = mch.op(Or, xh, Some(pv))?;
        let ny = mch.op(Not, y, None)?;
        let ph = mch.op(Or, mv, Some(ny))?;
        let mh = mch.op(And, pv, Some(xh))?;
        let (phv, mhv) = (mch.get(ph), mch.get(mh));
        if phv.get(top) {
            score += 1;
        }
        if mhv.get(top) {
            score -= 1;
        }
        distances.push(score);
        let phs = mch.host(&[ph], &phv.shl1(false))?;
        let mhs = mch.host(&[mh], &mhv.shl1(false))?;
        host_words += 2.0 * words;
        let z = mch.op(Or, xv, Some(phs))?;
        let nz = mch.op(Not, z, None)?;
        pv = mch.op(Or, mhs, Some(nz))?;
        mv = mch.op(And, phs, Some(xv))?;
    }
    Ok(MyersRun {
        backend,
        distances,
        pim: mch.run()?,
        host_ns: host_words * 8.0 * host.ns_per_host_byte,
    })
}

/// `a + b` over the pattern's `m` lanes as one integer, by planes.
fn add_transposed(mch: &mut RowMachine, a: RowId, b: RowId, m: usize) -> Result<RowId> {
    let (av, bv) = (mch.get(a), mch.get(b));
    let plane = |v: &BitRow, k: usize| BitRow::from_bits(std::iter::once(v.get(k)).chain(std::iter::repeat(false).take(m - 1)));
    let mut pa = Vec::with_capacity(m);
    let mut pb = Vec::with_capacity(m);
    for k in 0..m {
        pa.push(mch.host(&[a], &plane(&av, k))?);
        pb.push(mch.host(&[b], &plane(&bv, k))?);
    }
    let sums = mch.add_planes(&pa, &pb)?;
    let bits: Vec<bool> = sums.iter().map(|&s| mch.get(s).get(0)).collect();
    mch.host(&sums, &BitRow::from_bits(bits))
}
