use crate::backends::{Backend, BackendKind, CarryIn, MemoryImage, Program, RowAddr, RunStats};
use crate::bits::BitRow;
use crate::dram::SimConfig;
use crate::error::{Error, Result};
use crate::threshold::TlpeFunc;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Handle to a logical row held by a [`RowMachine`].
pub type RowId = usize;

/// Counts of row operations by function name.
pub type OpMix = BTreeMap<String, u64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineReport {
    pub stats: RunStats,
    pub op_mix: OpMix,
}

/// Runs a dataflow of row operations on a back-end.
///
/// Rows are logical: each operation finds its operands already placed in
/// legal rows of its bank group (host-side data movement is not charged).
/// An operation runs in the group that produced its first operand, or
/// round-robin when its operands come from the host. Dependencies between
/// operations are honoured by the scheduler; independent work in different
/// groups overlaps.
#[derive(Clone, Debug)]
pub struct RowMachine {
    backend: Backend,
    mem: MemoryImage,
    lanes: usize,
    values: Vec<BitRow>,
    deps: Vec<Vec<usize>>,
    home: Vec<Option<u32>>,
    programs: Vec<Program>,
    mix: OpMix,
    next_group: u32,
}

impl RowMachine {
    /// A machine whose rows carry `lanes` useful bits (at most one DRAM row).
    pub fn new(kind: BackendKind, config: &SimConfig, lanes: usize) -> Result<Self> {
        let row_bits = config.geometry.row_bits();
        if lanes == 0 || lanes > row_bits {
            return Err(Error::Capacity(format!("{lanes} lanes do not fit a {row_bits}-bit row")));
        }
        // Timing and energy do not depend on how much of a row is used, so
        // the functional image only keeps the lanes in play.
        let mut cfg = *config;
        let bpc = cfg.geometry.bits_per_col as usize;
        cfg.geometry.cols_per_row = lanes.div_ceil(bpc) as u32;
        let backend = Backend::new(kind, cfg)?;
        let mem = backend.memory()?;
        Ok(RowMachine {
            backend,
            mem,
            lanes,
            values: Vec::new(),
            deps: Vec::new(),
            home: Vec::new(),
            programs: Vec::new(),
            mix: OpMix::new(),
            next_group: 0,
        })
    }

    pub fn kind(&self) -> BackendKind {
        self.backend.kind
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    fn width(&self) -> usize {
        self.mem.width()
    }

    fn push(&mut self, v: BitRow, deps: Vec<usize>, home: Option<u32>) -> RowId {
        self.values.push(v);
        self.deps.push(deps);
        self.home.push(home);
        self.values.len() - 1
    }

    fn fit(&self, v: &BitRow) -> Result<BitRow> {
        if v.width() > self.lanes {
            return Err(Error::Argument(format!("row of {} bits exceeds {} lanes", v.width(), self.lanes)));
        }
        Ok(v.extract(0, v.width(), self.width()))
    }

    /// Place host data in memory.
    pub fn load(&mut self, v: &BitRow) -> Result<RowId> {
        let v = self.fit(v)?;
        Ok(self.push(v, Vec::new(), None))
    }

    /// A row the host computed from `inputs`; it becomes available once the
    /// operations producing those inputs have finished.
    pub fn host(&mut self, inputs: &[RowId], v: &BitRow) -> Result<RowId> {
        let v = self.fit(v)?;
        let mut deps: Vec<usize> = inputs.iter().flat_map(|&i| self.deps[i].iter().copied()).collect();
        deps.sort_unstable();
        deps.dedup();
        let home = inputs.iter().find_map(|&i| self.home[i]);
        Ok(self.push(v, deps, home))
    }

    /// Current value of a row, `lanes` wide.
    pub fn get(&self, id: RowId) -> BitRow {
        self.values[id].extract(0, self.lanes, self.lanes)
    }

    fn pick_group(&mut self, inputs: &[RowId]) -> u32 {
        if let Some(g) = inputs.iter().find_map(|&i| self.home[i]) {
            return g;
        }
        let g = self.next_group;
        self.next_group = (g + 1) % self.mem.geometry().groups();
        g
    }

    fn slots(&self, group: u32) -> [RowAddr; 4] {
        let base = group * self.mem.geometry().bank_group_size;
        if self.backend.kind == BackendKind::Cidan {
            [0, 1, 2, 3].map(|i| RowAddr::new(base + i, 0))
        } else {
            [0, 1, 2, 3].map(|r| RowAddr::new(base, r))
        }
    }

    fn record(&mut self, mut p: Program, inputs: &[RowId], name: &str) -> usize {
        let mut deps: Vec<usize> = inputs.iter().flat_map(|&i| self.deps[i].iter().copied()).collect();
        deps.sort_unstable();
        deps.dedup();
        p.deps = deps;
        self.programs.push(p);
        *self.mix.entry(name.to_string()).or_default() += 1;
        self.programs.len() - 1
    }

    /// `func(a, b)` on the back-end.
    pub fn op(&mut self, func: TlpeFunc, a: RowId, b: Option<RowId>) -> Result<RowId> {
        self.backend.kind.require(func)?;
        let inputs: Vec<RowId> = std::iter::once(a).chain(b).collect();
        let group = self.pick_group(&inputs);
        let [s1, s2, d, _] = self.slots(group);
        self.mem.write(s1, self.values[a].clone())?;
        let src2 = match b {
            Some(b) => {
                self.mem.write(s2, self.values[b].clone())?;
                Some(s2)
            }
            None => None,
        };
        let p = self.backend.plan_rowop(&mut self.mem, func, s1, src2, d)?;
        let out = self.mem.read(d)?;
        let idx = self.record(p, &inputs, func.name());
        Ok(self.push(out, vec![idx], Some(group)))
    }

    /// Bit-serial addition of two numbers stored as bit planes (least
    /// significant first), carried in the TLPE latches. CIDAN only.
    pub fn add_planes(&mut self, a: &[RowId], b: &[RowId]) -> Result<Vec<RowId>> {
        self.backend.kind.require(TlpeFunc::AddBit)?;
        if a.len() != b.len() {
            return Err(Error::Argument("plane counts differ".into()));
        }
        let group = self.pick_group(&[a.first().copied().unwrap_or(0)]);
        let [sa, sb, ss, _] = self.slots(group);
        let mut out = Vec::with_capacity(a.len());
        let mut prev: Option<RowId> = None;
        for (k, (&x, &y)) in a.iter().zip(b).enumerate() {
            self.mem.write(sa, self.values[x].clone())?;
            self.mem.write(sb, self.values[y].clone())?;
            let cin = if k == 0 { CarryIn::Zero } else { CarryIn::Latched };
            let p = self.backend.plan_add_rows(&mut self.mem, sa, sb, cin, ss, None)?;
            let sum = self.mem.read(ss)?;
            // the carry chain orders the bits
            let inputs: Vec<RowId> = [x, y].into_iter().chain(prev).collect();
            let idx = self.record(p, &inputs, "add");
            let id = self.push(sum, vec![idx], Some(group));
            out.push(id);
            prev = Some(id);
        }
        Ok(out)
    }

    pub fn op_mix(&self) -> &OpMix {
        &self.mix
    }

    /// Schedule everything issued so far on a fresh device.
    pub fn run(&self) -> Result<MachineReport> {
        let (trace, _) = self.backend.run_programs(&self.programs)?;
        let ops: u64 = self.mix.values().sum();
        Ok(MachineReport {
            stats: self.backend.stats(trace, ops * self.lanes as u64),
            op_mix: self.mix.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn independent_chains_overlap_across_groups() {
        let cfg = SimConfig::default();
        let mut m = RowMachine::new(BackendKind::Cidan, &cfg, 100).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let a = m.load(&BitRow::random(100, &mut rng)).unwrap();
        let b = m.load(&BitRow::random(100, &mut rng)).unwrap();
        let x = m.op(TlpeFunc::And, a, Some(b)).unwrap();
        let y = m.op(TlpeFunc::Or, b, Some(a)).unwrap();
        assert_eq!(m.get(x), m.get(a).and(&m.get(b)));
        assert_eq!(m.get(y), m.get(a).or(&m.get(b)));
        let two = m.run().unwrap().stats.latency_ns;
        assert!(two < 2.0 * 76.25, "{two}");

        // a dependent chain cannot overlap
        let mut m = RowMachine::new(BackendKind::Cidan, &cfg, 100).unwrap();
        let a = m.load(&BitRow::zeros(100)).unwrap();
        let x = m.op(TlpeFunc::Not, a, None).unwrap();
        let h = m.host(&[x], &BitRow::ones(100)).unwrap();
        m.op(TlpeFunc::Not, h, None).unwrap();
        let r = m.run().unwrap();
        assert!(r.stats.latency_ns >= 2.0 * 68.75);
        assert_eq!(r.op_mix["not"], 2);
    }

    #[test]
    fn plane_add_matches_integers() {
        let cfg = SimConfig::default();
        let mut m = RowMachine::new(BackendKind::Cidan, &cfg, 16).unwrap();
        let xs: Vec<u16> = (0..16).map(|i| i * 3001 + 7).collect();
        let ys: Vec<u16> = (0..16).map(|i| 65000 - i * 999).collect();
        let planes = |m: &mut RowMachine, v: &[u16]| -> Vec<RowId> {
            (0..16).map(|k| m.load(&BitRow::from_bits(v.iter().map(|x| x >> k & 1 == 1))).unwrap()).collect()
        };
        let (a, b) = (planes(&mut m, &xs), planes(&mut m, &ys));
        let s = m.add_planes(&a, &b).unwrap();
        for lane in 0..16 {
            let got: u16 = (0..16).map(|k| (m.get(s[k]).get(lane) as u16) << k).sum();
            assert_eq!(got, xs[lane].wrapping_add(ys[lane]));
        }
        let mut amb = RowMachine::new(BackendKind::Ambit, &cfg, 16).unwrap();
        let z = amb.load(&BitRow::zeros(16)).unwrap();
        assert!(matches!(amb.add_planes(&[z], &[z]), Err(Error::Unsupported(_))));
    }
}
