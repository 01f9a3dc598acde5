//! CIDAN: operands are activated in different banks of one group and meet
//! in the group's TLPE array; the result is written to a third open bank.

use super::memory::{MemoryImage, RowAddr};
use crate::dram::{CmdRequest, CommandKind, DramGeometry};
use crate::error::{Error, Result};
use crate::threshold::{
    compile_schedule, tlpea_apply, tlpea_step, LatchAction, Schedule, Threshold, TlpeControlWord, TlpeFunc,
    TlpeaLatches,
};
use serde::{Deserialize, Serialize};

/// Where the carry of an addition comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CarryIn {
    /// Latches cleared before the add (no commands needed).
    Zero,
    /// Whatever L1 holds, typically the carry of the previous bit.
    Latched,
    /// Loaded from a row with an extra ACT, COMPUTE, PREA step.
    Row(RowAddr),
}

struct Ctx<'a> {
    mem: &'a mut MemoryImage,
    group: u32,
    cmds: Vec<CmdRequest>,
}

impl Ctx<'_> {
    fn base(&self) -> u32 {
        self.group * self.mem.geometry().bank_group_size
    }

    fn in_group(&self, a: RowAddr) -> Result<()> {
        if self.mem.geometry().group_of(a.bank) != self.group {
            return Err(Error::Allocation(format!(
                "{a} is outside bank group {}; CIDAN operands must share one group",
                self.group
            )));
        }
        Ok(())
    }

    fn act(&mut self, a: RowAddr) {
        self.cmds.push(CmdRequest::new(CommandKind::Act, a.bank, a.row));
    }

    fn finish(&mut self, cycles: u32, write: Option<RowAddr>) {
        let base = self.base();
        self.cmds.push(CmdRequest::new(CommandKind::Compute, base, cycles));
        if let Some(w) = write {
            self.cmds.push(CmdRequest::new(CommandKind::Wr, w.bank, w.row));
        }
        self.cmds.push(CmdRequest::new(CommandKind::Prea, base, 0));
    }

    /// One pass: ACT every source, ACT dest, COMPUTE, WR dest, PREA. Banks
    /// must already be distinct (a source may appear twice).
    fn pass(&mut self, sched: &Schedule, srcs: &[RowAddr], dest: RowAddr) -> Result<()> {
        let mut vals = Vec::with_capacity(srcs.len());
        for (i, &s) in srcs.iter().enumerate() {
            if !srcs[..i].contains(&s) {
                self.act(s);
            }
            vals.push(self.mem.read(s)?);
        }
        self.act(dest);
        let refs: Vec<_> = vals.iter().collect();
        let (out, latches) = tlpea_apply(sched, &refs, self.mem.latches(self.group))?;
        self.mem.set_latches(self.group, latches);
        self.mem.write(dest, out)?;
        self.finish(sched.cycle_count(), Some(dest));
        Ok(())
    }

    fn copy(&mut self, src: RowAddr, dest: RowAddr) -> Result<()> {
        self.pass(&compile_schedule(TlpeFunc::Copy), &[src], dest)
    }

    fn place(&mut self, srcs: Vec<RowAddr>, dest: RowAddr) -> Result<(Vec<RowAddr>, RowAddr, Option<RowAddr>)> {
        let plan = plan_fixups(self.mem.geometry(), &srcs, dest)?;
        let mut srcs = srcs;
        if let Some(staged) = plan.stage_src2 {
            self.copy(srcs[1], staged)?;
            srcs[1] = staged;
        }
        Ok((srcs, plan.compute_at, plan.copy_to))
    }
}

/// How a CIDAN operation is made legal when operands share banks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixupPlan {
    /// src2 is first copied to this staging row.
    pub stage_src2: Option<RowAddr>,
    /// Where the TLPE result is written.
    pub compute_at: RowAddr,
    /// Final copy of the result, when `compute_at` is not the destination.
    pub copy_to: Option<RowAddr>,
}

impl FixupPlan {
    pub fn is_direct(&self) -> bool {
        self.stage_src2.is_none() && self.copy_to.is_none()
    }
}

/// Decide the staging needed so that sources and destination sit in
/// distinct banks of the destination's group. Sources outside that group
/// cannot be fixed and give an allocation error.
pub fn plan_fixups(geo: &DramGeometry, srcs: &[RowAddr], dest: RowAddr) -> Result<FixupPlan> {
    let group = geo.group_of(dest.bank);
    if let Some(s) = srcs.iter().find(|s| geo.group_of(s.bank) != group) {
        return Err(Error::Allocation(format!(
            "{s} is outside bank group {group}; CIDAN operands must share one group"
        )));
    }
    let staging = |bank| RowAddr::new(bank, geo.staging_row());
    let free = |used: &[u32]| {
        geo.group_banks(group)
            .find(|b| !used.contains(b))
            .expect("a 4-bank group always has a spare bank")
    };
    let mut banks: Vec<u32> = srcs.iter().map(|s| s.bank).collect();
    let mut stage_src2 = None;
    if srcs.len() == 2 && srcs[0].bank == srcs[1].bank && srcs[0] != srcs[1] {
        let f = free(&[srcs[0].bank, dest.bank]);
        stage_src2 = Some(staging(f));
        banks[1] = f;
    }
    let (compute_at, copy_to) = if banks.contains(&dest.bank) {
        (staging(free(&banks)), Some(dest))
    } else {
        (dest, None)
    };
    Ok(FixupPlan {
        stage_src2,
        compute_at,
        copy_to,
    })
}

fn ctx(mem: &mut MemoryImage, dest: RowAddr) -> Ctx<'_> {
    let group = mem.geometry().group_of(dest.bank);
    Ctx {
        mem,
        group,
        cmds: Vec::new(),
    }
}

pub(crate) fn rowop(
    mem: &mut MemoryImage,
    func: TlpeFunc,
    src1: RowAddr,
    src2: Option<RowAddr>,
    dest: RowAddr,
) -> Result<Vec<CmdRequest>> {
    if func == TlpeFunc::AddBit {
        return Err(Error::Argument("use exec_add_rows for additions".into()));
    }
    let mut c = ctx(mem, dest);
    let srcs = if func.is_unary() {
        vec![src1]
    } else {
        vec![src1, src2.ok_or_else(|| Error::Argument(format!("{func} needs two operands")))?]
    };
    let (srcs, at, then) = c.place(srcs, dest)?;
    c.pass(&compile_schedule(func), &srcs, at)?;
    if let Some(d) = then {
        c.copy(at, d)?;
    }
    Ok(c.cmds)
}

pub(crate) fn add(
    mem: &mut MemoryImage,
    a: RowAddr,
    b: RowAddr,
    carry_in: CarryIn,
    sum: RowAddr,
    carry_out: Option<RowAddr>,
) -> Result<Vec<CmdRequest>> {
    let mut c = ctx(mem, sum);
    let width = c.mem.width();
    match carry_in {
        CarryIn::Zero => c.mem.set_latches(c.group, TlpeaLatches::new(width)),
        CarryIn::Latched => {}
        CarryIn::Row(r) => {
            c.in_group(r)?;
            // B1 straight into L1
            let ctrl = TlpeControlWord::idle()
                .with_input(0, false)
                .with_threshold(Threshold::One)
                .with_latch(LatchAction::StoreL1);
            let v = c.mem.read(r)?;
            let (_, l) = tlpea_step(&ctrl, &[&v], c.mem.latches(c.group))?;
            c.mem.set_latches(c.group, l);
            c.act(r);
            c.finish(1, None);
        }
    }
    let (srcs, at, then) = c.place(vec![a, b], sum)?;
    c.pass(&compile_schedule(TlpeFunc::AddBit), &srcs, at)?;
    if let Some(d) = then {
        c.copy(at, d)?;
    }
    if let Some(co) = carry_out {
        c.in_group(co)?;
        // L1 alone at threshold 1 reproduces the carry
        let mut ctrl = TlpeControlWord::idle().with_threshold(Threshold::One);
        ctrl.enable_l1_feedback = true;
        let (out, l) = tlpea_step(&ctrl, &[], c.mem.latches(c.group))?;
        c.mem.set_latches(c.group, l);
        c.mem.write(co, out)?;
        c.act(co);
        c.finish(1, Some(co));
    }
    Ok(c.cmds)
}
