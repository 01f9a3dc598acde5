//! Row-copy style back-ends that compute inside one subarray: Ambit
//! (triple-row activation), ReDRAM (double-row activation with a modified
//! sense amplifier) and DRISA (a logic latch next to the sense amplifiers).

use super::memory::{MemoryImage, RowAddr};
use crate::bits::BitRow;
use crate::dram::{CmdRequest, CommandKind};
use crate::error::{Error, Result};
use crate::threshold::TlpeFunc;
use serde::{Deserialize, Serialize};

/// A wordline: a plain row, or the negated wordline of a dual-contact row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Wl {
    R(u32),
    N(u32),
}

impl Wl {
    fn row(self) -> u32 {
        match self {
            Wl::R(r) | Wl::N(r) => r,
        }
    }
}

struct Seq<'a> {
    mem: &'a mut MemoryImage,
    bank: u32,
    cmds: Vec<CmdRequest>,
}

impl<'a> Seq<'a> {
    fn new(mem: &'a mut MemoryImage, bank: u32) -> Self {
        Seq {
            mem,
            bank,
            cmds: Vec::new(),
        }
    }

    fn read(&self, w: Wl) -> Result<BitRow> {
        let v = self.mem.read(RowAddr::new(self.bank, w.row()))?;
        Ok(match w {
            Wl::R(_) => v,
            Wl::N(_) => v.not(),
        })
    }

    fn drive(&mut self, ws: &[Wl], v: &BitRow) -> Result<()> {
        for &w in ws {
            let stored = match w {
                Wl::R(_) => v.clone(),
                Wl::N(_) => v.not(),
            };
            self.mem.write(RowAddr::new(self.bank, w.row()), stored)?;
        }
        Ok(())
    }

    /// Raise `ws` together; the sense amplifiers settle on the majority and
    /// every raised cell is overwritten with it.
    fn sense(&mut self, ws: &[Wl]) -> Result<BitRow> {
        let v = match ws {
            [a] => self.read(*a)?,
            [a, b, c] => BitRow::majority(&self.read(*a)?, &self.read(*b)?, &self.read(*c)?),
            _ => return Err(Error::Argument("activation raises one or three wordlines".into())),
        };
        self.drive(ws, &v)?;
        Ok(v)
    }

    fn act(&mut self, kind: CommandKind, row: u32) {
        self.cmds.push(CmdRequest::new(kind, self.bank, row));
    }

    fn pre(&mut self) {
        self.cmds.push(CmdRequest::new(CommandKind::Pre, self.bank, 0));
    }

    fn first_kind(ws: &[Wl]) -> CommandKind {
        if ws.len() == 3 {
            CommandKind::Tra
        } else {
            CommandKind::Act
        }
    }

    /// ACT src, ACT dst, PRE.
    fn aap(&mut self, src: &[Wl], dst: &[Wl]) -> Result<()> {
        let v = self.sense(src)?;
        self.drive(dst, &v)?;
        self.act(Self::first_kind(src), src[0].row());
        self.act(CommandKind::Act, dst[0].row());
        self.pre();
        Ok(())
    }

    fn ap(&mut self, src: &[Wl]) -> Result<()> {
        self.sense(src)?;
        self.act(Self::first_kind(src), src[0].row());
        self.pre();
        Ok(())
    }

    /// AAP whose first activation is a DRA computing `mode`.
    fn dra_aap(&mut self, a: u32, b: Option<u32>, mode: DraMode, dst: u32) -> Result<()> {
        let v = dra_value(self.mem, self.bank, a, b, mode)?;
        self.mem.write(RowAddr::new(self.bank, dst), v)?;
        self.act(CommandKind::Dra, a);
        self.act(CommandKind::Act, dst);
        self.pre();
        Ok(())
    }
}

fn same_bank(addrs: &[RowAddr]) -> Result<u32> {
    let bank = addrs[0].bank;
    if let Some(a) = addrs.iter().find(|a| a.bank != bank) {
        return Err(Error::Allocation(format!(
            "operands must share one bank/subarray, got banks {bank} and {}",
            a.bank
        )));
    }
    Ok(bank)
}

fn binary_src2(func: TlpeFunc, src2: Option<RowAddr>) -> Result<RowAddr> {
    src2.ok_or_else(|| Error::Argument(format!("{func} needs two operands")))
}

/// Ambit command sequence for `func`; the memory is updated as it goes.
pub(crate) fn ambit(
    mem: &mut MemoryImage,
    func: TlpeFunc,
    src1: RowAddr,
    src2: Option<RowAddr>,
    dest: RowAddr,
) -> Result<Vec<CmdRequest>> {
    let r = mem.reserved();
    let [t0, t1, t2, t3] = r.t.map(Wl::R);
    let (dcc0, dcc1) = (r.dcc[0], r.dcc[1]);
    let (a, d) = (Wl::R(src1.row), Wl::R(dest.row));
    let bank = match src2 {
        Some(s2) if !func.is_unary() => same_bank(&[src1, s2, dest])?,
        _ => same_bank(&[src1, dest])?,
    };
    let mut s = Seq::new(mem, bank);
    match func {
        TlpeFunc::Copy => s.aap(&[a], &[d])?,
        TlpeFunc::Not => {
            s.aap(&[a], &[Wl::R(dcc0)])?;
            s.aap(&[Wl::N(dcc0)], &[d])?;
        }
        TlpeFunc::And | TlpeFunc::Or => {
            let b = Wl::R(binary_src2(func, src2)?.row);
            let c = if func == TlpeFunc::And { r.c0 } else { r.c1 };
            s.aap(&[a], &[t0])?;
            s.aap(&[b], &[t1])?;
            s.aap(&[Wl::R(c)], &[t2])?;
            s.aap(&[t0, t1, t2], &[d])?;
        }
        TlpeFunc::Xor => {
            let b = Wl::R(binary_src2(func, src2)?.row);
            s.aap(&[a], &[t0, Wl::R(dcc0)])?;
            s.aap(&[b], &[t1, Wl::R(dcc1)])?;
            s.aap(&[Wl::R(r.c0)], &[t2, t3])?;
            // t1 = !a & b, t0 = a & !b
            s.ap(&[Wl::N(dcc0), t1, t2])?;
            s.ap(&[Wl::N(dcc1), t0, t3])?;
            s.aap(&[Wl::R(r.c1)], &[t2])?;
            s.aap(&[t0, t1, t2], &[d])?;
        }
        _ => return Err(Error::Unsupported(format!("Ambit has no sequence for {func}"))),
    }
    Ok(s.cmds)
}

/// Functions of the modified sense amplifier under a double-row activation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DraMode {
    Nand2,
    Nor2,
    And2,
    Or2,
    /// NOR2 of the two inverter outputs: `!(a & b) & (a | b)`.
    Xor2,
    /// Single-row activation through the inverting path.
    Not,
}

fn dra_value(mem: &mut MemoryImage, bank: u32, a: u32, b: Option<u32>, mode: DraMode) -> Result<BitRow> {
    let ra = mem.read(RowAddr::new(bank, a))?;
    if mode == DraMode::Not {
        // one row, restored as usual; the inverted value drives the bit-line
        return Ok(ra.not());
    }
    let b = b.ok_or_else(|| Error::Argument(format!("{mode:?} needs two rows")))?;
    let rb = mem.read(RowAddr::new(bank, b))?;
    let v = match mode {
        DraMode::Nand2 => ra.and(&rb).not(),
        DraMode::Nor2 => ra.or(&rb).not(),
        DraMode::And2 => ra.and(&rb),
        DraMode::Or2 => ra.or(&rb),
        DraMode::Xor2 => ra.and(&rb).not().and(&ra.or(&rb)),
        DraMode::Not => unreachable!(),
    };
    // charge sharing leaves both cells holding the result
    mem.write(RowAddr::new(bank, a), v.clone())?;
    mem.write(RowAddr::new(bank, b), v.clone())?;
    Ok(v)
}

/// ReDRAM double-row activation of rows `a` and `b` (both in `a`'s bank).
/// Two-row modes overwrite both rows with the result, as the charge sharing
/// does; `Not` reads a single row and leaves it intact.
pub fn redram_dra(mem: &mut MemoryImage, a: RowAddr, b: Option<RowAddr>, mode: DraMode) -> Result<BitRow> {
    if let Some(b) = b {
        same_bank(&[a, b])?;
    }
    dra_value(mem, a.bank, a.row, b.map(|b| b.row), mode)
}

/// Triple-row activation of three rows of one bank. All three rows are left
/// holding the bitwise majority, which is returned.
pub fn ambit_majority(mem: &mut MemoryImage, a: RowAddr, b: RowAddr, c: RowAddr) -> Result<BitRow> {
    let bank = same_bank(&[a, b, c])?;
    Seq::new(mem, bank).sense(&[Wl::R(a.row), Wl::R(b.row), Wl::R(c.row)])
}

pub(crate) fn redram(
    mem: &mut MemoryImage,
    func: TlpeFunc,
    src1: RowAddr,
    src2: Option<RowAddr>,
    dest: RowAddr,
) -> Result<Vec<CmdRequest>> {
    let r = mem.reserved();
    let (x1, x2) = (r.t[0], r.t[1]);
    let bank = match src2 {
        Some(s2) if !func.is_unary() => same_bank(&[src1, s2, dest])?,
        _ => same_bank(&[src1, dest])?,
    };
    let mut s = Seq::new(mem, bank);
    let mode = match func {
        TlpeFunc::Copy => {
            s.aap(&[Wl::R(src1.row)], &[Wl::R(dest.row)])?;
            return Ok(s.cmds);
        }
        TlpeFunc::Not => {
            s.dra_aap(src1.row, None, DraMode::Not, dest.row)?;
            return Ok(s.cmds);
        }
        TlpeFunc::And => DraMode::And2,
        TlpeFunc::Or => DraMode::Or2,
        TlpeFunc::Nand => DraMode::Nand2,
        TlpeFunc::Nor => DraMode::Nor2,
        TlpeFunc::Xor => DraMode::Xor2,
        _ => return Err(Error::Unsupported(format!("ReDRAM has no sequence for {func}"))),
    };
    let b = binary_src2(func, src2)?;
    s.aap(&[Wl::R(src1.row)], &[Wl::R(x1)])?;
    s.aap(&[Wl::R(b.row)], &[Wl::R(x2)])?;
    s.dra_aap(x1, Some(x2), mode, dest.row)?;
    Ok(s.cmds)
}

/// DRISA: the bank latch captures an activated row; a later activation can
/// drive latch-op-row (or the inverted row) back into the array.
pub(crate) fn drisa(
    mem: &mut MemoryImage,
    func: TlpeFunc,
    src1: RowAddr,
    src2: Option<RowAddr>,
    dest: RowAddr,
) -> Result<Vec<CmdRequest>> {
    let scratch = mem.reserved().t[0];
    let bank = match src2 {
        Some(s2) if !func.is_unary() => same_bank(&[src1, s2, dest])?,
        _ => same_bank(&[src1, dest])?,
    };
    let at = |row| RowAddr::new(bank, row);
    let mut s = Seq::new(mem, bank);
    match func {
        TlpeFunc::Copy => {
            // AP src (latch it), AP dest (latch drives the row)
            let v = s.mem.read(src1)?;
            s.mem.set_bank_latch(bank, v.clone());
            s.act(CommandKind::Act, src1.row);
            s.pre();
            s.mem.write(dest, v)?;
            s.act(CommandKind::Act, dest.row);
            s.pre();
        }
        TlpeFunc::Not => {
            let v = s.mem.read(src1)?.not();
            s.mem.write(at(scratch), v)?;
            s.act(CommandKind::Act, src1.row);
            s.act(CommandKind::Act, scratch);
            s.pre();
            s.aap(&[Wl::R(scratch)], &[Wl::R(dest.row)])?;
        }
        TlpeFunc::And => {
            let b = binary_src2(func, src2)?;
            let va = s.mem.read(src1)?;
            s.mem.set_bank_latch(bank, va);
            s.act(CommandKind::Act, src1.row);
            s.pre();
            let v = s.mem.bank_latch(bank).and(&s.mem.read(b)?);
            s.mem.write(at(scratch), v)?;
            s.act(CommandKind::Act, b.row);
            s.act(CommandKind::Act, scratch);
            s.pre();
            s.aap(&[Wl::R(scratch)], &[Wl::R(dest.row)])?;
        }
        _ => return Err(Error::Unsupported(format!("DRISA has no sequence for {func}"))),
    }
    Ok(s.cmds)
}
