//! Executable PIM back-ends. Each turns a row-level operation into a DRAM
//! command sequence and applies its effect to a [`MemoryImage`].

mod cidan;
mod engine;
mod memory;
mod stats;
mod subarray;

pub use cidan::{plan_fixups, CarryIn, FixupPlan};
pub use engine::{schedule_programs, Program};
pub use memory::{user_rows, MemoryImage, ReservedRows, RowAddr, RESERVED_ROWS};
pub use stats::{MacroCounts, RunStats};
pub use subarray::{ambit_majority, redram_dra, DraMode};

use crate::dram::{Capabilities, CommandTrace, Ps, Scheduler, SimConfig};
use crate::error::{Error, Result};
use crate::threshold::TlpeFunc;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Cidan,
    Ambit,
    Redram,
    Drisa,
}

impl BackendKind {
    pub const ALL: [BackendKind; 4] = [BackendKind::Cidan, BackendKind::Ambit, BackendKind::Redram, BackendKind::Drisa];

    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Cidan => "cidan",
            BackendKind::Ambit => "ambit",
            BackendKind::Redram => "redram",
            BackendKind::Drisa => "drisa",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BackendKind::Cidan => "CIDAN",
            BackendKind::Ambit => "Ambit",
            BackendKind::Redram => "ReDRAM",
            BackendKind::Drisa => "DRISA",
        }
    }

    pub fn capabilities(self) -> Capabilities {
        let mut c = Capabilities::STANDARD;
        match self {
            BackendKind::Cidan => c.compute = true,
            BackendKind::Ambit => {
                c.row_clone = true;
                c.tra = true;
            }
            BackendKind::Redram => {
                c.row_clone = true;
                c.dra = true;
            }
            BackendKind::Drisa => c.row_clone = true,
        }
        c
    }

    /// Functions with a command sequence on this back-end. ADD is only
    /// available on CIDAN, through [`Backend::exec_add_rows`].
    pub fn supported(self) -> &'static [TlpeFunc] {
        use TlpeFunc::*;
        match self {
            BackendKind::Cidan => &[Copy, Not, And, Or, Nand, Nor, Xor, Xnor, AddBit],
            BackendKind::Ambit => &[Copy, Not, And, Or, Xor],
            BackendKind::Redram => &[Copy, Not, And, Or, Nand, Nor, Xor],
            BackendKind::Drisa => &[Copy, Not, And],
        }
    }

    pub fn supports(self, func: TlpeFunc) -> bool {
        self.supported().contains(&func)
    }

    pub fn require(self, func: TlpeFunc) -> Result<()> {
        if self.supports(func) {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("{} does not support {}", self.label(), func.name().to_uppercase())))
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BackendKind::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Argument(format!("unknown backend `{s}`")))
    }
}

/// A back-end bound to a device configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Backend {
    pub kind: BackendKind,
    pub config: SimConfig,
}

impl Backend {
    pub fn new(kind: BackendKind, config: SimConfig) -> Result<Self> {
        config.validate()?;
        Ok(Backend { kind, config })
    }

    pub fn with_defaults(kind: BackendKind) -> Self {
        Backend {
            kind,
            config: SimConfig::default(),
        }
    }

    pub fn memory(&self) -> Result<MemoryImage> {
        MemoryImage::new(self.config.geometry)
    }

    pub fn scheduler(&self) -> Result<Scheduler> {
        Scheduler::new(self.config.geometry, &self.config.timing, self.kind.capabilities())
    }

    fn check_mem(&self, mem: &MemoryImage) -> Result<()> {
        if mem.geometry() != &self.config.geometry {
            return Err(Error::Argument("memory image geometry differs from the back-end config".into()));
        }
        Ok(())
    }

    /// Apply `func` to `mem` and return the command program, without timing.
    pub fn plan_rowop(
        &self,
        mem: &mut MemoryImage,
        func: TlpeFunc,
        src1: RowAddr,
        src2: Option<RowAddr>,
        dest: RowAddr,
    ) -> Result<Program> {
        self.check_mem(mem)?;
        self.kind.require(func)?;
        for a in [Some(src1), src2, Some(dest)].into_iter().flatten() {
            mem.check_user(a)?;
        }
        let cmds = match self.kind {
            BackendKind::Cidan => cidan::rowop(mem, func, src1, src2, dest)?,
            BackendKind::Ambit => subarray::ambit(mem, func, src1, src2, dest)?,
            BackendKind::Redram => subarray::redram(mem, func, src1, src2, dest)?,
            BackendKind::Drisa => subarray::drisa(mem, func, src1, src2, dest)?,
        };
        Ok(Program {
            group: mem.geometry().group_of(dest.bank),
            cmds,
            deps: Vec::new(),
        })
    }

    pub fn plan_add_rows(
        &self,
        mem: &mut MemoryImage,
        a: RowAddr,
        b: RowAddr,
        carry_in: CarryIn,
        sum: RowAddr,
        carry_out: Option<RowAddr>,
    ) -> Result<Program> {
        self.check_mem(mem)?;
        if self.kind != BackendKind::Cidan {
            return Err(Error::Unsupported(format!("{} does not support ADD", self.kind.label())));
        }
        let carry_row = match carry_in {
            CarryIn::Row(r) => Some(r),
            _ => None,
        };
        for x in [Some(a), Some(b), Some(sum), carry_out, carry_row].into_iter().flatten() {
            mem.check_user(x)?;
        }
        let cmds = cidan::add(mem, a, b, carry_in, sum, carry_out)?;
        Ok(Program {
            group: mem.geometry().group_of(sum.bank),
            cmds,
            deps: Vec::new(),
        })
    }

    /// Schedule programs on a fresh device.
    pub fn run_programs(&self, programs: &[Program]) -> Result<(CommandTrace, Vec<Ps>)> {
        let mut s = self.scheduler()?;
        let done = schedule_programs(&mut s, programs)?;
        Ok((s.into_trace(), done))
    }

    pub fn stats(&self, trace: CommandTrace, bit_ops: u64) -> RunStats {
        RunStats::from_trace(self.kind, trace, &self.config.energy, bit_ops)
    }

    fn run_one(&self, p: Program, bits: u64) -> Result<RunStats> {
        let (trace, _) = self.run_programs(&[p])?;
        Ok(self.stats(trace, bits))
    }

    /// `dest = func(src1, src2)` on an otherwise idle device.
    pub fn exec_rowop(
        &self,
        mem: &mut MemoryImage,
        func: TlpeFunc,
        src1: RowAddr,
        src2: Option<RowAddr>,
        dest: RowAddr,
    ) -> Result<RunStats> {
        let p = self.plan_rowop(mem, func, src1, src2, dest)?;
        self.run_one(p, mem.width() as u64)
    }

    pub fn copy_row(&self, mem: &mut MemoryImage, src: RowAddr, dest: RowAddr) -> Result<RunStats> {
        self.exec_rowop(mem, TlpeFunc::Copy, src, None, dest)
    }

    /// Lane-wise full add: `sum = a ^ b ^ cin`, carry = Maj(a, b, cin). The
    /// carry stays in the L1 latches for the next bit and is written to
    /// `carry_out` only if one is given.
    pub fn exec_add_rows(
        &self,
        mem: &mut MemoryImage,
        a: RowAddr,
        b: RowAddr,
        carry_in: CarryIn,
        sum: RowAddr,
        carry_out: Option<RowAddr>,
    ) -> Result<RunStats> {
        let p = self.plan_add_rows(mem, a, b, carry_in, sum, carry_out)?;
        self.run_one(p, mem.width() as u64)
    }
}
