use super::BackendKind;
use crate::dram::{energy_of, ps_to_ns, CommandKind, CommandTrace, EnergyParams};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Command counts as AAP/AP macro-commands plus the leftovers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacroCounts {
    /// Bank closed by PRE after two activations.
    pub aap: u64,
    /// Bank closed by PRE after one activation.
    pub ap: u64,
    /// Activations not folded into an AAP/AP (closed by PREA, or left open).
    pub act: u64,
    pub rd: u64,
    pub wr: u64,
    pub prea: u64,
    pub compute_cycles: u64,
}

impl MacroCounts {
    /// Replay `trace` and fold ACT/PRE pairs into AAP and AP.
    pub fn of(trace: &CommandTrace) -> Self {
        let mut m = MacroCounts::default();
        let mut pending: HashMap<u32, u64> = HashMap::new();
        let g = trace.group_size.max(1);
        for c in &trace.commands {
            match c.kind {
                k if k.is_activation() => *pending.entry(c.bank).or_default() += 1,
                CommandKind::Pre => match pending.remove(&c.bank).unwrap_or(0) {
                    0 => {}
                    1 => m.ap += 1,
                    n => {
                        m.aap += 1;
                        m.act += n - 2;
                    }
                },
                CommandKind::Prea => {
                    m.prea += 1;
                    let first = c.bank / g * g;
                    for b in first..first + g {
                        m.act += pending.remove(&b).unwrap_or(0);
                    }
                }
                CommandKind::Rd => m.rd += 1,
                CommandKind::Wr => m.wr += 1,
                CommandKind::Compute => m.compute_cycles += c.row as u64,
                _ => unreachable!(),
            }
        }
        m.act += pending.values().sum::<u64>();
        m
    }
}

/// Outcome of running something on a back-end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub backend: BackendKind,
    #[serde(skip)]
    pub trace: CommandTrace,
    pub latency_ns: f64,
    pub energy_pj: f64,
    pub macro_counts: MacroCounts,
    /// Result bits produced (vector length times operations).
    pub bit_ops: u64,
}

impl RunStats {
    pub fn from_trace(backend: BackendKind, trace: CommandTrace, energy: &EnergyParams, bit_ops: u64) -> Self {
        RunStats {
            backend,
            latency_ns: ps_to_ns(trace.total_latency),
            energy_pj: energy_of(&trace, energy),
            macro_counts: MacroCounts::of(&trace),
            bit_ops,
            trace,
        }
    }

    /// `self` followed by `other` on the same device.
    pub fn then(&self, other: &RunStats) -> RunStats {
        let m = |a: MacroCounts, b: MacroCounts| MacroCounts {
            aap: a.aap + b.aap,
            ap: a.ap + b.ap,
            act: a.act + b.act,
            rd: a.rd + b.rd,
            wr: a.wr + b.wr,
            prea: a.prea + b.prea,
            compute_cycles: a.compute_cycles + b.compute_cycles,
        };
        RunStats {
            backend: self.backend,
            trace: self.trace.concat(&other.trace),
            latency_ns: self.latency_ns + other.latency_ns,
            energy_pj: self.energy_pj + other.energy_pj,
            macro_counts: m(self.macro_counts, other.macro_counts),
            bit_ops: self.bit_ops + other.bit_ops,
        }
    }

    /// Bit operations per nanosecond, i.e. GOps/s.
    pub fn throughput_gops(&self) -> f64 {
        if self.latency_ns == 0.0 {
            0.0
        } else {
            self.bit_ops as f64 / self.latency_ns
        }
    }
}
