use super::command::{CommandKind, CommandTrace};
use super::timing::ps_to_ns;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Per-command energy classes, in pJ (power in mW, i.e. pJ/ns).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyParams {
    /// One activate + precharge pair.
    pub e_act_pre: f64,
    /// Fraction of `e_act_pre` charged when a bank is precharged; the rest
    /// is charged at activation. Multi-row activations (TRA/DRA) are priced
    /// as one activation.
    pub pre_share: f64,
    pub e_rd: f64,
    /// Full-row write.
    pub e_wr: f64,
    /// One TLPE array cycle across the whole row.
    pub e_tlpe_cycle: f64,
    /// Standby power over the trace duration.
    pub p_background: f64,
}

impl Default for EnergyParams {
    /// DDR3-1600 style figures, fitted so that relative costs track a
    /// current-based power model. See the README.
    fn default() -> Self {
        EnergyParams {
            e_act_pre: 1150.0,
            pre_share: 0.4,
            e_rd: 900.0,
            e_wr: 1000.0,
            e_tlpe_cycle: 11.5,
            p_background: 67.5,
        }
    }
}

impl EnergyParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("e_act_pre", self.e_act_pre),
            ("e_rd", self.e_rd),
            ("e_wr", self.e_wr),
            ("e_tlpe_cycle", self.e_tlpe_cycle),
            ("p_background", self.p_background),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Invalid(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.pre_share) {
            return Err(Error::Invalid("pre_share must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn e_act(&self) -> f64 {
        self.e_act_pre * (1.0 - self.pre_share)
    }

    pub fn e_pre(&self) -> f64 {
        self.e_act_pre * self.pre_share
    }
}

/// Energy of a trace in pJ. PREA is charged one precharge per bank it
/// actually closes, which needs a replay of the open-bank state.
pub fn energy_of(trace: &CommandTrace, ep: &EnergyParams) -> f64 {
    let mut open: HashSet<u32> = HashSet::new();
    let g = trace.group_size.max(1);
    let mut e = 0.0;
    for c in &trace.commands {
        e += match c.kind {
            CommandKind::Act | CommandKind::Tra | CommandKind::Dra => {
                open.insert(c.bank);
                ep.e_act()
            }
            CommandKind::Pre => {
                open.remove(&c.bank);
                ep.e_pre()
            }
            CommandKind::Prea => {
                let first = c.bank / g * g;
                let closed = (first..first + g).filter(|b| open.remove(b)).count();
                ep.e_pre() * closed as f64
            }
            CommandKind::Rd => ep.e_rd,
            CommandKind::Wr => ep.e_wr,
            CommandKind::Compute => ep.e_tlpe_cycle * c.row as f64,
        };
    }
    e + ep.p_background * ps_to_ns(trace.total_latency)
}
