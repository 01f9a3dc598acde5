use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Simulation time in picoseconds.
pub type Ps = u64;

pub fn ns_to_ps(ns: f64) -> Ps {
    (ns * 1000.0).round() as Ps
}

pub fn ps_to_ns(ps: Ps) -> f64 {
    ps as f64 / 1000.0
}

/// DRAM timing constraints, in nanoseconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingParams {
    /// ACT to RD/WR (row data at the sense amplifiers).
    pub t_rcd: f64,
    /// ACT to PRE (row restored).
    pub t_ras: f64,
    /// PRE to ACT.
    pub t_rp: f64,
    /// ACT to ACT in one bank; always `t_ras + t_rp`.
    pub t_rc: f64,
    /// ACT to ACT anywhere in the device.
    pub t_rrd: f64,
    /// Rolling window holding at most four ACTs.
    pub t_faw: f64,
    /// Command clock.
    pub t_ck: f64,
    /// Write recovery before precharge.
    pub t_wr: f64,
    /// Extra write-back time for a full-row write from the TLPE array.
    pub t_writeback_extra: f64,
}

impl Default for TimingParams {
    /// 1Gb DDR3-1600 figures. `t_writeback_extra` is a calibration knob.
    fn default() -> Self {
        TimingParams {
            t_rcd: 15.0,
            t_ras: 35.0,
            t_rp: 12.5,
            t_rc: 47.5,
            t_rrd: 7.5,
            t_faw: 30.0,
            t_ck: 1.25,
            t_wr: 15.0,
            t_writeback_extra: 17.5,
        }
    }
}

impl TimingParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("t_rcd", self.t_rcd),
            ("t_ras", self.t_ras),
            ("t_rp", self.t_rp),
            ("t_rc", self.t_rc),
            ("t_rrd", self.t_rrd),
            ("t_faw", self.t_faw),
            ("t_ck", self.t_ck),
            ("t_wr", self.t_wr),
        ];
        for (name, v) in all {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.t_writeback_extra >= 0.0) {
            return Err(Error::Invalid("t_writeback_extra must be non-negative".into()));
        }
        if ns_to_ps(self.t_rc) != ns_to_ps(self.t_ras) + ns_to_ps(self.t_rp) {
            return Err(Error::Invalid(format!(
                "t_rc ({}) must equal t_ras + t_rp ({})",
                self.t_rc,
                self.t_ras + self.t_rp
            )));
        }
        if self.t_faw < self.t_rrd {
            return Err(Error::Invalid("t_faw must be at least t_rrd".into()));
        }
        Ok(())
    }

    /// AAP (ACT, ACT, PRE on one bank) end to end.
    pub fn aap_ns(&self) -> f64 {
        2.0 * self.t_ras + self.t_rp
    }

    /// AP (ACT, PRE on one bank) end to end.
    pub fn ap_ns(&self) -> f64 {
        self.t_ras + self.t_rp
    }
}

/// Timing in picoseconds, as used by the scheduler and checker.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct TimingPs {
    pub rcd: Ps,
    pub ras: Ps,
    pub rp: Ps,
    pub rc: Ps,
    pub rrd: Ps,
    pub faw: Ps,
    pub ck: Ps,
    pub wr: Ps,
    pub wb_extra: Ps,
}

impl From<&TimingParams> for TimingPs {
    fn from(t: &TimingParams) -> Self {
        TimingPs {
            rcd: ns_to_ps(t.t_rcd),
            ras: ns_to_ps(t.t_ras),
            rp: ns_to_ps(t.t_rp),
            rc: ns_to_ps(t.t_rc),
            rrd: ns_to_ps(t.t_rrd),
            faw: ns_to_ps(t.t_faw),
            ck: ns_to_ps(t.t_ck),
            wr: ns_to_ps(t.t_wr),
            wb_extra: ns_to_ps(t.t_writeback_extra),
        }
    }
}
