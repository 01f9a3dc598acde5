use super::command::{CommandKind, CommandTrace, DramCommand};
use super::geometry::DramGeometry;
use super::timing::{Ps, TimingParams, TimingPs};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Optional protocol extensions a back-end relies on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    /// A second ACT to an already open bank (in-subarray row copy).
    pub row_clone: bool,
    pub tra: bool,
    pub dra: bool,
    /// COMPUTE commands to a TLPE array.
    pub compute: bool,
}

impl Capabilities {
    pub const STANDARD: Capabilities = Capabilities {
        row_clone: false,
        tra: false,
        dra: false,
        compute: false,
    };

    pub const ALL: Capabilities = Capabilities {
        row_clone: true,
        tra: true,
        dra: true,
        compute: true,
    };
}

/// A command before it has been given an issue time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CmdRequest {
    pub kind: CommandKind,
    pub bank: u32,
    pub row: u32,
}

impl CmdRequest {
    pub fn new(kind: CommandKind, bank: u32, row: u32) -> Self {
        CmdRequest { kind, bank, row }
    }
}

/// Multi-command sequences used by in-subarray PIM designs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Macro {
    /// ACT src, ACT dst, PRE on one bank: copies `src` into `dst`.
    Aap { bank: u32, src: u32, dst: u32 },
    /// ACT, PRE on one bank.
    Ap { bank: u32, row: u32 },
}

pub fn expand_macro(m: Macro) -> Vec<CmdRequest> {
    match m {
        Macro::Aap { bank, src, dst } => vec![
            CmdRequest::new(CommandKind::Act, bank, src),
            CmdRequest::new(CommandKind::Act, bank, dst),
            CmdRequest::new(CommandKind::Pre, bank, 0),
        ],
        Macro::Ap { bank, row } => vec![
            CmdRequest::new(CommandKind::Act, bank, row),
            CmdRequest::new(CommandKind::Pre, bank, 0),
        ],
    }
}

#[derive(Clone, Debug, Default)]
struct BankState {
    open_row: Option<u32>,
    last_act: Option<Ps>,
    last_pre: Option<Ps>,
    last_wr: Option<Ps>,
}

fn protocol(rule: &'static str, detail: String) -> Error {
    Error::Protocol { rule, detail }
}

/// In-order command scheduler for one device. Each request is issued at the
/// earliest time that satisfies every timing constraint against the commands
/// already issued; requests are never reordered.
#[derive(Clone, Debug)]
pub struct Scheduler {
    geometry: DramGeometry,
    t: TimingPs,
    caps: Capabilities,
    banks: Vec<BankState>,
    recent_acts: VecDeque<Ps>,
    last_issue: Option<Ps>,
    compute_end: Vec<Ps>,
    trace: CommandTrace,
}

impl Scheduler {
    pub fn new(geometry: DramGeometry, timing: &TimingParams, caps: Capabilities) -> Result<Self> {
        geometry.validate()?;
        timing.validate()?;
        Ok(Scheduler {
            geometry,
            t: TimingPs::from(timing),
            caps,
            banks: vec![BankState::default(); geometry.banks_per_chip as usize],
            recent_acts: VecDeque::with_capacity(4),
            last_issue: None,
            compute_end: vec![0; geometry.groups() as usize],
            trace: CommandTrace::new(geometry.bank_group_size),
        })
    }

    pub fn geometry(&self) -> &DramGeometry {
        &self.geometry
    }

    pub fn capabilities(&self) -> Capabilities {
        self.caps
    }

    pub fn trace(&self) -> &CommandTrace {
        &self.trace
    }

    pub fn into_trace(self) -> CommandTrace {
        self.trace
    }

    /// Issue time of the most recent command.
    pub fn last_issue(&self) -> Option<Ps> {
        self.last_issue
    }

    pub fn open_row(&self, bank: u32) -> Option<u32> {
        self.banks.get(bank as usize).and_then(|b| b.open_row)
    }

    fn validate_address(&self, req: &CmdRequest) -> Result<()> {
        if req.bank >= self.geometry.banks_per_chip {
            return Err(protocol("bank-range", format!("bank {} does not exist", req.bank)));
        }
        let row_addressed = matches!(
            req.kind,
            CommandKind::Act | CommandKind::Tra | CommandKind::Dra | CommandKind::Rd | CommandKind::Wr
        );
        if row_addressed && req.row >= self.geometry.rows_per_bank {
            return Err(protocol("row-range", format!("row {} does not exist", req.row)));
        }
        Ok(())
    }

    fn open_banks_in_group(&self, bank: u32) -> impl Iterator<Item = (u32, &BankState)> + '_ {
        let g = self.geometry.group_of(bank);
        self.geometry
            .group_banks(g)
            .map(move |b| (b, &self.banks[b as usize]))
            .filter(|(_, s)| s.open_row.is_some())
    }

    /// Constraints a precharge of `bank` must respect.
    fn precharge_ready(&self, s: &BankState) -> Ps {
        let mut t = s.last_act.map_or(0, |a| a + self.t.ras);
        if let (Some(w), Some(a)) = (s.last_wr, s.last_act) {
            if w >= a {
                t = t.max(w + self.t.wr + self.t.wb_extra);
            }
        }
        t
    }

    /// Earliest legal issue time for `req` at or after `request`, without
    /// changing any state.
    pub fn earliest(&self, req: &CmdRequest, request: Ps) -> Result<Ps> {
        self.validate_address(req)?;
        let mut t = request;
        if let Some(last) = self.last_issue {
            t = t.max(last + self.t.ck);
        }
        let bank = &self.banks[req.bank as usize];
        let group = self.geometry.group_of(req.bank) as usize;
        match req.kind {
            CommandKind::Act | CommandKind::Tra | CommandKind::Dra => {
                if req.kind == CommandKind::Tra && !self.caps.tra {
                    return Err(protocol("tra-unsupported", "device has no triple-row activation".into()));
                }
                if req.kind == CommandKind::Dra && !self.caps.dra {
                    return Err(protocol("dra-unsupported", "device has no double-row activation".into()));
                }
                if bank.open_row.is_some() {
                    if !self.caps.row_clone {
                        return Err(protocol(
                            "act-open-bank",
                            format!("ACT to bank {} which is already open", req.bank),
                        ));
                    }
                    t = t.max(bank.last_act.unwrap_or(0) + self.t.ras);
                } else {
                    if let Some(p) = bank.last_pre {
                        t = t.max(p + self.t.rp);
                    }
                    if let Some(a) = bank.last_act {
                        t = t.max(a + self.t.rc);
                    }
                }
                if let Some(&last) = self.recent_acts.back() {
                    t = t.max(last + self.t.rrd);
                }
                if self.recent_acts.len() == 4 {
                    t = t.max(self.recent_acts[0] + self.t.faw);
                }
            }
            CommandKind::Pre => {
                if bank.open_row.is_none() {
                    return Err(protocol("pre-closed-bank", format!("PRE to closed bank {}", req.bank)));
                }
                t = t.max(self.precharge_ready(bank)).max(self.compute_end[group]);
            }
            CommandKind::Prea => {
                for (_, s) in self.open_banks_in_group(req.bank) {
                    t = t.max(self.precharge_ready(s));
                }
                t = t.max(self.compute_end[group]);
            }
            CommandKind::Rd | CommandKind::Wr => {
                let name = if req.kind == CommandKind::Rd { "rd-closed-bank" } else { "wr-closed-bank" };
                match bank.open_row {
                    None => {
                        return Err(protocol(name, format!("{} to precharged bank {}", req.kind, req.bank)));
                    }
                    Some(r) if r != req.row => {
                        return Err(protocol(
                            "row-miss",
                            format!("{} to row {} but bank {} has row {r} open", req.kind, req.row, req.bank),
                        ));
                    }
                    Some(_) => {}
                }
                t = t.max(bank.last_act.unwrap_or(0) + self.t.rcd);
                if req.kind == CommandKind::Wr {
                    t = t.max(self.compute_end[group]);
                }
            }
            CommandKind::Compute => {
                if !self.caps.compute {
                    return Err(protocol("compute-unsupported", "device has no TLPE array".into()));
                }
                if req.row == 0 {
                    return Err(protocol("compute-cycles", "COMPUTE needs at least one cycle".into()));
                }
                let mut any = false;
                for (_, s) in self.open_banks_in_group(req.bank) {
                    any = true;
                    t = t.max(s.last_act.unwrap_or(0) + self.t.rcd);
                }
                if !any {
                    return Err(protocol(
                        "compute-no-open-bank",
                        format!("COMPUTE in group {group} with no open bank"),
                    ));
                }
                t = t.max(self.compute_end[group]);
            }
        }
        Ok(t)
    }

    /// Time at which `req`, issued at `issue`, has finished its effect.
    pub fn completion(&self, req: &CmdRequest, issue: Ps) -> Ps {
        match req.kind {
            CommandKind::Pre | CommandKind::Prea => issue + self.t.rp,
            CommandKind::Wr => issue + self.t.wr + self.t.wb_extra,
            CommandKind::Compute => issue + req.row as Ps * self.t.ck,
            _ => issue + self.t.ck,
        }
    }

    /// Issue `req` no earlier than `request`; returns the issue time.
    pub fn issue(&mut self, req: CmdRequest, request: Ps) -> Result<Ps> {
        let t = self.earliest(&req, request)?;
        let group = self.geometry.group_of(req.bank) as usize;
        let done = self.completion(&req, t);
        match req.kind {
            CommandKind::Act | CommandKind::Tra | CommandKind::Dra => {
                let b = &mut self.banks[req.bank as usize];
                b.open_row = Some(req.row);
                b.last_act = Some(t);
                if self.recent_acts.len() == 4 {
                    self.recent_acts.pop_front();
                }
                self.recent_acts.push_back(t);
            }
            CommandKind::Pre => {
                let b = &mut self.banks[req.bank as usize];
                b.open_row = None;
                b.last_pre = Some(t);
            }
            CommandKind::Prea => {
                for bank in self.geometry.group_banks(group as u32) {
                    let b = &mut self.banks[bank as usize];
                    if b.open_row.is_some() {
                        b.open_row = None;
                        b.last_pre = Some(t);
                    }
                }
            }
            CommandKind::Rd => {}
            CommandKind::Wr => {
                self.banks[req.bank as usize].last_wr = Some(t);
            }
            CommandKind::Compute => {
                self.compute_end[group] = t + req.row as Ps * self.t.ck;
            }
        }
        self.last_issue = Some(t);
        self.trace.commands.push(DramCommand {
            kind: req.kind,
            bank: req.bank,
            row: req.row,
            issue: t,
        });
        self.trace.total_latency = self.trace.total_latency.max(done);
        Ok(t)
    }

    /// Issue a sequence back to back, each no earlier than `request`.
    pub fn issue_all(&mut self, reqs: &[CmdRequest], request: Ps) -> Result<Ps> {
        let mut last = request;
        for r in reqs {
            last = self.issue(*r, request)?;
        }
        Ok(last)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dram::timing::ns_to_ps;

    fn sched(caps: Capabilities) -> Scheduler {
        Scheduler::new(DramGeometry::default(), &TimingParams::default(), caps).unwrap()
    }

    fn act(bank: u32) -> CmdRequest {
        CmdRequest::new(CommandKind::Act, bank, 1)
    }

    #[test]
    fn rrd_spacing() {
        let mut s = sched(Capabilities::STANDARD);
        assert_eq!(s.issue(act(0), 0).unwrap(), 0);
        assert_eq!(s.issue(act(1), 0).unwrap(), ns_to_ps(7.5));
    }

    #[test]
    fn faw_window() {
        let mut s = sched(Capabilities::STANDARD);
        for (b, at) in [(0, 0.0), (1, 7.5), (2, 15.0), (3, 22.5)] {
            assert_eq!(s.issue(act(b), ns_to_ps(at)).unwrap(), ns_to_ps(at));
        }
        assert_eq!(s.issue(act(4), ns_to_ps(10.0)).unwrap(), ns_to_ps(30.0));
    }

    #[test]
    fn faw_binds_with_short_rrd() {
        let timing = TimingParams { t_rrd: 5.0, ..Default::default() };
        let mut s = Scheduler::new(DramGeometry::default(), &timing, Capabilities::STANDARD).unwrap();
        for b in 0..4 {
            s.issue(act(b), 0).unwrap();
        }
        assert_eq!(s.issue(act(4), 0).unwrap(), ns_to_ps(30.0));
    }

    #[test]
    fn read_waits_for_rcd() {
        let mut s = sched(Capabilities::STANDARD);
        s.issue(act(0), 0).unwrap();
        let rd = CmdRequest::new(CommandKind::Rd, 0, 1);
        assert_eq!(s.issue(rd, ns_to_ps(5.0)).unwrap(), ns_to_ps(15.0));
    }

    #[test]
    fn protocol_errors_name_the_rule() {
        let mut s = sched(Capabilities::STANDARD);
        let err = s.issue(CmdRequest::new(CommandKind::Rd, 0, 0), 0).unwrap_err();
        assert!(matches!(err, Error::Protocol { rule: "rd-closed-bank", .. }));
        s.issue(act(0), 0).unwrap();
        let err = s.issue(act(0), 0).unwrap_err();
        assert!(matches!(err, Error::Protocol { rule: "act-open-bank", .. }));
        let err = s.issue(CmdRequest::new(CommandKind::Tra, 1, 0), 0).unwrap_err();
        assert!(matches!(err, Error::Protocol { rule: "tra-unsupported", .. }));
        let err = s.issue(CmdRequest::new(CommandKind::Wr, 0, 2), 0).unwrap_err();
        assert!(matches!(err, Error::Protocol { rule: "row-miss", .. }));
        let err = s.issue(CmdRequest::new(CommandKind::Act, 9, 0), 0).unwrap_err();
        assert!(matches!(err, Error::Protocol { rule: "bank-range", .. }));
    }

    #[test]
    fn aap_and_ap_latency() {
        let mut s = sched(Capabilities::ALL);
        s.issue_all(&expand_macro(Macro::Aap { bank: 0, src: 1, dst: 2 }), 0).unwrap();
        assert_eq!(s.trace().total_latency, ns_to_ps(82.5));
        assert_eq!(s.trace().commands.len(), 3);

        let mut s = sched(Capabilities::ALL);
        s.issue_all(&expand_macro(Macro::Ap { bank: 0, row: 1 }), 0).unwrap();
        assert_eq!(s.trace().total_latency, ns_to_ps(47.5));
    }

    #[test]
    fn back_to_back_aap_respects_rp() {
        let mut s = sched(Capabilities::ALL);
        let m = expand_macro(Macro::Aap { bank: 0, src: 1, dst: 2 });
        s.issue_all(&m, 0).unwrap();
        s.issue_all(&m, 0).unwrap();
        assert_eq!(s.trace().total_latency, ns_to_ps(165.0));
    }

    #[test]
    fn earliest_does_not_mutate() {
        let mut s = sched(Capabilities::STANDARD);
        s.issue(act(0), 0).unwrap();
        let before = s.trace().clone();
        assert_eq!(s.earliest(&act(1), 0).unwrap(), ns_to_ps(7.5));
        assert_eq!(s.trace(), &before);
    }
}
