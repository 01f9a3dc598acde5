use super::checker::Violation;
use super::timing::{ns_to_ps, Ps};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CommandKind {
    Act,
    Pre,
    /// Precharge every open bank of a bank group.
    Prea,
    Rd,
    Wr,
    /// TLPE array evaluation; `row` carries the cycle count.
    Compute,
    /// Triple-row activation.
    Tra,
    /// Double-row activation.
    Dra,
}

impl CommandKind {
    pub const ALL: [CommandKind; 8] = [
        CommandKind::Act,
        CommandKind::Pre,
        CommandKind::Prea,
        CommandKind::Rd,
        CommandKind::Wr,
        CommandKind::Compute,
        CommandKind::Tra,
        CommandKind::Dra,
    ];

    pub fn is_activation(self) -> bool {
        matches!(self, CommandKind::Act | CommandKind::Tra | CommandKind::Dra)
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            CommandKind::Act => "ACT",
            CommandKind::Pre => "PRE",
            CommandKind::Prea => "PREA",
            CommandKind::Rd => "RD",
            CommandKind::Wr => "WR",
            CommandKind::Compute => "COMPUTE",
            CommandKind::Tra => "TRA",
            CommandKind::Dra => "DRA",
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

impl FromStr for CommandKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CommandKind::ALL
            .into_iter()
            .find(|k| k.mnemonic().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Argument(format!("unknown command kind `{s}`")))
    }
}

/// A command with the time the scheduler issued it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DramCommand {
    pub kind: CommandKind,
    pub bank: u32,
    pub row: u32,
    pub issue: Ps,
}

/// A timed command stream.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CommandTrace {
    pub commands: Vec<DramCommand>,
    /// Time by which the last command has completed.
    pub total_latency: Ps,
    /// Scope of PREA and COMPUTE.
    pub group_size: u32,
    pub violations: Vec<Violation>,
}

impl CommandTrace {
    pub fn new(group_size: u32) -> Self {
        CommandTrace {
            group_size,
            ..Default::default()
        }
    }

    pub fn total_latency_ns(&self) -> f64 {
        super::timing::ps_to_ns(self.total_latency)
    }

    pub fn count(&self, kind: CommandKind) -> usize {
        self.commands.iter().filter(|c| c.kind == kind).count()
    }

    /// Sequential composition: `other` starts when `self` has finished.
    pub fn concat(&self, other: &CommandTrace) -> CommandTrace {
        let shift = self.total_latency;
        let mut commands = self.commands.clone();
        commands.extend(other.commands.iter().map(|c| DramCommand {
            issue: c.issue + shift,
            ..*c
        }));
        CommandTrace {
            commands,
            total_latency: shift + other.total_latency,
            group_size: self.group_size,
            violations: Vec::new(),
        }
    }

    /// Completion time of the whole trace, recomputed from issue times:
    /// the latest of each command's issue plus its busy period.
    pub fn recompute_latency(&self, timing: &super::TimingParams) -> Ps {
        let ps = super::timing::ns_to_ps;
        self.commands
            .iter()
            .map(|c| {
                c.issue
                    + match c.kind {
                        CommandKind::Pre | CommandKind::Prea => ps(timing.t_rp),
                        CommandKind::Wr => ps(timing.t_wr + timing.t_writeback_extra),
                        CommandKind::Compute => c.row as Ps * ps(timing.t_ck),
                        _ => ps(timing.t_ck),
                    }
            })
            .max()
            .unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("issue_time_ns,kind,bank,row\n");
        for c in &self.commands {
            s.push_str(&format!(
                "{}.{:03},{},{},{}\n",
                c.issue / 1000,
                c.issue % 1000,
                c.kind,
                c.bank,
                c.row
            ));
        }
        s
    }

    /// Parse the CSV produced by [`CommandTrace::to_csv`]. Completion time
    /// is not stored in the file; it is set to the last issue time.
    pub fn from_csv(text: &str, group_size: u32) -> Result<CommandTrace> {
        let mut trace = CommandTrace::new(group_size);
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (idx == 0 && line.starts_with("issue_time_ns")) {
                continue;
            }
            let bad = |msg: &str| Error::Config {
                line: idx + 1,
                msg: msg.to_string(),
            };
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 4 {
                return Err(bad("expected 4 fields: issue_time_ns,kind,bank,row"));
            }
            let ns: f64 = f[0].parse().map_err(|_| bad("bad issue time"))?;
            if !(ns >= 0.0) {
                return Err(bad("negative issue time"));
            }
            let kind: CommandKind = f[1].parse().map_err(|_| bad("bad command kind"))?;
            let bank: u32 = f[2].parse().map_err(|_| bad("bad bank"))?;
            let row: u32 = f[3].parse().map_err(|_| bad("bad row"))?;
            trace.commands.push(DramCommand {
                kind,
                bank,
                row,
                issue: ns_to_ps(ns),
            });
        }
        trace.total_latency = trace.commands.iter().map(|c| c.issue).max().unwrap_or(0);
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = CommandTrace::new(4);
        t.commands.push(DramCommand { kind: CommandKind::Act, bank: 0, row: 3, issue: 0 });
        t.commands.push(DramCommand { kind: CommandKind::Compute, bank: 0, row: 2, issue: 31_250 });
        t.commands.push(DramCommand { kind: CommandKind::Prea, bank: 4, row: 0, issue: 63_750 });
        let csv = t.to_csv();
        assert!(csv.contains("31.250,COMPUTE,0,2"));
        let back = CommandTrace::from_csv(&csv, 4).unwrap();
        assert_eq!(back.commands, t.commands);
    }

    #[test]
    fn csv_errors_carry_line() {
        let err = CommandTrace::from_csv("issue_time_ns,kind,bank,row\n0,ACT,0,0\n1,FOO,0,0\n", 4).unwrap_err();
        assert_eq!(err, Error::Config { line: 3, msg: "bad command kind".into() });
    }
}
