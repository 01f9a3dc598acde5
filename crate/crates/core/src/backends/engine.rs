use crate::dram::{CmdRequest, Ps, Scheduler};
use crate::error::{Error, Result};
use std::collections::VecDeque;

/// The command sequence of one row-level operation, bound to the bank group
/// whose resources it uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub group: u32,
    pub cmds: Vec<CmdRequest>,
    /// Programs (by index) whose results this one reads.
    pub deps: Vec<usize>,
}

/// Issue a batch of programs on `sched`. Programs of one group run strictly
/// in order; different groups overlap. At each step the arbiter issues the
/// head command that can go earliest (lower group on ties). Returns the
/// completion time of every program.
pub fn schedule_programs(sched: &mut Scheduler, programs: &[Program]) -> Result<Vec<Ps>> {
    let groups = sched.geometry().groups() as usize;
    let mut queues: Vec<VecDeque<usize>> = vec![VecDeque::new(); groups];
    for (i, p) in programs.iter().enumerate() {
        if p.group as usize >= groups {
            return Err(Error::Argument(format!("program {i} targets missing group {}", p.group)));
        }
        if p.deps.iter().any(|&d| d >= i) {
            return Err(Error::Argument(format!("program {i} depends on a later program")));
        }
        queues[p.group as usize].push_back(i);
    }
    let mut done: Vec<Option<Ps>> = vec![None; programs.len()];
    let mut cursor = vec![0usize; programs.len()];
    let mut finish = vec![0 as Ps; programs.len()];
    // Per group: issue time of the previous command, so a group never
    // issues out of order.
    let mut last = vec![0 as Ps; groups];

    loop {
        // (earliest issue, group, dependency-ready time)
        let mut best: Option<(Ps, usize, Ps)> = None;
        for g in 0..groups {
            let Some(&p) = queues[g].front() else { continue };
            let mut ready = last[g];
            let mut blocked = false;
            for &d in &programs[p].deps {
                match done[d] {
                    Some(t) => ready = ready.max(t),
                    None => blocked = true,
                }
            }
            if blocked {
                continue;
            }
            let prog = &programs[p];
            if prog.cmds.is_empty() {
                best = Some((ready, g, ready));
                break;
            }
            let t = sched.earliest(&prog.cmds[cursor[p]], ready)?;
            if best.is_none_or(|(bt, _, _)| t < bt) {
                best = Some((t, g, ready));
            }
        }
        let Some((_, g, ready)) = best else {
            if queues.iter().all(VecDeque::is_empty) {
                break;
            }
            return Err(Error::Invalid("program dependencies cannot be satisfied".into()));
        };
        let p = queues[g][0];
        let prog = &programs[p];
        finish[p] = finish[p].max(ready);
        if let Some(req) = prog.cmds.get(cursor[p]) {
            let t = sched.issue(*req, ready)?;
            finish[p] = finish[p].max(sched.completion(req, t));
            last[g] = t;
            cursor[p] += 1;
        }
        if cursor[p] == prog.cmds.len() {
            done[p] = Some(finish[p]);
            queues[g].pop_front();
        }
    }
    Ok(done.into_iter().map(|d| d.unwrap_or(0)).collect())
}
