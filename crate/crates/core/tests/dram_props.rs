use cidan::dram::{
    check_trace, energy_of, Capabilities, CmdRequest, CommandKind, CommandTrace, DramGeometry, EnergyParams,
    Ps, Scheduler, TimingParams,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random protocol-legal request stream, built against the live bank state.
fn random_trace(seed: u64, len: usize, caps: Capabilities) -> CommandTrace {
    let geo = DramGeometry::default();
    let mut s = Scheduler::new(geo, &TimingParams::default(), caps).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut now: Ps = 0;
    while s.trace().commands.len() < len {
        let bank = rng.gen_range(0..geo.banks_per_chip);
        let group_base = geo.group_of(bank) * geo.bank_group_size;
        let req = match s.open_row(bank) {
            None => {
                let kind = match rng.gen_range(0..10) {
                    0 if caps.tra => CommandKind::Tra,
                    1 if caps.dra => CommandKind::Dra,
                    _ => CommandKind::Act,
                };
                CmdRequest::new(kind, bank, rng.gen_range(0..64))
            }
            Some(row) => match rng.gen_range(0..10) {
                0..=2 => CmdRequest::new(CommandKind::Rd, bank, row),
                3..=4 => CmdRequest::new(CommandKind::Wr, bank, row),
                5 if caps.compute => CmdRequest::new(CommandKind::Compute, group_base, rng.gen_range(1..3)),
                6 => CmdRequest::new(CommandKind::Prea, group_base, 0),
                7 if caps.row_clone => CmdRequest::new(CommandKind::Act, bank, rng.gen_range(0..64)),
                _ => CmdRequest::new(CommandKind::Pre, bank, 0),
            },
        };
        now += rng.gen_range(0..20_000);
        s.issue(req, now).unwrap();
    }
    s.into_trace()
}

#[test]
fn scheduled_traces_pass_independent_checker() {
    let timing = TimingParams::default();
    for (seed, caps) in [(1, Capabilities::STANDARD), (2, Capabilities::ALL)] {
        let t = random_trace(seed, 100_000, caps);
        let v = check_trace(&t, &timing, caps);
        assert!(v.is_empty(), "{} violations, first {:?}", v.len(), v.first());
    }
}

#[test]
fn checker_catches_perturbed_trace() {
    // Pull every command 1 ns earlier in turn; whenever the scheduler had
    // issued it as early as a rule allowed, the checker must notice.
    let t = random_trace(3, 300, Capabilities::STANDARD);
    let timing = TimingParams::default();
    let mut caught = 0;
    for i in 1..t.commands.len() {
        let mut p = t.clone();
        p.commands[i].issue = p.commands[i].issue.saturating_sub(1_000).max(p.commands[i - 1].issue);
        let v = check_trace(&p, &timing, Capabilities::STANDARD);
        if !v.is_empty() {
            caught += 1;
            assert!(v.iter().all(|v| v.second >= i), "{v:?}");
        }
    }
    assert!(caught > 100, "only {caught} perturbations detected");
}

#[test]
fn scheduling_is_deterministic() {
    let a = random_trace(7, 5_000, Capabilities::ALL);
    let b = random_trace(7, 5_000, Capabilities::ALL);
    assert_eq!(a, b);
    let ep = EnergyParams::default();
    assert_eq!(energy_of(&a, &ep).to_bits(), energy_of(&b, &ep).to_bits());
}

fn closed(seed: u64, len: usize) -> CommandTrace {
    // Close every bank so the trace composes cleanly.
    let t = random_trace(seed, len, Capabilities::ALL);
    let mut s = Scheduler::new(DramGeometry::default(), &TimingParams::default(), Capabilities::ALL).unwrap();
    for c in &t.commands {
        s.issue(CmdRequest::new(c.kind, c.bank, c.row), c.issue).unwrap();
    }
    for g in 0..2 {
        s.issue(CmdRequest::new(CommandKind::Prea, g * 4, 0), 0).unwrap();
    }
    s.into_trace()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delaying_a_request_never_issues_earlier(seed in 0u64..1000, idx in 0usize..60, delay in 0u64..50_000) {
        let t = random_trace(seed, 60, Capabilities::STANDARD);
        let reqs: Vec<_> = t.commands.iter().map(|c| (CmdRequest::new(c.kind, c.bank, c.row), c.issue)).collect();
        let mut s = Scheduler::new(DramGeometry::default(), &TimingParams::default(), Capabilities::STANDARD).unwrap();
        for (i, (r, at)) in reqs.iter().enumerate() {
            let req_time = if i == idx { at + delay } else { *at };
            let issued = s.issue(*r, req_time).unwrap();
            prop_assert!(issued >= t.commands[i].issue);
        }
    }

    #[test]
    fn energy_is_additive(a in 0u64..500, b in 0u64..500) {
        let ep = EnergyParams::default();
        let (ta, tb) = (closed(a, 40), closed(b, 40));
        let whole = energy_of(&ta.concat(&tb), &ep);
        let parts = energy_of(&ta, &ep) + energy_of(&tb, &ep);
        prop_assert!((whole - parts).abs() < 1e-6 * whole.max(1.0));
    }
}
