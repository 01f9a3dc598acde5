//! Acceptance suite: one PASS/FAIL line per criterion.

use aes::cipher::{BlockEncrypt, KeyInit};
use cidan::backends::{CarryIn, MacroCounts};
use cidan::dram::{check_trace, energy_of, Capabilities, CmdRequest, CommandKind, CommandTrace, DramGeometry, Ps, Scheduler, TimingParams};
use cidan::report::{compare, measure, Comparison, ExperimentConfig, Measurements, PaperConstants};
use cidan::threshold::{compile_schedule, run_schedule, tlpea_apply, TlpeaLatches, TlpeState};
use cidan::workloads::{
    aes_encrypt, aes_encrypt_lanes, edit_distances_dp, matching_index_batch, myers_search, partition_graph, AddStrategy,
    Block, GraphDataset, HostCostModel,
};
use cidan::{Backend, BackendKind, BitRow, Error, RowAddr, TlpeFunc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

// Tolerances, relative to the published value.
const LATENCY_TOL: f64 = 0.10;
const SIZE_SPREAD_TOL: f64 = 0.01;
const THROUGHPUT_TOL: f64 = 0.20;
const ENERGY_TOL: f64 = 0.25;
const AES_TOL: f64 = 0.30;
const GRAPH_TOL: f64 = 0.05;
const DNA_TOL: f64 = 0.20;
const TRUTH_TABLE_BUDGET: Duration = Duration::from_secs(1);
const EQUIVALENCE_BUDGET: Duration = Duration::from_secs(30);
const SUITE_BUDGET: Duration = Duration::from_secs(300);

type Verdict = Result<String, String>;

fn emit(n: u32, title: &str, v: &Verdict) {
    let (tag, detail) = match v {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    // straight to the process stdout so the lines survive output capture
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {n:>2}: {tag} {title}: {detail}");
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(got: f64, want: f64, tol: f64) -> bool {
    (got / want - 1.0).abs() <= tol
}

/// Check the listed ids of a comparison run against a pinned tolerance.
fn check_ids(cmps: &[Comparison], ids: &[&str], tol: f64) -> Verdict {
    let mut parts = Vec::new();
    let mut bad = Vec::new();
    for id in ids {
        let c = cmps.iter().find(|c| c.id == *id).ok_or_else(|| format!("{id} missing from constants"))?;
        let got = c.measured.ok_or_else(|| format!("{id} not measured"))?;
        let s = format!("{id}={got:.3} (published {})", c.paper);
        if within(got, c.paper, tol) {
            parts.push(s);
        } else {
            bad.push(s);
        }
    }
    if bad.is_empty() {
        Ok(parts.join(", "))
    } else {
        Err(format!("outside ±{:.0}%: {}", tol * 100.0, bad.join(", ")))
    }
}

fn boolean(func: TlpeFunc, a: bool, b: bool) -> bool {
    match func {
        TlpeFunc::Copy => a,
        TlpeFunc::Not => !a,
        TlpeFunc::And => a & b,
        TlpeFunc::Or => a | b,
        TlpeFunc::Nand => !(a & b),
        TlpeFunc::Nor => !(a | b),
        TlpeFunc::Xor => a ^ b,
        TlpeFunc::Xnor => !(a ^ b),
        TlpeFunc::AddBit => unreachable!(),
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut cases = 0;
    for func in TlpeFunc::ALL {
        let sched = compile_schedule(func);
        if func == TlpeFunc::AddBit {
            for bits in 0..8u8 {
                let (a, b, c) = (bits & 1 == 1, bits & 2 == 2, bits & 4 == 4);
                let (sum, carry, _) = run_schedule(&sched, [a, b, false, false], TlpeState { l1: c, l2: false });
                let total = a as u8 + b as u8 + c as u8;
                ensure(sum == (total % 2 == 1) && carry == Some(total >= 2), || format!("adder wrong at {a} {b} {c}"))?;
                cases += 1;
            }
            continue;
        }
        for bits in 0..4u8 {
            let (a, b) = (bits & 1 == 1, bits & 2 == 2);
            let (out, _, _) = run_schedule(&sched, [a, b, false, false], TlpeState::default());
            ensure(out == boolean(func, a, b), || format!("{} wrong at {a} {b}", func.name()))?;
            // the same through the array, one lane
            let rows = [BitRow::splat(1, a), BitRow::splat(1, b)];
            let refs: Vec<&BitRow> = if func.is_unary() { vec![&rows[0]] } else { vec![&rows[0], &rows[1]] };
            let (row, _) = tlpea_apply(&sched, &refs, &TlpeaLatches::new(1)).map_err(|e| e.to_string())?;
            ensure(row.get(0) == out, || format!("{} array lane differs", func.name()))?;
            cases += 1;
        }
    }
    let t = start.elapsed();
    ensure(t < TRUTH_TABLE_BUDGET, || format!("took {t:?}"))?;
    Ok(format!("{cases} cases over {} functions in {t:?}", TlpeFunc::ALL.len()))
}

fn word_oracle(func: TlpeFunc, a: &BitRow, b: &BitRow) -> BitRow {
    let w: Vec<u64> = a
        .words()
        .iter()
        .zip(b.words())
        .map(|(&x, &y)| match func {
            TlpeFunc::Copy => x,
            TlpeFunc::Not => !x,
            TlpeFunc::And => x & y,
            TlpeFunc::Or => x | y,
            TlpeFunc::Nand => !(x & y),
            TlpeFunc::Nor => !(x | y),
            TlpeFunc::Xor => x ^ y,
            TlpeFunc::Xnor => !(x ^ y),
            TlpeFunc::AddBit => unreachable!(),
        })
        .collect();
    BitRow::from_words(a.width(), &w)
}

fn criterion_2() -> Verdict {
    const PAIRS: usize = 10_000;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut combos = 0;
    for kind in [BackendKind::Cidan, BackendKind::Ambit, BackendKind::Redram, BackendKind::Drisa] {
        let be = Backend::with_defaults(kind);
        let mut mem = be.memory().map_err(|e| e.to_string())?;
        let w = mem.width();
        ensure(w == 8192, || format!("row width {w}"))?;
        let (s1, s2, d) = if kind == BackendKind::Cidan {
            (RowAddr::new(0, 0), RowAddr::new(1, 0), RowAddr::new(2, 0))
        } else {
            (RowAddr::new(0, 0), RowAddr::new(0, 1), RowAddr::new(0, 2))
        };
        for &func in kind.supported() {
            if func == TlpeFunc::AddBit {
                // sum and carry out of a full add with the carry from a row
                let (cin, cout) = (RowAddr::new(3, 0), RowAddr::new(3, 1));
                for i in 0..PAIRS {
                    let (a, b, c) = (BitRow::random(w, &mut rng), BitRow::random(w, &mut rng), BitRow::random(w, &mut rng));
                    for (addr, v) in [(s1, &a), (s2, &b), (cin, &c)] {
                        mem.write(addr, v.clone()).map_err(|e| e.to_string())?;
                    }
                    be.plan_add_rows(&mut mem, s1, s2, CarryIn::Row(cin), d, Some(cout)).map_err(|e| e.to_string())?;
                    let sum = BitRow::from_words(w, &a.words().iter().zip(b.words()).zip(c.words()).map(|((x, y), z)| x ^ y ^ z).collect::<Vec<_>>());
                    let maj = BitRow::from_words(w, &a.words().iter().zip(b.words()).zip(c.words()).map(|((x, y), z)| (x & y) | (x & z) | (y & z)).collect::<Vec<_>>());
                    ensure(mem.read(d).unwrap() == sum && mem.read(cout).unwrap() == maj, || format!("{kind} ADD pair {i}"))?;
                }
                combos += 1;
                continue;
            }
            for i in 0..PAIRS {
                let (a, b) = (BitRow::random(w, &mut rng), BitRow::random(w, &mut rng));
                mem.write(s1, a.clone()).map_err(|e| e.to_string())?;
                let src2 = if func.is_unary() {
                    None
                } else {
                    mem.write(s2, b.clone()).map_err(|e| e.to_string())?;
                    Some(s2)
                };
                be.plan_rowop(&mut mem, func, s1, src2, d).map_err(|e| e.to_string())?;
                ensure(mem.read(d).unwrap() == word_oracle(func, &a, &b), || format!("{kind} {} pair {i}", func.name()))?;
            }
            combos += 1;
        }
    }
    let t = start.elapsed();
    ensure(t < EQUIVALENCE_BUDGET, || format!("took {t:?}"))?;
    Ok(format!("{combos} backend/op combinations x {PAIRS} random 8192-bit rows, bit-exact, in {t:.1?}"))
}

fn criterion_3() -> Verdict {
    use BackendKind::*;
    use TlpeFunc::*;
    let cidan = |act, cycles| MacroCounts { act, wr: 1, prea: 1, compute_cycles: cycles, ..Default::default() };
    let mc = |aap, ap| MacroCounts { aap, ap, ..Default::default() };
    let table = [
        (Cidan, Copy, cidan(2, 1)),
        (Cidan, Not, cidan(2, 1)),
        (Cidan, And, cidan(3, 1)),
        (Cidan, Or, cidan(3, 1)),
        (Cidan, Xor, cidan(3, 2)),
        (Cidan, AddBit, cidan(3, 2)),
        (Redram, Copy, mc(1, 0)),
        (Redram, Not, mc(1, 0)),
        (Redram, And, mc(3, 0)),
        (Redram, Or, mc(3, 0)),
        (Redram, Xor, mc(3, 0)),
        (Ambit, Copy, mc(1, 0)),
        (Ambit, Not, mc(2, 0)),
        (Ambit, And, mc(4, 0)),
        (Ambit, Or, mc(4, 0)),
        (Ambit, Xor, mc(5, 2)),
        (Drisa, Copy, mc(0, 2)),
        (Drisa, Not, mc(2, 0)),
        (Drisa, And, mc(2, 1)),
    ];
    let run = |kind: BackendKind, func: TlpeFunc| -> Result<MacroCounts, Error> {
        let be = Backend::with_defaults(kind);
        let mut mem = be.memory()?;
        let (s1, s2, d) = if kind == Cidan {
            (RowAddr::new(0, 0), RowAddr::new(1, 0), RowAddr::new(2, 0))
        } else {
            (RowAddr::new(0, 0), RowAddr::new(0, 1), RowAddr::new(0, 2))
        };
        let st = if func == AddBit {
            be.exec_add_rows(&mut mem, s1, s2, CarryIn::Zero, d, None)?
        } else {
            be.exec_rowop(&mut mem, func, s1, (!func.is_unary()).then_some(s2), d)?
        };
        Ok(st.macro_counts)
    };
    for (kind, func, want) in table {
        let got = run(kind, func).map_err(|e| format!("{kind} {func}: {e}"))?;
        ensure(got == want, || format!("{kind} {}: got {got:?}, want {want:?}", func.name()))?;
    }
    for func in [Or, Xor, AddBit] {
        ensure(matches!(run(Drisa, func), Err(Error::Unsupported(_))), || format!("DRISA {} not rejected", func.name()))?;
    }
    Ok(format!("{} cells exact; DRISA OR/XOR/ADD unsupported", table.len()))
}

fn criterion_4(m: &Measurements, cmps: &[Comparison]) -> Verdict {
    let ids = [
        "microbench.not.latency.ambit",
        "microbench.not.latency.redram",
        "microbench.and.latency.ambit",
        "microbench.and.latency.redram",
        "microbench.or.latency.ambit",
        "microbench.or.latency.redram",
        "microbench.xor.latency.ambit",
        "microbench.xor.latency.redram",
    ];
    let detail = check_ids(cmps, &ids, LATENCY_TOL)?;
    // the ratio must not depend on the vector size
    let mut worst: f64 = 0.0;
    for id in ids {
        let mean = m.values[id];
        let mut parts = id.split('.');
        let (op, backend) = (parts.nth(1).unwrap(), parts.nth(1).unwrap());
        for r in m.outcome.rows.iter().filter(|r| {
            r.experiment == "microbench" && r.case.starts_with(&format!("{op}/")) && r.backend.name() == backend
        }) {
            let x = r.latency_ratio.ok_or("missing ratio")?;
            worst = worst.max((x / mean - 1.0).abs());
        }
    }
    ensure(worst <= SIZE_SPREAD_TOL, || format!("ratio varies {:.2}% across sizes", worst * 100.0))?;
    Ok(format!("{detail}; spread over 1/2/4 Mb {:.3}%", worst * 100.0))
}

fn criterion_5(cmps: &[Comparison]) -> Verdict {
    check_ids(
        cmps,
        &["microbench.not.throughput.cidan", "microbench.and.throughput.cidan", "microbench.or.throughput.cidan"],
        THROUGHPUT_TOL,
    )
}

fn criterion_6(m: &Measurements, cmps: &[Comparison]) -> Verdict {
    let detail = check_ids(
        cmps,
        &[
            "microbench.and.energy.redram",
            "microbench.and.energy.ambit",
            "microbench.or.energy.redram",
            "microbench.or.energy.ambit",
        ],
        ENERGY_TOL,
    )?;
    // absolute energies: additive over sequential runs, growing with size
    let ep = cidan::dram::EnergyParams::default();
    let rows = &m.outcome.rows;
    let traces = &m.outcome.traces;
    for (i, r) in rows.iter().enumerate().filter(|(_, r)| r.experiment == "microbench") {
        let j = rows
            .iter()
            .position(|q| q.experiment == "microbench" && q.backend == r.backend && q.case != r.case)
            .ok_or("no second run")?;
        let joint = energy_of(&traces[i].concat(&traces[j]), &ep);
        let sum = energy_of(&traces[i], &ep) + energy_of(&traces[j], &ep);
        ensure((joint - sum).abs() <= 1e-9 * sum, || format!("energy not additive for {} {}", r.case, r.backend))?;
        if let Some((op, "1Mb")) = r.case.split_once('/') {
            let bigger = rows
                .iter()
                .find(|q| q.experiment == "microbench" && q.backend == r.backend && q.case == format!("{op}/2Mb"))
                .ok_or("no 2Mb run")?;
            ensure(bigger.energy_pj > r.energy_pj, || format!("energy not monotone for {op} {}", r.backend))?;
        }
    }
    Ok(format!("{detail}; absolute energy additive and monotone in size"))
}

fn random_trace(seed: u64, len: usize, caps: Capabilities) -> CommandTrace {
    let geo = DramGeometry::default();
    let mut s = Scheduler::new(geo, &TimingParams::default(), caps).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut now: Ps = 0;
    while s.trace().commands.len() < len {
        let bank = rng.gen_range(0..geo.banks_per_chip);
        let base = geo.group_of(bank) * geo.bank_group_size;
        let req = match s.open_row(bank) {
            None => match rng.gen_range(0..10) {
                0 if caps.tra => CmdRequest::new(CommandKind::Tra, bank, rng.gen_range(0..64)),
                1 if caps.dra => CmdRequest::new(CommandKind::Dra, bank, rng.gen_range(0..64)),
                _ => CmdRequest::new(CommandKind::Act, bank, rng.gen_range(0..64)),
            },
            Some(row) => match rng.gen_range(0..10) {
                0..=2 => CmdRequest::new(CommandKind::Rd, bank, row),
                3..=4 => CmdRequest::new(CommandKind::Wr, bank, row),
                5 if caps.compute => CmdRequest::new(CommandKind::Compute, base, rng.gen_range(1..3)),
                6 => CmdRequest::new(CommandKind::Prea, base, 0),
                7 if caps.row_clone => CmdRequest::new(CommandKind::Act, bank, rng.gen_range(0..64)),
                _ => CmdRequest::new(CommandKind::Pre, bank, 0),
            },
        };
        now += rng.gen_range(0..20_000);
        s.issue(req, now).unwrap();
    }
    s.into_trace()
}

fn criterion_7() -> Verdict {
    let timing = TimingParams::default();
    let mut total = 0;
    for (seed, caps) in [(71, Capabilities::STANDARD), (72, Capabilities::ALL)] {
        let t = random_trace(seed, 100_000, caps);
        let v = check_trace(&t, &timing, caps);
        ensure(v.is_empty(), || format!("{} violations, first {:?}", v.len(), v.first()))?;
        total += t.commands.len();
    }
    Ok(format!("{total} scheduled commands, 0 violations (t_rrd, t_faw, t_rcd, t_ras, t_rp, t_rc)"))
}

fn reference_aes(key: &[u8], block: &Block) -> Block {
    let mut b = aes::Block::clone_from_slice(block);
    match key.len() {
        16 => aes::Aes128::new_from_slice(key).unwrap().encrypt_block(&mut b),
        24 => aes::Aes192::new_from_slice(key).unwrap().encrypt_block(&mut b),
        _ => aes::Aes256::new_from_slice(key).unwrap().encrypt_block(&mut b),
    }
    b.into()
}

fn criterion_8(cmps: &[Comparison]) -> Verdict {
    let cfg = cidan::dram::SimConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for key_len in [16, 24, 32] {
        let keys: Vec<Vec<u8>> = (0..1000).map(|_| (0..key_len).map(|_| rng.gen()).collect()).collect();
        let blocks: Vec<Block> = (0..1000).map(|_| rng.gen()).collect();
        let refs: Vec<&[u8]> = keys.iter().map(|k| k.as_slice()).collect();
        let r = aes_encrypt_lanes(&blocks, &refs, BackendKind::Cidan, &cfg, &HostCostModel::ZERO).map_err(|e| e.to_string())?;
        for (i, c) in r.ciphertexts.iter().enumerate() {
            ensure(*c == reference_aes(&keys[i], &blocks[i]), || format!("AES-{} case {i} differs", key_len * 8))?;
        }
    }
    let hex = |s: &str| (0..s.len()).step_by(2).map(|i| u8::from_str_radix(&s[i..i + 2], 16).unwrap()).collect::<Vec<u8>>();
    let pt: Block = hex("00112233445566778899aabbccddeeff").try_into().unwrap();
    let r = aes_encrypt(&[pt], &hex("000102030405060708090a0b0c0d0e0f"), BackendKind::Redram, &cfg, &HostCostModel::ZERO)
        .map_err(|e| e.to_string())?;
    ensure(r.ciphertexts[0].to_vec() == hex("69c4e0d86a7b0430d8cdb78070b4c55a"), || "known-answer vector differs".into())?;
    let detail = check_ids(cmps, &["aes.latency.redram"], AES_TOL)?;
    Ok(format!("3000 random cases + known answer match; end-to-end {detail} (calibration-dependent host profile)"))
}

fn criterion_9(cmps: &[Comparison]) -> Verdict {
    let cfg = cidan::dram::SimConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pairs_checked = 0;
    for round in 0..8 {
        let n = rng.gen_range(2..=64usize);
        let p: f64 = rng.gen_range(0.05..0.5);
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = GraphDataset::from_edges("random", n, &edges).map_err(|e| e.to_string())?;
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        let backend = [BackendKind::Cidan, BackendKind::Redram, BackendKind::Ambit][round % 3];
        let r = matching_index_batch(&g, &pairs, &partition_graph(&g, 8), backend, &cfg, &HostCostModel::ZERO)
            .map_err(|e| e.to_string())?;
        for m in &r.results {
            let a: BTreeSet<u32> = g.neighbors(m.i).iter().copied().collect();
            let b: BTreeSet<u32> = g.neighbors(m.j).iter().copied().collect();
            let (c, u) = (a.intersection(&b).count(), a.union(&b).count());
            let want = if u == 0 { 0.0 } else { c as f64 / u as f64 };
            ensure(m.value() == want, || format!("M({}, {}) = {} want {want}", m.i, m.j, m.value()))?;
            pairs_checked += 1;
        }
    }
    let mut ids = Vec::new();
    for d in ["facebook", "amazon", "dblp"] {
        for b in ["redram", "ambit"] {
            ids.push(format!("graph.{d}.latency.{b}"));
        }
    }
    let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
    let detail = check_ids(cmps, &ids, GRAPH_TOL)?;
    Ok(format!("{pairs_checked} vertex pairs equal brute force; {detail}"))
}

fn criterion_10(m: &Measurements, cmps: &[Comparison]) -> Verdict {
    let cfg = cidan::dram::SimConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let backends = [BackendKind::Cidan, BackendKind::Redram, BackendKind::Ambit];
    for case in 0..1000 {
        let (pl, tl) = (rng.gen_range(1..=64), rng.gen_range(0..=256));
        let p: Vec<u8> = (0..pl).map(|_| b"ACGT"[rng.gen_range(0..4)]).collect();
        let t: Vec<u8> = (0..tl).map(|_| b"ACGT"[rng.gen_range(0..4)]).collect();
        let r = myers_search(&p, &t, backends[case % 3], &cfg, AddStrategy::Host, &HostCostModel::ZERO).map_err(|e| e.to_string())?;
        ensure(r.distances == edit_distances_dp(&p, &t), || format!("case {case} differs from DP"))?;
    }
    let detail = check_ids(cmps, &["dna.latency.redram", "dna.latency.ambit"], DNA_TOL)?;
    let mix = m
        .outcome
        .rows
        .iter()
        .find(|r| r.experiment == "dna" && r.backend == BackendKind::Cidan)
        .map(|r| format!("{:?}", r.op_mix))
        .ok_or("no DNA op mix")?;
    Ok(format!("1000 cases equal DP; {detail}; op mix {mix}"))
}

#[test]
fn acceptance() {
    let suite = Instant::now();
    let mut failed = Vec::new();
    let mut record = |n: u32, title: &str, v: Verdict| {
        emit(n, title, &v);
        if v.is_err() {
            failed.push(n);
        }
    };
    record(1, "TLPE truth tables", criterion_1());
    record(2, "functional equivalence", criterion_2());
    record(3, "command counts", criterion_3());

    let cfg = ExperimentConfig::default();
    let measured = measure(&cfg).expect("experiments run");
    let cmps = compare(&measured.values, &PaperConstants::bundled());
    record(4, "latency ratios", criterion_4(&measured, &cmps));
    record(5, "throughput", criterion_5(&cmps));
    record(6, "energy ratios", criterion_6(&measured, &cmps));
    record(7, "timing invariants", criterion_7());
    record(8, "AES", criterion_8(&cmps));
    record(9, "matching index", criterion_9(&cmps));
    record(10, "DNA mapping", criterion_10(&measured, &cmps));
    let t = suite.elapsed();
    let v = if t < SUITE_BUDGET { Ok(format!("suite took {t:.1?}")) } else { Err(format!("suite took {t:.1?}")) };
    record(11, "runtime", v);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
