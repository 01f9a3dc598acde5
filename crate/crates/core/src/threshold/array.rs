use super::schedule::{compile_schedule, run_schedule, Schedule, TlpeFunc};
use super::tlpe::{CombineMode, LatchAction, Threshold, TlpeControlWord, TlpeState};
use crate::bits::BitRow;
use crate::error::{Error, Result};

/// Latch contents of a whole TLPE array, one lane per bit-line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TlpeaLatches {
    pub l1: BitRow,
    pub l2: BitRow,
}

impl TlpeaLatches {
    pub fn new(width: usize) -> Self {
        TlpeaLatches {
            l1: BitRow::zeros(width),
            l2: BitRow::zeros(width),
        }
    }

    pub fn width(&self) -> usize {
        self.l1.width()
    }

    pub fn from_states(states: &[TlpeState]) -> Self {
        TlpeaLatches {
            l1: BitRow::from_bits(states.iter().map(|s| s.l1)),
            l2: BitRow::from_bits(states.iter().map(|s| s.l2)),
        }
    }

    pub fn states(&self) -> Vec<TlpeState> {
        self.l1
            .iter()
            .zip(self.l2.iter())
            .map(|(l1, l2)| TlpeState { l1, l2 })
            .collect()
    }
}

fn check_rows(rows: &[&BitRow], width: usize) -> Result<()> {
    if rows.is_empty() || rows.len() > 4 {
        return Err(Error::Argument(format!(
            "TLPE array takes 1 to 4 operand rows, got {}",
            rows.len()
        )));
    }
    if let Some(r) = rows.iter().find(|r| r.width() != width) {
        return Err(Error::Argument(format!(
            "operand row width {} does not match array width {width}",
            r.width()
        )));
    }
    Ok(())
}

/// 64 lanes of one TLPE clock, evaluated with a bit-sliced population count.
/// Returns (output, next l1, next l2).
fn cycle_word(ctrl: &TlpeControlWord, l1: u64, l2: u64, inputs: [u64; 4]) -> (u64, u64, u64) {
    let (mut c0, mut c1, mut c2) = (0u64, 0u64, 0u64);
    let mut add = |x: u64| {
        let k0 = c0 & x;
        c0 ^= x;
        let k1 = c1 & k0;
        c1 ^= k0;
        c2 |= k1;
    };
    for i in 0..4 {
        if ctrl.enable_bank[i] {
            add(if ctrl.invert[i] { !inputs[i] } else { inputs[i] });
        }
    }
    if ctrl.enable_l1_feedback {
        add(l1);
    }
    let neg = if ctrl.enable_l2_feedback { l2 } else { 0 };
    // count >= k for k = 1..4 (at most five positive inputs)
    let ge1 = c0 | c1 | c2;
    let ge2 = c1 | c2;
    let ge3 = c2 | (c1 & c0);
    let ge4 = c2;
    let gate = match ctrl.threshold {
        Threshold::One => (!neg & ge1) | (neg & ge3),
        Threshold::Two => (!neg & ge2) | (neg & ge4),
    };
    let out = match ctrl.combine_mode {
        CombineMode::Final => gate,
        CombineMode::OrWithL2 => gate | l2,
    };
    let (n1, n2) = match ctrl.latch_action {
        LatchAction::None => (l1, l2),
        LatchAction::StoreL1 => (gate, l2),
        LatchAction::StoreL2 => (l1, gate),
        LatchAction::MoveL2ToL1 => (l2, l2),
    };
    (out, n1, n2)
}

/// Run `sched` on every lane of the array at once. `rows[k]` drives bank
/// input B(k+1); inputs not supplied read as zero.
pub fn tlpea_apply(sched: &Schedule, rows: &[&BitRow], latches: &TlpeaLatches) -> Result<(BitRow, TlpeaLatches)> {
    let width = latches.width();
    check_rows(rows, width)?;
    let nwords = width.div_ceil(64);
    let mut out = vec![0u64; nwords];
    let mut l1 = latches.l1.words().to_vec();
    let mut l2 = latches.l2.words().to_vec();
    for w in 0..nwords {
        let mut inputs = [0u64; 4];
        for (k, r) in rows.iter().enumerate() {
            inputs[k] = r.words()[w];
        }
        for word in &sched.cycles {
            let (o, n1, n2) = cycle_word(word, l1[w], l2[w], inputs);
            out[w] = o;
            l1[w] = n1;
            l2[w] = n2;
        }
    }
    Ok((
        BitRow::from_words(width, &out),
        TlpeaLatches {
            l1: BitRow::from_words(width, &l1),
            l2: BitRow::from_words(width, &l2),
        },
    ))
}

/// One clock of the array under an arbitrary control word.
pub fn tlpea_step(ctrl: &TlpeControlWord, rows: &[&BitRow], latches: &TlpeaLatches) -> Result<(BitRow, TlpeaLatches)> {
    let sched = Schedule {
        func: TlpeFunc::Copy,
        cycles: vec![*ctrl],
        outputs: super::schedule::ScheduleOutputs::Result,
    };
    if rows.is_empty() {
        let zero = BitRow::zeros(latches.width());
        return tlpea_apply(&sched, &[&zero], latches);
    }
    tlpea_apply(&sched, rows, latches)
}

/// Lane-by-lane evaluation through [`run_schedule`]. Slow; it is the
/// reference the word-parallel path is checked against.
pub fn tlpea_apply_lanes(sched: &Schedule, rows: &[&BitRow], states: &[TlpeState]) -> Result<(BitRow, Vec<TlpeState>)> {
    let width = states.len();
    check_rows(rows, width)?;
    let mut out = BitRow::zeros(width);
    let mut next = Vec::with_capacity(width);
    for (lane, &s) in states.iter().enumerate() {
        let mut inputs = [false; 4];
        for (k, r) in rows.iter().enumerate() {
            inputs[k] = r.get(lane);
        }
        let (bit, _, ns) = run_schedule(sched, inputs, s);
        out.set(lane, bit);
        next.push(ns);
    }
    Ok((out, next))
}

/// Result of a bit-serial multi-plane addition on the array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultibitSum {
    pub sum_planes: Vec<BitRow>,
    pub carry: BitRow,
    pub cycles: u32,
}

/// Add two transposed operands: plane `k` holds bit `k` of every lane's word.
/// The carry travels plane to plane in L1.
pub fn tlpea_multibit_add(a_planes: &[BitRow], b_planes: &[BitRow]) -> Result<MultibitSum> {
    if a_planes.len() != b_planes.len() {
        return Err(Error::Argument(format!(
            "plane count mismatch: {} vs {}",
            a_planes.len(),
            b_planes.len()
        )));
    }
    let Some(first) = a_planes.first() else {
        return Ok(MultibitSum {
            sum_planes: Vec::new(),
            carry: BitRow::zeros(0),
            cycles: 0,
        });
    };
    let sched = compile_schedule(TlpeFunc::AddBit);
    let mut latches = TlpeaLatches::new(first.width());
    let mut sum_planes = Vec::with_capacity(a_planes.len());
    for (a, b) in a_planes.iter().zip(b_planes) {
        let (s, next) = tlpea_apply(&sched, &[a, b], &latches)?;
        sum_planes.push(s);
        latches = next;
    }
    Ok(MultibitSum {
        sum_planes,
        carry: latches.l1,
        cycles: sched.cycle_count() * a_planes.len() as u32,
    })
}
