use super::tlpe::{tlpe_cycle, CombineMode, LatchAction, Threshold, TlpeControlWord, TlpeState};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Functions the TLPE can be scheduled for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TlpeFunc {
    Copy,
    Not,
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
    /// One bit position of a ripple adder, carry-in taken from L1.
    AddBit,
}

impl TlpeFunc {
    pub const ALL: [TlpeFunc; 9] = [
        TlpeFunc::Copy,
        TlpeFunc::Not,
        TlpeFunc::And,
        TlpeFunc::Or,
        TlpeFunc::Nand,
        TlpeFunc::Nor,
        TlpeFunc::Xor,
        TlpeFunc::Xnor,
        TlpeFunc::AddBit,
    ];

    pub fn is_unary(self) -> bool {
        matches!(self, TlpeFunc::Copy | TlpeFunc::Not)
    }

    pub fn name(self) -> &'static str {
        match self {
            TlpeFunc::Copy => "copy",
            TlpeFunc::Not => "not",
            TlpeFunc::And => "and",
            TlpeFunc::Or => "or",
            TlpeFunc::Nand => "nand",
            TlpeFunc::Nor => "nor",
            TlpeFunc::Xor => "xor",
            TlpeFunc::Xnor => "xnor",
            TlpeFunc::AddBit => "add",
        }
    }

    /// Reference Boolean semantics on two operand bits.
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            TlpeFunc::Copy => a,
            TlpeFunc::Not => !a,
            TlpeFunc::And => a && b,
            TlpeFunc::Or => a || b,
            TlpeFunc::Nand => !(a && b),
            TlpeFunc::Nor => !(a || b),
            TlpeFunc::Xor | TlpeFunc::AddBit => a ^ b,
            TlpeFunc::Xnor => !(a ^ b),
        }
    }
}

impl fmt::Display for TlpeFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TlpeFunc {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        TlpeFunc::ALL
            .into_iter()
            .find(|f| f.name() == lower)
            .ok_or_else(|| format!("unknown function `{s}`"))
    }
}

/// Which values a schedule leaves behind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleOutputs {
    Result,
    /// Result plus a carry that ends up in L1.
    ResultAndCarry,
}

/// A compiled control sequence for one function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub func: TlpeFunc,
    pub cycles: Vec<TlpeControlWord>,
    pub outputs: ScheduleOutputs,
}

impl Schedule {
    pub fn cycle_count(&self) -> u32 {
        self.cycles.len() as u32
    }

    /// True when the written value is the last gate output ORed with a latch.
    pub fn combines_with_latch(&self) -> bool {
        self.cycles
            .last()
            .is_some_and(|c| c.combine_mode != CombineMode::Final)
    }
}

/// Control words for `func`. Operands arrive on bank inputs B1 and B2; for
/// [`TlpeFunc::AddBit`] the carry-in is whatever L1 holds.
pub fn compile_schedule(func: TlpeFunc) -> Schedule {
    let w = TlpeControlWord::idle;
    let (cycles, outputs) = match func {
        TlpeFunc::Copy => (vec![w().with_input(0, false)], ScheduleOutputs::Result),
        TlpeFunc::Not => (vec![w().with_input(0, true)], ScheduleOutputs::Result),
        TlpeFunc::And => (
            vec![w().with_input(0, false).with_input(1, false).with_threshold(Threshold::Two)],
            ScheduleOutputs::Result,
        ),
        TlpeFunc::Or => (
            vec![w().with_input(0, false).with_input(1, false)],
            ScheduleOutputs::Result,
        ),
        TlpeFunc::Nand => (
            vec![w().with_input(0, true).with_input(1, true)],
            ScheduleOutputs::Result,
        ),
        TlpeFunc::Nor => (
            vec![w().with_input(0, true).with_input(1, true).with_threshold(Threshold::Two)],
            ScheduleOutputs::Result,
        ),
        TlpeFunc::Xor | TlpeFunc::Xnor => {
            // OP1 = I1 & ~I2 (xor) or I1 & I2 (xnor), held in L2 so it enters
            // the second evaluation with weight -2.
            let first = w()
                .with_input(0, false)
                .with_input(1, func == TlpeFunc::Xor)
                .with_threshold(Threshold::Two)
                .with_latch(LatchAction::StoreL2);
            let mut second = w()
                .with_input(0, true)
                .with_input(1, func == TlpeFunc::Xnor)
                .with_threshold(Threshold::Two);
            second.enable_l2_feedback = true;
            second.combine_mode = CombineMode::OrWithL2;
            (vec![first, second], ScheduleOutputs::Result)
        }
        TlpeFunc::AddBit => {
            // carry out = Maj(A, B, Cin) -> L2
            let mut carry = w()
                .with_input(0, false)
                .with_input(1, false)
                .with_threshold(Threshold::Two)
                .with_latch(LatchAction::StoreL2);
            carry.enable_l1_feedback = true;
            // sum = [-2, 1, 1, 1; 1] over (Cout, A, B, Cin), then Cout -> L1
            let mut sum = w()
                .with_input(0, false)
                .with_input(1, false)
                .with_latch(LatchAction::MoveL2ToL1);
            sum.enable_l1_feedback = true;
            sum.enable_l2_feedback = true;
            (vec![carry, sum], ScheduleOutputs::ResultAndCarry)
        }
    };
    Schedule {
        func,
        cycles,
        outputs,
    }
}

/// Step a single TLPE through `sched`. Returns the result bit, the carry
/// (for schedules that produce one) and the final latch state.
pub fn run_schedule(sched: &Schedule, inputs: [bool; 4], state: TlpeState) -> (bool, Option<bool>, TlpeState) {
    let mut s = state;
    let mut out = false;
    for word in &sched.cycles {
        let (next, o) = tlpe_cycle(s, word, inputs);
        s = next;
        out = o;
    }
    let carry = match sched.outputs {
        ScheduleOutputs::Result => None,
        ScheduleOutputs::ResultAndCarry => Some(s.l1),
    };
    (out, carry, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const STATES: [TlpeState; 4] = [
        TlpeState { l1: false, l2: false },
        TlpeState { l1: true, l2: false },
        TlpeState { l1: false, l2: true },
        TlpeState { l1: true, l2: true },
    ];

    #[test]
    fn cycle_counts() {
        for f in [TlpeFunc::Copy, TlpeFunc::Not, TlpeFunc::And, TlpeFunc::Or, TlpeFunc::Nand, TlpeFunc::Nor] {
            assert_eq!(compile_schedule(f).cycle_count(), 1, "{f}");
        }
        for f in [TlpeFunc::Xor, TlpeFunc::Xnor, TlpeFunc::AddBit] {
            assert_eq!(compile_schedule(f).cycle_count(), 2, "{f}");
        }
    }

    #[test]
    fn logic_schedules_are_exhaustively_correct() {
        for f in TlpeFunc::ALL.into_iter().filter(|&f| f != TlpeFunc::AddBit) {
            let sched = compile_schedule(f);
            for a in [false, true] {
                for b in [false, true] {
                    for s in STATES {
                        let (r, c, _) = run_schedule(&sched, [a, b, false, false], s);
                        assert_eq!(r, f.apply(a, b), "{f} a={a} b={b} state={s:?}");
                        assert_eq!(c, None);
                    }
                }
            }
        }
    }

    #[test]
    fn xor_and_xnor_examples() {
        let xor = compile_schedule(TlpeFunc::Xor);
        assert!(run_schedule(&xor, [true, false, false, false], TlpeState::default()).0);
        let xnor = compile_schedule(TlpeFunc::Xnor);
        assert!(run_schedule(&xnor, [false, false, false, false], TlpeState::default()).0);
    }

    #[test]
    fn add_bit_is_a_full_adder() {
        let sched = compile_schedule(TlpeFunc::AddBit);
        for a in [false, true] {
            for b in [false, true] {
                for cin in [false, true] {
                    for l2 in [false, true] {
                        let (sum, carry, st) = run_schedule(&sched, [a, b, false, false], TlpeState { l1: cin, l2 });
                        let total = a as u8 + b as u8 + cin as u8;
                        assert_eq!(sum, total & 1 == 1);
                        assert_eq!(carry, Some(total >= 2));
                        assert_eq!(st.l1, total >= 2);
                    }
                }
            }
        }
        let (sum, _, st) = run_schedule(&sched, [true, true, false, false], TlpeState::default());
        assert!(!sum);
        assert!(st.l1);
    }

    #[test]
    fn unused_bank_inputs_do_not_matter() {
        for f in TlpeFunc::ALL {
            let sched = compile_schedule(f);
            for extra in 0..4u8 {
                let i = [true, false, extra & 1 == 1, extra & 2 == 2];
                let base = run_schedule(&sched, [true, false, false, false], TlpeState::default());
                assert_eq!(run_schedule(&sched, i, TlpeState::default()), base);
            }
        }
    }

    #[test]
    fn func_names_parse() {
        for f in TlpeFunc::ALL {
            assert_eq!(f.name().parse::<TlpeFunc>().unwrap(), f);
        }
        assert_eq!("XOR".parse::<TlpeFunc>().unwrap(), TlpeFunc::Xor);
        assert!("mul".parse::<TlpeFunc>().is_err());
    }
}
