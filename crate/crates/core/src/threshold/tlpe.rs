use super::function::{eval_threshold, ThresholdFunction};
use serde::{Deserialize, Serialize};

/// Weights of the gate inside every TLPE, in input order:
/// L2 feedback, bank inputs B1..B4, L1 feedback.
pub const GATE_WEIGHTS: [i32; 6] = [-2, 1, 1, 1, 1, 1];

/// Gate threshold. The hardware only offers 1 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Threshold {
    One,
    Two,
}

impl Threshold {
    pub fn value(self) -> i32 {
        match self {
            Threshold::One => 1,
            Threshold::Two => 2,
        }
    }

    pub fn from_value(v: i32) -> Option<Self> {
        match v {
            1 => Some(Threshold::One),
            2 => Some(Threshold::Two),
            _ => None,
        }
    }
}

/// What happens to the latches after the gate fires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatchAction {
    None,
    StoreL1,
    StoreL2,
    MoveL2ToL1,
}

/// How the cycle output is formed from the gate output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CombineMode {
    Final,
    /// Gate output ORed with the value held in L2 before the cycle.
    OrWithL2,
}

/// Per-cycle control signals driven by the controller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TlpeControlWord {
    /// XOR controls C0..C3 on the bank inputs.
    pub invert: [bool; 4],
    pub enable_bank: [bool; 4],
    pub enable_l1_feedback: bool,
    pub enable_l2_feedback: bool,
    pub threshold: Threshold,
    pub latch_action: LatchAction,
    pub combine_mode: CombineMode,
}

impl TlpeControlWord {
    /// Everything disabled, threshold 1.
    pub fn idle() -> Self {
        TlpeControlWord {
            invert: [false; 4],
            enable_bank: [false; 4],
            enable_l1_feedback: false,
            enable_l2_feedback: false,
            threshold: Threshold::One,
            latch_action: LatchAction::None,
            combine_mode: CombineMode::Final,
        }
    }

    pub(crate) fn with_input(mut self, idx: usize, inverted: bool) -> Self {
        self.enable_bank[idx] = true;
        self.invert[idx] = inverted;
        self
    }

    pub(crate) fn with_threshold(mut self, t: Threshold) -> Self {
        self.threshold = t;
        self
    }

    pub(crate) fn with_latch(mut self, a: LatchAction) -> Self {
        self.latch_action = a;
        self
    }

    /// The threshold function the gate evaluates under this word, over the
    /// full six-input vector with disabled inputs given weight zero.
    pub fn effective_function(&self) -> ThresholdFunction {
        let mut w = GATE_WEIGHTS;
        if !self.enable_l2_feedback {
            w[0] = 0;
        }
        for i in 0..4 {
            if !self.enable_bank[i] {
                w[1 + i] = 0;
            }
        }
        if !self.enable_l1_feedback {
            w[5] = 0;
        }
        ThresholdFunction::new(w.to_vec(), self.threshold.value()).expect("six weights")
    }
}

/// Latch contents of one TLPE.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TlpeState {
    pub l1: bool,
    pub l2: bool,
}

/// One clock of a TLPE. Returns the next latch state and the cycle output.
pub fn tlpe_cycle(state: TlpeState, ctrl: &TlpeControlWord, bank_inputs: [bool; 4]) -> (TlpeState, bool) {
    let mut x = [false; 6];
    x[0] = state.l2;
    for i in 0..4 {
        x[1 + i] = bank_inputs[i] ^ ctrl.invert[i];
    }
    x[5] = state.l1;
    let gate = eval_threshold(&ctrl.effective_function(), &x).expect("six inputs");

    let out = match ctrl.combine_mode {
        CombineMode::Final => gate,
        CombineMode::OrWithL2 => gate | state.l2,
    };
    let next = match ctrl.latch_action {
        LatchAction::None => state,
        LatchAction::StoreL1 => TlpeState { l1: gate, ..state },
        LatchAction::StoreL2 => TlpeState { l2: gate, ..state },
        LatchAction::MoveL2ToL1 => TlpeState { l1: state.l2, ..state },
    };
    (next, out)
}
