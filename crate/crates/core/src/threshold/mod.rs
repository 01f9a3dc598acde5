//! Threshold logic: the gate, the processing element (TLPE) built around it,
//! per-function schedules, and the row-wide array (TLPEA).

mod array;
mod function;
mod schedule;
mod tlpe;

pub use array::{tlpea_apply, tlpea_apply_lanes, tlpea_multibit_add, tlpea_step, MultibitSum, TlpeaLatches};
pub use function::{eval_threshold, ThresholdFunction};
pub use schedule::{compile_schedule, run_schedule, Schedule, ScheduleOutputs, TlpeFunc};
pub use tlpe::{
    tlpe_cycle, CombineMode, LatchAction, Threshold, TlpeControlWord, TlpeState, GATE_WEIGHTS,
};
