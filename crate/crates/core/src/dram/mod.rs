//! DRAM device model: geometry, command protocol, timing-constrained
//! command scheduling, trace checking and energy accounting.

mod checker;
mod command;
mod config;
mod energy;
mod geometry;
mod scheduler;
mod timing;

pub use checker::{check_trace, Violation};
pub use command::{CommandKind, CommandTrace, DramCommand};
pub use config::SimConfig;
pub(crate) use config::toml_error;
pub use energy::{energy_of, EnergyParams};
pub use geometry::DramGeometry;
pub use scheduler::{expand_macro, Capabilities, CmdRequest, Macro, Scheduler};
pub use timing::{ns_to_ps, ps_to_ns, Ps, TimingParams};
