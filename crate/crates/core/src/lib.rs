pub mod backends;
pub mod bits;
pub mod cli;
pub mod dram;
pub mod error;
pub mod isa;
pub mod report;
pub mod threshold;
pub mod workloads;

pub use backends::{Backend, BackendKind, MemoryImage, RowAddr, RunStats};
pub use bits::BitRow;
pub use error::{Error, Result};
pub use threshold::TlpeFunc;
