//! Application drivers: bulk microbenchmarks, AES, graph matching index
//! and DNA pattern search.

pub mod aes;
pub mod dna;
pub mod graph;
mod host;
mod machine;
mod microbench;

pub use aes::{aes_encrypt, aes_encrypt_lanes, encrypt_block_reference, host_only_ns, AesRun, Block};
pub use dna::{edit_distances_dp, myers_search, AddStrategy, MyersRun};
pub use graph::{matching_index, matching_index_batch, partition_graph, GraphDataset, MatchingResult, MatchingRun, DATASETS};
pub use host::HostCostModel;
pub use machine::{MachineReport, OpMix, RowId, RowMachine};
pub use microbench::{parse_size, run_microbench, MicrobenchResult, MicrobenchSpec, MEGABIT};
