//! The `bbop` vector instruction: text syntax, placement of vectors onto
//! rows, and lowering to row-level back-end calls.

mod plan;
mod syntax;

pub use plan::{
    allocate, allocate_pinned, execute, load_vector, lower, store_vector, ChunkPlacement, Operand, Pins, RowCall,
    VectorPlacement,
};
pub use syntax::{decode, BbopInstruction};
