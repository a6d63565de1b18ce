//! Exact rejection sampling and a pivot + block-regrow Metropolis chain.

mod chain;
mod moves;
mod rejection;

pub use chain::{run_chain, Chain, ChainCheckpoint, ChainStats};
pub use moves::{block_regrow_move, pivot_move, pivot_with, regrow_with, MoveKind};
pub use rejection::{acceptance_count, rejection_sample};
