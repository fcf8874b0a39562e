//! Pancake graphs `P_n` built implicitly from prefix reversals, with the
//! constructive colorings known for them, full-scale verification by edge
//! streaming, and a small exact/heuristic coloring solver.

pub mod coloring;
pub mod constructive;
pub mod domsets;
pub mod error;
pub mod graph;
pub mod invariant;
pub mod perm;
pub mod quotient;
pub mod solver;

pub use coloring::{
    verify_equitable, verify_perfect, verify_proper, Coloring, ColoringKind, VerifyReport,
};
pub use error::{PancakeError, Result};
pub use graph::{project, Edge, PancakeView, StreamStats};
pub use perm::{reversal_parity, Parity, Permutation, Rank};
