//! Exact linear algebra over the rationals and bigraded truncated chain
//! complexes.

mod complex;
mod linalg;

pub use complex::{
    betti, euler, euler_of_betti, euler_of_complex, free_graded_commutative_closure, les_check, BettiCell, BettiTable,
    Cell, LesReport, TruncatedComplex,
};
pub use linalg::{rank_exact, solve_in_kernel, RowReducer, SparseVec};
