//! Exact, integer-preserving dense LU and Cholesky factorizations with
//! O(n^2) rank-one updates.
//!
//! Every intermediate value is an unbounded integer and every division is
//! exact, so results carry no roundoff. Indices in the Rust API are 0-based.

pub mod bench_harness;
pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod factorization;
pub mod matrix;
pub mod ops;
pub mod oracle;
pub mod rank_one_update;
pub mod rational;
pub mod substitution;

pub use diagnostics::Diagnostics;
pub use error::{Error, Result};
pub use exec::Execution;
pub use factorization::{
    determinant, factorize_with_perms, ipge_step, ref_cholesky_factorize, ref_lu_factorize, ref_lu_factorize_with,
    Permutation, REFFactorization,
};
pub use matrix::{mat_mul, mat_vec, IntMatrix, IntScalar, IntVector};
pub use ops::{exact_div, OpCounts};
pub use rank_one_update::{
    adjacent_permute, apply_rank_one, column_replace, rank_one_update, rank_one_update_with_policy,
    rank_one_update_with_stats, sparsity_policy, sr1_vectors, PermuteMode, SparsityPlan, UpdateSpec, UpdateStats,
};
pub use rational::{integerize, Rational};
pub use substitution::{solve, ExactSolution, FSVector};
