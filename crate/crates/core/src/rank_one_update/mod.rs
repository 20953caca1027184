//! O(n^2) reconstruction of `REF-LU(A + gamma v w^T)` from `REF-LU(A)`.

mod adjacent;
mod policy;
mod workspace;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::REFFactorization;
use crate::matrix::{mat_vec, IntMatrix, IntVector};
use crate::ops::OpCounts;

pub use adjacent::{adjacent_permute, PermuteMode};
pub use policy::{apply_sparsity_plan, sparsity_policy, SparsityPlan};
pub use workspace::TraceStep;

/// `A_hat = A + gamma * v * w^T` with nonzero `gamma`, `v`, `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateSpec {
    gamma: BigInt,
    v: IntVector,
    w: IntVector,
}

impl UpdateSpec {
    pub fn new(gamma: BigInt, v: IntVector, w: IntVector) -> Result<Self> {
        if gamma.is_zero() {
            return Err(Error::NoOpUpdate);
        }
        if v.len() != w.len() {
            return Err(Error::DimensionMismatch { expected: v.len(), found: w.len() });
        }
        if v.is_zero() || w.is_zero() {
            return Err(Error::ZeroUpdateVector);
        }
        Ok(UpdateSpec { gamma, v, w })
    }

    /// `gamma = 1`.
    pub fn outer(v: IntVector, w: IntVector) -> Result<Self> {
        Self::new(BigInt::one(), v, w)
    }

    pub fn gamma(&self) -> &BigInt {
        &self.gamma
    }

    pub fn v(&self) -> &IntVector {
        &self.v
    }

    pub fn w(&self) -> &IntVector {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// `gamma * v`, the form the algorithm consumes.
    pub fn folded_v(&self) -> IntVector {
        if self.gamma.is_one() {
            self.v.clone()
        } else {
            self.v.scaled(&self.gamma)
        }
    }
}

/// `A + gamma v w^T`, entry-exactly.
pub fn apply_rank_one(a: &IntMatrix, spec: &UpdateSpec) -> Result<IntMatrix> {
    let n = spec.len();
    if a.n_rows() != n || a.n_cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.n_rows() });
    }
    let gv = spec.folded_v();
    let mut out = a.clone();
    for i in 0..n {
        if gv[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if !spec.w[j].is_zero() {
                out[(i, j)] += &gv[i] * &spec.w[j];
            }
        }
    }
    Ok(out)
}

/// Counters describing the path an update took.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct UpdateStats {
    /// Leading zeros of `v` and `w` in factorization coordinates, before any swap.
    pub theta_v: usize,
    pub theta_w: usize,
    /// Adjacent permutations applied to avoid a zero divisor or pivot.
    pub sc2_calls: u64,
    pub apcp: u64,
    pub aprp: u64,
    pub apdp: u64,
    /// Iterations where a look-ahead on `y`, on `z`, or a zero pivot forced an adjustment.
    pub y_triggers: u64,
    pub z_triggers: u64,
    pub pivot_triggers: u64,
    /// Adjustments where no swap removed every zero divisor.
    pub unresolved: u64,
    /// Columns or rows computed by direct elimination because their divisor was zero.
    pub direct_fallbacks: u64,
    /// Set when no adjacent exchange produced a nonzero pivot and the result
    /// came from a pivoting refactorization of the updated matrix instead.
    pub refactored: bool,
    pub ops: OpCounts,
}

/// Operations a standard update performs (no leading zeros, no exchanges):
/// `2n` to seed the diagonal, `10(n-1)` for the first row, column and
/// forward steps, `20(n-k) + 4` for each middle iteration `k`, and 4 for the
/// last pivot, less `n - 1` because the stage-1 diagonal step divides by 1.
pub fn standard_op_count(n: usize) -> u64 {
    let n = n as u64;
    if n < 2 {
        return 2 * n;
    }
    10 * n * n - 15 * n + 7
}

/// `REF-LU(A + gamma v w^T)` computed from `REF-LU(A)` in O(n^2) operations.
pub fn rank_one_update(f: &REFFactorization, spec: &UpdateSpec) -> Result<REFFactorization> {
    rank_one_update_with_stats(f, spec).map(|(g, _)| g)
}

pub fn rank_one_update_with_stats(f: &REFFactorization, spec: &UpdateSpec) -> Result<(REFFactorization, UpdateStats)> {
    workspace::run(f, spec, false).map(|(g, s, _)| (g, s))
}

/// Like [`rank_one_update_with_stats`], also recording the working matrix and
/// both forward-substitution iterates after every outer iteration.
pub fn rank_one_update_traced(
    f: &REFFactorization,
    spec: &UpdateSpec,
) -> Result<(REFFactorization, UpdateStats, Vec<TraceStep>)> {
    workspace::run(f, spec, true)
}

/// Runs [`sparsity_policy`] on `w`, applies the resulting column swaps to
/// `f`, then updates.
pub fn rank_one_update_with_policy(
    f: &REFFactorization,
    spec: &UpdateSpec,
) -> Result<(REFFactorization, UpdateStats, SparsityPlan)> {
    let wp = f.col_perm().gather(spec.w());
    let plan = sparsity_policy(&wp);
    let mut g = f.clone();
    let mut ops = OpCounts::default();
    let plan = apply_sparsity_plan(&mut g, plan, &mut ops)?;
    let (h, mut stats) = rank_one_update_with_stats(&g, spec)?;
    stats.ops += ops;
    Ok((h, stats, plan))
}

/// Replace column `k` (0-based, caller coordinates) with `new_col`.
pub fn column_replace(f: &REFFactorization, k: usize, new_col: &[BigInt]) -> Result<REFFactorization> {
    column_replace_with_stats(f, k, new_col).map(|(g, _)| g)
}

pub fn column_replace_with_stats(
    f: &REFFactorization,
    k: usize,
    new_col: &[BigInt],
) -> Result<(REFFactorization, UpdateStats)> {
    let n = f.n();
    if k >= n {
        return Err(Error::OutOfRange(format!("column {k} for n = {n}")));
    }
    if new_col.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: new_col.len() });
    }
    let v: IntVector = (0..n).map(|i| &new_col[i] - &f.original()[(i, k)]).collect::<Vec<_>>().into();
    if v.is_zero() {
        return Err(Error::NoOpUpdate);
    }
    rank_one_update_with_stats(f, &UpdateSpec::outer(v, IntVector::unit(n, k))?)
}

/// SR1 update vectors for symmetric `B`: `v' = u - B s`, `gamma = 1 / (v'^T s)`.
///
/// `gamma` must fold into an integral vector, so every entry of `v'` has to be
/// divisible by `v'^T s`. The result is `gamma v' v'^T` written as `(v'/d) v'^T`.
pub fn sr1_vectors(b: &IntMatrix, u: &[BigInt], s: &[BigInt]) -> Result<UpdateSpec> {
    if !b.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if u.len() != b.n_rows() || s.len() != b.n_rows() {
        return Err(Error::DimensionMismatch { expected: b.n_rows(), found: u.len().min(s.len()) });
    }
    let bs = mat_vec(b, s)?;
    let vp: Vec<BigInt> = u.iter().zip(bs.iter()).map(|(a, c)| a - c).collect();
    if vp.iter().all(Zero::is_zero) {
        return Err(Error::ZeroUpdateVector);
    }
    let d: BigInt = vp.iter().zip(s).map(|(a, c)| a * c).sum();
    if d.is_zero() {
        return Err(Error::DegenerateDenominator);
    }
    let mut scaled = Vec::with_capacity(vp.len());
    for x in &vp {
        let (q, r) = x.div_rem(&d);
        if !r.is_zero() {
            return Err(Error::NonIntegerGamma(d.abs().to_string()));
        }
        scaled.push(q);
    }
    UpdateSpec::outer(scaled.into(), vp.into())
}
