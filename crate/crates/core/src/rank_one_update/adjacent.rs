//! O(n) updates of a REF-LU factorization when two adjacent pivot columns,
//! rows, or both are exchanged.
//!
//! With `p` the 0-based position, `r0 = rho^p`, `r1 = rho^(p+1)`,
//! `r2 = rho^(p+2)`, `big_p = u[p][p+1]` and `big_q = l[p+1][p]`:
//! entries that change are rebuilt from the two old neighbours through one
//! backtracked elimination step, and the trailing block only changes sign.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::REFFactorization;
use crate::matrix::IntMatrix;
use crate::ops::OpCounts;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PermuteMode {
    /// Exchange pivot columns `k` and `k+1`.
    Columns,
    /// Exchange pivot rows `k` and `k+1`.
    Rows,
    /// Exchange both rows and columns `k` and `k+1`.
    Diagonal,
}

/// REF-LU of the factored matrix with positions `k` and `k+1` (0-based)
/// exchanged according to `mode`.
pub fn adjacent_permute(f: &REFFactorization, k: usize, mode: PermuteMode) -> Result<REFFactorization> {
    let mut g = f.clone();
    apply_adjacent(&mut g, k, mode, &mut OpCounts::default())?;
    Ok(g)
}

/// In-place variant used by the update routines.
pub(crate) fn apply_adjacent(f: &mut REFFactorization, p: usize, mode: PermuteMode, ops: &mut OpCounts) -> Result<()> {
    let n = f.n();
    if p + 1 >= n {
        return Err(Error::OutOfRange(format!("adjacent swap at {p} for n = {n}")));
    }
    match mode {
        PermuteMode::Columns => {
            swap_one_side(&mut f.merged, &mut f.pivots, p, false, ops)?;
            f.col_perm.swap(p, p + 1);
            f.symmetric = false;
        }
        PermuteMode::Rows => {
            swap_one_side(&mut f.merged, &mut f.pivots, p, true, ops)?;
            f.row_perm.swap(p, p + 1);
            f.symmetric = false;
        }
        PermuteMode::Diagonal => {
            swap_both(&mut f.merged, &mut f.pivots, p, ops)?;
            f.row_perm.swap(p, p + 1);
            f.col_perm.swap(p, p + 1);
        }
    }
    Ok(())
}

/// Index helper: `(i, j)` in the transposed view when `t` is set.
fn at(t: bool, i: usize, j: usize) -> (usize, usize) {
    if t {
        (j, i)
    } else {
        (i, j)
    }
}

/// Column exchange; with `t` set, the same algebra on the transpose gives the row exchange.
fn swap_one_side(m: &mut IntMatrix, pivots: &mut [BigInt], p: usize, t: bool, ops: &mut OpCounts) -> Result<()> {
    let n = m.n_rows();
    let (r0, r1, r2) = (pivots[p].clone(), pivots[p + 1].clone(), pivots[p + 2].clone());
    let big_p = m[at(t, p, p + 1)].clone();
    if big_p.is_zero() {
        return Err(Error::PermutationNotApplicable {
            k: p,
            reason: "the off-diagonal pivot-block entry that would become the new pivot is zero",
        });
    }
    for s in 0..p {
        m.swap_entries(at(t, s, p), at(t, s, p + 1));
    }
    let mut new_col = Vec::with_capacity(n - p - 1);
    for i in p + 1..n {
        new_col.push(ops.cross_add(&r0, &m[at(t, i, p + 1)], &big_p, &m[at(t, i, p)], &r1)?);
    }
    let mut new_row = Vec::with_capacity(n.saturating_sub(p + 2));
    for j in p + 2..n {
        new_row.push(ops.cross(&big_p, &m[at(t, p + 1, j)], &r2, &m[at(t, p, j)], Some(&r1))?);
    }
    m[(p, p)] = big_p.clone();
    m[at(t, p, p + 1)] = r1;
    for (i, x) in (p + 1..n).zip(new_col) {
        m[at(t, i, p)] = x;
    }
    m[(p + 1, p + 1)] = -r2;
    for i in p + 2..n {
        let x = std::mem::take(&mut m[at(t, i, p + 1)]);
        m[at(t, i, p + 1)] = -x;
    }
    for (j, x) in (p + 2..n).zip(new_row) {
        m[at(t, p + 1, j)] = x;
    }
    negate_trailing(m, p + 2);
    pivots[p + 1] = big_p;
    for r in pivots.iter_mut().skip(p + 2) {
        *r = -std::mem::take(r);
    }
    Ok(())
}

fn swap_both(m: &mut IntMatrix, pivots: &mut [BigInt], p: usize, ops: &mut OpCounts) -> Result<()> {
    let n = m.n_rows();
    let (r0, r1, r2) = (pivots[p].clone(), pivots[p + 1].clone(), pivots[p + 2].clone());
    let big_p = m[(p, p + 1)].clone();
    let big_q = m[(p + 1, p)].clone();
    let s = ops.cross_add(&r0, &r2, &big_p, &big_q, &r1)?;
    if s.is_zero() {
        return Err(Error::PermutationNotApplicable {
            k: p,
            reason: "the trailing entry of the 2x2 pivot block is zero",
        });
    }
    for t in 0..p {
        m.swap_entries((t, p), (t, p + 1));
        m.swap_entries((p, t), (p + 1, t));
    }
    let mut rows = Vec::with_capacity(2 * n);
    let mut cols = Vec::with_capacity(2 * n);
    for j in p + 2..n {
        rows.push((
            ops.cross_add(&r0, &m[(p + 1, j)], &big_q, &m[(p, j)], &r1)?,
            ops.cross(&r2, &m[(p, j)], &big_p, &m[(p + 1, j)], Some(&r1))?,
        ));
        cols.push((
            ops.cross_add(&r0, &m[(j, p + 1)], &big_p, &m[(j, p)], &r1)?,
            ops.cross(&r2, &m[(j, p)], &big_q, &m[(j, p + 1)], Some(&r1))?,
        ));
    }
    m[(p, p)] = s.clone();
    m[(p, p + 1)] = big_q;
    m[(p + 1, p)] = big_p;
    for (j, (a, b)) in (p + 2..n).zip(rows) {
        m[(p, j)] = a;
        m[(p + 1, j)] = b;
    }
    for (i, (a, b)) in (p + 2..n).zip(cols) {
        m[(i, p)] = a;
        m[(i, p + 1)] = b;
    }
    pivots[p + 1] = s;
    Ok(())
}

fn negate_trailing(m: &mut IntMatrix, from: usize) {
    let n = m.n_rows();
    for i in from..n {
        for x in &mut m.row_mut(i)[from..] {
            *x = -std::mem::take(x);
        }
    }
}
