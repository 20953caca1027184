use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::diagnostics::Diagnostics;
use crate::error::{Error, Result};
use crate::exec::{for_each_chunk, Execution};
use crate::matrix::{IntMatrix, IntVector};
use crate::ops::{exact_div, OpCounts};

/// Position-to-source map. Entry `p` holds the original index placed at
/// position `p`; `parity` is the sign of the permutation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Permutation {
    map: Vec<usize>,
    parity: i8,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n).collect(), parity: 1 }
    }

    /// Build from a position-to-source map, validating bijectivity.
    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n || std::mem::replace(&mut seen[m], true) {
                return Err(Error::OutOfRange(format!("not a permutation: {map:?}")));
            }
        }
        // Parity from the cycle decomposition.
        let mut visited = vec![false; n];
        let mut transpositions = 0;
        for s in 0..n {
            let mut len = 0;
            let mut c = s;
            while !visited[c] {
                visited[c] = true;
                c = map[c];
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        Ok(Permutation { map, parity: if transpositions % 2 == 0 { 1 } else { -1 } })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(p, &m)| p == m)
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        if a != b {
            self.map.swap(a, b);
            self.parity = -self.parity;
        }
    }

    /// `out[p] = x[map[p]]`.
    pub fn gather<T: Clone>(&self, x: &[T]) -> Vec<T> {
        self.map.iter().map(|&m| x[m].clone()).collect()
    }

    /// Inverse of [`gather`](Self::gather): `out[map[p]] = x[p]`.
    pub fn scatter<T: Clone>(&self, x: &[T]) -> Vec<T> {
        let mut out = x.to_vec();
        for (p, &m) in self.map.iter().enumerate() {
            out[m] = x[p].clone();
        }
        out
    }
}

/// Integer-preserving LU factorization `P_r A P_c = L D^-1 U`.
///
/// `L` and `U` share their diagonal and live in one merged array. The pivot
/// history has `n + 1` entries with `pivots[0] = 1` and `pivots[k]` the k-th
/// leading principal minor of the permuted matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct REFFactorization {
    pub(crate) merged: IntMatrix,
    pub(crate) pivots: Vec<BigInt>,
    pub(crate) original: IntMatrix,
    pub(crate) row_perm: Permutation,
    pub(crate) col_perm: Permutation,
    pub(crate) symmetric: bool,
}

impl REFFactorization {
    /// Assemble a factorization from parts, checking shapes and the pivot/diagonal
    /// agreement. Used when loading stored factorizations.
    pub fn from_parts(
        merged: IntMatrix,
        original: IntMatrix,
        row_perm: Permutation,
        col_perm: Permutation,
        symmetric: bool,
    ) -> Result<Self> {
        let n = merged.require_square()?;
        if original.n_rows() != n || original.n_cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: original.n_rows() });
        }
        if row_perm.len() != n || col_perm.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row_perm.len().min(col_perm.len()) });
        }
        let mut pivots = vec![BigInt::one()];
        for k in 0..n {
            if merged[(k, k)].is_zero() {
                return Err(Error::SingularMatrix { step: k + 1 });
            }
            pivots.push(merged[(k, k)].clone());
        }
        Ok(REFFactorization { merged, pivots, original, row_perm, col_perm, symmetric })
    }

    pub fn n(&self) -> usize {
        self.merged.n_rows()
    }

    pub fn merged(&self) -> &IntMatrix {
        &self.merged
    }

    /// `rho^0 = 1, rho^1, ..., rho^n`.
    pub fn pivots(&self) -> &[BigInt] {
        &self.pivots
    }

    pub fn original(&self) -> &IntMatrix {
        &self.original
    }

    pub fn row_perm(&self) -> &Permutation {
        &self.row_perm
    }

    pub fn col_perm(&self) -> &Permutation {
        &self.col_perm
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Entry of `L` (0-based); zero above the diagonal.
    pub fn l(&self, i: usize, j: usize) -> BigInt {
        if i >= j {
            self.merged[(i, j)].clone()
        } else {
            BigInt::zero()
        }
    }

    /// Entry of `U` (0-based); zero below the diagonal.
    pub fn u(&self, i: usize, j: usize) -> BigInt {
        if i <= j {
            self.merged[(i, j)].clone()
        } else {
            BigInt::zero()
        }
    }

    pub fn lower(&self) -> IntMatrix {
        let n = self.n();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                m[(i, j)] = self.merged[(i, j)].clone();
            }
        }
        m
    }

    pub fn upper(&self) -> IntMatrix {
        self.lower_of_transpose().transpose()
    }

    fn lower_of_transpose(&self) -> IntMatrix {
        let n = self.n();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                m[(i, j)] = self.merged[(j, i)].clone();
            }
        }
        m
    }

    /// Diagonal of `D`: `d_ii = rho^(i-1) rho^i`.
    pub fn d_diag(&self) -> Vec<BigInt> {
        (0..self.n()).map(|i| &self.pivots[i] * &self.pivots[i + 1]).collect()
    }

    /// Entry of `P_r A P_c`.
    pub fn permuted_entry(&self, i: usize, j: usize) -> &BigInt {
        &self.original[(self.row_perm.map[i], self.col_perm.map[j])]
    }

    pub fn permuted_original(&self) -> IntMatrix {
        permute(&self.original, &self.row_perm, &self.col_perm)
    }

    /// Determinant of the original (unpermuted) matrix.
    pub fn determinant(&self) -> BigInt {
        let d = self.pivots[self.n()].clone();
        if self.row_perm.parity * self.col_perm.parity < 0 {
            -d
        } else {
            d
        }
    }

    pub fn diagnostics(&self, op_counts: OpCounts) -> Diagnostics {
        Diagnostics::new(&self.original, &self.merged, op_counts)
    }
}

/// `P_r A P_c` for position-to-source maps.
pub fn permute(a: &IntMatrix, rows: &Permutation, cols: &Permutation) -> IntMatrix {
    let n = rows.len();
    let mut m = IntMatrix::zeros(n, cols.len());
    for i in 0..n {
        for j in 0..cols.len() {
            m[(i, j)] = a[(rows.map[i], cols.map[j])].clone();
        }
    }
    m
}

/// One elimination step at pivot position `k` (0-based), in place.
///
/// Rows and columns `<= k` are left alone; every entry `(i, j)` with
/// `i, j > k` becomes `(rho^k a_ij - a_kj a_ik) / rho^(k-1)`.
pub fn ipge_step(work: &mut IntMatrix, k: usize, prev_pivot: &BigInt, exec: Execution) -> Result<()> {
    let n = work.require_square()?;
    let pivot = work[(k, k)].clone();
    if pivot.is_zero() {
        return Err(Error::ZeroPivot { step: k + 1 });
    }
    let divide = !prev_pivot.is_one();
    let (head, tail) = work.data_mut().split_at_mut((k + 1) * n);
    let pivot_row = &head[k * n..];
    let failure = std::sync::Mutex::new(None);
    for_each_chunk(exec, tail, n, |_, row| {
        let aik = row[k].clone();
        for j in k + 1..n {
            let x = &pivot * &row[j] - &pivot_row[j] * &aik;
            row[j] = if divide {
                match exact_div(&x, prev_pivot) {
                    Ok(q) => q,
                    Err(e) => {
                        *failure.lock().unwrap() = Some(e);
                        return;
                    }
                }
            } else {
                x
            };
        }
    });
    match failure.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn step_ops(n: usize, k: usize) -> OpCounts {
    let m = ((n - k - 1) * (n - k - 1)) as u64;
    OpCounts { add: 0, sub: m, mul: 2 * m, div: if k == 0 { 0 } else { m } }
}

enum PivotPolicy {
    RowSwap,
    Fail,
    FailLeadingMinor,
}

fn eliminate(
    a: &IntMatrix,
    row_perm: Permutation,
    col_perm: Permutation,
    policy: PivotPolicy,
    exec: Execution,
) -> Result<(REFFactorization, OpCounts)> {
    let n = a.require_square()?;
    let mut row_perm = row_perm;
    let mut work = permute(a, &row_perm, &col_perm);
    let mut pivots = Vec::with_capacity(n + 1);
    pivots.push(BigInt::one());
    let mut ops = OpCounts::default();
    for k in 0..n {
        if work[(k, k)].is_zero() {
            match policy {
                PivotPolicy::RowSwap => {
                    let i =
                        (k + 1..n).find(|&i| !work[(i, k)].is_zero()).ok_or(Error::SingularMatrix { step: k + 1 })?;
                    work.swap_rows(k, i);
                    row_perm.swap(k, i);
                }
                PivotPolicy::Fail => return Err(Error::SingularMatrix { step: k + 1 }),
                PivotPolicy::FailLeadingMinor => return Err(Error::SingularLeadingMinor { step: k + 1 }),
            }
        }
        ipge_step(&mut work, k, &pivots[k], exec)?;
        ops += step_ops(n, k);
        pivots.push(work[(k, k)].clone());
    }
    let f = REFFactorization { merged: work, pivots, original: a.clone(), row_perm, col_perm, symmetric: false };
    Ok((f, ops))
}

/// REF-LU with first-nonzero row pivoting.
pub fn ref_lu_factorize(a: &IntMatrix) -> Result<REFFactorization> {
    ref_lu_factorize_with(a, Execution::default()).map(|(f, _)| f)
}

/// [`ref_lu_factorize`] with an explicit execution mode, also returning op tallies.
pub fn ref_lu_factorize_with(a: &IntMatrix, exec: Execution) -> Result<(REFFactorization, OpCounts)> {
    let n = a.require_square()?;
    eliminate(a, Permutation::identity(n), Permutation::identity(n), PivotPolicy::RowSwap, exec)
}

/// Row-pivoting factorization that starts from the given orders.
pub(crate) fn factorize_pivoting_from(
    a: &IntMatrix,
    row_perm: &Permutation,
    col_perm: &Permutation,
) -> Result<(REFFactorization, OpCounts)> {
    eliminate(a, row_perm.clone(), col_perm.clone(), PivotPolicy::RowSwap, Execution::Sequential)
}

/// Factorize `P_r A P_c` for fixed permutations, without any pivoting.
/// Fails with `SingularMatrix` if a leading minor of the permuted matrix vanishes.
pub fn factorize_with_perms(
    a: &IntMatrix,
    row_perm: &Permutation,
    col_perm: &Permutation,
    exec: Execution,
) -> Result<REFFactorization> {
    let n = a.require_square()?;
    if row_perm.len() != n || col_perm.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: row_perm.len() });
    }
    eliminate(a, row_perm.clone(), col_perm.clone(), PivotPolicy::Fail, exec).map(|(f, _)| f)
}

/// REF Cholesky: `A = L D^-1 L^T` for symmetric `A` with nonzero leading minors.
pub fn ref_cholesky_factorize(a: &IntMatrix) -> Result<REFFactorization> {
    let n = a.require_square()?;
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let (mut f, _) = eliminate(
        a,
        Permutation::identity(n),
        Permutation::identity(n),
        PivotPolicy::FailLeadingMinor,
        Execution::default(),
    )?;
    if !f.merged.is_symmetric() {
        return Err(Error::OracleMismatch("REF Cholesky factor lost symmetry".into()));
    }
    f.symmetric = true;
    Ok(f)
}

/// Determinant of the factored matrix.
pub fn determinant(f: &REFFactorization) -> BigInt {
    f.determinant()
}

/// Column `k` of `L` as a full-length vector (zeros above the diagonal).
pub fn lower_column(f: &REFFactorization, k: usize) -> IntVector {
    (0..f.n()).map(|i| f.l(i, k)).collect::<Vec<_>>().into()
}

/// Row `k` of `U` as a full-length vector, i.e. column `k` of `U^T`.
pub fn upper_row(f: &REFFactorization, k: usize) -> IntVector {
    (0..f.n()).map(|j| f.u(k, j)).collect::<Vec<_>>().into()
}
