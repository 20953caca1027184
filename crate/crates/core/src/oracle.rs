//! Brute-force reference computations. Exponential cost; meant for small
//! matrices in tests and spot checks, never for production paths.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{IntMatrix, IntVector};

/// Determinant by cofactor expansion, memoized over column subsets.
/// Cost is `O(2^n n)` big-integer operations.
pub fn det_expand(a: &IntMatrix) -> Result<BigInt> {
    let n = a.require_square()?;
    if n == 0 {
        return Ok(BigInt::one());
    }
    if n > 20 {
        return Err(Error::OutOfRange(format!("expansion oracle limited to n <= 20, got {n}")));
    }
    let mut dp = vec![BigInt::zero(); 1usize << n];
    dp[0] = BigInt::one();
    for mask in 0usize..(1 << n) {
        if dp[mask].is_zero() {
            continue;
        }
        let r = mask.count_ones() as usize;
        if r == n {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) != 0 || a[(r, j)].is_zero() {
                continue;
            }
            let term = &dp[mask] * &a[(r, j)];
            let inversions = (mask >> (j + 1)).count_ones();
            let next = mask | (1 << j);
            if inversions % 2 == 0 {
                dp[next] += term;
            } else {
                dp[next] -= term;
            }
        }
    }
    Ok(dp[(1 << n) - 1].clone())
}

/// Classical adjugate: `adj(A)[i][j] = (-1)^(i+j) det(A without row j, column i)`.
pub fn adjugate(a: &IntMatrix) -> Result<IntMatrix> {
    let n = a.require_square()?;
    let mut adj = IntMatrix::zeros(n, n);
    if n == 1 {
        adj[(0, 0)] = BigInt::one();
        return Ok(adj);
    }
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let m = det_expand(&a.select(&rows, &cols))?;
            adj[(i, j)] = if (i + j) % 2 == 0 { m } else { -m };
        }
    }
    Ok(adj)
}

/// The signed minor that the elimination entry `a^(k)_ij` equals (1-based `i`, `j`).
///
/// For `i > k` this is the bordered leading minor with rows `1..k, i` and
/// columns `1..k, j`. For `i <= k` (rows already used as pivots, which only a
/// full-reduction variant touches) it is `(-1)^(i+k)` times the minor with rows
/// `1..k` and columns `1..k` minus `i`, then `j`.
pub fn subdeterminant(a: &IntMatrix, k: usize, i: usize, j: usize) -> Result<BigInt> {
    let n = a.require_square()?;
    if k > n || i < 1 || j < 1 || i > n || j > n || i < k || j < k {
        return Err(Error::OutOfRange(format!("(k, i, j) = ({k}, {i}, {j}) for n = {n}")));
    }
    if i > k || k == 0 {
        let mut rows: Vec<usize> = (0..k).collect();
        let mut cols: Vec<usize> = (0..k).collect();
        rows.push(i - 1);
        cols.push(j - 1);
        return det_expand(&a.select(&rows, &cols));
    }
    // i == k here since i >= k.
    let rows: Vec<usize> = (0..k).collect();
    let mut cols: Vec<usize> = (0..k).filter(|&c| c != i - 1).collect();
    cols.push(j - 1);
    let m = det_expand(&a.select(&rows, &cols))?;
    Ok(if (i + k).is_multiple_of(2) { m } else { -m })
}

/// `adj(A) v`.
pub fn adjugate_times(a: &IntMatrix, v: &[BigInt]) -> Result<IntVector> {
    crate::matrix::mat_vec(&adjugate(a)?, v)
}
