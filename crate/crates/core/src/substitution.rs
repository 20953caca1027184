use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorization::REFFactorization;
use crate::matrix::IntVector;
use crate::ops::OpCounts;
use crate::rational::Rational;

/// Forward-substitution iterate `y^(k)`: entries `0..k` are final.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FSVector {
    pub k: usize,
    pub entries: IntVector,
}

/// Scaled exact solution: `A * scaled_x == det * b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSolution {
    pub scaled_x: IntVector,
    pub det: BigInt,
}

impl ExactSolution {
    /// `x_i = scaled_x_i / det` in lowest terms.
    pub fn rationals(&self) -> Result<Vec<Rational>> {
        self.scaled_x.iter().map(|x| Rational::new(x.clone(), self.det.clone())).collect()
    }
}

#[derive(Serialize)]
struct SolutionJson {
    det: String,
    scaled_x: Vec<String>,
    x: Vec<String>,
}

impl ExactSolution {
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let x = self.rationals()?.iter().map(ToString::to_string).collect();
        let s = SolutionJson {
            det: self.det.to_string(),
            scaled_x: self.scaled_x.iter().map(ToString::to_string).collect(),
            x,
        };
        Ok(serde_json::to_value(s).expect("plain strings serialize"))
    }
}

/// Shared kernel of one forward step at pivot position `p` (0-based):
/// `out_i = (col(p) prev_i - col(i) prev_p) / div` for `i > p`, earlier entries copied.
pub(crate) fn fs_kernel<'a>(
    prev: &[BigInt],
    out: &mut [BigInt],
    p: usize,
    col: impl Fn(usize) -> &'a BigInt,
    div: Option<&BigInt>,
    ops: &mut OpCounts,
) -> Result<()> {
    out[..=p].clone_from_slice(&prev[..=p]);
    let diag = col(p);
    for i in p + 1..prev.len() {
        out[i] = ops.cross(diag, &prev[i], col(i), &prev[p], div)?;
    }
    Ok(())
}

/// One step of REF forward substitution, producing `y^(k)` from `y^(k-1)`
/// where `k = y_prev.k + 1`. `col_k` is the matching column of the lower
/// factor (full length) and `pivot_prev` the pivot before it (1 for `k = 1`).
pub fn ref_fs_step(y_prev: &FSVector, col_k: &[BigInt], pivot_prev: &BigInt) -> Result<FSVector> {
    let n = y_prev.entries.len();
    if col_k.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: col_k.len() });
    }
    let p = y_prev.k;
    if p >= n {
        return Err(Error::OutOfRange(format!("forward step {} for n = {n}", p + 1)));
    }
    let mut out = IntVector::zeros(n);
    let div = (!pivot_prev.is_one()).then_some(pivot_prev);
    fs_kernel(&y_prev.entries, &mut out, p, |i| &col_k[i], div, &mut OpCounts::default())?;
    Ok(FSVector { k: p + 1, entries: out })
}

/// All iterates `y^(0), ..., y^(n-1)` of REF forward substitution on `b`
/// (already in factorization coordinates) using `L`, or `U^T` when
/// `use_transpose` is set.
pub fn ref_forward_substitute(f: &REFFactorization, b: &[BigInt], use_transpose: bool) -> Result<Vec<FSVector>> {
    let n = f.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    let m = f.merged();
    let mut iterates = vec![FSVector { k: 0, entries: b.to_vec().into() }];
    let mut ops = OpCounts::default();
    for p in 0..n.saturating_sub(1) {
        let prev = &iterates[p].entries;
        let mut out = IntVector::zeros(n);
        let div = (p > 0).then(|| &f.pivots()[p]);
        if use_transpose {
            fs_kernel(prev, &mut out, p, |i| &m[(p, i)], div, &mut ops)?;
        } else {
            fs_kernel(prev, &mut out, p, |i| &m[(i, p)], div, &mut ops)?;
        }
        iterates.push(FSVector { k: p + 1, entries: out });
    }
    Ok(iterates)
}

/// Backward substitution on `y' = rho^n y`, returning `x' = det * x`.
pub fn ref_backward_substitute(f: &REFFactorization, y_final: &[BigInt]) -> Result<IntVector> {
    let n = f.n();
    if y_final.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: y_final.len() });
    }
    let m = f.merged();
    let mut x = IntVector::zeros(n);
    for i in (0..n).rev() {
        let mut acc = y_final[i].clone();
        for j in i + 1..n {
            if !x[j].is_zero() {
                acc -= &m[(i, j)] * &x[j];
            }
        }
        x[i] = crate::ops::exact_div(&acc, &m[(i, i)])?;
    }
    Ok(x)
}

/// Exact solve of `A x = b` in the caller's (unpermuted) coordinates.
pub fn solve(f: &REFFactorization, b: &[BigInt]) -> Result<ExactSolution> {
    let n = f.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    let bp = f.row_perm().gather(b);
    let y = ref_forward_substitute(f, &bp, false)?.pop().map(|v| v.entries).unwrap_or_default();
    let rho_n = &f.pivots()[n];
    let y_scaled: Vec<BigInt> = y.iter().map(|yi| yi * rho_n).collect();
    let xp = ref_backward_substitute(f, &y_scaled)?;
    let mut scaled_x: IntVector = f.col_perm().scatter(&xp).into();
    let det = f.determinant();
    if &det != rho_n {
        for x in scaled_x.iter_mut() {
            *x = -std::mem::take(x);
        }
    }
    Ok(ExactSolution { scaled_x, det })
}
