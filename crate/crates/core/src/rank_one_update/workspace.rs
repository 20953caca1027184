//! The update proper. Indices are 0-based positions `p`; `k = p + 1` is the
//! 1-based outer iteration, so iterate `y^(k)` has entries `0..=p` final.
//!
//! Leading zeros in `v` (`theta_v`) or `w` (`theta_w`) let whole rows or
//! columns be copied. A zero divisor or pivot is avoided by exchanging the
//! current pivot pair of the old factorization; if no exchange helps, the
//! affected column or row is computed by direct elimination instead.

use num_bigint::BigInt;
use num_traits::Zero;

use super::adjacent::{apply_adjacent, PermuteMode};
use super::{apply_rank_one, UpdateSpec, UpdateStats};
use crate::error::{Error, Result};
use crate::factorization::{factorize_pivoting_from, REFFactorization};
use crate::matrix::{leading_zeros, IntMatrix, IntVector};
use crate::ops::OpCounts;
use crate::substitution::fs_kernel;

/// State after outer iteration `k` (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub k: usize,
    /// Final rows and columns `< k`, pending diagonal entries (one elimination
    /// stage behind) at positions `>= k`, zeros elsewhere.
    pub working: IntMatrix,
    /// Iterates `y^(k)` and `z^(k)` when they are materialized.
    pub y: Option<IntVector>,
    pub z: Option<IntVector>,
}

/// One forward-substitution family. Iterates before `theta` are implicit
/// (`rho^t * src`), iterate `theta` is `src` itself (scaled by `1/rho^theta`)
/// and later iterates are exact.
struct Track {
    theta: usize,
    src: Vec<BigInt>,
    prev: Vec<BigInt>,
    cur: Vec<BigInt>,
    k: usize,
}

impl Track {
    fn new(src: Vec<BigInt>) -> Self {
        Track { theta: leading_zeros(&src), prev: src.clone(), cur: src.clone(), src, k: 0 }
    }

    fn step<'a>(
        &mut self,
        k: usize,
        col: impl Fn(usize) -> &'a BigInt,
        rho_prev: &BigInt,
        ops: &mut OpCounts,
    ) -> Result<()> {
        std::mem::swap(&mut self.prev, &mut self.cur);
        self.k = k;
        self.fill(col, rho_prev, ops)
    }

    /// Recompute iterate `k` from iterate `k - 1`.
    fn fill<'a>(&mut self, col: impl Fn(usize) -> &'a BigInt, rho_prev: &BigInt, ops: &mut OpCounts) -> Result<()> {
        let k = self.k;
        if k < self.theta {
            return Ok(());
        }
        if k == self.theta {
            self.cur.clone_from(&self.src);
            return Ok(());
        }
        let div = (k > self.theta + 1).then_some(rho_prev);
        fs_kernel(&self.prev, &mut self.cur, k - 1, col, div, ops)
    }

    /// Entry `i` of iterate `k - 1`, up to a nonzero scale.
    fn test_prev(&self, i: usize) -> &BigInt {
        if self.k - 1 < self.theta {
            &self.src[i]
        } else {
            &self.prev[i]
        }
    }

    /// Entry `i` of iterate `k`, up to a nonzero scale.
    fn test_cur(&self, i: usize) -> &BigInt {
        if self.k < self.theta {
            &self.src[i]
        } else {
            &self.cur[i]
        }
    }

    /// Exact entry `i` of iterate `k - 1`.
    fn true_prev(&self, i: usize, rho: &[BigInt], ops: &mut OpCounts) -> BigInt {
        let t = self.k - 1;
        if t > self.theta {
            self.prev[i].clone()
        } else if t == 0 {
            self.src[i].clone()
        } else {
            ops.mul(&rho[t], &self.src[i])
        }
    }

    /// Exchange entries `p` and `p + 1` (a row exchange for `y`, a column exchange for `z`).
    fn swap_pair(&mut self, p: usize) {
        self.src.swap(p, p + 1);
        self.prev.swap(p, p + 1);
        self.theta = leading_zeros(&self.src);
        if self.k - 1 == self.theta {
            self.prev.clone_from(&self.src);
        }
    }
}

fn theta_after(src: &[BigInt], p: usize, swapped: bool) -> usize {
    (0..src.len())
        .take_while(|&i| {
            let j = match i {
                _ if !swapped => i,
                _ if i == p => p + 1,
                _ if i == p + 1 => p,
                _ => i,
            };
            src[j].is_zero()
        })
        .count()
}

struct Workspace {
    n: usize,
    a: REFFactorization,
    y: Track,
    z: Track,
    wk: IntMatrix,
    rho_hat: Vec<BigInt>,
    d: Vec<BigInt>,
    ops: OpCounts,
    stats: UpdateStats,
}

impl Workspace {
    fn theta_max(&self) -> usize {
        self.y.theta.max(self.z.theta)
    }

    /// `a_hat^(s)_ij` from scratch, using finished rows and columns `< s`.
    fn advance_entry(&mut self, i: usize, j: usize, s: usize) -> Result<BigInt> {
        let Workspace { a, y, z, wk, rho_hat, ops, .. } = self;
        let vw = ops.mul(&y.src[i], &z.src[j]);
        let mut x = ops.add(vw, a.permuted_entry(i, j));
        for t in 0..s {
            x = ops.cross(&rho_hat[t + 1], &x, &wk[(t, j)], &wk[(i, t)], (t > 0).then(|| &rho_hat[t]))?;
        }
        Ok(x)
    }

    /// Move pending diagonal entries from stage `p - 1` to stage `p`.
    fn advance_diag(&mut self, p: usize) -> Result<()> {
        let from = p.max(self.theta_max());
        let Workspace { n, wk, rho_hat, d, ops, .. } = self;
        let div = (p >= 2).then(|| &rho_hat[p - 1]);
        for i in from..*n {
            d[i] = ops.cross(&rho_hat[p], &d[i], &wk[(p - 1, i)], &wk[(i, p - 1)], div)?;
        }
        Ok(())
    }

    fn step_tracks(&mut self, k: usize) -> Result<()> {
        let p = k - 1;
        let Workspace { a, y, z, ops, .. } = self;
        let m = &a.merged;
        let rho_prev = &a.pivots[p];
        y.step(k, |i| &m[(i, p)], rho_prev, ops)?;
        z.step(k, |i| &m[(p, i)], rho_prev, ops)
    }

    fn refill_tracks(&mut self, p: usize) -> Result<()> {
        let Workspace { a, y, z, ops, .. } = self;
        let m = &a.merged;
        let rho_prev = &a.pivots[p];
        y.fill(|i| &m[(i, p)], rho_prev, ops)?;
        z.fill(|i| &m[(p, i)], rho_prev, ops)
    }

    fn y_look_fails(&self, k: usize) -> bool {
        k > self.y.theta && k >= self.z.theta && self.y.test_cur(k).is_zero()
    }

    fn z_look_fails(&self, k: usize) -> bool {
        k > self.z.theta && k >= self.y.theta && self.z.test_cur(k).is_zero()
    }

    /// Column `p` of the new lower factor, below the diagonal.
    fn lower_col(&mut self, p: usize) -> Result<()> {
        let k = p + 1;
        let n = self.n;
        if k <= self.z.theta {
            for i in p + 1..n {
                self.wk[(i, p)] = self.a.merged[(i, p)].clone();
            }
        } else if k <= self.y.theta + 1 {
            let Workspace { a, y, z, wk, ops, .. } = self;
            let zt = z.true_prev(p, &a.pivots, ops);
            for i in p + 1..n {
                let t = ops.mul(&y.src[i], &zt);
                wk[(i, p)] = ops.add(t, &a.merged[(i, p)]);
            }
        } else if !self.y.prev[p].is_zero() {
            let Workspace { y, wk, rho_hat, ops, .. } = self;
            for i in p + 1..n {
                wk[(i, p)] = ops.cross(&rho_hat[p + 1], &y.prev[i], &rho_hat[p], &y.cur[i], Some(&y.prev[p]))?;
            }
        } else {
            self.stats.direct_fallbacks += 1;
            for i in p + 1..n {
                self.wk[(i, p)] = self.advance_entry(i, p, p)?;
            }
        }
        Ok(())
    }

    /// Row `p` of the new upper factor, right of the diagonal.
    fn upper_row(&mut self, p: usize) -> Result<()> {
        let k = p + 1;
        let n = self.n;
        if k <= self.y.theta {
            for j in p + 1..n {
                self.wk[(p, j)] = self.a.merged[(p, j)].clone();
            }
        } else if k <= self.z.theta + 1 {
            let Workspace { a, y, z, wk, ops, .. } = self;
            let yt = y.true_prev(p, &a.pivots, ops);
            for j in p + 1..n {
                let t = ops.mul(&z.src[j], &yt);
                wk[(p, j)] = ops.add(t, &a.merged[(p, j)]);
            }
        } else if !self.z.prev[p].is_zero() {
            let Workspace { z, wk, rho_hat, ops, .. } = self;
            for j in p + 1..n {
                wk[(p, j)] = ops.cross(&rho_hat[p + 1], &z.prev[j], &rho_hat[p], &z.cur[j], Some(&z.prev[p]))?;
            }
        } else {
            self.stats.direct_fallbacks += 1;
            for j in p + 1..n {
                self.wk[(p, j)] = self.advance_entry(p, j, p)?;
            }
        }
        Ok(())
    }

    /// Pick and apply the exchange of positions `p`, `p + 1` that keeps both
    /// pivots nonzero and clears the most zero divisors.
    fn adjust(&mut self, p: usize) -> Result<()> {
        let k = p + 1;
        let s = {
            let m = &self.a.merged;
            let (r0, r1) = (&self.a.pivots[p], &self.a.pivots[p + 1]);
            let s11 = self.ops.cross_add(r0, &m[(p + 1, p + 1)], &m[(p, p + 1)], &m[(p + 1, p)], r1)?;
            [[m[(p, p)].clone(), m[(p, p + 1)].clone()], [m[(p + 1, p)].clone(), s11]]
        };
        let mut best: Option<((usize, usize), u32)> = None;
        for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            if s[r][c].is_zero() {
                continue;
            }
            let tv = theta_after(&self.y.src, p, r == 1);
            let tw = theta_after(&self.z.src, p, c == 1);
            if p >= tv.max(tw) && self.advance_entry(p + r, p + c, p)?.is_zero() {
                continue;
            }
            let (y, z, ops) = (&self.y, &self.z, &mut self.ops);
            let mut misses = 0;
            if k > tw && k > tv + 1 && y.test_prev(p + r).is_zero() {
                misses += 1;
            }
            if k > tv && k > tw + 1 && z.test_prev(p + c).is_zero() {
                misses += 1;
            }
            if k > tv && k >= tw {
                let ny = ops.cross(&s[0][c], y.test_prev(p + 1), &s[1][c], y.test_prev(p), None)?;
                misses += u32::from(ny.is_zero());
            }
            if k > tw && k >= tv {
                let nz = ops.cross(&s[r][0], z.test_prev(p + 1), &s[r][1], z.test_prev(p), None)?;
                misses += u32::from(nz.is_zero());
            }
            if best.is_none_or(|(_, m)| misses < m) {
                best = Some(((r, c), misses));
            }
            if misses == 0 {
                break;
            }
        }
        let Some(((r, c), misses)) = best else {
            return Err(Error::SingularUpdate { step: k });
        };
        if misses > 0 {
            self.stats.unresolved += 1;
        }
        let mode = match (r, c) {
            (0, 0) => return Ok(()),
            (0, 1) => {
                self.stats.apcp += 1;
                PermuteMode::Columns
            }
            (1, 0) => {
                self.stats.aprp += 1;
                PermuteMode::Rows
            }
            _ => {
                self.stats.apdp += 1;
                PermuteMode::Diagonal
            }
        };
        self.stats.sc2_calls += 1;
        apply_adjacent(&mut self.a, p, mode, &mut self.ops)?;
        if r == 1 {
            for t in 0..p {
                self.wk.swap_entries((p, t), (p + 1, t));
            }
            self.y.swap_pair(p);
        }
        if c == 1 {
            for t in 0..p {
                self.wk.swap_entries((t, p), (t, p + 1));
            }
            self.z.swap_pair(p);
        }
        self.refill_tracks(p)?;
        for i in [p, p + 1] {
            if i >= self.theta_max() {
                self.d[i] = self.advance_entry(i, i, p)?;
            }
        }
        Ok(())
    }

    fn snapshot(&self, k: usize) -> TraceStep {
        let mut working = self.wk.clone();
        for i in k.max(self.theta_max())..self.n {
            working[(i, i)] = self.d[i].clone();
        }
        let iterate = |t: &Track| (k < self.n && k >= t.theta).then(|| t.cur.clone().into());
        TraceStep { k, working, y: iterate(&self.y), z: iterate(&self.z) }
    }
}

pub(super) fn run(
    f: &REFFactorization,
    spec: &UpdateSpec,
    trace: bool,
) -> Result<(REFFactorization, UpdateStats, Vec<TraceStep>)> {
    let n = f.n();
    if spec.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: spec.len() });
    }
    let mut rho_hat = vec![BigInt::zero(); n + 1];
    rho_hat[0] = BigInt::from(1);
    let mut ws = Workspace {
        n,
        a: f.clone(),
        y: Track::new(f.row_perm().gather(&spec.folded_v())),
        z: Track::new(f.col_perm().gather(spec.w())),
        wk: IntMatrix::zeros(n, n),
        rho_hat,
        d: vec![BigInt::zero(); n],
        ops: OpCounts::default(),
        stats: UpdateStats::default(),
    };
    ws.stats.theta_v = ws.y.theta;
    ws.stats.theta_w = ws.z.theta;
    for i in ws.theta_max()..n {
        ws.d[i] = ws.advance_entry(i, i, 0)?;
    }
    let steps = match iterate(&mut ws, trace) {
        Ok(steps) => steps,
        Err(Error::SingularUpdate { step }) => return refactor_fallback(f, spec, ws, step),
        Err(e) => return Err(e),
    };
    let symmetric = f.is_symmetric() && spec.v() == spec.w() && ws.a.row_perm == ws.a.col_perm && ws.wk.is_symmetric();
    let out = REFFactorization {
        merged: ws.wk,
        pivots: ws.rho_hat,
        original: apply_rank_one(f.original(), spec)?,
        row_perm: ws.a.row_perm,
        col_perm: ws.a.col_perm,
        symmetric,
    };
    let mut stats = ws.stats;
    stats.ops = ws.ops;
    Ok((out, stats, steps))
}

fn iterate(ws: &mut Workspace, trace: bool) -> Result<Vec<TraceStep>> {
    let n = ws.n;
    let mut steps = Vec::new();
    for p in 0..n {
        let k = p + 1;
        if p >= 1 {
            ws.advance_diag(p)?;
        }
        if k < n {
            ws.step_tracks(k)?;
            let pivot_zero = p >= ws.theta_max() && ws.d[p].is_zero();
            let y_fail = ws.y_look_fails(k);
            let z_fail = ws.z_look_fails(k);
            ws.stats.pivot_triggers += u64::from(pivot_zero);
            ws.stats.y_triggers += u64::from(y_fail);
            ws.stats.z_triggers += u64::from(z_fail);
            if pivot_zero || y_fail || z_fail {
                ws.adjust(p)?;
            }
        }
        let pivot = if p < ws.theta_max() { ws.a.pivots[p + 1].clone() } else { ws.d[p].clone() };
        if pivot.is_zero() {
            return Err(Error::SingularUpdate { step: k });
        }
        ws.wk[(p, p)] = pivot.clone();
        ws.rho_hat[p + 1] = pivot;
        if k < n {
            ws.lower_col(p)?;
            ws.upper_row(p)?;
        }
        if trace {
            steps.push(ws.snapshot(k));
        }
    }
    Ok(steps)
}

/// Every adjacent exchange left a zero pivot. Eliminate the updated matrix
/// directly, keeping the orders chosen so far and pivoting on rows.
fn refactor_fallback(
    f: &REFFactorization,
    spec: &UpdateSpec,
    ws: Workspace,
    step: usize,
) -> Result<(REFFactorization, UpdateStats, Vec<TraceStep>)> {
    let a_hat = apply_rank_one(f.original(), spec)?;
    let (mut g, ops) =
        factorize_pivoting_from(&a_hat, &ws.a.row_perm, &ws.a.col_perm).map_err(|_| Error::SingularUpdate { step })?;
    g.symmetric = f.is_symmetric() && spec.v() == spec.w() && g.row_perm == g.col_perm && g.merged.is_symmetric();
    let mut stats = ws.stats;
    stats.ops = ws.ops;
    stats.ops += ops;
    stats.refactored = true;
    Ok((g, stats, Vec::new()))
}
