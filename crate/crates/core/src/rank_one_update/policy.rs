//! Whether to rotate nonzeros of `w` rightwards (through adjacent column
//! exchanges) so that more leading columns can be copied during the update.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::adjacent::{apply_adjacent, PermuteMode};
use crate::error::{Error, Result};
use crate::factorization::REFFactorization;
use crate::ops::OpCounts;

/// Outcome of the cost model. Positions are 1-based, matching the cost sums.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SparsityPlan {
    /// Number of leading nonzeros considered (0 when the model does not apply).
    pub p: usize,
    /// Positions of the first `p` nonzeros of `w`.
    pub nonzeros: Vec<usize>,
    /// Positions of the first `p - 1` zeros after position `p`.
    pub targets: Vec<usize>,
    /// Estimated operations spent on column exchanges.
    pub cost: u64,
    /// Estimated operations saved by copying leading columns.
    pub savings: u64,
    pub permute: bool,
    /// 0-based adjacent column exchanges, applied in order.
    pub swaps: Vec<usize>,
    /// Leading zeros of `w` after the swaps that were actually applied.
    pub theta_w_after: usize,
}

fn model(n: usize, nz: &[usize], zeros: &[usize]) -> (u64, u64) {
    let n = n as u64;
    let cost: u64 = nz.iter().zip(zeros).map(|(&t, &z)| (t as u64..z as u64).map(|k| 8 * (n - k)).sum::<u64>()).sum();
    let savings = (nz[0] as u64..*nz.last().unwrap() as u64).map(|k| 12 * (n - k)).sum();
    (cost, savings)
}

/// Grow `p` from 2 while the exchange cost stays below the savings and keep
/// the largest accepted `p`. `w` is in factorization coordinates.
pub fn sparsity_policy(w: &[BigInt]) -> SparsityPlan {
    let n = w.len();
    let nonzeros: Vec<usize> = (1..=n).filter(|&i| !w[i - 1].is_zero()).collect();
    let lead = nonzeros.first().map_or(n, |&t| t - 1);
    let mut plan = SparsityPlan { theta_w_after: lead, ..SparsityPlan::default() };
    for p in 2..=nonzeros.len() {
        let zeros: Vec<usize> = (p + 1..=n).filter(|&i| w[i - 1].is_zero()).take(p - 1).collect();
        if zeros.len() < p - 1 {
            break;
        }
        let (cost, savings) = model(n, &nonzeros[..p], &zeros);
        if cost >= savings {
            if plan.p == 0 {
                plan.p = p;
                plan.nonzeros = nonzeros[..p].to_vec();
                plan.targets = zeros;
                plan.cost = cost;
                plan.savings = savings;
            }
            break;
        }
        plan.p = p;
        plan.nonzeros = nonzeros[..p].to_vec();
        plan.targets = zeros;
        plan.cost = cost;
        plan.savings = savings;
        plan.permute = true;
    }
    if plan.permute {
        plan.swaps = schedule(w, &plan.nonzeros, &plan.targets);
        let mut moved = w.to_vec();
        for &s in &plan.swaps {
            moved.swap(s, s + 1);
        }
        plan.theta_w_after = crate::matrix::leading_zeros(&moved);
    }
    plan
}

/// Rotate the `j`-th nonzero to the `j`-th target, last pair first so earlier
/// rotations do not disturb positions already placed.
fn schedule(w: &[BigInt], nonzeros: &[usize], targets: &[usize]) -> Vec<usize> {
    let mut pos: Vec<usize> = (0..w.len()).collect();
    let mut swaps = Vec::new();
    for (&t, &z) in nonzeros.iter().zip(targets).rev() {
        let mut at = pos.iter().position(|&x| x == t - 1).expect("tracked index");
        while at + 1 < z {
            swaps.push(at);
            pos.swap(at, at + 1);
            at += 1;
        }
    }
    swaps
}

/// Apply the plan's exchanges to `f`. Stops at the first exchange that is not
/// applicable and records how far it got.
pub fn apply_sparsity_plan(
    f: &mut REFFactorization,
    mut plan: SparsityPlan,
    ops: &mut OpCounts,
) -> Result<SparsityPlan> {
    if !plan.permute {
        return Ok(plan);
    }
    let mut applied = Vec::new();
    for &s in &plan.swaps {
        match apply_adjacent(f, s, PermuteMode::Columns, ops) {
            Ok(()) => applied.push(s),
            Err(Error::PermutationNotApplicable { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    plan.swaps = applied;
    Ok(plan)
}
