use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::matrix::IntMatrix;
use crate::ops::OpCounts;

/// Size statistics and operation tallies for one computation.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub n: usize,
    /// Largest absolute input entry.
    pub sigma: String,
    /// Largest bit-length among the stored factorization entries.
    pub beta_max: u64,
    /// `ceil(n * log2(sigma * sqrt(n)))`.
    pub bound_log2: u64,
    /// Same bound read with the natural logarithm.
    pub bound_ln: u64,
    pub op_counts: OpCounts,
}

impl Diagnostics {
    pub fn new(input: &IntMatrix, stored: &IntMatrix, op_counts: OpCounts) -> Self {
        let n = input.n_rows();
        let sigma = input.max_abs();
        Diagnostics {
            n,
            bound_log2: bit_length_bound(n, &sigma, f64::log2),
            bound_ln: bit_length_bound(n, &sigma, f64::ln),
            sigma: sigma.to_string(),
            beta_max: stored.max_bits(),
            op_counts,
        }
    }

    pub fn within_log2_bound(&self) -> bool {
        self.beta_max <= self.bound_log2
    }

    pub fn within_ln_bound(&self) -> bool {
        self.beta_max <= self.bound_ln
    }
}

/// `ceil(n * log(sigma * sqrt(n)))` for the supplied logarithm.
pub fn bit_length_bound(n: usize, sigma: &BigInt, log: fn(f64) -> f64) -> u64 {
    if n == 0 || sigma.bits() == 0 {
        return 0;
    }
    // log(sigma) computed from the top 53 bits so huge sigmas do not overflow f64.
    let shift = sigma.bits().saturating_sub(53);
    let top = (sigma >> shift).to_f64().unwrap_or(f64::MAX);
    let log_sigma = log(top) + shift as f64 * log(2.0);
    let v = n as f64 * (log_sigma + 0.5 * log(n as f64));
    // Guard against float noise turning an exact integer into the next one up.
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r.max(0.0) as u64
    } else {
        v.ceil().max(0.0) as u64
    }
}
