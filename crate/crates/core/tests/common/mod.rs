#![allow(dead_code)]

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use refrou::bench_harness::oracle_check;
use refrou::{
    apply_rank_one, factorize_with_perms, ref_lu_factorize, Execution, IntMatrix, IntVector, REFFactorization,
    UpdateSpec,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries in `[-range, range]`, zero with probability `zero_p`.
pub fn sparse_vec(r: &mut ChaCha8Rng, n: usize, range: i64, zero_p: f64) -> IntVector {
    (0..n)
        .map(|_| {
            if r.gen_bool(zero_p) {
                BigInt::from(0)
            } else {
                BigInt::from(r.gen_range(1..=range) * if r.gen() { 1 } else { -1 })
            }
        })
        .collect::<Vec<_>>()
        .into()
}

pub fn sparse_mat(r: &mut ChaCha8Rng, n: usize, range: i64, zero_p: f64) -> IntMatrix {
    IntMatrix::from_rows((0..n).map(|_| sparse_vec(r, n, range, zero_p).into_inner()).collect()).unwrap()
}

/// Checks the update against a fresh factorization taken in the update's order.
pub fn check_update(f: &REFFactorization, g: &REFFactorization, spec: &UpdateSpec) {
    let a_hat = apply_rank_one(f.original(), spec).unwrap();
    assert_eq!(g.original(), &a_hat);
    let fresh = factorize_with_perms(&a_hat, g.row_perm(), g.col_perm(), Execution::Sequential)
        .expect("update order gives nonzero leading minors");
    oracle_check(g, &fresh).unwrap();
}

pub fn factor(a: &IntMatrix) -> Option<REFFactorization> {
    ref_lu_factorize(a).ok()
}
