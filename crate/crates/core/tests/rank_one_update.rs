mod common;

use common::*;
use num_bigint::BigInt;
use rand::Rng;
use refrou::bench_harness::{gen_random_instance, gen_sc2_instance, is_nonsingular};
use refrou::{apply_rank_one, rank_one_update_with_stats, Error, IntVector, UpdateSpec};

fn try_update(seed: u64, n: usize, range: i64, zp_a: f64, zp_v: f64, zp_w: f64) -> Option<u64> {
    let mut r = rng(seed);
    let a = sparse_mat(&mut r, n, range, zp_a);
    let v = sparse_vec(&mut r, n, range, zp_v);
    let w = sparse_vec(&mut r, n, range, zp_w);
    let f = factor(&a)?;
    let spec = UpdateSpec::outer(v, w).ok()?;
    let a_hat = apply_rank_one(&a, &spec).unwrap();
    match rank_one_update_with_stats(&f, &spec) {
        Ok((g, stats)) => {
            check_update(&f, &g, &spec);
            if stats.refactored {
                println!("refactored: seed {seed} n {n}");
            }
            Some(stats.sc2_calls + stats.direct_fallbacks)
        }
        Err(Error::SingularUpdate { .. }) => {
            if is_nonsingular(&a_hat) {
                println!("gave up on nonsingular A_hat: seed {seed} n {n}");
            }
            None
        }
        Err(e) => panic!("seed {seed}: {e}"),
    }
}

#[test]
fn dense_random_matches_refactorization() {
    for seed in 0..60 {
        let n = 2 + (seed as usize % 20);
        let inst = gen_random_instance(n, seed);
        let f = factor(&inst.a).unwrap();
        for gamma in [1, -1, 3] {
            let spec = UpdateSpec::new(BigInt::from(gamma), inst.v.clone(), inst.w.clone()).unwrap();
            let (g, stats) = rank_one_update_with_stats(&f, &spec).unwrap();
            check_update(&f, &g, &spec);
            if gamma == 1 {
                assert_eq!(stats.sc2_calls, 0);
            }
        }
    }
}

#[test]
fn sparse_small_range_stress() {
    let mut special = 0;
    let mut singular = 0;
    for seed in 0..3000 {
        let mut r = rng(seed ^ 0xabc);
        let n = r.gen_range(2..=9);
        let (za, zv, zw) = (r.gen_range(0.0..0.6), r.gen_range(0.0..0.8), r.gen_range(0.0..0.8));
        match try_update(seed, n, 2, za, zv, zw) {
            Some(x) => special += u64::from(x > 0),
            None => singular += 1,
        }
    }
    println!("special paths: {special}, skipped: {singular}");
    assert!(special > 50);
}

#[test]
fn sc2_instances() {
    for seed in 0..40 {
        let n = 4 + seed as usize % 20;
        let s = gen_sc2_instance(n, seed);
        let f = factor(&s.a).unwrap();
        let spec = UpdateSpec::outer(s.v.clone(), s.w.clone()).unwrap();
        let (g, stats) = rank_one_update_with_stats(&f, &spec).unwrap();
        check_update(&f, &g, &spec);
        assert!(stats.sc2_calls >= (s.r - s.c) as u64, "seed {seed}: {} < {}", stats.sc2_calls, s.r - s.c);
    }
}

#[test]
fn worst_case_multiple_of_first_column() {
    for n in [4, 8, 16, 32] {
        let inst = gen_random_instance(n, n as u64);
        let f = factor(&inst.a).unwrap();
        let v: IntVector = inst.a.column(0).scaled(&BigInt::from(2));
        let spec = UpdateSpec::outer(v, inst.w.clone()).unwrap();
        let (g, stats) = rank_one_update_with_stats(&f, &spec).unwrap();
        check_update(&f, &g, &spec);
        println!("n={n} calls={} fallbacks={} ops={}", stats.sc2_calls, stats.direct_fallbacks, stats.ops.total());
    }
}
