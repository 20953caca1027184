//! Property tests for the factorization, substitution and update invariants.

mod common;

use common::{check_update, sparse_mat, sparse_vec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use refrou::oracle::{adjugate_times, det_expand, subdeterminant};
use refrou::substitution::ref_forward_substitute;
use refrou::{
    adjacent_permute, factorize_with_perms, integerize, mat_mul, mat_vec, rank_one_update, ref_cholesky_factorize,
    ref_lu_factorize, ref_lu_factorize_with, solve, Execution, IntMatrix, IntVector, Permutation, PermuteMode,
    Rational, UpdateSpec,
};

fn dense(seed: u64, n: usize) -> IntMatrix {
    sparse_mat(&mut common::rng(seed), n, 9, 0.0)
}

fn pair(seed: u64, n: usize) -> (IntVector, IntVector) {
    let mut r = common::rng(seed ^ 0x5eed);
    (sparse_vec(&mut r, n, 9, 0.0), sparse_vec(&mut r, n, 9, 0.0))
}

fn spd(seed: u64, n: usize) -> IntMatrix {
    let b = dense(seed, n);
    let mut s = mat_mul(&b.transpose(), &b).unwrap();
    for i in 0..n {
        s[(i, i)] += 1;
    }
    s
}

fn ratio(a: &BigInt, b: &BigInt) -> BigRational {
    BigRational::new(a.clone(), b.clone())
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn reconstruction_l_dinv_u(n in 1usize..=16, seed: u64) {
        let a = dense(seed, n);
        let Ok(f) = ref_lu_factorize(&a) else { return Ok(()) };
        let (l, u, d) = (f.lower(), f.upper(), f.d_diag());
        let pa = f.permuted_original();
        for i in 0..n {
            for j in 0..n {
                let sum = (0..n).fold(BigRational::zero(), |s, k| s + ratio(&(&l[(i, k)] * &u[(k, j)]), &d[k]));
                prop_assert_eq!(sum, BigRational::from_integer(pa[(i, j)].clone()));
            }
        }
    }

    #[test]
    fn entries_equal_bordered_minors(n in 1usize..=8, seed: u64) {
        let Ok(f) = ref_lu_factorize(&dense(seed, n)) else { return Ok(()) };
        let pa = f.permuted_original();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(&f.merged()[(i, j)], &subdeterminant(&pa, i.min(j), i + 1, j + 1).unwrap());
            }
        }
        for k in 0..=n {
            prop_assert_eq!(&f.pivots()[k], &det_expand(&pa.leading_block(k)).unwrap());
        }
    }

    #[test]
    fn leading_blocks_nest(n in 1usize..=12, seed: u64) {
        let Ok(f) = ref_lu_factorize(&dense(seed, n)) else { return Ok(()) };
        let pa = f.permuted_original();
        for k in 1..=n {
            let id = Permutation::identity(k);
            let g = factorize_with_perms(&pa.leading_block(k), &id, &id, Execution::Sequential).unwrap();
            prop_assert_eq!(g.merged(), &f.merged().leading_block(k));
        }
    }

    #[test]
    fn execution_modes_agree(n in 1usize..=24, seed: u64) {
        let a = dense(seed, n);
        let p = ref_lu_factorize_with(&a, Execution::Parallel).map(|r| r.0);
        let s = ref_lu_factorize_with(&a, Execution::Sequential).map(|r| r.0);
        prop_assert_eq!(p.ok(), s.ok());
    }

    #[test]
    fn symmetric_input_gives_u_equal_l_transpose(n in 1usize..=12, seed: u64) {
        let f = ref_cholesky_factorize(&spd(seed, n)).unwrap();
        prop_assert_eq!(f.upper(), f.lower().transpose());
        let lu = ref_lu_factorize(&spd(seed, n)).unwrap();
        prop_assert_eq!(f.merged(), lu.merged());
    }

    #[test]
    fn solve_residual(n in 1usize..=12, seed: u64) {
        let a = dense(seed, n);
        let Ok(f) = ref_lu_factorize(&a) else { return Ok(()) };
        let b = pair(seed, n).0;
        let x = solve(&f, &b).unwrap();
        prop_assert_eq!(mat_vec(&a, &x.scaled_x).unwrap(), b.scaled(&x.det));
        prop_assert_eq!(&x.det, &det_expand(&a).unwrap_or_else(|_| x.det.clone()));
    }

    #[test]
    fn adjugate_identities(n in 2usize..=7, seed: u64) {
        let a = dense(seed, n);
        let (v, w) = pair(seed, n);
        let spec = UpdateSpec::outer(v.clone(), w.clone()).unwrap();
        let a_hat = refrou::apply_rank_one(&a, &spec).unwrap();
        prop_assert_eq!(adjugate_times(&a, &v).unwrap(), adjugate_times(&a_hat, &v).unwrap());
        prop_assert_eq!(adjugate_times(&a.transpose(), &w).unwrap(), adjugate_times(&a_hat.transpose(), &w).unwrap());
    }

    #[test]
    fn forward_iterates_agree_across_update(n in 2usize..=16, seed: u64) {
        let Ok(f) = ref_lu_factorize(&dense(seed, n)) else { return Ok(()) };
        let (v, w) = pair(seed, n);
        let spec = UpdateSpec::outer(v.clone(), w.clone()).unwrap();
        let Ok(g) = rank_one_update(&f, &spec) else { return Ok(()) };
        prop_assume!(g.row_perm() == f.row_perm() && g.col_perm() == f.col_perm());
        // Iterates run in factorization coordinates.
        let (vp, wp) = (f.row_perm().gather(&v), f.col_perm().gather(&w));
        prop_assert_eq!(ref_forward_substitute(&f, &vp, false).unwrap(), ref_forward_substitute(&g, &vp, false).unwrap());
        prop_assert_eq!(ref_forward_substitute(&f, &wp, true).unwrap(), ref_forward_substitute(&g, &wp, true).unwrap());
    }

    #[test]
    fn adjacent_permutations_match_refactorization(n in 2usize..=10, seed: u64, k_frac in 0.0f64..1.0, mode in 0u8..3) {
        let Ok(f) = ref_lu_factorize(&dense(seed, n)) else { return Ok(()) };
        let k = ((n - 1) as f64 * k_frac) as usize;
        let mode = [PermuteMode::Columns, PermuteMode::Rows, PermuteMode::Diagonal][mode as usize];
        let Ok(g) = adjacent_permute(&f, k, mode) else { return Ok(()) };
        let fresh = factorize_with_perms(g.original(), g.row_perm(), g.col_perm(), Execution::Sequential).unwrap();
        prop_assert_eq!(g, fresh);
    }

    #[test]
    fn update_then_downdate_round_trips(n in 2usize..=16, seed: u64, gamma in prop::sample::select(vec![-2i64, -1, 1, 3])) {
        let mut r = common::rng(seed);
        let Ok(f) = ref_lu_factorize(&sparse_mat(&mut r, n, 5, 0.3)) else { return Ok(()) };
        let (v, w) = (sparse_vec(&mut r, n, 5, 0.4), sparse_vec(&mut r, n, 5, 0.4));
        prop_assume!(!v.is_zero() && !w.is_zero());
        let up = UpdateSpec::new(gamma.into(), v.clone(), w.clone()).unwrap();
        let Ok(g) = rank_one_update(&f, &up) else { return Ok(()) };
        check_update(&f, &g, &up);
        let down = UpdateSpec::new((-gamma).into(), v, w).unwrap();
        let h = rank_one_update(&g, &down).unwrap();
        check_update(&g, &h, &down);
        prop_assert_eq!(h.original(), f.original());
        prop_assert_eq!(h.determinant(), f.determinant());
    }

    #[test]
    fn symmetric_updates_stay_symmetric(n in 2usize..=12, seed: u64) {
        let f = ref_cholesky_factorize(&spd(seed, n)).unwrap();
        let v = pair(seed, n).0;
        let g = rank_one_update(&f, &UpdateSpec::outer(v.clone(), v).unwrap()).unwrap();
        prop_assert_eq!(g.row_perm(), g.col_perm());
        prop_assert_eq!(g.upper(), g.lower().transpose());
    }

    #[test]
    fn integerize_scales_to_integers(rows in prop::collection::vec(prop::collection::vec((-50i64..50, 1i64..12), 3), 1..4)) {
        let q: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&(p, d)| Rational::new(p.into(), d.into()).unwrap()).collect())
            .collect();
        let (m, scale) = integerize(&q).unwrap();
        let lcm = q.iter().flatten().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
        prop_assert_eq!(&scale, &lcm);
        for (i, row) in q.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                prop_assert_eq!(&m[(i, j)] * x.denom(), x.numer() * &scale);
            }
        }
    }

    #[test]
    fn decimal_rendering_is_within_half_ulp(p in -10_000i64..10_000, q in 1i64..500, digits in 0usize..12) {
        let x = Rational::new(p.into(), q.into()).unwrap();
        let shown: Rational = x.to_decimal(digits).parse().unwrap();
        let err = BigRational::new(shown.numer().clone(), shown.denom().clone()) - BigRational::new(p.into(), q.into());
        let half_ulp = BigRational::new(BigInt::one(), BigInt::from(2) * BigInt::from(10).pow(digits as u32));
        prop_assert!(err.abs() <= half_ulp);
    }
}
