//! Seeded instance generators and the timing/correctness experiments.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagnostics::bit_length_bound;
use crate::error::{Error, Result};
use crate::exec::{map_items, Execution};
use crate::factorization::{factorize_with_perms, ref_lu_factorize_with, REFFactorization};
use crate::matrix::{IntMatrix, IntVector};
use crate::ops::OpCounts;
use crate::rank_one_update::{
    apply_rank_one, column_replace_with_stats, rank_one_update_with_stats, UpdateSpec, UpdateStats,
};

/// Named in every report header.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha), one stream per (seed, n, trial) via SplitMix64";

/// Default half-width of the entry range `[-100, 100] \ {0}`.
pub const ENTRY_RANGE: i64 = 100;

const PRIME: u64 = (1 << 61) - 1;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent seed for one trial.
pub fn trial_seed(seed: u64, n: usize, trial: usize) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ n as u64) ^ trial as u64)
}

fn nonzero(rng: &mut ChaCha8Rng, range: i64) -> BigInt {
    let x = rng.gen_range(1..=2 * range);
    BigInt::from(if x <= range { x - range - 1 } else { x - range })
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, range: i64) -> IntMatrix {
    let rows = (0..n).map(|_| (0..n).map(|_| nonzero(rng, range)).collect()).collect();
    IntMatrix::from_rows(rows).expect("square by construction")
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, range: i64) -> IntVector {
    (0..n).map(|_| nonzero(rng, range)).collect::<Vec<_>>().into()
}

/// Nonsingularity via the determinant modulo a Mersenne prime. A zero residue
/// may be a false alarm, which only costs a redraw.
pub fn is_nonsingular(a: &IntMatrix) -> bool {
    let n = a.n_rows();
    let p = BigInt::from(PRIME);
    let mut m: Vec<u64> = a.iter().map(|x| x.mod_floor(&p).to_u64().unwrap()).collect();
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % PRIME as u128) as u64;
    let inv = |x: u64| {
        let (mut b, mut e, mut r) = (x, PRIME - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| m[i * n + k] != 0) else {
            return false;
        };
        for j in 0..n {
            m.swap(k * n + j, piv * n + j);
        }
        let ik = inv(m[k * n + k]);
        for i in k + 1..n {
            let f = mul(m[i * n + k], ik);
            if f == 0 {
                continue;
            }
            for j in k..n {
                let t = mul(f, m[k * n + j]);
                m[i * n + j] = (m[i * n + j] + PRIME - t) % PRIME;
            }
        }
    }
    true
}

/// Dense instance with `A` and `A + v w^T` both nonsingular.
#[derive(Clone, Debug)]
pub struct Instance {
    pub a: IntMatrix,
    pub v: IntVector,
    pub w: IntVector,
}

/// Instance whose `v` copies rows `1..=r` of column `c` of `A` (1-based).
#[derive(Clone, Debug)]
pub struct Sc2Instance {
    pub a: IntMatrix,
    pub v: IntVector,
    pub w: IntVector,
    pub r: usize,
    pub c: usize,
}

fn accept(a: &IntMatrix, v: &IntVector, w: &IntVector) -> bool {
    is_nonsingular(a) && is_nonsingular(&apply_rank_one(a, &UpdateSpec::outer(v.clone(), w.clone()).unwrap()).unwrap())
}

pub fn gen_random_instance(n: usize, seed: u64) -> Instance {
    gen_random_instance_in(n, seed, ENTRY_RANGE)
}

pub fn gen_random_instance_in(n: usize, seed: u64, range: i64) -> Instance {
    for attempt in 0.. {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed.wrapping_add(attempt)));
        let a = random_matrix(&mut rng, n, range);
        let v = random_vector(&mut rng, n, range);
        let w = random_vector(&mut rng, n, range);
        if accept(&a, &v, &w) {
            return Instance { a, v, w };
        }
    }
    unreachable!()
}

pub fn gen_sc2_instance(n: usize, seed: u64) -> Sc2Instance {
    for attempt in 0.. {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed.wrapping_add(attempt) ^ 0x5c2));
        let a = random_matrix(&mut rng, n, ENTRY_RANGE);
        let c = rng.gen_range(1..=n);
        let r = rng.gen_range(c..=n);
        let mut v = random_vector(&mut rng, n, ENTRY_RANGE);
        for i in 0..r {
            v[i] = a[(i, c - 1)].clone();
        }
        let w = random_vector(&mut rng, n, ENTRY_RANGE);
        if accept(&a, &v, &w) {
            return Sc2Instance { a, v, w, r, c };
        }
    }
    unreachable!()
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub experiment: u8,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub entry_range: i64,
    /// Trials run concurrently in `Parallel` mode; use `Sequential` for clean timings.
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(experiment: u8, sizes: Vec<usize>, trials: usize, seed: u64) -> Self {
        ExperimentConfig { experiment, sizes, trials, seed, entry_range: ENTRY_RANGE, execution: Execution::Sequential }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.experiment) {
            return Err(Error::OutOfRange(format!("experiment {}", self.experiment)));
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 2) {
            return Err(Error::OutOfRange("sizes must be >= 2".into()));
        }
        if self.trials == 0 || self.entry_range < 1 {
            return Err(Error::OutOfRange("trials and entry range must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub experiment: u8,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub refactor_time: f64,
    pub rou_time: f64,
    pub sc2_calls: u64,
    pub direct_fallbacks: u64,
    pub theta_v: usize,
    pub theta_w: usize,
    pub op_counts: OpCounts,
    pub max_bit_length: u64,
    pub bit_bound_log2: u64,
    pub oracle_pass: bool,
    /// Copied-prefix parameters of experiment 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
}

/// The updated factorization must equal a fresh factorization of `A_hat`
/// taken with the same row and column order.
pub fn oracle_check(updated: &REFFactorization, fresh: &REFFactorization) -> Result<()> {
    let same_order = updated.row_perm() == fresh.row_perm() && updated.col_perm() == fresh.col_perm();
    let reference;
    let fresh = if same_order {
        fresh
    } else {
        reference =
            factorize_with_perms(fresh.original(), updated.row_perm(), updated.col_perm(), Execution::Sequential)?;
        &reference
    };
    if updated.merged() == fresh.merged() && updated.pivots() == fresh.pivots() {
        Ok(())
    } else {
        Err(Error::OracleMismatch("updated factorization differs from refactorization".into()))
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed().as_secs_f64())
}

type Updater = Box<dyn Fn(&REFFactorization) -> Result<(REFFactorization, UpdateStats)>>;

fn run_trial(cfg: &ExperimentConfig, n: usize, trial: usize) -> Result<TrialReport> {
    let seed = trial_seed(cfg.seed, n, trial);
    let (a, rc, update): (IntMatrix, Option<(usize, usize)>, Updater) = match cfg.experiment {
        1 => {
            let inst = gen_random_instance_in(n, seed, cfg.entry_range);
            let spec = UpdateSpec::outer(inst.v, inst.w)?;
            (inst.a, None, Box::new(move |f| rank_one_update_with_stats(f, &spec)))
        }
        2 => {
            let inst = gen_sc2_instance(n, seed);
            let spec = UpdateSpec::outer(inst.v, inst.w)?;
            (inst.a, Some((inst.r, inst.c)), Box::new(move |f| rank_one_update_with_stats(f, &spec)))
        }
        _ => {
            let inst = gen_random_instance_in(n, seed, cfg.entry_range);
            let col = inst.v.to_vec();
            (inst.a, None, Box::new(move |f| column_replace_with_stats(f, 0, &col)))
        }
    };
    let (f, _) = ref_lu_factorize_with(&a, Execution::Sequential)?;
    let (updated, rou_time) = timed(|| update(&f));
    let (g, stats) = updated?;
    let a_hat = g.original().clone();
    let (fresh, refactor_time) = timed(|| ref_lu_factorize_with(&a_hat, Execution::Sequential));
    let (fresh, _) = fresh?;
    oracle_check(&g, &fresh)?;
    Ok(TrialReport {
        experiment: cfg.experiment,
        n,
        trial,
        seed,
        refactor_time,
        rou_time,
        sc2_calls: stats.sc2_calls,
        direct_fallbacks: stats.direct_fallbacks,
        theta_v: stats.theta_v,
        theta_w: stats.theta_w,
        op_counts: stats.ops,
        max_bit_length: g.merged().max_bits(),
        bit_bound_log2: bit_length_bound(n, &a_hat.max_abs(), f64::log2),
        oracle_pass: true,
        r: rc.map(|x| x.0),
        c: rc.map(|x| x.1),
    })
}

/// Run every `(n, trial)` pair. Reports come back ordered by `(n, trial)`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialReport>> {
    cfg.validate()?;
    let items: Vec<(usize, usize)> = cfg.sizes.iter().flat_map(|&n| (0..cfg.trials).map(move |t| (n, t))).collect();
    map_items(cfg.execution, items, |(n, t)| run_trial(cfg, n, t)).into_iter().collect()
}

/// One JSON object per line.
pub fn to_json_lines(reports: &[TrialReport]) -> String {
    reports.iter().map(|r| serde_json::to_string(r).expect("plain data") + "\n").collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SummaryRow {
    pub experiment: u8,
    pub n: usize,
    pub trials: usize,
    pub mean_refactor: f64,
    pub sd_refactor: f64,
    pub mean_rou: f64,
    pub sd_rou: f64,
    pub ratio: f64,
    pub mean_sc2_calls: f64,
    pub max_bit_length: u64,
    pub all_pass: bool,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let var =
        if xs.len() > 1 { xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64 } else { 0.0 };
    (m, var.sqrt())
}

pub fn summarize(reports: &[TrialReport]) -> Vec<SummaryRow> {
    let mut keys: Vec<(u8, usize)> = reports.iter().map(|r| (r.experiment, r.n)).collect();
    keys.dedup();
    keys.into_iter()
        .map(|(e, n)| {
            let group: Vec<&TrialReport> = reports.iter().filter(|r| r.experiment == e && r.n == n).collect();
            let (mean_refactor, sd_refactor) = mean_sd(&group.iter().map(|r| r.refactor_time).collect::<Vec<_>>());
            let (mean_rou, sd_rou) = mean_sd(&group.iter().map(|r| r.rou_time).collect::<Vec<_>>());
            SummaryRow {
                experiment: e,
                n,
                trials: group.len(),
                mean_refactor,
                sd_refactor,
                mean_rou,
                sd_rou,
                ratio: if mean_rou > 0.0 { mean_refactor / mean_rou } else { f64::INFINITY },
                mean_sc2_calls: group.iter().map(|r| r.sc2_calls as f64).sum::<f64>() / group.len() as f64,
                max_bit_length: group.iter().map(|r| r.max_bit_length).max().unwrap_or(0),
                all_pass: group.iter().all(|r| r.oracle_pass),
            }
        })
        .collect()
}

pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut s = format!("# RNG: {RNG_NAME}\n");
    s += &format!(
        "{:>4} {:>6} {:>6} {:>12} {:>10} {:>12} {:>10} {:>8} {:>8} {:>8} {:>5}\n",
        "exp", "n", "trials", "refactor(s)", "sd", "update(s)", "sd", "ratio", "sc2", "bits", "ok"
    );
    for r in rows {
        s += &format!(
            "{:>4} {:>6} {:>6} {:>12.6} {:>10.6} {:>12.6} {:>10.6} {:>8.2} {:>8.2} {:>8} {:>5}\n",
            r.experiment,
            r.n,
            r.trials,
            r.mean_refactor,
            r.sd_refactor,
            r.mean_rou,
            r.sd_rou,
            r.ratio,
            r.mean_sc2_calls,
            r.max_bit_length,
            r.all_pass
        );
    }
    s
}
