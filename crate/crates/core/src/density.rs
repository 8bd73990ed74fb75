//! Range scans of `S(q)` and `P(q)` for `2 <= q <= x` over a smallest-prime-
//! factor sieve, counting the exceptions to `S(q) = P(q)` and to
//! `q^2 < S(q)!`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact::Rational;
use crate::kempner::{prime_power_unchecked, Factorization, KempnerResult};

/// Default cap on sieve entries.
pub const DEFAULT_BUDGET: u64 = 100_000_000;
/// q-values per work unit.
pub const BLOCK_SIZE: u64 = 1 << 16;
pub const SAMPLE_CAP: usize = 100;

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("x must be >= 2, got {0}")]
    TooSmall(u64),
    #[error("sieve of {x} entries exceeds the budget of {budget}")]
    BudgetExceeded { x: u64, budget: u64 },
    #[error("worker count must be >= 1")]
    ZeroWorkers,
    #[error("failed to start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("csv export failed: {0}")]
    Csv(#[from] csv::Error),
}

impl DensityError {
    /// Whether this is a resource problem rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            DensityError::BudgetExceeded { .. } | DensityError::Pool(_) | DensityError::Csv(_)
        )
    }
}

/// `spf[q]` = least prime dividing `q`, for `2 <= q <= x`.
#[derive(Debug, Clone)]
pub struct SpfTable {
    spf: Vec<u32>,
}

pub fn sieve_smallest_prime_factor(x: u64) -> Result<SpfTable, DensityError> {
    sieve_with_budget(x, DEFAULT_BUDGET)
}

pub fn sieve_with_budget(x: u64, budget: u64) -> Result<SpfTable, DensityError> {
    if x < 2 {
        return Err(DensityError::TooSmall(x));
    }
    if x > budget || x > u32::MAX as u64 {
        return Err(DensityError::BudgetExceeded { x, budget });
    }
    let n = x as usize;
    let mut spf = vec![0u32; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if spf[i] == 0 {
            for j in (i * i..=n).step_by(i) {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
            }
        }
        i += 1;
    }
    for (k, v) in spf.iter_mut().enumerate().skip(2) {
        if *v == 0 {
            *v = k as u32;
        }
    }
    Ok(SpfTable { spf })
}

/// Factorials up to 20! (the largest fitting in u64). Anything larger
/// exceeds `q^2` for every `q < 2^32`.
const SMALL_FACTORIALS: [u128; 21] = {
    let mut t = [1u128; 21];
    let mut i = 1;
    while i < 21 {
        t[i] = t[i - 1] * i as u128;
        i += 1;
    }
    t
};

/// `q^2 >= k!`, exactly, for `q < 2^32`.
fn square_reaches_factorial(q: u64, k: u64) -> bool {
    match SMALL_FACTORIALS.get(k as usize) {
        Some(&f) => (q as u128) * (q as u128) >= f,
        None => false,
    }
}

impl SpfTable {
    pub fn limit(&self) -> u64 {
        self.spf.len() as u64 - 1
    }

    pub fn smallest_prime_factor(&self, q: u64) -> u64 {
        self.spf[q as usize] as u64
    }

    pub fn is_prime(&self, q: u64) -> bool {
        q >= 2 && self.smallest_prime_factor(q) == q
    }

    /// `(prime, exponent)` pairs of `q`, ascending, by walking the table.
    fn prime_powers(&self, mut q: u64) -> impl Iterator<Item = (u64, u32)> + '_ {
        std::iter::from_fn(move || {
            if q <= 1 {
                return None;
            }
            let p = self.smallest_prime_factor(q);
            let mut e = 0;
            while q.is_multiple_of(p) {
                q /= p;
                e += 1;
            }
            Some((p, e))
        })
    }

    pub fn factorize(&self, q: u64) -> Factorization {
        Factorization::from_pairs(self.prime_powers(q))
    }

    /// `(S(q), P(q))` without allocating.
    pub fn kempner_pair(&self, q: u64) -> (u64, u64) {
        self.prime_powers(q)
            .fold((1, 1), |(s, _), (p, e)| (s.max(prime_power_unchecked(p, e)), p))
    }

    pub fn kempner(&self, q: u64) -> KempnerResult {
        KempnerResult::from_factorization(q, self.factorize(q))
    }

    pub fn classify(&self, q: u64) -> QStatus {
        let (s, p) = self.kempner_pair(q);
        QStatus {
            q,
            s,
            p,
            s_neq_p: s != p,
            conj1_fail: square_reaches_factorial(q, s),
            conj1_p_fail: square_reaches_factorial(q, p),
        }
    }
}

/// Per-q flags, one CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QStatus {
    pub q: u64,
    #[serde(rename = "S")]
    pub s: u64,
    #[serde(rename = "P")]
    pub p: u64,
    #[serde(rename = "S_neq_P")]
    pub s_neq_p: bool,
    /// `q^2 >= S(q)!`.
    pub conj1_fail: bool,
    /// `q^2 >= P(q)!`.
    #[serde(skip)]
    pub conj1_p_fail: bool,
}

/// `KempnerResult` for every `q` in `2..=x`.
pub fn batch_kempner(x: u64) -> Result<impl Iterator<Item = KempnerResult>, DensityError> {
    let table = sieve_smallest_prime_factor(x)?;
    Ok((2..=x).map(move |q| table.kempner(q)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionSamples {
    #[serde(rename = "S_neq_P")]
    pub s_neq_p: Vec<u64>,
    pub conjecture1_fail: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub x: u64,
    #[serde(rename = "count_S_neq_P")]
    pub count_s_neq_p: u64,
    /// `q` with `q^2 >= S(q)!`.
    pub count_conjecture1_fail: u64,
    /// `q` with `q^2 >= P(q)!`.
    #[serde(rename = "count_conjecture1_P_fail")]
    pub count_conjecture1_p_fail: u64,
    #[serde(rename = "ratio_S_neq_P")]
    pub ratio_s_neq_p: String,
    pub ratio_conjecture1_fail: String,
    #[serde(rename = "ratio_conjecture1_P_fail")]
    pub ratio_conjecture1_p_fail: String,
    pub exceptions_sample: ExceptionSamples,
}

const RATIO_DIGITS: usize = 12;

impl DensityReport {
    pub fn s_neq_p_ratio(&self) -> Rational {
        Rational::new(self.count_s_neq_p, self.x).expect("x >= 2")
    }

    pub fn conjecture1_ratio(&self) -> Rational {
        Rational::new(self.count_conjecture1_fail, self.x).expect("x >= 2")
    }
}

#[derive(Debug, Default)]
struct BlockCounts {
    s_neq_p: u64,
    conj1: u64,
    conj1_p: u64,
    sample_s_neq_p: Vec<u64>,
    sample_conj1: Vec<u64>,
}

fn count_block(table: &SpfTable, lo: u64, hi: u64) -> BlockCounts {
    let mut c = BlockCounts::default();
    for q in lo..=hi {
        let st = table.classify(q);
        if st.s_neq_p {
            c.s_neq_p += 1;
            if c.sample_s_neq_p.len() < SAMPLE_CAP {
                c.sample_s_neq_p.push(q);
            }
        }
        if st.conj1_fail {
            c.conj1 += 1;
            if c.sample_conj1.len() < SAMPLE_CAP {
                c.sample_conj1.push(q);
            }
        }
        c.conj1_p += st.conj1_p_fail as u64;
    }
    c
}

/// Counts over `2..=x` using `workers` threads. The result does not depend
/// on `workers`: blocks are merged in index order.
pub fn density_report(x: u64, workers: usize) -> Result<DensityReport, DensityError> {
    let table = sieve_smallest_prime_factor(x)?;
    density_report_with_table(&table, x, workers)
}

pub fn density_report_with_table(
    table: &SpfTable,
    x: u64,
    workers: usize,
) -> Result<DensityReport, DensityError> {
    if x < 2 {
        return Err(DensityError::TooSmall(x));
    }
    assert!(x <= table.limit(), "sieve too small for x");
    if workers == 0 {
        return Err(DensityError::ZeroWorkers);
    }
    let blocks: Vec<(u64, u64)> = (0..)
        .map(|i| (2 + i * BLOCK_SIZE, (1 + (i + 1) * BLOCK_SIZE).min(x)))
        .take_while(|&(lo, _)| lo <= x)
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let parts: Vec<BlockCounts> = pool.install(|| {
        blocks
            .par_iter()
            .map(|&(lo, hi)| count_block(table, lo, hi))
            .collect()
    });
    let mut total = BlockCounts::default();
    for part in parts {
        total.s_neq_p += part.s_neq_p;
        total.conj1 += part.conj1;
        total.conj1_p += part.conj1_p;
        total.sample_s_neq_p.extend(part.sample_s_neq_p);
        total.sample_conj1.extend(part.sample_conj1);
    }
    total.sample_s_neq_p.truncate(SAMPLE_CAP);
    total.sample_conj1.truncate(SAMPLE_CAP);
    let ratio = |c: u64| {
        Rational::new(c, x)
            .expect("x >= 2")
            .truncated_decimal(RATIO_DIGITS)
    };
    Ok(DensityReport {
        x,
        count_s_neq_p: total.s_neq_p,
        count_conjecture1_fail: total.conj1,
        count_conjecture1_p_fail: total.conj1_p,
        ratio_s_neq_p: ratio(total.s_neq_p),
        ratio_conjecture1_fail: ratio(total.conj1),
        ratio_conjecture1_p_fail: ratio(total.conj1_p),
        exceptions_sample: ExceptionSamples {
            s_neq_p: total.sample_s_neq_p,
            conjecture1_fail: total.sample_conj1,
        },
    })
}

/// Writes every offending `q <= x` as CSV: `q,S,P,S_neq_P,conj1_fail`.
pub fn write_exceptions_csv<W: Write>(
    table: &SpfTable,
    x: u64,
    out: W,
) -> Result<u64, DensityError> {
    let mut w = csv::Writer::from_writer(out);
    let mut rows = 0;
    for q in 2..=x {
        let st = table.classify(q);
        if st.s_neq_p || st.conj1_fail {
            w.serialize(st)?;
            rows += 1;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(rows)
}
