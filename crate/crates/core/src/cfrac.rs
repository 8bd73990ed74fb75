//! Convergents of the simple continued fraction of e, and which partial sums
//! `s_n = sum_{k<=n} 1/k!` are among them.
//!
//! The partial quotients `[2; 1, 2, 1, 1, 4, 1, 1, 6, ...]` come from the
//! well-known pattern, but the pattern is not trusted: tables used by the
//! scans are checked against the interval enclosure of e before use.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::enclosure::{self, EnclosureError};
use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfracError {
    #[error("count must be >= 1")]
    ZeroCount,
    #[error("max_n must be >= {min}, got {max_n}")]
    RangeTooSmall { max_n: u64, min: u64 },
    #[error("convergent {index} fails |e - p/q| < 1/q^2")]
    InvalidConvergent { index: usize },
    #[error(transparent)]
    Enclosure(#[from] EnclosureError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuedFraction {
    pub partial_quotients: Vec<u64>,
}

/// The `i`-th partial quotient of e: `2`, then `1, 2k, 1` for `k = 1, 2, ...`.
pub fn e_partial_quotient(i: usize) -> u64 {
    match i {
        0 => 2,
        _ if i % 3 == 2 => 2 * (i as u64 + 1) / 3,
        _ => 1,
    }
}

pub fn e_partial_quotients(count: usize) -> Result<ContinuedFraction, CfracError> {
    if count == 0 {
        return Err(CfracError::ZeroCount);
    }
    Ok(ContinuedFraction {
        partial_quotients: (0..count).map(e_partial_quotient).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub index: usize,
    pub value: Rational,
}

/// Iterator over the convergents `p_k/q_k` of e via
/// `p_k = a_k p_{k-1} + p_{k-2}`, `q_k = a_k q_{k-1} + q_{k-2}`.
#[derive(Debug, Clone)]
pub struct Convergents {
    index: usize,
    p: (BigUint, BigUint),
    q: (BigUint, BigUint),
}

impl Default for Convergents {
    fn default() -> Self {
        // (p_{-2}, p_{-1}) = (0, 1), (q_{-2}, q_{-1}) = (1, 0)
        Convergents {
            index: 0,
            p: (BigUint::zero(), BigUint::one()),
            q: (BigUint::one(), BigUint::zero()),
        }
    }
}

impl Convergents {
    /// Next `(index, p_k, q_k)` without building a reduced `Rational`.
    fn next_raw(&mut self) -> (usize, BigUint, BigUint) {
        let a = e_partial_quotient(self.index);
        let p = &self.p.1 * a + &self.p.0;
        let q = &self.q.1 * a + &self.q.0;
        self.p = (std::mem::replace(&mut self.p.1, p.clone()), p.clone());
        self.q = (std::mem::replace(&mut self.q.1, q.clone()), q.clone());
        let index = self.index;
        self.index += 1;
        (index, p, q)
    }
}

impl Iterator for Convergents {
    type Item = Convergent;

    fn next(&mut self) -> Option<Convergent> {
        let (index, p, q) = self.next_raw();
        // gcd(p_k, q_k) = 1 already, so this does no real reduction.
        Some(Convergent {
            index,
            value: Rational::from_parts(BigInt::from(p), q),
        })
    }
}

pub fn convergents(count: usize) -> Result<Vec<Convergent>, CfracError> {
    if count == 0 {
        return Err(CfracError::ZeroCount);
    }
    Ok(Convergents::default().take(count).collect())
}

/// Convergents of e up to the first one whose denominator exceeds a bound,
/// each checked against the enclosure of e.
#[derive(Debug, Clone)]
pub struct ConvergentTable {
    entries: Vec<(BigUint, BigUint)>,
}

impl ConvergentTable {
    /// Generates convergents until `q_k > max_den` and validates all of them.
    pub fn up_to_denominator(max_den: &BigUint) -> Result<Self, CfracError> {
        let mut gen = Convergents::default();
        let mut entries = Vec::new();
        loop {
            let (_, p, q) = gen.next_raw();
            let done = &q > max_den;
            entries.push((p, q));
            if done {
                break;
            }
        }
        let table = ConvergentTable { entries };
        table.validate()?;
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<Convergent> {
        self.entries.get(index).map(|(p, q)| Convergent {
            index,
            value: Rational::from_parts(BigInt::from(p.clone()), q.clone()),
        })
    }

    /// Checks `|e - p_k/q_k| < 1/q_k^2` for every entry.
    ///
    /// One enclosure `I_n` with `n! > q_max^3` decides all of them at once in
    /// integer arithmetic; anything it leaves open goes through the general
    /// refinement.
    fn validate(&self) -> Result<(), CfracError> {
        let q_max = match self.entries.last() {
            Some((_, q)) => q.clone(),
            None => return Ok(()),
        };
        let target = q_max.pow(3u32);
        let mut n = 1u64;
        let mut scale = BigUint::one();
        while scale <= target {
            n += 1;
            scale *= n;
        }
        let depth = n.max(2);
        let (left, scale) = enclosure::scaled_interval(depth)?;
        let right = &left + 1u32;
        for (index, (p, q)) in self.entries.iter().enumerate() {
            // |A q - p F| / (q F) for both endpoints A/F; the larger must be
            // at most 1/q^2, i.e. (max gap) * q <= F.
            let pf = p * &scale;
            let gap = |a: &BigUint| {
                let aq = a * q;
                if aq > pf {
                    aq - &pf
                } else {
                    &pf - aq
                }
            };
            let worst = std::cmp::max(gap(&left), gap(&right));
            if worst * q <= scale {
                continue;
            }
            let value = Rational::from_parts(BigInt::from(p.clone()), q.clone());
            let bound = Rational::from_parts(1, q * q);
            let cap = 4 * depth + 64;
            if enclosure::compare_distance_to_e_with_cap(&value, &bound, cap)? != Ordering::Less {
                return Err(CfracError::InvalidConvergent { index });
            }
        }
        Ok(())
    }

    /// Whether `r` equals one of the tabled convergents. Only meaningful
    /// when the table reaches past `r`'s denominator.
    pub fn contains(&self, r: &Rational) -> bool {
        let den = r.denom();
        let num = match r.numer().to_biguint() {
            Some(n) => n,
            None => return false,
        };
        // Denominators are 1, 1, 3, 4, 7, ...: strictly increasing after the
        // first two, so a linear scan from the front stops early.
        for (p, q) in &self.entries {
            match q.cmp(&den) {
                Ordering::Less => continue,
                Ordering::Equal if p == &num => return true,
                Ordering::Equal => continue,
                Ordering::Greater => break,
            }
        }
        false
    }

    fn max_denominator(&self) -> Option<&BigUint> {
        self.entries.last().map(|(_, q)| q)
    }
}

/// Whether `r` is a convergent of e.
pub fn is_convergent(r: &Rational) -> Result<bool, CfracError> {
    Ok(ConvergentTable::up_to_denominator(&r.denom())?.contains(r))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialSumRecord {
    pub n: u64,
    pub s_n: Rational,
    /// Denominator of `s_n` in lowest terms.
    #[serde(with = "crate::exact::json")]
    pub q_n: BigUint,
    /// `n!/q_n`.
    #[serde(with = "crate::exact::json")]
    pub cofactor: BigUint,
    pub full_factorial: bool,
}

impl PartialSumRecord {
    fn from_numerator(n: u64, numerator: BigUint, scale: BigUint) -> Self {
        let g = numerator.gcd(&scale);
        let q_n = &scale / &g;
        let s_n = Rational::from_parts(BigInt::from(numerator / &g), q_n.clone());
        PartialSumRecord {
            n,
            s_n,
            cofactor: g.clone(),
            full_factorial: g.is_one(),
            q_n,
        }
    }
}

/// Numerators `a_n` with `s_n = a_n/n!`, for `n = 0..=max_n`, paired with `n!`.
fn scaled_partial_sums(max_n: u64) -> Vec<(u64, BigUint, BigUint)> {
    let mut out = Vec::with_capacity(max_n as usize + 1);
    let mut a = BigUint::one();
    let mut f = BigUint::one();
    out.push((0, a.clone(), f.clone()));
    for n in 1..=max_n {
        a = a * n + 1u32;
        f *= n;
        out.push((n, a.clone(), f.clone()));
    }
    out
}

pub fn partial_sum_record(n: u64) -> PartialSumRecord {
    let (_, a, f) = scaled_partial_sums(n).pop().expect("non-empty");
    PartialSumRecord::from_numerator(n, a, f)
}

/// Records for `n = 0..=max_n`, reduced in parallel.
pub fn partial_sum_records(max_n: u64) -> Vec<PartialSumRecord> {
    scaled_partial_sums(max_n)
        .into_par_iter()
        .map(|(n, a, f)| PartialSumRecord::from_numerator(n, a, f))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Corollary3Entry {
    pub n: u64,
    pub violated: bool,
}

/// For each `3 <= n <= max_n` with `q_n = n!`, whether `s_n` is a convergent
/// (it never should be).
pub fn corollary3_scan(max_n: u64) -> Result<Vec<Corollary3Entry>, CfracError> {
    if max_n < 3 {
        return Err(CfracError::RangeTooSmall { max_n, min: 3 });
    }
    let records: Vec<PartialSumRecord> = partial_sum_records(max_n)
        .into_iter()
        .filter(|r| r.n >= 3 && r.full_factorial)
        .collect();
    let table = table_for(&records)?;
    Ok(records
        .par_iter()
        .map(|r| Corollary3Entry {
            n: r.n,
            violated: table.contains(&r.s_n),
        })
        .collect())
}

/// Every `n <= max_n` for which `s_n` is a convergent of e.
pub fn conjecture2_scan(max_n: u64) -> Result<Vec<u64>, CfracError> {
    let records = partial_sum_records(max_n);
    let table = table_for(&records)?;
    Ok(records
        .par_iter()
        .filter(|r| table.contains(&r.s_n))
        .map(|r| r.n)
        .collect())
}

/// Same scan, also returning the full records and per-`n` convergent flags.
pub fn partial_sums_with_flags(
    max_n: u64,
) -> Result<Vec<(PartialSumRecord, bool)>, CfracError> {
    let records = partial_sum_records(max_n);
    let table = table_for(&records)?;
    Ok(records
        .into_par_iter()
        .map(|r| {
            let hit = table.contains(&r.s_n);
            (r, hit)
        })
        .collect())
}

fn table_for(records: &[PartialSumRecord]) -> Result<ConvergentTable, CfracError> {
    let max_den = records
        .iter()
        .map(|r| &r.q_n)
        .max()
        .cloned()
        .unwrap_or_else(BigUint::one);
    let table = ConvergentTable::up_to_denominator(&max_den)?;
    debug_assert!(table.max_denominator().is_some_and(|q| q > &max_den));
    Ok(table)
}
