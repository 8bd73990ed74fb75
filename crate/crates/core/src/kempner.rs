//! The Kempner function `S(q) = min { k > 0 : q | k! }`, the largest prime
//! factor `P(q)`, and the rewrite of `p/q` over the factorial `S(q)!`.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::factorial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KempnerError {
    #[error("q must be at least {min}, got {q}")]
    TooSmall { q: u64, min: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("{d} does not divide {n}!")]
    NotFactorialDivisor { n: u64, d: u64 },
}

const TABLE_LIMIT: u64 = 1 << 16;

/// Primes below 2^16, enough to trial-divide anything below 2^32 completely.
pub fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = TABLE_LIMIT as usize;
        let mut composite = vec![false; limit];
        let mut primes = Vec::new();
        for i in 2..limit {
            if !composite[i] {
                primes.push(i as u64);
                for j in (i * i..limit).step_by(i) {
                    composite[j] = true;
                }
            }
        }
        primes
    })
}

/// Candidate divisors for trial division: the prime table, then every odd
/// number past it.
fn trial_divisors() -> impl Iterator<Item = u64> {
    small_primes()
        .iter()
        .copied()
        .chain((TABLE_LIMIT + 1..).step_by(2))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for d in trial_divisors() {
        if d.saturating_mul(d) > n {
            return true;
        }
        if n.is_multiple_of(d) {
            return n == d;
        }
    }
    unreachable!()
}

/// Prime factorization as `(prime, exponent)` pairs with strictly
/// increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Builds a factorization from pairs; primes are merged and sorted,
    /// zero exponents dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u32)>) -> Self {
        let mut factors: Vec<(u64, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        factors.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some((lp, le)) if *lp == p => *le += e,
                _ => merged.push((p, e)),
            }
        }
        Factorization { factors: merged }
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// The integer this factorization describes.
    pub fn value(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e))
    }

    /// Factorization of `n!` by Legendre's formula.
    pub fn of_factorial(n: u64) -> Self {
        let mut factors = Vec::new();
        for p in 2..=n {
            if is_prime(p) {
                factors.push((p, legendre_unchecked(p, n) as u32));
            }
        }
        Factorization { factors }
    }

    /// Factorization of `n!/d` for a divisor `d` of `n!`.
    pub fn of_factorial_quotient(n: u64, d: u64) -> Result<Self, KempnerError> {
        let mut whole = Self::of_factorial(n);
        if d == 0 {
            return Err(KempnerError::NotFactorialDivisor { n, d });
        }
        if d == 1 {
            return Ok(whole);
        }
        for &(p, e) in factorize(d)?.factors() {
            match whole.factors.binary_search_by_key(&p, |&(q, _)| q) {
                Ok(i) if whole.factors[i].1 >= e => whole.factors[i].1 -= e,
                _ => return Err(KempnerError::NotFactorialDivisor { n, d }),
            }
        }
        whole.factors.retain(|&(_, e)| e > 0);
        Ok(whole)
    }
}

/// Complete prime factorization of `q >= 2` by trial division.
pub fn factorize(q: u64) -> Result<Factorization, KempnerError> {
    if q < 2 {
        return Err(KempnerError::TooSmall { q, min: 2 });
    }
    let mut rest = q;
    let mut factors = Vec::new();
    for d in trial_divisors() {
        if d.saturating_mul(d) > rest {
            break;
        }
        let mut e = 0;
        while rest.is_multiple_of(d) {
            rest /= d;
            e += 1;
        }
        if e > 0 {
            factors.push((d, e));
        }
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { factors })
}

fn legendre_unchecked(p: u64, k: u64) -> u64 {
    let mut total = 0;
    let mut n = k;
    while n > 0 {
        n /= p;
        total += n;
    }
    total
}

/// Exponent of the prime `p` in `k!`, `sum floor(k / p^i)`.
pub fn legendre_valuation(p: u64, k: u64) -> Result<u64, KempnerError> {
    if !is_prime(p) {
        return Err(KempnerError::NotPrime(p));
    }
    Ok(legendre_unchecked(p, k))
}

/// Smallest `k` with `p^a | k!`.
pub fn kempner_prime_power(p: u64, a: u32) -> Result<u64, KempnerError> {
    if !is_prime(p) {
        return Err(KempnerError::NotPrime(p));
    }
    if a == 0 {
        return Err(KempnerError::ZeroExponent);
    }
    Ok(prime_power_unchecked(p, a))
}

pub(crate) fn prime_power_unchecked(p: u64, a: u32) -> u64 {
    // Only multiples of p raise the valuation; walk them and add each one's
    // own p-adic valuation. Terminates by k = a*p.
    let a = a as u64;
    let mut k = 0;
    let mut v = 0;
    while v < a {
        k += p;
        let mut m = k;
        while m % p == 0 {
            m /= p;
            v += 1;
        }
    }
    k
}

/// `S(q)` from a known factorization; the empty factorization (q = 1) gives 1.
pub fn kempner_s_of(f: &Factorization) -> u64 {
    f.factors()
        .iter()
        .map(|&(p, e)| prime_power_unchecked(p, e))
        .max()
        .unwrap_or(1)
}

/// The Kempner function `S(q)`, with `S(1) = 1`.
pub fn kempner_s(q: u64) -> Result<u64, KempnerError> {
    match q {
        0 => Err(KempnerError::TooSmall { q, min: 1 }),
        1 => Ok(1),
        _ => Ok(kempner_s_of(&factorize(q)?)),
    }
}

/// `S(q)` straight from the definition: multiply `k!` up modulo `q` until it
/// vanishes. Meant as an oracle for small `q`.
pub fn kempner_s_naive(q: u64) -> Result<u64, KempnerError> {
    if q == 0 {
        return Err(KempnerError::TooSmall { q, min: 1 });
    }
    let q128 = q as u128;
    let mut running = 1 % q128;
    let mut k = 0u64;
    loop {
        k += 1;
        running = running * (k as u128) % q128;
        if running == 0 {
            return Ok(k);
        }
    }
}

/// Largest prime factor `P(q)`.
pub fn largest_prime_factor(q: u64) -> Result<u64, KempnerError> {
    Ok(factorize(q)?
        .largest_prime()
        .expect("q >= 2 has a prime factor"))
}

/// `S(q)`, `P(q)` and the factorization they were read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KempnerResult {
    pub q: u64,
    #[serde(rename = "S")]
    pub s: u64,
    #[serde(rename = "P")]
    pub p: u64,
    pub factorization: Factorization,
}

impl KempnerResult {
    pub fn from_factorization(q: u64, factorization: Factorization) -> Self {
        KempnerResult {
            q,
            s: kempner_s_of(&factorization),
            p: factorization.largest_prime().unwrap_or(1),
            factorization,
        }
    }
}

pub fn kempner(q: u64) -> Result<KempnerResult, KempnerError> {
    Ok(KempnerResult::from_factorization(q, factorize(q)?))
}

/// Rewrites `p/q` as `m/n!` with `n = S(q)` and `m = p * S(q)!/q`.
pub fn rewrite_over_factorial(p: &BigInt, q: u64) -> Result<(BigInt, u64), KempnerError> {
    if q < 2 {
        return Err(KempnerError::TooSmall { q, min: 2 });
    }
    let n = kempner_s(q)?;
    let cofactor = factorial(n) / BigUint::from(q);
    Ok((p * BigInt::from(cofactor), n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rational;
    use num_traits::Zero;
    use proptest::prelude::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(24).unwrap().factors(), &[(2, 3), (3, 1)]);
        assert_eq!(factorize(6).unwrap().factors(), &[(2, 1), (3, 1)]);
        assert_eq!(factorize(4000).unwrap().factors(), &[(2, 5), (5, 3)]);
        assert_eq!(factorize(97).unwrap().factors(), &[(97, 1)]);
        assert_eq!(factorize(1), Err(KempnerError::TooSmall { q: 1, min: 2 }));
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_beyond_prime_table() {
        // 65537 and 65539 are both prime and past the table
        let q = 65537u64 * 65539;
        assert_eq!(factorize(q).unwrap().factors(), &[(65537, 1), (65539, 1)]);
        assert!(is_prime(65537));
        let big = factorial(19) / BigUint::from(4000u32);
        let q19: u64 = big.clone().try_into().unwrap();
        let f = factorize(q19).unwrap();
        assert_eq!(f.value(), big);
        assert_eq!(f, Factorization::of_factorial_quotient(19, 4000).unwrap());
    }

    /// Trial division oracle: product of exponents matches and primes are prime.
    #[test]
    fn factorization_invariants_small_range() {
        for q in 2..5000u64 {
            let f = factorize(q).unwrap();
            assert_eq!(f.value(), BigUint::from(q));
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.factors().iter().all(|&(p, e)| e >= 1 && is_prime(p)));
        }
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_valuation(2, 4).unwrap(), 3);
        assert_eq!(legendre_valuation(5, 4).unwrap(), 0);
        assert_eq!(legendre_valuation(3, 6).unwrap(), 2);
        assert_eq!(legendre_valuation(4, 6), Err(KempnerError::NotPrime(4)));
        assert_eq!(legendre_valuation(1, 6), Err(KempnerError::NotPrime(1)));
    }

    #[test]
    fn legendre_matches_direct_count() {
        for &p in &[2u64, 3, 5, 7, 11] {
            for k in 0..200u64 {
                let direct: u64 = (1..=k)
                    .map(|mut m| {
                        let mut c = 0;
                        while m % p == 0 {
                            m /= p;
                            c += 1;
                        }
                        c
                    })
                    .sum();
                assert_eq!(legendre_valuation(p, k).unwrap(), direct, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn prime_power_examples() {
        for p in [2u64, 3, 5, 97] {
            assert_eq!(kempner_prime_power(p, 1).unwrap(), p);
        }
        assert_eq!(kempner_prime_power(2, 3).unwrap(), 4);
        assert_eq!(kempner_prime_power(3, 2).unwrap(), 6);
        assert_eq!(kempner_prime_power(2, 0), Err(KempnerError::ZeroExponent));
        assert_eq!(kempner_prime_power(9, 2), Err(KempnerError::NotPrime(9)));
        for p in [2u64, 3, 5, 7] {
            for a in 1..40u32 {
                let k = kempner_prime_power(p, a).unwrap();
                assert!(k <= a as u64 * p);
                assert!(legendre_valuation(p, k).unwrap() >= a as u64);
                assert!(legendre_valuation(p, k - 1).unwrap() < a as u64);
            }
        }
    }

    #[test]
    fn kempner_examples() {
        assert_eq!(kempner_s(6).unwrap(), 3);
        for q in 1..=5 {
            assert_eq!(kempner_s(q).unwrap(), q);
        }
        assert_eq!(kempner_s(24).unwrap(), 4);
        assert_eq!(kempner_s(16).unwrap(), 6);
        assert_eq!(kempner_s_naive(16).unwrap(), 6);
        assert_eq!(kempner_s_naive(1).unwrap(), 1);
        assert_eq!(kempner_s_naive(6).unwrap(), 3);
        assert_eq!(kempner_s_naive(120).unwrap(), 5);
        assert!(kempner_s(0).is_err());
    }

    #[test]
    fn kempner_matches_naive_to_ten_thousand() {
        for q in 1..=10_000u64 {
            assert_eq!(kempner_s(q).unwrap(), kempner_s_naive(q).unwrap(), "q={q}");
        }
    }

    #[test]
    fn divisibility_pair_and_bounds() {
        for q in 2..=1500u64 {
            let r = kempner(q).unwrap();
            let bq = BigUint::from(q);
            assert!((factorial(r.s) % &bq).is_zero());
            assert!(!(factorial(r.s - 1) % &bq).is_zero());
            assert!(r.s >= r.p);
            assert!(r.s <= q);
            assert_eq!(r.s == r.p, is_prime(r.s), "q={q}");
        }
    }

    #[test]
    fn kempner_of_factorial() {
        for n in 2..=12u64 {
            let q: u64 = factorial(n).try_into().unwrap();
            assert_eq!(kempner_s(q).unwrap(), n);
            assert_eq!(kempner_s_of(&Factorization::of_factorial(n)), n);
        }
        for n in 13..=60u64 {
            assert_eq!(kempner_s_of(&Factorization::of_factorial(n)), n);
        }
    }

    #[test]
    fn largest_prime_examples() {
        assert_eq!(largest_prime_factor(24).unwrap(), 3);
        assert_eq!(largest_prime_factor(97).unwrap(), 97);
        assert_eq!(largest_prime_factor(4).unwrap(), 2);
        assert!(largest_prime_factor(1).is_err());
    }

    #[test]
    fn rewrite_examples() {
        let rw = |p: i64, q| rewrite_over_factorial(&BigInt::from(p), q).unwrap();
        assert_eq!(rw(5, 6), (BigInt::from(5), 3));
        assert_eq!(rw(65, 24), (BigInt::from(65), 4));
        assert_eq!(rw(1, 2), (BigInt::from(1), 2));
        assert!(rewrite_over_factorial(&BigInt::from(1), 1).is_err());
    }

    #[test]
    fn quotient_rejects_non_divisor() {
        assert!(Factorization::of_factorial_quotient(4, 5).is_err());
        assert!(Factorization::of_factorial_quotient(4, 16).is_err());
        assert_eq!(
            Factorization::of_factorial_quotient(4, 8).unwrap().factors(),
            &[(3, 1)]
        );
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(kempner(6).unwrap()).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"q": 6, "S": 3, "P": 3, "factorization": [[2, 1], [3, 1]]})
        );
    }

    proptest! {
        #[test]
        fn rewrite_preserves_value(p in -1_000_000i64..1_000_000, q in 2u64..5000) {
            let (m, n) = rewrite_over_factorial(&BigInt::from(p), q).unwrap();
            prop_assert_eq!(n, kempner_s(q).unwrap());
            prop_assert_eq!(
                Rational::from_parts(m, factorial(n)),
                Rational::new(p, q).unwrap()
            );
        }

        #[test]
        fn s_at_least_p_on_random(q in 2u64..10_000_000) {
            let r = kempner(q).unwrap();
            prop_assert!(r.s >= r.p && r.s <= q);
            prop_assert_eq!(r.s == r.p, is_prime(r.s));
        }
    }
}
