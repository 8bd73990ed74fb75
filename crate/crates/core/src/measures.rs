//! Lower bounds on `|e - p/q|` and comparisons between them.
//!
//! The bounds, all of the form `1/D` for an exactly known or bracketed `D`:
//!
//! | kind           | `D`                | valid for                         |
//! |----------------|--------------------|-----------------------------------|
//! | `theorem1`     | `(S(q) + 1)!`      | every `q > 1`                     |
//! | `weak_prime`   | `(q + 1)!`         | every `q > 1` (weaker, `S(q) <= q`) |
//! | `prime_factor` | `(P(q) + 1)!`      | only when `S(q) = P(q)`           |
//! | `known_eps`    | `q^(2 + eps)`      | `q` large enough for the given eps |

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enclosure::{self, EnclosureError, DEFAULT_DEPTH_CAP};
use crate::exact::{factorial, Rational};
use crate::kempner::{self, is_prime, KempnerError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Kempner(#[from] KempnerError),
    #[error(transparent)]
    Enclosure(#[from] EnclosureError),
    #[error("eps must be >= 0, got {0}")]
    NegativeEps(Rational),
    #[error("n = {0}: n! must fit in 64 bits (n <= 20)")]
    FactorialTooLarge(u64),
    #[error("n must be >= {min}, got {n}")]
    DepthTooSmall { n: u64, min: u64 },
    #[error("could not separate (S(q)+1)! from q^(2+eps) at {0} bits")]
    PrecisionExhausted(u32),
    #[error("bound needs {0}!, above the limit of {MAX_BOUND_FACTORIAL}!")]
    FactorialBoundTooLarge(u64),
    #[error("q^(2 + {0}) is too large to evaluate")]
    ExponentTooLarge(Rational),
}

impl MeasureError {
    /// Whether this is a resource limit rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            MeasureError::Enclosure(EnclosureError::DepthCapExceeded { .. })
                | MeasureError::PrecisionExhausted(_)
                | MeasureError::FactorialBoundTooLarge(_)
                | MeasureError::ExponentTooLarge(_)
        )
    }
}

/// Largest `m` for which a bound `1/m!` is built.
pub const MAX_BOUND_FACTORIAL: u64 = 20_000;
/// Limit on the bit length of `q^(2+eps)`, and on the denominator of eps.
const MAX_POWER_BITS: u64 = 1 << 22;
const MAX_EPS_DENOMINATOR: u64 = 64;

fn bound_factorial(m: u64) -> Result<BigUint, MeasureError> {
    if m > MAX_BOUND_FACTORIAL {
        return Err(MeasureError::FactorialBoundTooLarge(m));
    }
    Ok(factorial(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Theorem1,
    WeakPrime,
    PrimeFactor,
    KnownEps,
}

/// Outcome of testing `|e - p/q| > bound` exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureVerdict {
    #[serde(with = "crate::exact::json")]
    pub p: BigInt,
    pub q: u64,
    pub bound_name: BoundKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Rational>,
    pub bound: Rational,
    pub holds: bool,
    /// `|e - p/q|`, truncated.
    pub margin_digits: String,
    /// The bound, truncated.
    pub bound_digits: String,
}

/// `1/(S(q)+1)!`.
pub fn theorem1_bound(q: u64) -> Result<Rational, MeasureError> {
    check_q(q)?;
    let s = kempner::kempner_s(q)?;
    Ok(Rational::unit_fraction(&bound_factorial(s + 1)?))
}

/// `1/(q+1)!`.
pub fn weak_prime_bound(q: u64) -> Result<Rational, MeasureError> {
    check_q(q)?;
    Ok(Rational::unit_fraction(&bound_factorial(q + 1)?))
}

/// `1/(P(q)+1)!`.
pub fn prime_factor_bound(q: u64) -> Result<Rational, MeasureError> {
    let p = kempner::largest_prime_factor(q)?;
    Ok(Rational::unit_fraction(&bound_factorial(p + 1)?))
}

fn check_q(q: u64) -> Result<(), MeasureError> {
    if q < 2 {
        return Err(KempnerError::TooSmall { q, min: 2 }.into());
    }
    Ok(())
}

fn check_eps(eps: &Rational) -> Result<(), MeasureError> {
    if eps.is_negative() {
        return Err(MeasureError::NegativeEps(eps.clone()));
    }
    Ok(())
}

/// Rejects `q^(2+eps)` too large for `power_bracket`.
fn check_power(q: u64, eps: &Rational) -> Result<(), MeasureError> {
    let too_large = || MeasureError::ExponentTooLarge(eps.clone());
    if eps.denom() > BigUint::from(MAX_EPS_DENOMINATOR) {
        return Err(too_large());
    }
    let whole = (eps.floor() + 3u32).to_u64().ok_or_else(too_large)?;
    let bits = 64 - q.leading_zeros() as u64;
    if whole.saturating_mul(bits) > MAX_POWER_BITS {
        return Err(too_large());
    }
    Ok(())
}

/// Rational enclosure `lower <= base^exp <= upper` of a real power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerBracket {
    pub lower: Rational,
    pub upper: Rational,
}

impl PowerBracket {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Brackets `base^exp` for a non-negative rational exponent. The integer
/// part of the exponent is exact; the fractional part `c/d` is bracketed by
/// the integer `d`-th root of `base^c * 2^(d*bits)`, scaled back by `2^bits`.
pub fn power_bracket(base: &BigUint, exp: &Rational, bits: u32) -> PowerBracket {
    assert!(!exp.is_negative(), "negative exponent");
    let den = exp.denom();
    let num = exp.numer().magnitude().clone();
    let whole = (&num / &den).to_u32().expect("exponent too large");
    let frac_num = (&num % &den).to_u32().expect("exponent too large");
    let d = den.to_u32().expect("exponent denominator too large");
    let int_part = base.pow(whole);
    if frac_num == 0 {
        let v = Rational::from_integer(BigInt::from(int_part));
        return PowerBracket {
            lower: v.clone(),
            upper: v,
        };
    }
    let scale = BigUint::one() << bits;
    let radicand = base.pow(frac_num) * (BigUint::one() << (bits as usize * d as usize));
    let root = radicand.nth_root(d);
    let exact = root.pow(d) == radicand;
    let lower = Rational::from_parts(&int_part * &root, scale.clone());
    let upper = if exact {
        lower.clone()
    } else {
        Rational::from_parts(&int_part * (root + 1u32), scale)
    };
    PowerBracket { lower, upper }
}

const KNOWN_BOUND_BITS: u32 = 64;

/// A rational lower bound for `1/q^(2+eps)`, exact when `q^(2+eps)` is
/// rational (always when eps is an integer).
pub fn known_measure_bound(q: u64, eps: &Rational) -> Result<Rational, MeasureError> {
    check_q(q)?;
    check_eps(eps)?;
    check_power(q, eps)?;
    let exp = eps + &Rational::from(2);
    let bracket = power_bracket(&BigUint::from(q), &exp, KNOWN_BOUND_BITS);
    Ok(bracket.upper.recip().expect("q^(2+eps) > 0"))
}

/// Truncated decimal digits for a positive value: enough to show about three
/// significant digits, and never fewer than five.
fn display_digits(x: &Rational) -> usize {
    let inv = x.recip().map(|r| r.floor()).unwrap_or_default();
    let lead = if inv.is_zero() {
        0
    } else {
        inv.to_string().len()
    };
    (lead + 2).max(5)
}

/// Tests `|e - p/q| > bound` for the given bound kind.
pub fn check(
    p: &BigInt,
    q: u64,
    kind: BoundKind,
    eps: Option<&Rational>,
) -> Result<MeasureVerdict, MeasureError> {
    check_with_cap(p, q, kind, eps, DEFAULT_DEPTH_CAP)
}

pub fn check_with_cap(
    p: &BigInt,
    q: u64,
    kind: BoundKind,
    eps: Option<&Rational>,
    cap: u64,
) -> Result<MeasureVerdict, MeasureError> {
    let zero = Rational::zero();
    let bound = match kind {
        BoundKind::Theorem1 => theorem1_bound(q)?,
        BoundKind::WeakPrime => weak_prime_bound(q)?,
        BoundKind::PrimeFactor => prime_factor_bound(q)?,
        BoundKind::KnownEps => known_measure_bound(q, eps.unwrap_or(&zero))?,
    };
    let x = Rational::from_parts(p.clone(), q);
    let holds =
        enclosure::compare_distance_to_e_with_cap(&x, &bound, cap)? == Ordering::Greater;
    let margin_digits = render_margin(&x, cap)?;
    Ok(MeasureVerdict {
        p: p.clone(),
        q,
        bound_name: kind,
        eps: (kind == BoundKind::KnownEps).then(|| eps.unwrap_or(&zero).clone()),
        bound_digits: bound.truncated_decimal(display_digits(&bound)),
        bound,
        holds,
        margin_digits,
    })
}

fn render_margin(x: &Rational, cap: u64) -> Result<String, MeasureError> {
    let (lo, _) = enclosure::distance_bracket_with_cap(x, cap)?;
    Ok(enclosure::render_distance_with_cap(
        x,
        display_digits(&lo),
        cap,
    )?)
}

/// `|e - p/q| > 1/(S(q)+1)!`; always holds.
pub fn check_theorem1(p: &BigInt, q: u64) -> Result<MeasureVerdict, MeasureError> {
    check(p, q, BoundKind::Theorem1, None)
}

/// `|e - p/q| > 1/(P(q)+1)!`; may fail.
pub fn check_prime_factor_bound(p: &BigInt, q: u64) -> Result<MeasureVerdict, MeasureError> {
    check(p, q, BoundKind::PrimeFactor, None)
}

/// The integers nearest to `e*q`: `floor(e*q) - 1 ..= floor(e*q) + 2`.
///
/// Every bound here is below `1/(2q)`, so only these numerators can come
/// close enough to e to violate one.
pub fn candidate_numerators(q: u64) -> Result<Vec<BigInt>, MeasureError> {
    let f = enclosure::floor_e_times(&BigUint::from(q))?;
    Ok((-1i32..=2).map(|d| &f + d).collect())
}

/// For `q = n!` and `p` either endpoint numerator of `I_n`, checks
/// `|e - p/q| < 1/S(q)! = 1/n!`, i.e. that `(S(q)+1)!` cannot be lowered.
pub fn check_sharpness(n: u64) -> Result<bool, MeasureError> {
    if n < 3 {
        return Err(MeasureError::DepthTooSmall { n, min: 3 });
    }
    let iv = enclosure::interval(n)?;
    let bound = Rational::unit_fraction(&factorial(n));
    for end in [&iv.left, &iv.right] {
        if enclosure::compare_distance_to_e(end, &bound)? != Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Corollary2Report {
    pub n: u64,
    pub q: u64,
    pub prime: bool,
    pub all_hold: bool,
    /// First `(p, q)` found where the prime-factor bound fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(String, u64)>,
    pub tested: Vec<String>,
}

/// Fixes `q = n!` and tests the prime-factor bound on the endpoint numerators
/// of `I_n` and the integers nearest `e*q`. It holds for all of them exactly
/// when `n` is prime.
pub fn corollary2_scan(n: u64) -> Result<Corollary2Report, MeasureError> {
    if n < 2 {
        return Err(MeasureError::DepthTooSmall { n, min: 2 });
    }
    if n > 20 {
        return Err(MeasureError::FactorialTooLarge(n));
    }
    let q = factorial(n).to_u64().expect("20! fits in u64");
    let iv = enclosure::interval(n)?;
    let scale = Rational::from(q as i64);
    let a = (&iv.left * &scale).floor();
    let mut tested = vec![a.clone(), a + 1];
    for p in candidate_numerators(q)? {
        if !tested.contains(&p) {
            tested.push(p);
        }
    }
    let mut witness = None;
    for p in &tested {
        if !check_prime_factor_bound(p, q)?.holds {
            witness = Some((p.to_string(), q));
            break;
        }
    }
    Ok(Corollary2Report {
        n,
        q,
        prime: is_prime(n),
        all_hold: witness.is_none(),
        witness,
        tested: tested.iter().map(|p| p.to_string()).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stronger {
    Theorem1,
    Known,
    EqualClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundComparison {
    pub q: u64,
    pub eps: Rational,
    #[serde(rename = "S")]
    pub s: u64,
    pub stronger: Stronger,
    pub conjecture1_holds_at_q: bool,
}

const MAX_BRACKET_BITS: u32 = 1 << 14;

/// Pointwise comparison of `1/(S(q)+1)!` against `1/q^(2+eps)`, and whether
/// `q^2 < S(q)!` at this `q`.
pub fn compare_bounds(q: u64, eps: &Rational) -> Result<BoundComparison, MeasureError> {
    check_q(q)?;
    check_eps(eps)?;
    check_power(q, eps)?;
    let s = kempner::kempner_s(q)?;
    let next_fact = Rational::from_integer(BigInt::from(bound_factorial(s + 1)?));
    let bq = BigUint::from(q);
    let conjecture1_holds_at_q = &bq * &bq < factorial(s);
    let exp = eps + &Rational::from(2);
    let mut bits = 64;
    let stronger = loop {
        let b = power_bracket(&bq, &exp, bits);
        if b.is_exact() {
            break match next_fact.cmp(&b.lower) {
                Ordering::Less => Stronger::Theorem1,
                Ordering::Equal => Stronger::EqualClass,
                Ordering::Greater => Stronger::Known,
            };
        }
        if next_fact < b.lower {
            break Stronger::Theorem1;
        }
        if next_fact >= b.upper {
            break Stronger::Known;
        }
        if bits >= MAX_BRACKET_BITS {
            return Err(MeasureError::PrecisionExhausted(bits));
        }
        bits *= 2;
    };
    Ok(BoundComparison {
        q,
        eps: eps.clone(),
        s,
        stronger,
        conjecture1_holds_at_q,
    })
}

/// `(n+1)! < (n!)^2`.
pub fn factorial_successor_below_square(n: u64) -> bool {
    let f = factorial(n);
    factorial(n + 1) < &f * &f
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    fn bi(p: i64) -> BigInt {
        BigInt::from(p)
    }

    #[test]
    fn theorem1_bound_examples() {
        assert_eq!(theorem1_bound(24).unwrap(), r(1, 120));
        assert_eq!(theorem1_bound(6).unwrap(), r(1, 24));
        assert_eq!(theorem1_bound(2).unwrap(), r(1, 6));
        assert!(theorem1_bound(1).is_err());
    }

    #[test]
    fn theorem1_examples() {
        let v = check_theorem1(&bi(65), 24).unwrap();
        assert!(v.holds);
        assert_eq!(v.margin_digits, "0.00994");
        assert_eq!(v.bound_digits, "0.00833");
        let v = check_theorem1(&bi(8), 3).unwrap();
        assert!(v.holds);
        assert_eq!(v.bound, r(1, 24));
        let v = check_theorem1(&bi(3), 2).unwrap();
        assert!(v.holds);
        assert_eq!(v.bound, r(1, 6));
        assert!(v.margin_digits.starts_with("1.218"));
    }

    #[test]
    fn prime_factor_examples() {
        let v = check_prime_factor_bound(&bi(65), 24).unwrap();
        assert!(!v.holds);
        assert_eq!(v.bound, r(1, 24));
        assert!(check_prime_factor_bound(&bi(8), 3).unwrap().holds);
        for q in [2u64, 3, 5, 7, 11, 13, 101] {
            for p in candidate_numerators(q).unwrap() {
                let a = check_theorem1(&p, q).unwrap();
                let b = check_prime_factor_bound(&p, q).unwrap();
                assert_eq!((a.holds, a.bound), (b.holds, b.bound));
            }
        }
    }

    #[test]
    fn weak_prime_is_weaker() {
        for q in 2..=300u64 {
            assert!(theorem1_bound(q).unwrap() >= weak_prime_bound(q).unwrap());
        }
    }

    #[test]
    fn sharpness() {
        assert!(check_sharpness(4).unwrap());
        assert!(check_sharpness(3).unwrap());
        assert!(check_sharpness(5).unwrap());
        assert!(check_sharpness(2).is_err());
    }

    #[test]
    fn corollary2_examples() {
        let c = corollary2_scan(4).unwrap();
        assert!(!c.prime && !c.all_hold);
        assert_eq!(c.witness, Some(("65".to_string(), 24)));
        let c = corollary2_scan(5).unwrap();
        assert!(c.prime && c.all_hold && c.witness.is_none());
        let c = corollary2_scan(2).unwrap();
        assert!(c.prime && c.all_hold);
        assert!(corollary2_scan(21).is_err());
        assert!(corollary2_scan(1).is_err());
    }

    #[test]
    fn known_bound_examples() {
        assert_eq!(known_measure_bound(3, &r(0, 1)).unwrap(), r(1, 9));
        assert_eq!(known_measure_bound(24, &r(0, 1)).unwrap(), r(1, 576));
        assert_eq!(known_measure_bound(2, &r(1, 1)).unwrap(), r(1, 8));
        // perfect square: 4^(5/2) = 32 exactly
        assert_eq!(known_measure_bound(4, &r(1, 2)).unwrap(), r(1, 32));
        assert!(known_measure_bound(4, &r(-1, 2)).is_err());
    }

    #[test]
    fn fractional_power_brackets_the_real_value() {
        // 2^(5/2) = 5.65685424949...
        let b = power_bracket(&BigUint::from(2u32), &r(5, 2), 64);
        assert!(!b.is_exact());
        assert!(b.lower < r(565685424950, 100000000000));
        assert!(b.upper > r(565685424949, 100000000000));
        assert!(&b.upper - &b.lower <= r(1, 1 << 60));
        // lower^2 <= 32 <= upper^2
        assert!(&b.lower * &b.lower <= r(32, 1));
        assert!(&b.upper * &b.upper >= r(32, 1));
        let lb = known_measure_bound(2, &r(1, 2)).unwrap();
        assert!(&lb * &lb <= r(1, 32));
    }

    #[test]
    fn compare_bounds_examples() {
        assert!(!compare_bounds(2, &r(0, 1)).unwrap().conjecture1_holds_at_q);
        assert!(compare_bounds(4, &r(0, 1)).unwrap().conjecture1_holds_at_q);
        let c = compare_bounds(720, &r(0, 1)).unwrap();
        assert_eq!(c.s, 6);
        assert_eq!(c.stronger, Stronger::Theorem1);
        // q = 7: 8! = 40320 against 49
        assert_eq!(compare_bounds(7, &r(0, 1)).unwrap().stronger, Stronger::Known);
        // q = 2: 3! = 6 against 2^(5/2) = 5.65...
        assert_eq!(compare_bounds(2, &r(1, 2)).unwrap().stronger, Stronger::Known);
        // q = 3, eps = 1/2: 4! = 24 against 3^2.5 = 15.58...
        assert_eq!(compare_bounds(3, &r(1, 2)).unwrap().stronger, Stronger::Known);
        // q = 4, eps = 1/2: S(4) = 4, 5! = 120 against 4^2.5 = 32
        assert_eq!(compare_bounds(4, &r(1, 2)).unwrap().stronger, Stronger::Known);
        // q = 6: S = 3, 4! = 24 < 6^2 = 36
        assert_eq!(compare_bounds(6, &r(0, 1)).unwrap().stronger, Stronger::Theorem1);
        // q = 6: 24 < 6^(5/2) = 88.18...
        assert_eq!(compare_bounds(6, &r(1, 2)).unwrap().stronger, Stronger::Theorem1);
        assert!(power_bracket(&BigUint::from(8u32), &r(2, 3), 32).is_exact());
    }

    #[test]
    fn successor_factorial_square_boundary() {
        assert!(!factorial_successor_below_square(2));
        for n in 3..=100 {
            assert!(factorial_successor_below_square(n), "n={n}");
        }
    }

    #[test]
    fn verdict_json() {
        let v = serde_json::to_value(check_theorem1(&bi(65), 24).unwrap()).unwrap();
        assert_eq!(v["p"], "65");
        assert_eq!(v["bound_name"], "theorem1");
        assert_eq!(v["bound"], serde_json::json!({"num": "1", "den": "120"}));
        assert_eq!(v["holds"], true);
        assert!(v.get("eps").is_none());
        let v = check(&bi(65), 24, BoundKind::KnownEps, None).unwrap();
        assert_eq!(v.eps, Some(Rational::zero()));
        assert_eq!(v.bound, r(1, 576));
        assert!(v.holds);
    }

    #[test]
    fn oversized_bounds_are_resource_errors() {
        let big_prime = 1_000_003;
        let err = check_theorem1(&bi(3), big_prime).unwrap_err();
        assert_eq!(err, MeasureError::FactorialBoundTooLarge(big_prime + 1));
        assert!(err.is_resource());
        let err = known_measure_bound(10, &r(10_000_000, 1)).unwrap_err();
        assert!(matches!(err, MeasureError::ExponentTooLarge(_)) && err.is_resource());
        assert!(known_measure_bound(10, &r(1, 65)).is_err());
        assert!(known_measure_bound(10, &r(1, 64)).is_ok());
        assert!(compare_bounds(big_prime, &r(0, 1)).unwrap_err().is_resource());
        assert!(!MeasureError::NegativeEps(r(-1, 1)).is_resource());
    }

}
