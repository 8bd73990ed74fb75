//! Nested rational intervals `I_n` enclosing e, and exact decisions about
//! `|e - r|` made by refining them.
//!
//! `I_1 = [2, 3]`; `I_n` is the second of `n` equal parts of `I_{n-1}`. The
//! left endpoint of `I_n` is the partial sum `sum_{k<=n} 1/k!` and its width
//! is `1/n!`. e itself is never represented as a number: every question about
//! it is settled by going deep enough that the enclosure answers it. Since e
//! is irrational, `|e - r|` never equals a rational bound, so refinement
//! always ends; the depth cap only guards against runaway inputs.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{format_scaled, Rational};

pub const DEFAULT_DEPTH_CAP: u64 = 500;

/// Depth the refinement loops start from before doubling.
const START_DEPTH: u64 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnclosureError {
    #[error("interval depth n must be >= 1")]
    ZeroDepth,
    #[error("bound must be >= 0, got {0}")]
    NegativeBound(Rational),
    #[error("digits must be >= 1")]
    ZeroDigits,
    #[error("enclosure depth cap {cap} reached without a decision")]
    DepthCapExceeded { cap: u64 },
}

/// The closed interval `I_n = [a/n!, (a+1)/n!]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub n: u64,
    pub left: Rational,
    pub right: Rational,
}

/// Integer form of `I_n`: the numerator `a` over the scale `n!`.
#[derive(Debug, Clone)]
struct Scaled {
    n: u64,
    numerator: BigUint,
    scale: BigUint,
}

impl Scaled {
    fn first() -> Self {
        Scaled {
            n: 1,
            numerator: BigUint::from(2u32),
            scale: BigUint::one(),
        }
    }

    /// Cut `[a/(n-1)!, (a+1)/(n-1)!]` into `n` parts of width `1/n!` and keep
    /// the second: `[(n*a + 1)/n!, (n*a + 2)/n!]`.
    fn subdivide(&mut self) {
        self.n += 1;
        self.numerator = &self.numerator * self.n + 1u32;
        self.scale *= self.n;
    }

    fn to_interval(&self) -> Interval {
        Interval {
            n: self.n,
            left: Rational::from_parts(self.numerator.clone(), self.scale.clone()),
            right: Rational::from_parts(&self.numerator + 1u32, self.scale.clone()),
        }
    }
}

/// Iterator over `I_1, I_2, I_3, ...`.
#[derive(Debug, Clone)]
pub struct Intervals {
    next: Scaled,
}

impl Iterator for Intervals {
    type Item = Interval;

    fn next(&mut self) -> Option<Interval> {
        let out = self.next.to_interval();
        self.next.subdivide();
        Some(out)
    }
}

pub fn intervals() -> Intervals {
    Intervals {
        next: Scaled::first(),
    }
}

/// `I_n` for `n >= 1`.
pub fn interval(n: u64) -> Result<Interval, EnclosureError> {
    if n == 0 {
        return Err(EnclosureError::ZeroDepth);
    }
    let mut s = Scaled::first();
    while s.n < n {
        s.subdivide();
    }
    Ok(s.to_interval())
}

/// `I_n` in integer form: `(a, n!)` with `I_n = [a/n!, (a+1)/n!]`.
pub fn scaled_interval(n: u64) -> Result<(BigUint, BigUint), EnclosureError> {
    if n == 0 {
        return Err(EnclosureError::ZeroDepth);
    }
    let mut s = Scaled::first();
    while s.n < n {
        s.subdivide();
    }
    Ok((s.numerator, s.scale))
}

/// `s_n = sum_{k=0}^{n} 1/k!`, summed term by term.
pub fn partial_sum(n: u64) -> Rational {
    let mut fact = BigUint::one();
    let mut sum = Rational::one();
    for k in 1..=n {
        fact *= k;
        sum = sum + Rational::unit_fraction(&fact);
    }
    sum
}

impl Interval {
    pub fn width(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.left <= x && x <= &self.right
    }

    pub fn contains_interior(&self, x: &Rational) -> bool {
        &self.left < x && x < &self.right
    }

    /// Range `(lo, hi)` of `|x - r|` for `x` in the interval.
    pub fn distance_range(&self, r: &Rational) -> (Rational, Rational) {
        if r <= &self.left {
            (&self.left - r, &self.right - r)
        } else if r >= &self.right {
            (r - &self.right, r - &self.left)
        } else {
            let hi = std::cmp::max(&self.right - r, r - &self.left);
            (Rational::zero(), hi)
        }
    }

    /// Decides `|e - r|` against `bound` from this enclosure alone, if it can.
    ///
    /// e lies in the open interior, so the true distance is strictly inside
    /// the range whenever `r` is outside the interval.
    pub fn decide_distance(&self, r: &Rational, bound: &Rational) -> Option<Ordering> {
        let (lo, hi) = self.distance_range(r);
        if !lo.is_zero() && &lo >= bound {
            Some(Ordering::Greater)
        } else if &hi <= bound {
            Some(Ordering::Less)
        } else {
            None
        }
    }
}

/// Runs `decide` on `I_4, I_8, I_16, ...` and finally `I_cap` until it
/// yields an answer.
fn refine<T>(
    cap: u64,
    mut decide: impl FnMut(&Interval) -> Option<T>,
) -> Result<T, EnclosureError> {
    let mut s = Scaled::first();
    let mut target = START_DEPTH.min(cap.max(1));
    loop {
        while s.n < target {
            s.subdivide();
        }
        if let Some(v) = decide(&s.to_interval()) {
            return Ok(v);
        }
        if target >= cap {
            return Err(EnclosureError::DepthCapExceeded { cap });
        }
        target = (target * 2).min(cap);
    }
}

/// Exact comparison of `|e - r|` with `bound`: `Less` or `Greater`, never
/// `Equal`.
pub fn compare_distance_to_e(r: &Rational, bound: &Rational) -> Result<Ordering, EnclosureError> {
    compare_distance_to_e_with_cap(r, bound, DEFAULT_DEPTH_CAP)
}

pub fn compare_distance_to_e_with_cap(
    r: &Rational,
    bound: &Rational,
    cap: u64,
) -> Result<Ordering, EnclosureError> {
    if bound.is_negative() {
        return Err(EnclosureError::NegativeBound(bound.clone()));
    }
    if bound.is_zero() {
        return Ok(Ordering::Greater);
    }
    refine(cap, |iv| iv.decide_distance(r, bound))
}

/// Rational `(lo, hi)` with `lo < |e - r| < hi`, `lo > 0` and `hi <= 2 lo`.
pub fn distance_bracket(r: &Rational) -> Result<(Rational, Rational), EnclosureError> {
    distance_bracket_with_cap(r, DEFAULT_DEPTH_CAP)
}

pub fn distance_bracket_with_cap(
    r: &Rational,
    cap: u64,
) -> Result<(Rational, Rational), EnclosureError> {
    let two = Rational::from(2);
    refine(cap, |iv| {
        let (lo, hi) = iv.distance_range(r);
        (!lo.is_zero() && hi <= &lo * &two).then_some((lo, hi))
    })
}

/// `floor(e * q)` for a positive integer `q`.
pub fn floor_e_times(q: &BigUint) -> Result<BigInt, EnclosureError> {
    floor_e_times_with_cap(q, DEFAULT_DEPTH_CAP)
}

pub fn floor_e_times_with_cap(q: &BigUint, cap: u64) -> Result<BigInt, EnclosureError> {
    if q.is_zero() {
        return Ok(BigInt::zero());
    }
    let q = Rational::from_integer(BigInt::from(q.clone()));
    refine(cap, |iv| {
        // e*q is irrational, so it lies strictly between floor(L*q) and
        // ceil(R*q); the floor is settled once those are adjacent.
        let lo = (&iv.left * &q).floor();
        let hi = (&iv.right * &q).ceil();
        (&hi - &lo == BigInt::one()).then_some(lo)
    })
}

/// `|e - r|` truncated to `digits` fractional digits, e.g. `"0.00994"` for
/// `r = 65/24`.
pub fn render_distance(r: &Rational, digits: usize) -> Result<String, EnclosureError> {
    render_distance_with_cap(r, digits, DEFAULT_DEPTH_CAP)
}

pub fn render_distance_with_cap(
    r: &Rational,
    digits: usize,
    cap: u64,
) -> Result<String, EnclosureError> {
    if digits == 0 {
        return Err(EnclosureError::ZeroDigits);
    }
    let ten_k = Rational::from_integer(BigInt::from(10u32).pow(digits as u32));
    refine(cap, |iv| {
        let (lo, hi) = iv.distance_range(r);
        // The distance is irrational, so floor(d * 10^k) is the unique
        // integer t with lo*10^k < t+1 and t <= hi*10^k when both ends agree.
        let t_lo = (&lo * &ten_k).floor();
        let t_hi = (&hi * &ten_k).ceil() - 1;
        (t_lo == t_hi).then(|| format_scaled(t_lo.magnitude(), digits))
    })
}
