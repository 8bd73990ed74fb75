//! Cantor series `a_0 + a_1/b_1 + a_2/(b_1 b_2) + ...` with `b_n >= 2` and
//! `0 <= a_n <= b_n - 1`.
//!
//! When every prime divides infinitely many `b_n`, the sum is irrational
//! exactly when both `a_n > 0` and `a_n < b_n - 1` hold infinitely often.
//! The classifier needs the whole sequence, not a prefix, so a spec is either
//! one of the built-in families (all predicates derived) or a finite table
//! with a declared tail mode.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CantorError {
    #[error("b_{index} = {b} must be >= 2")]
    RadixTooSmall { index: u64, b: u64 },
    #[error("a_{index} = {a} must be <= b_{index} - 1 = {max}")]
    DigitOutOfRange { index: u64, a: u64, max: u64 },
    #[error("tail mode repeat-last-block needs a non-empty a_table")]
    EmptyRepeat,
    #[error("declared {predicate} = {declared}, but the sequence gives {derived}")]
    InconsistentFlag {
        predicate: Predicate,
        declared: bool,
        derived: bool,
    },
    #[error("series is not known to be rational ({0:?})")]
    NotRational(Classification),
    #[error("cannot parse family {0:?}: expected unit, complement or mask:<bits>")]
    BadFamily(String),
}

/// How a custom table continues past its last entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMode {
    /// The `a` table repeats with its own period.
    RepeatLastBlock,
    /// `a_n = 0` past the table.
    AllZero,
    /// `a_n = b_n - 1` past the table.
    AllComplement,
}

/// User-declared predicates; each is checked against what the table implies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeclaredFlags {
    pub all_primes_divide_infinitely_many_b: Option<bool>,
    pub a_positive_infinitely_often: Option<bool>,
    pub a_below_b_minus_1_infinitely_often: Option<bool>,
}

/// A finite table description. An empty `b_table` means `b_n = n + 1`;
/// otherwise `b` repeats with the table's period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomSpec {
    pub a_table: Vec<u64>,
    #[serde(default)]
    pub b_table: Vec<u64>,
    pub tail_mode: TailMode,
    #[serde(default)]
    pub flags: DeclaredFlags,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `a_n = 1`, `b_n = n + 1`: with `a_0 = 2` this is the series for e.
    Unit,
    /// `a_n = b_n - 1 = n`, `b_n = n + 1`.
    Complement,
    /// `a_n = mask[n mod len]`, `b_n = n + 1`.
    MaskedUnit { mask: Vec<bool> },
    Custom(CustomSpec),
}

impl FromStr for Family {
    type Err = CantorError;

    /// `unit`, `complement`, or `mask:<bits>` such as `mask:01`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unit" => Ok(Family::Unit),
            "complement" => Ok(Family::Complement),
            _ => {
                let bits = s
                    .strip_prefix("mask:")
                    .filter(|b| !b.is_empty())
                    .ok_or_else(|| CantorError::BadFamily(s.to_string()))?;
                let mask = bits
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(CantorError::BadFamily(s.to_string())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Family::MaskedUnit { mask })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CantorSpec {
    #[serde(
        serialize_with = "crate::exact::json::serialize",
        deserialize_with = "crate::exact::json::de_integer"
    )]
    pub a0: BigInt,
    pub family: Family,
}

/// The custom-spec JSON document: `{a0, a_table, b_table, tail_mode, flags}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomDocument {
    pub a0: i64,
    #[serde(flatten)]
    pub spec: CustomSpec,
}

impl From<CustomDocument> for CantorSpec {
    fn from(doc: CustomDocument) -> Self {
        CantorSpec::new(doc.a0, Family::Custom(doc.spec))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    AllPrimesDivideInfinitelyManyB,
    APositiveInfinitelyOften,
    ABelowBMinus1InfinitelyOften,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Predicate::AllPrimesDivideInfinitelyManyB => "all_primes_divide_infinitely_many_b",
            Predicate::APositiveInfinitelyOften => "a_positive_infinitely_often",
            Predicate::ABelowBMinus1InfinitelyOften => "a_below_b_minus_1_infinitely_often",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Derived,
    /// Declared by the user and consistent with the table.
    Declared,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionUse {
    pub predicate: Predicate,
    pub holds: bool,
    pub source: Source,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Irrational,
    Rational,
    /// The prime-divisibility hypothesis fails, so no conclusion is drawn.
    Conditional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CantorVerdict {
    pub classification: Classification,
    pub rational_value: Option<Rational>,
    pub conditions_used: Vec<ConditionUse>,
}

impl CantorSpec {
    pub fn new(a0: impl Into<BigInt>, family: Family) -> Self {
        CantorSpec {
            a0: a0.into(),
            family,
        }
    }

    /// `b_n` for `n >= 1`.
    pub fn b(&self, n: u64) -> u64 {
        match &self.family {
            Family::Custom(c) if !c.b_table.is_empty() => {
                c.b_table[((n - 1) % c.b_table.len() as u64) as usize]
            }
            _ => n + 1,
        }
    }

    /// `a_n` for `n >= 1`.
    pub fn a(&self, n: u64) -> u64 {
        match &self.family {
            Family::Unit => 1,
            Family::Complement => n,
            Family::MaskedUnit { mask } => mask[(n % mask.len() as u64) as usize] as u64,
            Family::Custom(c) => {
                let len = c.a_table.len() as u64;
                if n <= len {
                    c.a_table[(n - 1) as usize]
                } else {
                    match c.tail_mode {
                        TailMode::RepeatLastBlock => c.a_table[((n - 1) % len) as usize],
                        TailMode::AllZero => 0,
                        TailMode::AllComplement => self.b(n) - 1,
                    }
                }
            }
        }
    }

    /// Indices past which the term pattern repeats (or only grows `b`), so
    /// checking `1..=span` covers every term.
    fn checked_span(&self) -> u64 {
        match &self.family {
            Family::Custom(c) => {
                let a = c.a_table.len().max(1) as u64;
                let b = c.b_table.len().max(1) as u64;
                match c.tail_mode {
                    TailMode::RepeatLastBlock => a.lcm(&b),
                    _ => a.max(b),
                }
            }
            Family::MaskedUnit { mask } => mask.len() as u64,
            _ => 1,
        }
    }

    /// Checks `b_n >= 2` and `a_n <= b_n - 1` over every distinct term.
    pub fn validate(&self) -> Result<(), CantorError> {
        if let Family::Custom(c) = &self.family {
            if c.tail_mode == TailMode::RepeatLastBlock && c.a_table.is_empty() {
                return Err(CantorError::EmptyRepeat);
            }
        }
        if let Family::MaskedUnit { mask } = &self.family {
            if mask.is_empty() {
                return Err(CantorError::BadFamily("mask:".into()));
            }
        }
        for n in 1..=self.checked_span() {
            let b = self.b(n);
            if b < 2 {
                return Err(CantorError::RadixTooSmall { index: n, b });
            }
            let a = self.a(n);
            if a > b - 1 {
                return Err(CantorError::DigitOutOfRange {
                    index: n,
                    a,
                    max: b - 1,
                });
            }
        }
        Ok(())
    }

    /// The three predicates, derived from the sequence description.
    fn derived_predicates(&self) -> [bool; 3] {
        match &self.family {
            // b_n = n + 1: the prime p divides b_{p-1}, b_{2p-1}, ...
            Family::Unit => [true, true, true],
            Family::Complement => [true, true, false],
            // a_n <= 1 < n = b_n - 1 for n >= 2
            Family::MaskedUnit { mask } => [true, mask.contains(&true), true],
            Family::Custom(c) => {
                // A periodic b takes finitely many values, so some prime
                // divides none of them.
                let primes = c.b_table.is_empty();
                let (pos, below) = match c.tail_mode {
                    TailMode::AllZero => (false, true),
                    TailMode::AllComplement => (true, false),
                    TailMode::RepeatLastBlock => {
                        let span = self.checked_span();
                        let pos = c.a_table.iter().any(|&a| a > 0);
                        // With b_n = n + 1 growing, a bounded a_n is
                        // eventually below b_n - 1.
                        let below =
                            primes || (1..=span).any(|n| self.a(n) < self.b(n) - 1);
                        (pos, below)
                    }
                };
                [primes, pos, below]
            }
        }
    }

    pub fn classify(&self) -> Result<CantorVerdict, CantorError> {
        self.validate()?;
        let derived = self.derived_predicates();
        let predicates = [
            Predicate::AllPrimesDivideInfinitelyManyB,
            Predicate::APositiveInfinitelyOften,
            Predicate::ABelowBMinus1InfinitelyOften,
        ];
        let declared = match &self.family {
            Family::Custom(c) => [
                c.flags.all_primes_divide_infinitely_many_b,
                c.flags.a_positive_infinitely_often,
                c.flags.a_below_b_minus_1_infinitely_often,
            ],
            _ => [None; 3],
        };
        let mut conditions_used = Vec::with_capacity(3);
        for ((predicate, derived), declared) in predicates.into_iter().zip(derived).zip(declared) {
            let source = match declared {
                Some(d) if d != derived => {
                    return Err(CantorError::InconsistentFlag {
                        predicate,
                        declared: d,
                        derived,
                    })
                }
                Some(_) => Source::Declared,
                None => Source::Derived,
            };
            conditions_used.push(ConditionUse {
                predicate,
                holds: derived,
                source,
            });
        }
        let [primes, pos, below] = derived;
        // Eventually-zero or eventually-complement tails sum to a rational
        // with or without the prime hypothesis.
        let classification = if !(pos && below) {
            Classification::Rational
        } else if primes {
            Classification::Irrational
        } else {
            Classification::Conditional
        };
        let rational_value = match classification {
            Classification::Rational => Some(self.limit_of_rational()),
            _ => None,
        };
        Ok(CantorVerdict {
            classification,
            rational_value,
            conditions_used,
        })
    }

    /// Limit of a series whose tail is eventually all-zero or all-complement.
    fn limit_of_rational(&self) -> Rational {
        let [_, pos, _] = self.derived_predicates();
        // First index K past which the tail is uniform.
        let k = match &self.family {
            Family::Custom(c) if c.tail_mode != TailMode::RepeatLastBlock => {
                c.a_table.len() as u64
            }
            _ => 0,
        };
        let (sum, product) = self.scaled_partial_sum(k);
        let mut value = Rational::from_parts(sum, product.clone());
        if pos {
            // sum_{n>K} (b_n - 1)/(b_1...b_n) telescopes to 1/(b_1...b_K).
            value = value + Rational::unit_fraction(&product);
        }
        value
    }

    /// `(A, B)` with `sum_{n<=N} a_n/(b_1...b_n) = A/B` and `B = b_1...b_N`.
    fn scaled_partial_sum(&self, n_max: u64) -> (BigInt, BigUint) {
        let mut acc = self.a0.clone();
        let mut product = BigUint::one();
        for n in 1..=n_max {
            let b = self.b(n);
            acc = acc * b + self.a(n);
            product *= b;
        }
        (acc, product)
    }

    /// `b_1 b_2 ... b_N`.
    pub fn radix_product(&self, n_max: u64) -> BigUint {
        (1..=n_max).fold(BigUint::one(), |acc, n| acc * self.b(n))
    }

    /// Exact `sum_{n=0}^{N} a_n/(b_1...b_n)`.
    pub fn partial_sum(&self, n_max: u64) -> Result<Rational, CantorError> {
        self.validate()?;
        let (sum, product) = self.scaled_partial_sum(n_max);
        Ok(Rational::from_parts(sum, product))
    }

    /// The exact sum, for specs classified rational.
    pub fn rational_limit(&self) -> Result<Rational, CantorError> {
        let verdict = self.classify()?;
        match verdict.rational_value {
            Some(v) => Ok(v),
            None => Err(CantorError::NotRational(verdict.classification)),
        }
    }
}

pub fn classify(spec: &CantorSpec) -> Result<CantorVerdict, CantorError> {
    spec.classify()
}

pub fn cantor_partial_sum(spec: &CantorSpec, n_max: u64) -> Result<Rational, CantorError> {
    spec.partial_sum(n_max)
}

pub fn rational_limit(spec: &CantorSpec) -> Result<Rational, CantorError> {
    spec.rational_limit()
}
