//! Exact-arithmetic tools for rational approximation of e.
//!
//! * [`enclosure`]: the nested intervals `I_n` around e and exact distance
//!   comparisons built on them.
//! * [`kempner`]: the Kempner function `S(q)` and largest prime factor `P(q)`.
//! * [`measures`]: lower bounds on `|e - p/q|` and how they compare.
//! * [`cfrac`]: convergents of e and the partial sums that are (not) among them.
//! * [`cantor`]: rationality of Cantor series.
//! * [`density`]: sieve-based scans of `S(q)` and `P(q)` over ranges.
//! * [`verify`]: the reproduction checklist run by `irrat verify-paper`.

pub mod cantor;
pub mod cfrac;
pub mod density;
pub mod enclosure;
pub mod exact;
pub mod kempner;
pub mod measures;
pub mod verify;

pub use exact::{factorial, Integer, Natural, Rational};
