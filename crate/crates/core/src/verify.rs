//! The reproduction checklist: eleven exact checks, each with a time limit.
//! A check passes when every value matches and it finished within its limit.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cantor::{CantorSpec, Classification, Family};
use crate::cfrac::{conjecture2_scan, convergents, corollary3_scan, partial_sum_record};
use crate::density::{batch_kempner, density_report_with_table, sieve_smallest_prime_factor};
use crate::enclosure::{compare_distance_to_e, interval, render_distance};
use crate::exact::{factorial, Rational};
use crate::kempner::{is_prime, kempner, kempner_s, kempner_s_naive};
use crate::measures::{
    candidate_numerators, check_sharpness, check_theorem1, corollary2_scan,
    factorial_successor_below_square,
};

pub const CRITERIA: u8 = 11;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    /// Values found, or the first mismatch.
    pub detail: String,
    pub limit_ms: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Check {
    pub fn within_limit(&self) -> bool {
        self.elapsed <= Duration::from_millis(self.limit_ms)
    }

    /// `AC<id> PASS|FAIL name (elapsed / limit): detail`; without `timing`
    /// only the limit is shown, so the line is reproducible.
    pub fn summary_line(&self, timing: bool) -> String {
        let time = if timing {
            format!("{:.3} ms / {} ms", self.elapsed.as_secs_f64() * 1e3, self.limit_ms)
        } else {
            format!("limit {} ms", self.limit_ms)
        };
        format!(
            "AC{:<2} {} {} ({time}): {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub all_pass: bool,
    pub checks: Vec<Check>,
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(id: u8, name: &'static str, limit_ms: u64, f: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let limit = Duration::from_millis(limit_ms);
    let (ok, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if ok && elapsed > limit {
        detail = format!("{detail}; too slow");
    }
    Check {
        id,
        name,
        pass: ok && elapsed <= limit,
        detail,
        limit_ms,
        elapsed,
    }
}

fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p, q).expect("nonzero denominator")
}

fn intervals_1_to_4() -> Outcome {
    let expected = [(2, 1, 3, 1), (5, 2, 6, 2), (16, 6, 17, 6), (65, 24, 66, 24)];
    for (n, &(lp, lq, rp, rq)) in (1..).zip(&expected) {
        let iv = interval(n).map_err(|e| e.to_string())?;
        ensure(iv.left == rat(lp, lq) && iv.right == rat(rp, rq), || {
            format!("I_{n} = [{}, {}]", iv.left, iv.right)
        })?;
    }
    Ok("I_1..I_4 = [2,3], [5/2,3], [8/3,17/6], [65/24,11/4]".into())
}

fn sandwich() -> Outcome {
    let r = rat(65, 24);
    let lo = rat(1, 120);
    let hi = rat(1, 24);
    let above = compare_distance_to_e(&r, &lo).map_err(|e| e.to_string())?;
    let below = compare_distance_to_e(&r, &hi).map_err(|e| e.to_string())?;
    ensure(above == Ordering::Greater && below == Ordering::Less, || {
        format!("|e - 65/24| vs 1/120: {above:?}, vs 1/24: {below:?}")
    })?;
    let shown = [
        lo.truncated_decimal(5),
        render_distance(&r, 5).map_err(|e| e.to_string())?,
        hi.truncated_decimal(5),
    ];
    ensure(shown == ["0.00833", "0.00994", "0.04166"], || {
        format!("rendered {shown:?}")
    })?;
    Ok(format!("{} < {} < {}", shown[0], shown[1], shown[2]))
}

fn kempner_checks() -> Outcome {
    for q in 1..=10_000u64 {
        let fast = kempner_s(q).map_err(|e| e.to_string())?;
        let slow = kempner_s_naive(q).map_err(|e| e.to_string())?;
        ensure(fast == slow, || format!("S({q}): {fast} vs naive {slow}"))?;
    }
    let s6 = kempner_s(6).map_err(|e| e.to_string())?;
    ensure(s6 == 3, || format!("S(6) = {s6}"))?;
    for q in 1..=5u64 {
        let s = kempner_s(q).map_err(|e| e.to_string())?;
        ensure(s == q, || format!("S({q}) = {s}"))?;
    }
    for n in 2..=12u64 {
        let f = factorial(n).to_u64().expect("12! fits in u64");
        let s = kempner_s(f).map_err(|e| e.to_string())?;
        ensure(s == n, || format!("S({n}!) = {s}"))?;
    }
    Ok("S = naive on [1, 10^4]; S(6) = 3; S(q) = q for q <= 5; S(n!) = n for n <= 12".into())
}

fn theorem1_sweep() -> Outcome {
    let mut checked = 0u64;
    for q in 2..=2000u64 {
        for p in candidate_numerators(q).map_err(|e| e.to_string())? {
            let v = check_theorem1(&p, q).map_err(|e| e.to_string())?;
            ensure(v.holds, || format!("fails at {p}/{q}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs, 0 failures"))
}

fn sharpness_and_corollary2() -> Outcome {
    for n in 3..=12u64 {
        ensure(check_sharpness(n).map_err(|e| e.to_string())?, || {
            format!("sharpness fails at n = {n}")
        })?;
    }
    let mut witness = None;
    for n in 2..=12u64 {
        let r = corollary2_scan(n).map_err(|e| e.to_string())?;
        ensure(r.all_hold == is_prime(n), || {
            format!("n = {n}: bound holds = {}, prime = {}", r.all_hold, is_prime(n))
        })?;
        if n == 4 {
            witness = r.witness;
        }
    }
    ensure(witness == Some(("65".to_string(), 24)), || {
        format!("n = 4 witness {witness:?}")
    })?;
    Ok("sharp for 3..=12; bound holds iff n prime on 2..=12; witness 65/24".into())
}

fn convergent_quality() -> Outcome {
    let i12 = interval(12).map_err(|e| e.to_string())?;
    let f12 = factorial(12);
    let mut inside = 0;
    let mut deep = 0;
    for c in convergents(50).map_err(|e| e.to_string())? {
        let q = c.value.denom();
        let bound = Rational::unit_fraction(&(&q * &q));
        let ord = compare_distance_to_e(&c.value, &bound).map_err(|e| e.to_string())?;
        ensure(ord == Ordering::Less, || {
            format!("convergent {} = {} misses 1/q^2", c.index, c.value)
        })?;
        let contained = i12.contains(&c.value);
        inside += contained as u32;
        if q > f12 {
            deep += 1;
            ensure(contained, || {
                format!("convergent {} (q > 12!) outside I_12", c.index)
            })?;
        }
    }
    Ok(format!(
        "50/50 within 1/q^2; {inside} inside I_12, including all {deep} with q > 12!"
    ))
}

fn q19() -> Outcome {
    let r = partial_sum_record(19);
    let want = factorial(19) / BigUint::from(4000u32);
    ensure(r.q_n == want && r.cofactor == BigUint::from(4000u32), || {
        format!("q_19 = {}, cofactor {}", r.q_n, r.cofactor)
    })?;
    Ok(format!("q_19 = 19!/4000 = {}", r.q_n))
}

fn conjecture2_and_corollary3() -> Outcome {
    let hits = conjecture2_scan(500).map_err(|e| e.to_string())?;
    ensure(hits == [1, 3], || format!("conjecture2_scan(500) = {hits:?}"))?;
    let scan = corollary3_scan(60).map_err(|e| e.to_string())?;
    let bad: Vec<u64> = scan.iter().filter(|e| e.violated).map(|e| e.n).collect();
    ensure(bad.is_empty(), || format!("corollary3 violations at {bad:?}"))?;
    Ok(format!(
        "conjecture2_scan(500) = [1, 3]; corollary3_scan(60): {} n checked, 0 violations",
        scan.len()
    ))
}

fn cantor_families() -> Outcome {
    let classify = |family: Family, a0: i64| {
        CantorSpec::new(a0, family)
            .classify()
            .map_err(|e| e.to_string())
    };
    let unit = classify(Family::Unit, 2)?;
    ensure(unit.classification == Classification::Irrational, || {
        format!("unit: {:?}", unit.classification)
    })?;
    let comp = CantorSpec::new(0, Family::Complement);
    let verdict = comp.classify().map_err(|e| e.to_string())?;
    ensure(
        verdict.classification == Classification::Rational
            && verdict.rational_value == Some(Rational::one()),
        || format!("complement: {:?} {:?}", verdict.classification, verdict.rational_value),
    )?;
    for n in 1..=20u64 {
        let got = comp.partial_sum(n).map_err(|e| e.to_string())?;
        let want = Rational::one() - Rational::unit_fraction(&factorial(n + 1));
        ensure(got == want, || format!("complement partial sum {n} = {got}"))?;
    }
    for mask in ["mask:01", "mask:10"] {
        let family = mask.parse::<Family>().map_err(|e| e.to_string())?;
        let v = classify(family, 0)?;
        ensure(v.classification == Classification::Irrational, || {
            format!("{mask}: {:?}", v.classification)
        })?;
    }
    Ok("unit irrational; complement = 1 with sums 1 - 1/(N+1)!; even/odd masks irrational".into())
}

fn density(workers: usize) -> Outcome {
    for r in batch_kempner(10_000).map_err(|e| e.to_string())? {
        let point = kempner(r.q).map_err(|e| e.to_string())?;
        ensure(r == point, || format!("batch/point mismatch at q = {}", r.q))?;
    }
    let table = sieve_smallest_prime_factor(1_000_000).map_err(|e| e.to_string())?;
    let big = density_report_with_table(&table, 1_000_000, 1).map_err(|e| e.to_string())?;
    let small = density_report_with_table(&table, 1_000, 1).map_err(|e| e.to_string())?;
    ensure(
        big.s_neq_p_ratio() < small.s_neq_p_ratio()
            && big.conjecture1_ratio() < small.conjecture1_ratio(),
        || {
            format!(
                "ratios at 10^3: {} / {}, at 10^6: {} / {}",
                small.ratio_s_neq_p,
                small.ratio_conjecture1_fail,
                big.ratio_s_neq_p,
                big.ratio_conjecture1_fail
            )
        },
    )?;
    let parallel =
        density_report_with_table(&table, 1_000_000, workers.max(2)).map_err(|e| e.to_string())?;
    ensure(parallel == big, || "counts differ across worker counts".to_string())?;
    Ok(format!(
        "S != P: {} -> {}; q^2 >= S!: {} -> {} (10^3 -> 10^6); identical with {} workers",
        small.ratio_s_neq_p,
        big.ratio_s_neq_p,
        small.ratio_conjecture1_fail,
        big.ratio_conjecture1_fail,
        workers.max(2)
    ))
}

fn successor_boundary() -> Outcome {
    ensure(!factorial_successor_below_square(2), || "holds at n = 2".into())?;
    for n in 3..=100 {
        ensure(factorial_successor_below_square(n), || format!("fails at n = {n}"))?;
    }
    Ok("(n+1)! < (n!)^2 for 3..=100, not at n = 2".into())
}

/// Runs criterion `id` (1..=11). `workers` only affects the density check.
pub fn run_criterion(id: u8, workers: usize) -> Option<Check> {
    Some(match id {
        1 => timed(1, "nested intervals I_1..I_4", 1, intervals_1_to_4),
        2 => timed(2, "65/24 sandwich and rendering", 10, sandwich),
        3 => timed(3, "Kempner oracle and values", 5_000, kempner_checks),
        4 => timed(4, "factorial bound sweep q <= 2000", 30_000, theorem1_sweep),
        5 => timed(5, "sharpness and prime-factor bound", 5_000, sharpness_and_corollary2),
        6 => timed(6, "convergent quality", 5_000, convergent_quality),
        7 => timed(7, "q_19 = 19!/4000", 10, q19),
        8 => timed(8, "partial sums among convergents", 60_000, conjecture2_and_corollary3),
        9 => timed(9, "Cantor series families", 1_000, cantor_families),
        10 => timed(10, "density scan to 10^6", 60_000, || density(workers)),
        11 => timed(11, "(n+1)! < (n!)^2 boundary", 1, successor_boundary),
        _ => return None,
    })
}

pub fn verify_paper(workers: usize) -> VerificationReport {
    let checks: Vec<Check> = (1..=CRITERIA)
        .filter_map(|id| run_criterion(id, workers))
        .collect();
    VerificationReport {
        all_pass: checks.iter().all(|c| c.pass),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timing_failure_is_reported() {
        let c = timed(99, "slow", 0, || {
            std::thread::sleep(Duration::from_millis(2));
            Ok("ok".into())
        });
        assert!(!c.pass);
        assert!(c.detail.ends_with("too slow"));
        let c = timed(99, "wrong", 1_000, || Err("bad".into()));
        assert!(!c.pass && c.detail == "bad");
    }

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(0, 1).is_none());
        assert!(run_criterion(12, 1).is_none());
    }
}
