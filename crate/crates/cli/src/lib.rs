//! `irrat`: the irrat-core modules as subcommands. Results go to stdout as
//! JSON (CSV for `partial-sums`), errors to stderr.
//!
//! Exit codes: 0 success, 1 bad input or a failed check, 2 resource limits
//! (enclosure depth cap, sieve budget, I/O).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use serde::Serialize;
use serde_json::{json, Value};

use irrat_core::cantor::{CantorError, CantorSpec, CustomDocument, Family};
use irrat_core::cfrac::{self, CfracError};
use irrat_core::density::{self, DensityError};
use irrat_core::enclosure::{self, EnclosureError, DEFAULT_DEPTH_CAP};
use irrat_core::kempner::{self, KempnerError};
use irrat_core::measures::{self, BoundKind, MeasureError};
use irrat_core::verify;
use irrat_core::Rational;

#[derive(Debug, Parser)]
#[command(name = "irrat", version, about = "Exact rational approximation of e")]
pub struct Cli {
    /// Maximum nested-interval depth before giving up on a comparison.
    #[arg(long, global = true, env = "IRRAT_DEPTH_CAP", default_value_t = DEFAULT_DEPTH_CAP,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub depth_cap: u64,
    /// Worker threads for parallel scans [default: available cores].
    #[arg(long, global = true, env = "IRRAT_WORKERS",
          value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// S(q), P(q) and the factorization of q.
    Kempner {
        #[arg(long, required_unless_present = "oracle_check", conflicts_with = "oracle_check")]
        q: Option<u64>,
        /// Compare against the naive factorial search for 1..=max.
        #[arg(long, requires = "max")]
        oracle_check: bool,
        #[arg(long, requires = "oracle_check")]
        max: Option<u64>,
    },
    /// The nested interval I_n.
    Interval {
        #[arg(long)]
        n: u64,
    },
    /// |e - p/q| as a truncated decimal, compared with each --bound.
    Distance {
        #[arg(long, allow_hyphen_values = true)]
        p: BigInt,
        #[arg(long)]
        q: BigUint,
        #[arg(long, default_value_t = 10)]
        digits: usize,
        /// A rational such as 1/120; repeatable.
        #[arg(long)]
        bound: Vec<Rational>,
    },
    /// Irrationality-measure checks.
    Measure {
        #[arg(long, allow_hyphen_values = true)]
        p: Option<BigInt>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, value_enum, default_value_t = BoundArg::Theorem1)]
        bound: BoundArg,
        /// Exponent excess for the known bound 1/q^(2+eps).
        #[arg(long)]
        eps: Option<Rational>,
        /// Test the prime-factor bound at q = n!.
        #[arg(long, requires = "n", conflicts_with = "compare")]
        corollary2: bool,
        #[arg(long)]
        n: Option<u64>,
        /// Compare 1/(S(q)+1)! with 1/q^(2+eps).
        #[arg(long)]
        compare: bool,
    },
    /// The first convergents of e.
    Convergents {
        #[arg(long)]
        count: usize,
    },
    /// Partial sums s_n = sum 1/k! for n = 0..=max-n, as CSV.
    PartialSums {
        #[arg(long)]
        max_n: u64,
        /// Add an is_convergent column.
        #[arg(long)]
        check_convergent: bool,
    },
    /// Classify or sum a Cantor series.
    Cantor {
        /// unit, complement or mask:<bits>.
        #[arg(long, required_unless_present = "spec", conflicts_with = "spec")]
        family: Option<Family>,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        a0: BigInt,
        /// Exact partial sum through this term.
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long)]
        classify: bool,
        /// JSON document {a0, a_table, b_table, tail_mode, flags}.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Exception counts for S(q) = P(q) and q^2 < S(q)! over 2..=x.
    Density {
        #[arg(long)]
        x: u64,
        /// Write every offending q here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the full reproduction checklist.
    VerifyPaper {
        /// Omit the timestamp and timings so output is reproducible.
        #[arg(long)]
        no_timestamp: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    Theorem1,
    PrimeFactor,
    WeakPrime,
    Known,
}

impl From<BoundArg> for BoundKind {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::Theorem1 => BoundKind::Theorem1,
            BoundArg::PrimeFactor => BoundKind::PrimeFactor,
            BoundArg::WeakPrime => BoundKind::WeakPrime,
            BoundArg::Known => BoundKind::KnownEps,
        }
    }
}

/// A failed run, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input, violated precondition, or a check that did not pass.
    Domain(String),
    /// A resource limit was hit; the input itself may be fine.
    Resource(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Resource(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Resource(m) => m,
        }
    }
}

fn domain(msg: impl Into<String>) -> Failure {
    Failure::Domain(msg.into())
}

impl From<EnclosureError> for Failure {
    fn from(e: EnclosureError) -> Self {
        match e {
            EnclosureError::DepthCapExceeded { .. } => Failure::Resource(e.to_string()),
            _ => domain(e.to_string()),
        }
    }
}

impl From<MeasureError> for Failure {
    fn from(e: MeasureError) -> Self {
        if e.is_resource() {
            Failure::Resource(e.to_string())
        } else {
            domain(e.to_string())
        }
    }
}

impl From<CfracError> for Failure {
    fn from(e: CfracError) -> Self {
        match e {
            CfracError::Enclosure(inner) => inner.into(),
            _ => domain(e.to_string()),
        }
    }
}

impl From<DensityError> for Failure {
    fn from(e: DensityError) -> Self {
        if e.is_resource() {
            Failure::Resource(e.to_string())
        } else {
            domain(e.to_string())
        }
    }
}

impl From<KempnerError> for Failure {
    fn from(e: KempnerError) -> Self {
        domain(e.to_string())
    }
}

impl From<CantorError> for Failure {
    fn from(e: CantorError) -> Self {
        domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Resource(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Resource(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Resource(e.to_string())
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.exit_code()
        }
    }
}

fn emit<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs a parsed command; `Ok` carries the exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let cap = cli.depth_cap;
    let workers = cli.workers.map_or_else(default_workers, |w| w as usize);
    match &cli.command {
        Command::Kempner { q, oracle_check, max } => {
            if *oracle_check {
                let max = max.expect("clap requires --max");
                oracle_check_report(max, out)?;
            } else {
                let q = q.expect("clap requires --q");
                emit(out, &kempner::kempner(q)?)?;
            }
        }
        Command::Interval { n } => emit(out, &enclosure::interval(*n)?)?,
        Command::Distance { p, q, digits, bound } => {
            if *q == BigUint::ZERO {
                return Err(domain("q must be >= 1"));
            }
            let r = Rational::from_parts(p.clone(), q.clone());
            let distance = enclosure::render_distance_with_cap(&r, *digits, cap)?;
            let comparisons = bound
                .iter()
                .map(|b| {
                    let ord = enclosure::compare_distance_to_e_with_cap(&r, b, cap)?;
                    Ok(json!({ "bound": b, "distance_vs_bound": ordering_name(ord) }))
                })
                .collect::<Result<Vec<Value>, Failure>>()?;
            emit(
                out,
                &json!({
                    "p": p.to_string(),
                    "q": q.to_string(),
                    "distance": distance,
                    "comparisons": comparisons,
                }),
            )?;
        }
        Command::Measure { p, q, bound, eps, corollary2, n, compare } => {
            if *corollary2 {
                emit(out, &measures::corollary2_scan(n.expect("clap requires --n"))?)?;
            } else if *compare {
                let q = q.ok_or_else(|| domain("--compare needs --q"))?;
                let eps = eps.clone().unwrap_or_else(Rational::zero);
                emit(out, &measures::compare_bounds(q, &eps)?)?;
            } else {
                let (Some(p), Some(q)) = (p, q) else {
                    return Err(domain("measure needs --p and --q"));
                };
                if eps.is_some() && *bound != BoundArg::Known {
                    return Err(domain("--eps only applies to --bound known"));
                }
                let verdict = measures::check_with_cap(p, *q, (*bound).into(), eps.as_ref(), cap)?;
                emit(out, &verdict)?;
            }
        }
        Command::Convergents { count } => emit(out, &cfrac::convergents(*count)?)?,
        Command::PartialSums { max_n, check_convergent } => {
            partial_sums_csv(*max_n, *check_convergent, out)?
        }
        Command::Cantor { family, a0, n, classify, spec } => {
            let spec = match (spec, family) {
                (Some(path), _) => read_cantor_spec(path)?,
                (None, Some(f)) => CantorSpec::new(a0.clone(), f.clone()),
                (None, None) => unreachable!("clap requires --family or --spec"),
            };
            let mut report = serde_json::Map::new();
            report.insert("a0".into(), Value::String(spec.a0.to_string()));
            if let Some(n) = n {
                report.insert("N".into(), json!(n));
                report.insert("partial_sum".into(), serde_json::to_value(spec.partial_sum(*n)?)?);
            }
            if *classify || n.is_none() {
                report.insert("verdict".into(), serde_json::to_value(spec.classify()?)?);
            }
            emit(out, &report)?;
        }
        Command::Density { x, csv } => {
            let table = density::sieve_smallest_prime_factor(*x)?;
            let report = density::density_report_with_table(&table, *x, workers)?;
            if let Some(path) = csv {
                let file = BufWriter::new(File::create(path)?);
                density::write_exceptions_csv(&table, *x, file)?;
            }
            emit(out, &report)?;
        }
        Command::VerifyPaper { no_timestamp, json } => {
            let report = verify::verify_paper(workers);
            print_verification(&report, !no_timestamp, *json, out)?;
            return Ok(if report.all_pass { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn ordering_name(o: std::cmp::Ordering) -> &'static str {
    match o {
        std::cmp::Ordering::Less => "less",
        std::cmp::Ordering::Equal => "equal",
        std::cmp::Ordering::Greater => "greater",
    }
}

fn oracle_check_report(max: u64, out: &mut dyn Write) -> Result<(), Failure> {
    let mut mismatches = Vec::new();
    for q in 1..=max {
        let fast = kempner::kempner_s(q)?;
        let slow = kempner::kempner_s_naive(q)?;
        if fast != slow {
            mismatches.push(json!({ "q": q, "S": fast, "naive": slow }));
        }
    }
    emit(out, &json!({ "max": max, "checked": max, "mismatches": mismatches }))
}

fn partial_sums_csv(max_n: u64, check: bool, out: &mut dyn Write) -> Result<(), Failure> {
    if max_n > 500 {
        eprintln!("scanning {} partial sums", max_n + 1);
    }
    let rows: Vec<(cfrac::PartialSumRecord, Option<bool>)> = if check {
        cfrac::partial_sums_with_flags(max_n)?
            .into_iter()
            .map(|(r, hit)| (r, Some(hit)))
            .collect()
    } else {
        cfrac::partial_sum_records(max_n).into_iter().map(|r| (r, None)).collect()
    };
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["n", "s_n_num", "s_n_den", "q_n", "full_factorial"];
    if check {
        header.push("is_convergent");
    }
    w.write_record(&header)?;
    for (r, hit) in rows {
        let mut rec = vec![
            r.n.to_string(),
            r.s_n.numer().to_string(),
            r.s_n.denom().to_string(),
            r.q_n.to_string(),
            r.full_factorial.to_string(),
        ];
        if let Some(hit) = hit {
            rec.push(hit.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn read_cantor_spec(path: &Path) -> Result<CantorSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| domain(format!("cannot read spec {}: {e}", path.display())))?;
    let doc: CustomDocument = serde_json::from_str(&text)
        .map_err(|e| domain(format!("malformed spec {}: {e}", path.display())))?;
    Ok(doc.into())
}

fn print_verification(
    report: &verify::VerificationReport,
    timing: bool,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let now = || {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    };
    let passed = report.checks.iter().filter(|c| c.pass).count();
    if as_json {
        let mut value = serde_json::to_value(report)?;
        if timing {
            value["generated_at_unix"] = json!(now());
            for (v, c) in value["checks"]
                .as_array_mut()
                .expect("checks is an array")
                .iter_mut()
                .zip(&report.checks)
            {
                v["elapsed_ms"] = json!(c.elapsed.as_secs_f64() * 1e3);
            }
        }
        return emit(out, &value);
    }
    if timing {
        writeln!(out, "generated at unix time {}", now())?;
    }
    for c in &report.checks {
        writeln!(out, "{}", c.summary_line(timing))?;
    }
    writeln!(out, "{passed}/{} checks passed", report.checks.len())?;
    Ok(())
}
