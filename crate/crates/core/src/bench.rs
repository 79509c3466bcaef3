//! Benchmark inputs, CSV rows and growth-trend fitting.

use std::fmt;
use std::io::{Read, Write};
use std::ops::RangeInclusive;
use std::time::Duration;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Engine, Mode, Query, RunStats};
use crate::error::{Error, Result};
use crate::parse::parse_term;
use crate::rule::Program;
use crate::term::Term;

pub const CSV_HEADER: [&str; 9] = [
    "program",
    "mode",
    "input",
    "unfold_ms",
    "interp_ms",
    "total_ms",
    "apps",
    "rounds",
    "deck_size",
];

/// Seed for the permutations fed to the sorting benchmark.
pub const SORT_SEED: u64 = 0x5eed_2024;

/// Largest inputs the naive interpreter is allowed to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NaiveCaps {
    pub fib: u64,
    pub sum_exponent: u32,
    pub list_exponent: u32,
    /// Applies to the larger gcd argument.
    pub gcd_exponent: u32,
}

impl Default for NaiveCaps {
    fn default() -> Self {
        NaiveCaps {
            fib: 34,
            sum_exponent: 23,
            list_exponent: 15,
            gcd_exponent: 26,
        }
    }
}

impl NaiveCaps {
    /// Refuses `inputs` to the shipped `program` when they exceed the cap.
    pub fn check(&self, program: &str, inputs: &[Term]) -> Result<()> {
        let first = inputs.first();
        let refused = match program {
            "fib" => first
                .and_then(Term::to_bigint)
                .is_some_and(|n| n > BigInt::from(self.fib))
                .then(|| format!("naive fib is capped at n = {}", self.fib)),
            "sum" => first
                .and_then(Term::to_bigint)
                .is_some_and(|n| n > BigInt::one() << self.sum_exponent)
                .then(|| format!("naive sum is capped at n = 2^{}", self.sum_exponent)),
            "rev" | "sort" => first
                .and_then(Term::list_items)
                .is_some_and(|items| items.len() > 1 << self.list_exponent)
                .then(|| format!("naive {program} is capped at length 2^{}", self.list_exponent)),
            "gcd" => inputs
                .iter()
                .filter_map(Term::to_bigint)
                .any(|n| n.magnitude() > &(BigUint::one() << self.gcd_exponent))
                .then(|| format!("naive gcd is capped at arguments of 2^{}", self.gcd_exponent)),
            _ => None,
        };
        match refused {
            Some(why) => Err(Error::ResourceLimit(format!("{why}; pass --cap-override to run anyway"))),
            None => Ok(()),
        }
    }
}

/// Parses a command-line argument: `2^k`, `2^k+c`, `2^k-c`, or any term.
pub fn parse_input(text: &str) -> Result<Term> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("2^") {
        let split = rest.find(['+', '-']).unwrap_or(rest.len());
        let (exp, offset) = rest.split_at(split);
        let exp: u32 = exp
            .parse()
            .map_err(|_| Error::Config(format!("bad exponent in `{text}`")))?;
        let mut value = power_of_two(exp);
        if !offset.is_empty() {
            let c: BigInt = offset[1..]
                .parse()
                .map_err(|_| Error::Config(format!("bad offset in `{text}`")))?;
            if offset.starts_with('+') {
                value += c;
            } else {
                value -= c;
            }
        }
        return Ok(Term::from(value));
    }
    Ok(parse_term(text)?)
}

/// 2^k by repeated squaring.
pub fn power_of_two(k: u32) -> BigInt {
    let mut result = BigInt::one();
    let mut base = BigInt::from(2);
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result *= &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    result
}

/// Sizes like `25,50,100` or `8..12`, or a mix of both.
pub fn parse_sizes(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::Config(format!("bad size list `{text}`"));
    let mut sizes = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            sizes.extend(RangeInclusive::new(a, b));
        } else {
            sizes.push(part.parse().map_err(|_| bad())?);
        }
    }
    if sizes.is_empty() {
        return Err(bad());
    }
    Ok(sizes)
}

/// How a size from `--sizes` becomes an input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeScale {
    /// The size is k and the input is 2^k.
    Exponent,
    /// The size is the input itself.
    Linear,
}

/// Inputs for one benchmark size, with the descriptor printed in the CSV.
pub fn bench_inputs(program: &str, size: u64, scale: SizeScale, second: u64) -> Result<(Vec<Term>, String)> {
    let (n, descriptor) = match scale {
        SizeScale::Exponent => {
            let k = u32::try_from(size).map_err(|_| Error::Config(format!("exponent {size} too large")))?;
            (power_of_two(k), format!("2^{size}"))
        }
        SizeScale::Linear => (BigInt::from(size), size.to_string()),
    };
    match program {
        "sum" | "fib" => Ok((vec![Term::from(n)], descriptor)),
        "gcd" => Ok((vec![Term::from(n), Term::from(BigInt::from(second))], format!("{descriptor};{second}"))),
        "rev" | "sort" => {
            let len = n
                .to_usize()
                .filter(|&l| l <= 1 << 26)
                .ok_or_else(|| Error::ResourceLimit(format!("list length {descriptor} too large")))?;
            let mut items: Vec<i64> = (1..=len as i64).collect();
            if program == "sort" {
                items.shuffle(&mut ChaCha8Rng::seed_from_u64(SORT_SEED));
            }
            Ok((vec![Term::list(items.into_iter().map(Term::small))], descriptor))
        }
        _ => Err(Error::Config(format!("no benchmark inputs for program `{program}`"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub program: String,
    pub mode: Mode,
    pub input: String,
    pub unfold_time: Duration,
    pub interp_time: Duration,
    pub total_time: Duration,
    pub rule_applications: u64,
    pub rounds: u64,
    pub deck_size: usize,
}

fn millis(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1000.0)
}

impl BenchRow {
    pub fn record(&self) -> [String; 9] {
        [
            self.program.clone(),
            self.mode.to_string(),
            self.input.clone(),
            millis(self.unfold_time),
            millis(self.interp_time),
            millis(self.total_time),
            self.rule_applications.to_string(),
            self.rounds.to_string(),
            self.deck_size.to_string(),
        ]
    }
}

fn median(mut values: Vec<Duration>) -> Duration {
    values.sort();
    values[values.len() / 2]
}

/// Runs `query` `reps` times and reports the median of each time column.
/// The counters come from the last run; they do not vary between runs.
pub fn measure(
    engine: &Engine,
    program: &Program,
    query: &Query,
    mode: Mode,
    reps: usize,
) -> Result<RunStats> {
    assert!(reps >= 1, "at least one repetition");
    let mut runs = Vec::with_capacity(reps);
    for _ in 0..reps {
        let outcome = engine.run(program, query, mode)?;
        if !outcome.solved {
            return Err(Error::Type(format!("benchmark query `{}` failed", query.goal)));
        }
        runs.push(outcome.stats);
    }
    let pick = |f: fn(&RunStats) -> Duration| median(runs.iter().map(f).collect());
    let mut stats = runs.last().expect("reps >= 1").clone();
    stats.unfold_time = pick(|s| s.unfold_time);
    stats.interp_time = pick(|s| s.interp_time);
    stats.total_time = pick(|s| s.total_time);
    Ok(stats)
}

pub fn row(program: &str, mode: Mode, input: String, stats: &RunStats) -> BenchRow {
    BenchRow {
        program: program.to_string(),
        mode,
        input,
        unfold_time: stats.unfold_time,
        interp_time: stats.interp_time,
        total_time: stats.total_time.max(stats.unfold_time).max(stats.interp_time),
        rule_applications: stats.rule_applications,
        rounds: stats.rounds,
        deck_size: stats.deck_size(),
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record(r.record()).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))?;
    Ok(())
}

/// One series point as read back from CSV: the input size n, as log2(n),
/// and the total time in milliseconds.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub log2_n: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub program: String,
    pub mode: String,
    pub points: Vec<Point>,
}

/// log2 of the leading number in an input descriptor (`2^k`, `2^k;37` or `n`).
pub fn descriptor_log2(input: &str) -> Option<f64> {
    let head = input.split(';').next()?.trim();
    if let Some(k) = head.strip_prefix("2^") {
        return k.parse::<f64>().ok();
    }
    let n: f64 = head.parse().ok()?;
    (n > 0.0).then(|| n.log2())
}

/// Groups bench CSV rows into series by program and mode, keeping the
/// order of first appearance.
pub fn read_series<R: Read>(input: R) -> Result<Vec<Series>> {
    let mut reader = csv::Reader::from_reader(input);
    let bad = |what: String| Error::Config(format!("reading CSV: {what}"));
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column `{name}`")))
    };
    let (program, mode, input, total) = (col("program")?, col("mode")?, col("input")?, col("total_ms")?);
    let mut series: Vec<Series> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let log2_n = descriptor_log2(&record[input]).ok_or_else(|| bad(format!("bad input `{}`", &record[input])))?;
        let total_ms: f64 = record[total]
            .parse()
            .map_err(|_| bad(format!("bad time `{}`", &record[total])))?;
        let point = Point { log2_n, total_ms };
        match series
            .iter_mut()
            .find(|s| s.program == record[program] && s.mode == record[mode])
        {
            Some(s) => s.points.push(point),
            None => series.push(Series {
                program: record[program].to_string(),
                mode: record[mode].to_string(),
                points: vec![point],
            }),
        }
    }
    Ok(series)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Constant,
    Linear,
    /// Time grows like n^k.
    Power(f64),
    /// Time grows like (log n)^k.
    Polylog(f64),
    /// Time grows like b^n.
    Exponential(f64),
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Constant => f.write_str("constant"),
            Model::Linear => f.write_str("linear"),
            Model::Power(k) => write!(f, "power({k:.2})"),
            Model::Polylog(k) => write!(f, "polylog({k:.2})"),
            Model::Exponential(b) => write!(f, "exponential(base {b:.3})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub model: Model,
    /// Regression coefficient on the chosen axes.
    pub slope: f64,
    /// Root mean square of the residuals of ln(time).
    pub residual: f64,
    pub points: usize,
}

/// Least squares y = a + b x; returns (b, rms residual).
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    Some((b, (rss / nf).sqrt()))
}

/// Slopes below this count as flat.
const FLAT: f64 = 0.2;

/// Fits ln(time) against ln(n) for naive series, choosing an exponential
/// model instead when it leaves a smaller residual, and against ln(log2 n)
/// for unfolded series.
pub fn fit(series: &Series) -> Option<FitReport> {
    let pts: Vec<&Point> = series.points.iter().filter(|p| p.total_ms > 0.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.total_ms.ln()).collect();
    let ln2 = std::f64::consts::LN_2;
    let report = |model, slope, residual| FitReport {
        model,
        slope,
        residual,
        points: pts.len(),
    };
    if series.mode == Mode::Unfold.as_str() {
        let xs: Vec<f64> = pts.iter().map(|p| p.log2_n.max(f64::MIN_POSITIVE).ln()).collect();
        let (k, res) = least_squares(&xs, &ys)?;
        let model = if k.abs() < FLAT { Model::Constant } else { Model::Polylog(k) };
        return Some(report(model, k, res));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.log2_n * ln2).collect();
    let (k, power_res) = least_squares(&xs, &ys)?;
    let ns: Vec<f64> = pts.iter().map(|p| p.log2_n.exp2()).collect();
    let exponential = least_squares(&ns, &ys);
    if let Some((b, exp_res)) = exponential {
        if exp_res < power_res && k > 2.0 {
            return Some(report(Model::Exponential(b.exp()), b, exp_res));
        }
    }
    let model = if k.abs() < FLAT {
        Model::Constant
    } else if (k - 1.0).abs() < FLAT {
        Model::Linear
    } else {
        Model::Power(k)
    };
    Some(report(model, k, power_res))
}
