//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 1 4`.

use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use recunfold::format::{format_program, format_rule};
use recunfold::parse::{parse_program, parse_rule};
use recunfold::round_robin::{umr, RoundRobinOptions, RoundRobinState};
use recunfold::scheme::{FibScheme, Scheme, SumScheme};
use recunfold::{programs, Bindings, Engine, Error, GuardedRule, Mode, Program, Query, RunOutcome, Term, VarId};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "exact deck reproduction",
        budget: Duration::from_secs(1),
        check: deck_reproduction,
    },
    Criterion {
        id: 2,
        name: "oracle equivalence",
        budget: Duration::from_secs(30),
        check: oracle_equivalence,
    },
    Criterion {
        id: 3,
        name: "scheme closed forms",
        budget: Duration::from_secs(5),
        check: scheme_closed_forms,
    },
    Criterion {
        id: 4,
        name: "optimal application counts",
        budget: Duration::from_secs(1),
        check: application_counts,
    },
    Criterion {
        id: 5,
        name: "gcd round bound",
        budget: Duration::from_secs(10),
        check: gcd_round_bound,
    },
    Criterion {
        id: 6,
        name: "super-linear speedup trend",
        budget: Duration::from_secs(180),
        check: speedup_trend,
    },
    Criterion {
        id: 7,
        name: "termination behavior",
        budget: Duration::from_secs(10),
        check: termination,
    },
    Criterion {
        id: 8,
        name: "parser round-trip",
        budget: Duration::from_secs(1),
        check: parser_round_trip,
    },
];

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in CRITERIA.iter().filter(|c| wanted.is_empty() || wanted.contains(&c.id)) {
        let start = Instant::now();
        let result = (c.check)();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > c.budget => Err(format!(
                "{detail}; took {:.2} s, over the {} s budget",
                elapsed.as_secs_f64(),
                c.budget.as_secs()
            )),
            other => other,
        };
        let (status, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "criterion {} {status}: {} ({:.2} s) {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
        failed += usize::from(result.is_err());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn arg(t: &Term, i: usize) -> Option<&Term> {
    t.as_compound().and_then(|c| c.args().get(i))
}

fn int_arg(t: &Term, i: usize) -> Option<BigInt> {
    arg(t, i).and_then(Term::to_bigint)
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

/// `(V, W)` read off `s(A,C) :- A>V ,!, B is A-V, s(B,D), C is V*A-W+D.`
fn sum_params(rule: &GuardedRule) -> Option<(BigInt, BigInt)> {
    let v = int_arg(rule.guard(), 1)?;
    let sum = arg(rule.after(), 1)?;
    let diff = arg(sum, 0)?;
    let v2 = int_arg(arg(diff, 0)?, 0)?;
    let w = int_arg(diff, 1)?;
    (v == v2).then_some((v, w))
}

/// `(A, P, Q)` read off `f(N,F) :- N>A ,!, ..., F is P*F1+Q*F2.`
fn fib_params(rule: &GuardedRule) -> Option<(BigInt, BigInt, BigInt)> {
    let a = int_arg(rule.guard(), 1)?;
    let sum = arg(rule.after(), 1)?;
    Some((a, int_arg(arg(sum, 0)?, 0)?, int_arg(arg(sum, 1)?, 0)?))
}

/// `A` from the guard `A*M<N` or `M>A*N`.
fn gcd_param(rule: &GuardedRule) -> Option<BigInt> {
    let g = rule.guard();
    int_arg(arg(g, 0)?, 0).or_else(|| int_arg(arg(g, 1)?, 0))
}

fn recursive(rules: &[GuardedRule]) -> impl Iterator<Item = &GuardedRule> {
    rules.iter().filter(|r| !r.is_base_case())
}

fn unfold_for(program: &Program, inputs: Vec<Term>) -> Result<Vec<Vec<GuardedRule>>, String> {
    let q = Query::for_program(program, inputs).map_err(|e| e.to_string())?;
    let decks = Engine::new().unfold_decks(program, &q).map_err(|e| e.to_string())?;
    Ok(decks.into_iter().map(|r| r.deck.into_rules()).collect())
}

fn deck_reproduction() -> Outcome {
    let sum = programs::builtin("sum").map_err(|e| e.to_string())?;
    let deck = unfold_for(&sum, vec![Term::small(100)])?.remove(0);
    let got: Vec<_> = recursive(&deck).map(sum_params).collect::<Option<_>>().ok_or("unreadable sum rule")?;
    let want: Vec<(BigInt, BigInt)> = [(64, 2016), (32, 496), (16, 120), (8, 28), (4, 6), (2, 1), (1, 0)]
        .iter()
        .map(|&(v, w)| (big(v), big(w)))
        .collect();
    ensure(got == want, || format!("sum(100) deck parameters {got:?}"))?;
    ensure(deck.last().is_some_and(GuardedRule::is_base_case), || "sum deck lacks its base case".into())?;

    let fib = programs::builtin("fib").map_err(|e| e.to_string())?;
    let deck = unfold_for(&fib, vec![Term::small(20)])?.remove(0);
    let got: Vec<_> = recursive(&deck).map(fib_params).collect::<Option<_>>().ok_or("unreadable fib rule")?;
    let want: Vec<_> = [(16, 1597, 987), (8, 34, 21), (4, 5, 3), (2, 2, 1), (1, 1, 1)]
        .iter()
        .map(|&(a, p, q)| (big(a), big(p), big(q)))
        .collect();
    ensure(got == want, || format!("fib(20) deck parameters {got:?}"))?;

    let gcd = programs::builtin("gcd").map_err(|e| e.to_string())?;
    let first = unfold_for(&gcd, vec![Term::small(3), Term::small(40)])?.remove(0);
    let second = unfold_for(&gcd, vec![Term::small(40), Term::small(3)])?.remove(1);
    let want: Vec<BigInt> = [8, 4, 2, 1].map(big).to_vec();
    for (which, deck) in [("first", &first), ("second", &second)] {
        let got: Vec<_> = recursive(deck).map(gcd_param).collect::<Option<_>>().ok_or("unreadable gcd rule")?;
        ensure(got == want, || format!("{which} gcd deck parameters {got:?}"))?;
    }
    Ok(format!(
        "sum(100) top rule `{}`; fib(20) top rule `{}`",
        format_rule(&unfold_for(&sum, vec![Term::small(100)])?[0][0]),
        format_rule(&unfold_for(&fib, vec![Term::small(20)])?[0][0])
    ))
}

fn answer(program: &Program, inputs: Vec<Term>, mode: Mode) -> Result<Option<Term>, String> {
    let q = Query::for_program(program, inputs).map_err(|e| e.to_string())?;
    let out: RunOutcome = Engine::new().run(program, &q, mode).map_err(|e| format!("{}: {e}", q.goal))?;
    Ok(out.solved.then(|| out.value("R").cloned()).flatten())
}

fn fib_table(n: usize) -> Vec<BigInt> {
    let mut f = vec![BigInt::zero(), BigInt::one()];
    while f.len() <= n {
        let next = &f[f.len() - 1] + &f[f.len() - 2];
        f.push(next);
    }
    f
}

fn euclid(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn all_modes_agree(program: &Program, inputs: Vec<Term>, expected: &Term) -> Result<(), String> {
    for mode in [Mode::Unfold, Mode::Naive] {
        let got = answer(program, inputs.clone(), mode)?;
        ensure(got.as_ref() == Some(expected), || {
            format!(
                "{} {mode} on {:?}: got {got:?}, want {expected}",
                program.name(),
                inputs.iter().map(Term::to_string).collect::<Vec<_>>()
            )
        })?;
    }
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let load = |n| programs::builtin(n).map_err(|e| e.to_string());
    let (sum, fib, gcd, rev, sort) = (load("sum")?, load("fib")?, load("gcd")?, load("rev")?, load("sort")?);
    for n in 1..=512u64 {
        all_modes_agree(&sum, vec![Term::from(big(n))], &Term::from(big(n * (n + 1) / 2)))?;
    }
    let fibs = fib_table(24);
    for (n, want) in fibs.iter().enumerate().skip(1) {
        all_modes_agree(&fib, vec![Term::small(n as i64)], &Term::from(want.clone()))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let (m, n) = (rng.gen_range(1..=200u64), rng.gen_range(1..=200u64));
        all_modes_agree(&gcd, vec![Term::from(big(m)), Term::from(big(n))], &Term::from(big(euclid(m, n))))?;
    }
    for _ in 0..200 {
        let len = rng.gen_range(0..=64);
        let items: Vec<i64> = (0..len).map(|_| rng.gen_range(-100..1000)).collect();
        let input = Term::list(items.iter().copied().map(Term::small));
        let mut reversed = items.clone();
        reversed.reverse();
        all_modes_agree(&rev, vec![input.clone()], &Term::list(reversed.into_iter().map(Term::small)))?;
        let mut sorted = items;
        sorted.sort_unstable();
        all_modes_agree(&sort, vec![input], &Term::list(sorted.into_iter().map(Term::small)))?;
    }
    Ok("sum 1..512, fib 1..24, 200 gcd pairs, 200 reversals and 200 sorts agree in both modes".into())
}

fn first_recursive(name: &str) -> Result<GuardedRule, String> {
    let p = programs::builtin(name).map_err(|e| e.to_string())?;
    let rule = recursive(p.decks()[0].rules()).next().cloned();
    rule.ok_or_else(|| format!("{name} has no recursive rule"))
}

fn scheme_closed_forms() -> Outcome {
    let scheme = SumScheme::new();
    let mut rule = first_recursive("sum")?;
    for i in 0..=64u32 {
        let (v, w) = sum_params(&rule).ok_or_else(|| format!("unreadable sum rule at step {i}"))?;
        let want_w = if i == 0 { BigInt::zero() } else { pow2(i - 1) * (pow2(i) - 1) };
        ensure(v == pow2(i) && w == want_w, || format!("sum step {i}: V={v}, W={w}"))?;
        rule = scheme.step(&rule).map_err(|e| e.to_string())?;
    }

    // F(2^i) and F(2^i + 1) for i <= 16, and the full table up to 4096
    let table = fib_table(4097);
    let mut at_powers = Vec::new();
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    let mut k = 0usize;
    for i in 0..=16u32 {
        while k < 1 << i {
            (a, b) = (b.clone(), a + b);
            k += 1;
        }
        at_powers.push((a.clone(), b.clone()));
    }

    let scheme = FibScheme::new();
    let mut rule = first_recursive("fib")?;
    let mut identities = 0u64;
    for (i, (fa, fa1)) in at_powers.iter().enumerate() {
        let (a, p, q) = fib_params(&rule).ok_or_else(|| format!("unreadable fib rule at step {i}"))?;
        ensure(a == pow2(i as u32), || format!("fib step {i}: A={a}"))?;
        ensure(&p == fa1 && &q == fa, || format!("fib step {i}: P or Q differs from F(2^{i}+1), F(2^{i})"))?;
        let a: usize = 1 << i;
        for n in a + 1..=4096 {
            ensure(table[n] == &p * &table[n - a] + &q * &table[n - a - 1], || {
                format!("F({n}) != P*F({})+Q*F({}) for A={a}", n - a, n - a - 1)
            })?;
            identities += 1;
        }
        if i < 16 {
            rule = scheme.step(&rule).map_err(|e| e.to_string())?;
        }
    }
    Ok(format!("65 sum steps, 17 fib steps, {identities} identity instances"))
}

fn application_counts() -> Outcome {
    let sum = programs::builtin("sum").map_err(|e| e.to_string())?;
    let engine = Engine::new();
    for i in 4..=64u32 {
        for (n, want) in [(pow2(i) + 1, 1), (pow2(i), u64::from(i))] {
            let q = Query::for_program(&sum, vec![Term::from(n.clone())]).map_err(|e| e.to_string())?;
            let out = engine.run(&sum, &q, Mode::Unfold).map_err(|e| e.to_string())?;
            let expected = Term::from(&n * (&n + 1u32) / 2u32);
            ensure(out.value("R") == Some(&expected), || format!("wrong sum for n = {n}"))?;
            ensure(out.stats.recursive_applications == want, || {
                format!("n = {n}: {} recursive applications, want {want}", out.stats.recursive_applications)
            })?;
        }
    }
    Ok("n = 2^i+1 takes 1 recursive application and n = 2^i takes i, for i in 4..=64".into())
}

fn gcd_rounds(gcd: &Program, m: BigInt, n: BigInt) -> Result<(u64, BigInt), String> {
    let q = Query::for_program(gcd, vec![Term::from(m.clone()), Term::from(n.clone())]).map_err(|e| e.to_string())?;
    let out = Engine::new().run(gcd, &q, Mode::Unfold).map_err(|e| format!("gcd({m},{n}): {e}"))?;
    let x = out.value("R").and_then(Term::to_bigint).ok_or_else(|| format!("gcd({m},{n}) gave no answer"))?;
    Ok((out.stats.rounds, x))
}

fn gcd_round_bound() -> Outcome {
    let gcd = programs::builtin("gcd").map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let (m, n) = (rng.gen_range(1..=u64::MAX), rng.gen_range(1..=u64::MAX));
        let (rounds, x) = gcd_rounds(&gcd, big(m), big(n))?;
        ensure(x == big(euclid(m, n)), || format!("gcd({m},{n}) = {x}"))?;
        let bound = 2.0 * (m.max(n) as f64).log2() + 2.0;
        ensure(rounds as f64 <= bound, || format!("gcd({m},{n}) used {rounds} rounds, bound {bound:.1}"))?;
        worst = worst.max(rounds as f64 / bound);
    }
    for k in 0..=1000u32 {
        let (rounds, x) = gcd_rounds(&gcd, pow2(k), big(37))?;
        ensure(x.is_one(), || format!("gcd(2^{k},37) = {x}"))?;
        let bound = 2.0 * f64::from(k).max(37f64.log2()) + 2.0;
        ensure(rounds as f64 <= bound, || format!("gcd(2^{k},37) used {rounds} rounds, bound {bound:.1}"))?;
        worst = worst.max(rounds as f64 / bound);
    }
    Ok(format!("largest rounds/bound ratio {worst:.3}"))
}

fn median_total(engine: &Engine, program: &Program, n: BigInt, mode: Mode, reps: usize) -> Result<Duration, String> {
    let q = Query::for_program(program, vec![Term::from(n)]).map_err(|e| e.to_string())?;
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let out = engine.run(program, &q, mode).map_err(|e| e.to_string())?;
        ensure(out.solved, || format!("{} failed", q.goal))?;
        times.push(out.stats.total_time);
    }
    times.sort();
    Ok(times[reps / 2])
}

fn ratios(times: &[Duration]) -> Vec<f64> {
    times.windows(2).map(|w| w[1].as_secs_f64() / w[0].as_secs_f64()).collect()
}

fn fmt_ratios(r: &[f64]) -> String {
    r.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ")
}

fn speedup_trend() -> Outcome {
    let engine = Engine::new();
    let sum = programs::builtin("sum").map_err(|e| e.to_string())?;
    let fib = programs::builtin("fib").map_err(|e| e.to_string())?;
    let mut failures = Vec::new();

    let naive_sum = (18..=22)
        .map(|k| median_total(&engine, &sum, pow2(k), Mode::Naive, 3))
        .collect::<Result<Vec<_>, _>>()?;
    let r = ratios(&naive_sum);
    if !r.iter().all(|x| (1.5..=3.0).contains(x)) {
        failures.push(format!("naive sum ratios {} outside [1.5, 3.0]", fmt_ratios(&r)));
    }
    let naive_sum_text = fmt_ratios(&r);

    let unfolded_sum = [100, 200, 400]
        .into_iter()
        .map(|k| median_total(&engine, &sum, pow2(k), Mode::Unfold, 31))
        .collect::<Result<Vec<_>, _>>()?;
    let r = ratios(&unfolded_sum);
    if !r.iter().all(|x| (1.3..=4.0).contains(x)) {
        failures.push(format!("unfolded sum ratios {} outside [1.3, 4.0]", fmt_ratios(&r)));
    }
    let unfolded_sum_text = fmt_ratios(&r);

    let naive_fib = (30..=34)
        .map(|n| median_total(&engine, &fib, big(n), Mode::Naive, 1))
        .collect::<Result<Vec<_>, _>>()?;
    let r = ratios(&naive_fib);
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    if mean < 1.3 {
        failures.push(format!("naive fib mean ratio {mean:.2} below 1.3"));
    }

    let start = Instant::now();
    let q = Query::for_program(&fib, vec![Term::from(pow2(18))]).map_err(|e| e.to_string())?;
    let out = engine.run(&fib, &q, Mode::Unfold).map_err(|e| e.to_string())?;
    let fib_time = start.elapsed();
    if !out.solved || fib_time > Duration::from_secs(5) {
        failures.push(format!("unfolded fib(2^18) took {:.2} s", fib_time.as_secs_f64()));
    }

    let detail = format!(
        "naive sum T(2n)/T(n) [{naive_sum_text}]; unfolded sum [{unfolded_sum_text}]; naive fib mean {mean:.2}; unfolded fib(2^18) {:.2} s",
        fib_time.as_secs_f64()
    );
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", failures.join("; ")))
    }
}

/// Runs `f` on its own thread and gives up after five seconds.
fn with_watchdog<T: Send + 'static>(what: &str, f: impl FnOnce() -> T + Send + 'static) -> Result<T, String> {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let _ = tx.send(f());
    });
    rx.recv_timeout(Duration::from_secs(5))
        .map_err(|_| format!("{what} did not finish within 5 s"))
}

fn umr_outcome(program: Arc<Program>, goal: Term) -> recunfold::Result<()> {
    let schemes = Engine::new().registry.for_program(&program)?;
    let mut b = Bindings::new();
    let frame = b.alloc_frame(goal.vars().iter().map(|v| v.0 + 1).max().unwrap_or(0));
    let mut state = RoundRobinState::new(program.decks().to_vec(), schemes, b.resolve_in(&goal, frame));
    umr(&goal, frame, &mut state, &mut b, RoundRobinOptions::default())
}

fn termination() -> Outcome {
    let gcd = Arc::new(programs::builtin("gcd").map_err(|e| e.to_string())?);
    let sum = Arc::new(programs::builtin("sum").map_err(|e| e.to_string())?);
    let g = |a: i64, b: Term| Term::compound("g", vec![Term::small(a), b, Term::var(VarId(0))]);
    let mut cases: Vec<(Arc<Program>, Term)> = vec![
        (gcd.clone(), g(1, Term::small(0))),
        (gcd.clone(), Term::compound("g", vec![Term::small(0), Term::small(0), Term::small(1)])),
        (sum.clone(), Term::compound("s", vec![Term::small(0), Term::var(VarId(0))])),
        (sum.clone(), Term::compound("s", vec![Term::small(-7), Term::var(VarId(0))])),
    ];
    // equal arguments and a wrong answer: no guard or head ever matches
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a = rng.gen_range(1..1_000_000i64);
        let x = a + rng.gen_range(1..1000);
        cases.push((gcd.clone(), Term::compound("g", vec![Term::small(a), Term::small(a), Term::small(x)])));
    }
    let n = cases.len();
    for (program, goal) in cases {
        let what = format!("umr on {goal}");
        let result = with_watchdog(&what, move || umr_outcome(program, goal))?;
        ensure(matches!(result, Err(Error::NoProgress(_))), || format!("{what}: {result:?}"))?;
    }

    let mut child = Command::new(env!("CARGO_BIN_EXE_recunfold"))
        .args(["run", "gcd", "1", "0"])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| e.to_string())?;
    let deadline = Instant::now() + Duration::from_secs(5);
    let status = loop {
        if let Some(status) = child.try_wait().map_err(|e| e.to_string())? {
            break status;
        }
        if Instant::now() > deadline {
            let _ = child.kill();
            return Err("`recunfold run gcd 1 0` did not finish within 5 s".into());
        }
        thread::sleep(Duration::from_millis(10));
    };
    ensure(status.code() == Some(2), || format!("`recunfold run gcd 1 0` exited with {status}"))?;
    Ok(format!("{n} queries end in NoProgress; the CLI exits with code 2"))
}

/// Random rules over the predicate `p/arity`, for parse and print checks.
struct RuleGen {
    rng: ChaCha8Rng,
    vars: u32,
    arity: usize,
}

impl RuleGen {
    fn var(&mut self) -> Term {
        Term::var(VarId(self.rng.gen_range(0..self.vars)))
    }

    fn int(&mut self) -> Term {
        Term::small(self.rng.gen_range(-50..50))
    }

    fn expr(&mut self, depth: u32) -> Term {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return if self.rng.gen_bool(0.5) { self.var() } else { self.int() };
        }
        let op = ["+", "-", "*"][self.rng.gen_range(0..3)];
        Term::compound(op, vec![self.expr(depth - 1), self.expr(depth - 1)])
    }

    fn head_arg(&mut self) -> Term {
        match self.rng.gen_range(0..5) {
            0 => self.int(),
            1 => Term::atom(["a", "nil", "x1"][self.rng.gen_range(0..3)]),
            2 => {
                let items: Vec<Term> = (0..self.rng.gen_range(0..3)).map(|_| self.var()).collect();
                let tail = if self.rng.gen_bool(0.5) { self.var() } else { Term::nil() };
                Term::list_with_tail(items, tail)
            }
            _ => self.var(),
        }
    }

    fn call(&mut self) -> Term {
        let args = (0..self.arity).map(|_| self.head_arg()).collect();
        Term::compound("p", args)
    }

    fn goals(&mut self, max: usize, mut goal: impl FnMut(&mut Self) -> Term) -> Term {
        let n = self.rng.gen_range(0..=max);
        let goals: Vec<Term> = (0..n).map(|_| goal(self)).collect();
        Term::conjunction(goals)
    }

    fn rule(&mut self) -> GuardedRule {
        loop {
            self.vars = self.rng.gen_range(1..7);
            self.arity = self.rng.gen_range(1..4);
            let head = self.call();
            let guard = self.goals(3, |g| {
                let op = ["<", ">", "=<", ">=", "=", "\\="][g.rng.gen_range(0..6)];
                let (l, r) = if op == "=" { (g.var(), g.head_arg()) } else { (g.expr(2), g.expr(2)) };
                Term::compound(op, vec![l, r])
            });
            let before = self.goals(3, |g| Term::compound("is", vec![g.var(), g.expr(3)]));
            let rec = self.goals(2, Self::call);
            let after = self.goals(2, |g| {
                if g.rng.gen_bool(0.5) {
                    Term::compound("is", vec![g.var(), g.expr(3)])
                } else {
                    Term::compound("append", vec![g.var(), g.head_arg(), g.var()])
                }
            });
            if let Ok(rule) = GuardedRule::new(head, guard, before, rec, after) {
                return rule;
            }
        }
    }
}

fn parser_round_trip() -> Outcome {
    for name in programs::NAMES {
        let p = programs::builtin(name).map_err(|e| e.to_string())?;
        let text = format_program(&p);
        let back = parse_program(&text).map_err(|e| format!("{name}: {e}\n{text}"))?;
        ensure(back.decks() == p.decks(), || format!("{name} changed after printing:\n{text}"))?;
        ensure(back.entry() == p.entry() && back.name() == p.name(), || format!("{name} header changed"))?;
    }
    let mut gen = RuleGen {
        rng: ChaCha8Rng::seed_from_u64(8),
        vars: 1,
        arity: 1,
    };
    for _ in 0..100 {
        let rule = gen.rule();
        let text = format_rule(&rule);
        let back = parse_rule(&text).map_err(|e| format!("`{text}`: {e}"))?;
        ensure(back == rule, || format!("`{text}` reads back as `{}`", format_rule(&back)))?;
    }
    Ok(format!("{} shipped programs and 100 generated rules", programs::NAMES.len()))
}
