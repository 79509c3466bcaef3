//! Reference interpreter: committed-choice execution of the original
//! program, without unfolding, plus closed-form answers for the numeric
//! programs.
//!
//! Clause selection and recursion are implemented here independently of
//! [`crate::mip`]; only terms, bindings and built-ins are shared. Goals live
//! on an explicit stack, so recursion depth is bounded by memory only.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::bindings::{Bindings, Frame};
use crate::builtins::{eval_builtin, is_builtin};
use crate::error::{Error, Result};
use crate::rule::{GuardedRule, Program};
use crate::term::{Symbol, Term, VarId};

pub const DEFAULT_STEP_LIMIT: u64 = 1 << 32;

#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub step_limit: u64,
    pub program: Program,
}

impl OracleConfig {
    pub fn new(program: Program) -> Self {
        OracleConfig {
            step_limit: DEFAULT_STEP_LIMIT,
            program,
        }
    }

    pub fn with_step_limit(mut self, step_limit: u64) -> Self {
        assert!(step_limit > 0, "step limit must be positive");
        self.step_limit = step_limit;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleStats {
    /// Goals taken off the stack.
    pub steps: u64,
    pub clause_applications: u64,
    pub builtin_calls: u64,
    pub max_stack: u64,
}

/// Runs `goal` against the program. `Ok(false)` is failure: no clause
/// applies to some goal, or a built-in in a committed body fails.
pub fn solve_naive(goal: &Term, frame: Frame, config: &OracleConfig, bindings: &mut Bindings) -> Result<(bool, OracleStats)> {
    let clauses = config.program.clauses();
    let mut stats = OracleStats::default();
    let mut stack = vec![Task::Goal(goal.clone(), frame)];
    // watched variables of all pending releases, innermost last
    let mut watched: Vec<VarId> = Vec::new();
    while let Some(task) = stack.pop() {
        let (goal, frame) = match task {
            Task::Goal(goal, frame) => (goal, frame),
            Task::Release { mark, watch_from } => {
                release(bindings, mark, &watched[watch_from..]);
                watched.truncate(watch_from);
                continue;
            }
        };
        stats.steps += 1;
        if stats.steps > config.step_limit {
            return Err(Error::StepLimitExceeded(config.step_limit));
        }
        let (goal, frame) = bindings.deref(&goal, frame);
        if goal.is_true() {
            continue;
        }
        if goal.is_functor(Symbol::COMMA, 2) {
            let args = goal.as_compound().expect("conjunction").args();
            stack.push(Task::Goal(args[1].clone(), frame));
            stack.push(Task::Goal(args[0].clone(), frame));
            continue;
        }
        if is_builtin(&goal) {
            stats.builtin_calls += 1;
            if !eval_builtin(&goal, frame, bindings)? {
                return Ok((false, stats));
            }
            continue;
        }
        let watch_from = watched.len();
        bindings.unbound_vars_in(&goal, frame, &mut watched);
        let mark = bindings.var_count();
        let Some((clause, f)) = select(&clauses, &goal, frame, bindings)? else {
            return Ok((false, stats));
        };
        stats.clause_applications += 1;
        stack.push(Task::Release { mark, watch_from });
        for part in [clause.after(), clause.rec_goals(), clause.before()] {
            if !part.is_true() {
                stack.push(Task::Goal(part.clone(), f));
            }
        }
        stats.max_stack = stats.max_stack.max(stack.len() as u64);
    }
    Ok((true, stats))
}

enum Task {
    Goal(Term, Frame),
    /// The body of a clause activated at variable count `mark` is done;
    /// the calling goal's variables that were unbound at the call are
    /// listed from `watch_from` on.
    Release { mark: u32, watch_from: usize },
}

/// Frees the variables of a finished clause body when the caller's
/// variables no longer depend on them.
fn release(bindings: &mut Bindings, mark: u32, watch: &[VarId]) {
    let mut fixed = Vec::with_capacity(watch.len());
    for &v in watch {
        if !bindings.is_bound(v) {
            continue;
        }
        let t = bindings.resolve(&Term::Var(v));
        if !t.is_ground() && t.vars().iter().any(|w| w.0 >= mark) {
            return;
        }
        fixed.push((v, t));
    }
    for (v, t) in fixed {
        bindings.rebind(v, t);
    }
    bindings.discard_vars(mark);
}

/// First clause whose head unifies with the goal and whose guard holds,
/// with the frame it was activated in. Bindings from the head and guard
/// are kept for that clause only.
fn select<'a>(
    clauses: &'a [GuardedRule],
    goal: &Term,
    frame: Frame,
    bindings: &mut Bindings,
) -> Result<Option<(&'a GuardedRule, Frame)>> {
    for clause in clauses {
        let mark = bindings.var_count();
        let cp = bindings.checkpoint();
        let f = bindings.alloc_frame(clause.var_count());
        let holds = if bindings.unify_in(clause.head(), f, goal, frame) {
            eval_builtin(clause.guard(), f, bindings)
        } else {
            Ok(false)
        };
        match holds {
            Ok(true) => {
                bindings.commit(cp);
                return Ok(Some((clause, f)));
            }
            Ok(false) => {
                bindings.rollback(cp);
                bindings.release_vars(mark);
            }
            Err(e) => {
                bindings.rollback(cp);
                bindings.release_vars(mark);
                return Err(e);
            }
        }
    }
    Ok(None)
}

/// Known answers: `sum` is `n(n+1)/2`, `fib` the Fibonacci number with
/// `fib(0) = 0`, `gcd` Euclid's algorithm with remainders.
pub fn closed_form(predicate: &str, inputs: &[BigInt]) -> Result<BigInt> {
    let bad = |what: &str| Error::Type(format!("{predicate}: {what}"));
    match (predicate, inputs) {
        ("sum" | "s", [n]) => Ok(n * (n + 1u32) / 2u32),
        ("fib" | "f", [n]) => {
            if n.is_negative() {
                return Err(bad("negative index"));
            }
            Ok(fib_fast_doubling(n))
        }
        ("gcd" | "g", [a, b]) => Ok(gcd_euclid(a.abs(), b.abs())),
        ("sum" | "s" | "fib" | "f" | "gcd" | "g", _) => Err(bad("wrong number of inputs")),
        _ => Err(Error::UnsupportedPredicate(predicate.to_string())),
    }
}

fn fib_fast_doubling(n: &BigInt) -> BigInt {
    // (F(k), F(k+1)) over the bits of n, most significant first
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for i in (0..n.bits()).rev() {
        let c = &a * (2 * &b - &a);
        let d = &a * &a + &b * &b;
        if n.bit(i) {
            (a, b) = (d.clone(), c + d);
        } else {
            (a, b) = (c, d);
        }
    }
    a
}

fn gcd_euclid(mut a: BigInt, mut b: BigInt) -> BigInt {
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}
