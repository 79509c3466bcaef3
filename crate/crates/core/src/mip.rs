//! Optimal rule application over an unfolded deck.
//!
//! Rules are tried most unfolded first. Once a rule's guard holds the
//! interpreter commits to it, and its recursive goals only see the rest of
//! the deck, so every rule is applied at most once along any path.
//! Conjunctions of recursive goals restart from the deck they were given,
//! which is what lets doubly recursive rules work.

use crate::bindings::{Bindings, Frame};
use crate::builtins::{eval_builtin, is_builtin};
use crate::error::{Error, Result};
use crate::rule::{GuardedRule, RuleDeck};
use crate::term::{Symbol, Term};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MipStats {
    /// Rules applied (guard held), base cases included.
    pub rule_applications: u64,
    /// Applications of rules with recursive goals.
    pub recursive_applications: u64,
    pub guard_probes: u64,
    pub builtin_calls: u64,
    /// Deepest nesting of rule applications.
    pub max_depth: u64,
    /// Times a deck rule was applied twice on one root-to-leaf path; zero
    /// unless the interpreter is broken.
    pub repeated_on_path: u64,
}

impl MipStats {
    pub fn absorb(&mut self, other: &MipStats) {
        self.rule_applications += other.rule_applications;
        self.recursive_applications += other.recursive_applications;
        self.guard_probes += other.guard_probes;
        self.builtin_calls += other.builtin_calls;
        self.max_depth = self.max_depth.max(other.max_depth);
        self.repeated_on_path += other.repeated_on_path;
    }
}

#[derive(Clone, Debug)]
pub struct MipOutcome {
    /// Unprocessed goals, `true` when the goal was solved completely.
    pub continuation: Term,
    pub stats: MipStats,
}

enum Outcome {
    Solved,
    Failed,
    /// Deck exhausted; the goal is left over.
    Residual(Term),
}

struct Interpreter<'a> {
    deck: &'a [GuardedRule],
    with_continuation: bool,
    stats: MipStats,
    on_path: Vec<bool>,
}

/// Interprets `goal` with `deck`. `Ok(false)` is failure: no rule applied,
/// or a goal in a committed rule body failed.
pub fn mip(goal: &Term, frame: Frame, deck: &RuleDeck, bindings: &mut Bindings) -> Result<(bool, MipStats)> {
    let mut interp = Interpreter::new(deck, false);
    let solved = match interp.solve(goal, frame, 0, 0, bindings)? {
        Outcome::Solved => true,
        Outcome::Failed => false,
        Outcome::Residual(_) => unreachable!("residuals only in continuation mode"),
    };
    Ok((solved, interp.stats))
}

/// Like [`mip`], but when the deck runs out the remaining goal is returned
/// as the continuation instead of failing. A failing goal inside a
/// committed rule body is [`Error::CommittedBodyFailure`].
pub fn mip_cont(goal: &Term, frame: Frame, deck: &RuleDeck, bindings: &mut Bindings) -> Result<MipOutcome> {
    let mut interp = Interpreter::new(deck, true);
    let continuation = match interp.solve(goal, frame, 0, 0, bindings)? {
        Outcome::Solved => Term::truth(),
        Outcome::Residual(t) => t,
        Outcome::Failed => unreachable!("failures are errors in continuation mode"),
    };
    Ok(MipOutcome {
        continuation,
        stats: interp.stats,
    })
}

impl<'a> Interpreter<'a> {
    fn new(deck: &'a RuleDeck, with_continuation: bool) -> Self {
        Interpreter {
            deck: deck.rules(),
            with_continuation,
            stats: MipStats::default(),
            on_path: vec![false; deck.len()],
        }
    }

    fn builtin(&mut self, goal: &Term, frame: Frame, bindings: &mut Bindings) -> Result<bool> {
        self.stats.builtin_calls += 1;
        eval_builtin(goal, frame, bindings)
    }

    fn body_failed(&self, goal: &Term, frame: Frame, bindings: &Bindings) -> Result<Outcome> {
        if self.with_continuation {
            Err(Error::CommittedBodyFailure(bindings.resolve_in(goal, frame).to_string()))
        } else {
            Ok(Outcome::Failed)
        }
    }

    /// Solves `goal` with the deck suffix starting at `start`.
    fn solve(&mut self, goal: &Term, frame: Frame, start: usize, depth: u64, bindings: &mut Bindings) -> Result<Outcome> {
        let (goal, frame) = bindings.deref(goal, frame);
        if goal.is_true() {
            return Ok(Outcome::Solved);
        }
        if goal.is_functor(Symbol::COMMA, 2) {
            let args = goal.as_compound().expect("conjunction").args();
            let left = self.solve(&args[0], frame, start, depth, bindings)?;
            if matches!(left, Outcome::Failed) {
                return Ok(Outcome::Failed);
            }
            let right = self.solve(&args[1], frame, start, depth, bindings)?;
            return Ok(match (left, right) {
                (_, Outcome::Failed) => Outcome::Failed,
                (Outcome::Solved, r) => r,
                (l, Outcome::Solved) => l,
                (Outcome::Residual(l), Outcome::Residual(r)) => {
                    Outcome::Residual(Term::binary(Symbol::COMMA, l, r))
                }
                (Outcome::Failed, _) => unreachable!(),
            });
        }
        if is_builtin(&goal) {
            return if self.builtin(&goal, frame, bindings)? {
                Ok(Outcome::Solved)
            } else {
                self.body_failed(&goal, frame, bindings)
            };
        }
        for index in start..self.deck.len() {
            let rule = &self.deck[index];
            self.stats.guard_probes += 1;
            let mark = bindings.var_count();
            let cp = bindings.checkpoint();
            let f = bindings.alloc_frame(rule.var_count());
            let applies = bindings.unify_in(rule.head(), f, &goal, frame)
                && match eval_builtin(rule.guard(), f, bindings) {
                    Ok(ok) => ok,
                    Err(e) => {
                        bindings.rollback(cp);
                        bindings.release_vars(mark);
                        return Err(e);
                    }
                };
            if !applies {
                bindings.rollback(cp);
                bindings.release_vars(mark);
                continue;
            }
            bindings.commit(cp);
            self.stats.rule_applications += 1;
            if !rule.is_base_case() {
                self.stats.recursive_applications += 1;
            }
            self.stats.max_depth = self.stats.max_depth.max(depth + 1);
            if self.on_path[index] {
                self.stats.repeated_on_path += 1;
            }
            self.on_path[index] = true;
            let outcome = self.apply(rule, f, index, depth, bindings);
            self.on_path[index] = false;
            return outcome;
        }
        if self.with_continuation {
            Ok(Outcome::Residual(bindings.resolve_in(&goal, frame)))
        } else {
            Ok(Outcome::Failed)
        }
    }

    fn apply(&mut self, rule: &GuardedRule, f: Frame, index: usize, depth: u64, bindings: &mut Bindings) -> Result<Outcome> {
        if !rule.before().is_true() && !self.builtin(rule.before(), f, bindings)? {
            return self.body_failed(rule.before(), f, bindings);
        }
        let inner = self.solve(rule.rec_goals(), f, index + 1, depth + 1, bindings)?;
        if matches!(inner, Outcome::Failed) {
            return Ok(Outcome::Failed);
        }
        if !rule.after().is_true() && !self.builtin(rule.after(), f, bindings)? {
            return self.body_failed(rule.after(), f, bindings);
        }
        Ok(inner)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_rule, parse_term_with_names};
    use crate::scheme::{FibScheme, SumScheme};
    use crate::unfold::{unfold_repeat, StepLimit};

    fn deck(rules: &[&str]) -> RuleDeck {
        rules.iter().map(|r| parse_rule(r).unwrap()).collect()
    }

    fn query(text: &str, b: &mut Bindings) -> (Term, Frame, Vec<(String, crate::term::VarId)>) {
        let (t, names) = parse_term_with_names(text).unwrap();
        let f = b.alloc_frame(names.len() as u32);
        (t, f, names)
    }

    fn answer(b: &Bindings, f: Frame, names: &[(String, crate::term::VarId)], name: &str) -> Term {
        let v = names.iter().find(|(n, _)| n == name).unwrap().1;
        b.resolve_in(&Term::Var(v), f)
    }

    #[test]
    fn sum_10_with_five_rule_deck() {
        let d = deck(&[
            "s(A,C) :- A>8 ,!, B is A-8, s(B,D), C is 8*A-28+D.",
            "s(A,C) :- A>4 ,!, B is A-4, s(B,D), C is 4*A-6+D.",
            "s(A,C) :- A>2 ,!, B is A-2, s(B,D), C is 2*A-1+D.",
            "s(A,C) :- A>1 ,!, B is A-1, s(B,D), C is 1*A-0+D.",
            "s(A,B) :- A=1 ,!, B=1, true, true.",
        ]);
        let mut b = Bindings::new();
        let (g, f, names) = query("s(10,R)", &mut b);
        let (ok, stats) = mip(&g, f, &d, &mut b).unwrap();
        assert!(ok);
        assert_eq!(answer(&b, f, &names, "R"), Term::small(55));
        // r3 (A>8), then r0 (A>1), then the base case
        assert_eq!(stats.rule_applications, 3);
        assert_eq!(stats.recursive_applications, 2);
        assert_eq!(stats.repeated_on_path, 0);
    }

    #[test]
    fn fib_2_is_one() {
        let original = deck(&[
            "f(N,F) :- N>1 ,!, (N1 is N-1, N2 is N1-1), (f(N1,F1), f(N2,F2)), F is 1*F1+1*F2.",
            "f(N,F) :- N=<1 ,!, F=N, true, true.",
        ]);
        for (n, expected) in [(0, 0), (1, 1), (2, 1), (3, 2), (10, 55), (20, 6765)] {
            let mut b = Bindings::new();
            let (g, f, names) = query(&format!("f({n},F)"), &mut b);
            let u = unfold_repeat(&g, f, &original, &FibScheme::new(), &mut b, StepLimit::Auto).unwrap();
            let (ok, stats) = mip(&g, f, &u.deck, &mut b).unwrap();
            assert!(ok);
            assert_eq!(answer(&b, f, &names, "F"), Term::small(expected), "fib({n})");
            assert_eq!(stats.repeated_on_path, 0);
        }
    }

    #[test]
    fn true_goal_and_empty_deck() {
        let mut b = Bindings::new();
        let (ok, _) = mip(&Term::truth(), Frame::ROOT, &RuleDeck::new(), &mut b).unwrap();
        assert!(ok);
        let out = mip_cont(&Term::truth(), Frame::ROOT, &RuleDeck::new(), &mut b).unwrap();
        assert!(out.continuation.is_true());
        let (g, f, _) = query("g(3,2,X)", &mut b);
        let before = b.snapshot();
        let out = mip_cont(&g, f, &RuleDeck::new(), &mut b).unwrap();
        assert_eq!(out.continuation, b.resolve_in(&g, f));
        assert_eq!(b.snapshot(), before);
        let (ok, _) = mip(&g, f, &RuleDeck::new(), &mut b).unwrap();
        assert!(!ok);
    }

    #[test]
    fn gcd_continuation() {
        let d = deck(&["g(M,N,Z) :- M>1*N ,!, L is M-1*N, g(L,N,Z), true.", "g(M,M,M)."]);
        let mut b = Bindings::new();
        let (g, f, _) = query("g(12,8,X)", &mut b);
        let out = mip_cont(&g, f, &d, &mut b).unwrap();
        let x = b.resolve_in(&Term::Var(crate::term::VarId(0)), f);
        assert_eq!(out.continuation, Term::compound("g", vec![4.into(), 8.into(), x]));
        assert_eq!(out.stats.rule_applications, 1);
    }

    #[test]
    fn conjunction_continuations_pair_up() {
        let d = deck(&["p(X) :- X>5 ,!, true, true, true."]);
        let mut b = Bindings::new();
        let (g, f, _) = query("(p(1), p(9), p(2))", &mut b);
        let out = mip_cont(&g, f, &d, &mut b).unwrap();
        assert_eq!(out.continuation.to_string(), "p(1), p(2)");
    }

    #[test]
    fn committed_body_failure() {
        let d = deck(&["p(X,Y) :- X>0 ,!, Y=2, true, true."]);
        let mut b = Bindings::new();
        let (g, f, _) = query("p(1,3)", &mut b);
        assert!(matches!(mip_cont(&g, f, &d, &mut b), Err(Error::CommittedBodyFailure(_))));
        let (ok, _) = mip(&g, f, &d, &mut b).unwrap();
        assert!(!ok);
    }

    #[test]
    fn one_application_for_power_of_two_plus_one() {
        let original = deck(&[
            "s(A,C) :- A>1 ,!, B is A-1, s(B,D), C is 1*A-0+D.",
            "s(A,B) :- A=1 ,!, B=1, true, true.",
        ]);
        for i in 4..=20u32 {
            for (n, apps) in [((1u64 << i) + 1, 1), (1u64 << i, u64::from(i))] {
                let mut b = Bindings::new();
                let (g, f, names) = query(&format!("s({n},S)"), &mut b);
                let u = unfold_repeat(&g, f, &original, &SumScheme::new(), &mut b, StepLimit::Auto).unwrap();
                let (ok, stats) = mip(&g, f, &u.deck, &mut b).unwrap();
                assert!(ok);
                assert_eq!(stats.recursive_applications, apps, "n = {n}");
                let s = u128::from(n) * u128::from(n + 1) / 2;
                assert_eq!(answer(&b, f, &names, "S").to_bigint().unwrap(), s.into());
            }
        }
    }
}
