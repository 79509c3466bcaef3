//! Built-in predicates usable in guards and rule bodies.
//!
//! The set is closed: anything not recognized by [`Builtin::classify`] is a
//! user predicate and is never executed here.

use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::bindings::{Bindings, Frame};
use crate::error::{Error, Result};
use crate::term::{Symbol, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    True,
    Unify,
    Is,
    Less,
    Greater,
    LessEq,
    GreaterEq,
    NotUnifiable,
    Append,
    Merge,
    Clean,
    Conjunction,
}

impl Builtin {
    pub fn classify(goal: &Term) -> Option<Builtin> {
        let (name, arity) = goal.indicator()?;
        let builtin = match (name, arity) {
            (Symbol::TRUE, 0) => Builtin::True,
            (Symbol::EQ, 2) => Builtin::Unify,
            (Symbol::IS, 2) => Builtin::Is,
            (Symbol::LT, 2) => Builtin::Less,
            (Symbol::GT, 2) => Builtin::Greater,
            (Symbol::LE, 2) => Builtin::LessEq,
            (Symbol::GE, 2) => Builtin::GreaterEq,
            (Symbol::NOT_UNIFIABLE, 2) => Builtin::NotUnifiable,
            (Symbol::APPEND, 3) => Builtin::Append,
            (Symbol::MERGE, 3) => Builtin::Merge,
            (Symbol::CLEAN, 2) => Builtin::Clean,
            (Symbol::COMMA, 2) => Builtin::Conjunction,
            _ => return None,
        };
        Some(builtin)
    }
}

pub fn is_builtin(goal: &Term) -> bool {
    Builtin::classify(goal).is_some()
}

/// True when every conjunct of `goal` is a built-in.
pub fn is_builtin_conjunction(goal: &Term) -> bool {
    goal.conjuncts().iter().all(is_builtin)
}

/// Integer value during evaluation; stays machine-sized while it can.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Num {
    Small(i64),
    Big(BigInt),
}

impl Num {
    fn from_term(t: &Term) -> Option<Num> {
        match t {
            Term::Small(v) => Some(Num::Small(*v)),
            Term::Big(v) => Some(Num::Big((**v).clone())),
            _ => None,
        }
    }

    fn big(&self) -> BigInt {
        match self {
            Num::Small(v) => BigInt::from(*v),
            Num::Big(v) => v.clone(),
        }
    }

    fn into_term(self) -> Term {
        match self {
            Num::Small(v) => Term::Small(v),
            Num::Big(v) => Term::int(v),
        }
    }

    fn combine(
        self,
        other: Num,
        small: fn(i64, i64) -> Option<i64>,
        big: fn(BigInt, BigInt) -> BigInt,
    ) -> Num {
        if let (Num::Small(a), Num::Small(b)) = (&self, &other) {
            if let Some(r) = small(*a, *b) {
                return Num::Small(r);
            }
        }
        let a = match self {
            Num::Small(v) => BigInt::from(v),
            Num::Big(v) => v,
        };
        let b = match other {
            Num::Small(v) => BigInt::from(v),
            Num::Big(v) => v,
        };
        Num::Big(big(a, b))
    }

    fn cmp(&self, other: &Num) -> Ordering {
        match (self, other) {
            (Num::Small(a), Num::Small(b)) => a.cmp(b),
            _ => self.big().cmp(&other.big()),
        }
    }
}

/// Evaluates an arithmetic expression over `+`, `-`, `*` and integers.
pub fn eval_arith(expr: &Term, frame: Frame, bindings: &Bindings) -> Result<Term> {
    eval_num(expr, frame, bindings, expr).map(Num::into_term)
}

fn eval_num(expr: &Term, frame: Frame, bindings: &Bindings, whole: &Term) -> Result<Num> {
    let (t, f) = bindings.deref(expr, frame);
    match &t {
        Term::Small(_) | Term::Big(_) => Ok(Num::from_term(&t).expect("integer term")),
        Term::Var(_) => Err(Error::UnboundArithmetic(
            bindings.resolve_in(whole, frame).to_string(),
        )),
        Term::Compound(c) => match (c.functor(), c.args()) {
            (Symbol::PLUS, [a, b]) => Ok(eval_num(a, f, bindings, whole)?
                .combine(eval_num(b, f, bindings, whole)?, i64::checked_add, |x, y| x + y)),
            (Symbol::MINUS, [a, b]) => Ok(eval_num(a, f, bindings, whole)?
                .combine(eval_num(b, f, bindings, whole)?, i64::checked_sub, |x, y| x - y)),
            (Symbol::TIMES, [a, b]) => Ok(eval_num(a, f, bindings, whole)?
                .combine(eval_num(b, f, bindings, whole)?, i64::checked_mul, |x, y| x * y)),
            (Symbol::MINUS, [a]) => Ok(Num::Small(0).combine(
                eval_num(a, f, bindings, whole)?,
                i64::checked_sub,
                |x, y| x - y,
            )),
            _ => Err(Error::BadExpression(bindings.resolve_in(&t, f).to_string())),
        },
        Term::Atom(_) => Err(Error::BadExpression(t.to_string())),
    }
}

fn compare(goal: &Term, args: &[Term], frame: Frame, bindings: &Bindings) -> Result<Ordering> {
    let side = |t: &Term| match eval_num(t, frame, bindings, t) {
        Err(Error::UnboundArithmetic(_)) => Err(Error::NonGroundGuard(
            bindings.resolve_in(goal, frame).to_string(),
        )),
        other => other,
    };
    Ok(side(&args[0])?.cmp(&side(&args[1])?))
}

/// Compares two integer terms.
pub fn cmp_ints(a: &Term, b: &Term) -> Option<Ordering> {
    Some(Num::from_term(a)?.cmp(&Num::from_term(b)?))
}

/// Runs a built-in goal. `Ok(false)` is logical failure; on failure the
/// bindings are unchanged.
pub fn eval_builtin(goal: &Term, frame: Frame, bindings: &mut Bindings) -> Result<bool> {
    let cp = bindings.checkpoint();
    match run(goal, frame, bindings) {
        Ok(true) => {
            bindings.commit(cp);
            Ok(true)
        }
        other => {
            bindings.rollback(cp);
            other
        }
    }
}

fn run(goal: &Term, frame: Frame, bindings: &mut Bindings) -> Result<bool> {
    let (goal, frame) = bindings.deref(goal, frame);
    let builtin = Builtin::classify(&goal).ok_or_else(|| {
        Error::Type(format!("`{}` is not a built-in", bindings.resolve_in(&goal, frame)))
    })?;
    let args: &[Term] = goal.as_compound().map(|c| c.args()).unwrap_or(&[]);
    Ok(match builtin {
        Builtin::True => true,
        Builtin::Conjunction => {
            // walk the right spine iteratively; merge trees can be long
            if !run(&args[0], frame, bindings)? {
                return Ok(false);
            }
            let (mut rest, mut rest_frame) = bindings.deref(&args[1], frame);
            while rest.is_functor(Symbol::COMMA, 2) {
                let c = rest.as_compound().expect("conjunction").args();
                let (first, next) = (c[0].clone(), c[1].clone());
                if !run(&first, rest_frame, bindings)? {
                    return Ok(false);
                }
                (rest, rest_frame) = bindings.deref(&next, rest_frame);
            }
            run(&rest, rest_frame, bindings)?
        }
        Builtin::Unify => bindings.unify_in(&args[0], frame, &args[1], frame),
        Builtin::Is => {
            let value = eval_arith(&args[1], frame, bindings)?;
            bindings.unify_in(&args[0], frame, &value, Frame::ROOT)
        }
        Builtin::Less => compare(&goal, args, frame, bindings)? == Ordering::Less,
        Builtin::Greater => compare(&goal, args, frame, bindings)? == Ordering::Greater,
        Builtin::LessEq => compare(&goal, args, frame, bindings)? != Ordering::Greater,
        Builtin::GreaterEq => compare(&goal, args, frame, bindings)? != Ordering::Less,
        Builtin::NotUnifiable => !bindings.unifiable_in(&args[0], frame, &args[1], frame),
        Builtin::Append => {
            let items = list_cells(&args[0], frame, bindings).map_err(|_| {
                Error::Type(format!(
                    "append/3 needs a proper list first, got `{}`",
                    bindings.resolve_in(&args[0], frame)
                ))
            })?;
            let items: Vec<Term> = items
                .into_iter()
                .map(|(t, f)| bindings.resolve_in(&t, f))
                .collect();
            let tail = bindings.resolve_in(&args[1], frame);
            let joined = Term::list_with_tail(items, tail);
            bindings.unify_in(&args[2], frame, &joined, Frame::ROOT)
        }
        Builtin::Merge => {
            let left = int_list(&args[0], frame, bindings, &goal)?;
            let right = int_list(&args[1], frame, bindings, &goal)?;
            let merged = Term::list(merge_sorted(left, right));
            bindings.unify_in(&args[2], frame, &merged, Frame::ROOT)
        }
        Builtin::Clean => {
            let cleaned = clean_conjunction(&bindings.resolve_in(&args[0], frame));
            bindings.unify_in(&args[1], frame, &cleaned, Frame::ROOT)
        }
    })
}

/// The cells of a proper list, each with the frame it lives in. `Err(())`
/// for partial or improper lists.
fn list_cells(t: &Term, frame: Frame, bindings: &Bindings) -> std::result::Result<Vec<(Term, Frame)>, ()> {
    let mut out = Vec::new();
    let mut cur = bindings.deref(t, frame);
    loop {
        match &cur.0 {
            Term::Atom(s) if *s == Symbol::NIL => return Ok(out),
            Term::Compound(c) if c.functor() == Symbol::DOT && c.arity() == 2 => {
                if c.is_ground() {
                    // ground remainder: no dereferencing needed
                    let mut rest = Term::Compound(c.clone());
                    loop {
                        match &rest {
                            Term::Atom(s) if *s == Symbol::NIL => return Ok(out),
                            Term::Compound(c) if c.functor() == Symbol::DOT && c.arity() == 2 => {
                                out.push((c.args()[0].clone(), Frame::ROOT));
                                let next = c.args()[1].clone();
                                rest = next;
                            }
                            _ => return Err(()),
                        }
                    }
                }
                out.push((c.args()[0].clone(), cur.1));
                cur = bindings.deref(&c.args()[1], cur.1);
            }
            _ => return Err(()),
        }
    }
}

fn int_list(t: &Term, frame: Frame, bindings: &Bindings, goal: &Term) -> Result<Vec<Term>> {
    let cells = list_cells(t, frame, bindings).map_err(|_| {
        Error::Type(format!(
            "m/3 needs proper integer lists in `{}`",
            bindings.resolve_in(goal, frame)
        ))
    })?;
    cells
        .into_iter()
        .map(|(t, f)| {
            let (v, _) = bindings.deref(&t, f);
            if v.is_int() {
                Ok(v)
            } else {
                Err(Error::Type(format!(
                    "m/3 needs integer elements in `{}`",
                    bindings.resolve_in(goal, frame)
                )))
            }
        })
        .collect()
}

/// Stable merge of two integer lists: on ties the left element goes first.
/// Sorted inputs give a sorted output; unsorted inputs are merged as given.
pub fn merge_sorted(left: Vec<Term>, right: Vec<Term>) -> Vec<Term> {
    let mut out = Vec::with_capacity(left.len() + right.len());
    let mut l = left.into_iter().peekable();
    let mut r = right.into_iter().peekable();
    loop {
        let take_left = match (l.peek(), r.peek()) {
            (Some(a), Some(b)) => cmp_ints(a, b) != Some(Ordering::Greater),
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        out.push(if take_left { l.next() } else { r.next() }.expect("peeked"));
    }
    out
}

/// Drops `true` conjuncts and flattens nested conjunctions into a
/// right-associated chain. An empty result is `true`.
pub fn clean_conjunction(goal: &Term) -> Term {
    Term::conjunction(goal.conjuncts().into_iter().filter(|g| !g.is_true()))
}
