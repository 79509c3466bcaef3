//! Schemes for list recursion. The rule itself is the state: each step
//! glues two renamed copies of the rule together, doubling the prefix of
//! the input list the rule consumes.

use crate::bindings::{Bindings, Frame};
use crate::builtins::clean_conjunction;
use crate::error::SchemeError;
use crate::rule::GuardedRule;
use crate::term::{Symbol, Term};

use super::{mismatch, Scheme, Template};

/// Items and tail of a partial list `[X1,...,Xk|T]`.
fn open_list(t: &Term) -> (Vec<Term>, Term) {
    let mut items = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Compound(c) if c.functor() == Symbol::DOT && c.arity() == 2 => {
                items.push(c.args()[0].clone());
                cur = &c.args()[1];
            }
            _ => return (items, cur.clone()),
        }
    }
}

/// Checks that `pattern` is `[X1,...,Xk|T]` with `k >= 1` and `T` the
/// recursive call's input variable; returns `k`.
fn prefix_width(scheme: &str, pattern: &Term, rec_input: &Term) -> Result<usize, SchemeError> {
    let (items, tail) = open_list(pattern);
    if items.is_empty() || !tail.is_var() || &tail != rec_input {
        return Err(mismatch(
            scheme,
            format!("guard pattern `{pattern}` is not a partial list ending in `{rec_input}`"),
        ));
    }
    Ok(items.len())
}

fn arg(t: &Term, i: usize) -> &Term {
    &t.as_compound().expect("template-checked compound").args()[i]
}

/// Activates two copies of `rule`: the recursive call of the first is
/// unified with the head of the second, and the second's guard equation is
/// solved, extending the first copy's partial list.
fn glue_copies(scheme: &str, rule: &GuardedRule) -> Result<(Bindings, Frame, Frame), SchemeError> {
    let mut b = Bindings::new();
    let f1 = b.alloc_frame(rule.var_count());
    let f2 = b.alloc_frame(rule.var_count());
    let guard = rule.guard();
    if !b.unify_in(rule.rec_goals(), f1, rule.head(), f2) || !b.unify_in(arg(guard, 0), f2, arg(guard, 1), f2) {
        return Err(mismatch(scheme, "the two rule copies do not combine"));
    }
    Ok((b, f1, f2))
}

/// `r(A,B) :- A=E ,!, true, r(C,D), append(D,F,B)` where `E` is a partial
/// list ending in `C` and `F` lists the elements of `E` in reverse.
pub struct ReverseScheme {
    template: Template,
}

impl ReverseScheme {
    pub fn new() -> Self {
        ReverseScheme {
            template: Template::new(
                "rev",
                "r(A,B) :- A=E ,!, true, r(C,D), append(D,F,B).",
                &["E", "F"],
            ),
        }
    }

    /// Number of list elements one application of the rule consumes.
    pub fn width(&self, rule: &GuardedRule) -> Result<usize, SchemeError> {
        let p = self.template.match_rule(rule)?;
        let width = prefix_width("rev", &p[0], arg(rule.rec_goals(), 0))?;
        if p[1].list_items().is_none() {
            return Err(mismatch("rev", format!("`{}` is not a proper list", p[1])));
        }
        Ok(width)
    }
}

impl Default for ReverseScheme {
    fn default() -> Self {
        Self::new()
    }
}

impl Scheme for ReverseScheme {
    fn name(&self) -> &str {
        "rev"
    }

    fn applies_to(&self, rule: &GuardedRule) -> bool {
        self.width(rule).is_ok()
    }

    fn step(&self, rule: &GuardedRule) -> Result<GuardedRule, SchemeError> {
        self.width(rule)?;
        let (b, f1, f2) = glue_copies("rev", rule)?;
        let after = rule.after();
        let mut reversed = b.resolve_in(arg(after, 1), f2).list_items().expect("checked list");
        reversed.extend(b.resolve_in(arg(after, 1), f1).list_items().expect("checked list"));
        let append = Term::from_symbol(
            Symbol::APPEND,
            vec![
                b.resolve_in(arg(after, 0), f2),
                Term::list(reversed),
                b.resolve_in(arg(after, 2), f1),
            ],
        );
        GuardedRule::new(
            b.resolve_in(rule.head(), f1),
            b.resolve_in(rule.guard(), f1),
            Term::truth(),
            b.resolve_in(rule.rec_goals(), f2),
            append,
        )
        .map_err(|e| mismatch("rev", e.to_string()))
    }
}

/// `s(L,S) :- L=AL ,!, MG, s(L1,S1), m(S3,S1,S)` where `AL` is a partial
/// list ending in `L1` and `MG` merges its elements into `S3`.
pub struct SortScheme {
    template: Template,
}

impl SortScheme {
    pub fn new() -> Self {
        SortScheme {
            template: Template::new(
                "sort",
                "s(L,S) :- L=AL ,!, MG, s(L1,S1), m(S3,S1,S).",
                &["AL", "MG", "S3"],
            ),
        }
    }

    /// Number of list elements one application of the rule consumes.
    pub fn width(&self, rule: &GuardedRule) -> Result<usize, SchemeError> {
        let p = self.template.match_rule(rule)?;
        prefix_width("sort", &p[0], arg(rule.rec_goals(), 0))
    }
}

impl Default for SortScheme {
    fn default() -> Self {
        Self::new()
    }
}

impl Scheme for SortScheme {
    fn name(&self) -> &str {
        "sort"
    }

    fn applies_to(&self, rule: &GuardedRule) -> bool {
        self.width(rule).is_ok()
    }

    fn step(&self, rule: &GuardedRule) -> Result<GuardedRule, SchemeError> {
        self.width(rule)?;
        let (mut b, f1, f2) = glue_copies("sort", rule)?;
        let after = rule.after();
        let s0 = b.fresh_var();
        let merges = Term::conjunction([
            b.resolve_in(rule.before(), f1),
            b.resolve_in(rule.before(), f2),
            Term::from_symbol(
                Symbol::MERGE,
                vec![b.resolve_in(arg(after, 0), f1), b.resolve_in(arg(after, 0), f2), s0.clone()],
            ),
        ]);
        let merge_rest = Term::from_symbol(
            Symbol::MERGE,
            vec![s0, b.resolve_in(arg(after, 1), f2), b.resolve_in(arg(after, 2), f1)],
        );
        GuardedRule::new(
            b.resolve_in(rule.head(), f1),
            b.resolve_in(rule.guard(), f1),
            clean_conjunction(&merges),
            b.resolve_in(rule.rec_goals(), f2),
            merge_rest,
        )
        .map_err(|e| mismatch("sort", e.to_string()))
    }
}
