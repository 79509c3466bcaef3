//! Runtime repeated recursion unfolding.
//!
//! Starting from a deck whose first rule is the original recursive rule,
//! the scheme is applied to the newest rule for as long as that rule's
//! guard holds for the query. The first rule whose guard fails is dropped;
//! everything accumulated before it is returned, most unfolded first.

use crate::bindings::{Bindings, Frame};
use crate::builtins::eval_builtin;
use crate::error::{Error, Result, SchemeError};
use crate::rule::{GuardedRule, RuleDeck};
use crate::scheme::Scheme;
use crate::term::Term;

/// Whether a fresh copy of `rule` has a head unifying with the goal and a
/// guard that succeeds. The bindings are left exactly as they were.
pub fn guard_applicable(goal: &Term, frame: Frame, rule: &GuardedRule, bindings: &mut Bindings) -> Result<bool> {
    let mark = bindings.var_count();
    let cp = bindings.checkpoint();
    let f = bindings.alloc_frame(rule.var_count());
    let result = if bindings.unify_in(rule.head(), f, goal, frame) {
        eval_builtin(rule.guard(), f, bindings)
    } else {
        Ok(false)
    };
    bindings.rollback(cp);
    bindings.release_vars(mark);
    result
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UnfoldStats {
    /// Rules generated by the scheme, including the discarded one.
    pub steps: u64,
    pub guard_probes: u64,
    /// Set when the scheme could not unfold an applicable rule; the deck
    /// then ends unfolding at that rule.
    pub scheme_stopped: Option<SchemeError>,
    /// Set when unfolding hit the step limit with the newest rule still
    /// applicable.
    pub limit_reached: bool,
}

#[derive(Clone, Debug)]
pub struct UnfoldResult {
    /// Unfolded rules most unfolded first, then the rest of the input deck.
    pub deck: RuleDeck,
    /// The rule whose guard failed on the goal, if unfolding ended that way.
    pub discarded: Option<GuardedRule>,
    pub stats: UnfoldStats,
}

impl UnfoldResult {
    /// True when the input deck's first rule was itself inapplicable and
    /// was dropped, so no rule was unfolded.
    pub fn dropped_input_head(&self) -> bool {
        self.discarded.is_some() && self.stats.steps == 0
    }
}

/// Bounds the number of unfolding steps. Guards that hold for every depth
/// (such as `M>A*N` with `N=0`) would otherwise unfold forever.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepLimit {
    /// `64 + 2 * size(goal)` steps, where integers count with their bit
    /// length. The shipped schemes double a parameter each step, so they
    /// never need more than a few steps per goal bit.
    Auto,
    Fixed(u64),
}

impl StepLimit {
    fn for_goal(self, goal: &Term, frame: Frame, bindings: &Bindings) -> u64 {
        match self {
            StepLimit::Fixed(n) => n,
            StepLimit::Auto => 64 + 2 * bindings.resolve_in(goal, frame).size(),
        }
    }
}

/// Repeatedly unfolds `deck`'s first rule with `scheme` against the goal.
///
/// An error from `scheme` on the very first rule is
/// [`Error::SchemeFailure`]; later it only ends unfolding (recorded in the
/// stats), keeping the rules produced so far.
pub fn unfold_repeat(
    goal: &Term,
    frame: Frame,
    deck: &RuleDeck,
    scheme: &dyn Scheme,
    bindings: &mut Bindings,
    limit: StepLimit,
) -> Result<UnfoldResult> {
    let max_steps = limit.for_goal(goal, frame, bindings);
    let mut stats = UnfoldStats::default();
    // newest rule last, so growing is a push
    let mut unfolded: Vec<GuardedRule> = Vec::new();
    let rest = deck.rules();
    let Some(original) = rest.first() else {
        return Ok(UnfoldResult {
            deck: deck.clone(),
            discarded: None,
            stats,
        });
    };
    let mut discarded = None;
    loop {
        let current = unfolded.last().unwrap_or(original);
        stats.guard_probes += 1;
        if !guard_applicable(goal, frame, current, bindings)? {
            discarded = Some(match unfolded.pop() {
                Some(rule) => rule,
                None => original.clone(),
            });
            break;
        }
        if stats.steps >= max_steps {
            stats.limit_reached = true;
            break;
        }
        match scheme.step(current) {
            Ok(next) => {
                stats.steps += 1;
                unfolded.push(next);
            }
            Err(e) if stats.steps == 0 => return Err(Error::SchemeFailure(e)),
            Err(e) => {
                stats.scheme_stopped = Some(e);
                break;
            }
        }
    }
    let keep_original = !(discarded.is_some() && stats.steps == 0);
    let mut rules: Vec<GuardedRule> = unfolded.into_iter().rev().collect();
    if keep_original {
        rules.push(original.clone());
    }
    rules.extend(rest[1..].iter().cloned());
    Ok(UnfoldResult {
        deck: rules.into(),
        discarded,
        stats,
    })
}
