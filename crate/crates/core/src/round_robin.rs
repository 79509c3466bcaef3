//! Round-robin processing of programs with several recursive rules.
//!
//! Each recursive rule has its own deck. The processor cycles through the
//! decks: unfold the deck against the current goal, interpret the goal with
//! it, and hand the continuation to the next deck. A marker entry records
//! the goal at the start of each cycle; meeting it again with a goal that
//! still unifies with it means a whole cycle made no progress.

use std::collections::VecDeque;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::bindings::{Bindings, Frame};
use crate::error::{Error, Result};
use crate::mip::{mip_cont, MipStats};
use crate::rule::RuleDeck;
use crate::scheme::Scheme;
use crate::term::Term;
use crate::unfold::{unfold_repeat, StepLimit};

#[derive(Clone, Debug)]
pub enum Entry {
    /// Index into the state's decks.
    Deck(usize),
    /// The goal as of the last pass over the marker.
    Marker(Term),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundRobinStats {
    /// Deck entries that applied at least one rule.
    pub rounds: u64,
    /// Deck entries processed, productive or not.
    pub deck_visits: u64,
    pub unfold_steps: u64,
    pub guard_probes: u64,
    pub mip: MipStats,
    pub unfold_time: Duration,
    pub interp_time: Duration,
}

#[derive(Clone, Copy, Debug)]
pub struct RoundRobinOptions {
    pub step_limit: StepLimit,
    /// Upper bound on deck visits; exceeding it is
    /// [`Error::RoundLimitExceeded`].
    pub max_visits: u64,
    /// Record the goal after every deck visit.
    pub trace: bool,
}

impl Default for RoundRobinOptions {
    fn default() -> Self {
        RoundRobinOptions {
            step_limit: StepLimit::Auto,
            max_visits: 1 << 24,
            trace: false,
        }
    }
}

pub struct RoundRobinState {
    decks: Vec<RuleDeck>,
    schemes: Vec<Arc<dyn Scheme>>,
    entries: VecDeque<Entry>,
    pub stats: RoundRobinStats,
    /// Goals after each deck visit, with the index of the deck visited;
    /// filled only when tracing.
    pub trace: Vec<(usize, Term)>,
}

impl RoundRobinState {
    /// One entry per deck in order, then the marker holding `goal`.
    pub fn new(decks: Vec<RuleDeck>, schemes: Vec<Arc<dyn Scheme>>, goal: Term) -> Self {
        assert_eq!(decks.len(), schemes.len(), "one scheme per deck");
        let mut entries: VecDeque<Entry> = (0..decks.len()).map(Entry::Deck).collect();
        entries.push_back(Entry::Marker(goal));
        RoundRobinState {
            decks,
            schemes,
            entries,
            stats: RoundRobinStats::default(),
            trace: Vec::new(),
        }
    }

    pub fn rounds_used(&self) -> u64 {
        self.stats.rounds
    }

    /// The decks as they stand, grown by unfolding.
    pub fn decks(&self) -> &[RuleDeck] {
        &self.decks
    }

    pub fn entries(&self) -> &VecDeque<Entry> {
        &self.entries
    }
}

/// Whether renamed copies of `a` and `b` unify. Leaves the bindings
/// untouched.
fn variant_unifiable(a: &Term, b: &Term, bindings: &mut Bindings) -> bool {
    let mark = bindings.var_count();
    let a = bindings.rename_apart(a);
    let b = bindings.rename_apart(b);
    let ok = bindings.unifiable(&a, &b);
    bindings.release_vars(mark);
    ok
}

/// Solves `goal` by cycling through the state's decks.
pub fn umr(
    goal: &Term,
    frame: Frame,
    state: &mut RoundRobinState,
    bindings: &mut Bindings,
    options: RoundRobinOptions,
) -> Result<()> {
    let mut current = bindings.resolve_in(goal, frame);
    loop {
        if current.is_true() {
            return Ok(());
        }
        let entry = state.entries.pop_front().expect("the marker is always present");
        match entry {
            Entry::Marker(marked) => {
                let marked = bindings.resolve(&marked);
                if variant_unifiable(&current, &marked, bindings) {
                    return Err(Error::NoProgress(current.to_string()));
                }
                state.entries.push_back(Entry::Marker(current.clone()));
            }
            Entry::Deck(i) => {
                if state.stats.deck_visits >= options.max_visits {
                    return Err(Error::RoundLimitExceeded(options.max_visits));
                }
                state.stats.deck_visits += 1;
                let started = Instant::now();
                let unfolded = unfold_repeat(
                    &current,
                    Frame::ROOT,
                    &state.decks[i],
                    state.schemes[i].as_ref(),
                    bindings,
                    options.step_limit,
                )?;
                let unfolded_at = Instant::now();
                state.stats.unfold_time += unfolded_at - started;
                state.stats.unfold_steps += unfolded.stats.steps;
                state.stats.guard_probes += unfolded.stats.guard_probes;
                let outcome = mip_cont(&current, Frame::ROOT, &unfolded.deck, bindings)?;
                state.stats.interp_time += unfolded_at.elapsed();
                if outcome.stats.rule_applications > 0 {
                    state.stats.rounds += 1;
                }
                state.stats.mip.absorb(&outcome.stats);
                // Keep the grown deck for later visits, unless unfolding only
                // dropped the deck's first rule: that rule may apply to a
                // later goal.
                if !unfolded.dropped_input_head() {
                    state.decks[i] = unfolded.deck;
                }
                state.entries.push_back(Entry::Deck(i));
                current = outcome.continuation;
                if options.trace {
                    state.trace.push((i, current.clone()));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_program, parse_term_with_names};
    use crate::scheme::GcdScheme;
    use crate::term::VarId;

    const GCD: &str = "
        :- deck.
        g(M,N,Z) :- 1*M<N ,!, L is N-1*M, g(M,L,Z), true.
        g(M,M,M) :- true ,!, true, true, true.
        :- deck.
        g(M,N,Z) :- M>1*N ,!, L is M-1*N, g(L,N,Z), true.
        g(M,M,M) :- true ,!, true, true, true.
    ";

    fn run(query: &str) -> (Result<Option<Term>>, RoundRobinState) {
        let p = parse_program(GCD).unwrap();
        let (g, names) = parse_term_with_names(query).unwrap();
        let mut b = Bindings::new();
        let f = b.alloc_frame(names.len() as u32);
        let schemes: Vec<Arc<dyn Scheme>> = vec![Arc::new(GcdScheme::new()), Arc::new(GcdScheme::new())];
        let mut state = RoundRobinState::new(p.decks().to_vec(), schemes, b.resolve_in(&g, f));
        let options = RoundRobinOptions {
            trace: true,
            ..RoundRobinOptions::default()
        };
        let r = umr(&g, f, &mut state, &mut b, options).map(|()| {
            names.first().map(|_| b.resolve_in(&Term::Var(VarId(0)), f))
        });
        (r, state)
    }

    #[test]
    fn gcd_12_8() {
        let (r, state) = run("g(12,8,X)");
        assert_eq!(r.unwrap(), Some(Term::small(4)));
        assert!(state.rounds_used() >= 2);
        assert_eq!(state.entries().iter().filter(|e| matches!(e, Entry::Marker(_))).count(), 1);
    }

    #[test]
    fn equal_arguments_take_one_round() {
        let (r, state) = run("g(7,7,X)");
        assert_eq!(r.unwrap(), Some(Term::small(7)));
        assert_eq!(state.rounds_used(), 1);
    }

    #[test]
    fn no_progress_is_detected() {
        let (r, state) = run("g(1,0,X)");
        assert!(matches!(r, Err(Error::NoProgress(_))));
        assert!(state.stats.deck_visits <= 4);
        let (r, _) = run("g(0,0,1)");
        assert!(matches!(r, Err(Error::NoProgress(_))));
    }

    #[test]
    fn subtracting_one_takes_one_round() {
        for n in [2u64, 3, 17, 1000, 65536] {
            let (r, state) = run(&format!("g({n},1,X)"));
            assert_eq!(r.unwrap(), Some(Term::small(1)));
            assert!(state.rounds_used() <= 2, "n = {n}");
        }
    }

    #[test]
    fn decks_are_reused_and_grown() {
        let (r, state) = run("g(1000,3,X)");
        assert_eq!(r.unwrap(), Some(Term::small(1)));
        assert!(state.decks()[1].len() > 2);
        // the first deck never applied to a goal with M<N until later,
        // but keeps its original rule
        assert!(state.decks()[0].recursive_count() >= 1);
    }
}
