//! Running queries end to end: building the goal, unfolding, interpreting
//! and collecting answers and statistics.

use std::fmt;
use std::time::{Duration, Instant};

use crate::bindings::{Bindings, Frame};
use crate::error::{Error, Result};
use crate::mip::mip;
use crate::oracle::{solve_naive, OracleConfig, DEFAULT_STEP_LIMIT};
use crate::parse::parse_term_with_names;
use crate::round_robin::{umr, RoundRobinOptions, RoundRobinState};
use crate::rule::{Program, RuleDeck};
use crate::scheme::SchemeRegistry;
use crate::term::{Term, VarId};
use crate::unfold::{unfold_repeat, StepLimit, UnfoldResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// The reference interpreter on the original program.
    Naive,
    /// Runtime repeated recursion unfolding.
    Unfold,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Naive => "naive",
            Mode::Unfold => "unfold",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A goal together with the names of its variables.
#[derive(Clone, Debug)]
pub struct Query {
    pub goal: Term,
    pub names: Vec<(String, VarId)>,
    pub var_count: u32,
}

impl Query {
    /// Parses a goal such as `s(10,R)`.
    pub fn parse(text: &str) -> Result<Self> {
        let (goal, names) = parse_term_with_names(text)?;
        let var_count = goal.vars().iter().map(|v| v.0 + 1).max().unwrap_or(0);
        Ok(Query { goal, names, var_count })
    }

    /// The entry predicate applied to ground `inputs`, followed by fresh
    /// output variables `R` (or `R1`, `R2`, ... when there are several).
    pub fn for_program(program: &Program, inputs: Vec<Term>) -> Result<Self> {
        let entry = program.entry();
        if inputs.len() > entry.arity {
            return Err(Error::Config(format!(
                "{} takes at most {} inputs, got {}",
                entry,
                entry.arity,
                inputs.len()
            )));
        }
        if let Some(t) = inputs.iter().find(|t| !t.is_ground()) {
            return Err(Error::Config(format!("input `{t}` must be ground")));
        }
        let outputs = entry.arity - inputs.len();
        let names: Vec<(String, VarId)> = (0..outputs)
            .map(|i| {
                let name = if outputs == 1 { "R".to_string() } else { format!("R{}", i + 1) };
                (name, VarId(i as u32))
            })
            .collect();
        let mut args = inputs;
        args.extend(names.iter().map(|(_, v)| Term::Var(*v)));
        let goal = if args.is_empty() {
            Term::Atom(entry.name)
        } else {
            Term::from_symbol(entry.name, args)
        };
        Ok(Query {
            goal,
            names,
            var_count: outputs as u32,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub unfold_time: Duration,
    pub interp_time: Duration,
    pub total_time: Duration,
    /// Rule (or clause) applications, base cases included.
    pub rule_applications: u64,
    pub recursive_applications: u64,
    /// Productive deck visits; zero in naive mode.
    pub rounds: u64,
    pub unfold_steps: u64,
    /// Rules in each deck after unfolding (naive mode: the program's clauses).
    pub deck_sizes: Vec<usize>,
}

impl RunStats {
    pub fn deck_size(&self) -> usize {
        self.deck_sizes.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub solved: bool,
    /// Value of each query variable; empty when not solved.
    pub answer: Vec<(String, Term)>,
    pub stats: RunStats,
}

impl RunOutcome {
    pub fn value(&self, name: &str) -> Option<&Term> {
        self.answer.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// `R = 55` lines, or `false` when the query failed.
    pub fn answer_text(&self) -> String {
        if !self.solved {
            return "false".to_string();
        }
        if self.answer.is_empty() {
            return "true".to_string();
        }
        self.answer
            .iter()
            .map(|(n, t)| format!("{n} = {t}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Clone)]
pub struct Engine {
    pub registry: SchemeRegistry,
    pub step_limit: StepLimit,
    pub oracle_step_limit: u64,
    pub max_round_visits: u64,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            registry: SchemeRegistry::with_defaults(),
            step_limit: StepLimit::Auto,
            oracle_step_limit: DEFAULT_STEP_LIMIT,
            max_round_visits: RoundRobinOptions::default().max_visits,
        }
    }
}

fn collect_answer(query: &Query, frame: Frame, bindings: &Bindings) -> Vec<(String, Term)> {
    query
        .names
        .iter()
        .map(|(n, v)| (n.clone(), bindings.resolve_in(&Term::Var(*v), frame)))
        .collect()
}

impl Engine {
    pub fn new() -> Self {
        Engine::default()
    }

    pub fn run(&self, program: &Program, query: &Query, mode: Mode) -> Result<RunOutcome> {
        match mode {
            Mode::Naive => self.run_naive(program, query),
            Mode::Unfold => self.run_unfold(program, query),
        }
    }

    pub fn run_naive(&self, program: &Program, query: &Query) -> Result<RunOutcome> {
        let mut bindings = Bindings::new();
        let frame = bindings.alloc_frame(query.var_count);
        let config = OracleConfig::new(program.clone()).with_step_limit(self.oracle_step_limit);
        let started = Instant::now();
        let (solved, oracle) = solve_naive(&query.goal, frame, &config, &mut bindings)?;
        let elapsed = started.elapsed();
        let stats = RunStats {
            interp_time: elapsed,
            total_time: elapsed,
            rule_applications: oracle.clause_applications,
            recursive_applications: 0,
            deck_sizes: vec![program.clauses().len()],
            ..RunStats::default()
        };
        let answer = if solved { collect_answer(query, frame, &bindings) } else { Vec::new() };
        Ok(RunOutcome { solved, answer, stats })
    }

    pub fn run_unfold(&self, program: &Program, query: &Query) -> Result<RunOutcome> {
        let schemes = self.registry.for_program(program)?;
        let mut bindings = Bindings::new();
        let frame = bindings.alloc_frame(query.var_count);
        let started = Instant::now();
        let mut stats = RunStats::default();
        let solved = if program.decks().len() == 1 {
            let unfolded = unfold_repeat(
                &query.goal,
                frame,
                &program.decks()[0],
                schemes[0].as_ref(),
                &mut bindings,
                self.step_limit,
            )?;
            let unfolded_at = Instant::now();
            let (solved, mip_stats) = mip(&query.goal, frame, &unfolded.deck, &mut bindings)?;
            stats.interp_time = unfolded_at.elapsed();
            stats.unfold_time = unfolded_at - started;
            stats.rule_applications = mip_stats.rule_applications;
            stats.recursive_applications = mip_stats.recursive_applications;
            stats.rounds = u64::from(mip_stats.rule_applications > 0);
            stats.unfold_steps = unfolded.stats.steps;
            stats.deck_sizes = vec![unfolded.deck.len()];
            solved
        } else {
            let mut state =
                RoundRobinState::new(program.decks().to_vec(), schemes, bindings.resolve_in(&query.goal, frame));
            let options = RoundRobinOptions {
                step_limit: self.step_limit,
                max_visits: self.max_round_visits,
                trace: false,
            };
            umr(&query.goal, frame, &mut state, &mut bindings, options)?;
            let rr = &state.stats;
            stats.unfold_time = rr.unfold_time;
            stats.interp_time = rr.interp_time;
            stats.rule_applications = rr.mip.rule_applications;
            stats.recursive_applications = rr.mip.recursive_applications;
            stats.rounds = rr.rounds;
            stats.unfold_steps = rr.unfold_steps;
            stats.deck_sizes = state.decks().iter().map(RuleDeck::len).collect();
            true
        };
        stats.total_time = started.elapsed();
        let answer = if solved { collect_answer(query, frame, &bindings) } else { Vec::new() };
        Ok(RunOutcome { solved, answer, stats })
    }

    /// Each deck of the program unfolded against the query.
    pub fn unfold_decks(&self, program: &Program, query: &Query) -> Result<Vec<UnfoldResult>> {
        let schemes = self.registry.for_program(program)?;
        let mut bindings = Bindings::new();
        let frame = bindings.alloc_frame(query.var_count);
        program
            .decks()
            .iter()
            .zip(&schemes)
            .map(|(deck, scheme)| {
                unfold_repeat(&query.goal, frame, deck, scheme.as_ref(), &mut bindings, self.step_limit)
            })
            .collect()
    }
}
