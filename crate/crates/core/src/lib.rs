//! Guarded-rule engine with runtime repeated recursion unfolding.
//!
//! A program is a set of recursive rules in guarded normal form. For a
//! concrete query, [`unfold`] repeatedly self-unfolds the recursive rule with
//! a simplification [`scheme`] while the newest rule still applies, and
//! [`mip`] interprets the query against the resulting deck, trying the most
//! unfolded rules first and each at most once. Programs with several
//! recursive rules go through the [`round_robin`] processor. The [`oracle`]
//! module is a plain interpreter used as a reference.

pub mod bindings;
pub mod bench;
pub mod builtins;
pub mod engine;
pub mod error;
pub mod format;
pub mod mip;
pub mod oracle;
pub mod parse;
pub mod programs;
pub mod round_robin;
pub mod rule;
pub mod scheme;
pub mod term;
pub mod unfold;

pub use bindings::{Bindings, Frame};
pub use engine::{Engine, Mode, Query, RunOutcome, RunStats};
pub use error::{Error, ExitCode, ParseError, Result, SchemeError};
pub use rule::{GuardedRule, Predicate, Program, RuleDeck};
pub use term::{Symbol, Term, VarId};
