//! Guarded rules in four-part normal form, rule decks and programs.

use std::collections::HashMap;
use std::fmt;

use crate::builtins::{clean_conjunction, is_builtin};
use crate::error::{Error, Result};
use crate::term::{Symbol, Term, VarId};

/// Predicate indicator `name/arity`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Predicate {
    pub name: Symbol,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: &str, arity: usize) -> Self {
        Predicate {
            name: Symbol::intern(name),
            arity,
        }
    }

    pub fn of(term: &Term) -> Option<Self> {
        term.indicator().map(|(name, arity)| Predicate { name, arity })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// `head :- guard ,!, before, rec_goals, after.`
///
/// Rules are stored closed: their variables are numbered `0..var_count` by
/// first occurrence (head, guard, before, rec_goals, after). Two rules are
/// therefore variants exactly when they are equal.
#[derive(Clone, PartialEq, Eq)]
pub struct GuardedRule {
    head: Term,
    guard: Term,
    before: Term,
    rec_goals: Term,
    after: Term,
    var_count: u32,
}

impl GuardedRule {
    /// Normalizes and validates the five parts. Variables may have any ids;
    /// they are renumbered.
    pub fn new(head: Term, guard: Term, before: Term, rec_goals: Term, after: Term) -> Result<Self> {
        let parts = [
            head,
            clean_conjunction(&guard),
            clean_conjunction(&before),
            clean_conjunction(&rec_goals),
            clean_conjunction(&after),
        ];
        let head_pred = match &parts[0] {
            Term::Atom(_) | Term::Compound(_) if !is_builtin(&parts[0]) => {
                Predicate::of(&parts[0]).expect("callable")
            }
            other => return Err(Error::InvalidRule(format!("`{other}` cannot be a rule head"))),
        };
        if head_pred.name == Symbol::COMMA || head_pred.name == Symbol::CUT {
            return Err(Error::InvalidRule(format!("`{}` cannot be a rule head", parts[0])));
        }
        for (part, what) in [(&parts[1], "guard"), (&parts[2], "before-goals"), (&parts[4], "after-goals")] {
            if let Some(g) = part.conjuncts().into_iter().find(|g| !is_builtin(g)) {
                return Err(Error::InvalidRule(format!(
                    "{what} may only contain built-ins, found `{g}`"
                )));
            }
        }
        for g in parts[3].conjuncts() {
            if g.is_true() {
                continue;
            }
            if is_builtin(&g) || !matches!(g, Term::Atom(_) | Term::Compound(_)) {
                return Err(Error::InvalidRule(format!(
                    "recursive goals may only contain user predicate calls, found `{g}`"
                )));
            }
        }

        Ok(GuardedRule::normalized(parts))
    }

    /// Cleans the conjunctions and renumbers variables, without validation.
    pub(crate) fn normalized(parts: [Term; 5]) -> Self {
        let parts = parts.map(|p| clean_conjunction(&p));
        let mut renumber: HashMap<VarId, VarId> = HashMap::new();
        for part in &parts {
            for v in part.vars() {
                let next = VarId(renumber.len() as u32);
                renumber.entry(v).or_insert(next);
            }
        }
        let [head, guard, before, rec_goals, after] =
            parts.map(|p| p.map_vars(&mut |v| Term::Var(renumber[&v])));
        GuardedRule {
            head,
            guard,
            before,
            rec_goals,
            after,
            var_count: renumber.len() as u32,
        }
    }

    /// A fact `head.` with all other parts `true`.
    pub fn fact(head: Term) -> Result<Self> {
        GuardedRule::new(head, Term::truth(), Term::truth(), Term::truth(), Term::truth())
    }

    pub fn head(&self) -> &Term {
        &self.head
    }

    pub fn guard(&self) -> &Term {
        &self.guard
    }

    pub fn before(&self) -> &Term {
        &self.before
    }

    pub fn rec_goals(&self) -> &Term {
        &self.rec_goals
    }

    pub fn after(&self) -> &Term {
        &self.after
    }

    /// Number of rule-local variables; activating the rule needs a frame of
    /// this size.
    pub fn var_count(&self) -> u32 {
        self.var_count
    }

    pub fn parts(&self) -> [&Term; 5] {
        [&self.head, &self.guard, &self.before, &self.rec_goals, &self.after]
    }

    pub fn is_base_case(&self) -> bool {
        self.rec_goals.is_true()
    }

    pub fn predicate(&self) -> Predicate {
        Predicate::of(&self.head).expect("validated head")
    }
}

impl fmt::Display for GuardedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::format_rule(self))
    }
}

impl fmt::Debug for GuardedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Ordered rules, most unfolded first, base cases last.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RuleDeck {
    rules: Vec<GuardedRule>,
}

impl RuleDeck {
    pub fn new() -> Self {
        RuleDeck::default()
    }

    pub fn rules(&self) -> &[GuardedRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GuardedRule> {
        self.rules.iter()
    }

    pub fn push(&mut self, rule: GuardedRule) {
        self.rules.push(rule);
    }

    pub fn first(&self) -> Option<&GuardedRule> {
        self.rules.first()
    }

    pub fn recursive_count(&self) -> usize {
        self.rules.iter().filter(|r| !r.is_base_case()).count()
    }

    pub fn into_rules(self) -> Vec<GuardedRule> {
        self.rules
    }
}

impl From<Vec<GuardedRule>> for RuleDeck {
    fn from(rules: Vec<GuardedRule>) -> Self {
        RuleDeck { rules }
    }
}

impl FromIterator<GuardedRule> for RuleDeck {
    fn from_iter<I: IntoIterator<Item = GuardedRule>>(iter: I) -> Self {
        RuleDeck {
            rules: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a RuleDeck {
    type Item = &'a GuardedRule;
    type IntoIter = std::slice::Iter<'a, GuardedRule>;

    fn into_iter(self) -> Self::IntoIter {
        self.rules.iter()
    }
}

/// A program: one deck per original recursive rule, each ending with the
/// base cases, plus the scheme each deck is unfolded with.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Program {
    name: String,
    entry: Predicate,
    decks: Vec<RuleDeck>,
    schemes: Vec<Option<String>>,
}

impl Program {
    pub fn new(
        name: impl Into<String>,
        entry: Predicate,
        decks: Vec<RuleDeck>,
        schemes: Vec<Option<String>>,
    ) -> Result<Self> {
        if decks.len() != schemes.len() {
            return Err(Error::Config(format!(
                "{} decks but {} scheme entries",
                decks.len(),
                schemes.len()
            )));
        }
        if decks.is_empty() || decks.iter().all(RuleDeck::is_empty) {
            return Err(Error::InvalidRule("program has no rules".into()));
        }
        for rule in decks.iter().flatten() {
            if rule.predicate() != entry {
                return Err(Error::InvalidRule(format!(
                    "rule for predicate {} in a program for predicate {entry}",
                    rule.predicate()
                )));
            }
        }
        Ok(Program {
            name: name.into(),
            entry,
            decks,
            schemes,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entry(&self) -> Predicate {
        self.entry
    }

    pub fn decks(&self) -> &[RuleDeck] {
        &self.decks
    }

    pub fn scheme_names(&self) -> &[Option<String>] {
        &self.schemes
    }

    /// Replaces the scheme names, e.g. from configuration.
    pub fn with_schemes(mut self, schemes: Vec<Option<String>>) -> Result<Self> {
        if schemes.len() != self.decks.len() {
            return Err(Error::Config(format!(
                "program {} has {} decks, {} schemes given",
                self.name,
                self.decks.len(),
                schemes.len()
            )));
        }
        self.schemes = schemes;
        Ok(self)
    }

    /// All clauses in program order, each distinct rule once (the base cases
    /// repeated at the end of every deck appear only once).
    pub fn clauses(&self) -> Vec<GuardedRule> {
        let mut out: Vec<GuardedRule> = Vec::new();
        for rule in self.decks.iter().flatten() {
            if !out.contains(rule) {
                out.push(rule.clone());
            }
        }
        out
    }
}
