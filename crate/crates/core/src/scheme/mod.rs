//! Unfolding schemes: one simplified self-unfolding step per rule template.
//!
//! A scheme recognizes rules that are instances of its template and maps an
//! instance to the next one, which covers twice as many recursive steps of
//! the original rule.

mod lists;
mod numeric;
mod template;

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result, SchemeError};
use crate::rule::{GuardedRule, Program};

pub use lists::{ReverseScheme, SortScheme};
pub use numeric::{FibScheme, GcdScheme, SumScheme};
pub use template::Template;

pub trait Scheme: Send + Sync {
    fn name(&self) -> &str;

    /// Whether `rule` is an instance of the scheme's template.
    fn applies_to(&self, rule: &GuardedRule) -> bool;

    /// The next unfolded rule. Base cases and other non-instances are a
    /// [`SchemeError::TemplateMismatch`].
    fn step(&self, rule: &GuardedRule) -> Result<GuardedRule, SchemeError>;
}

pub(crate) fn mismatch(scheme: &str, detail: impl Into<String>) -> SchemeError {
    SchemeError::TemplateMismatch {
        scheme: scheme.to_string(),
        detail: detail.into(),
    }
}

/// Maps scheme names to implementations, and program names to the scheme
/// used for each of their decks.
#[derive(Clone)]
pub struct SchemeRegistry {
    schemes: HashMap<String, Arc<dyn Scheme>>,
    defaults: HashMap<String, Vec<String>>,
}

impl SchemeRegistry {
    pub fn empty() -> Self {
        SchemeRegistry {
            schemes: HashMap::new(),
            defaults: HashMap::new(),
        }
    }

    /// The shipped schemes `sum`, `fib`, `gcd`, `rev` and `sort`, each also
    /// the default for the program of the same name.
    pub fn with_defaults() -> Self {
        let mut r = SchemeRegistry::empty();
        r.register(Arc::new(SumScheme::new()));
        r.register(Arc::new(FibScheme::new()));
        r.register(Arc::new(GcdScheme::new()));
        r.register(Arc::new(ReverseScheme::new()));
        r.register(Arc::new(SortScheme::new()));
        r.set_program_schemes("sum", &["sum"]);
        r.set_program_schemes("fib", &["fib"]);
        r.set_program_schemes("gcd", &["gcd", "gcd"]);
        r.set_program_schemes("rev", &["rev"]);
        r.set_program_schemes("sort", &["sort"]);
        r
    }

    pub fn register(&mut self, scheme: Arc<dyn Scheme>) {
        self.schemes.insert(scheme.name().to_string(), scheme);
    }

    pub fn set_program_schemes(&mut self, program: &str, schemes: &[&str]) {
        self.defaults
            .insert(program.to_string(), schemes.iter().map(|s| s.to_string()).collect());
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Scheme>, SchemeError> {
        self.schemes
            .get(name)
            .cloned()
            .ok_or_else(|| SchemeError::UnknownScheme(name.to_string()))
    }

    /// One scheme per deck: named in the program itself, or else configured
    /// for the program's name.
    pub fn for_program(&self, program: &Program) -> Result<Vec<Arc<dyn Scheme>>> {
        let configured = self.defaults.get(program.name());
        program
            .scheme_names()
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let name = name
                    .as_deref()
                    .or_else(|| configured.and_then(|c| c.get(i)).map(String::as_str))
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "no scheme configured for deck {} of program {}",
                            i + 1,
                            program.name()
                        ))
                    })?;
                Ok(self.get(name)?)
            })
            .collect()
    }
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        SchemeRegistry::with_defaults()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_program;

    #[test]
    fn program_schemes_come_from_directive_or_defaults() {
        let reg = SchemeRegistry::with_defaults();
        let p = parse_program(":- program sum.\ns(A,C) :- A>1 ,!, B is A-1, s(B,D), C is 1*A-0+D.\n").unwrap();
        assert_eq!(reg.for_program(&p).unwrap()[0].name(), "sum");
        let p = parse_program(":- program other.\n:- scheme fib.\nf(N) :- N>1 ,!, true, f(N), true.\n").unwrap();
        assert_eq!(reg.for_program(&p).unwrap()[0].name(), "fib");
        let p = parse_program(":- program other.\nf(N) :- N>1 ,!, true, f(N), true.\n").unwrap();
        assert!(matches!(reg.for_program(&p), Err(Error::Config(_))));
        let p = parse_program(":- scheme nope.\nf(N) :- N>1 ,!, true, f(N), true.\n").unwrap();
        assert!(matches!(
            reg.for_program(&p),
            Err(Error::Scheme(SchemeError::UnknownScheme(_)))
        ));
    }
}
