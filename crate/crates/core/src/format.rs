//! Printing terms and rules in the rule-file syntax.

use std::collections::HashMap;
use std::fmt::Write;

use crate::rule::{GuardedRule, Program, RuleDeck};
use crate::term::{Symbol, Term, VarId};

fn operator(functor: Symbol, arity: usize) -> Option<(&'static str, u32, u32, u32)> {
    // (text, precedence, max left precedence, max right precedence)
    if arity != 2 {
        return None;
    }
    Some(match functor {
        Symbol::COMMA => (", ", 1000, 999, 1000),
        Symbol::IS => (" is ", 700, 699, 699),
        Symbol::EQ => ("=", 700, 699, 699),
        Symbol::NOT_UNIFIABLE => ("\\=", 700, 699, 699),
        Symbol::LT => ("<", 700, 699, 699),
        Symbol::GT => (">", 700, 699, 699),
        Symbol::LE => ("=<", 700, 699, 699),
        Symbol::GE => (">=", 700, 699, 699),
        Symbol::PLUS => ("+", 500, 500, 499),
        Symbol::MINUS => ("-", 500, 500, 499),
        Symbol::TIMES => ("*", 400, 400, 399),
        _ => return None,
    })
}

enum Job<'a> {
    Term(&'a Term, u32),
    Text(&'static str),
}

/// Renders `term`, naming variables with `name`. Iterative, so long lists
/// print without deep recursion.
pub fn term_to_string(term: &Term, name: &mut dyn FnMut(VarId) -> String) -> String {
    let mut out = String::new();
    let mut jobs = vec![Job::Term(term, 1200)];
    while let Some(job) = jobs.pop() {
        let (t, max_prec) = match job {
            Job::Text(s) => {
                out.push_str(s);
                continue;
            }
            Job::Term(t, p) => (t, p),
        };
        match t {
            Term::Var(v) => out.push_str(&name(*v)),
            Term::Small(v) if *v < 0 && max_prec < 1200 && max_prec != 999 => {
                let _ = write!(out, "({v})");
            }
            Term::Small(v) => {
                let _ = write!(out, "{v}");
            }
            Term::Big(v) if v.sign() == num_bigint::Sign::Minus && max_prec < 1200 && max_prec != 999 => {
                let _ = write!(out, "({v})");
            }
            Term::Big(v) => {
                let _ = write!(out, "{v}");
            }
            Term::Atom(s) => out.push_str(&s.name()),
            Term::Compound(c) if c.functor() == Symbol::DOT && c.arity() == 2 => {
                // collect the list spine, then push jobs in reverse
                let mut items = Vec::new();
                let mut cur = t;
                let tail = loop {
                    match cur {
                        Term::Compound(c) if c.functor() == Symbol::DOT && c.arity() == 2 => {
                            items.push(&c.args()[0]);
                            cur = &c.args()[1];
                        }
                        _ => break cur,
                    }
                };
                out.push('[');
                jobs.push(Job::Text("]"));
                if !matches!(tail, Term::Atom(s) if *s == Symbol::NIL) {
                    jobs.push(Job::Term(tail, 999));
                    jobs.push(Job::Text("|"));
                }
                for (i, item) in items.iter().enumerate().rev() {
                    jobs.push(Job::Term(item, 999));
                    if i > 0 {
                        jobs.push(Job::Text(","));
                    }
                }
            }
            Term::Compound(c) => {
                if let Some((text, prec, lmax, rmax)) = operator(c.functor(), c.arity()) {
                    let paren = prec > max_prec;
                    if paren {
                        out.push('(');
                        jobs.push(Job::Text(")"));
                    }
                    jobs.push(Job::Term(&c.args()[1], rmax));
                    jobs.push(Job::Text(text));
                    jobs.push(Job::Term(&c.args()[0], lmax));
                } else {
                    out.push_str(&c.functor().name());
                    out.push('(');
                    jobs.push(Job::Text(")"));
                    for (i, arg) in c.args().iter().enumerate().rev() {
                        jobs.push(Job::Term(arg, 999));
                        if i > 0 {
                            jobs.push(Job::Text(","));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Generated variable names: `A`..`Z`, then `A1`..`Z1`, `A2`, ...
pub fn var_name(index: usize) -> String {
    let letter = (b'A' + (index % 26) as u8) as char;
    match index / 26 {
        0 => letter.to_string(),
        n => format!("{letter}{n}"),
    }
}

/// Names variables in order of first appearance.
#[derive(Default)]
pub struct VarNamer {
    names: HashMap<VarId, String>,
}

impl VarNamer {
    pub fn name(&mut self, v: VarId) -> String {
        let next = self.names.len();
        self.names.entry(v).or_insert_with(|| var_name(next)).clone()
    }
}

fn part(t: &Term, namer: &mut VarNamer) -> String {
    let mut name = |v| namer.name(v);
    if t.is_functor(Symbol::COMMA, 2) {
        format!("({})", term_to_string(t, &mut name))
    } else {
        term_to_string(t, &mut name)
    }
}

/// `head :- guard ,!, before, rec_goals, after.` with fresh variable names.
pub fn format_rule(rule: &GuardedRule) -> String {
    let mut namer = VarNamer::default();
    let head = term_to_string(rule.head(), &mut |v| namer.name(v));
    let guard = part(rule.guard(), &mut namer);
    let before = part(rule.before(), &mut namer);
    let rec = part(rule.rec_goals(), &mut namer);
    let after = part(rule.after(), &mut namer);
    format!("{head} :- {guard} ,!, {before}, {rec}, {after}.")
}

/// One rule per line.
pub fn format_deck(deck: &RuleDeck) -> String {
    deck.iter().map(|r| format_rule(r) + "\n").collect()
}

/// A complete rule file that parses back to an equal program.
pub fn format_program(program: &Program) -> String {
    let mut out = String::new();
    let _ = writeln!(out, ":- program {}.", program.name());
    let _ = writeln!(out, ":- entry {}.", program.entry());
    for (deck, scheme) in program.decks().iter().zip(program.scheme_names()) {
        out.push_str(":- deck.\n");
        if let Some(s) = scheme {
            let _ = writeln!(out, ":- scheme {s}.");
        }
        out.push_str(&format_deck(deck));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_program, parse_rule, parse_term};

    fn round(text: &str) -> String {
        term_to_string(&parse_term(text).unwrap(), &mut |v| var_name(v.index()))
    }

    #[test]
    fn operators_and_parentheses() {
        assert_eq!(round("C is 64*A-2016+D"), "A is 64*B-2016+C");
        assert_eq!(round("A-(B-C)"), "A-(B-C)");
        assert_eq!(round("(A-B)-C"), "A-B-C");
        assert_eq!(round("(1+2)*3"), "(1+2)*3");
        assert_eq!(round("A>(-1)"), "A>(-1)");
        assert_eq!(round("f(-1,[1,2|T])"), "f(-1,[1,2|A])");
        assert_eq!(round("-(X)"), "-(A)");
        assert_eq!(round("f((a,b))"), "f((a, b))");
    }

    #[test]
    fn summation_rule_text() {
        let r = parse_rule("s(A,C) :- A>1 ,!, B is A-1, s(B,D), C is 1*A-0+D.").unwrap();
        assert_eq!(format_rule(&r), "s(A,B) :- A>1 ,!, C is A-1, s(C,D), B is 1*A-0+D.");
    }

    #[test]
    fn base_fact_text() {
        let r = parse_rule("g(M,M,M).").unwrap();
        assert_eq!(format_rule(&r), "g(A,A,A) :- true ,!, true, true, true.");
    }

    #[test]
    fn grouped_parts_are_parenthesized() {
        let text = "f(N,F) :- N>1 ,!, (N1 is N-1, N2 is N1-1), (f(N1,F1), f(N2,F2)), F is 1*F1+1*F2.";
        let r = parse_rule(text).unwrap();
        assert_eq!(
            format_rule(&r),
            "f(A,B) :- A>1 ,!, (C is A-1, D is C-1), (f(C,E), f(D,F)), B is 1*E+1*F."
        );
        assert_eq!(parse_rule(&format_rule(&r)).unwrap(), r);
    }

    #[test]
    fn many_variables_get_numbered_names() {
        assert_eq!(var_name(0), "A");
        assert_eq!(var_name(25), "Z");
        assert_eq!(var_name(26), "A1");
        assert_eq!(var_name(53), "B2");
    }

    #[test]
    fn program_round_trip() {
        let text = ":- program gcd.\n:- entry g/3.\n:- deck.\n:- scheme gcd.\n\
                    g(M,N,Z) :- 1*M<N ,!, L is N-1*M, g(M,L,Z), true.\ng(M,M,M).\n";
        let p = parse_program(text).unwrap();
        assert_eq!(parse_program(&format_program(&p)).unwrap(), p);
    }
}
