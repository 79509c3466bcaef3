//! Reader for the rule-file syntax (`.mpl`).
//!
//! The grammar is documented in `docs/grammar.md`. Terms use the usual
//! operator table: `,` (1000, xfy); `=`, `\=`, `is`, `<`, `>`, `=<`, `>=`
//! (700, xfx); `+`, `-` (500, yfx); `*` (400, yfx); prefix `-` (200, fy).

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::error::ParseError;
use crate::rule::{GuardedRule, Predicate, Program, RuleDeck};
use crate::term::{Symbol, Term, VarId};
use crate::builtins::is_builtin;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Var(String),
    Name(String),
    Int(BigInt),
    Op(&'static str),
    Open,
    Close,
    OpenList,
    CloseList,
    Comma,
    Bar,
    End,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
    /// No whitespace between this token and the previous one.
    glued: bool,
}

const SYMBOL_OPS: [&str; 13] = [
    ":-", "\\=", "=<", ">=", "=", "<", ">", "+", "-", "*", "/", "!", "|",
];

fn is_symbol_char(c: char) -> bool {
    "+-*/\\^<>=~:.?@#&$!".contains(c)
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut glued = false;
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            glued = false;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            glued = false;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            glued = false;
            continue;
        }
        let (start_line, start_col) = (line, col);
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            Tok::Int(digits.parse().expect("digits"))
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if c.is_uppercase() || c == '_' {
                Tok::Var(word)
            } else {
                Tok::Name(word)
            }
        } else if c == '.'
            && (i + 1 == chars.len() || chars[i + 1].is_whitespace() || chars[i + 1] == '%')
        {
            i += 1;
            Tok::End
        } else {
            match c {
                '(' => {
                    i += 1;
                    Tok::Open
                }
                ')' => {
                    i += 1;
                    Tok::Close
                }
                '[' => {
                    i += 1;
                    Tok::OpenList
                }
                ']' => {
                    i += 1;
                    Tok::CloseList
                }
                ',' => {
                    i += 1;
                    Tok::Comma
                }
                '|' => {
                    i += 1;
                    Tok::Bar
                }
                _ if is_symbol_char(c) => {
                    // longest known operator at this position
                    let op = SYMBOL_OPS
                        .iter()
                        .filter(|op| {
                            let op: Vec<char> = op.chars().collect();
                            chars[i..].starts_with(&op)
                        })
                        .max_by_key(|op| op.len())
                        .ok_or_else(|| err(line, col, format!("unknown operator starting with `{c}`")))?;
                    i += op.chars().count();
                    Tok::Op(op)
                }
                _ => return Err(err(line, col, format!("unexpected character `{c}`"))),
            }
        };
        col += i - start;
        tokens.push(Token {
            tok,
            line: start_line,
            column: start_col,
            glued,
        });
        glued = true;
    }
    tokens.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
        glued: false,
    });
    Ok(tokens)
}

fn infix(tok: &Tok) -> Option<(Symbol, u32, u32, u32)> {
    // (functor, precedence, max left precedence, max right precedence)
    let (sym, p, left, right) = match tok {
        Tok::Comma => (Symbol::COMMA, 1000, 999, 1000),
        Tok::Name(n) if n == "is" => (Symbol::IS, 700, 699, 699),
        Tok::Op(op) => match *op {
            "=" => (Symbol::EQ, 700, 699, 699),
            "\\=" => (Symbol::NOT_UNIFIABLE, 700, 699, 699),
            "<" => (Symbol::LT, 700, 699, 699),
            ">" => (Symbol::GT, 700, 699, 699),
            "=<" => (Symbol::LE, 700, 699, 699),
            ">=" => (Symbol::GE, 700, 699, 699),
            "+" => (Symbol::PLUS, 500, 500, 499),
            "-" => (Symbol::MINUS, 500, 500, 499),
            "*" => (Symbol::TIMES, 400, 400, 399),
            _ => return None,
        },
        _ => return None,
    };
    Some((sym, p, left, right))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    vars: HashMap<String, VarId>,
    names: Vec<(String, VarId)>,
    next_var: u32,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: tokenize(text)?,
            pos: 0,
            vars: HashMap::new(),
            names: Vec::new(),
            next_var: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", describe(&self.peek().tok))))
        }
    }

    /// Clears the variable scope; each clause has its own.
    fn reset_scope(&mut self) {
        self.vars.clear();
        self.names.clear();
        self.next_var = 0;
    }

    fn variable(&mut self, name: &str) -> Term {
        if name == "_" {
            let v = VarId(self.next_var);
            self.next_var += 1;
            return Term::Var(v);
        }
        if let Some(v) = self.vars.get(name) {
            return Term::Var(*v);
        }
        let v = VarId(self.next_var);
        self.next_var += 1;
        self.vars.insert(name.to_string(), v);
        self.names.push((name.to_string(), v));
        Term::Var(v)
    }

    fn parse(&mut self, max_prec: u32) -> Result<Term, ParseError> {
        let mut left = self.primary(max_prec)?;
        let mut left_prec = 0;
        while let Some((sym, p, lmax, rmax)) = infix(&self.peek().tok) {
            if p > max_prec || left_prec > lmax {
                break;
            }
            self.advance();
            let right = self.parse(rmax)?;
            left = Term::binary(sym, left, right);
            left_prec = p;
        }
        Ok(left)
    }

    fn primary(&mut self, max_prec: u32) -> Result<Term, ParseError> {
        let token = self.advance();
        match token.tok {
            Tok::Int(v) => Ok(Term::int(v)),
            Tok::Var(name) => Ok(self.variable(&name)),
            Tok::Op("-") => {
                if let Tok::Int(v) = &self.peek().tok {
                    if self.peek().glued {
                        let v = -v.clone();
                        self.advance();
                        return Ok(Term::int(v));
                    }
                }
                if max_prec < 200 {
                    return Err(self.error("prefix `-` needs parentheses here"));
                }
                let operand = self.parse(200)?;
                Ok(Term::from_symbol(Symbol::MINUS, vec![operand]))
            }
            Tok::Op("!") => Ok(Term::Atom(Symbol::CUT)),
            Tok::Open => {
                let inner = self.parse(1200)?;
                self.expect(Tok::Close, "`)`")?;
                Ok(inner)
            }
            Tok::OpenList => {
                if self.peek().tok == Tok::CloseList {
                    self.advance();
                    return Ok(Term::nil());
                }
                let mut items = vec![self.parse(999)?];
                while self.peek().tok == Tok::Comma {
                    self.advance();
                    items.push(self.parse(999)?);
                }
                let tail = if self.peek().tok == Tok::Bar {
                    self.advance();
                    self.parse(999)?
                } else {
                    Term::nil()
                };
                self.expect(Tok::CloseList, "`]`")?;
                Ok(Term::list_with_tail(items, tail))
            }
            Tok::Name(name) => {
                if self.peek().tok == Tok::Open && self.peek().glued {
                    self.advance();
                    let mut args = vec![self.parse(999)?];
                    while self.peek().tok == Tok::Comma {
                        self.advance();
                        args.push(self.parse(999)?);
                    }
                    self.expect(Tok::Close, "`)` or `,`")?;
                    Ok(Term::compound(&name, args))
                } else {
                    Ok(Term::atom(&name))
                }
            }
            other => {
                self.pos -= 1;
                Err(self.error(format!("expected a term, found {}", describe(&other))))
            }
        }
    }

    /// Comma-separated goals at argument precedence, keeping each
    /// parenthesized group as one item.
    fn goal_sequence(&mut self) -> Result<Vec<(Term, usize, usize)>, ParseError> {
        let mut goals = Vec::new();
        loop {
            let (line, col) = (self.peek().line, self.peek().column);
            goals.push((self.parse(999)?, line, col));
            if self.peek().tok == Tok::Comma {
                self.advance();
            } else {
                break;
            }
        }
        Ok(goals)
    }

    fn clause(&mut self) -> Result<GuardedRule, ParseError> {
        let (line, column) = (self.peek().line, self.peek().column);
        let head = self.parse(999)?;
        let parts = if self.peek().tok == Tok::Op(":-") {
            self.advance();
            let goals = self.goal_sequence()?;
            split_body(goals, line, column)?
        } else {
            [Term::truth(), Term::truth(), Term::truth(), Term::truth()]
        };
        self.expect(Tok::End, "`.` ending the clause")?;
        let [guard, before, rec, after] = parts;
        GuardedRule::new(head, guard, before, rec, after).map_err(|e| ParseError {
            line,
            column,
            message: e.to_string(),
        })
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Var(v) => format!("variable `{v}`"),
        Tok::Name(n) => format!("`{n}`"),
        Tok::Int(v) => format!("integer `{v}`"),
        Tok::Op(op) => format!("`{op}`"),
        Tok::Open => "`(`".into(),
        Tok::Close => "`)`".into(),
        Tok::OpenList => "`[`".into(),
        Tok::CloseList => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Bar => "`|`".into(),
        Tok::End => "`.`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn contains_cut(t: &Term) -> bool {
    let mut found = false;
    t.walk(&mut |x| found |= matches!(x, Term::Atom(s) if *s == Symbol::CUT));
    found
}

/// Splits a clause body into guard, before-goals, recursive goals and
/// after-goals.
fn split_body(
    goals: Vec<(Term, usize, usize)>,
    line: usize,
    column: usize,
) -> Result<[Term; 4], ParseError> {
    let cut_at: Vec<usize> = goals
        .iter()
        .enumerate()
        .filter(|(_, (g, _, _))| matches!(g, Term::Atom(s) if *s == Symbol::CUT))
        .map(|(i, _)| i)
        .collect();
    for (g, l, c) in &goals {
        if !matches!(g, Term::Atom(s) if *s == Symbol::CUT) && contains_cut(g) {
            return Err(ParseError {
                line: *l,
                column: *c,
                message: "`!` is only allowed between the guard and the body".into(),
            });
        }
    }
    if cut_at.len() > 1 {
        let (_, l, c) = &goals[cut_at[1]];
        return Err(ParseError {
            line: *l,
            column: *c,
            message: "a clause may contain only one `!`".into(),
        });
    }
    let (guard, body): (Vec<Term>, Vec<Term>) = match cut_at.first() {
        Some(&i) => {
            let mut goals: Vec<Term> = goals.into_iter().map(|(g, _, _)| g).collect();
            let body = goals.split_off(i + 1);
            goals.pop();
            (goals, body)
        }
        None => (Vec::new(), goals.into_iter().map(|(g, _, _)| g).collect()),
    };
    let user_only = |t: &Term| t.is_true() || t.conjuncts().iter().all(|g| !is_builtin(g));
    let builtin_only = |t: &Term| t.conjuncts().iter().all(|g| is_builtin(g) || g.is_var());
    let guard = Term::conjunction(guard);
    if body.len() == 3 && builtin_only(&body[0]) && user_only(&body[1]) && builtin_only(&body[2]) {
        let [before, rec, after]: [Term; 3] = body.try_into().expect("three parts");
        return Ok([guard, before, rec, after]);
    }
    // Plain body: builtins, then the recursive calls, then builtins.
    let flat: Vec<Term> = body.iter().flat_map(Term::conjuncts).collect();
    let split1 = flat.iter().position(|g| !is_builtin(g)).unwrap_or(flat.len());
    let split2 = flat[split1..]
        .iter()
        .position(is_builtin)
        .map_or(flat.len(), |p| split1 + p);
    if flat[split2..].iter().any(|g| !is_builtin(g)) {
        return Err(ParseError {
            line,
            column,
            message: "user goals must form one contiguous group in the body".into(),
        });
    }
    Ok([
        guard,
        Term::conjunction(flat[..split1].to_vec()),
        Term::conjunction(flat[split1..split2].to_vec()),
        Term::conjunction(flat[split2..].to_vec()),
    ])
}

/// Parses a single term; variables are numbered from 0 in order of first
/// appearance.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    parse_term_with_names(text).map(|(t, _)| t)
}

pub fn parse_term_with_names(text: &str) -> Result<(Term, Vec<(String, VarId)>), ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.parse(1200)?;
    if p.peek().tok == Tok::End {
        p.advance();
    }
    if p.peek().tok != Tok::Eof {
        return Err(p.error(format!("unexpected {}", describe(&p.peek().tok))));
    }
    Ok((t, p.names))
}

/// Parses one clause into a normalized rule.
pub fn parse_rule(text: &str) -> Result<GuardedRule, ParseError> {
    let mut p = Parser::new(text)?;
    let rule = p.clause()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.error(format!("unexpected {} after clause", describe(&p.peek().tok))));
    }
    Ok(rule)
}

/// Parses one clause and also returns the source name of each rule-local
/// variable (indexed by id).
pub fn parse_rule_with_names(text: &str) -> Result<(GuardedRule, Vec<String>), ParseError> {
    rule_with_names(text, false)
}

/// Like [`parse_rule_with_names`], but variables may stand for whole rule
/// parts, as in scheme templates.
pub(crate) fn parse_template(text: &str) -> Result<(GuardedRule, Vec<String>), ParseError> {
    rule_with_names(text, true)
}

fn rule_with_names(text: &str, template: bool) -> Result<(GuardedRule, Vec<String>), ParseError> {
    let mut p = Parser::new(text)?;
    let head = p.parse(999)?;
    let (line, column) = (p.peek().line, p.peek().column);
    let parts = if p.peek().tok == Tok::Op(":-") {
        p.advance();
        let goals = p.goal_sequence()?;
        split_body(goals, line, column)?
    } else {
        [Term::truth(), Term::truth(), Term::truth(), Term::truth()]
    };
    if p.peek().tok == Tok::End {
        p.advance();
    }
    let [guard, before, rec, after] = parts;
    let all = [&head, &guard, &before, &rec, &after];
    // the rule constructor numbers variables by first occurrence
    let mut order: Vec<VarId> = Vec::new();
    for part in all {
        for v in part.vars() {
            if !order.contains(&v) {
                order.push(v);
            }
        }
    }
    let names = order
        .iter()
        .map(|v| {
            p.names
                .iter()
                .find(|(_, id)| id == v)
                .map(|(n, _)| n.clone())
                .unwrap_or_else(|| "_".to_string())
        })
        .collect();
    let rule = if template {
        GuardedRule::normalized([head, guard, before, rec, after])
    } else {
        GuardedRule::new(head, guard, before, rec, after).map_err(|e| ParseError {
            line,
            column,
            message: e.to_string(),
        })?
    };
    Ok((rule, names))
}

/// Parses a rule file.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(text)?;
    let mut name: Option<String> = None;
    let mut entry: Option<Predicate> = None;
    let mut decks: Vec<(Option<String>, Vec<GuardedRule>)> = Vec::new();
    let mut explicit_decks = false;
    let mut first_rule_pos: Option<(usize, usize)> = None;
    while p.peek().tok != Tok::Eof {
        p.reset_scope();
        if p.peek().tok == Tok::Op(":-") {
            p.advance();
            let (line, column) = (p.peek().line, p.peek().column);
            let directive = match p.advance().tok {
                Tok::Name(n) => n,
                other => {
                    return Err(ParseError {
                        line,
                        column,
                        message: format!("expected a directive name, found {}", describe(&other)),
                    })
                }
            };
            match directive.as_str() {
                "deck" => {
                    explicit_decks = true;
                    decks.push((None, Vec::new()));
                }
                "entry" => {
                    let pred_name = match p.advance().tok {
                        Tok::Name(n) => n,
                        other => {
                            return Err(ParseError {
                                line,
                                column,
                                message: format!("expected predicate name, found {}", describe(&other)),
                            })
                        }
                    };
                    p.expect(Tok::Op("/"), "`/`")?;
                    let arity = match p.advance().tok {
                        Tok::Int(v) => usize::try_from(v).map_err(|_| p.error("arity out of range"))?,
                        other => return Err(p.error(format!("expected arity, found {}", describe(&other)))),
                    };
                    entry = Some(Predicate::new(&pred_name, arity));
                }
                "scheme" => {
                    let scheme = match p.advance().tok {
                        Tok::Name(n) => n,
                        other => return Err(p.error(format!("expected scheme name, found {}", describe(&other)))),
                    };
                    if decks.is_empty() {
                        decks.push((None, Vec::new()));
                    }
                    decks.last_mut().expect("deck").0 = Some(scheme);
                }
                "program" => match p.advance().tok {
                    Tok::Name(n) => name = Some(n),
                    other => return Err(p.error(format!("expected program name, found {}", describe(&other)))),
                },
                other => {
                    return Err(ParseError {
                        line,
                        column,
                        message: format!("unknown directive `{other}`"),
                    })
                }
            }
            p.expect(Tok::End, "`.` ending the directive")?;
            continue;
        }
        let pos = (p.peek().line, p.peek().column);
        first_rule_pos.get_or_insert(pos);
        let rule = p.clause()?;
        if decks.is_empty() {
            decks.push((None, Vec::new()));
        }
        decks.last_mut().expect("deck").1.push(rule);
    }
    decks.retain(|(s, d)| !d.is_empty() || s.is_some());
    let (line, column) = first_rule_pos.unwrap_or((1, 1));
    let at = |message: String| ParseError { line, column, message };
    let first = decks
        .iter()
        .flat_map(|(_, d)| d.first())
        .next()
        .ok_or_else(|| at("program has no rules".into()))?;
    let entry = entry.unwrap_or_else(|| first.predicate());
    if !explicit_decks && decks.len() == 1 && decks[0].0.is_none() {
        decks = split_into_decks(std::mem::take(&mut decks[0].1));
    }
    let program = Program::new(
        name.unwrap_or_else(|| entry.name.to_string()),
        entry,
        decks.iter().map(|(_, d)| RuleDeck::from(d.clone())).collect(),
        decks.into_iter().map(|(s, _)| s).collect(),
    )
    .map_err(|e| at(e.to_string()))?;
    Ok(program)
}

/// One deck per recursive rule, each followed by all base cases.
fn split_into_decks(rules: Vec<GuardedRule>) -> Vec<(Option<String>, Vec<GuardedRule>)> {
    let (recursive, base): (Vec<_>, Vec<_>) = rules.into_iter().partition(|r| !r.is_base_case());
    if recursive.is_empty() {
        return vec![(None, base)];
    }
    recursive
        .into_iter()
        .map(|r| {
            let mut deck = vec![r];
            deck.extend(base.iter().cloned());
            (None, deck)
        })
        .collect()
}
