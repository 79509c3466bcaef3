//! Terms: variables, integers, atoms and compound terms.
//!
//! Atoms and functors are interned [`Symbol`]s. Integers are stored inline
//! while they fit in an `i64` and promoted to a shared `BigInt` otherwise;
//! the two representations never overlap, so structural comparison stays
//! exact.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// An interned atom or functor name.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u32);

struct Interner {
    names: Vec<Arc<str>>,
    ids: HashMap<Arc<str>, u32>,
}

const PREDEFINED: [&str; 19] = [
    "true", ",", "=", "is", "<", ">", "=<", ">=", "\\=", "append", "m", "clean", "[]", ".", "+",
    "-", "*", ":-", "!",
];

static INTERNER: LazyLock<RwLock<Interner>> = LazyLock::new(|| {
    let mut interner = Interner {
        names: Vec::new(),
        ids: HashMap::new(),
    };
    for name in PREDEFINED {
        let name: Arc<str> = Arc::from(name);
        interner.ids.insert(name.clone(), interner.names.len() as u32);
        interner.names.push(name);
    }
    RwLock::new(interner)
});

impl Symbol {
    pub const TRUE: Symbol = Symbol(0);
    pub const COMMA: Symbol = Symbol(1);
    pub const EQ: Symbol = Symbol(2);
    pub const IS: Symbol = Symbol(3);
    pub const LT: Symbol = Symbol(4);
    pub const GT: Symbol = Symbol(5);
    pub const LE: Symbol = Symbol(6);
    pub const GE: Symbol = Symbol(7);
    pub const NOT_UNIFIABLE: Symbol = Symbol(8);
    pub const APPEND: Symbol = Symbol(9);
    pub const MERGE: Symbol = Symbol(10);
    pub const CLEAN: Symbol = Symbol(11);
    pub const NIL: Symbol = Symbol(12);
    pub const DOT: Symbol = Symbol(13);
    pub const PLUS: Symbol = Symbol(14);
    pub const MINUS: Symbol = Symbol(15);
    pub const TIMES: Symbol = Symbol(16);
    pub const NECK: Symbol = Symbol(17);
    pub const CUT: Symbol = Symbol(18);

    pub fn intern(name: &str) -> Symbol {
        if let Some(&id) = INTERNER.read().expect("interner poisoned").ids.get(name) {
            return Symbol(id);
        }
        let mut interner = INTERNER.write().expect("interner poisoned");
        if let Some(&id) = interner.ids.get(name) {
            return Symbol(id);
        }
        let id = interner.names.len() as u32;
        let name: Arc<str> = Arc::from(name);
        interner.ids.insert(name.clone(), id);
        interner.names.push(name);
        Symbol(id)
    }

    pub fn name(self) -> Arc<str> {
        INTERNER.read().expect("interner poisoned").names[self.0 as usize].clone()
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Identifier of a logic variable.
///
/// Inside a stored rule the ids are rule-local (`0..n`); they become global
/// ids once offset by the [`Frame`](crate::bindings::Frame) the rule is
/// activated in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone)]
pub enum Term {
    Var(VarId),
    Small(i64),
    Big(Arc<BigInt>),
    Atom(Symbol),
    Compound(Arc<Compound>),
}

pub struct Compound {
    functor: Symbol,
    args: Box<[Term]>,
    ground: bool,
}

impl Compound {
    pub fn functor(&self) -> Symbol {
        self.functor
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// True when no variable occurs anywhere below this node.
    pub fn is_ground(&self) -> bool {
        self.ground
    }
}

// Long lists are deeply right-nested; the default recursive drop would
// overflow the stack on them.
impl Drop for Compound {
    fn drop(&mut self) {
        let mut pending: Vec<Term> = std::mem::take(&mut self.args).into_vec();
        while let Some(term) = pending.pop() {
            if let Term::Compound(c) = term {
                if let Ok(mut inner) = Arc::try_unwrap(c) {
                    pending.extend(std::mem::take(&mut inner.args).into_vec());
                }
            }
        }
    }
}

impl Term {
    pub fn var(id: VarId) -> Term {
        Term::Var(id)
    }

    pub fn atom(name: &str) -> Term {
        Term::Atom(Symbol::intern(name))
    }

    pub fn truth() -> Term {
        Term::Atom(Symbol::TRUE)
    }

    pub fn nil() -> Term {
        Term::Atom(Symbol::NIL)
    }

    pub fn int(value: impl Into<BigInt>) -> Term {
        let value: BigInt = value.into();
        match value.to_i64() {
            Some(small) => Term::Small(small),
            None => Term::Big(Arc::new(value)),
        }
    }

    pub fn small(value: i64) -> Term {
        Term::Small(value)
    }

    /// Builds a compound term; zero arguments yield the atom.
    pub fn compound(functor: &str, args: Vec<Term>) -> Term {
        Term::from_symbol(Symbol::intern(functor), args)
    }

    pub fn from_symbol(functor: Symbol, args: Vec<Term>) -> Term {
        if args.is_empty() {
            return Term::Atom(functor);
        }
        let ground = args.iter().all(Term::is_ground);
        Term::Compound(Arc::new(Compound {
            functor,
            args: args.into_boxed_slice(),
            ground,
        }))
    }

    pub fn binary(functor: Symbol, left: Term, right: Term) -> Term {
        Term::from_symbol(functor, vec![left, right])
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::binary(Symbol::DOT, head, tail)
    }

    /// A list of `items` ending in `tail` (`[]` for a proper list).
    pub fn list_with_tail<I>(items: I, tail: Term) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: DoubleEndedIterator,
    {
        items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| Term::cons(item, acc))
    }

    pub fn list<I>(items: I) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: DoubleEndedIterator,
    {
        Term::list_with_tail(items, Term::nil())
    }

    /// Right-associated conjunction of `goals`; the empty conjunction is `true`.
    pub fn conjunction<I>(goals: I) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut iter = goals.into_iter().rev();
        match iter.next() {
            None => Term::truth(),
            Some(last) => iter.fold(last, |acc, goal| Term::binary(Symbol::COMMA, goal, acc)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Compound(c) => c.ground,
            _ => true,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Term::Atom(s) if *s == Symbol::TRUE)
    }

    pub fn is_int(&self) -> bool {
        matches!(self, Term::Small(_) | Term::Big(_))
    }

    pub fn to_bigint(&self) -> Option<BigInt> {
        match self {
            Term::Small(v) => Some(BigInt::from(*v)),
            Term::Big(v) => Some((**v).clone()),
            _ => None,
        }
    }

    pub fn as_compound(&self) -> Option<&Compound> {
        match self {
            Term::Compound(c) => Some(c),
            _ => None,
        }
    }

    /// Name and arity, for atoms and compounds.
    pub fn indicator(&self) -> Option<(Symbol, usize)> {
        match self {
            Term::Atom(s) => Some((*s, 0)),
            Term::Compound(c) => Some((c.functor, c.args.len())),
            _ => None,
        }
    }

    pub fn is_functor(&self, functor: Symbol, arity: usize) -> bool {
        self.indicator() == Some((functor, arity))
    }

    /// Splits a right-nested `','/2` chain into its conjuncts. Nested
    /// conjunctions in left position are flattened as well.
    pub fn conjuncts(&self) -> Vec<Term> {
        let mut out = Vec::new();
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            match &t {
                Term::Compound(c) if c.functor == Symbol::COMMA && c.args.len() == 2 => {
                    stack.push(c.args[1].clone());
                    stack.push(c.args[0].clone());
                }
                _ => out.push(t),
            }
        }
        out
    }

    /// Rebuilds the term bottom-up, replacing every variable by `leaf(var)`.
    /// Ground subterms are shared, not copied. Iterative, so deep lists are fine.
    pub fn map_vars(&self, leaf: &mut impl FnMut(VarId) -> Term) -> Term {
        enum Job<'a> {
            Visit(&'a Term),
            Build(Symbol, usize),
        }
        let mut jobs = vec![Job::Visit(self)];
        let mut out: Vec<Term> = Vec::new();
        while let Some(job) = jobs.pop() {
            match job {
                Job::Visit(t) => match t {
                    Term::Var(v) => out.push(leaf(*v)),
                    Term::Compound(c) if !c.ground => {
                        jobs.push(Job::Build(c.functor, c.args.len()));
                        jobs.extend(c.args.iter().rev().map(Job::Visit));
                    }
                    _ => out.push(t.clone()),
                },
                Job::Build(functor, n) => {
                    let args = out.split_off(out.len() - n);
                    out.push(Term::from_symbol(functor, args));
                }
            }
        }
        out.pop().expect("map_vars produces one term")
    }

    /// Variables in order of first occurrence (depth-first, left to right).
    pub fn vars(&self) -> Vec<VarId> {
        let mut seen = Vec::new();
        self.walk(&mut |t| {
            if let Term::Var(v) = t {
                if !seen.contains(v) {
                    seen.push(*v);
                }
            }
        });
        seen
    }

    /// Pre-order visit of every node, left to right.
    pub fn walk(&self, visit: &mut impl FnMut(&Term)) {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            visit(t);
            if let Term::Compound(c) = t {
                stack.extend(c.args.iter().rev());
            }
        }
    }

    /// Number of nodes, counting each integer as its bit length.
    pub fn size(&self) -> u64 {
        let mut total = 0u64;
        self.walk(&mut |t| {
            total += match t {
                Term::Small(v) => 64 - v.unsigned_abs().leading_zeros() as u64,
                Term::Big(v) => v.bits(),
                _ => 1,
            }
        });
        total
    }

    /// Elements of a proper list, or `None` if the term is not one.
    pub fn list_items(&self) -> Option<Vec<Term>> {
        let mut items = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Term::Atom(s) if *s == Symbol::NIL => return Some(items),
                Term::Compound(c) if c.functor == Symbol::DOT && c.args.len() == 2 => {
                    items.push(c.args[0].clone());
                    cur = &c.args[1];
                }
                _ => return None,
            }
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        let mut stack = vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            match (a, b) {
                (Term::Var(x), Term::Var(y)) if x == y => {}
                (Term::Small(x), Term::Small(y)) if x == y => {}
                (Term::Big(x), Term::Big(y)) if x == y => {}
                (Term::Atom(x), Term::Atom(y)) if x == y => {}
                (Term::Compound(x), Term::Compound(y)) => {
                    if Arc::ptr_eq(x, y) {
                        continue;
                    }
                    if x.functor != y.functor || x.args.len() != y.args.len() {
                        return false;
                    }
                    stack.extend(x.args.iter().zip(y.args.iter()));
                }
                _ => return false,
            }
        }
        true
    }
}

impl Eq for Term {}

impl From<i64> for Term {
    fn from(v: i64) -> Term {
        Term::Small(v)
    }
}

impl From<BigInt> for Term {
    fn from(v: BigInt) -> Term {
        Term::int(v)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::term_to_string(self, &mut |v| format!("_G{}", v.0)))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
