//! Variable bindings with an undo trail.
//!
//! Bindings use structure sharing: a variable may be bound to a term that
//! still contains rule-local variables, together with the [`Frame`] that
//! gives those variables their global identity. Rules are therefore never
//! copied just to be tried against a goal.
//!
//! The occurs check is omitted, as in standard Prolog.

use std::collections::HashMap;

use crate::term::{Symbol, Term, VarId};

/// Offset that turns the rule-local variable ids of a stored term into
/// global ids. Terms built directly against the store live in [`Frame::ROOT`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Frame(pub u32);

impl Frame {
    pub const ROOT: Frame = Frame(0);

    fn global(self, v: VarId) -> VarId {
        VarId(v.0 + self.0)
    }
}

/// Marks a point the bindings can be rolled back to.
#[must_use = "a checkpoint must be rolled back or committed"]
#[derive(Debug)]
pub struct Checkpoint {
    trail_len: usize,
}

type PendingPair = ((Term, Frame), (Term, Frame));

#[derive(Default, Clone)]
pub struct Bindings {
    slots: Vec<Option<(Term, Frame)>>,
    trail: Vec<VarId>,
    next_var: u32,
    open_checkpoints: usize,
    /// Worklist reused across unifications.
    pending: Vec<PendingPair>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh_var(&mut self) -> Term {
        let frame = self.alloc_frame(1);
        Term::Var(VarId(frame.0))
    }

    /// Reserves `n` consecutive fresh variables and returns the frame that
    /// maps rule-local ids `0..n` onto them.
    pub fn alloc_frame(&mut self, n: u32) -> Frame {
        let base = self.next_var;
        self.next_var = base
            .checked_add(n)
            .expect("variable id space exhausted");
        if self.slots.len() < self.next_var as usize {
            self.slots.resize(self.next_var as usize, None);
        }
        Frame(base)
    }

    /// Hands back every variable allocated since `mark` (an earlier
    /// [`var_count`](Self::var_count)). None of them may be bound or referenced
    /// by a binding; this holds after rolling back a checkpoint taken before
    /// they were allocated.
    pub fn release_vars(&mut self, mark: u32) {
        debug_assert!(mark <= self.next_var);
        debug_assert!(self.slots[mark as usize..].iter().all(Option::is_none));
        self.next_var = mark;
        self.slots.truncate(mark as usize);
    }

    /// Drops every variable allocated since `mark`, bound or not. No
    /// binding of an older variable may still refer to them, and no
    /// checkpoint may be open.
    pub fn discard_vars(&mut self, mark: u32) {
        assert_eq!(self.open_checkpoints, 0, "discarding variables under a checkpoint");
        debug_assert!(mark <= self.next_var);
        self.next_var = mark;
        self.slots.truncate(mark as usize);
    }

    /// Replaces the binding of `v` by the resolved term `term`.
    pub fn rebind(&mut self, v: VarId, term: Term) {
        assert_eq!(self.open_checkpoints, 0, "rebinding under a checkpoint");
        self.slots[v.index()] = Some((term, Frame::ROOT));
    }

    /// Appends the unbound variables reachable from `term` to `out`, as
    /// global ids. A variable reached along several paths is listed once
    /// per path.
    pub fn unbound_vars_in(&self, term: &Term, frame: Frame, out: &mut Vec<VarId>) {
        let mut todo = Vec::new();
        let mut visit = |t: &Term, f: Frame, todo: &mut Vec<(Term, Frame)>| {
            let (t, f) = self.deref(t, f);
            match &t {
                Term::Var(v) => out.push(*v),
                Term::Compound(c) if !c.is_ground() => todo.push((t.clone(), f)),
                _ => {}
            }
        };
        visit(term, frame, &mut todo);
        while let Some((t, f)) = todo.pop() {
            if let Term::Compound(c) = &t {
                for a in c.args() {
                    visit(a, f, &mut todo);
                }
            }
        }
    }

    /// Number of variables handed out so far.
    pub fn var_count(&self) -> u32 {
        self.next_var
    }

    pub fn is_bound(&self, v: VarId) -> bool {
        matches!(self.slots.get(v.index()), Some(Some(_)))
    }

    /// Follows variable bindings until reaching a non-variable term or an
    /// unbound variable. Unbound variables come back as global ids in the
    /// root frame; ground terms also come back in the root frame.
    pub fn deref(&self, term: &Term, frame: Frame) -> (Term, Frame) {
        let (mut t, mut f) = (term, frame);
        while let Term::Var(v) = t {
            let g = f.global(*v);
            match self.slots.get(g.index()) {
                Some(Some((bound, bf))) => (t, f) = (bound, *bf),
                _ => return (Term::Var(g), Frame::ROOT),
            }
        }
        if t.is_ground() {
            (t.clone(), Frame::ROOT)
        } else {
            (t.clone(), f)
        }
    }

    fn bind(&mut self, v: VarId, term: Term, frame: Frame) {
        let frame = if term.is_ground() { Frame::ROOT } else { frame };
        if self.slots.len() <= v.index() {
            self.slots.resize(v.index() + 1, None);
            self.next_var = self.next_var.max(v.0 + 1);
        }
        self.slots[v.index()] = Some((term, frame));
        if self.open_checkpoints > 0 {
            self.trail.push(v);
        }
    }

    pub fn checkpoint(&mut self) -> Checkpoint {
        self.open_checkpoints += 1;
        Checkpoint {
            trail_len: self.trail.len(),
        }
    }

    /// Undoes every binding made since `cp`.
    pub fn rollback(&mut self, cp: Checkpoint) {
        self.undo_to(cp.trail_len);
        self.close_checkpoint();
    }

    /// Keeps the bindings made since `cp`.
    pub fn commit(&mut self, cp: Checkpoint) {
        let _ = cp;
        self.close_checkpoint();
    }

    fn close_checkpoint(&mut self) {
        self.open_checkpoints -= 1;
        if self.open_checkpoints == 0 {
            self.trail.clear();
        }
    }

    fn undo_to(&mut self, len: usize) {
        for v in self.trail.drain(len..) {
            self.slots[v.index()] = None;
        }
    }

    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        self.unify_in(a, Frame::ROOT, b, Frame::ROOT)
    }

    /// Unifies `a` (in frame `fa`) with `b` (in frame `fb`). On failure the
    /// bindings are exactly as before the call.
    pub fn unify_in(&mut self, a: &Term, fa: Frame, b: &Term, fb: Frame) -> bool {
        let start = self.trail.len();
        let mut stack = std::mem::take(&mut self.pending);
        stack.clear();
        let mut ok = self.unify_step(a, fa, b, fb, &mut stack);
        while ok {
            let Some(((x, fx), (y, fy))) = stack.pop() else { break };
            ok = self.unify_step(&x, fx, &y, fy, &mut stack);
        }
        stack.clear();
        self.pending = stack;
        if !ok {
            self.undo_to(start);
        } else if self.open_checkpoints == 0 {
            self.trail.truncate(start);
        }
        ok
    }

    /// Unifies one pair; argument pairs of compound terms that are
    /// themselves compound go on `stack`, the rest are handled directly.
    fn unify_step(
        &mut self,
        x: &Term,
        fx: Frame,
        y: &Term,
        fy: Frame,
        stack: &mut Vec<PendingPair>,
    ) -> bool {
        let (x, fx) = self.deref(x, fx);
        let (y, fy) = self.deref(y, fy);
        match (&x, &y) {
            (Term::Var(vx), Term::Var(vy)) => {
                // Bind the younger variable to the older one.
                if vx > vy {
                    self.bind(*vx, y.clone(), fy);
                } else if vx < vy {
                    self.bind(*vy, x.clone(), fx);
                }
                true
            }
            (Term::Var(v), _) => {
                self.bind(*v, y, fy);
                true
            }
            (_, Term::Var(v)) => {
                self.bind(*v, x, fx);
                true
            }
            (Term::Compound(cx), Term::Compound(cy)) => {
                if std::sync::Arc::ptr_eq(cx, cy) && (cx.is_ground() || fx == fy) {
                    return true;
                }
                if cx.functor() != cy.functor() || cx.arity() != cy.arity() {
                    return false;
                }
                for (ax, ay) in cx.args().iter().zip(cy.args()).rev() {
                    if matches!(ax, Term::Compound(_)) || matches!(ay, Term::Compound(_)) {
                        stack.push(((ax.clone(), fx), (ay.clone(), fy)));
                    } else if !self.unify_step(ax, fx, ay, fy, stack) {
                        return false;
                    }
                }
                true
            }
            (Term::Small(p), Term::Small(q)) => p == q,
            (Term::Big(p), Term::Big(q)) => p == q,
            (Term::Atom(p), Term::Atom(q)) => p == q,
            _ => false,
        }
    }

    /// Would `a` and `b` unify? The bindings are left untouched.
    pub fn unifiable(&mut self, a: &Term, b: &Term) -> bool {
        self.unifiable_in(a, Frame::ROOT, b, Frame::ROOT)
    }

    pub fn unifiable_in(&mut self, a: &Term, fa: Frame, b: &Term, fb: Frame) -> bool {
        let cp = self.checkpoint();
        let ok = self.unify_in(a, fa, b, fb);
        self.rollback(cp);
        ok
    }

    pub fn resolve(&self, term: &Term) -> Term {
        self.resolve_in(term, Frame::ROOT)
    }

    /// Substitutes all bound variables transitively. The result contains
    /// only global ids of unbound variables.
    pub fn resolve_in(&self, term: &Term, frame: Frame) -> Term {
        enum Job {
            Visit(Term, Frame),
            Build(Symbol, usize),
        }
        let mut jobs = vec![Job::Visit(term.clone(), frame)];
        let mut out: Vec<Term> = Vec::new();
        while let Some(job) = jobs.pop() {
            match job {
                Job::Visit(t, f) => {
                    let (t, f) = self.deref(&t, f);
                    match &t {
                        Term::Compound(c) if !c.is_ground() => {
                            jobs.push(Job::Build(c.functor(), c.arity()));
                            for arg in c.args().iter().rev() {
                                jobs.push(Job::Visit(arg.clone(), f));
                            }
                        }
                        _ => out.push(t),
                    }
                }
                Job::Build(functor, n) => {
                    let args = out.split_off(out.len() - n);
                    out.push(Term::from_symbol(functor, args));
                }
            }
        }
        out.pop().expect("resolve produces one term")
    }

    /// A variant of the (resolved) term with every variable replaced
    /// consistently by a fresh one.
    pub fn rename_apart(&mut self, term: &Term) -> Term {
        let resolved = self.resolve(term);
        let mut mapping: HashMap<VarId, Term> = HashMap::new();
        resolved.map_vars(&mut |v| {
            mapping
                .entry(v)
                .or_insert_with(|| self.fresh_var())
                .clone()
        })
    }

    /// Every current binding, sorted by variable id.
    pub fn snapshot(&self) -> Vec<(VarId, Term, Frame)> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|(t, f)| (VarId(i as u32), t.clone(), *f)))
            .collect()
    }

    /// Checks that no variable is (transitively) bound to a term containing
    /// itself.
    pub fn is_acyclic(&self) -> bool {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let mut marks = vec![Mark::New; self.slots.len()];
        let children = |v: usize| -> Vec<usize> {
            match &self.slots[v] {
                Some((t, f)) => t.vars().into_iter().map(|x| f.global(x).index()).collect(),
                None => Vec::new(),
            }
        };
        for root in 0..self.slots.len() {
            if marks[root] != Mark::New {
                continue;
            }
            let mut stack = vec![(root, children(root), 0usize)];
            marks[root] = Mark::Active;
            while let Some((v, kids, idx)) = stack.last_mut() {
                if *idx == kids.len() {
                    marks[*v] = Mark::Done;
                    stack.pop();
                    continue;
                }
                let next = kids[*idx];
                *idx += 1;
                if next >= marks.len() {
                    continue;
                }
                match marks[next] {
                    Mark::Active => return false,
                    Mark::Done => {}
                    Mark::New => {
                        marks[next] = Mark::Active;
                        let grandkids = children(next);
                        stack.push((next, grandkids, 0));
                    }
                }
            }
        }
        true
    }
}

/// True if `a` and `b` are identical up to consistent variable renaming.
pub fn is_variant(a: &Term, b: &Term) -> bool {
    let mut forward: HashMap<VarId, VarId> = HashMap::new();
    let mut backward: HashMap<VarId, VarId> = HashMap::new();
    let mut stack = vec![(a, b)];
    while let Some((x, y)) = stack.pop() {
        match (x, y) {
            (Term::Var(vx), Term::Var(vy)) => {
                if *forward.entry(*vx).or_insert(*vy) != *vy
                    || *backward.entry(*vy).or_insert(*vx) != *vx
                {
                    return false;
                }
            }
            (Term::Compound(cx), Term::Compound(cy)) => {
                if cx.functor() != cy.functor() || cx.arity() != cy.arity() {
                    return false;
                }
                stack.extend(cx.args().iter().zip(cy.args()));
            }
            (Term::Var(_), _) | (_, Term::Var(_)) => return false,
            _ => {
                if x != y {
                    return false;
                }
            }
        }
    }
    true
}
