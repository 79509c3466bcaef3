//! Schemes whose parameters are integer coefficients.

use num_bigint::BigInt;

use crate::error::SchemeError;
use crate::rule::GuardedRule;
use crate::term::Term;

use super::{mismatch, Scheme, Template};

fn ints(scheme: &str, values: Vec<Term>) -> Result<Vec<BigInt>, SchemeError> {
    values
        .into_iter()
        .map(|v| {
            v.to_bigint()
                .ok_or_else(|| mismatch(scheme, format!("parameter `{v}` is not an integer")))
        })
        .collect()
}

fn terms(values: Vec<BigInt>) -> Vec<Term> {
    values.into_iter().map(Term::int).collect()
}

/// `s(A,C) :- A>V ,!, B is A-V, s(B,D), C is V*A-W+D` with
/// `V' = 2V`, `W' = 2W + V^2`.
pub struct SumScheme {
    template: Template,
}

impl SumScheme {
    pub fn new() -> Self {
        SumScheme {
            template: Template::new(
                "sum",
                "s(A,C) :- A>V ,!, B is A-V, s(B,D), C is V*A-W+D.",
                &["V", "W"],
            ),
        }
    }

    /// `(V, W)` of an instance.
    pub fn params(&self, rule: &GuardedRule) -> Result<(BigInt, BigInt), SchemeError> {
        let p = ints("sum", self.template.match_rule(rule)?)?;
        let [v, w]: [BigInt; 2] = p.try_into().expect("two parameters");
        Ok((v, w))
    }
}

impl Default for SumScheme {
    fn default() -> Self {
        Self::new()
    }
}

impl Scheme for SumScheme {
    fn name(&self) -> &str {
        "sum"
    }

    fn applies_to(&self, rule: &GuardedRule) -> bool {
        self.params(rule).is_ok()
    }

    fn step(&self, rule: &GuardedRule) -> Result<GuardedRule, SchemeError> {
        let (v, w) = self.params(rule)?;
        let next_w = 2 * &w + &v * &v;
        self.template.instantiate(&terms(vec![2 * v, next_w]))
    }
}

/// `f(N,F) :- N>A ,!, (N1 is N-A, N2 is N1-1), (f(N1,F1), f(N2,F2)), F is P*F1+Q*F2`
/// with `A' = 2A`, `P' = P^2 + Q^2`, `Q' = 2PQ - Q^2`.
pub struct FibScheme {
    template: Template,
}

impl FibScheme {
    pub fn new() -> Self {
        FibScheme {
            template: Template::new(
                "fib",
                "f(N,F) :- N>A ,!, (N1 is N-A, N2 is N1-1), (f(N1,F1), f(N2,F2)), F is P*F1+Q*F2.",
                &["A", "P", "Q"],
            ),
        }
    }

    /// `(A, P, Q)` of an instance.
    pub fn params(&self, rule: &GuardedRule) -> Result<(BigInt, BigInt, BigInt), SchemeError> {
        let p = ints("fib", self.template.match_rule(rule)?)?;
        let [a, p, q]: [BigInt; 3] = p.try_into().expect("three parameters");
        Ok((a, p, q))
    }
}

impl Default for FibScheme {
    fn default() -> Self {
        Self::new()
    }
}

impl Scheme for FibScheme {
    fn name(&self) -> &str {
        "fib"
    }

    fn applies_to(&self, rule: &GuardedRule) -> bool {
        self.params(rule).is_ok()
    }

    fn step(&self, rule: &GuardedRule) -> Result<GuardedRule, SchemeError> {
        let (a, p, q) = self.params(rule)?;
        let qq = &q * &q;
        let next_p = &p * &p + &qq;
        let next_q = 2 * &p * &q - qq;
        self.template.instantiate(&terms(vec![2 * a, next_p, next_q]))
    }
}

/// Both subtraction rules of Euclid's algorithm:
/// `g(M,N,X) :- A*M<N ,!, L is N-A*M, g(M,L,X), true` and
/// `g(M,N,X) :- M>A*N ,!, L is M-A*N, g(L,N,X), true`, with `A' = 2A`.
pub struct GcdScheme {
    templates: [Template; 2],
}

impl GcdScheme {
    pub fn new() -> Self {
        GcdScheme {
            templates: [
                Template::new("gcd", "g(M,N,X) :- A*M<N ,!, L is N-A*M, g(M,L,X), true.", &["A"]),
                Template::new("gcd", "g(M,N,X) :- M>A*N ,!, L is M-A*N, g(L,N,X), true.", &["A"]),
            ],
        }
    }

    /// Which of the two templates the rule instantiates, and its `A`.
    pub fn params(&self, rule: &GuardedRule) -> Result<(usize, BigInt), SchemeError> {
        let mut last = None;
        for (i, t) in self.templates.iter().enumerate() {
            match t.match_rule(rule).and_then(|p| ints("gcd", p)) {
                Ok(p) => return Ok((i, p[0].clone())),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("two templates"))
    }
}

impl Default for GcdScheme {
    fn default() -> Self {
        Self::new()
    }
}

impl Scheme for GcdScheme {
    fn name(&self) -> &str {
        "gcd"
    }

    fn applies_to(&self, rule: &GuardedRule) -> bool {
        self.params(rule).is_ok()
    }

    fn step(&self, rule: &GuardedRule) -> Result<GuardedRule, SchemeError> {
        let (which, a) = self.params(rule)?;
        self.templates[which].instantiate(&[Term::int(2 * a)])
    }
}
