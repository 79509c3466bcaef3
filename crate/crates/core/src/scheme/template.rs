//! Rule templates with named parameter slots.

use std::collections::HashMap;

use crate::error::SchemeError;
use crate::parse::parse_template;
use crate::rule::GuardedRule;
use crate::term::{Term, VarId};

use super::mismatch;

/// A rule shape in which some variables are parameters. A rule is an
/// instance when it equals the template after substituting a subterm for
/// each parameter, with the remaining template variables mapped one-to-one
/// onto the rule's variables.
#[derive(Clone, Debug)]
pub struct Template {
    scheme: String,
    rule: GuardedRule,
    /// Template-local variable id of each parameter, in declaration order.
    params: Vec<VarId>,
}

impl Template {
    /// Panics if `text` does not parse or names an unknown parameter; templates
    /// are fixed program text.
    pub fn new(scheme: &str, text: &str, params: &[&str]) -> Self {
        let (rule, names) = parse_template(text).expect("template text parses");
        let params = params
            .iter()
            .map(|p| {
                let i = names.iter().position(|n| n == p).expect("parameter occurs in template");
                VarId(i as u32)
            })
            .collect();
        Template {
            scheme: scheme.to_string(),
            rule,
            params,
        }
    }

    /// Parameter values of an instance, in declaration order.
    pub fn match_rule(&self, rule: &GuardedRule) -> Result<Vec<Term>, SchemeError> {
        let mut params: HashMap<VarId, Term> = HashMap::new();
        let mut forward: HashMap<VarId, VarId> = HashMap::new();
        let mut backward: HashMap<VarId, VarId> = HashMap::new();
        let mut stack: Vec<(&Term, &Term)> = self.rule.parts().into_iter().zip(rule.parts()).collect();
        stack.reverse();
        while let Some((t, r)) = stack.pop() {
            match t {
                Term::Var(v) if self.params.contains(v) => match params.get(v) {
                    Some(bound) if bound != r => {
                        return Err(self.mismatch(format!("parameter bound to both `{bound}` and `{r}`")))
                    }
                    Some(_) => {}
                    None => {
                        params.insert(*v, r.clone());
                    }
                },
                Term::Var(v) => {
                    let Term::Var(w) = r else {
                        return Err(self.mismatch(format!("expected a variable, found `{r}`")));
                    };
                    let f = *forward.entry(*v).or_insert(*w);
                    let b = *backward.entry(*w).or_insert(*v);
                    if f != *w || b != *v {
                        return Err(self.mismatch("variable sharing differs from the template"));
                    }
                }
                Term::Compound(tc) => {
                    let Term::Compound(rc) = r else {
                        return Err(self.mismatch(format!("expected `{t}`, found `{r}`")));
                    };
                    if tc.functor() != rc.functor() || tc.arity() != rc.arity() {
                        return Err(self.mismatch(format!("expected `{t}`, found `{r}`")));
                    }
                    stack.extend(tc.args().iter().zip(rc.args()).rev());
                }
                _ => {
                    if t != r {
                        return Err(self.mismatch(format!("expected `{t}`, found `{r}`")));
                    }
                }
            }
        }
        Ok(self.params.iter().map(|p| params[p].clone()).collect())
    }

    /// The instance with the given ground parameter values.
    pub fn instantiate(&self, values: &[Term]) -> Result<GuardedRule, SchemeError> {
        assert_eq!(values.len(), self.params.len(), "one value per parameter");
        if let Some(v) = values.iter().find(|v| !v.is_ground()) {
            return Err(self.mismatch(format!("parameter value `{v}` is not ground")));
        }
        let mut subst = |v: VarId| match self.params.iter().position(|p| *p == v) {
            Some(i) => values[i].clone(),
            None => Term::Var(v),
        };
        let [head, guard, before, rec, after] = self.rule.parts().map(|p| p.map_vars(&mut subst));
        GuardedRule::new(head, guard, before, rec, after).map_err(|e| self.mismatch(e.to_string()))
    }

    fn mismatch(&self, detail: impl Into<String>) -> SchemeError {
        mismatch(&self.scheme, detail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_rule;

    fn sum_template() -> Template {
        Template::new("sum", "s(A,C) :- A>V ,!, B is A-V, s(B,D), C is V*A-W+D.", &["V", "W"])
    }

    #[test]
    fn extracts_parameters() {
        let r = parse_rule("s(A,C) :- A>64 ,!, B is A-64, s(B,D), C is 64*A-2016+D.").unwrap();
        assert_eq!(sum_template().match_rule(&r).unwrap(), vec![Term::small(64), Term::small(2016)]);
    }

    #[test]
    fn inconsistent_parameters_and_sharing_are_rejected() {
        let t = sum_template();
        let r = parse_rule("s(A,C) :- A>64 ,!, B is A-32, s(B,D), C is 64*A-2016+D.").unwrap();
        assert!(t.match_rule(&r).is_err());
        let r = parse_rule("s(A,C) :- A>1 ,!, B is A-1, s(B,B), C is 1*A-0+B.").unwrap();
        assert!(t.match_rule(&r).is_err());
        let r = parse_rule("s(A,B) :- A=1 ,!, B=1, true, true.").unwrap();
        assert!(t.match_rule(&r).is_err());
    }

    #[test]
    fn instantiate_inverts_match() {
        let t = sum_template();
        let r = t.instantiate(&[Term::small(8), Term::small(28)]).unwrap();
        assert_eq!(r, parse_rule("s(A,C) :- A>8 ,!, B is A-8, s(B,D), C is 8*A-28+D.").unwrap());
        assert_eq!(t.match_rule(&r).unwrap(), vec![Term::small(8), Term::small(28)]);
    }
}
