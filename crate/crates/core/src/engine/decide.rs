//! Decision procedure for existential-free, atom-free goals, and checking
//! of candidate solutions.

use std::fmt;

use crate::formula::{Goal, Program};
use crate::name::{Name, NameSupply};
use crate::signature::Signature;
use crate::state::{normalize, reduce, Target};
use crate::subst::Substitution;
use crate::term::{term_eq, Term};
use crate::types::Type;

use super::search::{search, SearchConfig};
use super::EngineError;

/// Without existentials every guard reduces away, so provability is
/// whether each remaining target equates identical terms.
pub fn decide_existential_free(g: &Goal) -> Result<bool, EngineError> {
    if g.has_exists() {
        return Err(EngineError::PreconditionViolated("the goal has an existential quantifier".into()));
    }
    if g.has_atoms() {
        return Err(EngineError::PreconditionViolated("the goal has an atomic formula".into()));
    }
    if let Some(x) = g.free_vars().into_iter().next() {
        return Err(EngineError::PreconditionViolated(format!("the goal mentions the logic variable `{x}`")));
    }
    let supply = NameSupply::new();
    let s = reduce(&normalize(g, &supply), &supply);
    Ok(s.conjuncts.iter().all(|c| {
        c.guards.is_empty() && matches!(&c.target, Target::Eq(t, u) if term_eq(t, u))
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Unverifiable,
    Refuted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Verified => "verified",
            Verdict::Unverifiable => "unverifiable",
            Verdict::Refuted => "refuted",
        })
    }
}

/// Universals in scope at each existential, outermost first.
pub fn existential_scopes(g: &Goal) -> Vec<(Name, Type, Vec<(Name, Type)>)> {
    fn go(g: &Goal, scope: &mut Vec<(Name, Type)>, out: &mut Vec<(Name, Type, Vec<(Name, Type)>)>) {
        match g {
            Goal::Exists(x, ty, b) => {
                out.push((x.clone(), ty.clone(), scope.clone()));
                go(b, scope, out);
            }
            Goal::Forall(y, ty, b) => {
                scope.push((y.clone(), ty.clone()));
                go(b, scope, out);
                scope.pop();
            }
            Goal::And(a, b) => {
                go(a, scope, out);
                go(b, scope, out);
            }
            Goal::Guard(_, _, _, b) => go(b, scope, out),
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(g, &mut Vec::new(), &mut out);
    out
}

/// Typing of a term under λ binders, for finding the types of don't-care
/// variables.
struct DontCares<'a> {
    sig: &'a Signature,
    scope: &'a [(Name, Type)],
    found: Vec<(Name, Vec<Type>, Type)>,
}

impl DontCares<'_> {
    fn leaf_type(&self, t: &Term, binders: &[Type]) -> Result<Type, EngineError> {
        let known = match t {
            Term::Const(n) => self.sig.constant(n).cloned(),
            Term::Eigen(n) => self
                .scope
                .iter()
                .find(|(m, _)| m == n)
                .map(|(_, ty)| ty.clone())
                .or_else(|| self.sig.eigen(n).cloned()),
            Term::Bound(k) => binders.len().checked_sub(*k as usize + 1).map(|i| binders[i].clone()),
            Term::Var(x) => self
                .found
                .iter()
                .find(|(n, _, _)| n == x)
                .map(|(_, args, target)| Type::arrows(args.iter().cloned(), target.clone())),
            _ => None,
        };
        known.ok_or_else(|| EngineError::TypeMismatch(format!("cannot type `{t}`")))
    }

    fn type_of(&self, t: &Term, binders: &mut Vec<Type>) -> Result<Type, EngineError> {
        match t {
            Term::Lam(ty, b) => {
                binders.push(ty.clone());
                let r = self.type_of(b, binders);
                binders.pop();
                Ok(Type::arrow(ty.clone(), r?))
            }
            _ => {
                let (h, args) = t.spine();
                let mut ty = self.leaf_type(h, binders)?;
                for _ in args {
                    ty = match ty {
                        Type::Arrow(_, c) => (*c).clone(),
                        _ => return Err(EngineError::TypeMismatch(format!("`{t}` applies a non-function"))),
                    };
                }
                Ok(ty)
            }
        }
    }

    /// Walk `t`, expected at type `expected`, recording each logic
    /// variable's argument and target types.
    fn visit(&mut self, t: &Term, expected: &Type, binders: &mut Vec<Type>) -> Result<(), EngineError> {
        if let Term::Lam(ty, b) = t {
            let Type::Arrow(_, cod) = expected else {
                return Err(EngineError::TypeMismatch(format!("`{t}` is not expected to be a function")));
            };
            binders.push(ty.clone());
            let r = self.visit(b, cod, binders);
            binders.pop();
            return r;
        }
        let (h, args) = t.spine();
        let arg_types = match h {
            Term::Var(x) => {
                let mut tys = Vec::new();
                for a in &args {
                    tys.push(self.type_of(a, binders)?);
                }
                let target = expected.clone();
                match self.found.iter().find(|(n, _, _)| n == x) {
                    Some((_, prev, prev_target)) if *prev != tys || *prev_target != target => {
                        return Err(EngineError::TypeMismatch(format!("`{x}` is used at two types")));
                    }
                    Some(_) => {}
                    None => self.found.push((x.clone(), tys.clone(), target)),
                }
                tys
            }
            _ => self.leaf_type(h, binders)?.split().0,
        };
        for (a, ty) in args.iter().zip(&arg_types) {
            self.visit(a, ty, binders)?;
        }
        Ok(())
    }
}

/// Replace the existentials bound by `theta`.
fn instantiate(g: &Goal, theta: &Substitution) -> Goal {
    match g {
        Goal::Exists(x, ty, b) => match theta.get(x) {
            Some(binding) => instantiate(&b.subst_var(x, &binding.term), theta),
            None => Goal::exists(x.clone(), ty.clone(), instantiate(b, theta)),
        },
        Goal::Forall(y, ty, b) => Goal::forall(y.clone(), ty.clone(), instantiate(b, theta)),
        Goal::And(a, b) => Goal::and(instantiate(a, theta), instantiate(b, theta)),
        Goal::Guard(t, s, ty, b) => Goal::guard(t.clone(), s.clone(), ty.clone(), instantiate(b, theta)),
        _ => g.clone(),
    }
}

/// Check a candidate solution. Logic variables in the range of `theta`
/// are don't-cares: each `X` is read as a constant function onto a fresh
/// outermost universal, so one generic instance is checked.
pub fn check_solution(
    p: &Program,
    g: &Goal,
    theta: &Substitution,
    cfg: &SearchConfig,
) -> Result<Verdict, EngineError> {
    let scopes = existential_scopes(g);
    let mut dc = Vec::new();
    for (x, binding) in theta.iter() {
        let Some((_, ty, scope)) = scopes.iter().find(|(n, _, _)| n == x) else {
            return Err(EngineError::PreconditionViolated(format!("`{x}` is not an existential of the goal")));
        };
        let mut eigens = std::collections::BTreeSet::new();
        binding.term.collect_eigens(&mut eigens);
        for e in eigens {
            if !scope.iter().any(|(n, _)| *n == e) && !p.sig.is_eigen(&e) {
                return Err(EngineError::ScopeViolation { var: x.clone(), eigen: e });
            }
        }
        let mut walker = DontCares {
            sig: &p.sig,
            scope,
            found: std::mem::take(&mut dc),
        };
        walker.visit(&binding.term, ty, &mut Vec::new())?;
        dc = walker.found;
    }
    let supply = NameSupply::new();
    let mut generic = Substitution::new();
    let mut outer = Vec::new();
    for (x, args, target) in dc {
        if scopes.iter().any(|(n, _, _)| *n == x) {
            continue;
        }
        let ty = Type::arrows(args.iter().cloned(), target.clone());
        let (all_args, prim) = ty.split();
        let z = supply.fresh_str("z");
        generic.insert(x, ty, Term::lams(all_args, Term::Eigen(z.clone())));
        outer.push((z, prim));
    }
    let mut closed = Substitution::new();
    for (x, binding) in theta.iter() {
        closed.insert(x.clone(), binding.ty.clone(), generic.apply(&binding.term));
    }
    let body = instantiate(g, &closed);
    let g2 = outer
        .into_iter()
        .rev()
        .fold(body, |b, (z, ty)| Goal::forall(z, ty, b));
    let violations = crate::formula::check_goal(&p.sig, &g2);
    if !violations.is_empty() {
        return Err(EngineError::IllFormed(violations));
    }
    if !g2.has_exists() && !g2.has_atoms() {
        let ok = decide_existential_free(&g2)?;
        return Ok(if ok { Verdict::Verified } else { Verdict::Refuted });
    }
    let cfg = SearchConfig {
        max_solutions: 1,
        ..cfg.clone()
    };
    let report = search(p, &g2, &cfg)?;
    Ok(if report.solutions().next().is_some() {
        Verdict::Verified
    } else if report.exhausted() || report.suspended().next().is_some() {
        Verdict::Unverifiable
    } else {
        Verdict::Refuted
    })
}
