//! Raising and normalization of goals into state formulas.

use thiserror::Error;

use crate::formula::Goal;
use crate::name::{Name, NameSupply};
use crate::state::{GuardedGoal, StateFormula, Target};
use crate::term::Term;
use crate::types::Type;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RaiseError {
    #[error("goal is not of the form pi y.. (guards =>) sigma x. G")]
    NotRaisable,
}

/// Where an existential of the source goal went: `var` is represented by
/// `raised` applied to the universals `scope` (source names, outermost
/// first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Origin {
    pub var: Name,
    pub ty: Type,
    pub raised: Name,
    pub scope: Vec<Name>,
}

#[derive(Debug, Clone)]
pub struct Normalized {
    pub state: StateFormula,
    pub origins: Vec<Origin>,
}

/// `∀ȳ. Q̄ ⊃ ∃x. G  ~>  ∃h. ∀ȳ. Q̄ ⊃ G[h ȳ / x]`.
pub fn raise_step(g: &Goal, supply: &NameSupply) -> Result<Goal, RaiseError> {
    fn go(
        g: &Goal,
        ys: &mut Vec<(Name, Type)>,
        supply: &NameSupply,
    ) -> Result<(Name, Type, Goal), RaiseError> {
        match g {
            Goal::Forall(y, ty, body) => {
                ys.push((y.clone(), ty.clone()));
                let (h, hty, inner) = go(body, ys, supply)?;
                ys.pop();
                Ok((h, hty, Goal::forall(y.clone(), ty.clone(), inner)))
            }
            Goal::Guard(t, s, ty, body) => {
                let (h, hty, inner) = go(body, ys, supply)?;
                Ok((h, hty, Goal::guard(t.clone(), s.clone(), ty.clone(), inner)))
            }
            Goal::Exists(x, ty, body) => {
                let h = supply.fresh(x);
                let hty = Type::arrows(ys.iter().map(|(_, t)| t.clone()), ty.clone());
                let hy = Term::apps(Term::Var(h.clone()), ys.iter().map(|(y, _)| Term::Eigen(y.clone())));
                Ok((h, hty, body.subst_var(x, &hy)))
            }
            _ => Err(RaiseError::NotRaisable),
        }
    }
    let (h, hty, body) = go(g, &mut Vec::new(), supply)?;
    Ok(Goal::exists(h, hty, body))
}

/// Surrounding context of the subgoal being normalized.
#[derive(Debug, Clone, Default)]
pub(crate) struct Context {
    pub universals: Vec<(Name, Type)>,
    /// Source names of `universals`, for origins.
    pub sources: Vec<Name>,
    pub params: Vec<(Name, Type)>,
    pub guards: Vec<(Term, Term)>,
}

impl Context {
    pub fn of_conjunct(c: &GuardedGoal) -> Context {
        Context {
            universals: c.universals.clone(),
            sources: c.universals.iter().map(|(n, _)| n.clone()).collect(),
            params: c.params.clone(),
            guards: c.guards.clone(),
        }
    }
}

pub(crate) struct Output {
    pub existentials: Vec<(Name, Type)>,
    pub conjuncts: Vec<GuardedGoal>,
    pub origins: Vec<Origin>,
}

/// Normalize `g` under `ctx`, raising its existentials over the context's
/// universals.
pub(crate) fn normalize_in(g: &Goal, ctx: &mut Context, supply: &NameSupply) -> Output {
    let mut out = Output {
        existentials: Vec::new(),
        conjuncts: Vec::new(),
        origins: Vec::new(),
    };
    go(g, ctx, &mut out, supply);
    out
}

fn emit(ctx: &Context, extra: Vec<(Name, Type)>, target: Target, out: &mut Output) {
    let mut universals = ctx.universals.clone();
    universals.extend(extra);
    let c = GuardedGoal {
        universals,
        params: ctx.params.clone(),
        guards: ctx.guards.clone(),
        target,
    };
    if let Some(c) = c.tidy() {
        out.conjuncts.push(c);
    }
}

fn go(g: &Goal, ctx: &mut Context, out: &mut Output, supply: &NameSupply) {
    match g {
        Goal::True => {}
        Goal::False => emit(ctx, Vec::new(), Target::False, out),
        Goal::Atom(a) => emit(ctx, Vec::new(), Target::Atom(a.clone()), out),
        Goal::Eq(t, s, ty) => {
            let (args, _) = ty.split();
            let ws: Vec<(Name, Type)> = args
                .into_iter()
                .map(|a| (supply.fresh_str("w"), a))
                .collect();
            let w_terms: Vec<Term> = ws.iter().map(|(w, _)| Term::Eigen(w.clone())).collect();
            let target = Target::Eq(t.apply_normal(w_terms.clone()), s.apply_normal(w_terms));
            emit(ctx, ws, target, out);
        }
        Goal::And(a, b) => {
            go(a, ctx, out, supply);
            go(b, ctx, out, supply);
        }
        Goal::Guard(t, s, _, body) => {
            ctx.guards.push((t.clone(), s.clone()));
            go(body, ctx, out, supply);
            ctx.guards.pop();
        }
        Goal::Forall(y, ty, body) => {
            let fresh = supply.fresh(y);
            let body = body.subst_eigen(y, &Term::Eigen(fresh.clone()));
            ctx.universals.push((fresh, ty.clone()));
            ctx.sources.push(y.clone());
            go(&body, ctx, out, supply);
            ctx.universals.pop();
            ctx.sources.pop();
        }
        Goal::Exists(x, ty, body) => {
            let h = supply.fresh(x);
            let hty = Type::arrows(ctx.universals.iter().map(|(_, t)| t.clone()), ty.clone());
            let hy = Term::apps(
                Term::Var(h.clone()),
                ctx.universals.iter().map(|(y, _)| Term::Eigen(y.clone())),
            );
            out.existentials.push((h.clone(), hty));
            out.origins.push(Origin {
                var: x.clone(),
                ty: ty.clone(),
                raised: h,
                scope: ctx.sources.clone(),
            });
            go(&body.subst_var(x, &hy), ctx, out, supply);
        }
    }
}

/// Normal form of a closed goal, together with where its existentials went.
pub fn normalize_goal(g: &Goal, supply: &NameSupply) -> Normalized {
    let out = normalize_in(g, &mut Context::default(), supply);
    Normalized {
        state: StateFormula {
            existentials: out.existentials,
            conjuncts: out.conjuncts,
        },
        origins: out.origins,
    }
}

pub fn normalize(g: &Goal, supply: &NameSupply) -> StateFormula {
    normalize_goal(g, supply).state
}
