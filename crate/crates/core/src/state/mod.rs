//! State formulas: `∃h̄. ⋀ ∀ȳ. guards ⊃ target`.

pub mod classify;
pub mod normalize;
pub mod reduce;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::formula::Goal;
use crate::name::Name;
use crate::signature::Signature;
use crate::term::{type_of, Term};
use crate::types::Type;

pub use classify::{classify, Classification};
pub use normalize::{normalize, normalize_goal, raise_step, Normalized, Origin};
pub use reduce::{reduce, reduce_step};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Eq(Term, Term),
    Atom(Term),
    False,
    True,
}

impl Target {
    fn terms(&self) -> Vec<&Term> {
        match self {
            Target::Eq(t, s) => vec![t, s],
            Target::Atom(a) => vec![a],
            Target::False | Target::True => vec![],
        }
    }

    fn map(&self, f: &mut impl FnMut(&Term) -> Term) -> Target {
        match self {
            Target::Eq(t, s) => Target::Eq(f(t), f(s)),
            Target::Atom(a) => Target::Atom(f(a)),
            other => other.clone(),
        }
    }
}

/// `∀ universals. guards ⊃ target`.
///
/// `params` are local names introduced by η-opening an abstraction inside a
/// guard. They are rigid, never instantiated, and never occur in the target.
/// Guards and equality targets are between terms of equal type; equality
/// targets always have primitive type.
#[derive(Clone, PartialEq, Eq)]
pub struct GuardedGoal {
    pub universals: Vec<(Name, Type)>,
    pub params: Vec<(Name, Type)>,
    pub guards: Vec<(Term, Term)>,
    pub target: Target,
}

impl GuardedGoal {
    pub fn new(target: Target) -> GuardedGoal {
        GuardedGoal {
            universals: Vec::new(),
            params: Vec::new(),
            guards: Vec::new(),
            target,
        }
    }

    pub fn is_universal(&self, n: &Name) -> bool {
        self.universals.iter().any(|(u, _)| u == n)
    }

    pub fn is_param(&self, n: &Name) -> bool {
        self.params.iter().any(|(p, _)| p == n)
    }

    pub fn guards_mention(&self, n: &Name) -> bool {
        self.guards
            .iter()
            .any(|(t, s)| t.mentions_eigen(n) || s.mentions_eigen(n))
    }

    fn terms(&self) -> impl Iterator<Item = &Term> {
        self.guards
            .iter()
            .flat_map(|(t, s)| [t, s])
            .chain(self.target.terms())
    }

    fn mentions_eigen(&self, n: &Name) -> bool {
        self.terms().any(|t| t.mentions_eigen(n))
    }

    pub fn mentions_var(&self, n: &Name) -> bool {
        self.terms().any(|t| t.mentions_var(n))
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> GuardedGoal {
        GuardedGoal {
            universals: self.universals.clone(),
            params: self.params.clone(),
            guards: self.guards.iter().map(|(t, s)| (f(t), f(s))).collect(),
            target: self.target.map(f),
        }
    }

    /// Drop binders that no longer occur; `None` for a `⊤` target.
    pub fn tidy(mut self) -> Option<GuardedGoal> {
        if self.target == Target::True {
            return None;
        }
        let universals = std::mem::take(&mut self.universals);
        self.universals = universals
            .into_iter()
            .filter(|(u, _)| self.mentions_eigen(u))
            .collect();
        let params = std::mem::take(&mut self.params);
        self.params = params
            .into_iter()
            .filter(|(p, _)| self.mentions_eigen(p))
            .collect();
        Some(self)
    }

    /// Type of a leaf in this conjunct.
    pub fn leaf_type(&self, sig: &Signature, existentials: &[(Name, Type)], leaf: &Term) -> Option<Type> {
        let find = |list: &[(Name, Type)], n: &Name| {
            list.iter().find(|(m, _)| m == n).map(|(_, t)| t.clone())
        };
        match leaf {
            Term::Const(c) => sig.constant(c).cloned(),
            Term::Eigen(e) => find(&self.universals, e)
                .or_else(|| find(&self.params, e))
                .or_else(|| sig.eigen(e).cloned()),
            Term::Var(x) => find(existentials, x),
            _ => None,
        }
    }

    /// Goal formula with the same meaning. Parameters become universals
    /// abstracted inside their guards, so only parameter-free conjuncts
    /// translate exactly; the rest are rendered with an outer `pi`.
    pub fn to_goal(&self, sig: &Signature, existentials: &[(Name, Type)]) -> Goal {
        let mut g = match &self.target {
            Target::Eq(t, s) => {
                let ty = self.term_type(sig, existentials, t);
                Goal::Eq(t.clone(), s.clone(), ty)
            }
            Target::Atom(a) => Goal::Atom(a.clone()),
            Target::False => Goal::False,
            Target::True => Goal::True,
        };
        for (t, s) in self.guards.iter().rev() {
            let ty = self.term_type(sig, existentials, t);
            g = Goal::guard(t.clone(), s.clone(), ty, g);
        }
        for (y, ty) in self.params.iter().rev().chain(self.universals.iter().rev()) {
            g = Goal::forall(y.clone(), ty.clone(), g);
        }
        g
    }

    fn term_type(&self, sig: &Signature, existentials: &[(Name, Type)], t: &Term) -> Type {
        let mut eigens = self.universals.clone();
        eigens.extend(self.params.iter().cloned());
        let scope = crate::signature::Scope::new(sig, existentials, &eigens);
        type_of(&scope, t).unwrap_or_else(|_| Type::o())
    }
}

/// `∃ existentials. conjuncts`; no conjuncts means `∃h̄. ⊤`.
#[derive(Clone, PartialEq, Eq)]
pub struct StateFormula {
    pub existentials: Vec<(Name, Type)>,
    pub conjuncts: Vec<GuardedGoal>,
}

impl StateFormula {
    pub fn top() -> StateFormula {
        StateFormula {
            existentials: Vec::new(),
            conjuncts: Vec::new(),
        }
    }

    pub fn is_top(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn existential_type(&self, x: &Name) -> Option<&Type> {
        self.existentials
            .iter()
            .find(|(n, _)| n == x)
            .map(|(_, t)| t)
    }

    /// Apply `x := by` everywhere and drop `x` from the prefix, inserting
    /// `fresh` in its place.
    pub fn instantiate(&self, x: &Name, by: &Term, fresh: &[(Name, Type)]) -> StateFormula {
        let mut existentials = Vec::with_capacity(self.existentials.len() + fresh.len());
        for (n, ty) in &self.existentials {
            if n == x {
                existentials.extend(fresh.iter().cloned());
            } else {
                existentials.push((n.clone(), ty.clone()));
            }
        }
        let conjuncts = self
            .conjuncts
            .iter()
            .filter_map(|c| {
                if c.mentions_var(x) {
                    c.map_terms(&mut |t| t.subst_var(x, by)).tidy()
                } else {
                    Some(c.clone())
                }
            })
            .collect();
        StateFormula {
            existentials,
            conjuncts,
        }
    }

    /// Existentials that occur in some conjunct.
    pub fn live_existentials(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for c in &self.conjuncts {
            for t in c.terms() {
                t.collect_vars(&mut out);
            }
        }
        out
    }

    /// Copy with binders renamed by position and unused existentials
    /// dropped; two states print identically iff they are equal up to
    /// renaming of bound names.
    pub fn canonical(&self) -> StateFormula {
        let live = self.live_existentials();
        let mut renaming: HashMap<Name, Term> = HashMap::new();
        let mut existentials = Vec::new();
        for (x, ty) in &self.existentials {
            if live.contains(x) {
                let fresh = Name::indexed("h", existentials.len() as u32 + 1);
                renaming.insert(x.clone(), Term::Var(fresh.clone()));
                existentials.push((fresh, ty.clone()));
            }
        }
        let conjuncts = self
            .conjuncts
            .iter()
            .map(|c| {
                let mut local = renaming.clone();
                let rename = |list: &[(Name, Type)], base: &str, local: &mut HashMap<Name, Term>| {
                    list.iter()
                        .enumerate()
                        .map(|(i, (n, ty))| {
                            let fresh = Name::indexed(base, i as u32 + 1);
                            local.insert(n.clone(), Term::Eigen(fresh.clone()));
                            (fresh, ty.clone())
                        })
                        .collect::<Vec<_>>()
                };
                let universals = rename(&c.universals, "y", &mut local);
                let params = rename(&c.params, "p", &mut local);
                let mut f = |t: &Term| {
                    t.replace_names(&mut |leaf| match leaf {
                        Term::Var(n) | Term::Eigen(n) => local.get(n).cloned(),
                        _ => None,
                    })
                };
                let mut renamed = c.map_terms(&mut f);
                renamed.universals = universals;
                renamed.params = params;
                renamed
            })
            .collect();
        StateFormula {
            existentials,
            conjuncts,
        }
    }

    /// Structural invariants of normalized states; `Err` names the first
    /// violation.
    pub fn check_invariants(&self, sig: &Signature) -> Result<(), String> {
        for (x, ty) in &self.existentials {
            if ty.order() > 1 {
                return Err(format!("existential {x} : {ty} has order above 1"));
            }
        }
        for (i, c) in self.conjuncts.iter().enumerate() {
            if c.target == Target::True {
                return Err(format!("conjunct {i} has target tt"));
            }
            for (y, ty) in &c.universals {
                if !ty.is_prim() {
                    return Err(format!("conjunct {i}: universal {y} : {ty} is not primitive"));
                }
            }
            for t in c.terms() {
                if !t.is_beta_normal() {
                    return Err(format!("conjunct {i}: {t} is not beta-normal"));
                }
                let mut vars = BTreeSet::new();
                t.collect_vars(&mut vars);
                if let Some(v) = vars.iter().find(|v| self.existential_type(v).is_none()) {
                    return Err(format!("conjunct {i}: {v} is not an existential"));
                }
                let mut eigens = BTreeSet::new();
                t.collect_eigens(&mut eigens);
                if let Some(e) = eigens
                    .iter()
                    .find(|e| !c.is_universal(e) && !c.is_param(e) && !sig.is_eigen(e))
                {
                    return Err(format!("conjunct {i}: {e} is unbound"));
                }
            }
            for (p, _) in &c.params {
                if c.target.terms().iter().any(|t| t.mentions_eigen(p)) {
                    return Err(format!("conjunct {i}: parameter {p} occurs in the target"));
                }
            }
            if let Target::Eq(t, _) = &c.target {
                let mut eigens = c.universals.clone();
                eigens.extend(c.params.iter().cloned());
                let scope = crate::signature::Scope::new(sig, &self.existentials, &eigens);
                match type_of(&scope, t) {
                    Ok(ty) if ty.is_prim() => {}
                    Ok(ty) => return Err(format!("conjunct {i}: target at type {ty}")),
                    Err(e) => return Err(format!("conjunct {i}: {e}")),
                }
            }
        }
        Ok(())
    }

    /// Goal formula with the same solutions, for states without
    /// parameters.
    pub fn to_goal(&self, sig: &Signature) -> Goal {
        let body = Goal::conj(
            self.conjuncts
                .iter()
                .map(|c| c.to_goal(sig, &self.existentials)),
        );
        self.existentials
            .iter()
            .rev()
            .fold(body, |g, (x, ty)| Goal::exists(x.clone(), ty.clone(), g))
    }
}

impl fmt::Display for StateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print::state_to_string(self))
    }
}

impl fmt::Debug for StateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for GuardedGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print::conjunct_to_string(self))
    }
}
