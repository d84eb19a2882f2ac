//! Substitutions for logic variables.

use indexmap::IndexMap;

use crate::name::Name;
use crate::term::{term_eq, Term};
use crate::types::Type;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub ty: Type,
    pub term: Term,
}

/// Finite map from logic variables to β-normal terms, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: IndexMap<Name, Binding>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn singleton(var: Name, ty: Type, term: Term) -> Substitution {
        let mut s = Substitution::new();
        s.insert(var, ty, term);
        s
    }

    pub fn insert(&mut self, var: Name, ty: Type, term: Term) {
        self.bindings.insert(var, Binding { ty, term: term.beta_normalize() });
    }

    pub fn get(&self, var: &Name) -> Option<&Binding> {
        self.bindings.get(var)
    }

    pub fn contains(&self, var: &Name) -> bool {
        self.bindings.contains_key(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Binding)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.bindings.keys()
    }

    /// Replace bound variables and β-normalize.
    pub fn apply(&self, t: &Term) -> Term {
        if self.is_empty() {
            return t.clone();
        }
        let mut hit = false;
        let replaced = t.replace_names(&mut |leaf| match leaf {
            Term::Var(n) => self.bindings.get(n).map(|b| {
                hit = true;
                b.term.clone()
            }),
            _ => None,
        });
        if hit {
            replaced.beta_normalize()
        } else {
            replaced
        }
    }

    /// Apply `self` first, then `then`.
    pub fn compose(&self, then: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (x, b) in &self.bindings {
            out.bindings.insert(
                x.clone(),
                Binding {
                    ty: b.ty.clone(),
                    term: then.apply(&b.term),
                },
            );
        }
        for (y, b) in &then.bindings {
            if !out.bindings.contains_key(y) {
                out.bindings.insert(y.clone(), b.clone());
            }
        }
        out
    }

    /// Bindings for the given variables only, in the given order.
    pub fn restrict<'a, I: IntoIterator<Item = &'a Name>>(&self, vars: I) -> Substitution {
        let mut out = Substitution::new();
        for v in vars {
            if let Some(b) = self.bindings.get(v) {
                out.bindings.insert(v.clone(), b.clone());
            }
        }
        out
    }

    /// No range term mentions a variable of the domain.
    pub fn is_idempotent(&self) -> bool {
        self.bindings
            .values()
            .all(|b| self.bindings.keys().all(|x| !b.term.mentions_var(x)))
    }

    /// Same domain and αη-equal ranges.
    pub fn equiv(&self, other: &Substitution) -> bool {
        self.len() == other.len()
            && self.bindings.iter().all(|(x, b)| {
                other
                    .bindings
                    .get(x)
                    .is_some_and(|o| term_eq(&b.term, &o.term))
            })
    }
}
