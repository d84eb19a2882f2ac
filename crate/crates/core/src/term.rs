//! β-normal simply-typed λ-terms.
//!
//! Bound variables use de Bruijn indices; constants, eigenvariables and logic
//! variables are named. Terms substituted for names are always locally closed,
//! so replacing a name never needs index shifting.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::name::Name;
use crate::types::Type;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Const(Name),
    /// Eigenvariable: a signature parameter, a universally quantified
    /// variable of a guarded goal, or a local parameter.
    Eigen(Name),
    /// Logic variable (existentially quantified unknown).
    Var(Name),
    /// de Bruijn index.
    Bound(u32),
    App(Arc<Term>, Arc<Term>),
    Lam(Type, Arc<Term>),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}

/// Where the types of free names come from.
pub trait TypeEnv {
    fn const_type(&self, name: &Name) -> Option<Type>;
    fn eigen_type(&self, name: &Name) -> Option<Type>;
    fn var_type(&self, name: &Name) -> Option<Type>;
}

impl Term {
    pub fn cnst(name: &str) -> Term {
        Term::Const(Name::new(name))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(Name::new(name))
    }

    pub fn eigen(name: &str) -> Term {
        Term::Eigen(Name::new(name))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Arc::new(fun), Arc::new(arg))
    }

    pub fn apps<I: IntoIterator<Item = Term>>(head: Term, args: I) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn lam(ty: Type, body: Term) -> Term {
        Term::Lam(ty, Arc::new(body))
    }

    /// `λ tys. body`, outermost binder first.
    pub fn lams<I>(tys: I, body: Term) -> Term
    where
        I: IntoIterator<Item = Type>,
        I::IntoIter: DoubleEndedIterator,
    {
        tys.into_iter()
            .rev()
            .fold(body, |acc, ty| Term::lam(ty, acc))
    }

    /// Leftmost symbol after stripping applications.
    pub fn head(&self) -> &Term {
        let mut cur = self;
        while let Term::App(f, _) = cur {
            cur = f;
        }
        cur
    }

    /// Head and arguments, left to right.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn is_rigid(&self) -> bool {
        matches!(self.head(), Term::Const(_) | Term::Eigen(_))
    }

    pub fn is_flexible(&self) -> bool {
        matches!(self.head(), Term::Var(_))
    }

    /// Shift free de Bruijn indices `>= cutoff` by `by`.
    pub fn shift(&self, by: i64, cutoff: u32) -> Term {
        match self {
            Term::Bound(k) if *k >= cutoff => Term::Bound((*k as i64 + by) as u32),
            Term::App(f, a) => Term::app(f.shift(by, cutoff), a.shift(by, cutoff)),
            Term::Lam(ty, b) => Term::lam(ty.clone(), b.shift(by, cutoff + 1)),
            _ => self.clone(),
        }
    }

    fn has_loose_bound(&self, depth: u32) -> bool {
        match self {
            Term::Bound(k) => *k >= depth,
            Term::App(f, a) => f.has_loose_bound(depth) || a.has_loose_bound(depth),
            Term::Lam(_, b) => b.has_loose_bound(depth + 1),
            _ => false,
        }
    }

    /// True when no de Bruijn index escapes the term.
    pub fn is_locally_closed(&self) -> bool {
        !self.has_loose_bound(0)
    }

    fn subst_bound(&self, j: u32, arg: &Term) -> Term {
        match self {
            Term::Bound(k) if *k == j => arg.shift(j as i64, 0),
            Term::Bound(k) if *k > j => Term::Bound(k - 1),
            Term::App(f, a) => Term::app(f.subst_bound(j, arg), a.subst_bound(j, arg)),
            Term::Lam(ty, b) => Term::lam(ty.clone(), b.subst_bound(j + 1, arg)),
            _ => self.clone(),
        }
    }

    /// Body of an abstraction with its bound variable replaced by `arg`.
    pub fn instantiate(body: &Term, arg: &Term) -> Term {
        body.subst_bound(0, arg)
    }

    pub fn beta_normalize(&self) -> Term {
        match self {
            Term::App(f, a) => {
                let f = f.beta_normalize();
                let a = a.beta_normalize();
                match f {
                    Term::Lam(_, body) => Term::instantiate(&body, &a).beta_normalize(),
                    f => Term::app(f, a),
                }
            }
            Term::Lam(ty, b) => Term::lam(ty.clone(), b.beta_normalize()),
            _ => self.clone(),
        }
    }

    pub fn is_beta_normal(&self) -> bool {
        match self {
            Term::App(f, a) => !matches!(**f, Term::Lam(..)) && f.is_beta_normal() && a.is_beta_normal(),
            Term::Lam(_, b) => b.is_beta_normal(),
            _ => true,
        }
    }

    /// Apply to arguments and β-normalize.
    pub fn apply_normal<I: IntoIterator<Item = Term>>(&self, args: I) -> Term {
        Term::apps(self.clone(), args).beta_normalize()
    }

    /// Replace named leaves. `f` is called on every `Const`, `Eigen` and
    /// `Var` leaf; returned terms must be locally closed. The result is not
    /// normalized.
    pub fn replace_names(&self, f: &mut impl FnMut(&Term) -> Option<Term>) -> Term {
        match self {
            Term::Const(_) | Term::Eigen(_) | Term::Var(_) => f(self).unwrap_or_else(|| self.clone()),
            Term::Bound(_) => self.clone(),
            Term::App(fun, a) => Term::app(fun.replace_names(f), a.replace_names(f)),
            Term::Lam(ty, b) => Term::lam(ty.clone(), b.replace_names(f)),
        }
    }

    /// `self[by/Var(name)]`, β-normalized.
    pub fn subst_var(&self, name: &Name, by: &Term) -> Term {
        if !self.mentions_var(name) {
            return self.clone();
        }
        self.replace_names(&mut |t| match t {
            Term::Var(n) if n == name => Some(by.clone()),
            _ => None,
        })
        .beta_normalize()
    }

    /// `self[by/Eigen(name)]`, β-normalized.
    pub fn subst_eigen(&self, name: &Name, by: &Term) -> Term {
        if !self.mentions_eigen(name) {
            return self.clone();
        }
        self.replace_names(&mut |t| match t {
            Term::Eigen(n) if n == name => Some(by.clone()),
            _ => None,
        })
        .beta_normalize()
    }

    pub fn any_leaf(&self, pred: &mut impl FnMut(&Term) -> bool) -> bool {
        match self {
            Term::App(f, a) => f.any_leaf(pred) || a.any_leaf(pred),
            Term::Lam(_, b) => b.any_leaf(pred),
            _ => pred(self),
        }
    }

    pub fn mentions_var(&self, name: &Name) -> bool {
        self.any_leaf(&mut |t| matches!(t, Term::Var(n) if n == name))
    }

    pub fn mentions_eigen(&self, name: &Name) -> bool {
        self.any_leaf(&mut |t| matches!(t, Term::Eigen(n) if n == name))
    }

    pub fn has_vars(&self) -> bool {
        self.any_leaf(&mut |t| matches!(t, Term::Var(_)))
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        self.any_leaf(&mut |t| {
            if let Term::Var(n) = t {
                out.insert(n.clone());
            }
            false
        });
    }

    pub fn collect_eigens(&self, out: &mut BTreeSet<Name>) {
        self.any_leaf(&mut |t| {
            if let Term::Eigen(n) = t {
                out.insert(n.clone());
            }
            false
        });
    }

    /// Logic variables in order of first occurrence (left to right).
    pub fn vars_in_order(&self, out: &mut Vec<Name>) {
        self.any_leaf(&mut |t| {
            if let Term::Var(n) = t {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            false
        });
    }

    /// Leaves plus abstractions; applications are free.
    pub fn size(&self) -> usize {
        match self {
            Term::App(f, a) => f.size() + a.size(),
            Term::Lam(_, b) => 2 + b.size(),
            _ => 1,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::App(..) => {
                let (_, args) = self.spine();
                1 + args.iter().map(|a| a.depth()).max().unwrap_or(0)
            }
            Term::Lam(_, b) => b.depth(),
            _ => 1,
        }
    }
}

/// Equality modulo α (structural on de Bruijn terms) and η.
///
/// Binder types are ignored; both sides are assumed to have the same type.
pub fn term_eq(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Lam(_, x), Term::Lam(_, y)) => term_eq(x, y),
        (Term::Lam(_, x), other) | (other, Term::Lam(_, x)) => {
            let expanded = Term::app(other.shift(1, 0), Term::Bound(0));
            term_eq(x, &expanded)
        }
        (Term::App(f1, a1), Term::App(f2, a2)) => term_eq(f1, f2) && term_eq(a1, a2),
        _ => a == b,
    }
}

/// `s` is reachable from `t` by a non-empty rigid path: each step descends
/// into an argument of an application headed by a constant.
pub fn rigid_subterm(t: &Term, s: &Term) -> bool {
    let (head, args) = t.spine();
    if !matches!(head, Term::Const(_)) {
        return false;
    }
    args.iter().any(|arg| term_eq(arg, s) || rigid_subterm(arg, s))
}

/// Some subterm satisfying `pred` is reachable from the root of `t` without
/// passing below a logic-variable head. Descends through arguments of
/// constant- and eigen-headed applications and through abstractions.
pub fn occurs_rigidly(t: &Term, pred: &mut impl FnMut(&Term) -> bool) -> bool {
    if pred(t) {
        return true;
    }
    match t {
        Term::Lam(_, b) => occurs_rigidly(b, pred),
        _ => {
            let (head, args) = t.spine();
            match head {
                Term::Const(_) | Term::Eigen(_) | Term::Bound(_) => {
                    args.into_iter().any(|a| occurs_rigidly(a, pred))
                }
                _ => false,
            }
        }
    }
}

/// Unique simple type of `t`.
pub fn type_of(env: &impl TypeEnv, t: &Term) -> Result<Type, TermError> {
    fn go(env: &impl TypeEnv, binders: &mut Vec<Type>, t: &Term) -> Result<Type, TermError> {
        match t {
            Term::Const(n) => env
                .const_type(n)
                .ok_or_else(|| TermError::UnknownName(n.to_string())),
            Term::Eigen(n) => env
                .eigen_type(n)
                .ok_or_else(|| TermError::UnknownName(n.to_string())),
            Term::Var(n) => env
                .var_type(n)
                .ok_or_else(|| TermError::UnknownName(n.to_string())),
            Term::Bound(k) => {
                let k = *k as usize;
                if k < binders.len() {
                    Ok(binders[binders.len() - 1 - k].clone())
                } else {
                    Err(TermError::UnknownName(format!("#{k}")))
                }
            }
            Term::App(f, a) => {
                let fty = go(env, binders, f)?;
                let aty = go(env, binders, a)?;
                match fty {
                    Type::Arrow(dom, cod) if *dom == aty => Ok((*cod).clone()),
                    Type::Arrow(dom, _) => Err(TermError::TypeMismatch(format!(
                        "argument `{a}` has type {aty}, expected {dom}"
                    ))),
                    other => Err(TermError::TypeMismatch(format!(
                        "`{f}` has type {other} and cannot be applied"
                    ))),
                }
            }
            Term::Lam(ty, b) => {
                binders.push(ty.clone());
                let body = go(env, binders, b);
                binders.pop();
                Ok(Type::arrow(ty.clone(), body?))
            }
        }
    }
    go(env, &mut Vec::new(), t)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print::term_to_string(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
