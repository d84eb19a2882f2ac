//! Goal formulas, definite clauses and programs.
//!
//! Goal binders are named: `Exists` binds `Term::Var(name)` in its body and
//! `Forall` binds `Term::Eigen(name)`. Clause universals bind `Term::Var`.

use std::collections::BTreeSet;
use std::fmt;

use crate::name::{Name, NameSupply};
use crate::signature::{Scope, Signature};
use crate::term::{term_eq, type_of, Term};
use crate::types::Type;

#[derive(Clone, PartialEq, Eq)]
pub enum Goal {
    True,
    False,
    /// Predicate-headed term of type `o`.
    Atom(Term),
    And(Box<Goal>, Box<Goal>),
    Exists(Name, Type, Box<Goal>),
    Forall(Name, Type, Box<Goal>),
    /// `t = s` at the given type.
    Eq(Term, Term, Type),
    /// `t = s => G`.
    Guard(Term, Term, Type, Box<Goal>),
}

impl Goal {
    pub fn and(a: Goal, b: Goal) -> Goal {
        Goal::And(Box::new(a), Box::new(b))
    }

    /// Right-nested conjunction; `True` when empty.
    pub fn conj<I: IntoIterator<Item = Goal>>(goals: I) -> Goal {
        let mut goals: Vec<Goal> = goals.into_iter().collect();
        let Some(mut acc) = goals.pop() else {
            return Goal::True;
        };
        while let Some(g) = goals.pop() {
            acc = Goal::and(g, acc);
        }
        acc
    }

    pub fn exists(x: Name, ty: Type, body: Goal) -> Goal {
        Goal::Exists(x, ty, Box::new(body))
    }

    pub fn forall(y: Name, ty: Type, body: Goal) -> Goal {
        Goal::Forall(y, ty, Box::new(body))
    }

    pub fn guard(t: Term, s: Term, ty: Type, body: Goal) -> Goal {
        Goal::Guard(t, s, ty, Box::new(body))
    }

    fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Goal {
        match self {
            Goal::True | Goal::False => self.clone(),
            Goal::Atom(a) => Goal::Atom(f(a)),
            Goal::And(a, b) => Goal::and(a.map_terms(f), b.map_terms(f)),
            Goal::Exists(x, ty, g) => Goal::exists(x.clone(), ty.clone(), g.map_terms(f)),
            Goal::Forall(y, ty, g) => Goal::forall(y.clone(), ty.clone(), g.map_terms(f)),
            Goal::Eq(t, s, ty) => Goal::Eq(f(t), f(s), ty.clone()),
            Goal::Guard(t, s, ty, g) => Goal::guard(f(t), f(s), ty.clone(), g.map_terms(f)),
        }
    }

    /// Replace free occurrences of the logic variable `x`. `by` must not
    /// mention names bound inside `self`.
    pub fn subst_var(&self, x: &Name, by: &Term) -> Goal {
        match self {
            Goal::Exists(z, _, _) if z == x => self.clone(),
            Goal::Exists(z, ty, g) => Goal::exists(z.clone(), ty.clone(), g.subst_var(x, by)),
            Goal::Forall(z, ty, g) => Goal::forall(z.clone(), ty.clone(), g.subst_var(x, by)),
            Goal::And(a, b) => Goal::and(a.subst_var(x, by), b.subst_var(x, by)),
            Goal::Guard(t, s, ty, g) => Goal::guard(
                t.subst_var(x, by),
                s.subst_var(x, by),
                ty.clone(),
                g.subst_var(x, by),
            ),
            _ => self.map_terms(&mut |t| t.subst_var(x, by)),
        }
    }

    /// Replace free occurrences of the eigenvariable `y`.
    pub fn subst_eigen(&self, y: &Name, by: &Term) -> Goal {
        match self {
            Goal::Forall(z, _, _) if z == y => self.clone(),
            Goal::Forall(z, ty, g) => Goal::forall(z.clone(), ty.clone(), g.subst_eigen(y, by)),
            Goal::Exists(z, ty, g) => Goal::exists(z.clone(), ty.clone(), g.subst_eigen(y, by)),
            Goal::And(a, b) => Goal::and(a.subst_eigen(y, by), b.subst_eigen(y, by)),
            Goal::Guard(t, s, ty, g) => Goal::guard(
                t.subst_eigen(y, by),
                s.subst_eigen(y, by),
                ty.clone(),
                g.subst_eigen(y, by),
            ),
            _ => self.map_terms(&mut |t| t.subst_eigen(y, by)),
        }
    }

    fn any(&self, pred: &mut impl FnMut(&Goal) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Goal::And(a, b) => a.any(pred) || b.any(pred),
            Goal::Exists(_, _, g) | Goal::Forall(_, _, g) | Goal::Guard(_, _, _, g) => g.any(pred),
            _ => false,
        }
    }

    pub fn has_atoms(&self) -> bool {
        self.any(&mut |g| matches!(g, Goal::Atom(_)))
    }

    pub fn has_exists(&self) -> bool {
        self.any(&mut |g| matches!(g, Goal::Exists(..)))
    }

    /// Free logic variables.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        fn go(g: &Goal, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
            let term = |t: &Term, bound: &Vec<Name>, out: &mut BTreeSet<Name>| {
                let mut vs = BTreeSet::new();
                t.collect_vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            };
            match g {
                Goal::True | Goal::False => {}
                Goal::Atom(a) => term(a, bound, out),
                Goal::And(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Goal::Exists(x, _, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Goal::Forall(_, _, b) => go(b, bound, out),
                Goal::Eq(t, s, _) => {
                    term(t, bound, out);
                    term(s, bound, out);
                }
                Goal::Guard(t, s, _, b) => {
                    term(t, bound, out);
                    term(s, bound, out);
                    go(b, bound, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Existential binders in prefix order.
    pub fn existentials(&self) -> Vec<(Name, Type)> {
        let mut out = Vec::new();
        self.any(&mut |g| {
            if let Goal::Exists(x, ty, _) = g {
                out.push((x.clone(), ty.clone()));
            }
            false
        });
        out
    }

    /// Number of connectives, quantifiers and term leaves.
    pub fn size(&self) -> usize {
        match self {
            Goal::True | Goal::False => 1,
            Goal::Atom(a) => a.size(),
            Goal::And(a, b) => 1 + a.size() + b.size(),
            Goal::Exists(_, _, g) | Goal::Forall(_, _, g) => 1 + g.size(),
            Goal::Eq(t, s, _) => 1 + t.size() + s.size(),
            Goal::Guard(t, s, _, g) => 1 + t.size() + s.size() + g.size(),
        }
    }

    /// Binders renamed by position, for comparison up to α.
    fn canonical(&self) -> Goal {
        fn go(g: &Goal, next: &mut u32) -> Goal {
            match g {
                Goal::Exists(x, ty, b) => {
                    *next += 1;
                    let fresh = Name::indexed("?", *next);
                    let body = b.subst_var(x, &Term::Var(fresh.clone()));
                    Goal::exists(fresh, ty.clone(), go(&body, next))
                }
                Goal::Forall(y, ty, b) => {
                    *next += 1;
                    let fresh = Name::indexed("!", *next);
                    let body = b.subst_eigen(y, &Term::Eigen(fresh.clone()));
                    Goal::forall(fresh, ty.clone(), go(&body, next))
                }
                Goal::And(a, b) => {
                    let a = go(a, next);
                    Goal::and(a, go(b, next))
                }
                Goal::Guard(t, s, ty, b) => Goal::guard(t.clone(), s.clone(), ty.clone(), go(b, next)),
                _ => g.clone(),
            }
        }
        go(self, &mut 0)
    }
}

fn same_shape(a: &Goal, b: &Goal) -> bool {
    match (a, b) {
        (Goal::True, Goal::True) | (Goal::False, Goal::False) => true,
        (Goal::Atom(x), Goal::Atom(y)) => term_eq(x, y),
        (Goal::And(a1, b1), Goal::And(a2, b2)) => same_shape(a1, a2) && same_shape(b1, b2),
        (Goal::Exists(x1, t1, g1), Goal::Exists(x2, t2, g2))
        | (Goal::Forall(x1, t1, g1), Goal::Forall(x2, t2, g2)) => {
            x1 == x2 && t1 == t2 && same_shape(g1, g2)
        }
        (Goal::Eq(t1, s1, ty1), Goal::Eq(t2, s2, ty2)) => {
            ty1 == ty2 && term_eq(t1, t2) && term_eq(s1, s2)
        }
        (Goal::Guard(t1, s1, ty1, g1), Goal::Guard(t2, s2, ty2, g2)) => {
            ty1 == ty2 && term_eq(t1, t2) && term_eq(s1, s2) && same_shape(g1, g2)
        }
        _ => false,
    }
}

/// Equality up to renaming of bound names (and αη on terms).
pub fn alpha_eq(a: &Goal, b: &Goal) -> bool {
    same_shape(&a.canonical(), &b.canonical())
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print::goal_to_string(self))
    }
}

impl fmt::Debug for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `∀ universals. body ⊃ head`.
#[derive(Clone, PartialEq, Eq)]
pub struct Clause {
    pub universals: Vec<(Name, Type)>,
    pub head: Term,
    pub body: Goal,
}

impl Clause {
    pub fn predicate(&self) -> &Term {
        self.head.head()
    }

    /// Same clause with globally fresh universals.
    pub fn rename(&self, supply: &NameSupply) -> Clause {
        let mut head = self.head.clone();
        let mut body = self.body.clone();
        let mut universals = Vec::with_capacity(self.universals.len());
        for (u, ty) in &self.universals {
            let fresh = supply.fresh(u);
            let v = Term::Var(fresh.clone());
            head = head.subst_var(u, &v);
            body = body.subst_var(u, &v);
            universals.push((fresh, ty.clone()));
        }
        Clause {
            universals,
            head,
            body,
        }
    }
}

pub fn rename_clause(d: &Clause, supply: &NameSupply) -> Clause {
    d.rename(supply)
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print::clause_to_string(self))
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Program {
    pub sig: Signature,
    pub clauses: Vec<Clause>,
}

impl Program {
    pub fn new(sig: Signature) -> Program {
        Program {
            sig,
            clauses: Vec::new(),
        }
    }

    /// Clauses whose head predicate is `pred`, with their source index.
    pub fn clauses_for<'a>(&'a self, pred: &'a Term) -> impl Iterator<Item = (usize, &'a Clause)> {
        self.clauses
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.predicate() == pred)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `pi` over a non-primitive type.
    UniversalNotPrimitive { var: Name, ty: Type },
    /// `sigma` or clause universal of order above 1.
    OrderTooHigh { var: Name, ty: Type },
    /// Quantifier or equality at a type mentioning `o`.
    FormulaType { what: String, ty: Type },
    NotAnAtom(Term),
    IllTyped(String),
    FreeVariable(Name),
    FreeEigen(Name),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UniversalNotPrimitive { var, ty } => {
                write!(f, "universal `{var}` has non-primitive type {ty}")
            }
            Violation::OrderTooHigh { var, ty } => {
                write!(f, "`{var}` has type {ty} of order {}", ty.order())
            }
            Violation::FormulaType { what, ty } => write!(f, "{what} at type {ty} mentioning o"),
            Violation::NotAnAtom(t) => write!(f, "`{t}` is not an atom"),
            Violation::IllTyped(msg) => write!(f, "ill-typed: {msg}"),
            Violation::FreeVariable(x) => write!(f, "free variable `{x}`"),
            Violation::FreeEigen(y) => write!(f, "unbound eigenvariable `{y}`"),
        }
    }
}

struct Checker<'a> {
    sig: &'a Signature,
    vars: Vec<(Name, Type)>,
    eigens: Vec<(Name, Type)>,
    out: Vec<Violation>,
}

impl Checker<'_> {
    fn type_of(&mut self, t: &Term) -> Option<Type> {
        let scope = Scope::new(self.sig, &self.vars, &self.eigens);
        match type_of(&scope, t) {
            Ok(ty) => Some(ty),
            Err(e) => {
                self.free_names(t);
                self.out.push(Violation::IllTyped(format!("`{t}`: {e}")));
                None
            }
        }
    }

    fn free_names(&mut self, t: &Term) {
        let mut vs = BTreeSet::new();
        t.collect_vars(&mut vs);
        for v in vs {
            if !self.vars.iter().any(|(n, _)| *n == v) {
                self.out.push(Violation::FreeVariable(v));
            }
        }
        let mut es = BTreeSet::new();
        t.collect_eigens(&mut es);
        for e in es {
            if !self.eigens.iter().any(|(n, _)| *n == e) && !self.sig.is_eigen(&e) {
                self.out.push(Violation::FreeEigen(e));
            }
        }
    }

    fn equation(&mut self, t: &Term, s: &Term, ty: &Type, what: &str) {
        if ty.contains_formula() {
            self.out.push(Violation::FormulaType {
                what: what.into(),
                ty: ty.clone(),
            });
        }
        for side in [t, s] {
            if let Some(got) = self.type_of(side) {
                if got != *ty {
                    self.out.push(Violation::IllTyped(format!(
                        "`{side}` has type {got}, expected {ty}"
                    )));
                }
            }
        }
    }

    fn atom(&mut self, a: &Term) {
        let is_pred = matches!(a.head(), Term::Const(p) if self.sig.is_predicate(p));
        if !is_pred {
            self.out.push(Violation::NotAnAtom(a.clone()));
            return;
        }
        if let Some(ty) = self.type_of(a) {
            if !ty.is_formula() {
                self.out.push(Violation::NotAnAtom(a.clone()));
            }
        }
    }

    fn goal(&mut self, g: &Goal) {
        match g {
            Goal::True | Goal::False => {}
            Goal::Atom(a) => self.atom(a),
            Goal::And(a, b) => {
                self.goal(a);
                self.goal(b);
            }
            Goal::Exists(x, ty, body) => {
                if ty.order() > 1 {
                    self.out.push(Violation::OrderTooHigh {
                        var: x.clone(),
                        ty: ty.clone(),
                    });
                }
                if ty.contains_formula() {
                    self.out.push(Violation::FormulaType {
                        what: format!("sigma {x}"),
                        ty: ty.clone(),
                    });
                }
                self.vars.push((x.clone(), ty.clone()));
                self.goal(body);
                self.vars.pop();
            }
            Goal::Forall(y, ty, body) => {
                if !ty.is_prim() {
                    self.out.push(Violation::UniversalNotPrimitive {
                        var: y.clone(),
                        ty: ty.clone(),
                    });
                }
                if ty.contains_formula() {
                    self.out.push(Violation::FormulaType {
                        what: format!("pi {y}"),
                        ty: ty.clone(),
                    });
                }
                self.eigens.push((y.clone(), ty.clone()));
                self.goal(body);
                self.eigens.pop();
            }
            Goal::Eq(t, s, ty) => self.equation(t, s, ty, "equality"),
            Goal::Guard(t, s, ty, body) => {
                self.equation(t, s, ty, "guard");
                self.goal(body);
            }
        }
    }
}

/// Violations of the goal grammar, the order restrictions and typing.
/// An empty list means `g` is a well-formed closed goal.
pub fn check_goal(sig: &Signature, g: &Goal) -> Vec<Violation> {
    let mut c = Checker {
        sig,
        vars: Vec::new(),
        eigens: Vec::new(),
        out: Vec::new(),
    };
    c.goal(g);
    c.out
}

pub fn check_clause(sig: &Signature, d: &Clause) -> Vec<Violation> {
    let mut c = Checker {
        sig,
        vars: d.universals.clone(),
        eigens: Vec::new(),
        out: Vec::new(),
    };
    for (u, ty) in &d.universals {
        if ty.order() > 1 {
            c.out.push(Violation::OrderTooHigh {
                var: u.clone(),
                ty: ty.clone(),
            });
        }
        if ty.contains_formula() {
            c.out.push(Violation::FormulaType {
                what: format!("clause variable {u}"),
                ty: ty.clone(),
            });
        }
    }
    c.atom(&d.head);
    c.goal(&d.body);
    c.out
}
