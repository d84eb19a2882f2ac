//! Concrete rendering of terms, goals, clauses, states and substitutions.
//!
//! Terms and goals re-parse to α-equal values. λ binders are named `w1`,
//! `w2`, ... skipping names that occur free.

use std::collections::HashSet;

use crate::formula::{Clause, Goal};
use crate::state::{GuardedGoal, StateFormula, Target};
use crate::subst::Substitution;
use crate::term::Term;

const CONS: &str = "::";

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    /// Anything, including a trailing abstraction.
    Top,
    /// Left operand of `::`.
    ConsLeft,
    /// Argument position: leaves only.
    Arg,
}

struct Printer {
    free: HashSet<String>,
    binders: Vec<String>,
}

impl Printer {
    fn for_terms<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Printer {
        let mut free = HashSet::new();
        for t in terms {
            t.any_leaf(&mut |l| {
                match l {
                    Term::Const(n) | Term::Eigen(n) | Term::Var(n) => {
                        free.insert(n.to_string());
                    }
                    _ => {}
                }
                false
            });
        }
        Printer {
            free,
            binders: Vec::new(),
        }
    }

    fn fresh_binder(&self) -> String {
        let mut k = self.binders.len() + 1;
        loop {
            let cand = format!("w{k}");
            if !self.free.contains(&cand) && !self.binders.contains(&cand) {
                return cand;
            }
            k += 1;
        }
    }

    fn term(&mut self, t: &Term, prec: Prec, out: &mut String) {
        match t {
            Term::Const(n) | Term::Eigen(n) | Term::Var(n) => out.push_str(&n.to_string()),
            Term::Bound(k) => {
                let k = *k as usize;
                match self.binders.len().checked_sub(k + 1) {
                    Some(i) => out.push_str(&self.binders[i]),
                    None => out.push_str(&format!("#{k}")),
                }
            }
            Term::Lam(_, body) => {
                let open = prec > Prec::Top;
                if open {
                    out.push('(');
                }
                let w = self.fresh_binder();
                out.push_str(&w);
                out.push_str("\\ ");
                self.binders.push(w);
                self.term(body, Prec::Top, out);
                self.binders.pop();
                if open {
                    out.push(')');
                }
            }
            Term::App(..) => {
                let (head, args) = t.spine();
                if matches!(head, Term::Const(n) if n.base() == CONS && n.is_source()) && args.len() == 2 {
                    let open = prec > Prec::Top;
                    if open {
                        out.push('(');
                    }
                    self.term(args[0], Prec::ConsLeft, out);
                    out.push_str(" :: ");
                    self.term(args[1], Prec::Top, out);
                    if open {
                        out.push(')');
                    }
                    return;
                }
                let open = prec == Prec::Arg;
                if open {
                    out.push('(');
                }
                self.term(head, Prec::Arg, out);
                for a in args {
                    out.push(' ');
                    self.term(a, Prec::Arg, out);
                }
                if open {
                    out.push(')');
                }
            }
        }
    }

    /// Equality operand: anything but a bare abstraction or `::`-less
    /// ambiguity; `::` binds tighter than `=`.
    fn operand(&mut self, t: &Term, out: &mut String) {
        let prec = if matches!(t, Term::Lam(..)) { Prec::Arg } else { Prec::Top };
        self.term(t, prec, out);
    }
}

pub fn term_to_string(t: &Term) -> String {
    let mut p = Printer::for_terms([t]);
    let mut out = String::new();
    p.term(t, Prec::Top, &mut out);
    out
}

fn goal_terms(g: &Goal, acc: &mut Vec<Term>) {
    match g {
        Goal::True | Goal::False => {}
        Goal::Atom(a) => acc.push(a.clone()),
        Goal::And(a, b) => {
            goal_terms(a, acc);
            goal_terms(b, acc);
        }
        Goal::Exists(_, _, b) | Goal::Forall(_, _, b) => goal_terms(b, acc),
        Goal::Eq(t, s, _) => acc.extend([t.clone(), s.clone()]),
        Goal::Guard(t, s, _, b) => {
            acc.extend([t.clone(), s.clone()]);
            goal_terms(b, acc);
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum GPrec {
    /// Conjunction and everything tighter.
    Conj,
    /// Operand of `=>`: no conjunction.
    Impl,
}

impl Printer {
    /// `tail` is true when nothing follows, so a binder may extend to the
    /// end without parentheses.
    fn goal(&mut self, g: &Goal, prec: GPrec, tail: bool, out: &mut String) {
        match g {
            Goal::True => out.push_str("tt"),
            Goal::False => out.push_str("ff"),
            Goal::Atom(a) => self.term(a, Prec::Top, out),
            Goal::And(a, b) => {
                let open = prec > GPrec::Conj;
                if open {
                    out.push('(');
                }
                self.goal(a, GPrec::Conj, false, out);
                out.push_str(", ");
                if matches!(**b, Goal::And(..)) {
                    out.push('(');
                    self.goal(b, GPrec::Conj, true, out);
                    out.push(')');
                } else {
                    self.goal(b, GPrec::Impl, tail || open, out);
                }
                if open {
                    out.push(')');
                }
            }
            Goal::Exists(x, ty, b) | Goal::Forall(x, ty, b) => {
                let open = !tail;
                if open {
                    out.push('(');
                }
                let q = if matches!(g, Goal::Exists(..)) { "sigma" } else { "pi" };
                out.push_str(&format!("{q} {x}:{ty}\\ "));
                self.goal(b, GPrec::Conj, true, out);
                if open {
                    out.push(')');
                }
            }
            Goal::Eq(t, s, _) => {
                self.operand(t, out);
                out.push_str(" = ");
                self.operand(s, out);
            }
            Goal::Guard(t, s, _, b) => {
                self.operand(t, out);
                out.push_str(" = ");
                self.operand(s, out);
                out.push_str(" => ");
                self.goal(b, GPrec::Impl, tail, out);
            }
        }
    }
}

pub fn goal_to_string(g: &Goal) -> String {
    let mut terms = Vec::new();
    goal_terms(g, &mut terms);
    let mut p = Printer::for_terms(&terms);
    let mut out = String::new();
    p.goal(g, GPrec::Conj, true, &mut out);
    out
}

pub fn clause_to_string(d: &Clause) -> String {
    let mut terms = vec![d.head.clone()];
    goal_terms(&d.body, &mut terms);
    let mut p = Printer::for_terms(&terms);
    let mut out = String::new();
    p.term(&d.head, Prec::Top, &mut out);
    if d.body != Goal::True {
        out.push_str(" :- ");
        p.goal(&d.body, GPrec::Conj, true, &mut out);
    }
    out.push('.');
    out
}

fn conjunct_terms(c: &GuardedGoal) -> Vec<&Term> {
    let mut v: Vec<&Term> = c.guards.iter().flat_map(|(t, s)| [t, s]).collect();
    match &c.target {
        Target::Eq(t, s) => v.extend([t, s]),
        Target::Atom(a) => v.push(a),
        _ => {}
    }
    v
}

fn conjunct_into(c: &GuardedGoal, out: &mut String) {
    let mut p = Printer::for_terms(conjunct_terms(c));
    if !c.universals.is_empty() {
        out.push_str("pi");
        for (y, _) in &c.universals {
            out.push(' ');
            out.push_str(&y.to_string());
        }
        out.push_str(" . ");
    }
    if !c.params.is_empty() {
        out.push_str("param");
        for (q, _) in &c.params {
            out.push(' ');
            out.push_str(&q.to_string());
        }
        out.push_str(" . ");
    }
    for (t, s) in &c.guards {
        p.operand(t, out);
        out.push_str(" = ");
        p.operand(s, out);
        out.push_str(" => ");
    }
    match &c.target {
        Target::Eq(t, s) => {
            p.operand(t, out);
            out.push_str(" = ");
            p.operand(s, out);
        }
        Target::Atom(a) => p.term(a, Prec::Top, out),
        Target::False => out.push_str("ff"),
        Target::True => out.push_str("tt"),
    }
}

pub fn conjunct_to_string(c: &GuardedGoal) -> String {
    let mut out = String::new();
    conjunct_into(c, &mut out);
    out
}

/// `sigma h1 h2 . C1, C2`, each conjunct parenthesized when there are
/// several.
pub fn state_to_string(s: &StateFormula) -> String {
    let mut out = String::from("sigma");
    for (x, _) in &s.existentials {
        out.push(' ');
        out.push_str(&x.to_string());
    }
    out.push_str(" . ");
    if s.conjuncts.is_empty() {
        out.push_str("tt");
        return out;
    }
    let many = s.conjuncts.len() > 1;
    for (i, c) in s.conjuncts.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        if many {
            out.push('(');
        }
        conjunct_into(c, &mut out);
        if many {
            out.push(')');
        }
    }
    out
}

/// `x := t; y := s`.
pub fn subst_to_string(theta: &Substitution) -> String {
    theta
        .iter()
        .map(|(x, b)| format!("{x} := {}", term_to_string(&b.term)))
        .collect::<Vec<_>>()
        .join("; ")
}
