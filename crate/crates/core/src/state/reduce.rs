//! Reduction of guarding equalities.

use crate::name::{Name, NameSupply};
use crate::state::{GuardedGoal, StateFormula};
use crate::term::{occurs_rigidly, term_eq, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// An abstraction on either side is opened with a fresh parameter.
    Open,
    /// Both sides are αη-equal; the guard is dropped.
    Identical,
    /// A universal is equated with a term containing it (or a parameter)
    /// on a rigid path; the conjunct holds vacuously.
    Occurs,
    /// Distinct rigid heads; the conjunct holds vacuously.
    Clash,
    /// A universal is equated with a term not mentioning it; it is
    /// substituted away. `left` tells which side holds the universal.
    Eliminate { left: bool },
    /// Same rigid head; the guard splits into argument equations.
    Decompose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Redex {
    pub conjunct: usize,
    pub guard: usize,
    pub rule: Rule,
}

fn universal<'a>(c: &GuardedGoal, t: &'a Term) -> Option<&'a Name> {
    match t {
        Term::Eigen(n) if c.is_universal(n) => Some(n),
        _ => None,
    }
}

/// Head of a term that is rigid inside guards: constants, parameters and
/// signature eigenvariables. Universals are instantiable by the guard.
fn rigid_head<'a>(c: &GuardedGoal, t: &'a Term) -> Option<&'a Term> {
    match t.head() {
        h @ Term::Const(_) => Some(h),
        h @ Term::Eigen(n) if !c.is_universal(n) => Some(h),
        _ => None,
    }
}

fn mentions_param(c: &GuardedGoal, t: &Term) -> bool {
    t.any_leaf(&mut |l| matches!(l, Term::Eigen(n) if c.is_param(n)))
}

/// Highest-priority rule applicable to guard `t = s`.
pub fn guard_rule(c: &GuardedGoal, t: &Term, s: &Term) -> Option<Rule> {
    if matches!(t, Term::Lam(..)) || matches!(s, Term::Lam(..)) {
        return Some(Rule::Open);
    }
    if term_eq(t, s) {
        return Some(Rule::Identical);
    }
    for (y, other) in [(t, s), (s, t)] {
        if let Some(y) = universal(c, y) {
            let blocked = occurs_rigidly(other, &mut |u| match u {
                Term::Eigen(n) => n == y || c.is_param(n),
                _ => false,
            });
            if blocked {
                return Some(Rule::Occurs);
            }
        }
    }
    let (ht, hs) = (rigid_head(c, t), rigid_head(c, s));
    if let (Some(ht), Some(hs)) = (ht, hs) {
        if ht != hs {
            return Some(Rule::Clash);
        }
    }
    for (left, (y, other)) in [(true, (t, s)), (false, (s, t))] {
        if let Some(y) = universal(c, y) {
            if !other.mentions_eigen(y) && !mentions_param(c, other) {
                return Some(Rule::Eliminate { left });
            }
        }
    }
    if let (Some(ht), Some(hs)) = (ht, hs) {
        if ht == hs {
            return Some(Rule::Decompose);
        }
    }
    None
}

/// Every applicable (conjunct, guard) pair with its preferred rule.
pub fn redexes(s: &StateFormula) -> Vec<Redex> {
    let mut out = Vec::new();
    for (ci, c) in s.conjuncts.iter().enumerate() {
        for (gi, (t, u)) in c.guards.iter().enumerate() {
            if let Some(rule) = guard_rule(c, t, u) {
                out.push(Redex {
                    conjunct: ci,
                    guard: gi,
                    rule,
                });
            }
        }
    }
    out
}

fn open(t: &Term, p: &Term) -> Term {
    match t {
        Term::Lam(_, body) => Term::instantiate(body, p).beta_normalize(),
        _ => Term::app(t.clone(), p.clone()),
    }
}

/// Rewrite one guard of a conjunct; `None` when the conjunct became `⊤`.
pub fn apply_rule(c: &GuardedGoal, gi: usize, rule: Rule, supply: &NameSupply) -> Option<GuardedGoal> {
    let (t, s) = c.guards[gi].clone();
    let mut c = c.clone();
    match rule {
        Rule::Open => {
            let ty = match (&t, &s) {
                (Term::Lam(ty, _), _) | (_, Term::Lam(ty, _)) => ty.clone(),
                _ => unreachable!("open needs an abstraction"),
            };
            let p = supply.fresh_str("p");
            let pt = Term::Eigen(p.clone());
            c.guards[gi] = (open(&t, &pt), open(&s, &pt));
            c.params.push((p, ty));
        }
        Rule::Identical => {
            c.guards.remove(gi);
        }
        Rule::Occurs | Rule::Clash => return None,
        Rule::Eliminate { left } => {
            let (y, by) = if left { (t, s) } else { (s, t) };
            let Term::Eigen(y) = y else {
                unreachable!("eliminate needs a universal")
            };
            c.guards.remove(gi);
            c.universals.retain(|(n, _)| *n != y);
            c = c.map_terms(&mut |u| u.subst_eigen(&y, &by));
        }
        Rule::Decompose => {
            let (_, ta) = t.spine();
            let (_, sa) = s.spine();
            let pairs: Vec<(Term, Term)> = ta
                .into_iter()
                .zip(sa)
                .map(|(a, b)| (a.clone(), b.clone()))
                .collect();
            c.guards.splice(gi..=gi, pairs);
        }
    }
    c.tidy()
}

/// Apply a specific redex.
pub fn apply_redex(s: &StateFormula, r: Redex, supply: &NameSupply) -> StateFormula {
    let mut next = s.clone();
    match apply_rule(&s.conjuncts[r.conjunct], r.guard, r.rule, supply) {
        Some(c) => next.conjuncts[r.conjunct] = c,
        None => {
            next.conjuncts.remove(r.conjunct);
        }
    }
    next
}

/// One rewrite in the leftmost conjunct that has one, at its leftmost
/// reducible guard.
pub fn reduce_step(s: &StateFormula, supply: &NameSupply) -> Option<StateFormula> {
    let r = first_redex(s)?;
    Some(apply_redex(s, r, supply))
}

fn first_redex(s: &StateFormula) -> Option<Redex> {
    for (ci, c) in s.conjuncts.iter().enumerate() {
        for (gi, (t, u)) in c.guards.iter().enumerate() {
            if let Some(rule) = guard_rule(c, t, u) {
                return Some(Redex {
                    conjunct: ci,
                    guard: gi,
                    rule,
                });
            }
        }
    }
    None
}

pub fn reduce(s: &StateFormula, supply: &NameSupply) -> StateFormula {
    let mut cur = s.clone();
    // conjuncts never interact during reduction, so each is run to its own
    // fixpoint in turn
    let mut ci = 0;
    while ci < cur.conjuncts.len() {
        let mut c = Some(cur.conjuncts[ci].clone());
        while let Some(cc) = &c {
            let found = cc
                .guards
                .iter()
                .enumerate()
                .find_map(|(gi, (t, u))| guard_rule(cc, t, u).map(|r| (gi, r)));
            match found {
                Some((gi, rule)) => c = apply_rule(cc, gi, rule, supply),
                None => break,
            }
        }
        match c {
            Some(c) => {
                cur.conjuncts[ci] = c;
                ci += 1;
            }
            None => {
                cur.conjuncts.remove(ci);
            }
        }
    }
    cur
}

/// Reduce choosing among all redexes with `pick(n)`, which returns an index
/// below `n`.
pub fn reduce_with(s: &StateFormula, supply: &NameSupply, pick: &mut impl FnMut(usize) -> usize) -> StateFormula {
    let mut cur = s.clone();
    loop {
        let rs = redexes(&cur);
        if rs.is_empty() {
            return cur;
        }
        let r = rs[pick(rs.len()) % rs.len()];
        cur = apply_redex(&cur, r, supply);
    }
}

pub fn is_reduced(s: &StateFormula) -> bool {
    first_redex(s).is_none()
}

/// Termination measure: total universals, then total guard size.
pub fn measure(s: &StateFormula) -> (usize, usize) {
    let universals = s.conjuncts.iter().map(|c| c.universals.len()).sum();
    let size = s
        .conjuncts
        .iter()
        .flat_map(|c| c.guards.iter())
        .map(|(t, u)| t.size() + u.size())
        .sum();
    (universals, size)
}
