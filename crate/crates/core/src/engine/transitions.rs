//! The labeled transition relation `⟨P⟩ S →ρ S′` on reduced states.

use std::fmt;

use crate::formula::{Goal, Program};
use crate::name::{Name, NameSupply};
use crate::signature::Signature;
use crate::state::classify::{imitable, target_step, TargetStep};
use crate::state::normalize::{normalize_in, Context};
use crate::state::{reduce, GuardedGoal, StateFormula, Target};
use crate::subst::Substitution;
use crate::term::{occurs_rigidly, term_eq, Term};
use crate::types::Type;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// Clause index in the program.
    Backchain(usize),
    Identical,
    Decompose,
    Clash,
    Imitate,
    /// Argument index, from 0.
    Project(usize),
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepKind::Backchain(i) => write!(f, "backchain({i})"),
            StepKind::Identical => f.write_str("identical"),
            StepKind::Decompose => f.write_str("decompose"),
            StepKind::Clash => f.write_str("clash"),
            StepKind::Imitate => f.write_str("imitate"),
            StepKind::Project(i) => write!(f, "project({i})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Transition {
    pub kind: StepKind,
    pub conjunct: usize,
    /// Binds only existentials of the source state.
    pub label: Substitution,
    /// Normalized and reduced.
    pub next: StateFormula,
}

fn replace_conjunct(s: &StateFormula, ci: usize, with: Vec<GuardedGoal>) -> StateFormula {
    let mut next = s.clone();
    next.conjuncts.splice(ci..=ci, with);
    next
}

fn deterministic(kind: StepKind, s: &StateFormula, ci: usize, with: Vec<GuardedGoal>, supply: &NameSupply) -> Transition {
    Transition {
        kind,
        conjunct: ci,
        label: Substitution::new(),
        next: reduce(&replace_conjunct(s, ci, with), supply),
    }
}

/// `f t̄ = f s̄` under the conjunct's guards becomes one conjunct per
/// argument; arrow-typed arguments are η-expanded with fresh universals.
fn decompose(sig: &Signature, c: &GuardedGoal, t: &Term, s: &Term, supply: &NameSupply) -> Vec<GuardedGoal> {
    let (head, targs) = t.spine();
    let (_, sargs) = s.spine();
    let arg_types = match head {
        Term::Const(n) => sig.constant(n).map(|ty| ty.split().0).unwrap_or_default(),
        _ => Vec::new(),
    };
    targs
        .into_iter()
        .zip(sargs)
        .enumerate()
        .filter_map(|(i, (a, b))| {
            let mut part = c.clone();
            let extra = arg_types.get(i).map(|ty| ty.split().0).unwrap_or_default();
            let ws: Vec<Term> = extra
                .into_iter()
                .map(|ty| {
                    let w = supply.fresh_str("w");
                    part.universals.push((w.clone(), ty));
                    Term::Eigen(w)
                })
                .collect();
            part.target = Target::Eq(a.apply_normal(ws.clone()), b.apply_normal(ws));
            part.tidy()
        })
        .collect()
}

fn is_atom_leaf(t: &Term) -> bool {
    matches!(t, Term::Const(_) | Term::Eigen(_) | Term::Bound(_))
}

/// The flexible head also occurs on a rigid path of the rigid side, in a
/// position where no instance of imitation can close the size gap.
fn imitation_hopeless(x: &Name, flex_args: &[&Term], rigid: &Term) -> bool {
    let flex_atomic = flex_args.iter().all(|a| is_atom_leaf(a));
    occurs_rigidly(rigid, &mut |u| {
        let (h, args) = u.spine();
        if !matches!(h, Term::Var(y) if y == x) || args.len() != flex_args.len() {
            return false;
        }
        let same = args.iter().zip(flex_args).all(|(a, b)| term_eq(a, b));
        same || (flex_atomic && args.iter().all(|a| is_atom_leaf(a)))
    })
}

fn project_and_imitate(
    sig: &Signature,
    s: &StateFormula,
    ci: usize,
    flex: &Term,
    rigid: &Term,
    pruning: bool,
    supply: &NameSupply,
) -> (Vec<Transition>, bool) {
    let (fh, fargs) = flex.spine();
    let Term::Var(x) = fh else {
        unreachable!("flexible side has a variable head")
    };
    let Some(xty) = s.existential_type(x).cloned() else {
        return (Vec::new(), false);
    };
    let (sigmas, tau) = xty.split();
    let m = sigmas.len();
    let mut out = Vec::new();
    let step = |kind: StepKind, term: Term, fresh: Vec<(Name, Type)>, out: &mut Vec<Transition>| {
        let next = reduce(&s.instantiate(x, &term, &fresh), supply);
        out.push(Transition {
            kind,
            conjunct: ci,
            label: Substitution::singleton(x.clone(), xty.clone(), term),
            next,
        });
    };
    for (i, sigma) in sigmas.iter().enumerate() {
        if *sigma == tau {
            step(StepKind::Project(i), Term::lams(sigmas.clone(), Term::Bound((m - 1 - i) as u32)), Vec::new(), &mut out);
        }
    }
    let r = rigid.head();
    if !imitable(sig, r) {
        return (out, false);
    }
    if pruning && imitation_hopeless(x, &fargs, rigid) {
        return (out, true);
    }
    let rty = match r {
        Term::Const(n) => sig.constant(n),
        Term::Eigen(n) => sig.eigen(n),
        _ => None,
    };
    let Some(rty) = rty else {
        return (out, false);
    };
    let mut fresh = Vec::new();
    let mut args = Vec::new();
    for rho in rty.split().0 {
        let (nus, pi) = rho.split();
        let k = nus.len();
        let fty = Type::arrows(sigmas.iter().cloned().chain(nus.iter().cloned()), pi);
        if fty.order() > 1 {
            // the fresh variable would leave the existential fragment
            return (out, false);
        }
        let xj = supply.fresh(x);
        let applied = Term::apps(
            Term::Var(xj.clone()),
            (0..m)
                .map(|i| Term::Bound((m - 1 - i + k) as u32))
                .chain((0..k).map(|l| Term::Bound((k - 1 - l) as u32))),
        );
        args.push(Term::lams(nus, applied));
        fresh.push((xj, fty));
    }
    let term = Term::lams(sigmas.clone(), Term::apps(r.clone(), args));
    step(StepKind::Imitate, term, fresh, &mut out);
    (out, false)
}

/// Unification transitions acting on conjunct `ci`. The flag reports
/// whether imitation was suppressed by occurs-check pruning.
pub fn unify_conjunct(
    sig: &Signature,
    s: &StateFormula,
    ci: usize,
    pruning: bool,
    supply: &NameSupply,
) -> (Vec<Transition>, bool) {
    let c = &s.conjuncts[ci];
    let Target::Eq(t, u) = &c.target else {
        return (Vec::new(), false);
    };
    match target_step(c, t, u) {
        TargetStep::Identical => (vec![deterministic(StepKind::Identical, s, ci, Vec::new(), supply)], false),
        TargetStep::Decompose => {
            let parts = decompose(sig, c, t, u, supply);
            (vec![deterministic(StepKind::Decompose, s, ci, parts, supply)], false)
        }
        TargetStep::Clash => {
            let mut bottom = c.clone();
            bottom.target = Target::False;
            let bottom = bottom.tidy().into_iter().collect();
            (vec![deterministic(StepKind::Clash, s, ci, bottom, supply)], false)
        }
        TargetStep::FlexRigid { flex_left } => {
            let (flex, rigid) = if flex_left { (t, u) } else { (u, t) };
            project_and_imitate(sig, s, ci, flex, rigid, pruning, supply)
        }
        TargetStep::None => (Vec::new(), false),
    }
}

/// Backchaining on the atom target of conjunct `ci`, one transition per
/// clause with a matching head predicate, in source order.
pub fn backchain_conjunct(p: &Program, s: &StateFormula, ci: usize, supply: &NameSupply) -> Vec<Transition> {
    let c = &s.conjuncts[ci];
    let Target::Atom(a) = &c.target else {
        return Vec::new();
    };
    let (pred, targs) = a.spine();
    let arg_types = match pred {
        Term::Const(n) => p.sig.constant(n).map(|ty| ty.split().0).unwrap_or_default(),
        _ => return Vec::new(),
    };
    let mut out = Vec::new();
    for (idx, d) in p.clauses_for(pred) {
        let d = d.rename(supply);
        let (_, sargs) = d.head.spine();
        let eqs = targs
            .iter()
            .zip(&sargs)
            .zip(&arg_types)
            .map(|((t, s), ty)| Goal::Eq((*t).clone(), (*s).clone(), ty.clone()));
        let body = Goal::conj(eqs.chain([d.body.clone()]));
        let g = d
            .universals
            .iter()
            .rev()
            .fold(body, |g, (u, ty)| Goal::exists(u.clone(), ty.clone(), g));
        let norm = normalize_in(&g, &mut Context::of_conjunct(c), supply);
        let mut next = replace_conjunct(s, ci, norm.conjuncts);
        next.existentials.extend(norm.existentials);
        out.push(Transition {
            kind: StepKind::Backchain(idx),
            conjunct: ci,
            label: Substitution::new(),
            next: reduce(&next, supply),
        });
    }
    out
}

pub fn unify_transitions(sig: &Signature, s: &StateFormula, pruning: bool, supply: &NameSupply) -> Vec<Transition> {
    (0..s.conjuncts.len())
        .flat_map(|ci| unify_conjunct(sig, s, ci, pruning, supply).0)
        .collect()
}

pub fn backchain_transitions(p: &Program, s: &StateFormula, supply: &NameSupply) -> Vec<Transition> {
    (0..s.conjuncts.len())
        .flat_map(|ci| backchain_conjunct(p, s, ci, supply))
        .collect()
}

/// The whole relation: unification steps, then backchaining steps.
pub fn transitions(p: &Program, s: &StateFormula, pruning: bool, supply: &NameSupply) -> Vec<Transition> {
    let mut out = unify_transitions(&p.sig, s, pruning, supply);
    out.extend(backchain_transitions(p, s, supply));
    out
}

/// The conjunct the search acts on, and how.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Focus {
    /// Identical, decompose or clash: a single transition that loses no
    /// solutions.
    Deterministic(usize),
    /// A flex-rigid target; `guarded` when the conjunct still has guards.
    FlexRigid { conjunct: usize, guarded: bool },
    Atom { conjunct: usize, guarded: bool },
}

impl Focus {
    pub fn conjunct(self) -> usize {
        match self {
            Focus::Deterministic(ci) => ci,
            Focus::FlexRigid { conjunct, .. } | Focus::Atom { conjunct, .. } => conjunct,
        }
    }

    /// Branching on a guarded conjunct may miss solutions that falsify
    /// the guards.
    pub fn is_guarded(self) -> bool {
        matches!(
            self,
            Focus::FlexRigid { guarded: true, .. } | Focus::Atom { guarded: true, .. }
        )
    }
}

/// Deterministic steps first (leftmost), then branching on unguarded
/// conjuncts (flex-rigid before atoms), then on guarded ones.
pub fn focus(s: &StateFormula) -> Option<Focus> {
    let step = |c: &GuardedGoal| match &c.target {
        Target::Eq(t, u) => Some(target_step(c, t, u)),
        _ => None,
    };
    for (ci, c) in s.conjuncts.iter().enumerate() {
        if matches!(
            step(c),
            Some(TargetStep::Identical | TargetStep::Decompose | TargetStep::Clash)
        ) {
            return Some(Focus::Deterministic(ci));
        }
    }
    for guarded in [false, true] {
        let eligible = |c: &GuardedGoal| c.guards.is_empty() != guarded;
        for (ci, c) in s.conjuncts.iter().enumerate() {
            if eligible(c) && matches!(step(c), Some(TargetStep::FlexRigid { .. })) {
                return Some(Focus::FlexRigid { conjunct: ci, guarded });
            }
        }
        for (ci, c) in s.conjuncts.iter().enumerate() {
            if eligible(c) && matches!(c.target, Target::Atom(_)) {
                return Some(Focus::Atom { conjunct: ci, guarded });
            }
        }
    }
    None
}

/// Transitions on the focused conjunct only.
pub fn focused_transitions(
    p: &Program,
    s: &StateFormula,
    f: Focus,
    pruning: bool,
    supply: &NameSupply,
) -> (Vec<Transition>, bool) {
    match f {
        Focus::Atom { conjunct, .. } => (backchain_conjunct(p, s, conjunct, supply), false),
        _ => unify_conjunct(&p.sig, s, f.conjunct(), pruning, supply),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::classify::{classify, Classification};
    use crate::state::normalize;
    use crate::syntax::parse_file;

    fn setup(text: &str, goal: &str) -> (Program, StateFormula, NameSupply) {
        let f = parse_file(text).unwrap();
        let g = crate::syntax::parse_goal(goal, &f.program.sig).unwrap();
        let supply = NameSupply::new();
        let s = reduce(&normalize(&g, &supply), &supply);
        (f.program, s, supply)
    }

    const SIG: &str = "kind i type. type a, b i. type f i -> i. type g i -> i -> i.";

    #[test]
    fn h_a_equals_a_branches_twice() {
        let (p, s, supply) = setup(SIG, "sigma h:i -> i\\ h a = a");
        let ts = transitions(&p, &s, true, &supply);
        let kinds: Vec<StepKind> = ts.iter().map(|t| t.kind).collect();
        assert_eq!(kinds, vec![StepKind::Project(0), StepKind::Imitate]);
        // each branch leaves `a = a`, discharged by one identical step
        for t in &ts {
            let done = unify_transitions(&p.sig, &t.next, true, &supply);
            assert_eq!(done.len(), 1);
            assert_eq!(done[0].kind, StepKind::Identical);
            assert_eq!(classify(&done[0].next), Classification::Success);
        }
        assert_eq!(ts[1].label.get(&s.existentials[0].0).unwrap().term.to_string(), "w1\\ a");
    }

    #[test]
    fn clash_and_decompose() {
        let (p, s, supply) = setup(SIG, "f a = g a b");
        let ts = transitions(&p, &s, true, &supply);
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].kind, StepKind::Clash);
        assert_eq!(classify(&ts[0].next), Classification::Failure);

        let (p, s, supply) = setup(SIG, "sigma x\\ g x a = g b a");
        let ts = transitions(&p, &s, true, &supply);
        assert_eq!(ts[0].kind, StepKind::Decompose);
        assert_eq!(ts[0].next.conjuncts.len(), 2);
    }

    #[test]
    fn occurs_pruning() {
        let (p, s, supply) = setup(SIG, "sigma x\\ x = f x");
        assert!(transitions(&p, &s, true, &supply).is_empty());
        let (ts, pruned) = unify_conjunct(&p.sig, &s, 0, true, &supply);
        assert!(ts.is_empty() && pruned);
        let ts = transitions(&p, &s, false, &supply);
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].kind, StepKind::Imitate);
    }

    #[test]
    fn pruning_keeps_higher_order_solutions() {
        let (p, s, supply) = setup(SIG, "sigma x:i -> i\\ x (f (f b)) = f (x (f b))");
        let ts = transitions(&p, &s, true, &supply);
        assert!(ts.iter().any(|t| t.kind == StepKind::Imitate));
    }

    #[test]
    fn backchain_in_source_order() {
        let text = format!("{SIG} type p i -> o. p a. p b. p X :- p (f X).");
        let (p, s, supply) = setup(&text, "sigma x\\ p x");
        let ts = backchain_transitions(&p, &s, &supply);
        let kinds: Vec<StepKind> = ts.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            vec![StepKind::Backchain(0), StepKind::Backchain(1), StepKind::Backchain(2)]
        );
        for t in &ts {
            t.next.check_invariants(&p.sig).unwrap();
            assert!(t.label.is_empty());
        }
        // the fact `p a` leaves x = a
        assert!(matches!(&ts[0].next.conjuncts[0].target, Target::Eq(..)));
        assert!(backchain_transitions(&p, &setup(SIG, "a = a").1, &supply).is_empty());
    }

    #[test]
    fn focus_prefers_deterministic_then_unguarded() {
        let (_, s, _) = setup(SIG, "sigma x\\ sigma y\\ (y = a => x = b), x = a, f a = f b");
        assert_eq!(focus(&s), Some(Focus::Deterministic(2)));
        let (_, s, _) = setup(SIG, "sigma x\\ sigma y\\ (y = a => x = b), x = a");
        assert_eq!(focus(&s), Some(Focus::FlexRigid { conjunct: 1, guarded: false }));
        let (_, s, _) = setup(SIG, "sigma x\\ sigma y\\ (y = a => x = b)");
        assert_eq!(focus(&s), Some(Focus::FlexRigid { conjunct: 0, guarded: true }));
    }
}
