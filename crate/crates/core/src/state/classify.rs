//! Classification of reduced states and of target equalities.

use crate::name::Name;
use crate::signature::Signature;
use crate::state::{GuardedGoal, StateFormula, Target};
use crate::term::{term_eq, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Success,
    Failure,
    Active,
    SuspendedCandidate,
}

/// One side of a target equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side<'a> {
    Rigid(&'a Term),
    Flex(&'a Name),
    /// Headed by a universal that the guards may still instantiate.
    Stuck,
}

/// A universal is rigid in a target only while no guard mentions it.
pub fn side<'a>(c: &GuardedGoal, t: &'a Term) -> Side<'a> {
    match t.head() {
        h @ Term::Const(_) => Side::Rigid(h),
        h @ Term::Eigen(n) if !c.is_universal(n) || !c.guards_mention(n) => Side::Rigid(h),
        Term::Var(x) => Side::Flex(x),
        _ => Side::Stuck,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetStep {
    Identical,
    Decompose,
    Clash,
    /// `flex_left` tells which side is flexible.
    FlexRigid { flex_left: bool },
    None,
}

pub fn target_step(c: &GuardedGoal, t: &Term, s: &Term) -> TargetStep {
    if term_eq(t, s) {
        return TargetStep::Identical;
    }
    match (side(c, t), side(c, s)) {
        (Side::Rigid(a), Side::Rigid(b)) if a == b => TargetStep::Decompose,
        (Side::Rigid(_), Side::Rigid(_)) => TargetStep::Clash,
        (Side::Flex(_), Side::Rigid(_)) => TargetStep::FlexRigid { flex_left: true },
        (Side::Rigid(_), Side::Flex(_)) => TargetStep::FlexRigid { flex_left: false },
        // only projections can apply against a universal the guards mention
        (Side::Flex(_), Side::Stuck) => TargetStep::FlexRigid { flex_left: true },
        (Side::Stuck, Side::Flex(_)) => TargetStep::FlexRigid { flex_left: false },
        _ => TargetStep::None,
    }
}

/// Whether a conjunct admits some transition.
pub fn conjunct_is_active(c: &GuardedGoal) -> bool {
    match &c.target {
        Target::Atom(_) => true,
        Target::Eq(t, s) => target_step(c, t, s) != TargetStep::None,
        Target::False | Target::True => false,
    }
}

pub fn conjunct_fails(c: &GuardedGoal) -> bool {
    c.guards.is_empty() && c.target == Target::False
}

pub fn classify(s: &StateFormula) -> Classification {
    if s.conjuncts.is_empty() {
        Classification::Success
    } else if s.conjuncts.iter().any(conjunct_fails) {
        Classification::Failure
    } else if s.conjuncts.iter().any(conjunct_is_active) {
        Classification::Active
    } else {
        Classification::SuspendedCandidate
    }
}

/// Signature eigenvariables and constants may be imitated; universals may
/// not, since existentials cannot mention them.
pub fn imitable(sig: &Signature, head: &Term) -> bool {
    match head {
        Term::Const(_) => true,
        Term::Eigen(n) => sig.is_eigen(n),
        _ => false,
    }
}
