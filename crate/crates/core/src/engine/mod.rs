//! The transition system, bounded search, and solution checking.

pub mod decide;
pub mod search;
pub mod transitions;

use thiserror::Error;

use crate::formula::Violation;
use crate::name::Name;

pub use decide::{check_solution, decide_existential_free, existential_scopes, Verdict};
pub use search::{search, Bound, Outcome, OutcomeKind, SearchConfig, SearchReport, SearchStats, TraceStep};
pub use transitions::{backchain_transitions, transitions, unify_transitions, StepKind, Transition};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("`{eigen}` is not in scope for `{var}`")]
    ScopeViolation { var: Name, eigen: Name },
    #[error("ill-formed goal: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    IllFormed(Vec<Violation>),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}
