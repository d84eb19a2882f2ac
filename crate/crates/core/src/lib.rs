//! Proof search for a higher-order logic-programming framework in which
//! equality is a logical connective.
//!
//! Goals are normalized into state formulas `∃h̄. ⋀ ∀ȳ. guards ⊃ target`,
//! guard equalities are reduced away, and a labeled transition system of
//! backchaining and pre-unification steps searches for substitutions for
//! the existentials.

pub mod engine;
pub mod formula;
pub mod name;
pub mod signature;
pub mod state;
pub mod subst;
pub mod syntax;
pub mod term;
pub mod types;

pub use formula::{Clause, Goal, Program};
pub use name::{Name, NameSupply};
pub use signature::Signature;
pub use state::{GuardedGoal, StateFormula, Target};
pub use subst::Substitution;
pub use term::Term;
pub use types::Type;
