//! Concrete syntax.
//!
//! ```text
//! kind tm, fm type.                 % primitive types
//! type eq tm -> tm -> fm.           % constants; `oo` is accepted for `o`
//! eigen c tm.                       % signature eigenvariables
//! seq Gam C :- mnr (eq S T) Gam Del, (S = T) => seq Del C.
//! goal refl : pi x\ x = x.
//! ```
//!
//! Loosest to tightest: `:-`, `,` (left), `=>` (right, equality on the left),
//! `=`, `::` (right), application. `x\ body` and `x:T\ body` extend as far
//! right as possible.

pub mod lexer;
pub mod parser;
pub mod print;

use thiserror::Error;

use crate::formula::{Clause, Goal, Program, Violation};
use crate::name::Name;
use crate::signature::SignatureError;
use crate::types::Type;

pub use lexer::Pos;
pub use parser::{parse_file, parse_goal, parse_substitution, parse_term};
pub use print::{goal_to_string, state_to_string, subst_to_string, term_to_string};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: undeclared constant `{name}`")]
    UndeclaredConstant { pos: Pos, name: String },
    #[error("{pos}: `{name}` is reserved")]
    ReservedName { pos: Pos, name: String },
    #[error("{pos}: type mismatch: {msg}")]
    TypeMismatch { pos: Pos, msg: String },
    #[error("{pos}: goal mentions free variable `{name}`")]
    OpenGoal { pos: Pos, name: String },
    #[error("{pos}: {err}")]
    Signature { pos: Pos, err: SignatureError },
    #[error("{pos}: {}", join(.violations))]
    IllFormed { pos: Pos, violations: Vec<Violation> },
    #[error("`{name}` is not an existential variable of the goal")]
    UnknownExistential { name: String },
}

fn join(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone)]
pub enum Decl {
    Kind(Name),
    Type(Vec<Name>, Type),
    Eigen(Vec<Name>, Type),
    /// Index into the program's clauses.
    Clause(usize),
    /// Index into the named goals.
    Goal(usize),
}

#[derive(Debug, Clone)]
pub struct NamedGoal {
    pub name: String,
    pub goal: Goal,
}

#[derive(Debug, Clone, Default)]
pub struct SourceFile {
    pub decls: Vec<Decl>,
    pub program: Program,
    pub goals: Vec<NamedGoal>,
}

impl SourceFile {
    pub fn goal(&self, name: &str) -> Option<&Goal> {
        self.goals.iter().find(|g| g.name == name).map(|g| &g.goal)
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.program.clauses
    }
}
