//! Declared primitive types, constants and signature eigenvariables.

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

use crate::name::Name;
use crate::term::TypeEnv;
use crate::types::{Type, FORMULA_TYPE};

/// Names that cannot be declared as constants or kinds.
pub const RESERVED: &[&str] = &["pi", "sigma", "kind", "type", "eigen", "goal", "o", "oo", "=", "=>", ":-", ","];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("`{0}` is reserved")]
    ReservedName(String),
    #[error("`{0}` is already declared")]
    Duplicate(String),
    #[error("unknown primitive type `{0}`")]
    UnknownType(String),
    #[error("eigenvariable `{0}` must have a primitive type")]
    NonPrimitiveEigen(String),
}

#[derive(Debug, Clone, Default)]
pub struct Signature {
    kinds: IndexSet<Name>,
    constants: IndexMap<Name, Type>,
    eigens: IndexMap<Name, Type>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn declare_kind(&mut self, name: &str) -> Result<(), SignatureError> {
        if RESERVED.contains(&name) {
            return Err(SignatureError::ReservedName(name.into()));
        }
        if !self.kinds.insert(Name::new(name)) {
            return Err(SignatureError::Duplicate(name.into()));
        }
        Ok(())
    }

    fn check_type(&self, ty: &Type) -> Result<(), SignatureError> {
        match ty {
            Type::Prim(n) if ty.is_formula() || self.kinds.contains(n) => Ok(()),
            Type::Prim(n) => Err(SignatureError::UnknownType(n.to_string())),
            Type::Arrow(d, c) => {
                self.check_type(d)?;
                self.check_type(c)
            }
        }
    }

    fn check_fresh(&self, name: &str) -> Result<(), SignatureError> {
        if RESERVED.contains(&name) {
            return Err(SignatureError::ReservedName(name.into()));
        }
        let n = Name::new(name);
        if self.constants.contains_key(&n) || self.eigens.contains_key(&n) {
            return Err(SignatureError::Duplicate(name.into()));
        }
        Ok(())
    }

    pub fn declare_const(&mut self, name: &str, ty: Type) -> Result<(), SignatureError> {
        self.check_fresh(name)?;
        self.check_type(&ty)?;
        self.constants.insert(Name::new(name), ty);
        Ok(())
    }

    pub fn declare_eigen(&mut self, name: &str, ty: Type) -> Result<(), SignatureError> {
        self.check_fresh(name)?;
        self.check_type(&ty)?;
        if !ty.is_prim() || ty.is_formula() {
            return Err(SignatureError::NonPrimitiveEigen(name.into()));
        }
        self.eigens.insert(Name::new(name), ty);
        Ok(())
    }

    pub fn has_kind(&self, name: &str) -> bool {
        name == FORMULA_TYPE || self.kinds.contains(&Name::new(name))
    }

    pub fn kinds(&self) -> impl Iterator<Item = &Name> {
        self.kinds.iter()
    }

    pub fn constants(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.constants.iter()
    }

    pub fn eigens(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.eigens.iter()
    }

    pub fn constant(&self, name: &Name) -> Option<&Type> {
        self.constants.get(name)
    }

    pub fn eigen(&self, name: &Name) -> Option<&Type> {
        self.eigens.get(name)
    }

    pub fn is_eigen(&self, name: &Name) -> bool {
        self.eigens.contains_key(name)
    }

    /// Constant whose target type is `o`.
    pub fn is_predicate(&self, name: &Name) -> bool {
        self.constants
            .get(name)
            .is_some_and(|ty| ty.target().is_formula())
    }
}

impl TypeEnv for Signature {
    fn const_type(&self, name: &Name) -> Option<Type> {
        self.constants.get(name).cloned()
    }

    fn eigen_type(&self, name: &Name) -> Option<Type> {
        self.eigens.get(name).cloned()
    }

    fn var_type(&self, _: &Name) -> Option<Type> {
        None
    }
}

/// A signature extended with typed logic variables and local eigenvariables.
pub struct Scope<'a> {
    pub sig: &'a Signature,
    pub vars: &'a [(Name, Type)],
    pub eigens: &'a [(Name, Type)],
    pub extra_eigens: &'a [(Name, Type)],
}

impl<'a> Scope<'a> {
    pub fn new(sig: &'a Signature, vars: &'a [(Name, Type)], eigens: &'a [(Name, Type)]) -> Self {
        Scope {
            sig,
            vars,
            eigens,
            extra_eigens: &[],
        }
    }
}

fn lookup(list: &[(Name, Type)], name: &Name) -> Option<Type> {
    list.iter().find(|(n, _)| n == name).map(|(_, t)| t.clone())
}

impl TypeEnv for Scope<'_> {
    fn const_type(&self, name: &Name) -> Option<Type> {
        self.sig.const_type(name)
    }

    fn eigen_type(&self, name: &Name) -> Option<Type> {
        lookup(self.eigens, name)
            .or_else(|| lookup(self.extra_eigens, name))
            .or_else(|| self.sig.eigen_type(name))
    }

    fn var_type(&self, name: &Name) -> Option<Type> {
        lookup(self.vars, name)
    }
}
