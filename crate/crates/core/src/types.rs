//! Simple types.

use std::fmt;
use std::sync::Arc;

use crate::name::Name;

/// Name of the primitive type of framework formulas.
pub const FORMULA_TYPE: &str = "o";

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Prim(Name),
    Arrow(Arc<Type>, Arc<Type>),
}

impl Type {
    pub fn prim(name: &str) -> Type {
        Type::Prim(Name::new(name))
    }

    pub fn o() -> Type {
        Type::prim(FORMULA_TYPE)
    }

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Arc::new(dom), Arc::new(cod))
    }

    /// `args[0] -> args[1] -> ... -> target`
    pub fn arrows<I>(args: I, target: Type) -> Type
    where
        I: IntoIterator<Item = Type>,
        I::IntoIter: DoubleEndedIterator,
    {
        args.into_iter()
            .rev()
            .fold(target, |acc, arg| Type::arrow(arg, acc))
    }

    pub fn is_prim(&self) -> bool {
        matches!(self, Type::Prim(_))
    }

    pub fn is_formula(&self) -> bool {
        matches!(self, Type::Prim(n) if n.base() == FORMULA_TYPE && n.is_source())
    }

    /// 0 for primitive types, `max(order(dom) + 1, order(cod))` for arrows.
    pub fn order(&self) -> usize {
        match self {
            Type::Prim(_) => 0,
            Type::Arrow(dom, cod) => (dom.order() + 1).max(cod.order()),
        }
    }

    /// Argument types and primitive target type.
    pub fn split(&self) -> (Vec<Type>, Type) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Type::Arrow(dom, cod) = cur {
            args.push((**dom).clone());
            cur = cod;
        }
        (args, cur.clone())
    }

    pub fn target(&self) -> &Type {
        let mut cur = self;
        while let Type::Arrow(_, cod) = cur {
            cur = cod;
        }
        cur
    }

    pub fn arity(&self) -> usize {
        let mut n = 0;
        let mut cur = self;
        while let Type::Arrow(_, cod) = cur {
            n += 1;
            cur = cod;
        }
        n
    }

    pub fn contains_formula(&self) -> bool {
        match self {
            Type::Prim(_) => self.is_formula(),
            Type::Arrow(dom, cod) => dom.contains_formula() || cod.contains_formula(),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Prim(n) => write!(f, "{n}"),
            Type::Arrow(dom, cod) => {
                if dom.is_prim() {
                    write!(f, "{dom} -> {cod}")
                } else {
                    write!(f, "({dom}) -> {cod}")
                }
            }
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat() -> Type {
        Type::prim("nat")
    }

    #[test]
    fn order_examples() {
        assert_eq!(nat().order(), 0);
        assert_eq!(Type::arrow(nat(), nat()).order(), 1);
        assert_eq!(Type::arrow(Type::arrow(nat(), nat()), nat()).order(), 2);
    }

    #[test]
    fn split_examples() {
        let i = Type::prim("i");
        assert_eq!(nat().split(), (vec![], nat()));
        let pred = Type::arrows([i.clone(), i.clone()], Type::o());
        assert_eq!(pred.split(), (vec![i.clone(), i.clone()], Type::o()));
        let ho = Type::arrow(Type::arrow(i.clone(), i.clone()), Type::o());
        assert_eq!(ho.split(), (vec![Type::arrow(i.clone(), i)], Type::o()));
    }

    #[test]
    fn display_is_right_associative() {
        let i = Type::prim("i");
        let t = Type::arrow(Type::arrow(i.clone(), i.clone()), Type::arrow(i.clone(), i));
        assert_eq!(t.to_string(), "(i -> i) -> i -> i");
    }

    fn arb_type() -> impl Strategy<Value = Type> {
        let leaf = prop_oneof![Just(Type::prim("i")), Just(Type::prim("nat")), Just(Type::o())];
        leaf.prop_recursive(4, 16, 2, |inner| {
            (inner.clone(), inner).prop_map(|(a, b)| Type::arrow(a, b))
        })
    }

    proptest! {
        #[test]
        fn split_round_trips(t in arb_type()) {
            let (args, target) = t.split();
            prop_assert!(target.is_prim());
            prop_assert_eq!(Type::arrows(args, target), t);
        }
    }
}
