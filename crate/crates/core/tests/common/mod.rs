//! Test oracles independent of the engine: a first-order prover for closed
//! atom-free goals, bounded enumeration of substitutions, and a generator of
//! random small goals.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::rngs::StdRng;
use rand::Rng;

use slim::state::normalize::Origin;
use slim::state::StateFormula;
use slim::syntax::parse_file;
use slim::term::term_eq;
use slim::{Goal, Name, Signature, Substitution, Term, Type};

pub fn i() -> Type {
    Type::prim("i")
}

pub fn signature(text: &str) -> Signature {
    parse_file(text).expect("test signature parses").program.sig
}

/// `a, b : i` and `f : i -> i`.
pub fn abf() -> Signature {
    signature("kind i type.\ntype a, b i.\ntype f i -> i.\n")
}

/// First-order terms; universals of the goal are unification variables.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Fo {
    Var(String),
    Fun(String, Vec<Fo>),
}

fn to_fo(t: &Term, universals: &BTreeSet<String>) -> Fo {
    let (head, args) = t.spine();
    let args: Vec<Fo> = args.into_iter().map(|a| to_fo(a, universals)).collect();
    match head {
        Term::Eigen(n) if universals.contains(&n.to_string()) => {
            assert!(args.is_empty(), "universal `{n}` applied to arguments");
            Fo::Var(n.to_string())
        }
        Term::Const(n) | Term::Eigen(n) => Fo::Fun(n.to_string(), args),
        other => panic!("oracle goal is not first-order at `{other}` in `{t}`"),
    }
}

fn walk(t: &Fo, s: &HashMap<String, Fo>) -> Fo {
    match t {
        Fo::Var(v) => match s.get(v) {
            Some(u) => walk(u, s),
            None => t.clone(),
        },
        Fo::Fun(f, args) => Fo::Fun(f.clone(), args.iter().map(|a| walk(a, s)).collect()),
    }
}

fn occurs(v: &str, t: &Fo) -> bool {
    match t {
        Fo::Var(w) => v == w,
        Fo::Fun(_, args) => args.iter().any(|a| occurs(v, a)),
    }
}

fn unify(a: &Fo, b: &Fo, s: &mut HashMap<String, Fo>) -> bool {
    let (a, b) = (walk(a, s), walk(b, s));
    match (&a, &b) {
        (Fo::Var(x), Fo::Var(y)) if x == y => true,
        (Fo::Var(x), t) | (t, Fo::Var(x)) => {
            if occurs(x, t) {
                return false;
            }
            s.insert(x.clone(), t.clone());
            true
        }
        (Fo::Fun(f, xs), Fo::Fun(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(x, y, s))
        }
    }
}

/// Provability of a closed goal without existentials or atoms: a guard is
/// discharged by its most general unifier, or holds outright when there is
/// none.
pub fn provable(g: &Goal) -> bool {
    fn go(g: &Goal, us: &mut BTreeSet<String>, s: &HashMap<String, Fo>) -> bool {
        match g {
            Goal::True => true,
            Goal::False => false,
            Goal::And(a, b) => go(a, us, s) && go(b, us, s),
            Goal::Forall(y, _, b) => {
                let fresh = us.insert(y.to_string());
                let r = go(b, us, s);
                if fresh {
                    us.remove(&y.to_string());
                }
                r
            }
            Goal::Eq(t, u, _) => walk(&to_fo(t, us), s) == walk(&to_fo(u, us), s),
            Goal::Guard(t, u, _, b) => {
                let mut s2 = s.clone();
                if unify(&to_fo(t, us), &to_fo(u, us), &mut s2) {
                    go(b, us, &s2)
                } else {
                    true
                }
            }
            Goal::Exists(..) | Goal::Atom(_) => panic!("oracle goal has an existential or an atom"),
        }
    }
    go(g, &mut BTreeSet::new(), &HashMap::new())
}

/// Terms of primitive type `i` up to `depth`, over `leaves` and the
/// first-order function constants of `sig`.
pub fn terms(sig: &Signature, leaves: &[Term], depth: usize) -> Vec<Term> {
    let funs: Vec<(Term, usize)> = sig
        .constants()
        .filter(|(_, ty)| !ty.is_prim() && ty.split().0.iter().all(|a| *a == i()) && *ty.target() == i())
        .map(|(n, ty)| (Term::Const(n.clone()), ty.arity()))
        .collect();
    let mut level: Vec<Term> = leaves.to_vec();
    for _ in 1..depth {
        let mut next = leaves.to_vec();
        for (f, n) in &funs {
            let mut tuples: Vec<Vec<Term>> = vec![vec![]];
            for _ in 0..*n {
                tuples = tuples
                    .into_iter()
                    .flat_map(|tu| {
                        level.iter().map(move |t| {
                            let mut v = tu.clone();
                            v.push(t.clone());
                            v
                        })
                    })
                    .collect();
            }
            next.extend(tuples.into_iter().map(|args| Term::apps(f.clone(), args)));
        }
        level = next;
    }
    level
}

fn constants_of_i(sig: &Signature) -> Vec<Term> {
    sig.constants()
        .filter(|(_, ty)| **ty == i())
        .map(|(n, _)| Term::Const(n.clone()))
        .collect()
}

/// Closed λ-terms of type `i -> .. -> i` whose bodies have depth at most
/// `depth` and mention constants, the universals `scope`, and the λ-bound
/// arguments.
pub fn bindings(sig: &Signature, ty: &Type, scope: &[Name], depth: usize) -> Vec<Term> {
    let (args, target) = ty.split();
    assert_eq!(target, i(), "bindings only at target type i");
    let k = args.len() as u32;
    let mut leaves = constants_of_i(sig);
    leaves.extend(scope.iter().map(|y| Term::Eigen(y.clone())));
    leaves.extend((0..k).rev().map(Term::Bound));
    terms(sig, &leaves, depth)
        .into_iter()
        .map(|body| Term::lams(args.clone(), body))
        .collect()
}

/// Existentials with the universals in scope at their binder.
pub fn existentials(g: &Goal) -> Vec<(Name, Type, Vec<Name>)> {
    fn go(g: &Goal, scope: &mut Vec<Name>, out: &mut Vec<(Name, Type, Vec<Name>)>) {
        match g {
            Goal::Exists(x, ty, b) => {
                out.push((x.clone(), ty.clone(), scope.clone()));
                go(b, scope, out);
            }
            Goal::Forall(y, _, b) => {
                scope.push(y.clone());
                go(b, scope, out);
                scope.pop();
            }
            Goal::And(a, b) => {
                go(a, scope, out);
                go(b, scope, out);
            }
            Goal::Guard(_, _, _, b) => go(b, scope, out),
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(g, &mut Vec::new(), &mut out);
    out
}

/// Replace each existential binder by its binding.
pub fn instantiate(g: &Goal, theta: &[(Name, Term)]) -> Goal {
    match g {
        Goal::Exists(x, ty, b) => match theta.iter().find(|(n, _)| n == x) {
            Some((_, t)) => instantiate(&b.subst_var(x, t), theta),
            None => Goal::exists(x.clone(), ty.clone(), instantiate(b, theta)),
        },
        Goal::Forall(y, ty, b) => Goal::forall(y.clone(), ty.clone(), instantiate(b, theta)),
        Goal::And(a, b) => Goal::and(instantiate(a, theta), instantiate(b, theta)),
        Goal::Guard(t, s, ty, b) => Goal::guard(t.clone(), s.clone(), ty.clone(), instantiate(b, theta)),
        _ => g.clone(),
    }
}

fn product(choices: &[Vec<Term>]) -> Vec<Vec<Term>> {
    let mut out: Vec<Vec<Term>> = vec![vec![]];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|tu| {
                c.iter().map(move |t| {
                    let mut v = tu.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect();
    }
    out
}

pub type Solution = Vec<(Name, Term)>;

/// Every substitution for the existentials of `g` with bindings of body
/// depth at most `depth` that makes `g` provable.
pub fn brute_solutions(sig: &Signature, g: &Goal, depth: usize) -> Vec<Solution> {
    let exs = existentials(g);
    let choices: Vec<Vec<Term>> = exs
        .iter()
        .map(|(_, ty, scope)| bindings(sig, ty, scope, depth))
        .collect();
    product(&choices)
        .into_iter()
        .map(|ts| exs.iter().map(|(x, _, _)| x.clone()).zip(ts).collect::<Solution>())
        .filter(|theta| provable(&instantiate(g, theta)))
        .collect()
}

/// Brute-force solutions of a state formula, read back through `origins`
/// as substitutions for the source existentials.
pub fn brute_state_solutions(sig: &Signature, s: &StateFormula, origins: &[Origin], depth: usize) -> Vec<Solution> {
    let g = s.to_goal(sig);
    let choices: Vec<Vec<Term>> = origins
        .iter()
        .map(|o| {
            let arity = o.scope.len();
            let raised = Type::arrows(std::iter::repeat(i()).take(arity), o.ty.clone());
            let all = bindings(sig, &raised, &[], depth);
            // bodies are over the arguments only, exactly the image of the
            // source enumeration under raising
            all
        })
        .collect();
    product(&choices)
        .into_iter()
        .filter(|hs| {
            let theta: Solution = origins.iter().map(|o| o.raised.clone()).zip(hs.iter().cloned()).collect();
            provable(&instantiate(&g, &theta))
        })
        .map(|hs| {
            origins
                .iter()
                .zip(hs)
                .map(|(o, h)| {
                    let args = o.scope.iter().map(|y| Term::Eigen(y.clone()));
                    (o.var.clone(), h.apply_normal(args))
                })
                .collect()
        })
        .collect()
}

pub fn same_solution(a: &Solution, b: &Solution) -> bool {
    a.len() == b.len()
        && a.iter().all(|(x, t)| b.iter().any(|(y, u)| x == y && term_eq(t, u)))
}

/// Solutions of `a` missing from `b`.
pub fn missing<'a>(a: &'a [Solution], b: &[Solution]) -> Vec<&'a Solution> {
    a.iter().filter(|s| !b.iter().any(|t| same_solution(s, t))).collect()
}

/// `theta` is an instance of `sol`: some closed instantiation of the
/// residual variables `free` (bodies of depth at most `depth`) makes `sol`
/// agree with `theta` on every variable of `theta`.
pub fn instance_of(sig: &Signature, theta: &Solution, sol: &Substitution, free: &[(Name, Type)], depth: usize) -> bool {
    let choices: Vec<Vec<Term>> = free.iter().map(|(_, ty)| bindings(sig, ty, &[], depth)).collect();
    product(&choices).into_iter().any(|ts| {
        let mut rho = Substitution::new();
        for ((x, ty), t) in free.iter().zip(ts) {
            rho.insert(x.clone(), ty.clone(), t);
        }
        theta.iter().all(|(x, t)| match sol.get(x) {
            Some(b) => term_eq(&rho.apply(&b.term), t),
            None => true,
        })
    })
}

/// Random goals over `a, b, f`: at most two existentials of type `i` or
/// `i -> i`, terms of depth at most 3, no atoms.
pub struct GoalGen<'r> {
    rng: &'r mut StdRng,
    exists_left: usize,
    names: usize,
}

impl<'r> GoalGen<'r> {
    pub fn new(rng: &'r mut StdRng) -> Self {
        GoalGen {
            rng,
            exists_left: 2,
            names: 0,
        }
    }

    fn fresh(&mut self, base: &str) -> Name {
        self.names += 1;
        Name::new(&format!("{base}{}", self.names))
    }

    fn term(&mut self, depth: usize, us: &[Name], xs: &[(Name, bool)]) -> Term {
        let leafy = depth <= 1 || self.rng.gen_bool(0.4);
        if leafy {
            let n = 2 + us.len() + xs.iter().filter(|(_, hi)| !hi).count();
            let k = self.rng.gen_range(0..n);
            return match k {
                0 => Term::cnst("a"),
                1 => Term::cnst("b"),
                k if k - 2 < us.len() => Term::Eigen(us[k - 2].clone()),
                k => {
                    let firsts: Vec<&Name> = xs.iter().filter(|(_, hi)| !hi).map(|(x, _)| x).collect();
                    Term::Var(firsts[k - 2 - us.len()].clone())
                }
            };
        }
        let his: Vec<Name> = xs.iter().filter(|(_, hi)| *hi).map(|(x, _)| x.clone()).collect();
        if !his.is_empty() && self.rng.gen_bool(0.5) {
            let h = his[self.rng.gen_range(0..his.len())].clone();
            Term::app(Term::Var(h), self.term(depth - 1, us, xs))
        } else {
            Term::app(Term::cnst("f"), self.term(depth - 1, us, xs))
        }
    }

    fn goal(&mut self, budget: usize, us: &mut Vec<Name>, xs: &mut Vec<(Name, bool)>) -> Goal {
        let pick = if budget == 0 { 0 } else { self.rng.gen_range(0..10) };
        match pick {
            0..=2 => {
                if self.rng.gen_bool(0.1) {
                    return if self.rng.gen_bool(0.5) { Goal::True } else { Goal::False };
                }
                let d1 = self.rng.gen_range(1..=3);
                let d2 = self.rng.gen_range(1..=3);
                Goal::Eq(self.term(d1, us, xs), self.term(d2, us, xs), i())
            }
            3 | 4 => {
                let y = self.fresh("y");
                us.push(y.clone());
                let b = self.goal(budget - 1, us, xs);
                us.pop();
                Goal::forall(y, i(), b)
            }
            5 | 6 if self.exists_left > 0 => {
                self.exists_left -= 1;
                let x = self.fresh("x");
                let hi = self.rng.gen_bool(0.35);
                let ty = if hi { Type::arrow(i(), i()) } else { i() };
                xs.push((x.clone(), hi));
                let b = self.goal(budget - 1, us, xs);
                xs.pop();
                Goal::exists(x, ty, b)
            }
            7 => {
                let a = self.goal(budget / 2, us, xs);
                let b = self.goal(budget / 2, us, xs);
                Goal::and(a, b)
            }
            _ => {
                let d1 = self.rng.gen_range(1..=2);
                let d2 = self.rng.gen_range(1..=3);
                let (t, s) = (self.term(d1, us, xs), self.term(d2, us, xs));
                let b = self.goal(budget - 1, us, xs);
                Goal::guard(t, s, i(), b)
            }
        }
    }

    /// A closed goal; the root is wrapped in at least one existential when
    /// `with_exists` holds.
    pub fn generate(&mut self, with_exists: bool) -> Goal {
        loop {
            self.exists_left = 2;
            let g = self.goal(6, &mut Vec::new(), &mut Vec::new());
            if !with_exists || g.has_exists() {
                return g;
            }
        }
    }
}
