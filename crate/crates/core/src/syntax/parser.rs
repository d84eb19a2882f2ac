//! Recursive-descent parser with simple type inference.
//!
//! Parsing yields an untyped tree; elaboration infers the types of binders,
//! clause variables and equalities by unification, then builds typed terms
//! and goals. Types left unconstrained default to the first declared kind.

use std::collections::HashMap;

use crate::formula::{check_clause, check_goal, Clause, Goal};
use crate::name::Name;
use crate::signature::{Signature, RESERVED};
use crate::subst::Substitution;
use crate::syntax::lexer::{tokenize, Pos, Tok, Token};
use crate::syntax::{Decl, NamedGoal, ParseError, SourceFile};
use crate::term::Term;
use crate::types::{Type, FORMULA_TYPE};

const CONS: &str = "::";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Comma,
    Implies,
    Equals,
    Cons,
}

#[derive(Debug, Clone)]
enum Ast {
    Name(String, Pos),
    App(Box<Ast>, Box<Ast>),
    /// Binder with node id for its inferred type.
    Lam(usize, String, Option<Type>, Box<Ast>, Pos),
    /// Binary operator with node id (used for the type of `=`).
    Bin(usize, Op, Box<Ast>, Box<Ast>, Pos),
}

impl Ast {
    fn pos(&self) -> Pos {
        match self {
            Ast::Name(_, p) | Ast::Lam(_, _, _, _, p) | Ast::Bin(_, _, _, _, p) => *p,
            Ast::App(f, _) => f.pos(),
        }
    }

    fn spine(&self) -> (&Ast, Vec<&Ast>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Ast::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    at: usize,
    sig: &'a Signature,
    next_id: usize,
}

fn is_var_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_uppercase() || c == '_')
}

impl<'a> Parser<'a> {
    fn new(text: &str, sig: &'a Signature) -> Result<Parser<'a>, ParseError> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
            sig,
            next_id: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn id(&mut self) -> usize {
        self.next_id += 1;
        self.next_id
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().pos)
        } else {
            self.err(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.bump().pos;
                Ok((s, pos))
            }
            other => self.err(format!("expected an identifier, found {other}")),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let dom = match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                t
            }
            Tok::Ident(s) => {
                let pos = self.bump().pos;
                if s == "o" || s == "oo" {
                    Type::o()
                } else if self.sig.has_kind(&s) {
                    Type::prim(&s)
                } else {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: format!("unknown type `{s}`"),
                    });
                }
            }
            other => return self.err(format!("expected a type, found {other}")),
        };
        if *self.peek() == Tok::Arrow {
            self.bump();
            Ok(Type::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn formula(&mut self) -> Result<Ast, ParseError> {
        let mut l = self.implication()?;
        while *self.peek() == Tok::Comma {
            let pos = self.bump().pos;
            let r = self.implication()?;
            let id = self.id();
            l = Ast::Bin(id, Op::Comma, Box::new(l), Box::new(r), pos);
        }
        Ok(l)
    }

    fn implication(&mut self) -> Result<Ast, ParseError> {
        let l = self.equation()?;
        if *self.peek() == Tok::Implies {
            let pos = self.bump().pos;
            if !matches!(l, Ast::Bin(_, Op::Equals, ..)) {
                return Err(ParseError::Syntax {
                    pos,
                    msg: "the left of `=>` must be an equation".into(),
                });
            }
            let r = self.implication()?;
            let id = self.id();
            return Ok(Ast::Bin(id, Op::Implies, Box::new(l), Box::new(r), pos));
        }
        Ok(l)
    }

    fn equation(&mut self) -> Result<Ast, ParseError> {
        let l = self.cons()?;
        if *self.peek() == Tok::Equals {
            let pos = self.bump().pos;
            let r = self.cons()?;
            let id = self.id();
            return Ok(Ast::Bin(id, Op::Equals, Box::new(l), Box::new(r), pos));
        }
        Ok(l)
    }

    fn cons(&mut self) -> Result<Ast, ParseError> {
        let l = self.application()?;
        if *self.peek() == Tok::Cons {
            let pos = self.bump().pos;
            let r = self.cons()?;
            let id = self.id();
            return Ok(Ast::Bin(id, Op::Cons, Box::new(l), Box::new(r), pos));
        }
        Ok(l)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen)
    }

    fn application(&mut self) -> Result<Ast, ParseError> {
        let mut f = self.atom()?;
        if matches!(f, Ast::Lam(..)) {
            return Ok(f);
        }
        while self.starts_atom() {
            let a = self.atom()?;
            let lam = matches!(a, Ast::Lam(..));
            f = Ast::App(Box::new(f), Box::new(a));
            if lam {
                break;
            }
        }
        Ok(f)
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) => {
                let binder = matches!(self.peek_at(1), Tok::Backslash)
                    || (matches!(self.peek_at(1), Tok::Colon) && !matches!(self.peek_at(2), Tok::Eof));
                let pos = self.bump().pos;
                if !binder {
                    return Ok(Ast::Name(s, pos));
                }
                if RESERVED.contains(&s.as_str()) {
                    return Err(ParseError::ReservedName { pos, name: s });
                }
                let ann = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.ty()?)
                } else {
                    None
                };
                self.expect(Tok::Backslash)?;
                let body = self.formula()?;
                let id = self.id();
                Ok(Ast::Lam(id, s, ann, Box::new(body), pos))
            }
            other => self.err(format!("unexpected {other}")),
        }
    }

    /// A formula optionally followed by `.`, then end of input.
    fn whole_formula(&mut self) -> Result<Ast, ParseError> {
        let f = self.formula()?;
        if *self.peek() == Tok::Dot {
            self.bump();
        }
        self.expect(Tok::Eof)?;
        Ok(f)
    }
}

// ---------------------------------------------------------------------------
// Elaboration

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ty {
    Meta(usize),
    Prim(Name),
    Arrow(Box<Ty>, Box<Ty>),
}

impl Ty {
    fn of(t: &Type) -> Ty {
        match t {
            Type::Prim(n) => Ty::Prim(n.clone()),
            Type::Arrow(d, c) => Ty::Arrow(Box::new(Ty::of(d)), Box::new(Ty::of(c))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Capitalized names are clause variables.
    Clause,
    /// Closed goal: capitalized free names are errors.
    Goal,
    /// Capitalized free names are logic variables (don't-cares).
    Open,
}

#[derive(Debug, Clone)]
enum Bind {
    /// λ-bound, resolved to a de Bruijn index at build time.
    Lam(usize),
    Forall(Name),
    Exists(Name),
}

#[derive(Debug, Clone)]
struct Local {
    name: String,
    bind: Bind,
    ty: Ty,
}

struct Elab<'a> {
    sig: &'a Signature,
    mode: Mode,
    metas: Vec<Option<Ty>>,
    /// Type of each `Lam` and `Bin(Equals)` node.
    node_ty: HashMap<usize, Ty>,
    free: Vec<(String, Ty)>,
    anon: HashMap<(u32, u32), String>,
    /// Eigenvariables in scope that are not bound in the text.
    outer_eigens: Vec<(Name, Type)>,
}

impl<'a> Elab<'a> {
    fn new(sig: &'a Signature, mode: Mode) -> Elab<'a> {
        Elab {
            sig,
            mode,
            metas: Vec::new(),
            node_ty: HashMap::new(),
            free: Vec::new(),
            anon: HashMap::new(),
            outer_eigens: Vec::new(),
        }
    }

    fn fresh(&mut self) -> Ty {
        self.metas.push(None);
        Ty::Meta(self.metas.len() - 1)
    }

    fn walk(&self, t: &Ty) -> Ty {
        match t {
            Ty::Meta(m) => match &self.metas[*m] {
                Some(b) => self.walk(b),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn occurs(&self, m: usize, t: &Ty) -> bool {
        match self.walk(t) {
            Ty::Meta(k) => k == m,
            Ty::Prim(_) => false,
            Ty::Arrow(d, c) => self.occurs(m, &d) || self.occurs(m, &c),
        }
    }

    fn show(&self, t: &Ty) -> String {
        match self.walk(t) {
            Ty::Meta(m) => format!("?{m}"),
            Ty::Prim(n) => n.to_string(),
            Ty::Arrow(d, c) => {
                let d = self.walk(&d);
                if matches!(d, Ty::Arrow(..)) {
                    format!("({}) -> {}", self.show(&d), self.show(&c))
                } else {
                    format!("{} -> {}", self.show(&d), self.show(&c))
                }
            }
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty, pos: Pos) -> Result<(), ParseError> {
        let (a, b) = (self.walk(a), self.walk(b));
        match (&a, &b) {
            (Ty::Meta(x), Ty::Meta(y)) if x == y => Ok(()),
            (Ty::Meta(x), other) | (other, Ty::Meta(x)) => {
                if self.occurs(*x, other) {
                    return self.mismatch(&a, &b, pos);
                }
                self.metas[*x] = Some(other.clone());
                Ok(())
            }
            (Ty::Prim(x), Ty::Prim(y)) if x == y => Ok(()),
            (Ty::Arrow(d1, c1), Ty::Arrow(d2, c2)) => {
                self.unify(d1, d2, pos)?;
                self.unify(c1, c2, pos)
            }
            _ => self.mismatch(&a, &b, pos),
        }
    }

    fn mismatch(&self, a: &Ty, b: &Ty, pos: Pos) -> Result<(), ParseError> {
        Err(ParseError::TypeMismatch {
            pos,
            msg: format!("cannot match {} with {}", self.show(a), self.show(b)),
        })
    }

    fn default_kind(&self, pos: Pos) -> Result<Type, ParseError> {
        match self.sig.kinds().next() {
            Some(k) => Ok(Type::Prim(k.clone())),
            None => Err(ParseError::TypeMismatch {
                pos,
                msg: "cannot determine a type and no kind is declared".into(),
            }),
        }
    }

    fn resolve(&self, t: &Ty, pos: Pos) -> Result<Type, ParseError> {
        match self.walk(t) {
            Ty::Meta(_) => self.default_kind(pos),
            Ty::Prim(n) => Ok(Type::Prim(n)),
            Ty::Arrow(d, c) => Ok(Type::arrow(self.resolve(&d, pos)?, self.resolve(&c, pos)?)),
        }
    }

    fn quantifier<'b>(&self, ast: &'b Ast, locals: &[Local]) -> Option<(bool, &'b Ast)> {
        if let Ast::App(f, body) = ast {
            if let Ast::Name(q, _) = &**f {
                if (q == "pi" || q == "sigma") && !locals.iter().any(|l| l.name == *q) {
                    return Some((q == "pi", body));
                }
            }
        }
        None
    }

    fn anon_name(&mut self, pos: Pos) -> String {
        let n = self.anon.len();
        self.anon
            .entry((pos.line, pos.col))
            .or_insert_with(|| format!("_{}", n + 1))
            .clone()
    }

    // -- inference ---------------------------------------------------------

    fn infer_formula(&mut self, ast: &Ast, locals: &mut Vec<Local>) -> Result<(), ParseError> {
        if let Some((is_pi, body)) = self.quantifier(ast, locals) {
            let Ast::Lam(id, x, ann, inner, pos) = body else {
                return Err(ParseError::Syntax {
                    pos: body.pos(),
                    msg: "a quantifier expects an abstraction `x\\ ...`".into(),
                });
            };
            let ty = match ann {
                Some(t) => Ty::of(t),
                None => self.fresh(),
            };
            self.node_ty.insert(*id, ty.clone());
            let bind = if is_pi {
                Bind::Forall(Name::new(x))
            } else {
                Bind::Exists(Name::new(x))
            };
            let _ = pos;
            locals.push(Local {
                name: x.clone(),
                bind,
                ty,
            });
            let r = self.infer_formula(inner, locals);
            locals.pop();
            return r;
        }
        match ast {
            Ast::Bin(_, Op::Comma, l, r, _) => {
                self.infer_formula(l, locals)?;
                self.infer_formula(r, locals)
            }
            Ast::Bin(_, Op::Implies, l, r, _) => {
                self.infer_formula(l, locals)?;
                self.infer_formula(r, locals)
            }
            Ast::Bin(id, Op::Equals, l, r, pos) => {
                let a = self.infer_term(l, locals)?;
                let b = self.infer_term(r, locals)?;
                self.unify(&a, &b, *pos)?;
                self.node_ty.insert(*id, a);
                Ok(())
            }
            Ast::Name(s, _) if (s == "tt" || s == "ff") && !locals.iter().any(|l| l.name == *s) => Ok(()),
            _ => {
                let t = self.infer_term(ast, locals)?;
                self.unify(&t, &Ty::Prim(Name::new(FORMULA_TYPE)), ast.pos())
            }
        }
    }

    fn infer_name(&mut self, s: &str, pos: Pos, locals: &[Local]) -> Result<Ty, ParseError> {
        if let Some(l) = locals.iter().rev().find(|l| l.name == s) {
            return Ok(l.ty.clone());
        }
        if is_var_name(s) && self.mode != Mode::Goal {
            let key = if s == "_" { self.anon_name(pos) } else { s.to_string() };
            if let Some((_, t)) = self.free.iter().find(|(n, _)| *n == key) {
                return Ok(t.clone());
            }
            let t = self.fresh();
            self.free.push((key, t.clone()));
            return Ok(t);
        }
        let n = Name::new(s);
        if let Some(t) = self.sig.constant(&n) {
            return Ok(Ty::of(t));
        }
        if let Some(t) = self.sig.eigen(&n) {
            return Ok(Ty::of(t));
        }
        if let Some((_, t)) = self.outer_eigens.iter().find(|(e, _)| *e == n) {
            return Ok(Ty::of(t));
        }
        if RESERVED.contains(&s) {
            return Err(ParseError::ReservedName {
                pos,
                name: s.to_string(),
            });
        }
        if is_var_name(s) {
            return Err(ParseError::OpenGoal {
                pos,
                name: s.to_string(),
            });
        }
        Err(ParseError::UndeclaredConstant {
            pos,
            name: s.to_string(),
        })
    }

    fn infer_term(&mut self, ast: &Ast, locals: &mut Vec<Local>) -> Result<Ty, ParseError> {
        match ast {
            Ast::Name(s, pos) => self.infer_name(s, *pos, locals),
            Ast::App(f, a) => {
                let tf = self.infer_term(f, locals)?;
                let ta = self.infer_term(a, locals)?;
                let r = self.fresh();
                self.unify(&tf, &Ty::Arrow(Box::new(ta), Box::new(r.clone())), a.pos())?;
                Ok(r)
            }
            Ast::Lam(id, x, ann, body, _) => {
                let ty = match ann {
                    Some(t) => Ty::of(t),
                    None => self.fresh(),
                };
                self.node_ty.insert(*id, ty.clone());
                locals.push(Local {
                    name: x.clone(),
                    bind: Bind::Lam(0),
                    ty: ty.clone(),
                });
                let tb = self.infer_term(body, locals);
                locals.pop();
                Ok(Ty::Arrow(Box::new(ty), Box::new(tb?)))
            }
            Ast::Bin(_, Op::Cons, l, r, pos) => {
                let cons = self.infer_name(CONS, *pos, locals)?;
                let tl = self.infer_term(l, locals)?;
                let tr = self.infer_term(r, locals)?;
                let res = self.fresh();
                let want = Ty::Arrow(
                    Box::new(tl),
                    Box::new(Ty::Arrow(Box::new(tr), Box::new(res.clone()))),
                );
                self.unify(&cons, &want, *pos)?;
                Ok(res)
            }
            Ast::Bin(_, _, _, _, pos) => Err(ParseError::Syntax {
                pos: *pos,
                msg: "formula connective inside a term".into(),
            }),
        }
    }

    // -- construction ------------------------------------------------------

    fn build_formula(&self, ast: &Ast, locals: &mut Vec<Local>, lam_depth: usize) -> Result<Goal, ParseError> {
        if let Some((is_pi, body)) = self.quantifier(ast, locals) {
            let Ast::Lam(id, x, _, inner, pos) = body else {
                unreachable!("checked during inference")
            };
            let ty = self.resolve(&self.node_ty[id], *pos)?;
            let n = Name::new(x);
            let bind = if is_pi {
                Bind::Forall(n.clone())
            } else {
                Bind::Exists(n.clone())
            };
            locals.push(Local {
                name: x.clone(),
                bind,
                ty: Ty::of(&ty),
            });
            let g = self.build_formula(inner, locals, lam_depth);
            locals.pop();
            let g = g?;
            return Ok(if is_pi {
                Goal::forall(n, ty, g)
            } else {
                Goal::exists(n, ty, g)
            });
        }
        match ast {
            Ast::Bin(_, Op::Comma, l, r, _) => Ok(Goal::and(
                self.build_formula(l, locals, lam_depth)?,
                self.build_formula(r, locals, lam_depth)?,
            )),
            Ast::Bin(_, Op::Implies, l, r, _) => {
                let Goal::Eq(t, s, ty) = self.build_formula(l, locals, lam_depth)? else {
                    unreachable!("checked by the parser")
                };
                Ok(Goal::guard(t, s, ty, self.build_formula(r, locals, lam_depth)?))
            }
            Ast::Bin(id, Op::Equals, l, r, pos) => {
                let ty = self.resolve(&self.node_ty[id], *pos)?;
                let t = self.build_term(l, locals, 0)?;
                let s = self.build_term(r, locals, 0)?;
                Ok(Goal::Eq(t, s, ty))
            }
            Ast::Name(s, _) if s == "tt" && !locals.iter().any(|l| l.name == *s) => Ok(Goal::True),
            Ast::Name(s, _) if s == "ff" && !locals.iter().any(|l| l.name == *s) => Ok(Goal::False),
            _ => {
                let (head, _) = ast.spine();
                let is_pred = matches!(head, Ast::Name(h, _)
                    if !locals.iter().any(|l| l.name == *h) && self.sig.is_predicate(&Name::new(h)));
                if !is_pred {
                    return Err(ParseError::Syntax {
                        pos: ast.pos(),
                        msg: "expected a formula (an atom needs a predicate head)".into(),
                    });
                }
                Ok(Goal::Atom(self.build_term(ast, locals, 0)?))
            }
        }
    }

    /// `lams` counts λ binders entered inside the current term.
    fn build_term(&self, ast: &Ast, locals: &mut Vec<Local>, lams: usize) -> Result<Term, ParseError> {
        match ast {
            Ast::Name(s, pos) => {
                if let Some((i, l)) = locals.iter().enumerate().rev().find(|(_, l)| l.name == *s) {
                    return Ok(match &l.bind {
                        Bind::Lam(level) => {
                            let _ = i;
                            Term::Bound((lams - 1 - level) as u32)
                        }
                        Bind::Forall(n) => Term::Eigen(n.clone()),
                        Bind::Exists(n) => Term::Var(n.clone()),
                    });
                }
                if is_var_name(s) && self.mode != Mode::Goal {
                    let key = if s == "_" {
                        self.anon[&(pos.line, pos.col)].clone()
                    } else {
                        s.clone()
                    };
                    return Ok(Term::Var(Name::new(&key)));
                }
                let n = Name::new(s);
                if self.sig.constant(&n).is_some() {
                    Ok(Term::Const(n))
                } else {
                    Ok(Term::Eigen(n))
                }
            }
            Ast::App(f, a) => Ok(Term::app(
                self.build_term(f, locals, lams)?,
                self.build_term(a, locals, lams)?,
            )),
            Ast::Lam(id, x, _, body, pos) => {
                let ty = self.resolve(&self.node_ty[id], *pos)?;
                locals.push(Local {
                    name: x.clone(),
                    bind: Bind::Lam(lams),
                    ty: Ty::of(&ty),
                });
                let b = self.build_term(body, locals, lams + 1);
                locals.pop();
                Ok(Term::lam(ty, b?))
            }
            Ast::Bin(_, Op::Cons, l, r, _) => Ok(Term::apps(
                Term::cnst(CONS),
                [self.build_term(l, locals, lams)?, self.build_term(r, locals, lams)?],
            )),
            Ast::Bin(_, _, _, _, pos) => Err(ParseError::Syntax {
                pos: *pos,
                msg: "formula connective inside a term".into(),
            }),
        }
    }

    fn free_vars(&self, pos: Pos) -> Result<Vec<(Name, Type)>, ParseError> {
        self.free
            .iter()
            .map(|(n, t)| Ok((Name::new(n), self.resolve(t, pos)?)))
            .collect()
    }
}

fn clause(sig: &Signature, head: &Ast, body: Option<&Ast>) -> Result<Clause, ParseError> {
    let mut e = Elab::new(sig, Mode::Clause);
    let mut locals = Vec::new();
    e.infer_formula(head, &mut locals)?;
    if let Some(b) = body {
        e.infer_formula(b, &mut locals)?;
    }
    let head_goal = e.build_formula(head, &mut locals, 0)?;
    let Goal::Atom(head_term) = head_goal else {
        return Err(ParseError::Syntax {
            pos: head.pos(),
            msg: "a clause head must be an atom".into(),
        });
    };
    let body = match body {
        Some(b) => e.build_formula(b, &mut locals, 0)?,
        None => Goal::True,
    };
    let d = Clause {
        universals: e.free_vars(head.pos())?,
        head: head_term.beta_normalize(),
        body,
    };
    let violations = check_clause(sig, &d);
    if !violations.is_empty() {
        return Err(ParseError::IllFormed {
            pos: head.pos(),
            violations,
        });
    }
    Ok(d)
}

fn goal_from_ast(sig: &Signature, ast: &Ast) -> Result<Goal, ParseError> {
    let mut e = Elab::new(sig, Mode::Goal);
    let mut locals = Vec::new();
    e.infer_formula(ast, &mut locals)?;
    let g = e.build_formula(ast, &mut locals, 0)?;
    let g = beta_goal(&g);
    let violations = check_goal(sig, &g);
    if !violations.is_empty() {
        return Err(ParseError::IllFormed {
            pos: ast.pos(),
            violations,
        });
    }
    Ok(g)
}

fn beta_goal(g: &Goal) -> Goal {
    match g {
        Goal::True | Goal::False => g.clone(),
        Goal::Atom(a) => Goal::Atom(a.beta_normalize()),
        Goal::And(a, b) => Goal::and(beta_goal(a), beta_goal(b)),
        Goal::Exists(x, t, b) => Goal::exists(x.clone(), t.clone(), beta_goal(b)),
        Goal::Forall(x, t, b) => Goal::forall(x.clone(), t.clone(), beta_goal(b)),
        Goal::Eq(t, s, ty) => Goal::Eq(t.beta_normalize(), s.beta_normalize(), ty.clone()),
        Goal::Guard(t, s, ty, b) => Goal::guard(t.beta_normalize(), s.beta_normalize(), ty.clone(), beta_goal(b)),
    }
}

fn names(p: &mut Parser<'_>) -> Result<Vec<(String, Pos)>, ParseError> {
    let mut out = Vec::new();
    loop {
        let item = if *p.peek() == Tok::Cons {
            (CONS.to_string(), p.bump().pos)
        } else {
            p.ident()?
        };
        out.push(item);
        if *p.peek() == Tok::Comma {
            p.bump();
        } else {
            return Ok(out);
        }
    }
}

pub fn parse_file(text: &str) -> Result<SourceFile, ParseError> {
    let mut file = SourceFile::default();
    let toks = tokenize(text)?;
    let mut at = 0usize;
    loop {
        let sig = file.program.sig.clone();
        let mut p = Parser {
            toks: toks.clone(),
            at,
            sig: &sig,
            next_id: 0,
        };
        let keyword = match p.peek() {
            Tok::Eof => break,
            Tok::Ident(s) => s.clone(),
            _ => String::new(),
        };
        match keyword.as_str() {
            "kind" => {
                p.bump();
                let ns = names(&mut p)?;
                let (t, pos) = p.ident()?;
                if t != "type" {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: "expected `type` after kind names".into(),
                    });
                }
                p.expect(Tok::Dot)?;
                for (n, pos) in ns {
                    file.program
                        .sig
                        .declare_kind(&n)
                        .map_err(|err| ParseError::Signature { pos, err })?;
                    file.decls.push(Decl::Kind(Name::new(&n)));
                }
            }
            "type" | "eigen" => {
                p.bump();
                let ns = names(&mut p)?;
                let ty = p.ty()?;
                p.expect(Tok::Dot)?;
                for (n, pos) in &ns {
                    let r = if keyword == "type" {
                        file.program.sig.declare_const(n, ty.clone())
                    } else {
                        file.program.sig.declare_eigen(n, ty.clone())
                    };
                    r.map_err(|err| ParseError::Signature { pos: *pos, err })?;
                }
                let ns = ns.iter().map(|(n, _)| Name::new(n)).collect();
                file.decls.push(if keyword == "type" {
                    Decl::Type(ns, ty)
                } else {
                    Decl::Eigen(ns, ty)
                });
            }
            "goal" if matches!(p.peek_at(2), Tok::Colon) => {
                p.bump();
                let (name, _) = p.ident()?;
                p.expect(Tok::Colon)?;
                let f = p.formula()?;
                p.expect(Tok::Dot)?;
                let goal = goal_from_ast(&sig, &f)?;
                file.decls.push(Decl::Goal(file.goals.len()));
                file.goals.push(NamedGoal { name, goal });
            }
            _ => {
                let head = p.formula()?;
                let body = if *p.peek() == Tok::Turnstile {
                    p.bump();
                    Some(p.formula()?)
                } else {
                    None
                };
                p.expect(Tok::Dot)?;
                let d = clause(&sig, &head, body.as_ref())?;
                file.decls.push(Decl::Clause(file.program.clauses.len()));
                file.program.clauses.push(d);
            }
        }
        at = p.at;
    }
    Ok(file)
}

/// A closed goal over `sig`; a trailing `.` is optional.
pub fn parse_goal(text: &str, sig: &Signature) -> Result<Goal, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let ast = p.whole_formula()?;
    goal_from_ast(sig, &ast)
}

/// A term whose free eigenvariables are `eigens`; capitalized free names
/// become logic variables. Returns the term, its type and those variables.
pub fn parse_term(
    text: &str,
    sig: &Signature,
    eigens: &[(Name, Type)],
    expected: Option<&Type>,
) -> Result<(Term, Type, Vec<(Name, Type)>), ParseError> {
    let mut p = Parser::new(text, sig)?;
    let ast = p.application_or_cons()?;
    p.expect(Tok::Eof)?;
    let mut e = Elab::new(sig, Mode::Open);
    e.outer_eigens = eigens.to_vec();
    let mut locals = Vec::new();
    let ty = e.infer_term(&ast, &mut locals)?;
    if let Some(want) = expected {
        e.unify(&ty, &Ty::of(want), ast.pos())?;
    }
    let t = e.build_term(&ast, &mut locals, 0)?.beta_normalize();
    let ty = e.resolve(&ty, ast.pos())?;
    Ok((t, ty, e.free_vars(ast.pos())?))
}

impl Parser<'_> {
    fn application_or_cons(&mut self) -> Result<Ast, ParseError> {
        self.cons()
    }
}

/// Universals in scope at each existential of `g`, by source name.
fn existential_scopes(g: &Goal) -> Vec<(Name, Type, Vec<(Name, Type)>)> {
    fn go(g: &Goal, scope: &mut Vec<(Name, Type)>, out: &mut Vec<(Name, Type, Vec<(Name, Type)>)>) {
        match g {
            Goal::Exists(x, ty, b) => {
                out.push((x.clone(), ty.clone(), scope.clone()));
                go(b, scope, out);
            }
            Goal::Forall(y, ty, b) => {
                scope.push((y.clone(), ty.clone()));
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

/// `x := t; y := s` for existentials of `goal`. Each term may mention the
/// universals in scope at its variable; capitalized free names are
/// don't-care logic variables.
pub fn parse_substitution(text: &str, sig: &Signature, goal: &Goal) -> Result<Substitution, ParseError> {
    let scopes = existential_scopes(goal);
    let mut theta = Substitution::new();
    let text = text.trim().trim_end_matches('.');
    for part in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let Some((lhs, rhs)) = part.split_once(":=") else {
            return Err(ParseError::Syntax {
                pos: Pos::default(),
                msg: format!("expected `x := term` in `{part}`"),
            });
        };
        let x = lhs.trim();
        let Some((name, ty, scope)) = scopes.iter().find(|(n, _, _)| n.to_string() == x) else {
            return Err(ParseError::UnknownExistential { name: x.to_string() });
        };
        let (t, _, _) = parse_term(rhs, sig, scope, Some(ty))?;
        theta.insert(name.clone(), ty.clone(), t);
    }
    Ok(theta)
}
