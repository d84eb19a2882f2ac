//! Bounded backtracking search with iterative deepening on path length.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use crate::formula::{check_goal, Goal, Program};
use crate::name::{Name, NameSupply};
use crate::state::classify::{classify, Classification};
use crate::state::normalize::{normalize_goal, Origin};
use crate::state::{reduce, StateFormula, Target};
use crate::subst::Substitution;
use crate::syntax::print::state_to_string;
use crate::term::Term;
use crate::types::Type;

use super::transitions::{focus, focused_transitions, StepKind, Transition};
use super::EngineError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Longest transition path explored.
    pub max_transitions: usize,
    /// Backchaining steps along one path.
    pub max_backchain_depth: usize,
    /// Nested imitations along one variable lineage.
    pub max_imitation_per_var: usize,
    pub occurs_check_pruning: bool,
    pub max_solutions: usize,
    /// States visited over all deepening rounds.
    pub max_nodes: usize,
    pub trace: bool,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            max_transitions: 500,
            max_backchain_depth: 500,
            max_imitation_per_var: 16,
            occurs_check_pruning: true,
            max_solutions: 1,
            max_nodes: 200_000,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Transitions,
    Backchain,
    Imitation,
    Nodes,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::Transitions => "max-transitions",
            Bound::Backchain => "max-backchain",
            Bound::Imitation => "max-imitation",
            Bound::Nodes => "max-nodes",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub kind: StepKind,
    pub conjunct: usize,
    pub label: Substitution,
    /// FNV-1a of the printed canonical next state.
    pub hash: u64,
}

#[derive(Debug, Clone)]
pub enum OutcomeKind {
    /// `theta` binds every existential of the goal. Unconstrained parts are
    /// logic variables `X1`, `X2`, ... listed in `free`.
    Solution {
        theta: Substitution,
        free: Vec<(Name, Type)>,
    },
    /// A state admitting no transition, or a guarded state on which the
    /// search branched, with the substitution accumulated so far.
    Suspended {
        state: StateFormula,
        theta: Substitution,
        free: Vec<(Name, Type)>,
    },
    Exhausted(Vec<Bound>),
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub trace: Option<Vec<TraceStep>>,
}

impl Outcome {
    pub fn solution(&self) -> Option<&Substitution> {
        match &self.kind {
            OutcomeKind::Solution { theta, .. } => Some(theta),
            _ => None,
        }
    }

    pub fn is_suspended(&self) -> bool {
        matches!(self.kind, OutcomeKind::Suspended { .. })
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self.kind, OutcomeKind::Exhausted(_))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub transitions: usize,
    pub nodes: usize,
    /// Failed states plus pruned imitations.
    pub pruned: usize,
    pub rounds: usize,
    /// Path bound of the last round.
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    /// The goal's reduced normal form.
    pub initial: StateFormula,
    /// Raised variable of each source existential in `initial`.
    pub origins: Vec<Origin>,
    pub outcomes: Vec<Outcome>,
    pub stats: SearchStats,
}

impl SearchReport {
    pub fn solutions(&self) -> impl Iterator<Item = &Substitution> {
        self.outcomes.iter().filter_map(Outcome::solution)
    }

    pub fn suspended(&self) -> impl Iterator<Item = &Outcome> {
        self.outcomes.iter().filter(|o| o.is_suspended())
    }

    pub fn exhausted(&self) -> bool {
        self.outcomes.iter().any(Outcome::is_exhausted)
    }
}

pub fn fnv1a(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn state_hash(s: &StateFormula) -> u64 {
    fnv1a(&state_to_string(&s.canonical()))
}

/// Persistent path of trace steps, newest first.
struct Link {
    step: TraceStep,
    prev: Option<Rc<Link>>,
}

/// A conjunct `guards => ff` whose guard variables occur in no target can
/// never be discharged: transitions instantiate only through targets. Every
/// descendant is then suspended at best.
fn frozen(s: &StateFormula) -> bool {
    let mut in_targets = BTreeSet::new();
    for c in &s.conjuncts {
        match &c.target {
            Target::Eq(t, u) => {
                t.collect_vars(&mut in_targets);
                u.collect_vars(&mut in_targets);
            }
            Target::Atom(a) => a.collect_vars(&mut in_targets),
            Target::False | Target::True => {}
        }
    }
    s.conjuncts.iter().any(|c| {
        matches!(c.target, Target::False) && !c.guards.is_empty() && {
            let mut vs = BTreeSet::new();
            for (t, u) in &c.guards {
                t.collect_vars(&mut vs);
                u.collect_vars(&mut vs);
            }
            vs.is_disjoint(&in_targets)
        }
    })
}

fn trace_of(mut link: Option<&Rc<Link>>) -> Vec<TraceStep> {
    let mut out = Vec::new();
    while let Some(l) = link {
        out.push(l.step.clone());
        link = l.prev.as_ref();
    }
    out.reverse();
    out
}

#[derive(Clone)]
struct Node {
    state: StateFormula,
    rho: Substitution,
    len: usize,
    backchains: usize,
    /// Nesting of imitations that produced each variable.
    lineage: Rc<HashMap<Name, usize>>,
    trace: Option<Rc<Link>>,
    /// An ancestor was emitted as a suspended residue; it covers this node.
    covered: bool,
}

/// `θ(x)` for each source existential: its raised variable under `rho`,
/// applied back to the source universals. Remaining logic variables are
/// renamed `X1`, `X2`, ... in order of appearance; the renaming is
/// returned alongside.
fn extract(
    origins: &[Origin],
    rho: &Substitution,
    types: &[(Name, Type)],
) -> (Substitution, Vec<(Name, Type)>, Vec<(Name, Name)>) {
    let mut raw = Vec::new();
    for o in origins {
        let args = o.scope.iter().map(|y| Term::Eigen(y.clone()));
        let t = rho.apply(&Term::Var(o.raised.clone())).apply_normal(args);
        raw.push((o, t));
    }
    let mut order = Vec::new();
    for (_, t) in &raw {
        t.vars_in_order(&mut order);
    }
    let mut seen = HashSet::new();
    order.retain(|v| seen.insert(v.clone()));
    let mut rename = Substitution::new();
    let mut free = Vec::new();
    let mut pairs = Vec::new();
    for (k, v) in order.iter().enumerate() {
        let ty = types
            .iter()
            .find(|(n, _)| n == v)
            .map(|(_, t)| t.clone())
            .unwrap_or_else(Type::o);
        let fresh = Name::new(&format!("X{}", k + 1));
        rename.insert(v.clone(), ty.clone(), Term::Var(fresh.clone()));
        free.push((fresh.clone(), ty));
        pairs.push((v.clone(), fresh));
    }
    let mut theta = Substitution::new();
    for (o, t) in raw {
        theta.insert(o.var.clone(), o.ty.clone(), rename.apply(&t));
    }
    (theta, free, pairs)
}

struct Searcher<'a> {
    prog: &'a Program,
    cfg: &'a SearchConfig,
    origins: Vec<Origin>,
    supply: NameSupply,
    outcomes: Vec<Outcome>,
    seen_suspended: HashSet<String>,
    stats: SearchStats,
    cut: HashSet<Bound>,
    stop: bool,
}

impl Searcher<'_> {
    fn solutions(&self) -> usize {
        self.outcomes.iter().filter(|o| o.solution().is_some()).count()
    }

    fn emit_solution(&mut self, node: &Node) {
        let (theta, free, _) = extract(&self.origins, &node.rho, &node.state.existentials);
        if self.outcomes.iter().filter_map(Outcome::solution).any(|s| s.equiv(&theta)) {
            return;
        }
        self.outcomes.push(Outcome {
            kind: OutcomeKind::Solution { theta, free },
            trace: self.cfg.trace.then(|| trace_of(node.trace.as_ref())),
        });
        if self.solutions() >= self.cfg.max_solutions {
            self.stop = true;
        }
    }

    fn emit_suspended(&mut self, node: &Node) {
        let (theta, free, pairs) = extract(&self.origins, &node.rho, &node.state.existentials);
        let mut state = node.state.clone();
        for (v, fresh) in &pairs {
            if let Some(ty) = state.existential_type(v).cloned() {
                state = state.instantiate(v, &Term::Var(fresh.clone()), &[(fresh.clone(), ty)]);
            }
        }
        let key = format!(
            "{} | {}",
            state_to_string(&state.canonical()),
            crate::syntax::print::subst_to_string(&theta)
        );
        if !self.seen_suspended.insert(key) {
            return;
        }
        self.outcomes.push(Outcome {
            kind: OutcomeKind::Suspended { state, theta, free },
            trace: self.cfg.trace.then(|| trace_of(node.trace.as_ref())),
        });
    }

    fn child(&self, node: &Node, t: Transition) -> Result<Node, Bound> {
        let mut backchains = node.backchains;
        let mut lineage = Rc::clone(&node.lineage);
        match t.kind {
            StepKind::Backchain(_) => {
                backchains += 1;
                if backchains > self.cfg.max_backchain_depth {
                    return Err(Bound::Backchain);
                }
            }
            StepKind::Imitate => {
                let (x, _) = t.label.iter().next().expect("imitation binds one variable");
                let depth = node.lineage.get(x).copied().unwrap_or(0) + 1;
                if depth > self.cfg.max_imitation_per_var {
                    return Err(Bound::Imitation);
                }
                let known: HashSet<&Name> = node.state.existentials.iter().map(|(n, _)| n).collect();
                let mut map = (*node.lineage).clone();
                for (n, _) in &t.next.existentials {
                    if !known.contains(n) {
                        map.insert(n.clone(), depth);
                    }
                }
                lineage = Rc::new(map);
            }
            _ => {}
        }
        let trace = if self.cfg.trace {
            Some(Rc::new(Link {
                step: TraceStep {
                    kind: t.kind,
                    conjunct: t.conjunct,
                    label: t.label.clone(),
                    hash: state_hash(&t.next),
                },
                prev: node.trace.clone(),
            }))
        } else {
            None
        };
        Ok(Node {
            rho: node.rho.compose(&t.label),
            state: t.next,
            len: node.len + 1,
            backchains,
            lineage,
            trace,
            covered: node.covered,
        })
    }

    /// Depth-first search with paths of at most `limit` transitions.
    fn round(&mut self, root: &Node, limit: usize) {
        let mut stack = vec![root.clone()];
        while let Some(node) = stack.pop() {
            if self.stop {
                return;
            }
            self.stats.nodes += 1;
            if self.stats.nodes > self.cfg.max_nodes {
                self.cut.insert(Bound::Nodes);
                self.stop = true;
                return;
            }
            match classify(&node.state) {
                Classification::Success => self.emit_solution(&node),
                Classification::Failure => self.stats.pruned += 1,
                Classification::SuspendedCandidate if node.covered => {}
                Classification::SuspendedCandidate => self.emit_suspended(&node),
                Classification::Active if frozen(&node.state) => {
                    self.stats.pruned += 1;
                    if !node.covered {
                        self.emit_suspended(&node);
                    }
                }
                Classification::Active => {
                    if node.len >= limit {
                        self.cut.insert(Bound::Transitions);
                        continue;
                    }
                    let Some(f) = focus(&node.state) else {
                        unreachable!("active states have a focus")
                    };
                    let guarded = f.is_guarded();
                    if guarded && !node.covered {
                        self.emit_suspended(&node);
                    }
                    let (ts, pruned) =
                        focused_transitions(self.prog, &node.state, f, self.cfg.occurs_check_pruning, &self.supply);
                    if pruned {
                        self.stats.pruned += 1;
                    }
                    self.stats.transitions += ts.len();
                    let mut children = Vec::with_capacity(ts.len());
                    for t in ts {
                        match self.child(&node, t) {
                            Ok(mut c) => {
                                c.covered = node.covered || guarded;
                                children.push(c)
                            }
                            Err(b) => {
                                self.cut.insert(b);
                            }
                        }
                    }
                    stack.extend(children.into_iter().rev());
                }
            }
        }
    }
}

/// Search for solutions of a closed, well-formed goal.
pub fn search(prog: &Program, g: &Goal, cfg: &SearchConfig) -> Result<SearchReport, EngineError> {
    let violations = check_goal(&prog.sig, g);
    if !violations.is_empty() {
        return Err(EngineError::IllFormed(violations));
    }
    let supply = NameSupply::new();
    let norm = normalize_goal(g, &supply);
    let initial = reduce(&norm.state, &supply);
    let root = Node {
        state: initial.clone(),
        rho: Substitution::new(),
        len: 0,
        backchains: 0,
        lineage: Rc::new(HashMap::new()),
        trace: None,
        covered: false,
    };
    let mut s = Searcher {
        prog,
        cfg,
        origins: norm.origins,
        supply,
        outcomes: Vec::new(),
        seen_suspended: HashSet::new(),
        stats: SearchStats::default(),
        cut: HashSet::new(),
        stop: cfg.max_solutions == 0,
    };
    let mut limit = cfg.max_transitions.min(16);
    loop {
        s.cut.clear();
        s.stats.rounds += 1;
        s.stats.depth = limit;
        s.round(&root, limit);
        if s.stop || !s.cut.contains(&Bound::Transitions) || limit >= cfg.max_transitions {
            break;
        }
        limit = (limit * 2).min(cfg.max_transitions);
    }
    let full = s.solutions() >= cfg.max_solutions;
    if !s.cut.is_empty() && !full {
        let mut bounds: Vec<Bound> = s.cut.iter().copied().collect();
        bounds.sort();
        s.outcomes.push(Outcome {
            kind: OutcomeKind::Exhausted(bounds),
            trace: None,
        });
    }
    Ok(SearchReport {
        initial,
        origins: s.origins,
        outcomes: s.outcomes,
        stats: s.stats,
    })
}
