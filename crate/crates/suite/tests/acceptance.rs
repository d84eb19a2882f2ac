//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;

use common::*;
use slim::engine::{
    backchain_transitions, check_solution, decide_existential_free, search, OutcomeKind, SearchConfig, SearchReport,
    StepKind, Verdict,
};
use slim::state::normalize::normalize_goal;
use slim::state::reduce;
use slim::syntax::{parse_file, parse_goal, state_to_string, term_to_string, SourceFile};
use slim::term::term_eq;
use slim::{Goal, Name, NameSupply, StateFormula, Substitution, Term, Type};

/// Random goals per property suite.
const RANDOM_GOALS: u64 = 200;
/// Seed of the first random goal; goal `k` uses `SEED + k`.
const SEED: u64 = 0x5eed;
/// Body depth of brute-force bindings.
const BRUTE_DEPTH: usize = 3;
/// Body depth of instantiations tried for don't-care variables.
const INSTANCE_DEPTH: usize = 3;
const COMPLETENESS_BUDGET: Duration = Duration::from_secs(300);

type Check = Result<String, String>;

fn corpus(file: &str) -> SourceFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(file);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_file(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn cfg(max_transitions: usize, max_solutions: usize) -> SearchConfig {
    SearchConfig {
        max_transitions,
        max_solutions,
        ..SearchConfig::default()
    }
}

fn run(f: &SourceFile, g: &Goal, cfg: &SearchConfig) -> Result<SearchReport, String> {
    search(&f.program, g, cfg).map_err(|e| e.to_string())
}

fn binding_of(theta: &Substitution, x: &str) -> Option<Term> {
    theta.get(&Name::new(x)).map(|b| b.term.clone())
}

fn show(theta: &Substitution) -> String {
    slim::syntax::subst_to_string(theta)
}

/// Existentials renamed by order of first occurrence, then canonical
/// binder names.
fn by_occurrence(s: &StateFormula) -> String {
    let mut order = Vec::new();
    for c in &s.conjuncts {
        for (t, u) in &c.guards {
            t.vars_in_order(&mut order);
            u.vars_in_order(&mut order);
        }
        match &c.target {
            slim::Target::Eq(t, u) => {
                t.vars_in_order(&mut order);
                u.vars_in_order(&mut order);
            }
            slim::Target::Atom(a) => a.vars_in_order(&mut order),
            _ => {}
        }
    }
    let mut sorted = s.clone();
    sorted.existentials.sort_by_key(|(x, _)| order.iter().position(|y| y == x).unwrap_or(usize::MAX));
    state_to_string(&sorted.canonical())
}

fn criterion_1() -> Check {
    let f = corpus("examples/ex-one.slim");
    let g = f.goal("ex_one").unwrap();
    let report = run(&f, g, &SearchConfig { trace: true, ..cfg(500, 10) })?;
    let sols: Vec<_> = report.outcomes.iter().filter(|o| o.solution().is_some()).collect();
    if sols.len() != 1 {
        return Err(format!("{} solutions", sols.len()));
    }
    let theta = sols[0].solution().unwrap();
    if !binding_of(theta, "x").is_some_and(|t| term_eq(&t, &Term::eigen("u"))) {
        return Err(format!("solution {}", show(theta)));
    }
    let mut rho = Substitution::new();
    for step in sols[0].trace.as_ref().unwrap() {
        rho = rho.compose(&step.label);
    }
    let (h, _) = &report.initial.existentials[0];
    let raised = rho.apply(&Term::Var(h.clone()));
    let expected_raised = parse_term_closed(&f, "w1\\ w2\\ w1", &fun_type("i", 2))?;
    if !term_eq(&raised, &expected_raised) {
        return Err(format!("raised binding {}", term_to_string(&raised)));
    }
    let expected = parse_goal("sigma h:i -> i -> i\\ h a b = a, pi v\\ h b v = b", &f.program.sig).map_err(|e| e.to_string())?;
    let expected = normalize_goal(&expected, &NameSupply::new()).state;
    let (got, want) = (by_occurrence(&report.initial), by_occurrence(&expected));
    if got != want {
        return Err(format!("state {got}, expected {want}"));
    }
    Ok(format!("x := u, raised {}, state {got}", term_to_string(&raised)))
}

fn fun_type(base: &str, arity: usize) -> Type {
    Type::arrows(std::iter::repeat(Type::prim(base)).take(arity), Type::prim(base))
}

fn parse_term_closed(f: &SourceFile, text: &str, ty: &Type) -> Result<Term, String> {
    let (t, _, _) = slim::syntax::parse_term(text, &f.program.sig, &[], Some(ty)).map_err(|e| e.to_string())?;
    Ok(t)
}

fn criterion_2() -> Check {
    let expected = ["g x1 x2", "g a x2", "g x1 a", "g a a"];
    let mut details = Vec::new();
    let mut ok = true;
    for file in ["empty.slim", "examples/four-solutions.slim"] {
        let f = corpus(file);
        let g = f.goal("four_solutions").unwrap();
        let report = run(&f, g, &cfg(200, 100))?;
        let us: Vec<Term> = report.solutions().filter_map(|t| binding_of(t, "u")).collect();
        let want: Vec<Term> = expected
            .iter()
            .map(|t| parse_term_open(&f, t))
            .collect::<Result<_, _>>()?;
        let same = us.len() == want.len() && want.iter().all(|w| us.iter().any(|u| term_eq(u, w)));
        ok &= same;
        let oracle = brute_solutions(&f.program.sig, g, 2).len();
        details.push(format!(
            "{file}: {} solutions ({}), oracle {oracle}",
            us.len(),
            us.iter().map(term_to_string).collect::<Vec<_>>().join(", ")
        ));
    }
    if ok {
        Ok(details.join("; "))
    } else {
        Err(format!("expected exactly {{{}}}; {}", expected.join(", "), details.join("; ")))
    }
}

fn parse_term_open(f: &SourceFile, text: &str) -> Result<Term, String> {
    let i = Type::prim("i");
    let eigens = [(Name::new("x1"), i.clone()), (Name::new("x2"), i.clone())];
    let (t, _, _) = slim::syntax::parse_term(text, &f.program.sig, &eigens, Some(&i)).map_err(|e| e.to_string())?;
    Ok(t)
}

fn criterion_3() -> Check {
    let peano = corpus("peano.slim");
    let mut seen = Vec::new();
    for name in ["reflexivity", "symmetry", "transitivity", "injectivity", "zero_not_succ"] {
        let r = decide_existential_free(peano.goal(name).unwrap()).map_err(|e| e.to_string())?;
        if !r {
            return Err(format!("{name} decided false"));
        }
        seen.push(format!("{name} true"));
    }
    let empty = corpus("empty.slim");
    let r = decide_existential_free(empty.goal("distinct").unwrap()).map_err(|e| e.to_string())?;
    if r {
        return Err("a = b decided true".into());
    }
    seen.push("a = b false".into());
    Ok(seen.join(", "))
}

fn criterion_4() -> Check {
    let f = corpus("examples/reduced-form.slim");
    let report = run(&f, f.goal("h_a").unwrap(), &cfg(500, 100))?;
    let hs: Vec<Term> = report.solutions().filter_map(|t| binding_of(t, "h")).collect();
    let want = [parse_term_closed(&f, "w\\ w", &fun_type("i", 1))?, parse_term_closed(&f, "w\\ a", &fun_type("i", 1))?];
    let printed = hs.iter().map(term_to_string).collect::<Vec<_>>().join(", ");
    if report.exhausted() {
        return Err(format!("search was cut off; found {printed}"));
    }
    if hs.len() == 2 && want.iter().all(|w| hs.iter().any(|h| term_eq(h, w))) {
        Ok(format!("exactly {printed}"))
    } else {
        Err(format!("found {printed}"))
    }
}

fn criterion_5() -> Check {
    let f = corpus("eqlj1.slim");
    let goal_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/examples/exists-right.goal");
    let g = parse_goal(&std::fs::read_to_string(goal_path).unwrap(), &f.program.sig).map_err(|e| e.to_string())?;

    // golden backchaining step with the existential-introduction clause
    let supply = NameSupply::new();
    let start = reduce(&normalize_goal(&g, &supply).state, &supply);
    let exists_r = f
        .program
        .clauses
        .iter()
        .position(|d| slim::syntax::print::clause_to_string(d).contains("(exists C)"))
        .ok_or("no existential-introduction clause")?;
    let step = backchain_transitions(&f.program, &start, &supply)
        .into_iter()
        .find(|t| t.kind == StepKind::Backchain(exists_r))
        .ok_or("clause did not apply")?;
    let expected = parse_goal(
        "sigma x:tm -> tm\\ sigma G:tm -> fmlist\\ sigma C:tm -> tm -> fm\\ sigma t:tm -> tm\\ \
         (pi y\\ y = x y => atom (p y) :: nil = G y), \
         (pi y\\ y = x y => exists (w\\ atom (p w)) = exists (C y)), \
         (pi y\\ y = x y => seq (G y) (C y (t y)))",
        &f.program.sig,
    )
    .map_err(|e| e.to_string())?;
    let expected = normalize_goal(&expected, &NameSupply::new()).state;
    let (got, want) = (by_occurrence(&step.next), by_occurrence(&expected));
    if got != want {
        return Err(format!("after backchaining: {got}; expected {want}"));
    }

    // full search
    let report = run(&f, &g, &cfg(500, 5))?;
    let tm_tm = fun_type("tm", 1);
    let identity = parse_term_closed(&f, "u\\ u", &tm_tm)?;
    // witness: every don't-care of type tm -> tm instantiated to the identity
    let hit = report.outcomes.iter().find_map(|o| match &o.kind {
        OutcomeKind::Solution { theta, free } => {
            let mut rho = Substitution::new();
            for (v, ty) in free.iter().filter(|(_, ty)| *ty == tm_tm) {
                rho.insert(v.clone(), ty.clone(), identity.clone());
            }
            binding_of(theta, "x")
                .is_some_and(|t| term_eq(&rho.apply(&t), &identity))
                .then(|| show(theta))
        }
        _ => None,
    });
    let Some(found) = hit else {
        return Err(format!("no solution covers x := u\\ u ({} outcomes)", report.outcomes.len()));
    };
    let mut theta = Substitution::new();
    theta.insert(Name::new("x"), tm_tm, identity);
    let verdict = check_solution(&f.program, &g, &theta, &SearchConfig::default()).map_err(|e| e.to_string())?;
    if verdict != Verdict::Verified {
        return Err(format!("check of x := u\\ u gave {verdict}"));
    }
    Ok(format!(
        "3-conjunct state matches; solution {found} covers x := u\\ u, verified; {} transitions",
        report.stats.transitions
    ))
}

fn criterion_6() -> Check {
    let sig = abf();
    let program = slim::Program::new(sig.clone());
    let mut emitted = 0;
    let mut failures = Vec::new();
    for k in 0..RANDOM_GOALS {
        let mut rng = StdRng::seed_from_u64(SEED + k);
        let g = GoalGen::new(&mut rng).generate(true);
        let report = search(&program, &g, &cfg(500, 20)).map_err(|e| format!("goal {k}: {e}"))?;
        for o in &report.outcomes {
            let OutcomeKind::Solution { theta, free } = &o.kind else { continue };
            emitted += 1;
            let verdict = check_solution(&program, &g, theta, &SearchConfig::default()).map_err(|e| e.to_string())?;
            let oracle_ok = all_instances_provable(&sig, &g, theta, free);
            if verdict != Verdict::Verified || !oracle_ok {
                failures.push(format!("goal {k} {}: {} / oracle {oracle_ok}", slim::syntax::goal_to_string(&g), show(theta)));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{RANDOM_GOALS} goals, {emitted} solutions, all verified"))
    } else {
        Err(format!("{} unverified: {}", failures.len(), failures.join(" | ")))
    }
}

/// Every closed instance of `theta`, with don't-cares drawn from bindings
/// of depth 2, makes `g` provable by the oracle.
fn all_instances_provable(sig: &slim::Signature, g: &Goal, theta: &Substitution, free: &[(Name, Type)]) -> bool {
    let choices: Vec<Vec<Term>> = free.iter().map(|(_, ty)| bindings(sig, ty, &[], 2)).collect();
    let mut idx = vec![0usize; choices.len()];
    loop {
        let mut rho = Substitution::new();
        for (((x, ty), c), &j) in free.iter().zip(&choices).zip(&idx) {
            rho.insert(x.clone(), ty.clone(), c[j].clone());
        }
        let closed: Solution = theta.iter().map(|(x, b)| (x.clone(), rho.apply(&b.term))).collect();
        if !provable(&instantiate(g, &closed)) {
            return false;
        }
        // odometer over the choice vectors
        let mut d = 0;
        loop {
            if d == idx.len() {
                return true;
            }
            idx[d] += 1;
            if idx[d] < choices[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn criterion_7() -> Check {
    let sig = abf();
    let program = slim::Program::new(sig.clone());
    let started = Instant::now();
    let (mut total, mut by_solution, mut by_suspended) = (0, 0, 0);
    let mut missed = Vec::new();
    for k in 0..RANDOM_GOALS {
        let mut rng = StdRng::seed_from_u64(SEED + k);
        let g = GoalGen::new(&mut rng).generate(true);
        let brute = brute_solutions(&sig, &g, BRUTE_DEPTH);
        if brute.is_empty() {
            continue;
        }
        let report = search(&program, &g, &cfg(2000, 1000)).map_err(|e| format!("goal {k}: {e}"))?;
        for theta in &brute {
            total += 1;
            let covered = |want_solution: bool| {
                report.outcomes.iter().any(|o| match &o.kind {
                    OutcomeKind::Solution { theta: s, free } if want_solution => {
                        instance_of(&sig, theta, s, free, INSTANCE_DEPTH)
                    }
                    OutcomeKind::Suspended { theta: s, free, .. } if !want_solution => {
                        instance_of(&sig, theta, s, free, INSTANCE_DEPTH)
                    }
                    _ => false,
                })
            };
            if covered(true) {
                by_solution += 1;
            } else if covered(false) {
                by_suspended += 1;
            } else {
                missed.push(format!(
                    "goal {k} {}: {}",
                    slim::syntax::goal_to_string(&g),
                    theta.iter().map(|(x, t)| format!("{x} := {}", term_to_string(t))).collect::<Vec<_>>().join("; ")
                ));
            }
        }
    }
    let elapsed = started.elapsed();
    let summary = format!(
        "{total} brute-force solutions: {by_solution} by a solution, {by_suspended} by a suspended state; {:.1}s",
        elapsed.as_secs_f64()
    );
    if !missed.is_empty() {
        return Err(format!("{summary}; {} missed: {}", missed.len(), missed.iter().take(5).cloned().collect::<Vec<_>>().join(" | ")));
    }
    if elapsed > COMPLETENESS_BUDGET {
        return Err(format!("{summary}; over the {}s budget", COMPLETENESS_BUDGET.as_secs()));
    }
    Ok(summary)
}

fn criterion_8() -> Check {
    let eqlj = corpus("eqlj1.slim");
    let mall = corpus("mall.slim");
    let mut seen = Vec::new();
    for (f, name) in [(&eqlj, "symmetry"), (&eqlj, "reflexivity"), (&mall, "axiom")] {
        let report = run(f, f.goal(name).unwrap(), &SearchConfig::default())?;
        if report.solutions().next().is_none() {
            return Err(format!("{name}: no solution"));
        }
        seen.push(format!("{name} succeeds"));
    }
    let bounded = SearchConfig {
        max_nodes: 20_000,
        ..SearchConfig::default()
    };
    let report = run(&mall, mall.goal("two_units").unwrap(), &bounded)?;
    if report.solutions().next().is_some() {
        return Err("two_units has a solution".into());
    }
    seen.push(format!("two_units fails ({})", if report.exhausted() { "exhausted" } else { "finite failure" }));
    Ok(seen.join(", "))
}

fn criterion_9() -> Check {
    let f = corpus("empty.slim");
    let g = f.goal("occurs").unwrap();
    let off = run(
        &f,
        g,
        &SearchConfig {
            occurs_check_pruning: false,
            ..cfg(50, 1)
        },
    )?;
    if off.solutions().next().is_some() || !off.exhausted() {
        return Err("pruning off: expected exhausted without solutions".into());
    }
    let on = run(&f, g, &cfg(50, 1))?;
    if on.stats.transitions != 0 || !on.outcomes.is_empty() {
        return Err(format!("pruning on: {} transitions, {} outcomes", on.stats.transitions, on.outcomes.len()));
    }
    Ok(format!(
        "off: exhausted after {} transitions; on: no transitions, failure",
        off.stats.transitions
    ))
}

fn criterion_10() -> Check {
    let sig = abf();
    let mut discrepancies = Vec::new();
    let mut solutions = 0;
    for k in 0..RANDOM_GOALS {
        let mut rng = StdRng::seed_from_u64(SEED + k);
        let g = GoalGen::new(&mut rng).generate(true);
        let supply = NameSupply::new();
        let norm = normalize_goal(&g, &supply);
        let reduced = reduce(&norm.state, &supply);
        let source = brute_solutions(&sig, &g, BRUTE_DEPTH);
        solutions += source.len();
        for (stage, s) in [("normalize", &norm.state), ("reduce", &reduced)] {
            let after = brute_state_solutions(&sig, s, &norm.origins, BRUTE_DEPTH);
            let lost = missing(&source, &after).len();
            let gained = missing(&after, &source).len();
            if lost + gained > 0 {
                discrepancies.push(format!(
                    "goal {k} {} after {stage}: {lost} lost, {gained} gained",
                    slim::syntax::goal_to_string(&g)
                ));
            }
        }
    }
    if discrepancies.is_empty() {
        Ok(format!("{RANDOM_GOALS} goals, {solutions} solutions preserved by normalize and reduce"))
    } else {
        Err(format!("{} discrepancies: {}", discrepancies.len(), discrepancies.join(" | ")))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("example with one solution", criterion_1),
        ("four-solutions example", criterion_2),
        ("equality decision suite", criterion_3),
        ("h a = a", criterion_4),
        ("backchaining example", criterion_5),
        ("soundness on random goals", criterion_6),
        ("relative completeness on random goals", criterion_7),
        ("object-logic corpora", criterion_8),
        ("divergence control", criterion_9),
        ("preservation by normalize and reduce", criterion_10),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.2}s]: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.2}s]: {detail}", n + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
