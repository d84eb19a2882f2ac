use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn corpus(file: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(file)
        .to_string_lossy()
        .into_owned()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn slim(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_slim")).args(args).output().unwrap();
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn records(run: &Run) -> Vec<Value> {
    run.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn code_for(result: &str) -> i32 {
    match result {
        "solution" => 0,
        "suspended" => 2,
        "exhausted" | "failure" => 3,
        other => panic!("unknown result {other}"),
    }
}

#[test]
fn vacuous_peano_goal_has_the_empty_solution() {
    let run = slim(&["solve", &corpus("peano.slim"), "--goal", "pi x\\ (s x = z => ff)"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let sols: Vec<&str> = run.stdout.lines().filter(|l| l.starts_with("solution ")).collect();
    assert_eq!(sols, vec!["solution 1: "]);
    assert!(run.stdout.ends_with("result: solution\n"));
}

#[test]
fn check_verdicts_on_ex_one() {
    let ex = corpus("examples/ex-one.slim");
    for (subst, code, word) in [("x := u", 0, "verified"), ("x := a", 3, "refuted"), ("x := v", 3, "refuted")] {
        let run = slim(&["check", &ex, "--goal", "ex_one", "--subst", subst]);
        assert_eq!((run.code, run.stdout.trim()), (code, word), "{subst}: {}", run.stderr);
    }
}

#[test]
fn decide_verdicts() {
    let peano = corpus("peano.slim");
    for (goal, code) in [("symmetry", 0), ("zero_not_succ", 0), ("zero_eq", 3)] {
        assert_eq!(slim(&["decide", &peano, "--goal", goal]).code, code, "{goal}");
    }
}

#[test]
fn input_errors_exit_with_one() {
    let empty = corpus("empty.slim");
    for args in [
        vec!["decide", empty.as_str(), "--goal", "occurs"],
        vec!["solve", empty.as_str(), "--goal", "a = "],
        vec!["solve", empty.as_str(), "--goal", "pi x:i -> i\\ x = x"],
        vec!["check", empty.as_str(), "--goal", "occurs", "--subst", "y := a"],
    ] {
        let run = slim(&args);
        assert_eq!(run.code, 1, "{args:?}: {}", run.stdout);
        assert!(run.stderr.starts_with("error: "), "{args:?}");
    }
    assert_eq!(slim(&["solve", &corpus("missing.slim"), "--goal", "tt"]).code, 1);
}

#[test]
fn exit_code_follows_the_reported_result() {
    let empty = corpus("empty.slim");
    let peano = corpus("peano.slim");
    let cases: Vec<Vec<&str>> = vec![
        vec![&empty, "--goal", "four_solutions"],
        vec![&empty, "--goal", "occurs"],
        vec![&empty, "--goal", "occurs", "--occurs-check", "off", "--max-transitions", "50"],
        vec![&empty, "--goal", "distinct"],
        vec![&empty, "--goal", "pi y\\ sigma x\\ (y = x => ff)"],
        vec![&empty, "--goal", "sigma h:i -> i\\ pi y\\ (h y = a => ff)"],
        vec![&peano, "--goal", "zero_eq"],
        vec![&peano, "--goal", "transitivity", "--max-transitions", "0"],
    ];
    let mut seen = std::collections::BTreeSet::new();
    for case in cases {
        let mut args = vec!["solve", "--format", "records"];
        args.extend(&case);
        let run = slim(&args);
        let recs = records(&run);
        let stats = recs.last().unwrap();
        assert_eq!(stats["kind"], "stats");
        let result = stats["result"].as_str().unwrap().to_owned();
        let kinds: Vec<&str> = recs.iter().map(|r| r["kind"].as_str().unwrap()).collect();
        let expected = if kinds.contains(&"solution") {
            "solution"
        } else if kinds.contains(&"suspended") {
            "suspended"
        } else if kinds.contains(&"exhausted") {
            "exhausted"
        } else {
            "failure"
        };
        assert_eq!(result, expected, "{case:?}");
        assert_eq!(run.code, code_for(&result), "{case:?}");
        seen.insert(result);
    }
    assert_eq!(seen.len(), 4, "{seen:?}");
}

#[test]
fn recorded_solutions_check_back_as_verified() {
    for (program, goal, extra) in [
        ("empty.slim", "four_solutions", vec!["--max-solutions", "20", "--max-transitions", "200"]),
        ("examples/reduced-form.slim", "interpolation", vec!["--max-solutions", "10"]),
        ("examples/reduced-form.slim", "h_a", vec!["--max-solutions", "10"]),
        ("examples/ex-one.slim", "ex_one", vec![]),
    ] {
        let file = corpus(program);
        let mut args = vec!["solve", file.as_str(), "--goal", goal, "--format", "records"];
        args.extend(&extra);
        let run = slim(&args);
        assert_eq!(run.code, 0, "{goal}: {}", run.stderr);
        let mut count = 0;
        for rec in records(&run).iter().filter(|r| r["kind"] == "solution") {
            let subst: Vec<String> = rec["bindings"]
                .as_object()
                .unwrap()
                .iter()
                .map(|(x, t)| format!("{x} := {}", t.as_str().unwrap()))
                .collect();
            let subst = subst.join("; ");
            let back = slim(&["check", &file, "--goal", goal, "--subst", &subst, "--format", "records"]);
            let verdict: Value = serde_json::from_str(back.stdout.trim()).unwrap();
            assert_eq!(verdict["verdict"], "verified", "{goal}: {subst}");
            assert_eq!(verdict["bindings"], rec["bindings"], "{goal}: {subst}");
            assert_eq!(back.code, 0);
            count += 1;
        }
        assert!(count > 0, "{goal}");
    }
}

#[test]
fn trace_lists_the_steps_of_each_solution() {
    let run = slim(&["solve", &corpus("examples/ex-one.slim"), "--goal", "ex_one", "--trace", "--format", "records"]);
    assert_eq!(run.code, 0);
    let recs = records(&run);
    let sol = recs.iter().find(|r| r["kind"] == "solution").unwrap();
    let trace = sol["trace"].as_array().unwrap();
    assert!(!trace.is_empty());
    for step in trace {
        assert_eq!(step["state"].as_str().unwrap().len(), 16);
    }
}
