use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = Command::new(env!("CARGO_BIN_EXE_basispath"))
        .args(args)
        .output()
        .unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn path_lines(out: &str) -> Vec<&str> {
    out.lines().filter(|l| !l.starts_with("# ")).collect()
}

#[test]
fn flaws_exit_codes() {
    let (code, out, _) = run(&["flaws", &fixture("example.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("no flaws"));

    let (code, out, _) = run(&["flaws", &fixture("flaws/intersecting.json")]);
    assert_eq!(code, 2);
    assert!(out.contains("HorribleLoop"));

    let (code, _, err) = run(&["flaws", "/definitely/not/here.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot read"));
}

#[test]
fn non_blocking_flaws_exit_zero() {
    let (code, out, _) = run(&["flaws", &fixture("flaws/two_entries.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("MultipleEntries"));
}

#[test]
fn several_files_keep_input_order() {
    let (code, out, _) = run(&[
        "flaws",
        &fixture("flaws/deadend.json"),
        &fixture("example.json"),
        &fixture("while.json"),
    ]);
    assert_eq!(code, 2);
    let names: Vec<&str> = out
        .lines()
        .filter(|l| !l.starts_with(' '))
        .map(|l| l.split(':').next().unwrap())
        .collect();
    assert_eq!(names, ["deadend", "example", "while"]);
}

#[test]
fn paths_text_json_and_dot() {
    let (code, out, _) = run(&["paths", &fixture("example.json")]);
    assert_eq!(code, 0);
    assert_eq!(path_lines(&out), ["bg", "acdf", "aef", "aehi"]);
    assert!(out.contains("# complexity 4"));

    let (code, out, _) = run(&["paths", "--format", "json", &fixture("example.json")]);
    assert_eq!(code, 0);
    let golden = std::fs::read_to_string(fixture("example.plan.json")).unwrap();
    assert_eq!(out, golden);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["complexity"], 4);
    assert_eq!(v["verification"]["is_basis"], true);

    let (code, out, _) = run(&["paths", "--format", "dot", &fixture("example.dot")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph"));
    assert!(out.contains("paths=\"0\""));
}

#[test]
fn paths_from_mini_and_blocked_input() {
    let (code, out, _) = run(&["paths", &fixture("mini/ifelse.mini")]);
    assert_eq!(code, 0);
    assert_eq!(path_lines(&out).len(), 2);

    let (code, out, err) = run(&["paths", &fixture("flaws/intersecting.json")]);
    assert_eq!(code, 2);
    assert!(out.contains("HorribleLoop"));
    assert!(err.contains("blocking"));
}

#[test]
fn paths_dump_decomposition() {
    let (_, out, _) = run(&[
        "paths",
        "--dump-decomposition",
        "--format",
        "json",
        &fixture("two_loops.json"),
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["decomposition"]["loops"].as_array().unwrap().len(), 2);
    let (_, text, _) = run(&["paths", "--dump-decomposition", &fixture("two_loops.json")]);
    assert!(text.contains("# decomposition"));
}

#[test]
fn verify_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    };
    let g = fixture("example.json");

    let (code, out, _) = run(&["verify", &g, &write("ok.plan", "aef\naehi\nacdf\nbg\n")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("residual 0"));

    let (code, out, err) = run(&["verify", &g, &write("nobg.plan", "aef\naehi\nacdf\n")]);
    assert_eq!(code, 3);
    assert!(err.contains("not a basis"));
    assert!(out.contains("uncovered: b g"));

    let (code, _, err) = run(&["verify", &g, &write("walk.plan", "bg\nacdf\naef\nafhi\n")]);
    assert_eq!(code, 1);
    assert!(err.contains("invalid path"));

    let (code, _, err) = run(&["verify", &g, &write("label.plan", "bz\n")]);
    assert_eq!(code, 1);
    assert!(err.contains("line 1"));

    let (code, out, _) = run(&[
        "verify",
        "--format",
        "json",
        &g,
        &write("j.plan", "bg\nacdf\naef\naehi\n"),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["accounting"]["residual"], 0);
}

#[test]
fn paths_output_feeds_verify() {
    let dir = tempfile::tempdir().unwrap();
    for name in [
        "two_loops.json",
        "nested.json",
        "mini/mixed.mini",
        "flaws/three_exits.json",
    ] {
        for fmt in ["text", "json"] {
            let plan = dir.path().join(format!("plan.{fmt}"));
            let plan = plan.to_str().unwrap();
            let (code, _, _) = run(&["paths", "--format", fmt, "--out", plan, &fixture(name)]);
            assert_eq!(code, 0);
            let (code, out, _) = run(&["verify", &fixture(name), plan]);
            assert_eq!(code, 0, "{name} {fmt}: {out}");
        }
    }
}

#[test]
fn substitute_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("example.plan");
    std::fs::write(&plan, "bg\nacdf\naef\naehi\n").unwrap();
    let plan = plan.to_str().unwrap();
    let g = fixture("example.json");

    let cands = dir.path().join("c.plan");
    std::fs::write(&cands, "aehi\nacdhi\n").unwrap();
    let (code, out, _) = run(&[
        "substitute",
        &g,
        plan,
        "--reject",
        "3",
        "--candidates",
        cands.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(path_lines(&out), ["bg", "acdf", "aef", "acdhi"]);

    let (code, out, _) = run(&["substitute", &g, plan, "--reject", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("basis verified"));

    let dup = dir.path().join("dup.plan");
    std::fs::write(&dup, "aef\n").unwrap();
    let (code, _, err) = run(&[
        "substitute",
        &g,
        plan,
        "--reject",
        "3",
        "--candidates",
        dup.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("no independent substitute"));

    let (code, _, _) = run(&["substitute", &g, plan, "--reject", "9"]);
    assert_eq!(code, 1);
}

#[test]
fn lower_and_gen() {
    let (code, out, _) = run(&["lower", &fixture("mini/while.mini")]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 4);

    let (code, a, _) = run(&["gen", "--seed", "11"]);
    assert_eq!(code, 0);
    let (_, b, _) = run(&["gen", "--seed", "11"]);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["name"], "gen-11");

    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(&[
        "gen",
        "--seed",
        "5",
        "--count",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let g = dir.path().join("gen-6.json");
    let (code, _, _) = run(&["paths", g.to_str().unwrap()]);
    assert_eq!(code, 0);
}

#[test]
fn usage_errors_are_input_errors() {
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["paths"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}
