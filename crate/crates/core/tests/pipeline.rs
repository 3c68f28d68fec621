mod common;

use basispath::ingest::{self, Format};
use basispath::plan::{parse_plan, path_text, render_dot, render_json, render_text, Role};
use basispath::{run_pipeline, test_pipeline, FlawKind, PipelineError};
use common::*;

#[test]
fn every_clean_fixture_runs() {
    for (name, g) in purified_fixtures() {
        let a = run_pipeline(&g).unwrap_or_else(|e| panic!("{name}: {e}"));
        let cert = &a.plan.verification;
        assert!(cert.is_basis, "{name}: {}", cert.summary());
        assert_eq!(a.plan.paths.len() as i64, a.plan.complexity, "{name}");
        assert_eq!(cert.coverage.covered, cert.coverage.total, "{name}");
        assert_eq!(
            a.plan
                .paths
                .iter()
                .filter(|p| p.role == Role::Backbone)
                .count(),
            1
        );
        assert_eq!(a.plan.paths[a.paths.backbone].role, Role::Backbone);
    }
}

#[test]
fn intersecting_loops_abort() {
    match run_pipeline(&fixture("flaws/intersecting.json")) {
        Err(PipelineError::Blocked(r)) => assert!(r.kinds().contains(&FlawKind::HorribleLoop)),
        Err(e) => panic!("unexpected {e}"),
        Ok(_) => panic!("pipeline accepted intersecting loops"),
    }
}

#[test]
fn resolved_flaws_travel_with_the_plan() {
    let a = run_pipeline(&fixture("flaws/two_entries.json")).unwrap();
    assert_eq!(a.plan.flaws.kinds(), vec![FlawKind::MultipleEntries]);
    assert!(!a.plan.flaws.blocking);
}

#[test]
fn mini_if_else_plan() {
    let src = fixture_text("mini/ifelse.mini");
    let a = test_pipeline(&src, Format::Mini, "ifelse").unwrap();
    assert_eq!(a.plan.complexity, 2);
    assert_eq!(a.plan.paths.len(), 2);
    let stmts: Vec<Vec<String>> = a.plan.paths.iter().map(|p| p.statements.clone()).collect();
    assert!(stmts
        .iter()
        .any(|s| s.contains(&"s1".to_string()) && !s.contains(&"s2".to_string())));
    assert!(stmts
        .iter()
        .any(|s| s.contains(&"s2".to_string()) && !s.contains(&"s1".to_string())));
}

#[test]
fn golden_plan_json() {
    let a = run_pipeline(&fixture("example.json")).unwrap();
    let got = render_json(&a.plan);
    let path = fixture_dir().join("example.plan.json");
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    assert_eq!(got, std::fs::read_to_string(&path).unwrap());
}

#[test]
fn text_plan_round_trips() {
    for (name, g) in purified_fixtures() {
        let a = run_pipeline(&g).unwrap();
        let text = render_text(&a.cfg, &a.plan, &a.paths);
        assert!(
            text.starts_with("# graph") || text.starts_with("# complexity"),
            "{name}"
        );
        let back = parse_plan(&text, &a.cfg).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(back.paths, a.paths.paths, "{name}");
        let json = parse_plan(&render_json(&a.plan), &a.cfg).unwrap();
        assert_eq!(json, a.paths, "{name}");
    }
}

#[test]
fn example_text_and_dot() {
    let a = run_pipeline(&fixture("example.json")).unwrap();
    let text = render_text(&a.cfg, &a.plan, &a.paths);
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines, ["bg", "acdf", "aef", "aehi"]);
    let dot = render_dot(&a.cfg, &a.paths);
    assert!(dot.contains("paths=\"0\""));
    assert!(dot.contains("paths=\"1,2,3\""));
    assert_eq!(ingest::parse_dot_cfg(&dot).unwrap(), a.cfg);
}

#[test]
fn loops_are_parenthesized() {
    let g = fixture("while.json");
    let a = run_pipeline(&g).unwrap();
    assert_eq!(path_text(&a.cfg, &a.paths.paths[1]), "x(zw)y");
    let parsed = parse_plan("x(zw)y\nxy # backbone\n", &a.cfg).unwrap();
    assert_eq!(parsed.backbone, 1);
    assert_eq!(parsed.paths[0], a.paths.paths[1]);
}

#[test]
fn bad_plans_are_rejected() {
    let g = fixture("example.json");
    assert!(parse_plan("bq\n", &g).is_err());
    assert!(parse_plan("(bg\n", &g).is_err());
    assert!(parse_plan("# only a comment\n", &g).is_err());
    assert!(parse_plan("{ not json", &g).is_err());
}

#[test]
fn edge_indices_in_plans() {
    let g = fixture("example.json");
    let bg = parse_plan("bg\n", &g).unwrap();
    let ids: String = bg.paths[0]
        .edges
        .iter()
        .map(|e| format!("#{} ", e.0))
        .collect();
    assert_eq!(parse_plan(&ids, &g).unwrap(), bg);
}
