use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_typelattice"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn cmp_reports_order() {
    let out = run(&["cmp", "{ default: 0 }", "{ default: inf }"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "less\n");

    let out = run(&["cmp", "{ default: 0, primes {2, 3}: 5 }", "{ default: 0 }"]);
    assert_eq!(stdout(&out), "equivalent\n");

    let out = run(&[
        "--modulus",
        "2",
        "cmp",
        "{ default: 0, mod 2 = 0: inf }",
        "{ default: 0, mod 2 = 1: inf }",
    ]);
    assert_eq!(stdout(&out), "incomparable\n");
}

#[test]
fn join_and_meet_render_types() {
    let out = run(&[
        "--modulus",
        "2",
        "join",
        "{ default: 0, mod 2 = 0: inf }",
        "{ default: 1 }",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let join = stdout(&out);
    assert!(join.contains("inf") && join.contains('1'), "{join}");

    let out = run(&["meet", "{ default: inf }", "{ default: 2 }"]);
    assert_eq!(stdout(&out).trim(), "{ default: 2 }");
}

#[test]
fn ext_routes_agree() {
    let out = run(&["ext", "{ default: inf }", "{ default: 0 }"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("Continuum"));

    let out = run(&["ext", "{ default: 0 }", "{ default: 0 }"]);
    assert!(stdout(&out).starts_with("Zero"));
}

#[test]
fn separate_builds_verified_witness() {
    let out = run(&["separate", "{ default: 1 }", "{ default: 2 }"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.contains("BothFinite") && text.contains("verdict: PASS"),
        "{text}"
    );

    let out = run(&["separate", "{ default: 0 }", "{ default: inf }"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn json_documents_carry_schema() {
    let out = run(&["--json", "separate", "{ default: 1 }", "{ default: 2 }"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], "typelattice/1");
    assert_eq!(doc["command"], "separate");
    assert_eq!(doc["separation"]["verified"], true);
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        run(&["--modulus", "0", "cmp", "{default:0}", "{default:0}"])
            .status
            .code(),
        Some(1)
    );
    // not a strict pair
    assert_eq!(
        run(&["separate", "{ default: 2 }", "{ default: 1 }"])
            .status
            .code(),
        Some(1)
    );
    // parse errors
    assert_eq!(
        run(&["cmp", "{ default: }", "{ default: 0 }"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["cmp", "{ default: 0, mod 3 = 0: 1 }", "{ default: 0 }"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["cmp", "{ default: 0, primes {4}: 1 }", "{ default: 0 }"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["help"]).status.code(), Some(0));
}

#[test]
fn embed_poset_file() {
    let dir = std::env::temp_dir().join(format!("typelattice-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let diamond = dir.join("diamond.json");
    std::fs::write(
        &diamond,
        r#"{"n": 4, "le": [[0, 1], [0, 2], [1, 3], [2, 3]]}"#,
    )
    .unwrap();
    let out = run(&["embed", "--poset", diamond.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("cotorsion image: PASS"));

    let cyclic = dir.join("cyclic.json");
    std::fs::write(&cyclic, r#"{"n": 2, "le": [[0, 1], [1, 0]]}"#).unwrap();
    assert_eq!(
        run(&["embed", "--poset", cyclic.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    let garbage = dir.join("garbage.json");
    std::fs::write(&garbage, "not json").unwrap();
    assert_eq!(
        run(&["embed", "--poset", garbage.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let out = run(&["embed", "--powerset", "3", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["assignment"].as_array().unwrap().len(), 8);
    assert_eq!(doc["cotorsion_image"]["all_verified"], true);

    assert_eq!(
        run(&["--modulus", "2", "embed", "--powerset", "3"])
            .status
            .code(),
        Some(1)
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn selftest_small_run_passes() {
    let out = run(&["selftest", "--trials", "20", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("all checks passed"));
}
