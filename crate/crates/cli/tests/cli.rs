use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equigeo"))
        .args(args)
        .env_remove("EQUIGEO_OUT_DIR")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}: {}", stdout(&out)))
}

#[test]
fn spaces_lists_all_families() {
    let v = json(&["spaces"]);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|f| f["family"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        ["wallach-so", "stiefel-v2", "stiefel-v1k", "wallach-u3", "wallach-sp3", "sphere-u", "sphere-sp"]
    );
}

#[test]
fn spaces_reports_module_dims() {
    let out = run(&["spaces", "--family", "sphere-sp", "--n", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("dims (3, 8)"));
    let out = run(&["spaces", "--family", "wallach-sp3"]);
    assert!(stdout(&out).contains("dims (4, 4, 4)"));
}

#[test]
fn check_exit_codes() {
    let ok = run(&["check", "wallach-so(1,3,2)"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let bad = run(&["check", "wallach-so(2,2,2)"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("FAIL"));
}

#[test]
fn invalid_space_is_an_error() {
    let out = run(&["check", "stiefel-v2(2)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = run(&["check", "no-such-space"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["solve"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "wallach-u3", "--samples", "x"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "wallach-u3", "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn gen_system_equation_counts() {
    for (space, extra, count) in [
        ("wallach-u3", None, 6),
        ("wallach-sp3", None, 12),
        ("stiefel-v2(4)", None, 5),
        ("stiefel-v2(7)", None, 11),
        ("stiefel-v1k(3,2)", Some("jensen"), 8),
        ("sphere-sp(1)", None, 4),
        ("sphere-sp(2)", None, 8),
    ] {
        let mut args = vec!["gen-system", space];
        if let Some(m) = extra {
            args.extend(["--metric", m]);
        }
        let v = json(&args);
        assert_eq!(v["equations"].as_array().unwrap().len(), count, "{space}");
    }
}

#[test]
fn gen_system_compare() {
    let out = run(&["gen-system", "wallach-sp3", "--compare"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["gen-system", "stiefel-v1k(3,2)", "--metric", "jensen", "--compare"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("a23*a25 - a34*a45 + a13*a15"));
}

#[test]
fn partition_flag_changes_the_system() {
    let full = json(&["gen-system", "stiefel-v2(5)"]);
    let coarse = json(&["gen-system", "stiefel-v2(5)", "--partition", "m0|m1,m2"]);
    assert_eq!(full["equations"].as_array().unwrap().len(), 7);
    assert_eq!(coarse["equations"].as_array().unwrap().len(), 6);
    let bad = run(&["gen-system", "stiefel-v2(5)", "--partition", "m0|m1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_reports_pass_and_fail() {
    let out = run(&["verify", "stiefel-v2(5)", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = run(&["verify", "wallach-sp3", "--family", "5", "--samples", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&["verify", "wallach-sp3", "--family", "4", "--samples", "5"]);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["families"][0][1]["passed"], true);
}

#[test]
fn verify_uncataloged_space_fails_cleanly() {
    let out = run(&["verify", "wallach-so(2,2,2)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_is_deterministic() {
    let args = ["--format", "json", "solve", "stiefel-v2(4)", "--restarts", "50", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["--format", "json", "solve", "stiefel-v2(4)", "--restarts", "50", "--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn csv_output_has_header() {
    let out = run(&["--format", "csv", "verify", "wallach-u3", "--samples", "5"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("family,"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn out_dir_receives_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_equigeo"))
        .args(["--format", "json", "gen-system", "stiefel-v2(5)"])
        .env("EQUIGEO_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("gen-system-stiefel-v2-5.json")).unwrap();
    assert!(text.contains("\"equations\""));

    let out = Command::new(env!("CARGO_BIN_EXE_equigeo"))
        .args(["spaces", "--output", "sub/list.txt"])
        .env("EQUIGEO_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("sub/list.txt").exists());
}

#[test]
fn space_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("space.json");
    std::fs::write(&path, r#"{"family": "stiefel-v2", "params": [6]}"#).unwrap();
    let v = json(&["gen-system", "--space-file", path.to_str().unwrap()]);
    assert_eq!(v["equations"].as_array().unwrap().len(), 9);
}
