use std::path::PathBuf;
use std::process::{Command, Output};

fn spec_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/specs/staple-mini.absyn")
}

fn synted(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synted")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_reports_counts() {
    let out = synted(&["check", spec_path().to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("staple-mini: 2 classes, 14 productions"), "{}", stdout(&out));
}

#[test]
fn complete_lists_expression_menu() {
    let out = synted(&["complete", spec_path().to_str().unwrap(), "expression"]);
    assert!(out.status.success());
    let items: Vec<String> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(
        items,
        ["literal", "variable", "tuple", "list", "comprehension", "diagonalization", "abstraction", "application", "if", "case", "block"]
    );
}

#[test]
fn unknown_class_fails() {
    let out = synted(&["complete", spec_path().to_str().unwrap(), "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("synted: "));
}

#[test]
fn parse_then_pretty() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("p.stm");
    std::fs::write(&src, "a if x\n  otherwise b\n").unwrap();
    let out = synted(&["parse", spec_path().to_str().unwrap(), src.to_str().unwrap()]);
    assert!(out.status.success());
    let ast = dir.path().join("p.ast");
    std::fs::write(&ast, stdout(&out)).unwrap();
    let out = synted(&["pretty", spec_path().to_str().unwrap(), ast.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "a if x\n  otherwise b\n");
}

#[test]
fn roundtrip_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let same = dir.path().join("same.stm");
    std::fs::write(&same, "a if x\n  otherwise b\n").unwrap();
    assert!(synted(&["roundtrip", spec_path().to_str().unwrap(), same.to_str().unwrap()]).status.success());

    let guard = dir.path().join("guard.stm");
    std::fs::write(&guard, "x, c; y otherwise\n").unwrap();
    let out = synted(&["roundtrip", "--json", spec_path().to_str().unwrap(), guard.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["identical"], false);
    assert_eq!(report["differences"][0]["category"], "SUGAR_GUARD");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(synted(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(synted(&["serve"]).status.code(), Some(2));
    assert_eq!(synted(&["serve", "--stdio", "--listen", "127.0.0.1:0"]).status.code(), Some(2));
}

#[test]
fn missing_file_exits_one() {
    let out = synted(&["check", "/nonexistent/spec.absyn"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn serve_stdio_answers_each_line() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_synted"))
        .args(["serve", "--stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"{\"id\":1,\"op\":\"new_program\"}\n{\"id\":2,\"op\":\"store_list\"}\n{\"id\":3,\"op\":\"shutdown\"}\n{\"id\":4,\"op\":\"store_list\"}\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["status"], "OK");
    assert_eq!(lines[1]["error"]["kind"], "NO_STORE");
    assert_eq!(lines[2]["id"], 3);
}
