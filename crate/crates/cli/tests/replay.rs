use std::process::{Command, Stdio};

use synted_core::builtin_demo_spec;
use synted_core::service::{replay, Session, SessionConfig};
use synted_core::store::Store;

const LOG: &str = include_str!("fixtures/session.jsonl");
const GOLDEN: &str = include_str!("fixtures/session.golden");

fn fresh_replay() -> Vec<String> {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let mut session = Session::new(builtin_demo_spec(), Some(store), SessionConfig::default());
    replay(&mut session, LOG)
}

#[test]
fn log_has_fifty_requests() {
    assert_eq!(LOG.lines().count(), 50);
    assert_eq!(GOLDEN.lines().count(), 50);
}

#[test]
fn library_replay_matches_golden() {
    let got = fresh_replay();
    let want: Vec<&str> = GOLDEN.lines().collect();
    for (i, (g, w)) in got.iter().zip(&want).enumerate() {
        assert_eq!(g, w, "response {}", i + 1);
    }
    assert_eq!(got.len(), want.len());
}

#[test]
fn replay_is_repeatable() {
    assert_eq!(fresh_replay(), fresh_replay());
}

#[test]
fn binary_replay_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_synted"))
        .args(["serve", "--stdio", "--store"])
        .arg(dir.path())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    std::io::Write::write_all(&mut child.stdin.take().unwrap(), LOG.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), GOLDEN);
}
