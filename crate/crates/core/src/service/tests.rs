use serde_json::{json, Value};

use super::*;
use crate::spec::builtin_demo_spec;

fn session() -> Session {
    Session::new(builtin_demo_spec(), None, SessionConfig::default())
}

fn call(s: &mut Session, op: &str, args: Value) -> Response {
    s.handle(&Request { id: 1, op: op.to_string(), args })
}

fn ok(s: &mut Session, op: &str, args: Value) -> Value {
    let r = call(s, op, args);
    assert!(r.is_ok(), "{op}: {:?}", r.error);
    r.payload.unwrap()
}

fn err_kind(s: &mut Session, op: &str, args: Value) -> String {
    let before = s.fingerprint();
    let r = call(s, op, args);
    assert!(!r.is_ok(), "{op} should fail");
    assert_eq!(s.fingerprint(), before, "{op} changed state on error");
    r.error.unwrap().kind
}

fn node(v: &Value, key: &str) -> u64 {
    v[key].as_u64().unwrap()
}

/// New program with one `if` expression; returns (handle, if node).
fn with_if(s: &mut Session) -> (String, u64) {
    let p = ok(s, "new_program", json!({}));
    let d = p["doc"].as_str().unwrap().to_string();
    let list = ok(s, "placeholders", json!({"doc": d}))["nodes"][1].as_u64().unwrap();
    let n = node(&ok(s, "expand", json!({"doc": d, "node": list, "choice": "if"})), "node");
    (d, n)
}

#[test]
fn new_program_smoke() {
    let mut s = session();
    let r = s.handle(&Request { id: 1, op: "new_program".into(), args: Value::Null });
    let line = r.to_line();
    assert!(line.starts_with(r#"{"id":1,"status":"OK","payload":{"doc":"d1","geometry":{"#), "{line}");
    assert_eq!(r.payload.unwrap()["root"], 1);
}

#[test]
fn build_and_pretty() {
    let mut s = session();
    let (d, n) = with_if(&mut s);
    let holes: Vec<u64> = ok(&mut s, "placeholders", json!({"doc": d}))["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    // cond, then, else, then the open lists
    for (hole, name) in holes[1..4].iter().zip(["x", "a", "b"]) {
        let v = node(&ok(&mut s, "expand", json!({"doc": d, "node": hole, "choice": "variable"})), "node");
        let leaf = ok(&mut s, "placeholders", json!({"doc": d}))["nodes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap())
            .find(|x| *x > v)
            .unwrap();
        ok(&mut s, "set_terminal", json!({"doc": d, "node": leaf, "text": name}));
    }
    let text = ok(&mut s, "pretty", json!({"doc": d, "node": n}))["text"].clone();
    assert_eq!(text, "a if x\n  otherwise b");
    assert_eq!(err_kind(&mut s, "unparse", json!({"doc": d})), "INCOMPLETE");
}

#[test]
fn menu_and_errors() {
    let mut s = session();
    let (d, n) = with_if(&mut s);
    let cond = n + 1;
    let items = ok(&mut s, "list_completions", json!({"doc": d, "node": cond}))["items"].clone();
    assert_eq!(items.as_array().unwrap().len(), 11);
    assert_eq!(err_kind(&mut s, "expand", json!({"doc": d, "node": cond, "choice": "define"})), "INVALID_CHOICE");
    assert_eq!(err_kind(&mut s, "expand", json!({"doc": d, "node": 999, "choice": "if"})), "UNKNOWN_NODE");
    assert_eq!(err_kind(&mut s, "expand", json!({"doc": "d9", "node": cond, "choice": "if"})), "UNKNOWN_DOC");
    assert_eq!(err_kind(&mut s, "paste", json!({"doc": d, "node": cond})), "EMPTY_BUFFER");
    assert_eq!(err_kind(&mut s, "expand", json!({"doc": d})), "PROTOCOL");
    assert_eq!(err_kind(&mut s, "frobnicate", json!({})), "PROTOCOL");
    assert_eq!(err_kind(&mut s, "undo", json!({"doc": "d1", "extra": 1})), "PROTOCOL");
    assert_eq!(err_kind(&mut s, "store_list", json!({})), "NO_STORE");
}

#[test]
fn paste_type_mismatch() {
    let mut s = session();
    let p = ok(&mut s, "parse", json!({"text": "f x = x;\n1\n"}));
    let d = p["doc"].as_str().unwrap().to_string();
    let tree = ok(&mut s, "tree", json!({"doc": d}))["ast"].as_str().unwrap().to_string();
    assert!(tree.starts_with("(prog\n  (list (define"), "{tree}");
    // ids are pre-order: 1 prog, 2 list, 3 define, 4 ident "f"
    ok(&mut s, "copy", json!({"doc": d, "node": 3}));
    let (d2, n) = with_if(&mut s);
    assert_eq!(err_kind(&mut s, "paste", json!({"doc": d2, "node": n + 1})), "TYPE_MISMATCH");
    ok(&mut s, "copy", json!({"doc": d, "node": 4}));
    assert_eq!(err_kind(&mut s, "paste", json!({"doc": d2, "node": n + 1})), "TYPE_MISMATCH");
}

#[test]
fn undo_restores_serialization() {
    let mut s = session();
    let p = ok(&mut s, "parse", json!({"text": "f (g x) if c otherwise y\n"}));
    let d = p["doc"].as_str().unwrap().to_string();
    let before = ok(&mut s, "tree", json!({"doc": d}))["ast"].clone();
    ok(&mut s, "collapse", json!({"doc": d, "node": 4}));
    assert_ne!(ok(&mut s, "tree", json!({"doc": d}))["ast"], before);
    ok(&mut s, "undo", json!({"doc": d}));
    assert_eq!(ok(&mut s, "tree", json!({"doc": d}))["ast"], before);
    assert_eq!(err_kind(&mut s, "undo", json!({"doc": d})), "NOTHING_TO_UNDO");
}

#[test]
fn undo_depth() {
    let mut s = session();
    let (d, n) = with_if(&mut s);
    let mut trees = vec![ok(&mut s, "tree", json!({"doc": d}))["ast"].clone()];
    for i in 0..40 {
        ok(&mut s, "attach_comment", json!({"doc": d, "node": n, "position": "BEFORE", "text": format!("c{i}")}));
        trees.push(ok(&mut s, "tree", json!({"doc": d}))["ast"].clone());
    }
    for expected in trees.iter().rev().skip(1) {
        ok(&mut s, "undo", json!({"doc": d}));
        assert_eq!(&ok(&mut s, "tree", json!({"doc": d}))["ast"], expected);
    }
}

#[test]
fn cut_buffer_is_shared() {
    let mut s = session();
    let (d1, n1) = with_if(&mut s);
    let (d2, n2) = with_if(&mut s);
    let t = node(&ok(&mut s, "expand", json!({"doc": d1, "node": n1 + 1, "choice": "tuple"})), "node");
    ok(&mut s, "cut", json!({"doc": d1, "node": t}));
    ok(&mut s, "paste", json!({"doc": d2, "node": n2 + 2}));
    let t = ok(&mut s, "tree", json!({"doc": d2}))["ast"].as_str().unwrap().to_string();
    assert!(t.contains("(tuple"), "{t}");
}

#[test]
fn parse_subtree_dry_run() {
    let mut s = session();
    let (d, n) = with_if(&mut s);
    let before = s.fingerprint();
    let r = ok(&mut s, "parse_subtree", json!({"doc": d, "node": n + 1, "text": "f x", "commit": false}));
    assert_eq!(r["committed"], false);
    assert_eq!(s.fingerprint(), before);
    let e = call(&mut s, "parse_subtree", json!({"doc": d, "node": n + 1, "text": "f x =", "commit": false}));
    assert_eq!(e.error.unwrap().kind, "PARSE");
    assert_eq!(err_kind(&mut s, "parse_subtree", json!({"doc": d, "node": n + 1, "text": "f x = 1;"})), "TYPE_MISMATCH");
    ok(&mut s, "parse_subtree", json!({"doc": d, "node": n + 1, "text": "f x"}));
    let t = ok(&mut s, "tree", json!({"doc": d}))["ast"].as_str().unwrap().to_string();
    assert!(t.contains("(application"), "{t}");
}

#[test]
fn aliases_over_protocol() {
    let mut s = session();
    assert_eq!(ok(&mut s, "alias_expand", json!({"prefix": "cas"}))["result"], "UNIQUE");
    ok(&mut s, "alias_learn", json!({"word": "CreateSimpleWindow"}));
    assert_eq!(
        ok(&mut s, "alias_expand", json!({"prefix": "Cre"})),
        json!({"result": "UNIQUE", "value": "CreateSimpleWindow"})
    );
    ok(&mut s, "alias_learn", json!({"word": "CreateComplexWindow"}));
    assert_eq!(
        ok(&mut s, "alias_expand", json!({"prefix": "Cre"})),
        json!({"result": "AMBIGUOUS", "value": ["CreateSimpleWindow", "CreateComplexWindow"]})
    );
    assert_eq!(ok(&mut s, "alias_expand", json!({"prefix": "Zz"})), json!({"result": "NONE"}));
    assert_eq!(ok(&mut s, "alias_import", json!({"text": "map f xs = xs;\n"}))["added"], 1);
    assert_eq!(err_kind(&mut s, "alias_import", json!({"text": "g = ;"})), "PARSE");
    assert_eq!(err_kind(&mut s, "alias_expand", json!({"prefix": ""})), "PROTOCOL");
}

#[test]
fn terminals_feed_the_learner() {
    let mut s = session();
    let (d, n) = with_if(&mut s);
    let v = node(&ok(&mut s, "expand", json!({"doc": d, "node": n + 1, "choice": "variable"})), "node");
    ok(&mut s, "set_terminal", json!({"doc": d, "node": v + 1, "text": "counter"}));
    assert_eq!(ok(&mut s, "alias_expand", json!({"prefix": "coun"}))["value"], "counter");
}

#[test]
fn store_ops() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let mut s = Session::new(builtin_demo_spec(), Some(store), SessionConfig::default());
    let d = ok(&mut s, "parse", json!({"text": "|| hi\nx\n"}))["doc"].as_str().unwrap().to_string();
    assert_eq!(ok(&mut s, "store_default_name", json!({}))["name"], "prog-1");
    assert_eq!(ok(&mut s, "store_save", json!({"doc": d}))["name"], "prog-1");
    assert_eq!(ok(&mut s, "store_save", json!({"doc": d}))["name"], "prog-1");
    assert_eq!(ok(&mut s, "store_default_name", json!({}))["name"], "prog-2");
    let loaded = ok(&mut s, "store_load", json!({"name": "prog-1"}))["doc"].as_str().unwrap().to_string();
    assert_eq!(ok(&mut s, "tree", json!({"doc": loaded})), ok(&mut s, "tree", json!({"doc": d})));
    assert_eq!(err_kind(&mut s, "store_load", json!({"name": "missing"})), "UNKNOWN_NAME");
    assert_eq!(err_kind(&mut s, "store_save", json!({"doc": d, "name": "a/b"})), "INVALID_NAME");
    ok(&mut s, "store_delete", json!({"name": "prog-1"}));
    assert_eq!(ok(&mut s, "store_list", json!({}))["names"], json!([]));
}

#[test]
fn external_command() {
    let mut s = session();
    let d = ok(&mut s, "parse", json!({"text": "f x = x;\nf 1\n"}))["doc"].as_str().unwrap().to_string();
    assert_eq!(err_kind(&mut s, "run", json!({"doc": d})), "NO_EXTERNAL");
    ok(&mut s, "set_external", json!({"template": "cat {}"}));
    assert_eq!(ok(&mut s, "run", json!({"doc": d}))["output"], "f x = x;\nf 1\n");
    ok(&mut s, "set_external", json!({"template": "cat {} >/dev/null; exit 3"}));
    let e = call(&mut s, "run", json!({"doc": d})).error.unwrap();
    assert_eq!(e.kind, "EXTERNAL_FAILURE");
    assert!(e.message.contains("exited with 3"), "{}", e.message);
    let (d2, _) = with_if(&mut s);
    assert_eq!(err_kind(&mut s, "run", json!({"doc": d2})), "INCOMPLETE");
}

#[test]
fn malformed_lines() {
    let mut s = session();
    let r: Response = serde_json::from_str(&handle_line(&mut s, "not json")).unwrap();
    assert_eq!((r.id, r.error.unwrap().kind.as_str()), (None, "PROTOCOL"));
    let r: Response = serde_json::from_str(&handle_line(&mut s, r#"{"id":7,"args":{}}"#)).unwrap();
    assert_eq!((r.id, r.error.unwrap().kind.as_str()), (Some(7), "PROTOCOL"));
    let r: Response = serde_json::from_str(&handle_line(&mut s, r#"{"id":8,"op":"shutdown","extra":1}"#)).unwrap();
    assert_eq!(r.status, Status::Err);
}

#[test]
fn stream_stops_at_shutdown() {
    let mut s = session();
    let input = "{\"id\":1,\"op\":\"new_program\"}\n\n{\"id\":2,\"op\":\"shutdown\"}\n{\"id\":3,\"op\":\"new_program\"}\n";
    let mut out = Vec::new();
    serve_stream(&mut s, input.as_bytes(), &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with(r#"{"id":2,"status":"OK""#));
}

#[test]
fn set_params_changes_layout() {
    let mut s = session();
    let d = ok(&mut s, "new_program", json!({}))["doc"].as_str().unwrap().to_string();
    let narrow = ok(&mut s, "layout", json!({"doc": d}))["bounds"].clone();
    ok(&mut s, "set_params", json!({"hspace": 40, "vspace": 50}));
    let wide = ok(&mut s, "layout", json!({"doc": d}))["bounds"].clone();
    assert!(wide[0].as_i64() > narrow[0].as_i64() && wide[1].as_i64() > narrow[1].as_i64());
    assert_eq!(err_kind(&mut s, "set_params", json!({"hspace": -1})), "PROTOCOL");
}
