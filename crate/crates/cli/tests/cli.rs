//! End-to-end runs of the `founded` binary: output shapes and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn founded(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_founded")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// A program file unique to the calling test.
fn program(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("founded-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{name}.fl"));
    fs::write(&path, text).unwrap();
    path
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_text_and_json() {
    let even = corpus("classic/even.fl");
    let out = founded(&["eval", path_str(&even)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("even(1): false\neven(2): true\neven(3): false\n"));

    let out = founded(&["eval", path_str(&even), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_object().unwrap().len(), 2);
    assert_eq!(v["consistent"], true);
    assert_eq!(v["atoms"]["even(0)"], "true");
    assert_eq!(v["atoms"]["succ(0,2)"], "false");
}

#[test]
fn eval_undefined_and_wfs() {
    let prog8 = corpus("boundary/prog8.fl");
    let out = founded(&["eval", path_str(&prog8)]);
    assert_eq!(stdout(&out), "q: undefined\n");
    let out = founded(&["eval", path_str(&prog8), "--semantics", "wfs"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "q: false\n");
    assert!(stderr(&out).contains("self-false rounds: 1"));
}

#[test]
fn eval_dumps_and_trace() {
    let win = program("trace", "win(x) <- move(x,y) and not win(y).\nmove(1,2).\n");
    let out = founded(&["eval", path_str(&win), "--trace", "--dump-ground", "--dump-completed"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for section in ["% ground program", "% completed program", "% trace", "% model"] {
        assert!(text.contains(section), "{section} missing from\n{text}");
    }
    assert!(text.contains("win(1) <= c"));
    assert!(text.ends_with("win(1): true\nwin(2): false\n"));

    // JSON stays parseable; auxiliary sections move to stderr.
    let out = founded(&["eval", path_str(&win), "--trace", "--format", "json"]);
    assert!(serde_json::from_str::<Value>(&stdout(&out)).is_ok());
    assert!(stderr(&out).contains("% trace"));
}

#[test]
fn exit_codes_for_bad_input() {
    let bad = program("syntax", "p <- and q.\n");
    assert_eq!(code(&founded(&["eval", path_str(&bad)])), 1);
    assert_eq!(code(&founded(&["eval", "/nonexistent/file.fl"])), 1);
    assert_eq!(code(&founded(&["eval"])), 1);
    assert_eq!(code(&founded(&["frobnicate"])), 1);
    assert_eq!(code(&founded(&["--help"])), 0);

    let decl = program("decl", "certain win.\nwin(x) <- move(x,y) and not win(y).\nmove(1,2).\n");
    let out = founded(&["eval", path_str(&decl)]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn inconsistent_model_exits_3() {
    let clash = program("clash", "uncertain p.\nincomplete p.\np.\nnot p <- true.\n");
    let out = founded(&["eval", path_str(&clash), "--format", "json"]);
    assert_eq!(code(&out), 3);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["consistent"], false);
    assert_eq!(v["atoms"]["p"], "undefined");
}

#[test]
fn models_json_shape() {
    let prog2 = corpus("boundary/prog2.fl");
    for semantics in ["constraint", "sms", "supported"] {
        let out = founded(&["models", path_str(&prog2), "--semantics", semantics, "--format", "json"]);
        assert_eq!(code(&out), 0, "{semantics}");
        let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["count"], 2, "{semantics}");
        assert_eq!(v["models"], serde_json::json!([["p"], ["q"]]), "{semantics}");
    }
    let out = founded(&["models", path_str(&prog2), "--semantics", "fo", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["count"], 3);

    let out = founded(&["models", path_str(&prog2), "--semantics", "fitting", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["atoms"]["p"], "undefined");
}

#[test]
fn models_text_and_limit() {
    let prog1 = corpus("boundary/prog1.fl");
    let out = founded(&["models", path_str(&prog1), "--semantics", "constraint"]);
    assert_eq!(stdout(&out), "no model\n");

    let yale = corpus("classic/yale.fl");
    let out = founded(&["models", path_str(&yale), "--semantics", "constraint", "--limit", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text.ends_with("24 models\n"));
}

#[test]
fn models_oracle_errors() {
    let win = corpus("classic/win.fl");
    let out = founded(&["models", path_str(&win), "--semantics", "supported"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    let out = founded(&["models", path_str(&win), "--semantics", "supported", "--max-atoms", "64"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "no model\n");

    let yale = corpus("classic/yale.fl");
    let out = founded(&["models", path_str(&yale), "--semantics", "fo"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn compare_against_golden() {
    let prog7 = corpus("boundary/prog7.fl");
    let golden = corpus("boundary/prog7.golden");
    let out = founded(&["compare", path_str(&prog7), "--golden", path_str(&golden)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), fs::read_to_string(&golden).unwrap());

    let wrong = corpus("boundary/prog8.golden");
    let out = founded(&["compare", path_str(&prog7), "--golden", path_str(&wrong)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("+ wfs:"));
}

#[test]
fn bench_reports_verdict() {
    let out = founded(&["bench", "--family", "winchain", "--sizes", "500,2000"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("verdict: linear"));
    assert_eq!(code(&founded(&["bench", "--family", "tree", "--sizes", "10"])), 1);
}

#[test]
fn fuzz_runs_clean() {
    let out = founded(&["fuzz", "--seed", "3", "--count", "50"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("checked 50 programs"));
}
