use std::io::Write;
use std::process::{Command, Output};

fn cclo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cclo")).args(args).env_remove("CI").output().expect("runs")
}

fn code(args: &[&str]) -> i32 {
    cclo(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(cclo(args).stdout).unwrap().trim().to_string()
}

fn model_file(json: &str) -> tempfile_path::Path {
    tempfile_path::write(json)
}

/// Minimal scratch-file helper so tests need no extra crates.
mod tempfile_path {
    use super::*;

    pub struct Path(pub std::path::PathBuf);

    impl Drop for Path {
        fn drop(&mut self) {
            let _ = std::fs::remove_file(&self.0);
        }
    }

    pub fn write(body: &str) -> Path {
        use std::sync::atomic::{AtomicUsize, Ordering};
        static N: AtomicUsize = AtomicUsize::new(0);
        let p = std::env::temp_dir().join(format!("cclo-{}-{}.json", std::process::id(), N.fetch_add(1, Ordering::SeqCst)));
        std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        Path(p)
    }
}

#[test]
fn embed_exit_codes() {
    assert_eq!(code(&["embed", "pt", "pt"]), 0);
    assert_eq!(code(&["embed", "(pt + pt)", "pt"]), 1);
    assert_eq!(code(&["embed", "w(_;_;_)", "pt"]), 2);
    assert_eq!(code(&["embed", "pt", "(pt +"]), 2);
    assert_eq!(code(&["embed", "--oracle", "w([|pt];p;_)", "w([|pt, pt];p;_)"]), 0);
}

#[test]
fn embed_json_has_witness() {
    let out = stdout(&["embed", "--json", "pt", "(pt + pt)"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["embeds"], true);
    assert!(v["witness"].as_array().is_some_and(|w| !w.is_empty()));
    let out = stdout(&["embed", "--json", "(pt + pt)", "pt"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["embeds"], false);
    assert!(v["witness"].is_null());
}

#[test]
fn labeled_embedding() {
    let qo = "qo { elements: [a, b]; leq: [a<=b] }";
    assert_eq!(code(&["--qo", qo, "embed", "pt:a", "pt:b"]), 0);
    assert_eq!(code(&["--qo", qo, "embed", "pt:b", "pt:a"]), 1);
    assert_eq!(code(&["--qo", qo, "embed", "pt:c", "pt:a"]), 2);
}

#[test]
fn ranks_and_derivative() {
    assert_eq!(stdout(&["cbrank", "w([|pt];p;_)"]), "1");
    assert_eq!(stdout(&["cbrank", "w([|w([|pt];p;_)];p;_)"]), "2");
    assert_eq!(code(&["cbrank", "int"]), 2);
    assert_eq!(stdout(&["derivative", "w([|pt];p;_)"]), "pt");
    assert!(stdout(&["rank", "w([|pt];p;_)"]).starts_with("rank 1"));
}

#[test]
fn validate_lists_violations() {
    assert_eq!(code(&["validate", "w([|pt];p;_)"]), 0);
    assert_eq!(code(&["validate", "w(_;_;_)"]), 1);
    assert!(stdout(&["validate", "w(_;_;_)"]).contains("both sides empty"));
}

#[test]
fn decompose_parts() {
    let out = stdout(&["decompose", "w([w([|pt];p;_)|pt];p;_)"]);
    assert_eq!(out.lines().collect::<Vec<_>>(), ["w([|pt];p;_)", "w([|pt];p;_)"]);
}

#[test]
fn eval_and_truncate() {
    let m = model_file(r#"{"universe": ["m1", "m2"], "tables": {"P": {"(m1)": "1/3", "(m2)": "3/4"}}}"#);
    let path = m.0.to_str().unwrap();
    assert_eq!(stdout(&["eval", path, "bot"]), "0");
    assert_eq!(stdout(&["eval", path, "exists x. P(x)"]), "3/4");
    assert_eq!(stdout(&["eval", path, "forall x. P(x)"]), "1/3");
    let out = stdout(&["--json", "truncate", path, "forall x. P(x)", "1/2"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tables"]["P"]["(m2)"], "1");
    assert_eq!(code(&["truncate", path, "forall x. P(x)", "3/4"]), 2);
    assert_eq!(code(&["eval", path, "P(x)"]), 2);
}

#[test]
fn falsify_and_compare() {
    // excluded middle fails on any set with a value strictly between 0 and 1
    assert_eq!(code(&["--seed", "1", "falsify", "P | ~P", "w([|pt];p;_)"]), 0);
    // prelinearity holds in every Goedel logic
    assert_eq!(code(&["--seed", "1", "falsify", "(P -> Q) | (Q -> P)", "int"]), 1);
    assert_eq!(code(&["compare-logics", "w([|pt];p;_)", "w(_;p;[|pt])"]), 1);
    let out = stdout(&["--json", "compare-logics", "w([|pt];p;_)", "w([|w([|pt];p;_)];p;_)"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["v2_subset_v1"], true);
    assert_eq!(v["v1_subset_v2"], false);
}

#[test]
fn exploration_commands() {
    assert_eq!(stdout(&["--bounds", "nodes=3", "enumerate"]).lines().count(), 4);
    let v: serde_json::Value = serde_json::from_str(&stdout(&["--json", "--bounds", "nodes=4", "classes"])).unwrap();
    assert_eq!(v["counts"]["terms"], 10);
    let out = stdout(&["--json", "--seed", "3", "--bounds", "nodes=5,length=20,trials=30", "wqo-test"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["counts"]["good"], 30);
    assert_eq!(v["good_fraction"], 1.0);
    assert!(v["classes"].is_array() && v["bounds"].is_object());
}

#[test]
fn seed_required_under_ci() {
    let out = Command::new(env!("CARGO_BIN_EXE_cclo")).args(["wqo-test"]).env("CI", "1").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn deterministic_output() {
    let args = ["--json", "--seed", "9", "--bounds", "nodes=4,trials=20", "wqo-test"];
    assert_eq!(stdout(&args), stdout(&args));
}
