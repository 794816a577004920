//! The `grail` binary: exit statuses, outputs and determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn grail(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_grail"))
        .args(args)
        .current_dir(data(""))
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn wpost_of_init_and_true() {
    let (status, out, _) = grail(&["wpost", "--rules", "init", "--cond", "true"]);
    assert_eq!(status, 0);
    assert_eq!(out, "ex int x. ex { node 0 x:0; }\n");
}

#[test]
fn check_statuses() {
    let (status, out, _) = grail(&["check", "--proof", "finite_failure.proof"]);
    assert_eq!(status, 0);
    assert!(out.starts_with("Valid"), "{out}");
    let (status, out, _) = grail(&["check", "--proof", "illegal_colouring.proof"]);
    assert_eq!(status, 3);
    assert!(out.starts_with("ValidUpToBound"), "{out}");
}

#[test]
fn rejected_proof_is_status_one() {
    let dir = std::env::temp_dir().join(format!("grail-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let proof = dir.join("wrong.proof");
    std::fs::write(
        &proof,
        format!(
            "use \"{}\";\n(rule RuleSetSucc\n  conclusion: [true and App(init)] init [ok: true])\n",
            data("colouring.grs").display()
        ),
    )
    .unwrap();
    let (status, out, _) = grail(&["check", "--proof", proof.to_str().unwrap()]);
    assert_eq!(status, 1, "{out}");
    assert!(out.starts_with("Rejected"), "{out}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn validate_writes_witness() {
    let dir = std::env::temp_dir().join(format!("grail-cli-w-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let witness = dir.join("w.graph");
    let summary = dir.join("s.json");
    let (status, out, _) = grail(&[
        "validate",
        "--triple",
        "refuted.triple",
        "--witness",
        witness.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(status, 1, "{out}");
    let w = std::fs::read_to_string(&witness).unwrap();
    let g = grail::syntax::parse_graph(&w).unwrap();
    assert!(g.nodes().all(|(_, l)| l.unwrap().0.get(1) != Some(&0)));
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["report"]["verdict"], "counterexample");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn validate_proof_conclusion() {
    let (status, out, _) = grail(&["validate", "--proof", "illegal_structure.proof", "--max-nodes", "2"]);
    assert_eq!(status, 0, "{out}");
    assert!(out.contains("no counterexample"), "{out}");
}

#[test]
fn outcomes_and_run() {
    let (status, out, _) = grail(&["outcomes", "--program", "null!", "--graph", "path.graph"]);
    assert_eq!(status, 0);
    assert_eq!(out, "ok (0):\ner (0):\ntruncated: false\n");
    let (status, out, _) = grail(&["outcomes", "--program", "init; colour!", "--graph", "single.graph", "--format", "machine"]);
    assert_eq!(status, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["er"], serde_json::json!(["graph { node 0 1:2; }"]));
    let (status, out, _) = grail(&["run", "--program", "init; colour!", "--graph", "triangle.graph", "--seed", "7"]);
    assert_eq!(status, 0);
    assert!(out.starts_with("step 1: init"), "{out}");
    let (status, _, _) = grail(&["run", "--program", "init", "--graph", "single.graph"]);
    assert_eq!(status, 1);
    let (status, _, _) = grail(&["run", "--program", "null!", "--graph", "empty.graph", "--max-steps", "50"]);
    assert_eq!(status, 3);
}

#[test]
fn satisfies_with_definitions() {
    let (status, out, _) = grail(&["satisfies", "--rules", "colourings.cond", "--graph", "triangle.graph", "--cond", "c"]);
    assert_eq!((status, out.as_str()), (0, "true\n"));
    let (status, _, _) = grail(&["satisfies", "--rules", "colourings.cond", "--graph", "single.graph", "--cond", "c"]);
    assert_eq!(status, 1);
    let (_, _, err) = grail(&["satisfies", "--graph", "empty.graph", "--cond", "ex int k. k = 1"]);
    assert!(err.contains("not anchored"), "{err}");
}

#[test]
fn difftest_statuses() {
    let (status, out, _) = grail(&["difftest", "--kind", "app", "--rules", "delete", "--max-nodes", "2"]);
    assert_eq!(status, 0, "{out}");
    let (status, out, _) = grail(&[
        "difftest",
        "--kind",
        "app",
        "--rules",
        "delete",
        "--max-nodes",
        "2",
        "--mutation",
        "dang-drop-conjunct",
    ]);
    assert_eq!(status, 1, "{out}");
    let (status, out, _) = grail(&["difftest", "--kind", "shift", "--instances", "20", "--max-nodes", "2", "--jobs", "2"]);
    assert_eq!(status, 0, "{out}");
}

#[test]
fn usage_and_load_errors() {
    assert_eq!(grail(&[]).0, 2);
    assert_eq!(grail(&["wpost", "--rules", "init"]).0, 2);
    let (status, _, err) = grail(&["check", "--proof", "missing.proof"]);
    assert_eq!(status, 2);
    assert!(err.contains("missing.proof"), "{err}");
    let (status, _, err) = grail(&["outcomes", "--program", "init;;", "--graph", "empty.graph"]);
    assert_eq!(status, 2);
    assert!(err.contains("<arg>:1:6"), "{err}");
}

#[test]
fn output_is_deterministic() {
    let args = ["difftest", "--kind", "right", "--instances", "30", "--max-nodes", "2", "--seed", "5", "--format", "machine"];
    assert_eq!(grail(&args).1, grail(&args).1);
    let args = ["wpost", "--rules", "colourings.cond", "--rules", "colour", "--cond", "f"];
    assert_eq!(grail(&args).1, grail(&args).1);
}
