//! Acceptance suite: one line per criterion, each with its time limit.
//! Runs without the libtest harness so the lines are always printed.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use grail::econd::{holds, miniscope, Cond, SatConfig};
use grail::expr::HostLabel;
use grail::graph::HostGraph;
use grail::oracle::{
    difftest_app, difftest_right, DiffReport, difftest_shift, difftest_wpost, enumerate_graphs, preimage_universe,
    random_right_instances, random_shift_instances, validate_triple_bounded, Universe, ValidityVerdict,
};
use grail::program::{outcomes, Budget, Exit, Program};
use grail::proof::{check_proof, DischargeConfig, Triple};
use grail::rules::{RuleEnv, RuleSchema};
use grail::syntax::{parse_condition, parse_program};
use grail::transform::{Mutation, Transformer};
use grail::workspace::Workspace;

const PROOFS: [&str; 3] = ["finite_failure.proof", "illegal_structure.proof", "illegal_colouring.proof"];

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn builtins() -> Workspace {
    let mut ws = Workspace::with_builtins();
    ws.load_file(&data("colourings.cond")).expect("colourings.cond loads");
    ws
}

fn rules<'a>(ws: &'a Workspace, names: &[&str]) -> Vec<&'a RuleSchema> {
    names.iter().map(|n| ws.rules.get(n).expect("builtin rule")).collect()
}

fn sat() -> SatConfig {
    SatConfig {
        warn_unanchored: false,
        ..SatConfig::default()
    }
}

/// Labels `{0, 1, 0:0, 0:1, 1:0, 1:1}`, at most one edge per direction.
fn universe(max_nodes: usize) -> Universe {
    Universe::default().with_max_nodes(max_nodes)
}

fn failure(r: &DiffReport) -> String {
    match r.violations.first() {
        Some(v) => format!("{}: {} violations, first: {} on {}", r.kind, r.violations.len(), v.description, v.witness),
        None => String::new(),
    }
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// 1. The three proof scripts check.
fn proofs_check() -> Outcome {
    let mut notes = Vec::new();
    for p in PROOFS {
        let mut ws = Workspace::new();
        let script = ws.proof(&data(p)).map_err(|e| e.to_string())?;
        let t = Instant::now();
        let v = check_proof(&script.root, &ws.rules, &DischargeConfig::default());
        let took = t.elapsed();
        ensure(v.is_valid(), format!("{p}: {v}"))?;
        ensure(took < Duration::from_secs(5), format!("{p} took {took:?}"))?;
        let kind = match v {
            grail::proof::Verdict::Valid { .. } => "Valid",
            _ => "ValidUpToBound",
        };
        notes.push(format!("{p} {kind} in {took:.2?}"));
    }
    Ok(notes.join(", "))
}

// 2. `null!` has no outcomes at all, and says so without truncation.
fn divergence() -> Outcome {
    let ws = builtins();
    let p = parse_program("null!").map_err(|e| e.to_string())?;
    for g in ["empty.graph", "single.graph", "path.graph"] {
        let host = ws.clone().graph(data(g).to_str().unwrap()).map_err(|e| e.to_string())?;
        let o = outcomes(&p, &host, &ws.rules, Budget::default()).map_err(|e| e.to_string())?;
        ensure(
            o.ok_len() == 0 && o.er_len() == 0 && !o.truncated,
            format!("{g}: ok {} er {} truncated {}", o.ok_len(), o.er_len(), o.truncated),
        )?;
    }
    Ok("3 graphs, ok = er = {}".into())
}

/// Colour of each node (second label component), with its neighbours.
fn colouring(g: &HostGraph) -> Option<(Vec<i64>, bool)> {
    let mut colours = Vec::new();
    for (_, l) in g.nodes() {
        match l {
            Some(HostLabel(vs)) if vs.len() == 2 => colours.push(vs[1]),
            _ => return None,
        }
    }
    let legal = g.edges().all(|(_, e)| {
        e.src == e.tgt || g.label(e.src).map(|l| l.0[1]) != g.label(e.tgt).map(|l| l.0[1])
    });
    colours.sort();
    Some((colours, legal))
}

// 3. init; colour! on the triangle and on a single node 1:2.
fn colouring_behaviours() -> Outcome {
    let ws = builtins();
    let p = parse_program("init; colour!").map_err(|e| e.to_string())?;
    let tri = ws.clone().graph(data("triangle.graph").to_str().unwrap()).map_err(|e| e.to_string())?;
    let o = outcomes(&p, &tri, &ws.rules, Budget::default()).map_err(|e| e.to_string())?;
    ensure(o.er_len() == 0 && !o.truncated, "triangle: er not empty or truncated")?;
    let cols: Vec<_> = o.ok().filter_map(colouring).collect();
    ensure(cols.len() == o.ok_len(), "an ok outcome is not fully coloured")?;
    ensure(cols.iter().any(|(_, legal)| *legal), "no legal colouring")?;
    ensure(
        cols.iter().any(|(c, legal)| !legal && c == &[0, 1, 1]),
        "no illegal 0,1,1 colouring",
    )?;
    let single = ws.clone().graph(data("single.graph").to_str().unwrap()).map_err(|e| e.to_string())?;
    let o2 = outcomes(&p, &single, &ws.rules, Budget::default()).map_err(|e| e.to_string())?;
    ensure(
        o2.ok_len() == 0 && o2.er_len() == 1 && o2.contains(Exit::Er, &single),
        "single node 1:2: er is not exactly the input",
    )?;
    Ok(format!("triangle: {} ok outcomes, er = {{}}; 1:2 fails on itself", o.ok_len()))
}

// 4. App against derivation existence.
fn app_suite() -> Outcome {
    let ws = builtins();
    let rs = rules(&ws, &["init", "colour", "delete", "edge_add", "loop_add"]);
    let r = difftest_app(&Transformer::default(), &rs, &universe(3), &sat());
    ensure(r.passed(), failure(&r))?;
    Ok(format!("{} checks, 0 violations", r.checked))
}

// 5. WPost against direct image computation.
fn wpost_suite() -> Outcome {
    let ws = builtins();
    let rs = rules(&ws, &["init", "colour"]);
    let conds = vec![
        Cond::True,
        Transformer::default().app(&rules(&ws, &["init"])),
        ws.names["c"].clone(),
    ];
    let r = difftest_wpost(&Transformer::default(), &rs, &conds, &universe(2), &sat());
    ensure(r.passed(), failure(&r))?;
    Ok(format!("{} checks, 0 violations", r.checked))
}

fn shift_right_rules(ws: &Workspace) -> Vec<RuleSchema> {
    rules(ws, &["init", "colour", "delete", "edge_add", "loop_add", "create"])
        .into_iter()
        .cloned()
        .collect()
}

// 6. Shift and Right on random instances.
fn shift_right_suites() -> Outcome {
    let ws = builtins();
    let pool = enumerate_graphs(&universe(3));
    let rs = shift_right_rules(&ws);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let shift = random_shift_instances(&mut rng, &rs, &pool, 200);
    let right = random_right_instances(&mut rng, &rs, &pool, 200);
    ensure(shift.len() == 200 && right.len() == 200, "could not draw 200 instances")?;
    let s = difftest_shift(&Transformer::default(), &shift, &sat());
    let r = difftest_right(&Transformer::default(), &right, &sat());
    for rep in [&s, &r] {
        ensure(rep.passed(), failure(rep))?;
    }
    Ok(format!("shift {} checks, right {} checks, 0 violations", s.checked, r.checked))
}

fn program_rules<'a>(env: &'a RuleEnv, p: &Program) -> Vec<&'a RuleSchema> {
    p.rule_names().iter().map(|n| env.get(n).expect("checked")).collect()
}

// 7. Every proved root triple survives the bounded search.
fn soundness() -> Outcome {
    let mut notes = Vec::new();
    for p in PROOFS {
        let mut ws = Workspace::new();
        let script = ws.proof(&data(p)).map_err(|e| e.to_string())?;
        let t = &script.root.conclusion;
        let u_post = universe(3);
        let u_pre = preimage_universe(&u_post, &program_rules(&ws.rules, &t.program));
        let rep = validate_triple_bounded(t, &ws.rules, &u_post, &u_pre, Budget::default(), &sat())
            .map_err(|e| e.to_string())?;
        ensure(
            rep.verdict == ValidityVerdict::NoCounterexample,
            format!("{p}: {:?}", rep.verdict),
        )?;
        notes.push(format!("{p}: {} results", rep.results_checked));
    }
    Ok(notes.join(", "))
}

/// Independent preimage search for a single-rule program.
fn has_preimage(h: &HostGraph, rule: &RuleSchema, pres: &[HostGraph]) -> bool {
    pres.iter().any(|g| {
        rule.find_matches(g)
            .iter()
            .any(|m| rule.apply(g, m).map(|(out, _)| out.isomorphic(h)).unwrap_or(false))
    })
}

// 8. A refuted triple and the five mutants.
fn sensitivity() -> Outcome {
    let ws = builtins();
    let init = ws.rules.get("init").unwrap();
    let result = parse_condition("not ex int x. ex { node 0 x:0; }", &ws.rules, &ws.names).map_err(|e| e.to_string())?;
    let t = Triple::new(Cond::True, Program::rules(&["init"]), Exit::Ok, result.clone());
    let u_post = universe(3);
    let u_pre = preimage_universe(&u_post, &[init]);
    let rep = validate_triple_bounded(&t, &ws.rules, &u_post, &u_pre, Budget::default(), &sat()).map_err(|e| e.to_string())?;
    let ValidityVerdict::Counterexample { witness, .. } = &rep.verdict else {
        return Err("refuted triple was not refuted".into());
    };
    ensure(holds(witness, &miniscope(&result), &sat()), "witness violates the result")?;
    ensure(
        !has_preimage(witness, init, &enumerate_graphs(&u_pre)),
        "witness has a preimage",
    )?;

    let small = universe(2);
    let pool = enumerate_graphs(&universe(3));
    let rs = shift_right_rules(&ws);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let shift = random_shift_instances(&mut rng, &rs, &pool, 200);
    let delete_only: Vec<RuleSchema> = vec![ws.rules.get("delete").unwrap().clone()];
    let right = random_right_instances(&mut ChaCha8Rng::seed_from_u64(2), &delete_only, &pool, 100);
    let mut detected = Vec::new();
    for m in Mutation::ALL {
        let tr = Transformer::mutated(m);
        let violations = match m {
            Mutation::DangDropConjunct => difftest_app(&tr, &rules(&ws, &["delete"]), &small, &sat()).violations.len(),
            Mutation::ShiftNoOverlap | Mutation::ShiftNoIntSubst => difftest_shift(&tr, &shift, &sat()).violations.len(),
            Mutation::RightIgnoreDangling => difftest_right(&tr, &right, &sat()).violations.len(),
            Mutation::WPostSkipInverseDang => {
                difftest_wpost(&tr, &rules(&ws, &["create"]), &[Cond::True], &small, &sat()).violations.len()
            }
        };
        ensure(violations > 0, format!("mutation {m:?} not detected"))?;
        detected.push(format!("{m:?}: {violations}"));
    }
    Ok(format!("witness {witness}; mutants caught ({})", detected.join(", ")))
}

fn grail_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_grail"))
        .args(args)
        .current_dir(data(""))
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("grail {args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).trim().to_string())
}

// 9. CLI output agrees with the hand-transcribed table rows.
fn table_rows() -> Outcome {
    let ws = builtins();
    let rows = [
        (vec!["app", "--rules", "init"], "ex int x. ex { node 0 x; }"),
        (
            vec!["wpost", "--rules", "init", "--cond", "true"],
            "ex int x. ex { node 0 x:0; }",
        ),
        (
            vec!["wpost", "--rules", "colourings.cond", "--rules", "init", "--cond", "c"],
            "ex int x. ex { node 0 x:0; }. ((not ex int d, k. ex { node 1 d:k; }) \
             or (ex int a. ex { node 1 a; }. not ex int d, k. ex { node 2 d:k; }))",
        ),
    ];
    let graphs = enumerate_graphs(&universe(3));
    for (args, expected) in rows {
        let printed = grail_cli(&args)?;
        let got = parse_condition(&printed, &ws.rules, &ws.names).map_err(|e| format!("{printed}: {e}"))?;
        let want = parse_condition(expected, &ws.rules, &ws.names).map_err(|e| e.to_string())?;
        let (got, want) = (miniscope(&got), miniscope(&want));
        if let Some(g) = graphs.iter().find(|g| holds(g, &got, &sat()) != holds(g, &want, &sat())) {
            return Err(format!("{} differs from the table on {g}", args.join(" ")));
        }
    }
    Ok(format!("3 rows equivalent over {} graphs", graphs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("1 proof scripts check", Duration::from_secs(15), proofs_check),
        ("2 divergence of null!", Duration::from_secs(1), divergence),
        ("3 colouring behaviours", Duration::from_secs(10), colouring_behaviours),
        ("4 App differential suite", Duration::from_secs(600), app_suite),
        ("5 WPost differential suite", Duration::from_secs(600), wpost_suite),
        ("6 Shift/Right property suites", Duration::from_secs(300), shift_right_suites),
        ("7 bounded soundness of proved triples", Duration::from_secs(600), soundness),
        ("8 counterexample and mutant sensitivity", Duration::from_secs(300), sensitivity),
        ("9 table rows via the CLI", Duration::from_secs(120), table_rows),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        let t = Instant::now();
        let res = f();
        let took = t.elapsed();
        let res = match res {
            Ok(note) if took <= limit => Ok(note),
            Ok(note) => Err(format!("{note}; took {took:.2?}, limit {limit:?}")),
            Err(e) => Err(e),
        };
        match res {
            Ok(note) => println!("PASS {name} ({took:.2?}): {note}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name} ({took:.2?}): {e}");
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
