//! Values checked against small independent brute-force computations.

use std::collections::BTreeSet;

use grail::econd::Cond;
use grail::expr::HostLabel;
use grail::graph::{HostGraph, NodeId};
use grail::oracle::{enumerate_graphs, preimage_universe, validate_triple_bounded, Universe, ValidityVerdict};
use grail::program::{outcomes, Budget, Exit, Program};
use grail::proof::Triple;
use grail::rules::RuleSchema;
use grail::syntax::{parse_condition, parse_graph, parse_program};
use grail::transform::Transformer;
use grail::workspace::Workspace;

fn ws() -> Workspace {
    let mut ws = Workspace::with_builtins();
    ws.load_file(&std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/colourings.cond"))
        .unwrap();
    ws
}

/// Plain adjacency form: labels by position and edge multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Plain {
    labels: Vec<Vec<i64>>,
    edges: Vec<Vec<usize>>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest relabelling of `g` over all node orders.
fn naive_canon(g: &Plain) -> Plain {
    let n = g.labels.len();
    permutations(n)
        .into_iter()
        .map(|p| Plain {
            labels: (0..n).map(|i| g.labels[p[i]].clone()).collect(),
            edges: (0..n).map(|i| (0..n).map(|j| g.edges[p[i]][p[j]]).collect()).collect(),
        })
        .min()
        .expect("at least the identity")
}

fn plain(g: &HostGraph) -> Plain {
    let ids: Vec<NodeId> = g.node_ids().collect();
    let n = ids.len();
    let mut edges = vec![vec![0; n]; n];
    for (_, e) in g.edges() {
        let s = ids.iter().position(|v| *v == e.src).unwrap();
        let t = ids.iter().position(|v| *v == e.tgt).unwrap();
        edges[s][t] += 1;
    }
    Plain {
        labels: g.nodes().map(|(_, l)| l.unwrap().0.clone()).collect(),
        edges,
    }
}

/// Generate every labelled adjacency matrix, then dedupe.
fn naive_count(max_nodes: usize, pool: &[HostLabel], max_parallel: usize) -> usize {
    let mut seen = BTreeSet::new();
    for n in 0..=max_nodes {
        let slots = n * n;
        let label_choices = pool.len().pow(n as u32);
        let edge_choices = (max_parallel + 1).pow(slots as u32);
        for lc in 0..label_choices {
            let mut k = lc;
            let labels: Vec<Vec<i64>> = (0..n)
                .map(|_| {
                    let l = pool[k % pool.len()].0.clone();
                    k /= pool.len();
                    l
                })
                .collect();
            for ec in 0..edge_choices {
                let mut k = ec;
                let edges: Vec<Vec<usize>> = (0..n)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                let m = k % (max_parallel + 1);
                                k /= max_parallel + 1;
                                m
                            })
                            .collect()
                    })
                    .collect();
                seen.insert(naive_canon(&Plain {
                    labels: labels.clone(),
                    edges,
                }));
            }
        }
    }
    seen.len()
}

fn pool(ls: &[&[i64]]) -> Vec<HostLabel> {
    ls.iter().map(|l| HostLabel(l.to_vec())).collect()
}

#[test]
fn enumeration_counts_match_naive_generation() {
    let u = Universe::new(1, pool(&[&[0], &[1]]), 1);
    assert_eq!(enumerate_graphs(&u).len(), 5);
    for (n, p, par) in [
        (2, pool(&[&[0], &[1]]), 1),
        (2, pool(&[&[0], &[1], &[0, 0]]), 1),
        (2, pool(&[&[5]]), 2),
        (3, pool(&[&[0], &[1]]), 1),
    ] {
        let got = enumerate_graphs(&Universe::new(n, p.clone(), par));
        assert_eq!(got.len(), naive_count(n, &p, par), "n={n} par={par}");
        let keys: BTreeSet<Plain> = got.iter().map(|g| naive_canon(&plain(g))).collect();
        assert_eq!(keys.len(), got.len());
    }
}

#[test]
fn enumeration_count_depends_only_on_pool_size() {
    let a = enumerate_graphs(&Universe::new(2, pool(&[&[0], &[1]]), 1)).len();
    let b = enumerate_graphs(&Universe::new(2, pool(&[&[7], &[9]]), 1)).len();
    assert_eq!(a, b);
}

/// Node maps from the left-hand side into `host` whose labels unify by
/// shape, each with the number of ways to map its edges injectively.
fn naive_match_count(r: &RuleSchema, host: &HostGraph) -> usize {
    let lnodes: Vec<NodeId> = r.lhs.node_ids().collect();
    let hnodes: Vec<NodeId> = host.node_ids().collect();
    let mut count = 0;
    let mut assign = vec![0usize; lnodes.len()];
    fn rec(i: usize, assign: &mut Vec<usize>, r: &RuleSchema, lnodes: &[NodeId], hnodes: &[NodeId], host: &HostGraph, count: &mut usize) {
        if i == lnodes.len() {
            let img = |v: NodeId| hnodes[assign[lnodes.iter().position(|w| *w == v).unwrap()]];
            // edges of L to distinct host edges with matching ends
            let ledges: Vec<_> = r.lhs.edges().map(|(_, e)| e).collect();
            let hedges: Vec<_> = host.edges().collect();
            fn edges(k: usize, ledges: &[grail::graph::Edge], hedges: &[(grail::graph::EdgeId, grail::graph::Edge)], used: &mut Vec<bool>, img: &dyn Fn(NodeId) -> NodeId) -> usize {
                if k == ledges.len() {
                    return 1;
                }
                let mut n = 0;
                for (j, (_, he)) in hedges.iter().enumerate() {
                    if !used[j] && he.src == img(ledges[k].src) && he.tgt == img(ledges[k].tgt) {
                        used[j] = true;
                        n += edges(k + 1, ledges, hedges, used, img);
                        used[j] = false;
                    }
                }
                n
            }
            *count += edges(0, &ledges, &hedges, &mut vec![false; hedges.len()], &img);
            return;
        }
        for h in 0..hnodes.len() {
            if assign[..i].contains(&h) {
                continue;
            }
            let ll = r.lhs.label(lnodes[i]).map(|l| l.len());
            let hl = host.label(hnodes[h]).map(|l| l.len());
            if ll != hl {
                continue;
            }
            assign[i] = h;
            rec(i + 1, assign, r, lnodes, hnodes, host, count);
        }
    }
    rec(0, &mut assign, r, &lnodes, &hnodes, host, &mut count);
    count
}

#[test]
fn match_counts_agree_with_brute_force() {
    let ws = ws();
    let init = ws.rules.get("init").unwrap();
    let colour = ws.rules.get("colour").unwrap();
    let tri = parse_graph("graph { node 0 1:0; node 1 2; node 2 3; edge 0 -- 1; edge 1 -- 2; edge 0 -- 2; }").unwrap();
    // x:i -- y with y one of the two uncoloured nodes; each node map has a
    // single way to place the two directed edges
    assert_eq!(naive_match_count(colour, &tri), 2);
    assert_eq!(colour.find_matches(&tri).len(), 2);
    let single = parse_graph("graph { node 0 1:2; }").unwrap();
    assert_eq!(init.find_matches(&single).len(), 0);
    let two = parse_graph("graph { node 0 1; node 1 2; }").unwrap();
    assert_eq!(init.find_matches(&two).len(), naive_match_count(init, &two));
    assert_eq!(init.find_matches(&two).len(), 2);
}

/// Breadth-first evaluation of `init; colour!` straight from the rules.
fn naive_init_colour(g: &HostGraph, init: &RuleSchema, colour: &RuleSchema) -> (BTreeSet<String>, BTreeSet<String>) {
    let key = |g: &HostGraph| format!("{:?}", naive_canon(&plain(g)));
    let mut ok = BTreeSet::new();
    let mut er = BTreeSet::new();
    let starts: Vec<HostGraph> = init.find_matches(g).iter().map(|m| init.apply(g, m).unwrap().0).collect();
    if starts.is_empty() {
        er.insert(key(g));
    }
    let mut frontier = starts;
    let mut seen = BTreeSet::new();
    while let Some(h) = frontier.pop() {
        if !seen.insert(key(&h)) {
            continue;
        }
        let next: Vec<HostGraph> = colour.find_matches(&h).iter().map(|m| colour.apply(&h, m).unwrap().0).collect();
        if next.is_empty() {
            ok.insert(key(&h));
        }
        frontier.extend(next);
    }
    (ok, er)
}

#[test]
fn outcomes_match_naive_search() {
    let ws = ws();
    let init = ws.rules.get("init").unwrap();
    let colour = ws.rules.get("colour").unwrap();
    let p = parse_program("init; colour!").unwrap();
    let key = |g: &HostGraph| format!("{:?}", naive_canon(&plain(g)));
    let u = Universe::new(3, pool(&[&[1], &[2], &[0, 0]]), 1);
    for g in enumerate_graphs(&u).iter().step_by(7) {
        let o = outcomes(&p, g, &ws.rules, Budget::default()).unwrap();
        let (ok, er) = naive_init_colour(g, init, colour);
        assert_eq!(o.ok().map(key).collect::<BTreeSet<_>>(), ok, "{g}");
        assert_eq!(o.er().map(key).collect::<BTreeSet<_>>(), er, "{g}");
    }
}

fn validate(ws: &Workspace, t: &Triple, max_nodes: usize) -> ValidityVerdict {
    let u_post = Universe::default().with_max_nodes(max_nodes);
    let rules: Vec<&RuleSchema> = t.program.rule_names().iter().map(|n| ws.rules.get(n).unwrap()).collect();
    let u_pre = preimage_universe(&u_post, &rules);
    let sat = Default::default();
    validate_triple_bounded(t, &ws.rules, &u_post, &u_pre, Budget::default(), &sat)
        .unwrap()
        .verdict
}

#[test]
fn finite_failure_triple_is_valid() {
    let ws = ws();
    let na = parse_condition("not App(init)", &ws.rules, &ws.names).unwrap();
    let p = parse_program("init; colour!").unwrap();
    let t = Triple::new(na.clone(), p, Exit::Er, na);
    assert_eq!(validate(&ws, &t, 2), ValidityVerdict::NoCounterexample);
}

#[test]
fn rule_set_success_axiom_is_valid() {
    let ws = ws();
    let init = ws.rules.get("init").unwrap();
    let tr = Transformer::default();
    let pre = Cond::and(Cond::True, tr.app(&[init]));
    let post = tr.wpost(&[init], &Cond::True).unwrap();
    let t = Triple::new(pre, Program::rules(&["init"]), Exit::Ok, post);
    assert_eq!(validate(&ws, &t, 3), ValidityVerdict::NoCounterexample);
}

#[test]
fn preserving_rule_is_reflexive() {
    let ws = ws();
    for c in ["true", "c", "App(init)", "illegal"] {
        let c = parse_condition(c, &ws.rules, &ws.names).unwrap();
        let t = Triple::new(c.clone(), Program::rules(&["null"]), Exit::Ok, c);
        assert_eq!(validate(&ws, &t, 2), ValidityVerdict::NoCounterexample);
    }
}

#[test]
fn refuted_triple_has_a_witness_without_preimage() {
    let ws = ws();
    let init = ws.rules.get("init").unwrap();
    let result = parse_condition("not ex int x. ex { node 0 x:0; }", &ws.rules, &ws.names).unwrap();
    let t = Triple::new(Cond::True, Program::rules(&["init"]), Exit::Ok, result);
    let ValidityVerdict::Counterexample { witness, .. } = validate(&ws, &t, 3) else {
        panic!("expected a counterexample");
    };
    // init always leaves a node labelled v:0 behind
    let has_zero = witness.nodes().any(|(_, l)| l.is_some_and(|l| l.0.len() == 2 && l.0[1] == 0));
    assert!(!has_zero);
    let single5 = parse_graph("graph { node 0 5; }").unwrap();
    let u = Universe::new(3, pool(&[&[5]]), 1);
    let rules = [init];
    let u_pre = preimage_universe(&u, &rules);
    let only5 = Triple::new(
        Cond::True,
        Program::rules(&["init"]),
        Exit::Ok,
        parse_condition("not ex int x. ex { node 0 x:0; }", &ws.rules, &ws.names).unwrap(),
    );
    let rep = validate_triple_bounded(&only5, &ws.rules, &u, &u_pre, Budget::default(), &Default::default()).unwrap();
    assert!(matches!(rep.verdict, ValidityVerdict::Counterexample { .. }));
    assert!(!enumerate_graphs(&u_pre).iter().any(|g| init
        .find_matches(g)
        .iter()
        .any(|m| init.apply(g, m).unwrap().0.isomorphic(&single5))));
}

#[test]
fn validation_is_reproducible() {
    let ws = ws();
    let p = parse_program("init; colour!").unwrap();
    let post = parse_condition("illegal", &ws.rules, &ws.names).unwrap();
    let t = Triple::new(Cond::True, p, Exit::Ok, post);
    assert_eq!(validate(&ws, &t, 2), validate(&ws, &t, 2));
}
