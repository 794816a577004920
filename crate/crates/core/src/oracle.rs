//! Bounded brute-force machinery: graph enumeration up to isomorphism,
//! under-approximate validity of triples over finite universes, and
//! differential tests of the transformations against direct computation.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::econd::{holds, miniscope, satisfies_at, Cond, SatConfig};
use crate::expr::{var, CmpOp, Constraint, HostLabel, IntExpr, Label, Var};
use crate::graph::{CanonKey, HostGraph, NodeId, SymGraph};
use crate::program::{outcomes, Budget, Exit};
use crate::proof::Triple;
use crate::rules::{RuleEnv, RuleSchema};
use crate::transform::{freshen, Transformer};

/// Finite set of host graphs: at most `max_nodes` nodes, labels from
/// `label_pool`, at most `max_parallel` edges per ordered node pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Universe {
    pub max_nodes: usize,
    pub label_pool: Vec<HostLabel>,
    pub max_parallel: usize,
}

impl Default for Universe {
    fn default() -> Self {
        Universe::new(3, default_pool(), 1)
    }
}

/// `{0, 1, 0:0, 0:1, 1:0, 1:1}`.
pub fn default_pool() -> Vec<HostLabel> {
    vec![
        HostLabel(vec![0]),
        HostLabel(vec![1]),
        HostLabel(vec![0, 0]),
        HostLabel(vec![0, 1]),
        HostLabel(vec![1, 0]),
        HostLabel(vec![1, 1]),
    ]
}

impl Universe {
    pub fn new(max_nodes: usize, label_pool: Vec<HostLabel>, max_parallel: usize) -> Self {
        let mut pool = label_pool;
        pool.sort();
        pool.dedup();
        Universe {
            max_nodes,
            label_pool: pool,
            max_parallel,
        }
    }

    pub fn with_max_nodes(&self, n: usize) -> Self {
        Universe {
            max_nodes: n,
            ..self.clone()
        }
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pool: Vec<String> = self.label_pool.iter().map(|l| l.to_string()).collect();
        write!(
            f,
            "graphs with at most {} nodes, labels {{{}}}, at most {} parallel edges",
            self.max_nodes,
            pool.join(", "),
            self.max_parallel
        )
    }
}

/// Every graph of the universe, one per isomorphism class, in a fixed
/// order (by node count, then label multiset, then edge pattern).
pub fn enumerate_graphs(u: &Universe) -> Vec<HostGraph> {
    if u.label_pool.is_empty() {
        return vec![HostGraph::new()];
    }
    let mut out = Vec::new();
    for n in 0..=u.max_nodes {
        let multisets = label_multisets(u.label_pool.len(), n);
        // graphs with different label multisets are never isomorphic, so
        // duplicates only need to be removed within one multiset
        let chunks: Vec<Vec<HostGraph>> = multisets
            .par_iter()
            .map(|ls| {
                let labels: Vec<&HostLabel> = ls.iter().map(|&i| &u.label_pool[i]).collect();
                graphs_with_labels(&labels, u.max_parallel)
            })
            .collect();
        out.extend(chunks.into_iter().flatten());
    }
    out
}

fn label_multisets(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, n: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in from..k {
            cur.push(i);
            go(k, n, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, n, 0, &mut Vec::new(), &mut out);
    out
}

fn graphs_with_labels(labels: &[&HostLabel], max_parallel: usize) -> Vec<HostGraph> {
    let n = labels.len();
    let pairs: Vec<(u32, u32)> = (0..n as u32).flat_map(|s| (0..n as u32).map(move |t| (s, t))).collect();
    let base = max_parallel + 1;
    let total = base.checked_pow(pairs.len() as u32).expect("universe too large");
    let mut seen: HashSet<CanonKey<HostLabel>> = HashSet::new();
    let mut out = Vec::new();
    for code in 0..total {
        let mut g = HostGraph::new();
        for (i, l) in labels.iter().enumerate() {
            g.add_node(NodeId(i as u32), Some((*l).clone())).expect("fresh node");
        }
        let mut rest = code;
        for &(s, t) in &pairs {
            for _ in 0..rest % base {
                g.add_edge(NodeId(s), NodeId(t)).expect("nodes exist");
            }
            rest /= base;
        }
        if seen.insert(g.canonical_key()) {
            out.push(g);
        }
    }
    out
}

/// Pre-state universe for validating triples over `rules`: room for the
/// nodes the rules may delete, and labels extended by their proper
/// prefixes (relabelling can lengthen labels).
pub fn preimage_universe(post: &Universe, rules: &[&RuleSchema]) -> Universe {
    let extra = rules.iter().map(|r| r.deleted_nodes().len()).max().unwrap_or(0);
    let mut pool: BTreeSet<HostLabel> = post.label_pool.iter().cloned().collect();
    for l in &post.label_pool {
        for k in 1..l.0.len() {
            pool.insert(HostLabel(l.0[..k].to_vec()));
        }
    }
    Universe::new(post.max_nodes + extra, pool.into_iter().collect(), post.max_parallel)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ValidityVerdict {
    NoCounterexample,
    Counterexample {
        #[serde(serialize_with = "ser_graph")]
        witness: HostGraph,
        searched_preimages: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    #[serde(flatten)]
    pub verdict: ValidityVerdict,
    /// False when some program evaluation was cut off by the budget.
    pub exact: bool,
    /// Post-states satisfying the result.
    pub results_checked: usize,
    /// Pre-states satisfying the presumption.
    pub preimages: usize,
}

fn ser_graph<S: serde::Serializer>(g: &HostGraph, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&g.to_string())
}

/// Checks `[c] P [ε: d]` over finite universes: every `H` of `u_post`
/// satisfying `d` must be an `ε`-outcome of `P` from some `G` of `u_pre`
/// satisfying `c`.
pub fn validate_triple_bounded(
    t: &Triple,
    env: &RuleEnv,
    u_post: &Universe,
    u_pre: &Universe,
    budget: Budget,
    sat: &SatConfig,
) -> Result<ValidityReport, crate::program::ProgramError> {
    t.program.check_names(env)?;
    let presumption = miniscope(&t.presumption);
    let result = miniscope(&t.result);
    let pre: Vec<HostGraph> = enumerate_graphs(u_pre)
        .into_par_iter()
        .filter(|g| holds(g, &presumption, sat))
        .collect();
    let reached: Vec<(Vec<CanonKey<HostLabel>>, bool)> = pre
        .par_iter()
        .map(|g| {
            let o = outcomes(&t.program, g, env, budget).expect("names checked");
            let keys = match t.exit {
                Exit::Ok => o.ok().map(|h| h.canonical_key()).collect(),
                Exit::Er => o.er().map(|h| h.canonical_key()).collect(),
            };
            (keys, o.truncated)
        })
        .collect();
    let exact = reached.iter().all(|(_, tr)| !tr);
    let reachable: HashSet<CanonKey<HostLabel>> = reached.into_iter().flat_map(|(k, _)| k).collect();
    let posts: Vec<HostGraph> = enumerate_graphs(u_post)
        .into_par_iter()
        .filter(|h| holds(h, &result, sat))
        .collect();
    let witness = posts.iter().find(|h| !reachable.contains(&h.canonical_key()));
    let verdict = match witness {
        Some(h) => ValidityVerdict::Counterexample {
            witness: h.clone(),
            searched_preimages: pre.len(),
        },
        None => ValidityVerdict::NoCounterexample,
    };
    Ok(ValidityReport {
        verdict,
        exact,
        results_checked: posts.len(),
        preimages: pre.len(),
    })
}

// ---------------------------------------------------------------------------
// Differential tests

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffKind {
    App,
    Wpost,
    Shift,
    Right,
}

impl fmt::Display for DiffKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiffKind::App => "app",
            DiffKind::Wpost => "wpost",
            DiffKind::Shift => "shift",
            DiffKind::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub description: String,
    #[serde(serialize_with = "ser_graph")]
    pub witness: HostGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub kind: DiffKind,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl DiffReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `G ⊨ App(R)` against the existence of a derivation, for every graph of
/// the universe, each single rule and the whole set.
pub fn difftest_app(tr: &Transformer, rules: &[&RuleSchema], u: &Universe, sat: &SatConfig) -> DiffReport {
    let mut sets: Vec<Vec<&RuleSchema>> = rules.iter().map(|r| vec![*r]).collect();
    if rules.len() > 1 {
        sets.push(rules.to_vec());
    }
    let graphs = enumerate_graphs(u);
    let mut violations = Vec::new();
    let mut checked = 0;
    for set in &sets {
        let app = miniscope(&tr.app(set));
        let names: Vec<&str> = set.iter().map(|r| r.name.as_str()).collect();
        let found: Vec<Violation> = graphs
            .par_iter()
            .filter_map(|g| {
                let expected = set.iter().any(|r| !r.find_matches(g).is_empty());
                let got = holds(g, &app, sat);
                (expected != got).then(|| Violation {
                    description: format!(
                        "App({{{}}}) is {got} but a derivation {}",
                        names.join(", "),
                        if expected { "exists" } else { "does not exist" }
                    ),
                    witness: g.clone(),
                })
            })
            .collect();
        checked += graphs.len();
        violations.extend(found);
    }
    DiffReport {
        kind: DiffKind::App,
        checked,
        violations,
    }
}

/// `H ⊨ WPost(r, c)` against the existence of `G ⊨ c` with `G ⇒_r H`,
/// for every `H` of `u_post` and `G` of the enlarged pre-universe.
pub fn difftest_wpost(
    tr: &Transformer,
    rules: &[&RuleSchema],
    conds: &[Cond],
    u_post: &Universe,
    sat: &SatConfig,
) -> DiffReport {
    let posts = enumerate_graphs(u_post);
    let mut violations = Vec::new();
    let mut checked = 0;
    for r in rules {
        let u_pre = preimage_universe(u_post, &[*r]);
        let pres = enumerate_graphs(&u_pre);
        for c in conds {
            let w = match tr.wpost(&[*r], c) {
                Ok(w) => w,
                Err(e) => {
                    violations.push(Violation {
                        description: format!("WPost({}, {c}) failed: {e}", r.name),
                        witness: HostGraph::new(),
                    });
                    continue;
                }
            };
            let w = miniscope(&w);
            let c_prepared = miniscope(c);
            let image: HashSet<CanonKey<HostLabel>> = pres
                .par_iter()
                .filter(|g| holds(g, &c_prepared, sat))
                .flat_map_iter(|g| {
                    r.find_matches(g)
                        .into_iter()
                        .map(|m| r.apply(g, &m).expect("valid match").0.canonical_key())
                        .collect::<Vec<_>>()
                })
                .collect();
            let found: Vec<Violation> = posts
                .par_iter()
                .filter_map(|h| {
                    let expected = image.contains(&h.canonical_key());
                    let got = holds(h, &w, sat);
                    (expected != got).then(|| Violation {
                        description: format!(
                            "WPost({}, {c}) is {got} but a preimage {}",
                            r.name,
                            if expected { "exists" } else { "does not exist" }
                        ),
                        witness: h.clone(),
                    })
                })
                .collect();
            checked += posts.len();
            violations.extend(found);
        }
    }
    DiffReport {
        kind: DiffKind::Wpost,
        checked,
        violations,
    }
}

/// One instance of the shift property: an E-constraint, a rule and a graph.
#[derive(Debug, Clone)]
pub struct ShiftInstance {
    pub rule: RuleSchema,
    pub cond: Cond,
    pub graph: HostGraph,
}

/// One instance of the right property: a condition over the rule's
/// left-hand side and a graph the rule can be applied to.
#[derive(Debug, Clone)]
pub struct RightInstance {
    pub rule: RuleSchema,
    pub cond: Cond,
    pub graph: HostGraph,
}

/// For every match `g` of the rule: `G ⊨ c` iff `g ⊨ Shift(r, c)`.
pub fn difftest_shift(tr: &Transformer, instances: &[ShiftInstance], sat: &SatConfig) -> DiffReport {
    let violations: Vec<Violation> = instances
        .par_iter()
        .flat_map_iter(|inst| {
            let fresh = freshen(&inst.cond, &inst.rule);
            let shifted = tr.shift(&inst.rule, &fresh).expect("freshened");
            let expected = holds(&inst.graph, &inst.cond, sat);
            inst.rule
                .find_matches(&inst.graph)
                .into_iter()
                .filter_map(|m| {
                    let got = satisfies_at(&inst.graph, &m.morphism, &m.interp, &shifted, sat);
                    (got != expected).then(|| Violation {
                        description: format!(
                            "rule {}, condition {}: G ⊨ c is {expected}, shifted condition at match {} is {got}",
                            inst.rule.name, inst.cond, m.interp
                        ),
                        witness: inst.graph.clone(),
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect();
    DiffReport {
        kind: DiffKind::Shift,
        checked: instances.len(),
        violations,
    }
}

/// For every derivation `G ⇒ H` with match `g` and comatch `h`:
/// `g ⊨ c` iff `h ⊨ Right(r, c)`.
pub fn difftest_right(tr: &Transformer, instances: &[RightInstance], sat: &SatConfig) -> DiffReport {
    let violations: Vec<Violation> = instances
        .par_iter()
        .flat_map_iter(|inst| {
            let moved = tr.right(&inst.rule, &inst.cond);
            inst.rule
                .find_matches(&inst.graph)
                .into_iter()
                .filter_map(|m| {
                    let (h, comatch) = inst.rule.apply(&inst.graph, &m).expect("valid match");
                    let expected = satisfies_at(&inst.graph, &m.morphism, &m.interp, &inst.cond, sat);
                    let got = satisfies_at(&h, &comatch, &m.interp, &moved, sat);
                    (got != expected).then(|| Violation {
                        description: format!(
                            "rule {}, condition {}: match satisfies it: {expected}, comatch satisfies Right: {got}",
                            inst.rule.name,
                            crate::econd::render(&inst.cond, &inst.rule.lhs)
                        ),
                        witness: inst.graph.clone(),
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect();
    DiffReport {
        kind: DiffKind::Right,
        checked: instances.len(),
        violations,
    }
}

// ---------------------------------------------------------------------------
// Random instances

/// Random E-condition over `ctx`. Integer quantifiers introduced here are
/// always anchored in a label of the graph that follows them, and bound
/// names never clash with `avoid`.
pub fn random_condition<R: Rng>(rng: &mut R, ctx: &SymGraph, scope: &[Var], depth: u32) -> Cond {
    let mut counter = 0usize;
    gen_cond(rng, ctx, scope, depth, &mut counter)
}

fn gen_cond<R: Rng>(rng: &mut R, ctx: &SymGraph, scope: &[Var], depth: u32, counter: &mut usize) -> Cond {
    let pick = if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..8) };
    match pick {
        0 => {
            if scope.is_empty() || rng.gen_bool(0.3) {
                if rng.gen_bool(0.5) {
                    Cond::True
                } else {
                    Cond::False
                }
            } else {
                Cond::Constraint(gen_constraint(rng, scope))
            }
        }
        1 if !scope.is_empty() => Cond::Constraint(gen_constraint(rng, scope)),
        1 => Cond::True,
        2 => Cond::not(gen_cond(rng, ctx, scope, depth - 1, counter)),
        3 => Cond::and(
            gen_cond(rng, ctx, scope, depth - 1, counter),
            gen_cond(rng, ctx, scope, depth - 1, counter),
        ),
        4 => Cond::or(
            gen_cond(rng, ctx, scope, depth - 1, counter),
            gen_cond(rng, ctx, scope, depth - 1, counter),
        ),
        _ => gen_exists(rng, ctx, scope, depth, counter),
    }
}

fn gen_constraint<R: Rng>(rng: &mut R, scope: &[Var]) -> Constraint {
    let x = IntExpr::Var(scope.choose(rng).expect("nonempty").clone());
    let rhs = if rng.gen_bool(0.5) {
        IntExpr::Var(scope.choose(rng).expect("nonempty").clone())
    } else {
        IntExpr::Const(rng.gen_range(0..=2))
    };
    let op = *[CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le].choose(rng).expect("nonempty");
    let rhs = if rng.gen_bool(0.2) {
        IntExpr::add(rhs, IntExpr::Const(1))
    } else {
        rhs
    };
    Constraint::cmp(op, x, rhs)
}

fn gen_exists<R: Rng>(rng: &mut R, ctx: &SymGraph, scope: &[Var], depth: u32, counter: &mut usize) -> Cond {
    let mut g = ctx.clone();
    let new_nodes = rng.gen_range(0..=2usize);
    let mut binders: Vec<Var> = Vec::new();
    for _ in 0..new_nodes {
        let len = rng.gen_range(1..=2usize);
        let mut items = Vec::new();
        for _ in 0..len {
            let item = match rng.gen_range(0..4) {
                0 => IntExpr::Const(rng.gen_range(0..=1)),
                1 if !scope.is_empty() => IntExpr::Var(scope.choose(rng).expect("nonempty").clone()),
                _ => {
                    *counter += 1;
                    let x = var(&format!("q{counter}"));
                    binders.push(x.clone());
                    IntExpr::Var(x)
                }
            };
            items.push(item);
        }
        let label = if rng.gen_bool(0.1) { None } else { Some(Label(items)) };
        g.add_fresh_node(label);
    }
    let all: Vec<NodeId> = g.node_ids().collect();
    if !all.is_empty() {
        let new_edges = rng.gen_range(0..=2usize);
        for _ in 0..new_edges {
            let s = *all.choose(rng).expect("nonempty");
            let t = *all.choose(rng).expect("nonempty");
            if s == t && rng.gen_bool(0.5) {
                continue;
            }
            g.add_edge(s, t).expect("nodes exist");
        }
    }
    // only keep binders that ended up in some label
    let used = crate::econd::graph_vars(&g);
    binders.retain(|b| used.contains(b));
    binders.dedup();
    let mut inner_scope: Vec<Var> = scope.to_vec();
    inner_scope.extend(binders.iter().cloned());
    let body = if depth == 0 {
        Cond::True
    } else {
        gen_cond(rng, &g, &inner_scope, depth - 1, counter)
    };
    Cond::exists_ints(binders, Cond::exists(g, body))
}

/// A graph drawn uniformly from `pool` that admits at least one match of
/// `rule`, if any does.
pub fn random_matched_graph<'a, R: Rng>(rng: &mut R, rule: &RuleSchema, pool: &'a [HostGraph]) -> Option<&'a HostGraph> {
    for _ in 0..64 {
        let g = pool.choose(rng)?;
        if !rule.find_matches(g).is_empty() {
            return Some(g);
        }
    }
    pool.iter().find(|g| !rule.find_matches(g).is_empty())
}

/// Rules with at least one match in some graph of `pool`.
fn applicable_somewhere<'a>(rules: &'a [RuleSchema], pool: &[HostGraph]) -> Vec<&'a RuleSchema> {
    rules
        .iter()
        .filter(|r| pool.iter().any(|g| !r.find_matches(g).is_empty()))
        .collect()
}

/// Random Shift instances; empty when no rule matches any graph of `pool`.
pub fn random_shift_instances<R: Rng>(rng: &mut R, rules: &[RuleSchema], pool: &[HostGraph], n: usize) -> Vec<ShiftInstance> {
    let rules = applicable_somewhere(rules, pool);
    let mut out = Vec::with_capacity(n);
    while out.len() < n && !rules.is_empty() {
        let rule = *rules.choose(rng).expect("rules");
        let Some(graph) = random_matched_graph(rng, rule, pool) else { continue };
        let cond = random_condition(rng, &SymGraph::new(), &[], 2);
        out.push(ShiftInstance {
            rule: rule.clone(),
            cond,
            graph: graph.clone(),
        });
    }
    out
}

pub fn random_right_instances<R: Rng>(rng: &mut R, rules: &[RuleSchema], pool: &[HostGraph], n: usize) -> Vec<RightInstance> {
    let rules = applicable_somewhere(rules, pool);
    let mut out = Vec::with_capacity(n);
    while out.len() < n && !rules.is_empty() {
        let rule = *rules.choose(rng).expect("rules");
        let Some(graph) = random_matched_graph(rng, rule, pool) else { continue };
        let scope: Vec<Var> = rule.lhs_vars().into_iter().collect();
        let cond = random_condition(rng, &rule.lhs, &scope, 2);
        out.push(RightInstance {
            rule: rule.clone(),
            cond,
            graph: graph.clone(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_count(u: &Universe) -> usize {
        // generate every labelled graph, then dedupe by pairwise isomorphism
        let mut reps: Vec<HostGraph> = Vec::new();
        for n in 0..=u.max_nodes {
            let pairs = n * n;
            let labelings = u.label_pool.len().pow(n as u32);
            for lcode in 0..labelings {
                for ecode in 0..(u.max_parallel + 1).pow(pairs as u32) {
                    let mut g = HostGraph::new();
                    let mut l = lcode;
                    for i in 0..n {
                        g.add_node(NodeId(i as u32), Some(u.label_pool[l % u.label_pool.len()].clone()))
                            .unwrap();
                        l /= u.label_pool.len();
                    }
                    let mut e = ecode;
                    for s in 0..n {
                        for t in 0..n {
                            for _ in 0..e % (u.max_parallel + 1) {
                                g.add_edge(NodeId(s as u32), NodeId(t as u32)).unwrap();
                            }
                            e /= u.max_parallel + 1;
                        }
                    }
                    if !reps.iter().any(|r| r.isomorphic(&g)) {
                        reps.push(g);
                    }
                }
            }
        }
        reps.len()
    }

    fn pool(vals: &[i64]) -> Vec<HostLabel> {
        vals.iter().map(|v| HostLabel(vec![*v])).collect()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_graphs(&Universe::new(0, pool(&[0]), 1)).len(), 1);
        let u = Universe::new(1, pool(&[0, 1]), 1);
        assert_eq!(enumerate_graphs(&u).len(), 5);
        let u2 = Universe::new(2, pool(&[0, 1]), 1);
        assert_eq!(enumerate_graphs(&u2).len(), naive_count(&u2));
        let u3 = Universe::new(2, pool(&[7, 9]), 1);
        assert_eq!(enumerate_graphs(&u2).len(), enumerate_graphs(&u3).len());
        let u4 = Universe::new(2, pool(&[0]), 2);
        assert_eq!(enumerate_graphs(&u4).len(), naive_count(&u4));
    }

    #[test]
    fn enumeration_has_no_isomorphic_pairs() {
        let gs = enumerate_graphs(&Universe::new(2, pool(&[0, 1]), 1));
        for (i, a) in gs.iter().enumerate() {
            for b in &gs[i + 1..] {
                assert!(!a.isomorphic(b));
            }
        }
    }

    #[test]
    fn preimage_universe_adds_prefixes() {
        let u = preimage_universe(&Universe::new(2, vec![HostLabel(vec![3, 4])], 1), &[]);
        assert_eq!(u.label_pool, vec![HostLabel(vec![3]), HostLabel(vec![3, 4])]);
        assert_eq!(u.max_nodes, 2);
    }
}

#[cfg(test)]
mod diff_tests {
    use super::*;
    use crate::rules::tests::{colour, init};
    use crate::transform::Mutation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn delete() -> RuleSchema {
        let mut lhs = SymGraph::new();
        lhs.add_node(NodeId(0), Some(Label(vec![IntExpr::var("x")]))).unwrap();
        RuleSchema::new("delete", vec![var("x")], lhs, SymGraph::new()).unwrap()
    }

    fn create() -> RuleSchema {
        let mut rhs = SymGraph::new();
        rhs.add_node(NodeId(0), Some(Label(vec![IntExpr::Const(0)]))).unwrap();
        RuleSchema::new("create", vec![], SymGraph::new(), rhs).unwrap()
    }

    #[test]
    fn app_small() {
        let (i, c, d) = (init(), colour(), delete());
        let r = difftest_app(&Transformer::default(), &[&i, &c, &d], &Universe::default().with_max_nodes(2), &SatConfig::default());
        assert!(r.passed(), "{:?}", &r.violations[..r.violations.len().min(3)]);
        let m = difftest_app(&Transformer::mutated(Mutation::DangDropConjunct), &[&d], &Universe::default().with_max_nodes(2), &SatConfig::default());
        assert!(!m.passed());
    }

    #[test]
    fn wpost_small() {
        let (i, c, d, k) = (init(), colour(), delete(), create());
        let conds = vec![Cond::True, Transformer::default().app(&[&i])];
        let r = difftest_wpost(&Transformer::default(), &[&i, &c, &d, &k], &conds, &Universe::default().with_max_nodes(2), &SatConfig::default());
        assert!(r.passed(), "{:?}", &r.violations[..r.violations.len().min(3)]);
    }

    #[test]
    fn shift_and_right_random() {
        let rules = vec![init(), colour(), delete(), create()];
        let pool = enumerate_graphs(&Universe::default().with_max_nodes(2));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let si = random_shift_instances(&mut rng, &rules, &pool, 60);
        let r = difftest_shift(&Transformer::default(), &si, &SatConfig::default());
        assert!(r.passed(), "{:?}", &r.violations[..r.violations.len().min(3)]);
        let ri = random_right_instances(&mut rng, &rules, &pool, 60);
        let r = difftest_right(&Transformer::default(), &ri, &SatConfig::default());
        assert!(r.passed(), "{:?}", &r.violations[..r.violations.len().min(3)]);
    }
}

