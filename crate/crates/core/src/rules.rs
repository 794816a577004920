//! Rule schemata with relabelling: instantiation, match finding with the
//! dangling condition, direct derivations and rule inversion.
//!
//! A schema is written as two expression-labelled graphs. Nodes whose ids
//! occur on both sides are preserved; the interface consists of exactly
//! those nodes, unlabelled, so a preserved node may be relabelled. Edges are
//! never preserved.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::expr::{BinOp, HostLabel, IntExpr, Interp, Var};
use crate::graph::{EdgeId, HostGraph, Morphism, NodeId, SymGraph};
use crate::matching::match_graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule {rule}: variable {var} is not declared")]
    Undeclared { rule: String, var: Var },
    #[error("rule {rule}: right-hand variable {var} does not occur on the left")]
    RhsOnly { rule: String, var: Var },
    #[error("rule {rule}: variable {var} cannot be determined by matching the left-hand side")]
    Undetermined { rule: String, var: Var },
    #[error("rule {rule}: interpretation does not bind {var}")]
    MissingBinding { rule: String, var: Var },
    #[error("rule {rule}: empty label on node {node}")]
    EmptyLabel { rule: String, node: NodeId },
    #[error("rule {rule}: node {node} is unlabelled")]
    Unlabelled { rule: String, node: NodeId },
    #[error("rule {rule}: invalid match: {reason}")]
    InvalidMatch { rule: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleSchema {
    pub name: String,
    /// Declared variables, in declaration order.
    pub params: Vec<Var>,
    pub lhs: SymGraph,
    pub rhs: SymGraph,
}

/// A rule over concrete labels, `L <- K -> R` with inclusions by ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteRule {
    pub lhs: HostGraph,
    pub interface: HostGraph,
    pub rhs: HostGraph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchCandidate {
    pub interp: Interp,
    /// Morphism from the instantiated left-hand side into the host graph.
    pub morphism: Morphism,
}

impl RuleSchema {
    /// Builds and validates a schema for use in programs.
    pub fn new(name: &str, params: Vec<Var>, lhs: SymGraph, rhs: SymGraph) -> Result<Self, RuleError> {
        let r = RuleSchema {
            name: name.to_string(),
            params,
            lhs,
            rhs,
        };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<(), RuleError> {
        let rule = || self.name.clone();
        for g in [&self.lhs, &self.rhs] {
            for (v, l) in g.nodes() {
                match l {
                    None => return Err(RuleError::Unlabelled { rule: rule(), node: v }),
                    Some(l) if l.is_empty() => return Err(RuleError::EmptyLabel { rule: rule(), node: v }),
                    _ => {}
                }
            }
        }
        let lhs_vars = self.lhs_vars();
        for v in lhs_vars.iter().chain(&self.rhs_vars()) {
            if !self.params.contains(v) {
                return Err(RuleError::Undeclared { rule: rule(), var: v.clone() });
            }
        }
        for v in self.rhs_vars() {
            if !lhs_vars.contains(&v) {
                return Err(RuleError::RhsOnly { rule: rule(), var: v });
            }
        }
        let known = determinable_vars(&self.lhs);
        if let Some(v) = lhs_vars.iter().find(|v| !known.contains(*v)) {
            return Err(RuleError::Undetermined { rule: rule(), var: v.clone() });
        }
        Ok(())
    }

    pub fn lhs_vars(&self) -> BTreeSet<Var> {
        crate::econd::graph_vars(&self.lhs)
    }

    pub fn rhs_vars(&self) -> BTreeSet<Var> {
        crate::econd::graph_vars(&self.rhs)
    }

    /// Variables of the left-hand side in declaration order.
    pub fn lhs_params(&self) -> Vec<Var> {
        let vs = self.lhs_vars();
        self.ordered(&vs)
    }

    /// Variables of the right-hand side in declaration order.
    pub fn rhs_params(&self) -> Vec<Var> {
        let vs = self.rhs_vars();
        self.ordered(&vs)
    }

    fn ordered(&self, vs: &BTreeSet<Var>) -> Vec<Var> {
        let mut out: Vec<Var> = self.params.iter().filter(|p| vs.contains(*p)).cloned().collect();
        for v in vs {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    pub fn preserved(&self) -> BTreeSet<NodeId> {
        self.lhs.node_ids().filter(|v| self.rhs.has_node(*v)).collect()
    }

    pub fn deleted_nodes(&self) -> BTreeSet<NodeId> {
        self.lhs.node_ids().filter(|v| !self.rhs.has_node(*v)).collect()
    }

    pub fn created_nodes(&self) -> BTreeSet<NodeId> {
        self.rhs.node_ids().filter(|v| !self.lhs.has_node(*v)).collect()
    }

    /// The interface graph: preserved nodes, unlabelled, no edges.
    pub fn interface(&self) -> SymGraph {
        let mut k = SymGraph::new();
        for v in self.preserved() {
            k.add_node(v, None).expect("unique ids");
        }
        k
    }

    /// Swaps the two sides. The result may violate `vars(R) ⊆ vars(L)`; it
    /// is meant for constructions that only inspect its left-hand side and
    /// interface.
    pub fn invert(&self) -> RuleSchema {
        RuleSchema {
            name: format!("{}^-1", self.name),
            params: self.params.clone(),
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
        }
    }

    pub fn instantiate(&self, interp: &Interp) -> Result<Option<ConcreteRule>, RuleError> {
        for v in self.lhs_vars() {
            if !interp.contains(&v) {
                return Err(RuleError::MissingBinding {
                    rule: self.name.clone(),
                    var: v,
                });
            }
        }
        let eval = |g: &SymGraph| g.try_map_labels(|l| l.eval(interp));
        let (Some(lhs), Some(rhs)) = (eval(&self.lhs), eval(&self.rhs)) else {
            return Ok(None);
        };
        let interface = self.interface().map_labels(|_: &crate::expr::Label| HostLabel(Vec::new()));
        Ok(Some(ConcreteRule { lhs, interface, rhs }))
    }

    /// All matches `(I, g)`: interpretations determined by unifying the
    /// left-hand labels, injective morphisms satisfying the dangling
    /// condition. Interpretations that make some label undefined are
    /// skipped.
    pub fn find_matches(&self, host: &HostGraph) -> Vec<MatchCandidate> {
        let bindable = self.lhs_vars();
        let deleted = self.deleted_nodes();
        let mut out = Vec::new();
        let mut interp = Interp::new();
        let _ = match_graph(&self.lhs, host, &Morphism::default(), &mut interp, &bindable, &mut |m, i, pending| {
            if !pending.is_empty() || bindable.iter().any(|v| !i.contains(v)) {
                return ControlFlow::Continue(());
            }
            if self.rhs.try_map_labels(|l| l.eval(i)).is_none() {
                return ControlFlow::Continue(());
            }
            if dangling_ok(host, m, &deleted) {
                let interp: Interp = i.to_map().into_iter().filter(|(v, _)| bindable.contains(v)).collect();
                out.push(MatchCandidate {
                    interp,
                    morphism: m.clone(),
                });
            }
            ControlFlow::Continue(())
        });
        out
    }

    /// Checks that `m` is a valid match of this schema in `host`.
    pub fn check_match(&self, host: &HostGraph, m: &MatchCandidate) -> Result<ConcreteRule, RuleError> {
        let invalid = |reason: String| RuleError::InvalidMatch {
            rule: self.name.clone(),
            reason,
        };
        let concrete = self
            .instantiate(&m.interp)?
            .ok_or_else(|| invalid("instantiation is undefined".into()))?;
        m.morphism
            .check_injective(&concrete.lhs, host)
            .map_err(|e| invalid(e.to_string()))?;
        if !dangling_ok(host, &m.morphism, &self.deleted_nodes()) {
            return Err(invalid("dangling condition violated".into()));
        }
        Ok(concrete)
    }

    /// Applies the rule at a match: deletes the matched edges and the
    /// images of deleted nodes, relabels preserved nodes, adds the created
    /// nodes and all right-hand edges. Returns the result and the comatch.
    pub fn apply(&self, host: &HostGraph, m: &MatchCandidate) -> Result<(HostGraph, Morphism), RuleError> {
        let concrete = self.check_match(host, m)?;
        Ok(apply_concrete(&concrete, host, &m.morphism))
    }
}

/// Applies an instantiated rule at an injective morphism known to satisfy
/// the dangling condition.
pub fn apply_concrete(rule: &ConcreteRule, host: &HostGraph, g: &Morphism) -> (HostGraph, Morphism) {
    let mut h = host.clone();
    for e in rule.lhs.edge_ids() {
        h.remove_edge(g.edge(e));
    }
    for v in rule.lhs.node_ids() {
        if !rule.rhs.has_node(v) {
            h.remove_node(g.node(v));
        }
    }
    let mut comatch = Morphism::default();
    for (v, l) in rule.rhs.nodes() {
        let label = l.cloned().expect("right-hand side is totally labelled");
        if rule.lhs.has_node(v) {
            let w = g.node(v);
            h.set_label(w, Some(label)).expect("preserved node exists");
            comatch.nodes.insert(v, w);
        } else {
            let w = h.add_fresh_node(Some(label));
            comatch.nodes.insert(v, w);
        }
    }
    for (e, d) in rule.rhs.edges() {
        let id = h
            .add_edge(comatch.node(d.src), comatch.node(d.tgt))
            .expect("endpoints exist");
        comatch.edges.insert(e, id);
    }
    (h, comatch)
}

/// The dangling condition: no edge outside the match image is incident to
/// the image of a deleted node.
pub fn dangling_ok(host: &HostGraph, g: &Morphism, deleted: &BTreeSet<NodeId>) -> bool {
    let images: BTreeSet<NodeId> = deleted.iter().map(|v| g.node(*v)).collect();
    if images.is_empty() {
        return true;
    }
    let matched: BTreeSet<EdgeId> = g.edge_image();
    host.edges()
        .all(|(e, d)| matched.contains(&e) || (!images.contains(&d.src) && !images.contains(&d.tgt)))
}

/// Variables that unification against concrete labels always determines:
/// bare items first, then items with one unknown variable on an invertible
/// path (addition, subtraction, negation, multiplication by a non-zero
/// constant), iterated to a fixpoint.
pub fn determinable_vars(lhs: &SymGraph) -> BTreeSet<Var> {
    let items: Vec<&IntExpr> = lhs
        .nodes()
        .filter_map(|(_, l)| l)
        .flat_map(|l| l.items())
        .collect();
    let mut known: BTreeSet<Var> = BTreeSet::new();
    loop {
        let before = known.len();
        for e in &items {
            let unknown: Vec<Var> = e.vars().into_iter().filter(|v| !known.contains(v)).collect();
            if let [x] = unknown.as_slice() {
                if invertible(e, x) {
                    known.insert(x.clone());
                }
            }
        }
        if known.len() == before {
            return known;
        }
    }
}

fn invertible(e: &IntExpr, x: &str) -> bool {
    match e {
        IntExpr::Var(v) => &**v == x,
        IntExpr::Const(_) => false,
        IntExpr::Neg(inner) => invertible(inner, x),
        IntExpr::Bin(op, l, r) => {
            let (inner, other) = match (l.mentions(x), r.mentions(x)) {
                (true, false) => (l, r),
                (false, true) => (r, l),
                _ => return false,
            };
            match op {
                BinOp::Add | BinOp::Sub => invertible(inner, x),
                BinOp::Mul => matches!(other.as_const(), Some(k) if k != 0) && invertible(inner, x),
                BinOp::Div => false,
            }
        }
    }
}

impl fmt::Display for RuleSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|v| v.to_string()).collect();
        write!(f, "rule {}({}) {{\n  lhs {{", self.name, params.join(", "))?;
        write_body(f, &self.lhs)?;
        f.write_str(" }\n  rhs {")?;
        write_body(f, &self.rhs)?;
        f.write_str(" }\n}")
    }
}

fn write_body(f: &mut fmt::Formatter<'_>, g: &SymGraph) -> fmt::Result {
    for (v, l) in g.nodes() {
        match l {
            Some(l) => write!(f, " node {v} {l};")?,
            None => write!(f, " node {v};")?,
        }
    }
    for (_, e) in g.edges() {
        write!(f, " edge {} -> {};", e.src, e.tgt)?;
    }
    Ok(())
}

/// Named rule schemata available to programs and proofs.
#[derive(Debug, Clone, Default)]
pub struct RuleEnv {
    rules: BTreeMap<String, RuleSchema>,
}

impl RuleEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, rule: RuleSchema) -> Option<RuleSchema> {
        self.rules.insert(rule.name.clone(), rule)
    }

    pub fn get(&self, name: &str) -> Option<&RuleSchema> {
        self.rules.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.rules.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &RuleSchema> {
        self.rules.values()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.rules.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::expr::{var, Label};

    fn lab(items: Vec<IntExpr>) -> Option<Label> {
        Some(Label(items))
    }

    fn v(name: &str) -> IntExpr {
        IntExpr::var(name)
    }

    pub(crate) fn init() -> RuleSchema {
        let mut lhs = SymGraph::new();
        lhs.add_node(NodeId(0), lab(vec![v("x")])).unwrap();
        let mut rhs = SymGraph::new();
        rhs.add_node(NodeId(0), lab(vec![v("x"), IntExpr::Const(0)])).unwrap();
        RuleSchema::new("init", vec![var("x")], lhs, rhs).unwrap()
    }

    pub(crate) fn colour() -> RuleSchema {
        let mut lhs = SymGraph::new();
        lhs.add_node(NodeId(0), lab(vec![v("x"), v("i")])).unwrap();
        lhs.add_node(NodeId(1), lab(vec![v("y")])).unwrap();
        lhs.add_edge(NodeId(0), NodeId(1)).unwrap();
        lhs.add_edge(NodeId(1), NodeId(0)).unwrap();
        let mut rhs = SymGraph::new();
        rhs.add_node(NodeId(0), lab(vec![v("x"), v("i")])).unwrap();
        rhs.add_node(
            NodeId(1),
            lab(vec![v("y"), IntExpr::bin(BinOp::Add, v("i"), IntExpr::Const(1))]),
        )
        .unwrap();
        rhs.add_edge(NodeId(0), NodeId(1)).unwrap();
        rhs.add_edge(NodeId(1), NodeId(0)).unwrap();
        RuleSchema::new("colour", vec![var("x"), var("y"), var("i")], lhs, rhs).unwrap()
    }

    fn host(nodes: &[(u32, &[i64])], edges: &[(u32, u32)]) -> HostGraph {
        let mut g = HostGraph::new();
        for (id, l) in nodes {
            g.add_node(NodeId(*id), Some(HostLabel(l.to_vec()))).unwrap();
        }
        for (s, t) in edges {
            g.add_edge(NodeId(*s), NodeId(*t)).unwrap();
        }
        g
    }

    fn undirected_triangle(labels: [&[i64]; 3]) -> HostGraph {
        host(
            &[(0, labels[0]), (1, labels[1]), (2, labels[2])],
            &[(0, 1), (1, 0), (1, 2), (2, 1), (2, 0), (0, 2)],
        )
    }

    #[test]
    fn instantiate_init() {
        let c = init().instantiate(&Interp::new().with("x", 5)).unwrap().unwrap();
        assert_eq!(c.lhs.label(NodeId(0)), Some(&HostLabel(vec![5])));
        assert_eq!(c.rhs.label(NodeId(0)), Some(&HostLabel(vec![5, 0])));
        assert_eq!(c.interface.label(NodeId(0)), None);
        assert!(init().instantiate(&Interp::new()).is_err());
    }

    #[test]
    fn instantiate_undefined_label() {
        let mut lhs = SymGraph::new();
        lhs.add_node(NodeId(0), lab(vec![v("x")])).unwrap();
        let mut rhs = SymGraph::new();
        rhs.add_node(NodeId(0), lab(vec![IntExpr::bin(BinOp::Div, IntExpr::Const(1), v("x"))]))
            .unwrap();
        let r = RuleSchema::new("inv", vec![var("x")], lhs, rhs).unwrap();
        assert_eq!(r.instantiate(&Interp::new().with("x", 0)).unwrap(), None);
        assert!(r.instantiate(&Interp::new().with("x", 2)).unwrap().is_some());
    }

    #[test]
    fn instantiate_colour_shape() {
        let i = Interp::new().with("x", 8).with("y", 8).with("i", 0);
        let c = colour().instantiate(&i).unwrap().unwrap();
        assert_eq!(c.lhs.label(NodeId(0)), Some(&HostLabel(vec![8, 0])));
        assert_eq!(c.lhs.label(NodeId(1)), Some(&HostLabel(vec![8])));
        assert_eq!(c.rhs.label(NodeId(1)), Some(&HostLabel(vec![8, 1])));
    }

    #[test]
    fn init_matches() {
        assert!(init().find_matches(&host(&[(0, &[1, 2])], &[])).is_empty());
        assert_eq!(init().find_matches(&host(&[(0, &[1]), (1, &[2])], &[])).len(), 2);
    }

    /// Brute force over all injective node maps and edge assignments.
    fn colour_brute_force(g: &HostGraph) -> usize {
        let ids: Vec<NodeId> = g.node_ids().collect();
        let mut count = 0;
        for &a in &ids {
            for &b in &ids {
                if a == b {
                    continue;
                }
                let (Some(la), Some(lb)) = (g.label(a), g.label(b)) else { continue };
                if la.len() != 2 || lb.len() != 1 {
                    continue;
                }
                let ab = g.edges().filter(|(_, e)| e.src == a && e.tgt == b).count();
                let ba = g.edges().filter(|(_, e)| e.src == b && e.tgt == a).count();
                count += ab * ba;
            }
        }
        count
    }

    #[test]
    fn colour_matches_on_triangle() {
        let g = undirected_triangle([&[1, 0], &[2], &[3]]);
        let expected = colour_brute_force(&g);
        assert_eq!(expected, 2);
        assert_eq!(colour().find_matches(&g).len(), expected);
    }

    #[test]
    fn apply_init_and_colour() {
        let g = host(&[(0, &[5])], &[]);
        let m = &init().find_matches(&g)[0];
        let (h, comatch) = init().apply(&g, m).unwrap();
        assert_eq!(h.label(comatch.node(NodeId(0))), Some(&HostLabel(vec![5, 0])));

        let g = host(&[(0, &[1, 0]), (1, &[2])], &[(0, 1), (1, 0)]);
        let ms = colour().find_matches(&g);
        assert_eq!(ms.len(), 1);
        let (h, _) = colour().apply(&g, &ms[0]).unwrap();
        let expected = host(&[(0, &[1, 0]), (1, &[2, 1])], &[(0, 1), (1, 0)]);
        assert!(h.isomorphic(&expected));
    }

    #[test]
    fn identity_schema_preserves_graph() {
        let mut side = SymGraph::new();
        side.add_node(NodeId(0), lab(vec![v("x")])).unwrap();
        let r = RuleSchema::new("id", vec![var("x")], side.clone(), side).unwrap();
        let g = host(&[(0, &[3]), (1, &[4])], &[(0, 1)]);
        for m in r.find_matches(&g) {
            assert!(r.apply(&g, &m).unwrap().0.isomorphic(&g));
        }
    }

    #[test]
    fn dangling_condition_blocks_deletion() {
        let mut lhs = SymGraph::new();
        lhs.add_node(NodeId(0), lab(vec![v("x")])).unwrap();
        let r = RuleSchema::new("delete", vec![var("x")], lhs, SymGraph::new()).unwrap();
        let g = host(&[(0, &[1]), (1, &[2])], &[(0, 1)]);
        assert!(r.find_matches(&g).is_empty());
        let g = host(&[(0, &[1]), (1, &[2])], &[]);
        assert_eq!(r.find_matches(&g).len(), 2);
    }

    #[test]
    fn invert_is_an_involution() {
        let r = colour();
        let back = r.invert().invert();
        assert_eq!(back.lhs, r.lhs);
        assert_eq!(back.rhs, r.rhs);
        let inv = init().invert();
        assert_eq!(inv.lhs.label(NodeId(0)).unwrap().to_string(), "x:0");
        assert_eq!(inv.rhs.label(NodeId(0)).unwrap().to_string(), "x");
    }

    #[test]
    fn validation() {
        let mut lhs = SymGraph::new();
        lhs.add_node(NodeId(0), lab(vec![v("x")])).unwrap();
        let mut rhs = SymGraph::new();
        rhs.add_node(NodeId(0), lab(vec![v("z")])).unwrap();
        assert!(matches!(
            RuleSchema::new("bad", vec![var("x"), var("z")], lhs.clone(), rhs.clone()),
            Err(RuleError::RhsOnly { .. })
        ));
        assert!(matches!(
            RuleSchema::new("bad", vec![var("x")], lhs, rhs),
            Err(RuleError::Undeclared { .. })
        ));
        let mut sq = SymGraph::new();
        sq.add_node(NodeId(0), lab(vec![IntExpr::bin(BinOp::Mul, v("x"), v("x"))]))
            .unwrap();
        assert!(matches!(
            RuleSchema::new("sq", vec![var("x")], sq.clone(), sq),
            Err(RuleError::Undetermined { .. })
        ));
    }
}
