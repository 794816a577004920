//! Assertion transformations over rule schemata: applicability (`App`,
//! `Dang`), shifting a constraint over a match (`Shift`), moving a left
//! condition across a rule (`Right`) and the weakest postcondition
//! (`WPost`).
//!
//! Conditions follow the id-inclusion convention of [`crate::econd`]: the
//! graph of every `Exists` contains its context by ids. Left conditions have
//! a rule's left-hand side as context, right conditions its right-hand side.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::econd::{graph_vars, new_items, simplify, Cond, Fresh};
use crate::expr::{Constraint, IntExpr, Label, Subst, Var};
use crate::graph::{enumerate_overlap_quotients, pushout, EdgeId, Morphism, NodeId, SymGraph};
use crate::rules::RuleSchema;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("condition is not freshened for rule {rule}: {reason}")]
    NotFreshened { rule: String, reason: String },
    #[error("condition is not closed: free variables {0}")]
    NotClosed(String),
}

/// Deliberate defects used to check that the differential tests are
/// sensitive. Not part of the supported interface.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// `Dang` forgets its first conjunct.
    DangDropConjunct,
    /// `Shift` only keeps the overlap-free quotient.
    ShiftNoOverlap,
    /// `Shift` never substitutes quantified variables by label items.
    ShiftNoIntSubst,
    /// `Right` ignores the dangling check and keeps the offending edges out.
    RightIgnoreDangling,
    /// `WPost` omits the `Dang(r⁻¹)` conjunct.
    WPostSkipInverseDang,
}

impl Mutation {
    pub const ALL: [Mutation; 5] = [
        Mutation::DangDropConjunct,
        Mutation::ShiftNoOverlap,
        Mutation::ShiftNoIntSubst,
        Mutation::RightIgnoreDangling,
        Mutation::WPostSkipInverseDang,
    ];
}

/// Transformation engine; the default instance is the correct one.
#[derive(Debug, Clone, Copy, Default)]
pub struct Transformer {
    mutation: Option<Mutation>,
}

impl Transformer {
    #[doc(hidden)]
    pub fn mutated(m: Mutation) -> Self {
        Transformer { mutation: Some(m) }
    }

    fn has(&self, m: Mutation) -> bool {
        self.mutation == Some(m)
    }

    /// Conjunction forbidding every one-edge extension of the left-hand side
    /// that would leave an edge dangling at a deleted node: a loop, an edge
    /// between two left-hand nodes, or an edge to or from one extra node.
    /// The extra node is left unlabelled so it stands for a node with any
    /// label.
    pub fn dang(&self, r: &RuleSchema) -> Cond {
        let lhs = &r.lhs;
        let deleted = r.deleted_nodes();
        let nodes: Vec<NodeId> = lhs.node_ids().collect();
        let mut conj = Vec::new();
        let mut forbid = |src: NodeId, tgt: NodeId, extra: bool| {
            let mut g = lhs.clone();
            if extra {
                let w = g.fresh_node_id();
                g.add_node(w, None).expect("fresh id");
                let (s, t) = if src == NodeId(u32::MAX) { (w, tgt) } else { (src, w) };
                g.add_edge(s, t).expect("nodes exist");
            } else {
                g.add_edge(src, tgt).expect("nodes exist");
            }
            conj.push(Cond::not(Cond::exists(g, Cond::True)));
        };
        for &v in &nodes {
            if deleted.contains(&v) {
                forbid(v, v, false);
            }
        }
        for &u in &nodes {
            for &v in &nodes {
                if u != v && (deleted.contains(&u) || deleted.contains(&v)) {
                    forbid(u, v, false);
                }
            }
        }
        for &v in &nodes {
            if deleted.contains(&v) {
                forbid(v, NodeId(0), true);
                forbid(NodeId(u32::MAX), v, true);
            }
        }
        if self.has(Mutation::DangDropConjunct) && !conj.is_empty() {
            conj.remove(0);
        }
        match conj.len() {
            0 => Cond::True,
            1 => conj.pop().expect("one element"),
            _ => Cond::And(conj),
        }
    }

    /// `∃x̄. ∃L. Dang(r)`.
    pub fn app_rule(&self, r: &RuleSchema) -> Cond {
        let body = Cond::exists(r.lhs.clone(), self.dang(r));
        simplify(&Cond::exists_ints(r.lhs_params(), body), &SymGraph::new())
    }

    /// Applicability of a rule set; `false` for the empty set.
    pub fn app(&self, rules: &[&RuleSchema]) -> Cond {
        let ds: Vec<Cond> = rules.iter().map(|r| self.app_rule(r)).collect();
        simplify(&Cond::Or(ds), &SymGraph::new())
    }

    /// Shifts a freshened E-constraint to a condition over the left-hand
    /// side of `r`.
    pub fn shift(&self, r: &RuleSchema, c: &Cond) -> Result<Cond, TransformError> {
        check_freshened(c, r)?;
        let empty = SymGraph::new();
        let out = self.shift_prime(&empty, &r.lhs, &Morphism::default(), c);
        Ok(simplify(&out, &r.lhs))
    }

    /// `Shift'(p: P -> P', c)` for a condition `c` over `P`; the result is
    /// over `P'`.
    fn shift_prime(&self, ctx: &SymGraph, target: &SymGraph, p: &Morphism, c: &Cond) -> Cond {
        match c {
            Cond::True | Cond::False | Cond::Constraint(_) => c.clone(),
            Cond::Not(b) => Cond::not(self.shift_prime(ctx, target, p, b)),
            Cond::And(cs) => Cond::And(cs.iter().map(|b| self.shift_prime(ctx, target, p, b)).collect()),
            Cond::Or(cs) => Cond::Or(cs.iter().map(|b| self.shift_prime(ctx, target, p, b)).collect()),
            Cond::ExistsInt(x, body) => {
                let mut ds = vec![Cond::exists_int(x.clone(), self.shift_prime(ctx, target, p, body))];
                if !self.has(Mutation::ShiftNoIntSubst) {
                    for l in aligned_items(x, body, target) {
                        let sigma: Subst = [(x.clone(), l)].into();
                        let inst = body.subst(&sigma).expect("bound variables are renamed apart");
                        ds.push(self.shift_prime(ctx, target, p, &inst));
                    }
                }
                Cond::Or(ds)
            }
            Cond::Exists(g, body) => {
                let a = ctx.identity();
                let Ok(po) = pushout(ctx, target, p, g, &a) else {
                    // the two sides disagree on a glued label: no overlap exists
                    return Cond::False;
                };
                let mut overlaps = enumerate_overlap_quotients(target, &po, g);
                if self.has(Mutation::ShiftNoOverlap) {
                    overlaps.truncate(1);
                }
                let ds = overlaps
                    .into_iter()
                    .map(|ov| {
                        let inner = self.shift_prime(g, &ov.object, &ov.from_right, body);
                        Cond::exists(ov.object, inner)
                    })
                    .collect();
                Cond::Or(ds)
            }
        }
    }

    /// Moves a condition over the left-hand side of `r` to one over its
    /// right-hand side along the derivation.
    pub fn right(&self, r: &RuleSchema, c: &Cond) -> Cond {
        let span = Span {
            left: r.lhs.clone(),
            interface: r.interface(),
            right: r.rhs.clone(),
            to_right: Morphism {
                nodes: r.preserved().into_iter().map(|v| (v, v)).collect(),
                edges: Default::default(),
            },
        };
        simplify(&self.right_span(&span, c), &r.rhs)
    }

    fn right_span(&self, span: &Span, c: &Cond) -> Cond {
        match c {
            Cond::True | Cond::False | Cond::Constraint(_) => c.clone(),
            Cond::ExistsInt(x, b) => Cond::exists_int(x.clone(), self.right_span(span, b)),
            Cond::Not(b) => Cond::not(self.right_span(span, b)),
            Cond::And(cs) => Cond::And(cs.iter().map(|b| self.right_span(span, b)).collect()),
            Cond::Or(cs) => Cond::Or(cs.iter().map(|b| self.right_span(span, b)).collect()),
            Cond::Exists(g, body) => match span.derive(g, self.has(Mutation::RightIgnoreDangling)) {
                Some(next) => {
                    let inner = self.right_span(&next, body);
                    Cond::exists(next.right, inner)
                }
                None => Cond::False,
            },
        }
    }

    /// `∃vars(L). ∃R. Dang(r⁻¹) ∧ Right(r, Shift(r, c))` for a freshened
    /// E-constraint.
    pub fn wpost_rule(&self, r: &RuleSchema, c: &Cond) -> Result<Cond, TransformError> {
        let fresh = freshen(c, r);
        let shifted = self.shift(r, &fresh)?;
        let moved = self.right(r, &shifted);
        let dang = if self.has(Mutation::WPostSkipInverseDang) {
            Cond::True
        } else {
            self.dang(&r.invert())
        };
        let body = Cond::exists(r.rhs.clone(), Cond::and(dang, moved));
        Ok(simplify(&Cond::exists_ints(r.lhs_params(), body), &SymGraph::new()))
    }

    /// Weakest postcondition of a rule set; `false` for the empty set.
    pub fn wpost(&self, rules: &[&RuleSchema], c: &Cond) -> Result<Cond, TransformError> {
        let free = c.free_vars();
        if !free.is_empty() {
            let names: Vec<String> = free.iter().map(|v| v.to_string()).collect();
            return Err(TransformError::NotClosed(names.join(", ")));
        }
        let ds = rules
            .iter()
            .map(|r| self.wpost_rule(r, c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(simplify(&Cond::Or(ds), &SymGraph::new()))
    }
}

/// Rule span `X <- Z -> Y` with `Z ⊆ X` by ids and an explicit `Z -> Y`.
#[derive(Debug, Clone)]
struct Span {
    left: SymGraph,
    interface: SymGraph,
    right: SymGraph,
    to_right: Morphism,
}

impl Span {
    /// The derived span for `X ⊆ X'`, or `None` when an edge of `X' - X`
    /// is incident to a node deleted by the span.
    fn derive(&self, ext: &SymGraph, ignore_dangling: bool) -> Option<Span> {
        let deleted: BTreeSet<NodeId> = self
            .left
            .node_ids()
            .filter(|v| !self.interface.has_node(*v))
            .collect();
        let (new_nodes, _, new_edges) = new_items(&self.left, ext);
        let mut kept_edges: Vec<EdgeId> = Vec::new();
        for e in new_edges {
            let d = ext.edge(e).expect("edge");
            if deleted.contains(&d.src) || deleted.contains(&d.tgt) {
                if ignore_dangling {
                    continue;
                }
                return None;
            }
            kept_edges.push(e);
        }
        let mut interface = self.interface.clone();
        let mut right = self.right.clone();
        let mut to_right = self.to_right.clone();
        for v in &new_nodes {
            let l = ext.label(*v).cloned();
            interface.add_node(*v, l.clone()).expect("new node id");
            let w = right.add_fresh_node(l);
            to_right.nodes.insert(*v, w);
        }
        for e in &kept_edges {
            let d = ext.edge(*e).expect("edge");
            interface.add_edge_with_id(*e, d.src, d.tgt).expect("endpoints kept");
            let f = right
                .add_edge(to_right.node(d.src), to_right.node(d.tgt))
                .expect("endpoints exist");
            to_right.edges.insert(*e, f);
        }
        let mut left = ext.clone();
        if ignore_dangling {
            for e in ext.edge_ids() {
                if !self.left.has_edge(e) && !interface.has_edge(e) {
                    left.remove_edge(e);
                }
            }
        }
        Some(Span {
            left,
            interface,
            right,
            to_right,
        })
    }
}

/// Label items of `target` that line up with an occurrence of `x` in the
/// graphs of `body`: same label length, same position. Only these
/// substitutions can enable an identification of nodes; any other instance
/// is already covered by keeping `x` quantified.
fn aligned_items(x: &Var, body: &Cond, target: &SymGraph) -> Vec<IntExpr> {
    let mut positions: BTreeSet<(usize, usize)> = BTreeSet::new();
    body.visit(&mut |c| {
        if let Cond::Exists(g, _) = c {
            for (_, l) in g.nodes() {
                if let Some(l) = l {
                    for (j, e) in l.items().iter().enumerate() {
                        if e.mentions(x) {
                            positions.insert((l.len(), j));
                        }
                    }
                }
            }
        }
    });
    let mut out: Vec<IntExpr> = Vec::new();
    let mut seen: BTreeSet<IntExpr> = BTreeSet::new();
    for (_, l) in target.nodes() {
        let Some(l) = l else { continue };
        for (j, e) in l.items().iter().enumerate() {
            if positions.contains(&(l.len(), j)) && !e.mentions(x) && seen.insert(e.normalize()) {
                out.push(e.clone());
            }
        }
    }
    out
}

/// Prepares an E-constraint for shifting over `r`: bound variables are
/// renamed apart from the rule's variables, and every label item of a new
/// node that is not the first occurrence of a variable (a constant, a
/// compound expression or a repeated variable) becomes a fresh variable
/// bound just outside its graph and equated with the original item.
pub fn freshen(c: &Cond, r: &RuleSchema) -> Cond {
    let mut fresh = Fresh::avoiding(r.params.iter().cloned().chain(r.lhs_vars()).chain(r.rhs_vars()));
    let renamed = c.rename_bound(&mut fresh);
    let mut seen: BTreeSet<Var> = BTreeSet::new();
    freshen_at(&renamed, &SymGraph::new(), &mut fresh, &mut seen)
}

fn freshen_at(c: &Cond, ctx: &SymGraph, fresh: &mut Fresh, seen: &mut BTreeSet<Var>) -> Cond {
    match c {
        Cond::True | Cond::False | Cond::Constraint(_) => c.clone(),
        Cond::ExistsInt(x, b) => Cond::exists_int(x.clone(), freshen_at(b, ctx, fresh, seen)),
        Cond::Not(b) => Cond::not(freshen_at(b, ctx, fresh, seen)),
        Cond::And(cs) => Cond::And(cs.iter().map(|b| freshen_at(b, ctx, fresh, seen)).collect()),
        Cond::Or(cs) => Cond::Or(cs.iter().map(|b| freshen_at(b, ctx, fresh, seen)).collect()),
        Cond::Exists(g, body) => {
            let mut out = (**g).clone();
            let mut binders: Vec<Var> = Vec::new();
            let mut eqs: Vec<Cond> = Vec::new();
            for (v, l) in g.nodes() {
                if ctx.has_node(v) {
                    // restated context node: keep the context's label
                    if let Some(cl) = ctx.label(v) {
                        out.set_label(v, Some(cl.clone())).expect("node exists");
                        continue;
                    }
                }
                let Some(l) = l else { continue };
                let items = l
                    .items()
                    .iter()
                    .map(|e| match e {
                        IntExpr::Var(x) if !seen.contains(x) => {
                            seen.insert(x.clone());
                            e.clone()
                        }
                        _ => {
                            let y = fresh.next(&hint_for(e));
                            seen.insert(y.clone());
                            eqs.push(Cond::Constraint(Constraint::eq(IntExpr::Var(y.clone()), e.clone())));
                            binders.push(y.clone());
                            IntExpr::Var(y)
                        }
                    })
                    .collect();
                out.set_label(v, Some(Label(items))).expect("node exists");
            }
            let inner = freshen_at(body, &out, fresh, seen);
            if inner != Cond::True {
                eqs.push(inner);
            }
            let body = match eqs.len() {
                0 => Cond::True,
                1 => eqs.pop().expect("one element"),
                _ => Cond::And(eqs),
            };
            Cond::exists_ints(binders, Cond::exists(out, body))
        }
    }
}

fn hint_for(e: &IntExpr) -> String {
    match e {
        IntExpr::Var(x) => x.to_string(),
        _ => "v".to_string(),
    }
}

/// Checks the shape `freshen` produces: labels of new nodes are lists of
/// variables, no variable occurs twice, none is a variable of `r`.
pub fn check_freshened(c: &Cond, r: &RuleSchema) -> Result<(), TransformError> {
    let rule_vars: BTreeSet<Var> = r.params.iter().cloned().chain(r.lhs_vars()).collect();
    let mut seen: BTreeSet<Var> = BTreeSet::new();
    let mut err: Option<String> = None;
    fn walk(c: &Cond, ctx: &SymGraph, f: &mut dyn FnMut(&Label)) {
        match c {
            Cond::Exists(g, b) => {
                let (nodes, relabelled, _) = new_items(ctx, g);
                for v in nodes.iter().chain(&relabelled) {
                    if let Some(l) = g.label(*v) {
                        f(l);
                    }
                }
                walk(b, g, f);
            }
            Cond::ExistsInt(_, b) | Cond::Not(b) => walk(b, ctx, f),
            Cond::And(cs) | Cond::Or(cs) => cs.iter().for_each(|b| walk(b, ctx, f)),
            _ => {}
        }
    }
    walk(c, &SymGraph::new(), &mut |l| {
        for e in l.items() {
            let reason = match e {
                IntExpr::Var(x) if rule_vars.contains(x) => Some(format!("variable {x} is shared with the rule")),
                IntExpr::Var(x) if !seen.insert(x.clone()) => Some(format!("variable {x} occurs twice")),
                IntExpr::Var(_) => None,
                other => Some(format!("label item {other} is not a variable")),
            };
            if err.is_none() {
                err = reason;
            }
        }
    });
    let bound: Vec<Var> = {
        let mut v = Vec::new();
        c.visit(&mut |n| {
            if let Cond::ExistsInt(x, _) = n {
                v.push(x.clone());
            }
        });
        v
    };
    if err.is_none() {
        if let Some(x) = bound.iter().find(|x| rule_vars.contains(*x)) {
            err = Some(format!("bound variable {x} is shared with the rule"));
        }
    }
    match err {
        Some(reason) => Err(TransformError::NotFreshened {
            rule: r.name.clone(),
            reason,
        }),
        None => Ok(()),
    }
}

/// Convenience wrappers using the correct transformer.
pub fn dang(r: &RuleSchema) -> Cond {
    Transformer::default().dang(r)
}

pub fn app(rules: &[&RuleSchema]) -> Cond {
    Transformer::default().app(rules)
}

pub fn shift(r: &RuleSchema, c: &Cond) -> Result<Cond, TransformError> {
    Transformer::default().shift(r, c)
}

pub fn right(r: &RuleSchema, c: &Cond) -> Cond {
    Transformer::default().right(r, c)
}

pub fn wpost(rules: &[&RuleSchema], c: &Cond) -> Result<Cond, TransformError> {
    Transformer::default().wpost(rules, c)
}

/// Variables of every graph label in a condition (bound or not).
pub fn label_vars(c: &Cond) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    c.visit(&mut |n| {
        if let Cond::Exists(g, _) = n {
            out.extend(graph_vars(g));
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econd::{render, satisfies, SatConfig};
    use crate::expr::{var, BinOp, HostLabel, Interp};
    use crate::graph::HostGraph;

    fn v(n: &str) -> IntExpr {
        IntExpr::var(n)
    }

    fn lab(items: Vec<IntExpr>) -> Option<Label> {
        Some(Label(items))
    }

    fn init() -> RuleSchema {
        let mut lhs = SymGraph::new();
        lhs.add_node(NodeId(0), lab(vec![v("x")])).unwrap();
        let mut rhs = SymGraph::new();
        rhs.add_node(NodeId(0), lab(vec![v("x"), IntExpr::Const(0)])).unwrap();
        RuleSchema::new("init", vec![var("x")], lhs, rhs).unwrap()
    }

    fn colour() -> RuleSchema {
        let mut lhs = SymGraph::new();
        lhs.add_node(NodeId(0), lab(vec![v("x"), v("i")])).unwrap();
        lhs.add_node(NodeId(1), lab(vec![v("y")])).unwrap();
        lhs.add_edge(NodeId(0), NodeId(1)).unwrap();
        lhs.add_edge(NodeId(1), NodeId(0)).unwrap();
        let mut rhs = lhs.clone();
        rhs.set_label(NodeId(1), lab(vec![v("y"), IntExpr::bin(BinOp::Add, v("i"), IntExpr::Const(1))]))
            .unwrap();
        RuleSchema::new("colour", vec![var("x"), var("y"), var("i")], lhs, rhs).unwrap()
    }

    fn delete() -> RuleSchema {
        let mut lhs = SymGraph::new();
        lhs.add_node(NodeId(0), lab(vec![v("x")])).unwrap();
        RuleSchema::new("delete", vec![var("x")], lhs, SymGraph::new()).unwrap()
    }

    fn host(nodes: &[&[i64]], edges: &[(u32, u32)]) -> HostGraph {
        let mut g = HostGraph::new();
        for (i, l) in nodes.iter().enumerate() {
            g.add_node(NodeId(i as u32), Some(HostLabel(l.to_vec()))).unwrap();
        }
        for (s, t) in edges {
            g.add_edge(NodeId(*s), NodeId(*t)).unwrap();
        }
        g
    }

    /// c = ∃a. ∃{node 0 a}. ¬∃d,k. ∃{node 0 a; node 1 d:k}
    fn colourless_c() -> Cond {
        let mut one = SymGraph::new();
        one.add_node(NodeId(0), lab(vec![v("a")])).unwrap();
        let mut two = one.clone();
        two.add_node(NodeId(1), lab(vec![v("d"), v("k")])).unwrap();
        Cond::exists_int(
            var("a"),
            Cond::exists(
                one,
                Cond::not(Cond::exists_ints([var("d"), var("k")], Cond::exists(two, Cond::True))),
            ),
        )
    }

    #[test]
    fn dang_examples() {
        assert_eq!(dang(&init()), Cond::True);
        assert_eq!(dang(&init().invert()), Cond::True);
        let d = dang(&delete());
        // loop, edge out to an extra node, edge in from an extra node
        assert_eq!(d.conjuncts().len(), 3);
        assert_eq!(dang(&delete().invert()), Cond::True);
        assert_eq!(dang(&delete().invert().invert()), d);
    }

    #[test]
    fn app_examples() {
        assert_eq!(app(&[]), Cond::False);
        assert_eq!(render(&app(&[&init()]), &SymGraph::new()), "ex int x. ex { node 0 x; }");
        assert_eq!(
            render(&app(&[&colour()]), &SymGraph::new()),
            "ex int x, y, i. ex { node 0 x:i; node 1 y; edge 0 -- 1; }"
        );
    }

    #[test]
    fn wpost_init_true() {
        assert_eq!(
            render(&wpost(&[&init()], &Cond::True).unwrap(), &SymGraph::new()),
            "ex int x. ex { node 0 x:0; }"
        );
        assert_eq!(wpost(&[], &Cond::True).unwrap(), Cond::False);
    }

    #[test]
    fn freshen_replaces_constants_and_repeats() {
        let mut g = SymGraph::new();
        g.add_node(NodeId(0), lab(vec![IntExpr::Const(5)])).unwrap();
        let c = Cond::exists(g, Cond::True);
        let f = freshen(&c, &init());
        assert_eq!(render(&f, &SymGraph::new()), "ex int v. ex { node 0 v; }. v = 5");
        check_freshened(&f, &init()).unwrap();
        assert!(check_freshened(&c, &init()).is_err());

        let mut g = SymGraph::new();
        g.add_node(NodeId(0), lab(vec![v("x"), v("x")])).unwrap();
        let c = Cond::exists_int(var("x"), Cond::exists(g, Cond::True));
        let f = freshen(&c, &init());
        check_freshened(&f, &init()).unwrap();
        for graph in [host(&[&[1, 1]], &[]), host(&[&[1, 2]], &[])] {
            let cfg = SatConfig::default();
            assert_eq!(
                satisfies(&graph, &c, &cfg).unwrap().holds,
                satisfies(&graph, &f, &cfg).unwrap().holds
            );
        }
    }

    #[test]
    fn shift_of_colourless_c_over_init() {
        let r = init();
        let s = shift(&r, &freshen(&colourless_c(), &r)).unwrap();
        // kept apart, substituted but kept apart, identified with the match node
        assert_eq!(s.disjuncts().len(), 3, "{}", render(&s, &r.lhs));
        assert_eq!(shift(&r, &Cond::True).unwrap(), Cond::True);
    }

    #[test]
    fn right_relabels_match_node() {
        let r = init();
        let s = shift(&r, &freshen(&colourless_c(), &r)).unwrap();
        let rc = right(&r, &s);
        let text = render(&rc, &r.rhs);
        assert!(text.contains("x:0") || !text.contains("node 0 x;"), "{text}");
        assert_eq!(right(&r, &Cond::True), Cond::True);
    }

    #[test]
    fn right_dangling_is_false() {
        let r = delete();
        let mut g = r.lhs.clone();
        g.add_node(NodeId(1), None).unwrap();
        g.add_edge(NodeId(0), NodeId(1)).unwrap();
        assert_eq!(right(&r, &Cond::exists(g, Cond::True)), Cond::False);
    }

    #[test]
    fn shift_on_small_instances() {
        let r = init();
        let c = colourless_c();
        let s = shift(&r, &freshen(&c, &r)).unwrap();
        let cfg = SatConfig::default();
        for g in [
            host(&[&[3]], &[]),
            host(&[&[3], &[4, 1]], &[]),
            host(&[&[3], &[4]], &[(0, 1)]),
            host(&[&[3, 0], &[4]], &[]),
        ] {
            let expected = satisfies(&g, &c, &cfg).unwrap().holds;
            for m in r.find_matches(&g) {
                let got = crate::econd::satisfies_at(&g, &m.morphism, &m.interp, &s, &cfg);
                assert_eq!(got, expected, "graph {g} match {:?}", m.morphism);
            }
        }
        let _ = Interp::new();
    }
}
