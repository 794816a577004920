//! Matching of expression-labelled graphs into host graphs.
//!
//! Labels are unified position-wise against concrete labels. A bare unbound
//! variable is bound directly; an item with a single unbound variable is
//! solved when the path to that variable is invertible. Items that cannot be
//! resolved yet are kept pending and retried as more variables get bound;
//! whatever is still pending when the node map is complete is handed to the
//! caller, which decides how to close it.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use crate::expr::{IntExpr, Interp, Label, Var};
use crate::graph::{edge_counts_feasible, extend_edges, HostGraph, Morphism, NodeId, SymGraph};

/// An equation `expr = value` that could not be decided during matching.
pub type Pending = Vec<(IntExpr, i64)>;

/// Callback receiving each complete morphism together with the equations
/// that are still undecided. Bindings made during matching are visible in
/// the interpretation; the callback may push further bindings but must
/// restore the depth before returning.
pub type MatchSink<'a> = dyn FnMut(&Morphism, &mut Interp, &Pending) -> ControlFlow<()> + 'a;

/// Enumerates injective morphisms `pattern -> host` extending `fixed`,
/// binding variables from `bindable` as labels are unified. Unlabelled
/// pattern nodes match any host node.
pub fn match_graph(
    pattern: &SymGraph,
    host: &HostGraph,
    fixed: &Morphism,
    interp: &mut Interp,
    bindable: &BTreeSet<Var>,
    sink: &mut MatchSink<'_>,
) -> ControlFlow<()> {
    let order = node_order(pattern, fixed);
    let mut assign = fixed.nodes.clone();
    let mut used: BTreeSet<NodeId> = fixed.nodes.values().copied().collect();
    let base = interp.depth();
    let mut pending = Pending::new();
    // labels of already mapped nodes constrain variables too
    for (v, w) in &fixed.nodes {
        if let Some(l) = pattern.label(*v) {
            let Some(h) = host.label(*w) else {
                interp.truncate(base);
                return ControlFlow::Continue(());
            };
            if !unify(l, &h.0, interp, bindable, &mut pending) {
                interp.truncate(base);
                return ControlFlow::Continue(());
            }
        }
    }
    let mut ctx = Search {
        pattern,
        host,
        fixed,
        bindable,
        order: &order,
        sink,
    };
    let r = ctx.nodes(0, &mut assign, &mut used, interp, &pending);
    interp.truncate(base);
    r
}

struct Search<'a, 'b> {
    pattern: &'a SymGraph,
    host: &'a HostGraph,
    fixed: &'a Morphism,
    bindable: &'a BTreeSet<Var>,
    order: &'a [NodeId],
    sink: &'a mut MatchSink<'b>,
}

impl Search<'_, '_> {
    fn nodes(
        &mut self,
        at: usize,
        assign: &mut BTreeMap<NodeId, NodeId>,
        used: &mut BTreeSet<NodeId>,
        interp: &mut Interp,
        pending: &Pending,
    ) -> ControlFlow<()> {
        if at == self.order.len() {
            return self.edges(assign, interp, pending);
        }
        let v = self.order[at];
        let want = self.pattern.label(v);
        for (w, have) in self.host.nodes() {
            if used.contains(&w) {
                continue;
            }
            if !edge_counts_feasible(self.pattern, self.host, v, w, assign) {
                continue;
            }
            let depth = interp.depth();
            let mut pend = pending.clone();
            let ok = match (want, have) {
                (None, _) => true,
                (Some(l), Some(h)) => unify(l, &h.0, interp, self.bindable, &mut pend),
                (Some(_), None) => false,
            };
            if ok {
                assign.insert(v, w);
                used.insert(w);
                let r = self.nodes(at + 1, assign, used, interp, &pend);
                used.remove(&w);
                assign.remove(&v);
                if r.is_break() {
                    interp.truncate(depth);
                    return r;
                }
            }
            interp.truncate(depth);
        }
        ControlFlow::Continue(())
    }

    fn edges(&mut self, assign: &BTreeMap<NodeId, NodeId>, interp: &mut Interp, pending: &Pending) -> ControlFlow<()> {
        let todo: Vec<_> = self
            .pattern
            .edges()
            .filter(|(e, _)| !self.fixed.edges.contains_key(e))
            .collect();
        let mut emap = self.fixed.edges.clone();
        let mut eused: BTreeSet<_> = self.fixed.edges.values().copied().collect();
        let mut result = ControlFlow::Continue(());
        let sink = &mut *self.sink;
        let mut stop = false;
        extend_edges(self.host, assign, &todo, 0, &mut emap, &mut eused, &mut |edges| {
            if stop {
                return;
            }
            let m = Morphism {
                nodes: assign.clone(),
                edges: edges.clone(),
            };
            if sink(&m, interp, pending).is_break() {
                stop = true;
                result = ControlFlow::Break(());
            }
        });
        result
    }
}

/// Fixed nodes are excluded; the rest are ordered so that nodes adjacent to
/// already placed ones come early, which lets edge feasibility prune.
fn node_order(pattern: &SymGraph, fixed: &Morphism) -> Vec<NodeId> {
    let mut placed: BTreeSet<NodeId> = fixed.nodes.keys().copied().collect();
    let mut rest: Vec<NodeId> = pattern.node_ids().filter(|v| !placed.contains(v)).collect();
    let mut order = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let pick = rest
            .iter()
            .position(|v| {
                pattern
                    .incident_edges(*v)
                    .any(|(_, e)| placed.contains(&e.src) || placed.contains(&e.tgt))
            })
            .unwrap_or(0);
        let v = rest.remove(pick);
        placed.insert(v);
        order.push(v);
    }
    order
}

/// Unifies a symbolic label with concrete values, extending `interp` and
/// `pending`. Returns false on a definite mismatch.
pub fn unify(
    label: &Label,
    values: &[i64],
    interp: &mut Interp,
    bindable: &BTreeSet<Var>,
    pending: &mut Pending,
) -> bool {
    if label.len() != values.len() {
        return false;
    }
    for (e, v) in label.items().iter().zip(values) {
        pending.push((e.clone(), *v));
    }
    propagate(interp, bindable, pending)
}

/// Resolves pending equations until no further progress is possible.
pub fn propagate(interp: &mut Interp, bindable: &BTreeSet<Var>, pending: &mut Pending) -> bool {
    loop {
        let mut progress = false;
        let mut i = 0;
        while i < pending.len() {
            let (e, target) = &pending[i];
            if let Some(v) = e.eval(interp) {
                if v != *target {
                    return false;
                }
                pending.swap_remove(i);
                progress = true;
                continue;
            }
            let unbound: Vec<Var> = e.vars().into_iter().filter(|x| interp.get(x).is_none()).collect();
            if unbound.iter().any(|x| !bindable.contains(x)) {
                // a free variable outside the binder set: the item is undefined
                return false;
            }
            if let [x] = unbound.as_slice() {
                if let Some(value) = e.solve_for(x, *target, interp) {
                    interp.bind(x.clone(), value);
                    progress = true;
                    continue;
                }
            }
            i += 1;
        }
        if !progress {
            return true;
        }
    }
}
