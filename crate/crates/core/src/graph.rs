//! Directed graphs with partially labelled nodes and blank edges, injective
//! morphisms, isomorphism via exhaustive canonical labelling, and the
//! gluing constructions (pushouts, natural pushout complements, overlap
//! quotients) used by the assertion transformations.
//!
//! Node and edge identifiers are small integers local to each graph. Graphs
//! are desk-scale, so every search here is a plain backtracking or
//! permutation search.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::expr::{HostLabel, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: NodeId,
    pub tgt: NodeId,
}

/// Node label alphabet. Symbolic labels compare equal when they agree after
/// expression normalisation.
pub trait NodeLabel: Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display {
    fn same(&self, other: &Self) -> bool {
        self == other
    }

    /// Representative used for canonical forms.
    fn canonical(&self) -> Self {
        self.clone()
    }
}

impl NodeLabel for HostLabel {}

impl NodeLabel for Label {
    fn same(&self, other: &Self) -> bool {
        self.same_as(other)
    }

    fn canonical(&self) -> Self {
        self.normalize()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph<L> {
    nodes: BTreeMap<NodeId, Option<L>>,
    edges: BTreeMap<EdgeId, Edge>,
}

/// Totally labelled graph over integer lists (program states).
pub type HostGraph = Graph<HostLabel>;
/// Graph over expression labels (rule sides and condition graphs).
pub type SymGraph = Graph<Label>;

impl<L> Default for Graph<L> {
    fn default() -> Self {
        Graph {
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("edge {0} refers to unknown node {1}")]
    DanglingEdge(EdgeId, NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

impl<L: NodeLabel> Graph<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_node(&self, v: NodeId) -> bool {
        self.nodes.contains_key(&v)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    /// Label of `v`; `None` if `v` is unlabelled or absent.
    pub fn label(&self, v: NodeId) -> Option<&L> {
        self.nodes.get(&v).and_then(Option::as_ref)
    }

    pub fn edge(&self, e: EdgeId) -> Option<Edge> {
        self.edges.get(&e).copied()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, Option<&L>)> + '_ {
        self.nodes.iter().map(|(v, l)| (*v, l.as_ref()))
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, Edge)> + '_ {
        self.edges.iter().map(|(e, d)| (*e, *d))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn fresh_node_id(&self) -> NodeId {
        NodeId(self.nodes.keys().next_back().map_or(0, |v| v.0 + 1))
    }

    pub fn fresh_edge_id(&self) -> EdgeId {
        EdgeId(self.edges.keys().next_back().map_or(0, |e| e.0 + 1))
    }

    pub fn add_node(&mut self, id: NodeId, label: Option<L>) -> Result<(), GraphError> {
        if self.nodes.contains_key(&id) {
            return Err(GraphError::DuplicateNode(id));
        }
        self.nodes.insert(id, label);
        Ok(())
    }

    pub fn add_fresh_node(&mut self, label: Option<L>) -> NodeId {
        let id = self.fresh_node_id();
        self.nodes.insert(id, label);
        id
    }

    pub fn set_label(&mut self, v: NodeId, label: Option<L>) -> Result<(), GraphError> {
        match self.nodes.get_mut(&v) {
            Some(slot) => {
                *slot = label;
                Ok(())
            }
            None => Err(GraphError::UnknownNode(v)),
        }
    }

    pub fn add_edge_with_id(&mut self, id: EdgeId, src: NodeId, tgt: NodeId) -> Result<(), GraphError> {
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateEdge(id));
        }
        for v in [src, tgt] {
            if !self.nodes.contains_key(&v) {
                return Err(GraphError::DanglingEdge(id, v));
            }
        }
        self.edges.insert(id, Edge { src, tgt });
        Ok(())
    }

    pub fn add_edge(&mut self, src: NodeId, tgt: NodeId) -> Result<EdgeId, GraphError> {
        let id = self.fresh_edge_id();
        self.add_edge_with_id(id, src, tgt)?;
        Ok(id)
    }

    /// Removes a node together with its incident edges.
    pub fn remove_node(&mut self, v: NodeId) {
        self.nodes.remove(&v);
        self.edges.retain(|_, e| e.src != v && e.tgt != v);
    }

    pub fn remove_edge(&mut self, e: EdgeId) {
        self.edges.remove(&e);
    }

    pub fn is_totally_labelled(&self) -> bool {
        self.nodes.values().all(Option::is_some)
    }

    pub fn incident_edges(&self, v: NodeId) -> impl Iterator<Item = (EdgeId, Edge)> + '_ {
        self.edges().filter(move |(_, e)| e.src == v || e.tgt == v)
    }

    pub fn map_labels<M: NodeLabel>(&self, mut f: impl FnMut(&L) -> M) -> Graph<M> {
        Graph {
            nodes: self
                .nodes
                .iter()
                .map(|(v, l)| (*v, l.as_ref().map(&mut f)))
                .collect(),
            edges: self.edges.clone(),
        }
    }

    pub fn try_map_labels<M: NodeLabel>(&self, mut f: impl FnMut(&L) -> Option<M>) -> Option<Graph<M>> {
        let mut nodes = BTreeMap::new();
        for (v, l) in &self.nodes {
            let m = match l {
                Some(l) => Some(f(l)?),
                None => None,
            };
            nodes.insert(*v, m);
        }
        Some(Graph {
            nodes,
            edges: self.edges.clone(),
        })
    }

    /// True when `self` contains `other` as a subgraph by identity of ids,
    /// with labels preserved on the labelled nodes of `other`.
    pub fn includes(&self, other: &Graph<L>) -> bool {
        other.nodes.iter().all(|(v, l)| match (self.nodes.get(v), l) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(Some(a)), Some(b)) => a.same(b),
            (Some(None), Some(_)) => false,
        }) && other.edges.iter().all(|(e, d)| self.edges.get(e) == Some(d))
    }

    /// Canonical encoding: equal keys iff the graphs are isomorphic
    /// (unlabelledness is reflected).
    pub fn canonical_key(&self) -> CanonKey<L> {
        canonical(self).0
    }

    /// Isomorphic copy with nodes `0..n` and edges `0..m` in canonical order.
    pub fn canonical_form(&self) -> Graph<L> {
        let (key, _) = canonical(self);
        key.to_graph()
    }

    pub fn isomorphic(&self, other: &Graph<L>) -> bool {
        self.node_count() == other.node_count()
            && self.edge_count() == other.edge_count()
            && self.canonical_key() == other.canonical_key()
    }

    /// Identity morphism on `self`.
    pub fn identity(&self) -> Morphism {
        Morphism {
            nodes: self.nodes.keys().map(|v| (*v, *v)).collect(),
            edges: self.edges.keys().map(|e| (*e, *e)).collect(),
        }
    }
}

impl<L: NodeLabel> fmt::Display for Graph<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("graph {")?;
        for (v, l) in &self.nodes {
            match l {
                Some(l) => write!(f, " node {v} {l};")?,
                None => write!(f, " node {v};")?,
            }
        }
        for e in self.edges.values() {
            write!(f, " edge {} -> {};", e.src, e.tgt)?;
        }
        f.write_str(" }")
    }
}

/// Canonical encoding of a graph up to isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonKey<L> {
    labels: Vec<Option<L>>,
    /// Row-major `n * n` edge multiplicities.
    adjacency: Vec<u16>,
}

impl<L: NodeLabel> CanonKey<L> {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn to_graph(&self) -> Graph<L> {
        let n = self.labels.len();
        let mut g = Graph::new();
        for (i, l) in self.labels.iter().enumerate() {
            g.nodes.insert(NodeId(i as u32), l.clone());
        }
        let mut next = 0u32;
        for s in 0..n {
            for t in 0..n {
                for _ in 0..self.adjacency[s * n + t] {
                    g.edges.insert(
                        EdgeId(next),
                        Edge {
                            src: NodeId(s as u32),
                            tgt: NodeId(t as u32),
                        },
                    );
                    next += 1;
                }
            }
        }
        g
    }
}

fn canonical<L: NodeLabel>(g: &Graph<L>) -> (CanonKey<L>, Vec<NodeId>) {
    let ids: Vec<NodeId> = g.nodes.keys().copied().collect();
    let n = ids.len();
    let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut adj = vec![0u16; n * n];
    for e in g.edges.values() {
        adj[index[&e.src] * n + index[&e.tgt]] += 1;
    }
    let labels: Vec<Option<L>> = ids
        .iter()
        .map(|v| g.nodes[v].as_ref().map(NodeLabel::canonical))
        .collect();
    // invariants: label, loops, out-degree, in-degree
    let invariant = |i: usize| {
        let out: u32 = (0..n).map(|j| u32::from(adj[i * n + j])).sum();
        let inc: u32 = (0..n).map(|j| u32::from(adj[j * n + i])).sum();
        (labels[i].clone(), adj[i * n + i], out, inc)
    };
    let mut order: Vec<usize> = (0..n).collect();
    let invs: Vec<_> = (0..n).map(invariant).collect();
    order.sort_by(|a, b| invs[*a].cmp(&invs[*b]));
    // classes of equal invariants; permute within each class
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match classes.last_mut() {
            Some(c) if invs[c[0]] == invs[i] => c.push(i),
            _ => classes.push(vec![i]),
        }
    }
    let mut best: Option<(Vec<u16>, Vec<usize>)> = None;
    let mut current: Vec<usize> = Vec::with_capacity(n);
    permute_classes(&classes, 0, &mut current, &mut |perm| {
        let mut enc = Vec::with_capacity(n * n);
        for &s in perm {
            for &t in perm {
                enc.push(adj[s * n + t]);
            }
        }
        if best.as_ref().is_none_or(|(b, _)| enc < *b) {
            best = Some((enc, perm.to_vec()));
        }
    });
    let (adjacency, perm) = best.unwrap_or_default();
    let key = CanonKey {
        labels: perm.iter().map(|i| labels[*i].clone()).collect(),
        adjacency,
    };
    (key, perm.iter().map(|i| ids[*i]).collect())
}

fn permute_classes(classes: &[Vec<usize>], at: usize, current: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if at == classes.len() {
        f(current);
        return;
    }
    let mut class = classes[at].clone();
    heap_permutations(&mut class, &mut |p| {
        let len = current.len();
        current.extend_from_slice(p);
        permute_classes(classes, at + 1, current, f);
        current.truncate(len);
    });
}

fn heap_permutations(items: &mut [usize], f: &mut dyn FnMut(&[usize])) {
    fn go(k: usize, items: &mut [usize], f: &mut dyn FnMut(&[usize])) {
        if k <= 1 {
            f(items);
            return;
        }
        for i in 0..k - 1 {
            go(k - 1, items, f);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
        go(k - 1, items, f);
    }
    let k = items.len();
    go(k, items, f);
}

/// A graph morphism given by its node and edge maps. Domain and codomain are
/// supplied alongside when checking it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morphism {
    pub nodes: BTreeMap<NodeId, NodeId>,
    pub edges: BTreeMap<EdgeId, EdgeId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MorphismError {
    #[error("node {0} is not mapped")]
    UnmappedNode(NodeId),
    #[error("edge {0} is not mapped")]
    UnmappedEdge(EdgeId),
    #[error("node {0} is mapped outside the codomain")]
    BadNodeImage(NodeId),
    #[error("edge {0} is mapped outside the codomain")]
    BadEdgeImage(EdgeId),
    #[error("edge {0}: source or target not preserved")]
    Structure(EdgeId),
    #[error("node {0}: label not preserved")]
    Label(NodeId),
    #[error("morphism is not injective")]
    NotInjective,
}

impl Morphism {
    pub fn node(&self, v: NodeId) -> NodeId {
        self.nodes[&v]
    }

    pub fn edge(&self, e: EdgeId) -> EdgeId {
        self.edges[&e]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Morphism) -> Morphism {
        Morphism {
            nodes: self.nodes.iter().map(|(k, v)| (*k, other.nodes[v])).collect(),
            edges: self.edges.iter().map(|(k, v)| (*k, other.edges[v])).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let n: BTreeSet<_> = self.nodes.values().collect();
        let e: BTreeSet<_> = self.edges.values().collect();
        n.len() == self.nodes.len() && e.len() == self.edges.len()
    }

    pub fn node_image(&self) -> BTreeSet<NodeId> {
        self.nodes.values().copied().collect()
    }

    pub fn edge_image(&self) -> BTreeSet<EdgeId> {
        self.edges.values().copied().collect()
    }

    /// Checks totality, structure and label preservation.
    pub fn check<L: NodeLabel>(&self, dom: &Graph<L>, cod: &Graph<L>) -> Result<(), MorphismError> {
        for (v, l) in dom.nodes() {
            let w = *self.nodes.get(&v).ok_or(MorphismError::UnmappedNode(v))?;
            if !cod.has_node(w) {
                return Err(MorphismError::BadNodeImage(v));
            }
            if let Some(l) = l {
                match cod.label(w) {
                    Some(m) if l.same(m) => {}
                    _ => return Err(MorphismError::Label(v)),
                }
            }
        }
        for (e, d) in dom.edges() {
            let f = *self.edges.get(&e).ok_or(MorphismError::UnmappedEdge(e))?;
            let img = cod.edge(f).ok_or(MorphismError::BadEdgeImage(e))?;
            if img.src != self.nodes[&d.src] || img.tgt != self.nodes[&d.tgt] {
                return Err(MorphismError::Structure(e));
            }
        }
        Ok(())
    }

    pub fn check_injective<L: NodeLabel>(&self, dom: &Graph<L>, cod: &Graph<L>) -> Result<(), MorphismError> {
        self.check(dom, cod)?;
        if self.is_injective() {
            Ok(())
        } else {
            Err(MorphismError::NotInjective)
        }
    }
}

/// All injective morphisms `pattern -> host`, in deterministic order.
pub fn find_injective_morphisms<L: NodeLabel>(pattern: &Graph<L>, host: &Graph<L>) -> Vec<Morphism> {
    find_injective_extensions(pattern, host, &Morphism::default())
}

/// All injective morphisms `pattern -> host` extending the partial map
/// `fixed` (which must itself be injective).
pub fn find_injective_extensions<L: NodeLabel>(
    pattern: &Graph<L>,
    host: &Graph<L>,
    fixed: &Morphism,
) -> Vec<Morphism> {
    let mut out = Vec::new();
    let free: Vec<NodeId> = pattern.node_ids().filter(|v| !fixed.nodes.contains_key(v)).collect();
    let mut assign = fixed.nodes.clone();
    let mut used: BTreeSet<NodeId> = fixed.nodes.values().copied().collect();
    extend_nodes(pattern, host, &free, 0, &mut assign, &mut used, &mut |nodes| {
        let pending: Vec<(EdgeId, Edge)> = pattern.edges().filter(|(e, _)| !fixed.edges.contains_key(e)).collect();
        let mut emap = fixed.edges.clone();
        let mut eused: BTreeSet<EdgeId> = fixed.edges.values().copied().collect();
        extend_edges(host, nodes, &pending, 0, &mut emap, &mut eused, &mut |edges| {
            out.push(Morphism {
                nodes: nodes.clone(),
                edges: edges.clone(),
            });
        });
    });
    out
}

fn extend_nodes<L: NodeLabel>(
    pattern: &Graph<L>,
    host: &Graph<L>,
    free: &[NodeId],
    at: usize,
    assign: &mut BTreeMap<NodeId, NodeId>,
    used: &mut BTreeSet<NodeId>,
    f: &mut dyn FnMut(&BTreeMap<NodeId, NodeId>),
) {
    if at == free.len() {
        f(assign);
        return;
    }
    let v = free[at];
    let want = pattern.label(v);
    for (w, have) in host.nodes() {
        if used.contains(&w) {
            continue;
        }
        if let Some(l) = want {
            match have {
                Some(h) if l.same(h) => {}
                _ => continue,
            }
        }
        // prune: loops and edges to already-assigned nodes must be realisable
        if !edge_counts_feasible(pattern, host, v, w, assign) {
            continue;
        }
        assign.insert(v, w);
        used.insert(w);
        extend_nodes(pattern, host, free, at + 1, assign, used, f);
        used.remove(&w);
        assign.remove(&v);
    }
}

pub(crate) fn edge_counts_feasible<A: NodeLabel, B: NodeLabel>(
    pattern: &Graph<A>,
    host: &Graph<B>,
    v: NodeId,
    w: NodeId,
    assign: &BTreeMap<NodeId, NodeId>,
) -> bool {
    let mut need: BTreeMap<(NodeId, NodeId), usize> = BTreeMap::new();
    for (_, e) in pattern.edges() {
        let map = |x: NodeId| if x == v { Some(w) } else { assign.get(&x).copied() };
        if e.src != v && e.tgt != v {
            continue;
        }
        if let (Some(s), Some(t)) = (map(e.src), map(e.tgt)) {
            *need.entry((s, t)).or_default() += 1;
        }
    }
    need.iter().all(|((s, t), n)| host.edges().filter(|(_, e)| e.src == *s && e.tgt == *t).count() >= *n)
}

pub(crate) fn extend_edges<L: NodeLabel>(
    host: &Graph<L>,
    nodes: &BTreeMap<NodeId, NodeId>,
    pending: &[(EdgeId, Edge)],
    at: usize,
    emap: &mut BTreeMap<EdgeId, EdgeId>,
    used: &mut BTreeSet<EdgeId>,
    f: &mut dyn FnMut(&BTreeMap<EdgeId, EdgeId>),
) {
    if at == pending.len() {
        f(emap);
        return;
    }
    let (e, d) = pending[at];
    let (s, t) = (nodes[&d.src], nodes[&d.tgt]);
    for (h, hd) in host.edges() {
        if hd.src != s || hd.tgt != t || used.contains(&h) {
            continue;
        }
        emap.insert(e, h);
        used.insert(h);
        extend_edges(host, nodes, pending, at + 1, emap, used, f);
        used.remove(&h);
        emap.remove(&e);
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PushoutError {
    #[error("label clash when gluing node {0}")]
    LabelClash(NodeId),
    #[error("morphisms of the span must be injective")]
    NotInjective,
}

/// Result of gluing `P'` and `C` along `P`.
#[derive(Debug, Clone)]
pub struct Pushout<L> {
    pub object: Graph<L>,
    /// `P' -> object`; the identity on ids.
    pub from_left: Morphism,
    /// `C -> object`.
    pub from_right: Morphism,
}

/// Pushout of injective `p: P -> P'` and `a: P -> C`. The result keeps the
/// ids of `P'`; items of `C` outside `a(P)` receive fresh ids. A node that is
/// unlabelled on one side takes the label of the other (natural pushout).
pub fn pushout<L: NodeLabel>(
    p_dom: &Graph<L>,
    left: &Graph<L>,
    p: &Morphism,
    right: &Graph<L>,
    a: &Morphism,
) -> Result<Pushout<L>, PushoutError> {
    if !p.is_injective() || !a.is_injective() {
        return Err(PushoutError::NotInjective);
    }
    let mut object = left.clone();
    let a_inv_nodes: BTreeMap<NodeId, NodeId> = a.nodes.iter().map(|(k, v)| (*v, *k)).collect();
    let a_inv_edges: BTreeMap<EdgeId, EdgeId> = a.edges.iter().map(|(k, v)| (*v, *k)).collect();
    let mut q = Morphism::default();
    for (v, l) in right.nodes() {
        match a_inv_nodes.get(&v) {
            Some(pv) => {
                let target = p.nodes[pv];
                match (object.label(target), l) {
                    (None, Some(l)) => object.set_label(target, Some(l.clone())).expect("node exists"),
                    (Some(m), Some(l)) if !m.same(l) => return Err(PushoutError::LabelClash(target)),
                    _ => {}
                }
                q.nodes.insert(v, target);
            }
            None => {
                let id = object.add_fresh_node(l.cloned());
                q.nodes.insert(v, id);
            }
        }
    }
    for (e, d) in right.edges() {
        match a_inv_edges.get(&e) {
            Some(pe) => {
                q.edges.insert(e, p.edges[pe]);
            }
            None => {
                let id = object
                    .add_edge(q.nodes[&d.src], q.nodes[&d.tgt])
                    .expect("endpoints exist");
                q.edges.insert(e, id);
            }
        }
    }
    let _ = p_dom;
    Ok(Pushout {
        from_left: left.identity(),
        from_right: q,
        object,
    })
}

/// Natural pushout complement of `k: K -> L` and `a: L -> X`.
#[derive(Debug, Clone)]
pub struct PushoutComplement<L> {
    pub object: Graph<L>,
    /// `K -> Z`.
    pub from_interface: Morphism,
    /// `Z -> X`; the identity on ids.
    pub into_host: Morphism,
}

/// Returns `Z = X - a(L - k(K))` with the images of interface nodes labelled
/// as in `K`, or `None` if the dangling condition fails (an edge of `X`
/// outside `a(L)` is incident to a deleted node).
pub fn pushout_complement<L: NodeLabel>(
    interface: &Graph<L>,
    lhs: &Graph<L>,
    k: &Morphism,
    host: &Graph<L>,
    a: &Morphism,
) -> Option<PushoutComplement<L>> {
    let kept_lhs: BTreeSet<NodeId> = k.nodes.values().copied().collect();
    let kept_lhs_edges: BTreeSet<EdgeId> = k.edges.values().copied().collect();
    let deleted_nodes: BTreeSet<NodeId> = lhs
        .node_ids()
        .filter(|v| !kept_lhs.contains(v))
        .map(|v| a.nodes[&v])
        .collect();
    let deleted_edges: BTreeSet<EdgeId> = lhs
        .edge_ids()
        .filter(|e| !kept_lhs_edges.contains(e))
        .map(|e| a.edges[&e])
        .collect();
    let matched_edges = a.edge_image();
    for (e, d) in host.edges() {
        if matched_edges.contains(&e) {
            continue;
        }
        if deleted_nodes.contains(&d.src) || deleted_nodes.contains(&d.tgt) {
            return None;
        }
    }
    let mut object = host.clone();
    for e in &deleted_edges {
        object.remove_edge(*e);
    }
    for v in &deleted_nodes {
        object.remove_node(*v);
    }
    let from_interface = k.then(a);
    for (kv, l) in interface.nodes() {
        let target = from_interface.nodes[&kv];
        object.set_label(target, l.cloned()).expect("interface node kept");
    }
    let into_host = Morphism {
        nodes: object.node_ids().map(|v| (v, v)).collect(),
        edges: object.edge_ids().map(|e| (e, e)).collect(),
    };
    Some(PushoutComplement {
        object,
        from_interface,
        into_host,
    })
}

/// One surjective quotient `e` of a pushout object.
#[derive(Debug, Clone)]
pub struct Overlap<L> {
    pub object: Graph<L>,
    /// `P' -> E`; the identity on the ids of `P'`.
    pub from_left: Morphism,
    /// `C -> E`.
    pub from_right: Morphism,
}

/// Enumerates the quotients `e: C'' -> E` that keep `b = e ∘ a'` and
/// `s = e ∘ q` injective: each identifies some items only in the image of
/// `a'` with items only in the image of `q`. Nodes merge only if their labels
/// agree (or one side is unlabelled); edges merge only if their endpoints
/// coincide after the node merges. The identity quotient comes first.
pub fn enumerate_overlap_quotients<L: NodeLabel>(
    left: &Graph<L>,
    po: &Pushout<L>,
    right: &Graph<L>,
) -> Vec<Overlap<L>> {
    let left_nodes = po.from_left.node_image();
    let right_nodes = po.from_right.node_image();
    let left_edges = po.from_left.edge_image();
    let right_edges = po.from_right.edge_image();
    let left_only: Vec<NodeId> = left_nodes.difference(&right_nodes).copied().collect();
    let right_only: Vec<NodeId> = right_nodes.difference(&left_nodes).copied().collect();
    let left_only_edges: Vec<EdgeId> = left_edges.difference(&right_edges).copied().collect();
    let right_only_edges: Vec<EdgeId> = right_edges.difference(&left_edges).copied().collect();
    let obj = &po.object;
    let _ = (left, right);

    let compatible = |u: NodeId, w: NodeId| match (obj.label(u), obj.label(w)) {
        (Some(a), Some(b)) => a.same(b),
        _ => true,
    };

    let mut out = Vec::new();
    // node merges: right-only node -> optional left-only partner
    let mut node_merge: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut taken: BTreeSet<NodeId> = BTreeSet::new();
    choose_partners(
        &right_only,
        0,
        &left_only,
        &compatible,
        &mut node_merge,
        &mut taken,
        &mut |node_merge| {
            let resolve = |v: NodeId| *node_merge.get(&v).unwrap_or(&v);
            let edge_ok = |le: EdgeId, re: EdgeId| {
                let (a, b) = (obj.edge(le).expect("edge"), obj.edge(re).expect("edge"));
                resolve(a.src) == resolve(b.src) && resolve(a.tgt) == resolve(b.tgt)
            };
            let mut edge_merge: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
            let mut etaken: BTreeSet<EdgeId> = BTreeSet::new();
            choose_edge_partners(
                &right_only_edges,
                0,
                &left_only_edges,
                &edge_ok,
                &mut edge_merge,
                &mut etaken,
                &mut |edge_merge| {
                    out.push(build_quotient(po, node_merge, edge_merge));
                },
            );
        },
    );
    out
}

fn choose_partners(
    items: &[NodeId],
    at: usize,
    partners: &[NodeId],
    ok: &dyn Fn(NodeId, NodeId) -> bool,
    chosen: &mut BTreeMap<NodeId, NodeId>,
    taken: &mut BTreeSet<NodeId>,
    f: &mut dyn FnMut(&BTreeMap<NodeId, NodeId>),
) {
    if at == items.len() {
        f(chosen);
        return;
    }
    let w = items[at];
    choose_partners(items, at + 1, partners, ok, chosen, taken, f);
    for &u in partners {
        if taken.contains(&u) || !ok(u, w) {
            continue;
        }
        chosen.insert(w, u);
        taken.insert(u);
        choose_partners(items, at + 1, partners, ok, chosen, taken, f);
        taken.remove(&u);
        chosen.remove(&w);
    }
}

fn choose_edge_partners(
    items: &[EdgeId],
    at: usize,
    partners: &[EdgeId],
    ok: &dyn Fn(EdgeId, EdgeId) -> bool,
    chosen: &mut BTreeMap<EdgeId, EdgeId>,
    taken: &mut BTreeSet<EdgeId>,
    f: &mut dyn FnMut(&BTreeMap<EdgeId, EdgeId>),
) {
    if at == items.len() {
        f(chosen);
        return;
    }
    let w = items[at];
    choose_edge_partners(items, at + 1, partners, ok, chosen, taken, f);
    for &u in partners {
        if taken.contains(&u) || !ok(u, w) {
            continue;
        }
        chosen.insert(w, u);
        taken.insert(u);
        choose_edge_partners(items, at + 1, partners, ok, chosen, taken, f);
        taken.remove(&u);
        chosen.remove(&w);
    }
}

fn build_quotient<L: NodeLabel>(
    po: &Pushout<L>,
    node_merge: &BTreeMap<NodeId, NodeId>,
    edge_merge: &BTreeMap<EdgeId, EdgeId>,
) -> Overlap<L> {
    let obj = &po.object;
    let mut object = Graph::new();
    for (v, l) in obj.nodes() {
        if node_merge.contains_key(&v) {
            continue;
        }
        object.add_node(v, l.cloned()).expect("unique");
    }
    for (w, u) in node_merge {
        if object.label(*u).is_none() {
            if let Some(l) = obj.label(*w) {
                object.set_label(*u, Some(l.clone())).expect("exists");
            }
        }
    }
    let nmap = |v: NodeId| *node_merge.get(&v).unwrap_or(&v);
    for (e, d) in obj.edges() {
        if edge_merge.contains_key(&e) {
            continue;
        }
        object.add_edge_with_id(e, nmap(d.src), nmap(d.tgt)).expect("endpoints kept");
    }
    let emap = |e: EdgeId| *edge_merge.get(&e).unwrap_or(&e);
    let quotient = Morphism {
        nodes: obj.node_ids().map(|v| (v, nmap(v))).collect(),
        edges: obj.edge_ids().map(|e| (e, emap(e))).collect(),
    };
    Overlap {
        from_left: po.from_left.then(&quotient),
        from_right: po.from_right.then(&quotient),
        object,
    }
}
