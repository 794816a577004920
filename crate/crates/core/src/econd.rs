//! E-conditions: nested graph conditions with integer quantifiers and
//! interpretation constraints, and their satisfaction by host graphs.
//!
//! A condition is always read relative to a context graph. The graph of an
//! `Exists` node contains its context by identity of node and edge ids, so
//! the morphism `a: P -> C` is the inclusion and nested conditions refer to
//! outer nodes simply by reusing their ids. An E-constraint is a closed
//! condition over the empty context.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::ops::ControlFlow;

use thiserror::Error;

use crate::expr::{var, Constraint, HostLabel, IntExpr, Interp, Label, Subst, Var};
use crate::graph::{EdgeId, HostGraph, Morphism, NodeId, SymGraph};
use crate::matching::{match_graph, Pending};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cond {
    True,
    False,
    Constraint(Constraint),
    ExistsInt(Var, Box<Cond>),
    /// `∃a: P -> C. body` where the graph is `C` and contains `P` by ids.
    Exists(Box<SymGraph>, Box<Cond>),
    Not(Box<Cond>),
    And(Vec<Cond>),
    Or(Vec<Cond>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CondError {
    #[error("substitution would capture variable {0}")]
    Capture(Var),
    #[error("condition has free variables: {0}")]
    FreeVariables(String),
    #[error("ill-formed condition: {0}")]
    IllFormed(String),
}

impl Cond {
    pub fn not(c: Cond) -> Cond {
        Cond::Not(Box::new(c))
    }

    pub fn and(a: Cond, b: Cond) -> Cond {
        Cond::And(vec![a, b])
    }

    pub fn or(a: Cond, b: Cond) -> Cond {
        Cond::Or(vec![a, b])
    }

    pub fn implies(a: Cond, b: Cond) -> Cond {
        Cond::Or(vec![Cond::not(a), b])
    }

    pub fn exists(graph: SymGraph, body: Cond) -> Cond {
        Cond::Exists(Box::new(graph), Box::new(body))
    }

    pub fn exists_int(x: Var, body: Cond) -> Cond {
        Cond::ExistsInt(x, Box::new(body))
    }

    /// `∃x1. … ∃xn. body`.
    pub fn exists_ints(vars: impl IntoIterator<Item = Var>, body: Cond) -> Cond {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |acc, x| Cond::exists_int(x, acc))
    }

    /// `∀x. c`, i.e. `¬∃x. ¬c`.
    pub fn forall_int(x: Var, body: Cond) -> Cond {
        Cond::not(Cond::exists_int(x, Cond::not(body)))
    }

    /// `∀a. c`, i.e. `¬∃a. ¬c`.
    pub fn forall(graph: SymGraph, body: Cond) -> Cond {
        Cond::not(Cond::exists(graph, Cond::not(body)))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut add = |vs: BTreeSet<Var>, bound: &Vec<Var>| {
            for v in vs {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Cond::True | Cond::False => {}
            Cond::Constraint(g) => add(g.vars(), bound),
            Cond::ExistsInt(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Cond::Exists(g, b) => {
                add(graph_vars(g), bound);
                b.collect_free(bound, out);
            }
            Cond::Not(b) => b.collect_free(bound, out),
            Cond::And(cs) | Cond::Or(cs) => {
                for c in cs {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    /// Every variable occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |c| match c {
            Cond::Constraint(g) => out.extend(g.vars()),
            Cond::ExistsInt(x, _) => {
                out.insert(x.clone());
            }
            Cond::Exists(g, _) => out.extend(graph_vars(g)),
            _ => {}
        });
        out
    }

    pub fn collect_consts(&self, out: &mut BTreeSet<i64>) {
        self.visit(&mut |c| match c {
            Cond::Constraint(g) => g.collect_consts(out),
            Cond::Exists(g, _) => {
                for (_, l) in g.nodes() {
                    if let Some(l) = l {
                        for e in l.items() {
                            e.collect_consts(out);
                        }
                    }
                }
            }
            _ => {}
        });
    }

    /// Number of integer quantifiers.
    pub fn int_binders(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |c| {
            if matches!(c, Cond::ExistsInt(..)) {
                n += 1;
            }
        });
        n
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Cond)) {
        f(self);
        match self {
            Cond::ExistsInt(_, b) | Cond::Exists(_, b) | Cond::Not(b) => b.visit(f),
            Cond::And(cs) | Cond::Or(cs) => {
                for c in cs {
                    c.visit(f);
                }
            }
            _ => {}
        }
    }

    /// Number of AST nodes, a rough size measure.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Capture-avoiding substitution into labels and constraints. Bound
    /// occurrences of mapped variables are left alone; a binder that would
    /// capture a variable of the substituted expressions is an error.
    pub fn subst(&self, sigma: &Subst) -> Result<Cond, CondError> {
        if sigma.is_empty() {
            return Ok(self.clone());
        }
        Ok(match self {
            Cond::True | Cond::False => self.clone(),
            Cond::Constraint(g) => Cond::Constraint(g.subst(sigma)),
            Cond::ExistsInt(x, b) => {
                let mut inner = sigma.clone();
                inner.remove(x);
                let body_free = b.free_vars();
                let captures = inner
                    .iter()
                    .any(|(k, e)| body_free.contains(k) && e.mentions(x));
                if captures {
                    return Err(CondError::Capture(x.clone()));
                }
                Cond::ExistsInt(x.clone(), Box::new(b.subst(&inner)?))
            }
            Cond::Exists(g, b) => Cond::Exists(Box::new(subst_graph(g, sigma)), Box::new(b.subst(sigma)?)),
            Cond::Not(b) => Cond::not(b.subst(sigma)?),
            Cond::And(cs) => Cond::And(cs.iter().map(|c| c.subst(sigma)).collect::<Result<_, _>>()?),
            Cond::Or(cs) => Cond::Or(cs.iter().map(|c| c.subst(sigma)).collect::<Result<_, _>>()?),
        })
    }

    /// Renames every bound variable to a fresh name from `fresh`, making
    /// binders pairwise distinct and disjoint from anything `fresh` avoids.
    pub fn rename_bound(&self, fresh: &mut Fresh) -> Cond {
        self.rename_bound_in(&Subst::new(), fresh)
    }

    fn rename_bound_in(&self, sigma: &Subst, fresh: &mut Fresh) -> Cond {
        match self {
            Cond::True | Cond::False => self.clone(),
            Cond::Constraint(g) => Cond::Constraint(g.subst(sigma)),
            Cond::ExistsInt(x, b) => {
                let y = fresh.next(x);
                let mut inner = sigma.clone();
                inner.insert(x.clone(), IntExpr::Var(y.clone()));
                Cond::ExistsInt(y, Box::new(b.rename_bound_in(&inner, fresh)))
            }
            Cond::Exists(g, b) => Cond::Exists(Box::new(subst_graph(g, sigma)), Box::new(b.rename_bound_in(sigma, fresh))),
            Cond::Not(b) => Cond::not(b.rename_bound_in(sigma, fresh)),
            Cond::And(cs) => Cond::And(cs.iter().map(|c| c.rename_bound_in(sigma, fresh)).collect()),
            Cond::Or(cs) => Cond::Or(cs.iter().map(|c| c.rename_bound_in(sigma, fresh)).collect()),
        }
    }

    /// Checks that every `Exists` graph contains its context.
    pub fn check_well_formed(&self, ctx: &SymGraph) -> Result<(), CondError> {
        match self {
            Cond::True | Cond::False | Cond::Constraint(_) => Ok(()),
            Cond::ExistsInt(_, b) | Cond::Not(b) => b.check_well_formed(ctx),
            Cond::Exists(g, b) => {
                for (v, l) in ctx.nodes() {
                    if !g.has_node(v) {
                        return Err(CondError::IllFormed(format!("node {v} of the context is missing")));
                    }
                    if let Some(l) = l {
                        if g.label(v).is_none_or(|m| !m.same_as(l)) {
                            return Err(CondError::IllFormed(format!("node {v} changes its label")));
                        }
                    }
                }
                for (e, d) in ctx.edges() {
                    if g.edge(e) != Some(d) {
                        return Err(CondError::IllFormed(format!("edge {e} of the context is missing")));
                    }
                }
                b.check_well_formed(g)
            }
            Cond::And(cs) | Cond::Or(cs) => cs.iter().try_for_each(|c| c.check_well_formed(ctx)),
        }
    }

    /// Top-level conjuncts (a non-conjunction is its own single conjunct).
    pub fn conjuncts(&self) -> Vec<&Cond> {
        match self {
            Cond::And(cs) => cs.iter().flat_map(Cond::conjuncts).collect(),
            Cond::True => Vec::new(),
            c => vec![c],
        }
    }

    /// Top-level disjuncts.
    pub fn disjuncts(&self) -> Vec<&Cond> {
        match self {
            Cond::Or(cs) => cs.iter().flat_map(Cond::disjuncts).collect(),
            Cond::False => Vec::new(),
            c => vec![c],
        }
    }
}

/// Variables occurring in the node labels of a graph.
pub fn graph_vars(g: &SymGraph) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    for (_, l) in g.nodes() {
        if let Some(l) = l {
            l.collect_vars(&mut out);
        }
    }
    out
}

pub fn subst_graph(g: &SymGraph, sigma: &Subst) -> SymGraph {
    if sigma.is_empty() {
        return g.clone();
    }
    g.map_labels(|l| l.subst(sigma))
}

/// Generator of variable names that avoid a given set.
#[derive(Debug, Clone, Default)]
pub struct Fresh {
    taken: BTreeSet<Var>,
}

impl Fresh {
    pub fn avoiding(taken: impl IntoIterator<Item = Var>) -> Self {
        Fresh {
            taken: taken.into_iter().collect(),
        }
    }

    pub fn avoid(&mut self, vars: impl IntoIterator<Item = Var>) {
        self.taken.extend(vars);
    }

    /// A fresh name derived from `hint` (its alphabetic stem plus a number).
    pub fn next(&mut self, hint: &str) -> Var {
        let stem: String = hint.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_').to_string();
        let stem = if stem.is_empty() { "v".to_string() } else { stem };
        let plain = var(&stem);
        if !self.taken.contains(&plain) {
            self.taken.insert(plain.clone());
            return plain;
        }
        let mut i = 1;
        loop {
            let v = var(&format!("{stem}{i}"));
            if !self.taken.contains(&v) {
                self.taken.insert(v.clone());
                return v;
            }
            i += 1;
        }
    }
}

/// Nodes, relabelled context nodes and edges that `g` adds to `ctx`.
pub fn new_items(ctx: &SymGraph, g: &SymGraph) -> (Vec<NodeId>, Vec<NodeId>, Vec<EdgeId>) {
    let nodes = g.node_ids().filter(|v| !ctx.has_node(*v)).collect();
    let relabelled = g
        .node_ids()
        .filter(|v| ctx.has_node(*v) && ctx.label(*v).is_none() && g.label(*v).is_some())
        .collect();
    let edges = g.edge_ids().filter(|e| !ctx.has_edge(*e)).collect();
    (nodes, relabelled, edges)
}

// ---------------------------------------------------------------------------
// Simplification

/// Equivalence-preserving clean-up: flattening, unit and zero elimination,
/// double negation, vacuous quantifiers and duplicate operands (up to
/// alpha-equivalence).
pub fn simplify(c: &Cond, ctx: &SymGraph) -> Cond {
    match c {
        Cond::True | Cond::False => c.clone(),
        Cond::Constraint(Constraint::True) => Cond::True,
        Cond::Constraint(Constraint::False) => Cond::False,
        Cond::Constraint(_) => c.clone(),
        Cond::Not(b) => match simplify(b, ctx) {
            Cond::True => Cond::False,
            Cond::False => Cond::True,
            Cond::Not(inner) => *inner,
            s => Cond::not(s),
        },
        Cond::ExistsInt(x, b) => {
            let s = simplify(b, ctx);
            if s == Cond::False {
                Cond::False
            } else if !s.free_vars().contains(x) {
                s
            } else {
                Cond::exists_int(x.clone(), s)
            }
        }
        Cond::Exists(g, b) => {
            let s = simplify(b, g);
            let (nodes, relabelled, edges) = new_items(ctx, g);
            if s == Cond::False {
                Cond::False
            } else if nodes.is_empty() && relabelled.is_empty() && edges.is_empty() {
                s
            } else {
                Cond::Exists(g.clone(), Box::new(s))
            }
        }
        Cond::And(cs) => {
            let mut out: Vec<Cond> = Vec::new();
            let mut keys = BTreeSet::new();
            let mut stack: Vec<Cond> = cs.iter().rev().map(|c| simplify(c, ctx)).collect();
            while let Some(s) = stack.pop() {
                match s {
                    Cond::True => {}
                    Cond::False => return Cond::False,
                    Cond::And(inner) => stack.extend(inner.into_iter().rev()),
                    s => {
                        if keys.insert(alpha_key(&s, ctx)) {
                            out.push(s);
                        }
                    }
                }
            }
            if conflicting_equalities(&out) {
                return Cond::False;
            }
            match out.len() {
                0 => Cond::True,
                1 => out.pop().expect("one element"),
                _ => Cond::And(out),
            }
        }
        Cond::Or(cs) => {
            let mut out: Vec<Cond> = Vec::new();
            let mut keys = BTreeSet::new();
            let mut stack: Vec<Cond> = cs.iter().rev().map(|c| simplify(c, ctx)).collect();
            while let Some(s) = stack.pop() {
                match s {
                    Cond::False => {}
                    Cond::True => return Cond::True,
                    Cond::Or(inner) => stack.extend(inner.into_iter().rev()),
                    s => {
                        if keys.insert(alpha_key(&s, ctx)) {
                            out.push(s);
                        }
                    }
                }
            }
            match out.len() {
                0 => Cond::False,
                1 => out.pop().expect("one element"),
                _ => Cond::Or(out),
            }
        }
    }
}

/// True if the conjuncts pin one variable to two different constants.
fn conflicting_equalities(conjuncts: &[Cond]) -> bool {
    let mut pinned: BTreeMap<&Var, i64> = BTreeMap::new();
    for c in conjuncts {
        if let Cond::Constraint(Constraint::Cmp(crate::expr::CmpOp::Eq, l, r)) = c {
            let (x, k) = match (l.as_var(), r.as_const(), r.as_var(), l.as_const()) {
                (Some(x), Some(k), _, _) | (_, _, Some(x), Some(k)) => (x, k),
                _ => continue,
            };
            if *pinned.entry(x).or_insert(k) != k {
                return true;
            }
        }
    }
    false
}

/// Moves integer quantifiers inward: over disjunctions, past conjuncts and
/// integer quantifiers that do not mention the variable, and drops those
/// with no occurrence at all. Equivalent over any non-empty integer domain;
/// it keeps the satisfaction checker from enumerating a variable outside a
/// disjunction where only some disjuncts can bind it by matching.
pub fn miniscope(c: &Cond) -> Cond {
    miniscope_free(c).0
}

fn miniscope_free(c: &Cond) -> (Cond, BTreeSet<Var>) {
    match c {
        Cond::True | Cond::False => (c.clone(), BTreeSet::new()),
        Cond::Constraint(k) => (c.clone(), k.vars()),
        Cond::Not(b) => {
            let (b, fv) = miniscope_free(b);
            (Cond::not(b), fv)
        }
        Cond::And(cs) | Cond::Or(cs) => {
            let mut fv = BTreeSet::new();
            let parts = cs
                .iter()
                .map(|c| {
                    let (c, f) = miniscope_free(c);
                    fv.extend(f);
                    c
                })
                .collect();
            let out = if matches!(c, Cond::And(_)) { Cond::And(parts) } else { Cond::Or(parts) };
            (out, fv)
        }
        Cond::Exists(g, b) => {
            let (b, mut fv) = miniscope_free(b);
            fv.extend(graph_vars(g));
            (Cond::Exists(g.clone(), Box::new(b)), fv)
        }
        Cond::ExistsInt(x, b) => {
            let (b, _) = miniscope_free(b);
            let out = push_exists_int(x, b);
            let fv = out.free_vars();
            (out, fv)
        }
    }
}

fn push_exists_int(x: &Var, b: Cond) -> Cond {
    if !b.free_vars().contains(x) {
        return b;
    }
    match b {
        Cond::Or(ds) => Cond::Or(ds.into_iter().map(|d| push_exists_int(x, d)).collect()),
        Cond::And(cs) => {
            let (with, mut without): (Vec<Cond>, Vec<Cond>) = cs.into_iter().partition(|c| c.free_vars().contains(x));
            if without.is_empty() {
                return Cond::exists_int(x.clone(), Cond::And(with));
            }
            let inner = if with.len() == 1 { with.into_iter().next().expect("one") } else { Cond::And(with) };
            without.push(push_exists_int(x, inner));
            Cond::And(without)
        }
        Cond::ExistsInt(y, inner) => Cond::exists_int(y, push_exists_int(x, *inner)),
        b => Cond::exists_int(x.clone(), b),
    }
}

// ---------------------------------------------------------------------------
// Printing and alpha-equivalence keys

/// Renders a condition in the concrete syntax accepted by the parser.
pub fn render(c: &Cond, ctx: &SymGraph) -> String {
    let mut p = Printer {
        alpha: false,
        vars: BTreeMap::new(),
        counter: 0,
    };
    let mut out = String::new();
    p.cond(c, ctx, &BTreeMap::new(), &mut out);
    out
}

/// Canonical string identifying a condition up to renaming of bound
/// variables, renumbering of new nodes, and operand order of `and`/`or`.
pub fn alpha_key(c: &Cond, ctx: &SymGraph) -> String {
    let mut p = Printer {
        alpha: true,
        vars: BTreeMap::new(),
        counter: 0,
    };
    let mut out = String::new();
    let ids: BTreeMap<NodeId, NodeId> = ctx.node_ids().map(|v| (v, v)).collect();
    p.cond(c, ctx, &ids, &mut out);
    out
}

/// Structural equality modulo simplification and alpha-equivalence.
pub fn equivalent_syntax(a: &Cond, b: &Cond, ctx: &SymGraph) -> bool {
    alpha_key(&simplify(a, ctx), ctx) == alpha_key(&simplify(b, ctx), ctx)
}

struct Printer {
    alpha: bool,
    /// Renaming of bound variables (alpha mode), innermost last.
    vars: BTreeMap<Var, Vec<Var>>,
    counter: usize,
}

fn precedence(c: &Cond) -> u8 {
    match c {
        Cond::Or(_) => 1,
        Cond::And(_) => 2,
        Cond::Not(_) => 3,
        _ => 4,
    }
}

/// Quantifiers extend as far right as possible, so they must be
/// parenthesised when something follows them.
fn open_ended(c: &Cond) -> bool {
    match c {
        Cond::ExistsInt(..) | Cond::Exists(..) => true,
        Cond::Not(b) => open_ended(b),
        _ => false,
    }
}

impl Printer {
    fn subst_for(&self) -> Subst {
        self.vars
            .iter()
            .filter_map(|(k, v)| v.last().map(|n| (k.clone(), IntExpr::Var(n.clone()))))
            .collect()
    }

    fn label(&self, l: &Label) -> String {
        if self.alpha {
            l.subst(&self.subst_for()).normalize().to_string()
        } else {
            l.to_string()
        }
    }

    fn cond(&mut self, c: &Cond, ctx: &SymGraph, ids: &BTreeMap<NodeId, NodeId>, out: &mut String) {
        match c {
            Cond::True => out.push_str("true"),
            Cond::False => out.push_str("false"),
            Cond::Constraint(g) => {
                let g = if self.alpha { g.subst(&self.subst_for()) } else { g.clone() };
                let s = g.to_string();
                if matches!(g, Constraint::And(..) | Constraint::Or(..) | Constraint::Not(..)) {
                    let _ = write!(out, "({s})");
                } else {
                    out.push_str(&s);
                }
            }
            Cond::ExistsInt(..) => {
                let mut vars = Vec::new();
                let mut cur = c;
                while let Cond::ExistsInt(x, b) = cur {
                    vars.push(x.clone());
                    cur = b;
                }
                let names: Vec<Var> = vars
                    .iter()
                    .map(|x| {
                        if self.alpha {
                            let n = var(&format!("_{}", self.counter));
                            self.counter += 1;
                            self.vars.entry(x.clone()).or_default().push(n.clone());
                            n
                        } else {
                            x.clone()
                        }
                    })
                    .collect();
                out.push_str("ex int ");
                out.push_str(&names.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "));
                out.push_str(". ");
                self.cond(cur, ctx, ids, out);
                if self.alpha {
                    for x in &vars {
                        if let Some(stack) = self.vars.get_mut(x) {
                            stack.pop();
                        }
                    }
                }
            }
            Cond::Exists(g, b) => {
                let (nodes, relabelled, edges) = new_items(ctx, g);
                let mut ids = ids.clone();
                if self.alpha {
                    // number new nodes by label and degree, keeping the
                    // original order among ties
                    let mut keyed: Vec<(String, usize, usize, NodeId)> = nodes
                        .iter()
                        .map(|v| {
                            let l = g.label(*v).map(|l| self.label(l)).unwrap_or_default();
                            let out_deg = g.edges().filter(|(_, e)| e.src == *v).count();
                            let in_deg = g.edges().filter(|(_, e)| e.tgt == *v).count();
                            (l, out_deg, in_deg, *v)
                        })
                        .collect();
                    keyed.sort();
                    let base = ids.values().map(|v| v.0 + 1).max().unwrap_or(0);
                    for (i, k) in keyed.iter().enumerate() {
                        ids.insert(k.3, NodeId(base + i as u32));
                    }
                } else {
                    for v in &nodes {
                        ids.insert(*v, *v);
                    }
                    for v in ctx.node_ids() {
                        ids.insert(v, v);
                    }
                }
                out.push_str("ex {");
                let mut items: Vec<String> = Vec::new();
                for v in nodes.iter().chain(&relabelled) {
                    let id = ids[v];
                    match g.label(*v) {
                        Some(l) => items.push(format!(" node {id} {};", self.label(l))),
                        None => items.push(format!(" node {id};")),
                    }
                }
                let mut edge_items = render_edges(g, &edges, &ids);
                if self.alpha {
                    items.sort();
                    edge_items.sort();
                }
                for s in items.iter().chain(&edge_items) {
                    out.push_str(s);
                }
                out.push_str(" }");
                if **b != Cond::True {
                    out.push_str(". ");
                    self.cond(b, g, &ids, out);
                }
            }
            Cond::Not(b) => {
                out.push_str("not ");
                if precedence(b) < 3 && !open_ended(b) {
                    out.push('(');
                    self.cond(b, ctx, ids, out);
                    out.push(')');
                } else {
                    self.cond(b, ctx, ids, out);
                }
            }
            Cond::And(cs) | Cond::Or(cs) => {
                let (sep, prec) = if matches!(c, Cond::And(_)) { (" and ", 2) } else { (" or ", 1) };
                let mut parts: Vec<String> = cs
                    .iter()
                    .map(|child| {
                        let mut s = String::new();
                        let wrap = precedence(child) <= prec || open_ended(child);
                        if wrap {
                            s.push('(');
                        }
                        self.cond(child, ctx, ids, &mut s);
                        if wrap {
                            s.push(')');
                        }
                        s
                    })
                    .collect();
                if self.alpha {
                    parts.sort();
                }
                out.push_str(&parts.join(sep));
            }
        }
    }
}

fn render_edges(g: &SymGraph, edges: &[EdgeId], ids: &BTreeMap<NodeId, NodeId>) -> Vec<String> {
    let mut remaining: Vec<(NodeId, NodeId)> = edges
        .iter()
        .map(|e| {
            let d = g.edge(*e).expect("edge");
            (ids[&d.src], ids[&d.tgt])
        })
        .collect();
    let mut out = Vec::new();
    while let Some((s, t)) = remaining.first().copied() {
        remaining.remove(0);
        if s != t {
            if let Some(pos) = remaining.iter().position(|&(a, b)| a == t && b == s) {
                remaining.remove(pos);
                let (a, b) = if s <= t { (s, t) } else { (t, s) };
                out.push(format!(" edge {a} -- {b};"));
                continue;
            }
        }
        out.push(format!(" edge {s} -> {t};"));
    }
    out
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, &SymGraph::new()))
    }
}

// ---------------------------------------------------------------------------
// Satisfaction

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SatConfig {
    /// Extra integer candidates `-W..=W` for quantified variables.
    pub int_window: i64,
    pub warn_unanchored: bool,
}

impl Default for SatConfig {
    fn default() -> Self {
        SatConfig {
            int_window: 2,
            warn_unanchored: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatOutcome {
    pub holds: bool,
    pub warnings: Vec<String>,
}

/// Decides `G ⊨ c` for an E-constraint.
pub fn satisfies(host: &HostGraph, c: &Cond, cfg: &SatConfig) -> Result<SatOutcome, CondError> {
    let free = c.free_vars();
    if !free.is_empty() {
        let names: Vec<String> = free.iter().map(|v| v.to_string()).collect();
        return Err(CondError::FreeVariables(names.join(", ")));
    }
    let c = &miniscope(c);
    let checker = Checker::new(host, c, cfg);
    let holds = checker.eval(c, &Morphism::default(), &mut Interp::new());
    let warnings = if cfg.warn_unanchored { unanchored_warnings(c) } else { Vec::new() };
    Ok(SatOutcome { holds, warnings })
}

/// Fast path used by the oracle: no free-variable check, no warnings and no
/// miniscoping (callers checking many graphs apply [`miniscope`] once).
pub fn holds(host: &HostGraph, c: &Cond, cfg: &SatConfig) -> bool {
    Checker::new(host, c, cfg).eval(c, &Morphism::default(), &mut Interp::new())
}

/// Context satisfaction `p ⊨^I c` for a condition over the domain of `p`.
pub fn satisfies_at(host: &HostGraph, p: &Morphism, interp: &Interp, c: &Cond, cfg: &SatConfig) -> bool {
    let mut i = interp.clone();
    let c = &miniscope(c);
    Checker::new(host, c, cfg).eval(c, p, &mut i)
}

/// A precomputed satisfaction checker for one host graph; reusable across
/// conditions whose constants are covered by `extra_consts`.
pub struct Checker<'a> {
    host: &'a HostGraph,
    domain: Vec<i64>,
}

impl<'a> Checker<'a> {
    pub fn new(host: &'a HostGraph, c: &Cond, cfg: &SatConfig) -> Self {
        let mut values: BTreeSet<i64> = BTreeSet::new();
        for (_, l) in host.nodes() {
            if let Some(HostLabel(vs)) = l {
                values.extend(vs.iter().copied());
            }
        }
        c.collect_consts(&mut values);
        for w in -cfg.int_window..=cfg.int_window {
            values.insert(w);
        }
        // values strictly outside the observed range, one per quantifier,
        // so that distinctness from every label component is witnessable
        let k = c.int_binders() as i64;
        if let (Some(&lo), Some(&hi)) = (values.iter().next(), values.iter().next_back()) {
            for i in 1..=k {
                values.insert(hi.saturating_add(i));
                values.insert(lo.saturating_sub(i));
            }
        }
        Checker {
            host,
            domain: values.into_iter().collect(),
        }
    }

    pub fn eval(&self, c: &Cond, p: &Morphism, interp: &mut Interp) -> bool {
        match c {
            Cond::True => true,
            Cond::False => false,
            Cond::Constraint(g) => g.eval(interp),
            Cond::Not(b) => !self.eval(b, p, interp),
            Cond::And(cs) => cs.iter().all(|c| self.eval(c, p, interp)),
            Cond::Or(cs) => cs.iter().any(|c| self.eval(c, p, interp)),
            Cond::ExistsInt(..) | Cond::Exists(..) => self.exists(c, p, interp),
        }
    }

    fn exists(&self, c: &Cond, p: &Morphism, interp: &mut Interp) -> bool {
        let mut vars: Vec<Var> = Vec::new();
        let mut cur = c;
        while let Cond::ExistsInt(x, b) = cur {
            if !vars.contains(x) {
                vars.push(x.clone());
            }
            cur = b;
        }
        let depth = interp.depth();
        let found = match cur {
            Cond::Exists(g, body) => {
                let in_graph = graph_vars(g);
                // variables that shadow an outer binding are enumerated up
                // front; the rest are bound by matching where possible
                let (anchored, first): (Vec<Var>, Vec<Var>) = vars
                    .iter()
                    .cloned()
                    .partition(|x| in_graph.contains(x) && !interp.contains(x));
                let first: Vec<Var> = first.into_iter().filter(|x| in_graph.contains(x) || interp.contains(x)).collect();
                let later: Vec<Var> = vars
                    .iter()
                    .filter(|x| !anchored.contains(x) && !first.contains(x))
                    .cloned()
                    .collect();
                self.enumerate(&first, interp, &mut |interp| {
                    self.match_exists(g, body, p, interp, &anchored, &later)
                })
            }
            _ => self.enumerate(&vars, interp, &mut |interp| self.eval(cur, p, interp)),
        };
        interp.truncate(depth);
        found
    }

    fn match_exists(
        &self,
        g: &SymGraph,
        body: &Cond,
        p: &Morphism,
        interp: &mut Interp,
        anchored: &[Var],
        later: &[Var],
    ) -> bool {
        let bindable: BTreeSet<Var> = anchored.iter().cloned().collect();
        let r = match_graph(g, self.host, p, interp, &bindable, &mut |m, interp, pending: &Pending| {
            let unbound: Vec<Var> = anchored
                .iter()
                .filter(|x| !interp.contains(x))
                .chain(later)
                .cloned()
                .collect();
            let ok = self.enumerate(&unbound, interp, &mut |interp| {
                pending.iter().all(|(e, v)| e.eval(interp) == Some(*v)) && self.eval(body, m, interp)
            });
            if ok {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        r.is_break()
    }

    fn enumerate(&self, vars: &[Var], interp: &mut Interp, f: &mut dyn FnMut(&mut Interp) -> bool) -> bool {
        let Some((x, rest)) = vars.split_first() else {
            return f(interp);
        };
        let depth = interp.depth();
        for &v in &self.domain {
            interp.bind(x.clone(), v);
            let ok = self.enumerate(rest, interp, f);
            interp.truncate(depth);
            if ok {
                return true;
            }
        }
        false
    }
}

/// Warnings for integer quantifiers whose variable never occurs in a graph
/// label within their scope.
pub fn unanchored_warnings(c: &Cond) -> Vec<String> {
    let mut out = Vec::new();
    c.visit(&mut |n| {
        if let Cond::ExistsInt(x, b) = n {
            let mut anchored = false;
            b.visit(&mut |m| {
                if let Cond::Exists(g, _) = m {
                    if graph_vars(g).contains(x) {
                        anchored = true;
                    }
                }
            });
            if !anchored {
                out.push(format!(
                    "integer variable {x} is not anchored in any graph label; its quantifier is checked over a finite window"
                ));
            }
        }
    });
    out.sort();
    out.dedup();
    out
}
