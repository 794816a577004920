//! Incorrectness triples, proof trees and the proof checker.
//!
//! Axiom conclusions are compared with the schema modulo the simplifier and
//! renaming of bound variables. Side conditions of `Cons` and `IterVar` are
//! implications, discharged syntactically where possible and otherwise by
//! searching a bounded universe for a counterexample.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::econd::{equivalent_syntax, holds, miniscope, render, simplify, Cond, SatConfig};
use crate::graph::{HostGraph, SymGraph};
use crate::oracle::{enumerate_graphs, Universe};
use crate::program::{fmt_rule_set, resolve, Exit, Program};
use crate::rules::{RuleEnv, RuleSchema};
use crate::transform::Transformer;

/// `[c] P [ε: d]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub presumption: Cond,
    pub program: Program,
    pub exit: Exit,
    pub result: Cond,
}

impl Triple {
    pub fn new(presumption: Cond, program: Program, exit: Exit, result: Cond) -> Self {
        Triple {
            presumption,
            program,
            exit,
            result,
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} [{}: {}]",
            self.presumption, self.program, self.exit, self.result
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ProofRule {
    RuleSetSucc,
    RuleSetFail,
    SeqSucc,
    SeqFail,
    IfElse,
    Cons,
    IterZero,
    Iter,
    IterVar,
}

impl ProofRule {
    pub const ALL: [ProofRule; 9] = [
        ProofRule::RuleSetSucc,
        ProofRule::RuleSetFail,
        ProofRule::SeqSucc,
        ProofRule::SeqFail,
        ProofRule::IfElse,
        ProofRule::Cons,
        ProofRule::IterZero,
        ProofRule::Iter,
        ProofRule::IterVar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProofRule::RuleSetSucc => "RuleSetSucc",
            ProofRule::RuleSetFail => "RuleSetFail",
            ProofRule::SeqSucc => "SeqSucc",
            ProofRule::SeqFail => "SeqFail",
            ProofRule::IfElse => "IfElse",
            ProofRule::Cons => "Cons",
            ProofRule::IterZero => "IterZero",
            ProofRule::Iter => "Iter",
            ProofRule::IterVar => "IterVar",
        }
    }

    /// Number of premises; `None` for `IterVar`, whose arity is the chain
    /// length.
    pub fn arity(self) -> Option<usize> {
        match self {
            ProofRule::RuleSetSucc | ProofRule::RuleSetFail | ProofRule::IterZero => Some(0),
            ProofRule::SeqFail | ProofRule::Cons | ProofRule::Iter => Some(1),
            ProofRule::SeqSucc | ProofRule::IfElse => Some(2),
            ProofRule::IterVar => None,
        }
    }
}

impl fmt::Display for ProofRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown proof rule '{0}'")]
pub struct UnknownProofRule(pub String);

impl FromStr for ProofRule {
    type Err = UnknownProofRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProofRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| UnknownProofRule(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hint {
    Cond(Cond),
    Chain(Vec<Cond>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub rule: ProofRule,
    pub conclusion: Triple,
    pub children: Vec<ProofNode>,
    pub hints: BTreeMap<String, Hint>,
}

impl ProofNode {
    pub fn new(rule: ProofRule, conclusion: Triple, children: Vec<ProofNode>) -> Self {
        ProofNode {
            rule,
            conclusion,
            children,
            hints: BTreeMap::new(),
        }
    }

    pub fn with_hint(mut self, key: &str, hint: Hint) -> Self {
        self.hints.insert(key.to_string(), hint);
        self
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofNode::size).sum::<usize>()
    }
}

// ---------------------------------------------------------------------------
// Implication discharge

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DischargeConfig {
    pub universe: Universe,
    pub sat: SatConfig,
}

impl Default for DischargeConfig {
    fn default() -> Self {
        DischargeConfig {
            universe: Universe::default(),
            sat: SatConfig {
                warn_unanchored: false,
                ..SatConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discharge {
    Syntactic,
    BoundedValid(String),
    Refuted(HostGraph),
}

/// Decides `c ⟹ d`: first by syntactic rules (identity up to renaming,
/// dropping antecedent conjuncts, adding consequent disjuncts, `false`
/// antecedent, `true` consequent), otherwise by searching the configured
/// universe for a graph satisfying `c` but not `d`.
pub fn discharge_implication(c: &Cond, d: &Cond, cfg: &DischargeConfig) -> Discharge {
    if implies_syntactically(c, d) {
        return Discharge::Syntactic;
    }
    let (c, d) = (miniscope(c), miniscope(d));
    let graphs = enumerate_graphs(&cfg.universe);
    let found = graphs
        .par_iter()
        .find_first(|g| holds(g, &c, &cfg.sat) && !holds(g, &d, &cfg.sat));
    match found {
        Some(g) => Discharge::Refuted(g.clone()),
        None => Discharge::BoundedValid(cfg.universe.to_string()),
    }
}

/// Sound syntactic fragment of implication.
pub fn implies_syntactically(c: &Cond, d: &Cond) -> bool {
    let empty = SymGraph::new();
    let c = simplify(c, &empty);
    let d = simplify(d, &empty);
    if c == Cond::False || d == Cond::True || equivalent_syntax(&c, &d, &empty) {
        return true;
    }
    let same = |a: &Cond, b: &Cond| equivalent_syntax(a, b, &empty);
    let cs = c.conjuncts();
    let ds = d.disjuncts();
    // every conjunct of d is a conjunct of c
    let dropped = d.conjuncts().iter().all(|x| cs.iter().any(|y| same(x, y)));
    // some disjunct of d is c, or a conjunct of c implies it in this way
    let introduced = ds.iter().any(|x| same(x, &c) || cs.iter().any(|y| same(x, y)));
    // every disjunct of c is a disjunct of d
    let cases = c.disjuncts().iter().all(|x| ds.iter().any(|y| same(x, y)));
    dropped || introduced || cases
}

// ---------------------------------------------------------------------------
// Checking

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obligation {
    /// Path of the node that produced it, e.g. `root.1.0`.
    pub at: String,
    pub antecedent: String,
    pub consequent: String,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Valid {
        obligations: Vec<Obligation>,
    },
    ValidUpToBound {
        bound: String,
        obligations: Vec<Obligation>,
    },
    Rejected {
        step: String,
        rule: String,
        reason: String,
    },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        !matches!(self, Verdict::Rejected { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid { obligations } => {
                write!(f, "Valid ({} side conditions, all syntactic)", obligations.len())
            }
            Verdict::ValidUpToBound { bound, obligations } => {
                let bounded = obligations.iter().filter(|o| o.outcome != "syntactic").count();
                write!(
                    f,
                    "ValidUpToBound ({bounded} of {} side conditions checked over {bound})",
                    obligations.len()
                )
            }
            Verdict::Rejected { step, rule, reason } => write!(f, "Rejected at {step} ({rule}): {reason}"),
        }
    }
}

struct Rejection {
    step: String,
    rule: ProofRule,
    reason: String,
}

struct PendingObligation {
    at: String,
    antecedent: Cond,
    consequent: Cond,
}

/// Checks a proof tree. Structural problems and refuted side conditions
/// give `Rejected`; otherwise the verdict is `Valid` when every side
/// condition was syntactic and `ValidUpToBound` when some needed the
/// bounded search.
pub fn check_proof(root: &ProofNode, env: &RuleEnv, cfg: &DischargeConfig) -> Verdict {
    let checker = ProofChecker {
        env,
        tr: Transformer::default(),
    };
    let mut pending = Vec::new();
    if let Err(r) = checker.node(root, "root", &mut pending) {
        return Verdict::Rejected {
            step: r.step,
            rule: r.rule.to_string(),
            reason: r.reason,
        };
    }
    let results: Vec<(Obligation, Discharge)> = pending
        .par_iter()
        .map(|p| {
            let d = discharge_implication(&p.antecedent, &p.consequent, cfg);
            let outcome = match &d {
                Discharge::Syntactic => "syntactic".to_string(),
                Discharge::BoundedValid(_) => "bounded".to_string(),
                Discharge::Refuted(g) => format!("refuted by {g}"),
            };
            let ob = Obligation {
                at: p.at.clone(),
                antecedent: render(&p.antecedent, &SymGraph::new()),
                consequent: render(&p.consequent, &SymGraph::new()),
                outcome,
            };
            (ob, d)
        })
        .collect();
    if let Some((ob, _)) = results.iter().find(|(_, d)| matches!(d, Discharge::Refuted(_))) {
        return Verdict::Rejected {
            step: ob.at.clone(),
            rule: "side condition".to_string(),
            reason: format!("{} does not imply {}: {}", ob.antecedent, ob.consequent, ob.outcome),
        };
    }
    let bounded = results.iter().any(|(_, d)| matches!(d, Discharge::BoundedValid(_)));
    let obligations = results.into_iter().map(|(o, _)| o).collect();
    if bounded {
        Verdict::ValidUpToBound {
            bound: cfg.universe.to_string(),
            obligations,
        }
    } else {
        Verdict::Valid { obligations }
    }
}

struct ProofChecker<'a> {
    env: &'a RuleEnv,
    tr: Transformer,
}

fn same(a: &Cond, b: &Cond) -> bool {
    equivalent_syntax(a, b, &SymGraph::new())
}

impl ProofChecker<'_> {
    fn node(&self, n: &ProofNode, path: &str, out: &mut Vec<PendingObligation>) -> Result<(), Rejection> {
        let reject = |reason: String| Rejection {
            step: path.to_string(),
            rule: n.rule,
            reason,
        };
        if let Some(k) = n.rule.arity() {
            if n.children.len() != k {
                return Err(reject(format!("expects {k} premises, found {}", n.children.len())));
            }
        }
        let t = &n.conclusion;
        for (what, c) in [("presumption", &t.presumption), ("result", &t.result)] {
            let free = c.free_vars();
            if !free.is_empty() {
                let names: Vec<String> = free.iter().map(|v| v.to_string()).collect();
                return Err(reject(format!("{what} has free variables {}", names.join(", "))));
            }
        }
        t.program
            .check_names(self.env)
            .map_err(|e| reject(e.to_string()))?;
        let child = |i: usize| &n.children[i].conclusion;
        match n.rule {
            ProofRule::RuleSetSucc | ProofRule::RuleSetFail => {
                let Program::RuleSet(names) = &t.program else {
                    return Err(reject(format!("program {} is not a rule set", t.program)));
                };
                let rules = self.rules(names).map_err(&reject)?;
                let app = self.tr.app(&rules);
                let succ = n.rule == ProofRule::RuleSetSucc;
                let guard = if succ { app.clone() } else { Cond::not(app.clone()) };
                let c = split_conjunct(&t.presumption, &guard).ok_or_else(|| {
                    reject(format!(
                        "presumption must have the form c and {}App({})",
                        if succ { "" } else { "not " },
                        fmt_rule_set(names)
                    ))
                })?;
                let expected = match (succ, t.exit) {
                    (true, Exit::Ok) => self
                        .tr
                        .wpost(&rules, &c)
                        .map_err(|e| reject(e.to_string()))?,
                    (true, Exit::Er) | (false, Exit::Ok) => Cond::False,
                    (false, Exit::Er) => Cond::and(c, Cond::not(app)),
                };
                if !same(&t.result, &expected) {
                    return Err(reject(format!(
                        "result must be {}, found {}",
                        render(&simplify(&expected, &SymGraph::new()), &SymGraph::new()),
                        t.result
                    )));
                }
                Ok(())
            }
            ProofRule::IterZero => {
                let Program::Bang(names) = &t.program else {
                    return Err(reject(format!("program {} is not an iteration", t.program)));
                };
                let rules = self.rules(names).map_err(&reject)?;
                let not_app = Cond::not(self.tr.app(&rules));
                split_conjunct(&t.presumption, &not_app).ok_or_else(|| {
                    reject(format!("presumption must have the form c and not App({})", fmt_rule_set(names)))
                })?;
                let expected = match t.exit {
                    Exit::Ok => t.presumption.clone(),
                    Exit::Er => Cond::False,
                };
                if !same(&t.result, &expected) {
                    return Err(reject("result must repeat the presumption (ok) or be false (er)".into()));
                }
                Ok(())
            }
            ProofRule::Iter => {
                let Program::Bang(names) = &t.program else {
                    return Err(reject(format!("program {} is not an iteration", t.program)));
                };
                if t.exit != Exit::Ok {
                    return Err(reject("conclusion must have exit ok".into()));
                }
                let rules = self.rules(names).map_err(&reject)?;
                let app = self.tr.app(&rules);
                split_conjunct(&t.presumption, &app).ok_or_else(|| {
                    reject(format!("presumption must have the form c and App({})", fmt_rule_set(names)))
                })?;
                split_conjunct(&t.result, &Cond::not(app)).ok_or_else(|| {
                    reject(format!("result must have the form d and not App({})", fmt_rule_set(names)))
                })?;
                let unrolled = Program::seq(Program::RuleSet(names.clone()), t.program.clone());
                let expected = Triple::new(t.presumption.clone(), unrolled, Exit::Ok, t.result.clone());
                self.expect_child(child(0), &expected, 0, &reject)?;
                self.node(&n.children[0], &format!("{path}.0"), out)
            }
            ProofRule::SeqSucc => {
                let Program::Seq(p, q) = &t.program else {
                    return Err(reject(format!("program {} is not a sequence", t.program)));
                };
                let (l, r) = (child(0), child(1));
                if l.program != **p || l.exit != Exit::Ok || !same(&l.presumption, &t.presumption) {
                    return Err(reject(format!("left premise must be [{}] {p} [ok: e]", t.presumption)));
                }
                if let Some(Hint::Cond(e)) = n.hints.get("mid") {
                    if !same(e, &l.result) {
                        return Err(reject("left premise result differs from the mid hint".into()));
                    }
                }
                let expected = Triple::new(l.result.clone(), (**q).clone(), t.exit, t.result.clone());
                self.expect_child(r, &expected, 1, &reject)?;
                self.node(&n.children[0], &format!("{path}.0"), out)?;
                self.node(&n.children[1], &format!("{path}.1"), out)
            }
            ProofRule::SeqFail => {
                let Program::Seq(p, _) = &t.program else {
                    return Err(reject(format!("program {} is not a sequence", t.program)));
                };
                if t.exit != Exit::Er {
                    return Err(reject("conclusion must have exit er".into()));
                }
                let expected = Triple::new(t.presumption.clone(), (**p).clone(), Exit::Er, t.result.clone());
                self.expect_child(child(0), &expected, 0, &reject)?;
                self.node(&n.children[0], &format!("{path}.0"), out)
            }
            ProofRule::IfElse => {
                let Program::IfElse(names, p, q) = &t.program else {
                    return Err(reject(format!("program {} is not a conditional", t.program)));
                };
                let rules = self.rules(names).map_err(&reject)?;
                let app = self.tr.app(&rules);
                let then = Triple::new(
                    Cond::and(t.presumption.clone(), app.clone()),
                    (**p).clone(),
                    t.exit,
                    t.result.clone(),
                );
                let other = Triple::new(
                    Cond::and(t.presumption.clone(), Cond::not(app)),
                    (**q).clone(),
                    t.exit,
                    t.result.clone(),
                );
                self.expect_child(child(0), &then, 0, &reject)?;
                self.expect_child(child(1), &other, 1, &reject)?;
                self.node(&n.children[0], &format!("{path}.0"), out)?;
                self.node(&n.children[1], &format!("{path}.1"), out)
            }
            ProofRule::Cons => {
                let ch = child(0);
                if ch.program != t.program || ch.exit != t.exit {
                    return Err(reject("premise must have the same program and exit".into()));
                }
                for (key, cond) in [("presumption", &ch.presumption), ("result", &ch.result)] {
                    if let Some(Hint::Cond(h)) = n.hints.get(key) {
                        if !same(h, cond) {
                            return Err(reject(format!("premise {key} differs from the hint")));
                        }
                    }
                }
                // weaken the presumption, strengthen the result
                out.push(PendingObligation {
                    at: path.to_string(),
                    antecedent: ch.presumption.clone(),
                    consequent: t.presumption.clone(),
                });
                out.push(PendingObligation {
                    at: path.to_string(),
                    antecedent: t.result.clone(),
                    consequent: ch.result.clone(),
                });
                self.node(&n.children[0], &format!("{path}.0"), out)
            }
            ProofRule::IterVar => {
                let Program::Bang(names) = &t.program else {
                    return Err(reject(format!("program {} is not an iteration", t.program)));
                };
                if t.exit != Exit::Ok {
                    return Err(reject("conclusion must have exit ok".into()));
                }
                let rules = self.rules(names).map_err(&reject)?;
                let chain: Vec<Cond> = match n.hints.get("chain") {
                    Some(Hint::Chain(cs)) => cs.clone(),
                    Some(Hint::Cond(c)) => vec![c.clone()],
                    None => {
                        return Err(reject("IterVar needs the chain c0, ..., cn as hint".into()));
                    }
                };
                let Some((first, last)) = chain.first().zip(chain.last()) else {
                    return Err(reject("the chain must not be empty".into()));
                };
                if n.children.len() + 1 != chain.len() {
                    return Err(reject(format!(
                        "a chain of {} conditions needs {} premises, found {}",
                        chain.len(),
                        chain.len() - 1,
                        n.children.len()
                    )));
                }
                if !same(first, &t.presumption) || !same(last, &t.result) {
                    return Err(reject("chain must start at the presumption and end at the result".into()));
                }
                let body = Program::RuleSet(names.clone());
                for (i, w) in chain.windows(2).enumerate() {
                    let expected = Triple::new(w[0].clone(), body.clone(), Exit::Ok, w[1].clone());
                    self.expect_child(child(i), &expected, i, &reject)?;
                }
                out.push(PendingObligation {
                    at: path.to_string(),
                    antecedent: last.clone(),
                    consequent: Cond::not(self.tr.app(&rules)),
                });
                for (i, c) in n.children.iter().enumerate() {
                    self.node(c, &format!("{path}.{i}"), out)?;
                }
                Ok(())
            }
        }
    }

    fn rules(&self, names: &[String]) -> Result<Vec<&RuleSchema>, String> {
        resolve(self.env, names).map_err(|e| e.to_string())
    }

    fn expect_child(
        &self,
        got: &Triple,
        expected: &Triple,
        index: usize,
        reject: &dyn Fn(String) -> Rejection,
    ) -> Result<(), Rejection> {
        let fits = got.program == expected.program
            && got.exit == expected.exit
            && same(&got.presumption, &expected.presumption)
            && same(&got.result, &expected.result);
        if fits {
            Ok(())
        } else {
            Err(reject(format!(
                "premise {index} must be {}, found {got}",
                Triple::new(
                    simplify(&expected.presumption, &SymGraph::new()),
                    expected.program.clone(),
                    expected.exit,
                    simplify(&expected.result, &SymGraph::new()),
                )
            )))
        }
    }
}

/// Splits `pre` as `c ∧ guard` and returns `c` (`true` when `pre` is the
/// guard itself).
fn split_conjunct(pre: &Cond, guard: &Cond) -> Option<Cond> {
    let empty = SymGraph::new();
    let pre = simplify(pre, &empty);
    let guard = simplify(guard, &empty);
    if same(&pre, &guard) {
        return Some(Cond::True);
    }
    let Cond::And(cs) = &pre else { return None };
    // the guard may be the trailing conjunct or a conjunction of several
    let gs = guard.conjuncts();
    if gs.len() < cs.len() && cs[cs.len() - gs.len()..].iter().zip(&gs).all(|(a, b)| same(a, b)) {
        let rest = cs[..cs.len() - gs.len()].to_vec();
        return Some(simplify(&Cond::And(rest), &empty));
    }
    let pos = cs.iter().position(|x| same(x, &guard))?;
    let rest: Vec<Cond> = cs.iter().enumerate().filter(|(i, _)| *i != pos).map(|(_, x)| x.clone()).collect();
    Some(simplify(&Cond::And(rest), &empty))
}
