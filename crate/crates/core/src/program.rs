//! Graph programs over rule-set application, iteration, sequencing and
//! conditionals, with an exhaustive outcome-set evaluator and a seeded
//! single-trace sampler.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{CanonKey, HostGraph};
use crate::expr::HostLabel;
use crate::rules::{MatchCandidate, RuleEnv, RuleSchema};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Program {
    /// Apply one rule from the set, nondeterministically.
    RuleSet(Vec<String>),
    /// Apply the set as long as possible.
    Bang(Vec<String>),
    Seq(Box<Program>, Box<Program>),
    IfElse(Vec<String>, Box<Program>, Box<Program>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("unknown rule {0}")]
    UnknownRule(String),
    #[error("budget limits must be positive")]
    EmptyBudget,
}

/// Normalises a rule-set name list: sorted, without duplicates.
pub fn rule_set(names: impl IntoIterator<Item = String>) -> Vec<String> {
    let set: BTreeSet<String> = names.into_iter().collect();
    set.into_iter().collect()
}

impl Program {
    pub fn rules(names: &[&str]) -> Program {
        Program::RuleSet(rule_set(names.iter().map(|s| s.to_string())))
    }

    pub fn bang(names: &[&str]) -> Program {
        Program::Bang(rule_set(names.iter().map(|s| s.to_string())))
    }

    pub fn seq(p: Program, q: Program) -> Program {
        Program::Seq(Box::new(p), Box::new(q))
    }

    /// Every rule name mentioned by the program.
    pub fn rule_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Program::RuleSet(rs) | Program::Bang(rs) => out.extend(rs.iter().cloned()),
            Program::Seq(p, q) => {
                p.collect_names(out);
                q.collect_names(out);
            }
            Program::IfElse(rs, p, q) => {
                out.extend(rs.iter().cloned());
                p.collect_names(out);
                q.collect_names(out);
            }
        }
    }

    pub fn check_names(&self, env: &RuleEnv) -> Result<(), ProgramError> {
        match self.rule_names().into_iter().find(|n| !env.contains(n)) {
            Some(n) => Err(ProgramError::UnknownRule(n)),
            None => Ok(()),
        }
    }
}

pub(crate) fn fmt_rule_set(rs: &[String]) -> String {
    if rs.len() == 1 {
        rs[0].clone()
    } else {
        format!("{{{}}}", rs.join(", "))
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::RuleSet(rs) => f.write_str(&fmt_rule_set(rs)),
            Program::Bang(rs) => write!(f, "{}!", fmt_rule_set(rs)),
            Program::Seq(p, q) => {
                if matches!(**q, Program::Seq(..)) {
                    write!(f, "{p}; ({q})")
                } else {
                    write!(f, "{p}; {q}")
                }
            }
            Program::IfElse(rs, p, q) => {
                let branch = |p: &Program| {
                    if matches!(p, Program::Seq(..)) {
                        format!("({p})")
                    } else {
                        p.to_string()
                    }
                };
                write!(f, "if {} then {} else {}", fmt_rule_set(rs), branch(p), branch(q))
            }
        }
    }
}

/// Limits for exhaustive evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Maximum number of rule applications explored.
    pub max_steps: usize,
    /// States larger than this are cut off (and the result marked truncated).
    pub max_nodes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_steps: 100_000,
            max_nodes: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub steps: usize,
    pub states: usize,
}

type Key = CanonKey<HostLabel>;

/// Result graphs of a program run from one start graph, one representative
/// per isomorphism class, in canonical order.
#[derive(Debug, Clone, Default)]
pub struct OutcomeSet {
    ok: BTreeMap<Key, HostGraph>,
    er: BTreeMap<Key, HostGraph>,
    pub truncated: bool,
    pub stats: Stats,
}

impl OutcomeSet {
    pub fn ok(&self) -> impl Iterator<Item = &HostGraph> {
        self.ok.values()
    }

    pub fn er(&self) -> impl Iterator<Item = &HostGraph> {
        self.er.values()
    }

    pub fn ok_len(&self) -> usize {
        self.ok.len()
    }

    pub fn er_len(&self) -> usize {
        self.er.len()
    }

    pub fn contains(&self, exit: Exit, g: &HostGraph) -> bool {
        let key = g.canonical_key();
        match exit {
            Exit::Ok => self.ok.contains_key(&key),
            Exit::Er => self.er.contains_key(&key),
        }
    }

    pub fn contains_key(&self, exit: Exit, key: &Key) -> bool {
        match exit {
            Exit::Ok => self.ok.contains_key(key),
            Exit::Er => self.er.contains_key(key),
        }
    }
}

/// Exit condition of a triple or outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Exit {
    Ok,
    Er,
}

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exit::Ok => "ok",
            Exit::Er => "er",
        })
    }
}

/// All derivations `G ⇒_R H` for a rule set, as (rule, match, result).
pub fn derivations<'a>(rules: &[&'a RuleSchema], g: &HostGraph) -> Vec<(&'a RuleSchema, MatchCandidate, HostGraph)> {
    let mut out = Vec::new();
    for r in rules {
        for m in r.find_matches(g) {
            let (h, _) = r.apply(g, &m).expect("found matches are valid");
            out.push((*r, m, h));
        }
    }
    out
}

/// Whether some rule of the set has a match in `g`.
pub fn applicable(rules: &[&RuleSchema], g: &HostGraph) -> bool {
    rules.iter().any(|r| !r.find_matches(g).is_empty())
}

pub fn resolve<'a>(env: &'a RuleEnv, names: &[String]) -> Result<Vec<&'a RuleSchema>, ProgramError> {
    names
        .iter()
        .map(|n| env.get(n).ok_or_else(|| ProgramError::UnknownRule(n.clone())))
        .collect()
}

/// Exhaustive evaluation of the relational semantics from `g`.
pub fn outcomes(p: &Program, g: &HostGraph, env: &RuleEnv, budget: Budget) -> Result<OutcomeSet, ProgramError> {
    if budget.max_steps == 0 || budget.max_nodes == 0 {
        return Err(ProgramError::EmptyBudget);
    }
    p.check_names(env)?;
    let mut ev = Evaluator {
        env,
        budget,
        out_of_steps: false,
        stats: Stats::default(),
        truncated: false,
    };
    let (ok, er) = ev.eval(p, g);
    Ok(OutcomeSet {
        ok,
        er,
        truncated: ev.truncated,
        stats: ev.stats,
    })
}

type States = BTreeMap<Key, HostGraph>;

struct Evaluator<'a> {
    env: &'a RuleEnv,
    budget: Budget,
    out_of_steps: bool,
    truncated: bool,
    stats: Stats,
}

impl Evaluator<'_> {
    fn successors(&mut self, names: &[String], g: &HostGraph) -> Option<States> {
        let rules = resolve(self.env, names).expect("names checked");
        let mut out = States::new();
        let mut any = false;
        for (_, _, h) in derivations(&rules, g) {
            any = true;
            if self.stats.steps >= self.budget.max_steps {
                self.out_of_steps = true;
                self.truncated = true;
                break;
            }
            self.stats.steps += 1;
            if h.node_count() > self.budget.max_nodes {
                self.truncated = true;
                continue;
            }
            out.insert(h.canonical_key(), h);
        }
        any.then_some(out)
    }

    fn eval(&mut self, p: &Program, g: &HostGraph) -> (States, States) {
        self.stats.states += 1;
        if self.out_of_steps {
            return (States::new(), States::new());
        }
        match p {
            Program::RuleSet(rs) => match self.successors(rs, g) {
                Some(ok) => (ok, States::new()),
                None => (States::new(), single(g)),
            },
            Program::Bang(rs) => (self.iterate(rs, g), States::new()),
            Program::Seq(p, q) => {
                let (ok_p, mut er) = self.eval(p, g);
                let mut ok = States::new();
                for h in ok_p.values() {
                    let (ok_q, er_q) = self.eval(q, h);
                    ok.extend(ok_q);
                    er.extend(er_q);
                }
                (ok, er)
            }
            Program::IfElse(rs, p, q) => {
                let rules = resolve(self.env, rs).expect("names checked");
                if applicable(&rules, g) {
                    self.eval(p, g)
                } else {
                    self.eval(q, g)
                }
            }
        }
    }

    /// Worklist over isomorphism classes; visited classes are not expanded
    /// again, so cycles terminate without being reported as truncation.
    fn iterate(&mut self, rs: &[String], g: &HostGraph) -> States {
        let mut visited: BTreeSet<Key> = BTreeSet::new();
        let mut queue: VecDeque<HostGraph> = VecDeque::new();
        let mut ok = States::new();
        visited.insert(g.canonical_key());
        queue.push_back(g.clone());
        while let Some(s) = queue.pop_front() {
            if self.out_of_steps {
                break;
            }
            self.stats.states += 1;
            match self.successors(rs, &s) {
                None => {
                    ok.insert(s.canonical_key(), s);
                }
                Some(next) => {
                    for (k, h) in next {
                        if visited.insert(k) {
                            queue.push_back(h);
                        }
                    }
                }
            }
        }
        ok
    }
}

fn single(g: &HostGraph) -> States {
    let mut s = States::new();
    s.insert(g.canonical_key(), g.clone());
    s
}

/// Exit of a sampled execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunExit {
    Ok,
    Er,
    Diverged,
}

impl fmt::Display for RunExit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunExit::Ok => "ok",
            RunExit::Er => "er",
            RunExit::Diverged => "diverged",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub rule: String,
    pub at: String,
}

#[derive(Debug, Clone)]
pub struct Run {
    pub exit: RunExit,
    pub graph: HostGraph,
    pub trace: Vec<TraceStep>,
}

/// One execution with rule and match chosen uniformly at random from a
/// seeded generator. On failure the returned graph is the last one derived.
pub fn run_random(p: &Program, g: &HostGraph, env: &RuleEnv, seed: u64, max_steps: usize) -> Result<Run, ProgramError> {
    p.check_names(env)?;
    let mut runner = Runner {
        env,
        rng: ChaCha8Rng::seed_from_u64(seed),
        steps_left: max_steps,
        trace: Vec::new(),
    };
    let (exit, graph) = runner.run(p, g.clone());
    Ok(Run {
        exit,
        graph,
        trace: runner.trace,
    })
}

struct Runner<'a> {
    env: &'a RuleEnv,
    rng: ChaCha8Rng,
    steps_left: usize,
    trace: Vec<TraceStep>,
}

impl Runner<'_> {
    /// Applies one randomly chosen derivation; `None` if no rule matches.
    fn step(&mut self, rs: &[String], g: &HostGraph) -> Option<HostGraph> {
        let rules = resolve(self.env, rs).expect("names checked");
        let mut options: Vec<(&RuleSchema, MatchCandidate)> = Vec::new();
        for r in rules {
            for m in r.find_matches(g) {
                options.push((r, m));
            }
        }
        let (r, m) = options.choose(&mut self.rng)?;
        let (h, _) = r.apply(g, m).expect("found matches are valid");
        let at: Vec<String> = m.morphism.nodes.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        self.trace.push(TraceStep {
            rule: r.name.clone(),
            at: format!("{} at {{{}}}", m.interp, at.join(", ")),
        });
        Some(h)
    }

    fn run(&mut self, p: &Program, g: HostGraph) -> (RunExit, HostGraph) {
        match p {
            Program::RuleSet(rs) => {
                if self.steps_left == 0 {
                    return (RunExit::Diverged, g);
                }
                match self.step(rs, &g) {
                    Some(h) => {
                        self.steps_left -= 1;
                        (RunExit::Ok, h)
                    }
                    None => (RunExit::Er, g),
                }
            }
            Program::Bang(rs) => {
                let mut cur = g;
                loop {
                    if self.steps_left == 0 {
                        return (RunExit::Diverged, cur);
                    }
                    match self.step(rs, &cur) {
                        Some(h) => {
                            self.steps_left -= 1;
                            cur = h;
                        }
                        None => return (RunExit::Ok, cur),
                    }
                }
            }
            Program::Seq(p, q) => match self.run(p, g) {
                (RunExit::Ok, h) => self.run(q, h),
                other => other,
            },
            Program::IfElse(rs, p, q) => {
                let rules = resolve(self.env, rs).expect("names checked");
                if applicable(&rules, &g) {
                    self.run(p, g)
                } else {
                    self.run(q, g)
                }
            }
        }
    }
}
