//! Command-line front end. `main.rs` only forwards to [`run`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::econd::{render, satisfies, Cond, SatConfig};
use crate::expr::HostLabel;
use crate::graph::{HostGraph, SymGraph};
use crate::oracle::{self, preimage_universe, DiffReport, Universe, ValidityVerdict};
use crate::program::{outcomes, run_random, Budget, RunExit};
use crate::proof::{check_proof, DischargeConfig, Triple, Verdict};
use crate::rules::RuleSchema;
use crate::transform::{Mutation, Transformer};
use crate::workspace::{LoadError, Workspace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BOUNDED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "grail", version, about = "Graph programs, E-conditions and incorrectness proofs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One seeded execution of --program on --graph, with its trace.
    Run,
    /// All ok and er outcomes of --program on --graph, up to isomorphism.
    Outcomes,
    /// Whether --graph satisfies --cond.
    Satisfies,
    /// App of the selected rules.
    App,
    /// WPost of the selected rules and --cond.
    Wpost,
    /// Checks the proof script given by --proof.
    Check,
    /// Searches the universe for a counterexample to --triple (or to the
    /// conclusion of --proof).
    Validate {
        /// Write the counterexample graph to this file.
        #[arg(long, value_name = "FILE")]
        witness: Option<PathBuf>,
        /// Write a JSON summary to this file.
        #[arg(long, value_name = "FILE")]
        summary: Option<PathBuf>,
    },
    /// Differential tests of the transformations against direct semantics.
    Difftest {
        #[arg(long, value_enum, default_value = "all")]
        kind: Kind,
        /// Random instances for the shift and right suites.
        #[arg(long, default_value_t = 200)]
        instances: usize,
        /// Write a JSON summary to this file.
        #[arg(long, value_name = "FILE")]
        summary: Option<PathBuf>,
        #[arg(long, value_enum, hide = true)]
        mutation: Option<MutationArg>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    App,
    Wpost,
    Shift,
    Right,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MutationArg {
    DangDropConjunct,
    ShiftNoOverlap,
    ShiftNoIntSubst,
    RightIgnoreDangling,
    WpostSkipInverseDang,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::DangDropConjunct => Mutation::DangDropConjunct,
            MutationArg::ShiftNoOverlap => Mutation::ShiftNoOverlap,
            MutationArg::ShiftNoIntSubst => Mutation::ShiftNoIntSubst,
            MutationArg::RightIgnoreDangling => Mutation::RightIgnoreDangling,
            MutationArg::WpostSkipInverseDang => Mutation::WPostSkipInverseDang,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, clap::Args)]
pub struct Options {
    /// A .grs rule file, a .cond definitions file, or comma-separated rule
    /// names selecting the rule set. Without any file, the builtin rules
    /// (init, colour, delete, edge_add, loop_add, create, null) are used.
    #[arg(long, global = true, value_name = "FILE|NAMES")]
    pub rules: Vec<String>,
    #[arg(long, global = true, value_name = "FILE|EXPR")]
    pub program: Option<String>,
    #[arg(long, global = true, value_name = "FILE|EXPR")]
    pub graph: Option<String>,
    /// Repeatable for `difftest`.
    #[arg(long, global = true, value_name = "FILE|EXPR")]
    pub cond: Vec<String>,
    #[arg(long, global = true, value_name = "FILE")]
    pub proof: Option<PathBuf>,
    /// A triple `[c] P [ok: d]`.
    #[arg(long, global = true, value_name = "FILE|EXPR")]
    pub triple: Option<String>,
    #[arg(long, global = true, default_value_t = 3)]
    pub max_nodes: usize,
    /// Comma-separated label pool, e.g. `0,1,0:0,0:1`.
    #[arg(long, global = true, value_name = "LIST")]
    pub labels: Option<String>,
    #[arg(long, global = true, default_value_t = 1)]
    pub max_parallel: usize,
    #[arg(long, global = true, default_value_t = Budget::default().max_steps)]
    pub max_steps: usize,
    #[arg(long, global = true, default_value_t = SatConfig::default().int_window)]
    pub int_window: i64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Print one top-level disjunct per numbered line.
    #[arg(long, global = true)]
    pub number_disjuncts: bool,
}

/// Result of one command: exit status plus text for stdout and stderr.
#[derive(Debug, Default)]
pub struct Output {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Usage(String),
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    status,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    status,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    if let Some(n) = cli.opts.jobs {
        // fails only if the global pool was already built; keep that one
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(&cli) {
        Ok(out) => out,
        Err(e) => Output {
            status: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

struct Env {
    ws: Workspace,
    selected: Vec<String>,
}

impl Env {
    fn load(opts: &Options, builtins: bool) -> Result<Env, CliError> {
        let mut ws = Workspace::new();
        let mut selected = Vec::new();
        let mut any_rule_file = false;
        for arg in &opts.rules {
            let path = Path::new(arg);
            if path.is_file() {
                any_rule_file |= path.extension().is_some_and(|e| e == "grs");
                ws.load_file(path)?;
            } else {
                selected.extend(arg.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from));
            }
        }
        if builtins && !any_rule_file {
            ws.add_rules_src(crate::workspace::BUILTIN_RULES, "<builtin>")?;
        }
        ws.select(&selected)?;
        Ok(Env { ws, selected })
    }

    /// Selected rules, or every loaded rule when none was named.
    fn rules(&self) -> Vec<&RuleSchema> {
        if self.selected.is_empty() {
            self.ws.rules.iter().collect()
        } else {
            self.ws.select(&self.selected).expect("checked on load")
        }
    }
}

fn universe(opts: &Options) -> Result<Universe, CliError> {
    let pool = match &opts.labels {
        None => oracle::default_pool(),
        Some(list) => list
            .split(',')
            .map(|item| parse_label(item.trim()))
            .collect::<Result<Vec<_>, _>>()?,
    };
    if pool.is_empty() {
        return Err(CliError::Usage("--labels must name at least one label".into()));
    }
    Ok(Universe::new(opts.max_nodes, pool, opts.max_parallel))
}

fn parse_label(s: &str) -> Result<HostLabel, CliError> {
    s.split(':')
        .map(|v| v.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map(HostLabel)
        .map_err(|_| CliError::Usage(format!("bad label '{s}' in --labels")))
}

fn sat_config(opts: &Options) -> SatConfig {
    SatConfig {
        int_window: opts.int_window,
        ..SatConfig::default()
    }
}

fn budget(opts: &Options) -> Budget {
    Budget {
        max_steps: opts.max_steps,
        ..Budget::default()
    }
}

fn required<'a, T: ?Sized>(v: Option<&'a T>, flag: &str) -> Result<&'a T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{flag} is required for this command")))
}

fn first_cond(opts: &Options) -> Result<&str, CliError> {
    match opts.cond.as_slice() {
        [c] => Ok(c),
        [] => Err(CliError::Usage("--cond is required for this command".into())),
        _ => Err(CliError::Usage("--cond may be given only once for this command".into())),
    }
}

fn render_cond(c: &Cond, number: bool) -> String {
    let empty = SymGraph::new();
    if !number {
        return render(c, &empty);
    }
    let mut out = String::new();
    for (i, d) in c.disjuncts().iter().enumerate() {
        let _ = writeln!(out, "{:>3}: {}", i + 1, render(d, &empty));
    }
    out.trim_end().to_string()
}

fn text(status: i32, stdout: String) -> Output {
    Output {
        status,
        stdout,
        stderr: String::new(),
    }
}

fn machine(status: i32, v: serde_json::Value) -> Output {
    text(status, format!("{}\n", serde_json::to_string_pretty(&v).expect("json")))
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    let opts = &cli.opts;
    let machine_fmt = opts.format == Format::Machine;
    match &cli.command {
        Command::Run => {
            let mut env = Env::load(opts, true)?;
            let p = env.ws.program(required(opts.program.as_deref(), "--program")?)?;
            let g = env.ws.graph(required(opts.graph.as_deref(), "--graph")?)?;
            let r = run_random(&p, &g, &env.ws.rules, opts.seed, opts.max_steps).map_err(|e| CliError::Usage(e.to_string()))?;
            let status = match r.exit {
                RunExit::Ok => EXIT_OK,
                RunExit::Er => EXIT_REFUTED,
                RunExit::Diverged => EXIT_BOUNDED,
            };
            if machine_fmt {
                return Ok(machine(
                    status,
                    json!({"exit": r.exit, "trace": r.trace, "graph": r.graph.to_string()}),
                ));
            }
            let mut out = String::new();
            for (i, s) in r.trace.iter().enumerate() {
                let _ = writeln!(out, "step {}: {} {}", i + 1, s.rule, s.at);
            }
            let _ = writeln!(out, "exit: {}", r.exit);
            let _ = writeln!(out, "{}", r.graph);
            Ok(text(status, out))
        }
        Command::Outcomes => {
            let mut env = Env::load(opts, true)?;
            let p = env.ws.program(required(opts.program.as_deref(), "--program")?)?;
            let g = env.ws.graph(required(opts.graph.as_deref(), "--graph")?)?;
            let o = outcomes(&p, &g, &env.ws.rules, budget(opts)).map_err(|e| CliError::Usage(e.to_string()))?;
            let status = if o.truncated { EXIT_BOUNDED } else { EXIT_OK };
            let ok: Vec<String> = o.ok().map(HostGraph::to_string).collect();
            let er: Vec<String> = o.er().map(HostGraph::to_string).collect();
            if machine_fmt {
                return Ok(machine(
                    status,
                    json!({"ok": ok, "er": er, "truncated": o.truncated, "stats": o.stats}),
                ));
            }
            let mut out = String::new();
            for (name, set) in [("ok", &ok), ("er", &er)] {
                let _ = writeln!(out, "{name} ({}):", set.len());
                for g in set {
                    let _ = writeln!(out, "  {g}");
                }
            }
            let _ = writeln!(out, "truncated: {}", o.truncated);
            Ok(text(status, out))
        }
        Command::Satisfies => {
            let mut env = Env::load(opts, true)?;
            let g = env.ws.graph(required(opts.graph.as_deref(), "--graph")?)?;
            let c = env.ws.condition(first_cond(opts)?)?;
            let res = satisfies(&g, &c, &sat_config(opts)).map_err(|e| CliError::Usage(e.to_string()))?;
            let status = if res.holds { EXIT_OK } else { EXIT_REFUTED };
            let stderr: String = res.warnings.iter().map(|w| format!("warning: {w}\n")).collect();
            let mut out = if machine_fmt {
                machine(status, json!({"holds": res.holds, "warnings": res.warnings}))
            } else {
                text(status, format!("{}\n", res.holds))
            };
            out.stderr = stderr;
            Ok(out)
        }
        Command::App => {
            let env = Env::load(opts, true)?;
            let c = Transformer::default().app(&env.rules());
            Ok(cond_output(&c, opts))
        }
        Command::Wpost => {
            let mut env = Env::load(opts, true)?;
            let c = env.ws.condition(first_cond(opts)?)?;
            let w = Transformer::default()
                .wpost(&env.rules(), &c)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(cond_output(&w, opts))
        }
        Command::Check => {
            let mut env = Env::load(opts, false)?;
            let script = env.ws.proof(required(opts.proof.as_deref(), "--proof")?)?;
            let cfg = DischargeConfig {
                universe: universe(opts)?,
                sat: SatConfig {
                    warn_unanchored: false,
                    ..sat_config(opts)
                },
            };
            let v = check_proof(&script.root, &env.ws.rules, &cfg);
            let status = match v {
                Verdict::Valid { .. } => EXIT_OK,
                Verdict::ValidUpToBound { .. } => EXIT_BOUNDED,
                Verdict::Rejected { .. } => EXIT_REFUTED,
            };
            if machine_fmt {
                return Ok(machine(status, serde_json::to_value(&v).expect("json")));
            }
            let mut out = format!("{v}\n");
            if let Verdict::Valid { obligations } | Verdict::ValidUpToBound { obligations, .. } = &v {
                for o in obligations {
                    let _ = writeln!(out, "  {}: {} => {} [{}]", o.at, o.antecedent, o.consequent, o.outcome);
                }
            }
            Ok(text(status, out))
        }
        Command::Validate { witness, summary } => {
            let (mut env, t) = match (&opts.triple, &opts.proof) {
                (Some(t), None) => {
                    let mut env = Env::load(opts, true)?;
                    let t = env.ws.triple(t)?;
                    (env, t)
                }
                (None, Some(p)) => {
                    let mut env = Env::load(opts, false)?;
                    let t = env.ws.proof(p)?.root.conclusion;
                    (env, t)
                }
                _ => return Err(CliError::Usage("validate needs exactly one of --triple and --proof".into())),
            };
            validate(&mut env, &t, opts, witness.as_deref(), summary.as_deref())
        }
        Command::Difftest {
            kind,
            instances,
            summary,
            mutation,
        } => {
            let mut env = Env::load(opts, true)?;
            let tr = match mutation {
                Some(m) => Transformer::mutated((*m).into()),
                None => Transformer::default(),
            };
            let conds = opts
                .cond
                .iter()
                .map(|c| env.ws.condition(c))
                .collect::<Result<Vec<_>, _>>()?;
            difftest(&env, &tr, *kind, *instances, conds, opts, summary.as_deref())
        }
    }
}

fn cond_output(c: &Cond, opts: &Options) -> Output {
    let rendered = render_cond(c, opts.number_disjuncts);
    if opts.format == Format::Machine {
        return machine(EXIT_OK, json!({"condition": render(c, &SymGraph::new())}));
    }
    text(EXIT_OK, format!("{rendered}\n"))
}

fn validate(env: &mut Env, t: &Triple, opts: &Options, witness: Option<&Path>, summary: Option<&Path>) -> Result<Output, CliError> {
    let u_post = universe(opts)?;
    let names: Vec<String> = t.program.rule_names().into_iter().collect();
    let rules = env.ws.select(&names)?;
    let u_pre = preimage_universe(&u_post, &rules);
    let report = oracle::validate_triple_bounded(t, &env.ws.rules, &u_post, &u_pre, budget(opts), &sat_config(opts))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let status = match (&report.verdict, report.exact) {
        (ValidityVerdict::Counterexample { .. }, _) => EXIT_REFUTED,
        (ValidityVerdict::NoCounterexample, true) => EXIT_OK,
        (ValidityVerdict::NoCounterexample, false) => EXIT_BOUNDED,
    };
    if let (Some(path), ValidityVerdict::Counterexample { witness: h, .. }) = (witness, &report.verdict) {
        write_file(path, &format!("{h}\n"))?;
    }
    let doc = json!({"triple": t.to_string(), "post_universe": u_post, "pre_universe": u_pre, "report": report});
    if let Some(path) = summary {
        write_file(path, &format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")))?;
    }
    if opts.format == Format::Machine {
        return Ok(machine(status, doc));
    }
    let mut out = String::new();
    let _ = writeln!(out, "triple: {t}");
    let _ = writeln!(out, "post-states: {u_post}");
    let _ = writeln!(out, "pre-states: {u_pre}");
    let _ = writeln!(
        out,
        "checked {} result graphs against {} presumption graphs{}",
        report.results_checked,
        report.preimages,
        if report.exact { "" } else { " (some runs truncated)" }
    );
    match &report.verdict {
        ValidityVerdict::NoCounterexample => out.push_str("no counterexample\n"),
        ValidityVerdict::Counterexample { witness, .. } => {
            let _ = writeln!(out, "counterexample: {witness}");
        }
    }
    Ok(text(status, out))
}

fn difftest(
    env: &Env,
    tr: &Transformer,
    kind: Kind,
    instances: usize,
    mut conds: Vec<Cond>,
    opts: &Options,
    summary: Option<&Path>,
) -> Result<Output, CliError> {
    let u = universe(opts)?;
    let sat = SatConfig {
        warn_unanchored: false,
        ..sat_config(opts)
    };
    let rules = env.rules();
    let owned: Vec<RuleSchema> = rules.iter().map(|r| (*r).clone()).collect();
    let want = |k: Kind| kind == k || kind == Kind::All;
    let mut reports: Vec<DiffReport> = Vec::new();
    if want(Kind::App) {
        reports.push(oracle::difftest_app(tr, &rules, &u, &sat));
    }
    if want(Kind::Wpost) {
        if conds.is_empty() {
            conds.push(Cond::True);
            conds.extend(rules.iter().map(|r| tr.app(&[*r])));
        }
        reports.push(oracle::difftest_wpost(tr, &rules, &conds, &u, &sat));
    }
    if want(Kind::Shift) || want(Kind::Right) {
        let pool = oracle::enumerate_graphs(&u);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        if want(Kind::Shift) {
            let inst = oracle::random_shift_instances(&mut rng, &owned, &pool, instances);
            reports.push(oracle::difftest_shift(tr, &inst, &sat));
        }
        if want(Kind::Right) {
            let inst = oracle::random_right_instances(&mut rng, &owned, &pool, instances);
            reports.push(oracle::difftest_right(tr, &inst, &sat));
        }
    }
    let status = if reports.iter().all(DiffReport::passed) { EXIT_OK } else { EXIT_REFUTED };
    let doc = json!({"universe": u, "reports": reports});
    if let Some(path) = summary {
        write_file(path, &format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")))?;
    }
    if opts.format == Format::Machine {
        return Ok(machine(status, doc));
    }
    let mut out = format!("universe: {u}\n");
    for r in &reports {
        let _ = writeln!(out, "{}: {} checks, {} violations", r.kind, r.checked, r.violations.len());
        for v in &r.violations {
            let _ = writeln!(out, "  {} on {}", v.description, v.witness);
        }
    }
    Ok(text(status, out))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| {
        LoadError::Io {
            path: path.display().to_string(),
            source,
        }
        .into()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grail(args: &[&str]) -> Output {
        run(std::iter::once("grail").chain(args.iter().copied()))
    }

    #[test]
    fn wpost_init_true() {
        let out = grail(&["wpost", "--rules", "init", "--cond", "true"]);
        assert_eq!(out.status, 0, "{}", out.stderr);
        assert_eq!(out.stdout, "ex int x. ex { node 0 x:0; }\n");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(grail(&["wpost", "--rules", "init"]).status, EXIT_USAGE);
        assert_eq!(grail(&["frobnicate"]).status, EXIT_USAGE);
        assert_eq!(grail(&["app", "--rules", "nosuch"]).status, EXIT_USAGE);
        let bad = grail(&["satisfies", "--graph", "graph { node 0 1 }", "--cond", "true"]);
        assert_eq!(bad.status, EXIT_USAGE);
        assert!(bad.stderr.contains("<arg>:1:"), "{}", bad.stderr);
    }

    #[test]
    fn labels_flag() {
        assert_eq!(parse_label("0:1").unwrap(), HostLabel(vec![0, 1]));
        assert!(parse_label("a").is_err());
    }
}
