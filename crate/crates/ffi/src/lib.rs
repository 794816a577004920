//! C ABI over the grail library.
//!
//! Objects cross the boundary as opaque handles created by `grail_*_new` or
//! `grail_*_parse` style functions and released by the matching `_free`.
//! Every fallible call returns a [`GrailStatus`]; on failure the message is
//! available from [`grail_last_error`] on the same thread until the next call.
//! Strings returned through out-parameters are owned by the caller and must be
//! released with [`grail_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use grail::econd::{render, satisfies, SatConfig};
use grail::graph::{HostGraph, SymGraph};
use grail::program::{outcomes, Budget, OutcomeSet};
use grail::proof::{check_proof, DischargeConfig, Verdict};
use grail::transform::Transformer;
use grail::workspace::Workspace;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrailStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Parse or load failure; the message carries `file:line:col`.
    Load = 3,
    /// The input was well-formed but could not be evaluated.
    Eval = 4,
    IndexOutOfRange = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

/// Exit of a program outcome.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrailExit {
    Ok = 0,
    Er = 1,
}

/// Proof checking verdict.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrailVerdict {
    Valid = 0,
    ValidUpToBound = 1,
    Rejected = 2,
}

/// Rule definitions and named conditions.
pub struct GrailWorkspace(Workspace);

/// A host graph.
pub struct GrailGraph(HostGraph);

/// The ok and er result sets of a program run.
pub struct GrailOutcomes(OutcomeSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GrailStatus, String);

impl Failure {
    fn load(e: impl std::fmt::Display) -> Self {
        Failure(GrailStatus::Load, e.to_string())
    }

    fn eval(e: impl std::fmt::Display) -> Self {
        Failure(GrailStatus::Eval, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GrailStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GrailStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal error: {msg}"));
            GrailStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(GrailStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GrailStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(GrailStatus::NullArgument, format!("{name} is null")))
}

unsafe fn mut_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(GrailStatus::NullArgument, format!("{name} is null")))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(GrailStatus::NullArgument, "output pointer is null".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(Failure::eval)?;
    put(out, c.into_raw())
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next grail call on the same thread.
#[no_mangle]
pub extern "C" fn grail_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn grail_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a workspace, optionally preloaded with the built-in rules
/// (`init`, `colour`, `delete`, ...).
#[no_mangle]
pub extern "C" fn grail_workspace_new(with_builtins: bool) -> *mut GrailWorkspace {
    let ws = if with_builtins { Workspace::with_builtins() } else { Workspace::new() };
    Box::into_raw(Box::new(GrailWorkspace(ws)))
}

/// # Safety
/// `ws` must be null or a handle from [`grail_workspace_new`].
#[no_mangle]
pub unsafe extern "C" fn grail_workspace_free(ws: *mut GrailWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

/// Loads a `.grs` rule file or a `.cond` definitions file.
///
/// # Safety
/// `ws` must be a live workspace handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn grail_workspace_load_file(ws: *mut GrailWorkspace, path: *const c_char) -> GrailStatus {
    guard(|| {
        let ws = mut_arg(ws, "ws")?;
        let path = str_arg(path, "path")?;
        ws.0.load_file(Path::new(path)).map_err(Failure::load)
    })
}

/// Adds rule declarations given as source text.
///
/// # Safety
/// `ws` must be a live workspace handle and `src` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn grail_workspace_add_rules(ws: *mut GrailWorkspace, src: *const c_char) -> GrailStatus {
    guard(|| {
        let ws = mut_arg(ws, "ws")?;
        let src = str_arg(src, "src")?;
        ws.0.add_rules_src(src, "<ffi>").map(drop).map_err(Failure::load)
    })
}

/// Parses a graph from text or from a file path.
///
/// # Safety
/// `ws` must be a live workspace handle, `src` a nul-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grail_graph_parse(
    ws: *mut GrailWorkspace,
    src: *const c_char,
    out: *mut *mut GrailGraph,
) -> GrailStatus {
    guard(|| {
        let ws = mut_arg(ws, "ws")?;
        let g = ws.0.graph(str_arg(src, "src")?).map_err(Failure::load)?;
        put(out, Box::into_raw(Box::new(GrailGraph(g))))
    })
}

/// # Safety
/// `g` must be null or a graph handle from this library.
#[no_mangle]
pub unsafe extern "C" fn grail_graph_free(g: *mut GrailGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn grail_graph_node_count(g: *const GrailGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.node_count())
}

/// Number of edges, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn grail_graph_edge_count(g: *const GrailGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Renders a graph in the textual graph syntax.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grail_graph_to_string(g: *const GrailGraph, out: *mut *mut c_char) -> GrailStatus {
    guard(|| put_string(out, ref_arg(g, "g")?.0.to_string()))
}

/// Decides whether a graph satisfies a closed condition.
///
/// # Safety
/// Handles must be live, `cond` nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grail_satisfies(
    ws: *mut GrailWorkspace,
    g: *const GrailGraph,
    cond: *const c_char,
    out: *mut bool,
) -> GrailStatus {
    guard(|| {
        let ws = mut_arg(ws, "ws")?;
        let g = ref_arg(g, "g")?;
        let c = ws.0.condition(str_arg(cond, "cond")?).map_err(Failure::load)?;
        let cfg = SatConfig {
            warn_unanchored: false,
            ..SatConfig::default()
        };
        let res = satisfies(&g.0, &c, &cfg).map_err(Failure::eval)?;
        put(out, res.holds)
    })
}

/// Weakest liberal postcondition of a condition over a rule set given as
/// comma-separated rule names.
///
/// # Safety
/// `ws` must be live, the strings nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grail_wpost(
    ws: *mut GrailWorkspace,
    rules: *const c_char,
    cond: *const c_char,
    out: *mut *mut c_char,
) -> GrailStatus {
    guard(|| {
        let ws = mut_arg(ws, "ws")?;
        let names: Vec<String> = str_arg(rules, "rules")?
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        let c = ws.0.condition(str_arg(cond, "cond")?).map_err(Failure::load)?;
        let selected = ws.0.select(&names).map_err(Failure::load)?;
        let w = Transformer::default().wpost(&selected, &c).map_err(Failure::eval)?;
        put_string(out, render(&w, &SymGraph::new()))
    })
}

/// Computes every result of running a program on a graph. `max_steps` of 0
/// keeps the default budget.
///
/// # Safety
/// Handles must be live, `program` nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grail_outcomes(
    ws: *mut GrailWorkspace,
    program: *const c_char,
    g: *const GrailGraph,
    max_steps: usize,
    out: *mut *mut GrailOutcomes,
) -> GrailStatus {
    guard(|| {
        let ws = mut_arg(ws, "ws")?;
        let g = ref_arg(g, "g")?;
        let p = ws.0.program(str_arg(program, "program")?).map_err(Failure::load)?;
        let mut budget = Budget::default();
        if max_steps > 0 {
            budget.max_steps = max_steps;
        }
        let o = outcomes(&p, &g.0, &ws.0.rules, budget).map_err(Failure::eval)?;
        put(out, Box::into_raw(Box::new(GrailOutcomes(o))))
    })
}

/// # Safety
/// `o` must be null or a handle from [`grail_outcomes`].
#[no_mangle]
pub unsafe extern "C" fn grail_outcomes_free(o: *mut GrailOutcomes) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Number of results with the given exit, or 0 for a null handle.
///
/// # Safety
/// `o` must be null or a live outcomes handle.
#[no_mangle]
pub unsafe extern "C" fn grail_outcomes_len(o: *const GrailOutcomes, exit: GrailExit) -> usize {
    o.as_ref().map_or(0, |o| match exit {
        GrailExit::Ok => o.0.ok_len(),
        GrailExit::Er => o.0.er_len(),
    })
}

/// Whether exploration hit the step or size budget.
///
/// # Safety
/// `o` must be null or a live outcomes handle.
#[no_mangle]
pub unsafe extern "C" fn grail_outcomes_truncated(o: *const GrailOutcomes) -> bool {
    o.as_ref().is_some_and(|o| o.0.truncated)
}

/// Copies out the `index`-th result graph with the given exit.
///
/// # Safety
/// `o` must be a live outcomes handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grail_outcomes_get(
    o: *const GrailOutcomes,
    exit: GrailExit,
    index: usize,
    out: *mut *mut GrailGraph,
) -> GrailStatus {
    guard(|| {
        let o = ref_arg(o, "o")?;
        let g = match exit {
            GrailExit::Ok => o.0.ok().nth(index),
            GrailExit::Er => o.0.er().nth(index),
        };
        let g = g.ok_or_else(|| Failure(GrailStatus::IndexOutOfRange, format!("no result at index {index}")))?;
        put(out, Box::into_raw(Box::new(GrailGraph(g.clone()))))
    })
}

/// Checks a proof script file. `max_nodes` bounds the graphs used for
/// non-syntactic side conditions; 0 keeps the default.
///
/// # Safety
/// `ws` must be live, `path` nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grail_check_proof(
    ws: *mut GrailWorkspace,
    path: *const c_char,
    max_nodes: usize,
    out: *mut GrailVerdict,
) -> GrailStatus {
    guard(|| {
        let ws = mut_arg(ws, "ws")?;
        let script = ws.0.proof(Path::new(str_arg(path, "path")?)).map_err(Failure::load)?;
        let mut cfg = DischargeConfig::default();
        if max_nodes > 0 {
            cfg.universe = cfg.universe.with_max_nodes(max_nodes);
        }
        let v = check_proof(&script.root, &ws.0.rules, &cfg);
        let code = match &v {
            Verdict::Valid { .. } => GrailVerdict::Valid,
            Verdict::ValidUpToBound { .. } => GrailVerdict::ValidUpToBound,
            Verdict::Rejected { .. } => {
                set_error(v.to_string());
                GrailVerdict::Rejected
            }
        };
        put(out, code)
    })
}
