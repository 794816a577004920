//! Loading rules, condition libraries, graphs, programs and proofs from
//! files or inline text, following `use "file";` lines.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::econd::Cond;
use crate::graph::HostGraph;
use crate::program::Program;
use crate::proof::Triple;
use crate::rules::{RuleEnv, RuleSchema};
use crate::syntax::{self, CondNames, ParseError, ProofScript};

/// Rules available without loading any file: `init` and `colour`, plus the
/// small rules `delete`, `edge_add`, `loop_add`, `create` and `null`.
pub const BUILTIN_RULES: &str = concat!(include_str!("../data/colouring.grs"), "\n", include_str!("../data/extra.grs"));

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{file}: rule {name} conflicts with an earlier definition")]
    DuplicateRule { name: String, file: String },
    #[error("{0}: expected a .grs or .cond file")]
    NotALibrary(String),
    #[error("{0}: cyclic use")]
    Cycle(String),
    #[error("unknown rule {0}")]
    UnknownRule(String),
}

#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub rules: RuleEnv,
    pub names: CondNames,
    loaded: BTreeSet<PathBuf>,
    loading: Vec<PathBuf>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_builtins() -> Self {
        let mut ws = Self::new();
        ws.add_rules_src(BUILTIN_RULES, "<builtin>").expect("builtin rules parse");
        ws
    }

    /// Adds rules from source text. Redefining a rule identically is allowed.
    pub fn add_rules_src(&mut self, src: &str, file: &str) -> Result<Vec<String>, LoadError> {
        let rules = syntax::parse_rules(src).map_err(|e| e.in_file(file))?;
        let names = rules.iter().map(|r| r.name.clone()).collect();
        for r in rules {
            self.add_rule(r, file)?;
        }
        Ok(names)
    }

    fn add_rule(&mut self, r: RuleSchema, file: &str) -> Result<(), LoadError> {
        if let Some(old) = self.rules.get(&r.name) {
            if old.to_string() != r.to_string() {
                return Err(LoadError::DuplicateRule {
                    name: r.name.clone(),
                    file: file.to_string(),
                });
            }
            return Ok(());
        }
        self.rules.insert(r);
        Ok(())
    }

    /// Loads a `.grs` rule file or a `.cond` definitions file. Files already
    /// loaded are skipped.
    pub fn load_file(&mut self, path: &Path) -> Result<(), LoadError> {
        let key = fs::canonicalize(path).map_err(|source| io_err(path, source))?;
        if self.loaded.contains(&key) {
            return Ok(());
        }
        if self.loading.contains(&key) {
            return Err(LoadError::Cycle(path.display().to_string()));
        }
        let label = path.display().to_string();
        let src = read(path)?;
        self.loading.push(key.clone());
        let res = match path.extension().and_then(|e| e.to_str()) {
            Some("grs") => self.add_rules_src(&src, &label).map(|_| ()),
            Some("cond") => self.load_uses(&src, base_dir(path), &label).and_then(|_| {
                let defs = syntax::parse_definitions(&src, &self.rules, &self.names).map_err(|e| e.in_file(&label))?;
                self.names.extend(defs);
                Ok(())
            }),
            _ => Err(LoadError::NotALibrary(label)),
        };
        self.loading.pop();
        res?;
        self.loaded.insert(key);
        Ok(())
    }

    /// Loads the files named by the leading `use` lines of `src`, resolved
    /// against `base`.
    pub fn load_uses(&mut self, src: &str, base: &Path, file: &str) -> Result<(), LoadError> {
        let uses = syntax::script_uses(src).map_err(|e| e.in_file(file))?;
        for (target, line, col) in uses {
            let path = base.join(&target);
            if !path.is_file() {
                return Err(ParseError {
                    file: Some(file.to_string()),
                    line,
                    col,
                    message: format!("cannot find used file {target}"),
                }
                .into());
            }
            self.load_file(&path)?;
        }
        Ok(())
    }

    /// A condition given as a file name or as inline text.
    pub fn condition(&mut self, arg: &str) -> Result<Cond, LoadError> {
        let (src, base, label) = self.source(arg)?;
        self.load_uses(&src, &base, &label)?;
        Ok(syntax::parse_condition(&src, &self.rules, &self.names).map_err(|e| e.in_file(&label))?)
    }

    pub fn triple(&mut self, arg: &str) -> Result<Triple, LoadError> {
        let (src, base, label) = self.source(arg)?;
        self.load_uses(&src, &base, &label)?;
        Ok(syntax::parse_triple(&src, &self.rules, &self.names).map_err(|e| e.in_file(&label))?)
    }

    pub fn program(&mut self, arg: &str) -> Result<Program, LoadError> {
        let (src, _, label) = self.source(arg)?;
        let p = syntax::parse_program(&src).map_err(|e| e.in_file(&label))?;
        for name in p.rule_names() {
            if !self.rules.contains(&name) {
                return Err(LoadError::UnknownRule(name));
            }
        }
        Ok(p)
    }

    pub fn graph(&mut self, arg: &str) -> Result<HostGraph, LoadError> {
        let (src, _, label) = self.source(arg)?;
        Ok(syntax::parse_graph(&src).map_err(|e| e.in_file(&label))?)
    }

    pub fn proof(&mut self, path: &Path) -> Result<ProofScript, LoadError> {
        let label = path.display().to_string();
        let src = read(path)?;
        self.load_uses(&src, base_dir(path), &label)?;
        Ok(syntax::parse_proof(&src, &self.rules, &self.names).map_err(|e| e.in_file(&label))?)
    }

    /// Rules selected by name, in the given order.
    pub fn select(&self, names: &[String]) -> Result<Vec<&RuleSchema>, LoadError> {
        names
            .iter()
            .map(|n| self.rules.get(n).ok_or_else(|| LoadError::UnknownRule(n.clone())))
            .collect()
    }

    fn source(&self, arg: &str) -> Result<(String, PathBuf, String), LoadError> {
        let path = Path::new(arg);
        if path.is_file() {
            Ok((read(path)?, base_dir(path).to_path_buf(), arg.to_string()))
        } else {
            Ok((arg.to_string(), PathBuf::from("."), "<arg>".to_string()))
        }
    }
}

fn base_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| io_err(path, source))
}

fn io_err(path: &Path, source: io::Error) -> LoadError {
    LoadError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
    }

    #[test]
    fn builtins() {
        let ws = Workspace::with_builtins();
        let names: Vec<_> = ws.rules.names().collect();
        assert_eq!(names.len(), 7);
        assert!(ws.rules.contains("colour"));
    }

    #[test]
    fn data_files_load() {
        let mut ws = Workspace::new();
        ws.load_file(&data("colourings.cond")).unwrap();
        for n in ["c", "d", "e", "f", "illegal"] {
            assert!(ws.names.contains_key(n), "{n}");
        }
        assert!(ws.rules.contains("init"));
        for g in ["triangle.graph", "single.graph", "path.graph", "empty.graph"] {
            ws.graph(data(g).to_str().unwrap()).unwrap();
        }
        for p in ["finite_failure.proof", "illegal_structure.proof", "illegal_colouring.proof"] {
            let mut ws = Workspace::new();
            ws.proof(&data(p)).unwrap();
        }
        ws.condition(data("refuted.cond").to_str().unwrap()).unwrap();
    }

    #[test]
    fn duplicate_rules() {
        let mut ws = Workspace::with_builtins();
        ws.add_rules_src("rule init(x) { lhs { node 0 x; } rhs { node 0 x:0; } }", "a").unwrap();
        let err = ws.add_rules_src("rule init(x) { lhs { node 0 x; } rhs { node 0 x:1; } }", "b").unwrap_err();
        assert!(matches!(err, LoadError::DuplicateRule { .. }));
    }

    #[test]
    fn missing_use_is_positioned() {
        let mut ws = Workspace::new();
        let err = ws.condition("use \"nope.grs\"; true").unwrap_err();
        assert_eq!(err.to_string(), "<arg>:1:1: cannot find used file nope.grs");
    }
}
