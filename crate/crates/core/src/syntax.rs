//! Concrete syntax: host graphs, rule files, programs, conditions and
//! proof scripts.
//!
//! ```text
//! graph  ::= 'graph' '{' item* '}'
//! item   ::= 'node' INT label? ';' | 'edge' INT ('->' | '--') INT ';'
//! label  ::= expr (':' expr)*
//! rule   ::= 'rule' NAME '(' params ')' '{' 'lhs' '{' item* '}' 'rhs' '{' item* '}' '}'
//! prog   ::= atom (';' atom)*
//! atom   ::= set '!'? | '(' prog ')' | 'if' set 'then' atom 'else' atom
//! set    ::= NAME | '{' NAME (',' NAME)* '}'
//! cond   ::= or ('=>' cond)?
//! or     ::= and ('or' and)*        and ::= unary ('and' unary)*
//! unary  ::= 'not' unary | ('ex' | 'all') 'int' NAME (',' NAME)* '.' cond
//!          | 'ex' '{' item* '}' ('.' cond)? | 'all' '{' item* '}' '.' cond
//!          | 'true' | 'false' | '(' cond ')' | expr CMP expr
//!          | NAME | 'App' '(' sets ')' | 'WPost' '(' set ',' cond ')'
//! triple ::= '[' cond ']' prog '[' ('ok' | 'er') ':' cond ']'
//! proof  ::= '(' 'rule' NAME 'conclusion' ':' triple
//!            ('hint' ':' NAME '=' (cond | '[' cond,* ']'))* ('child' ':' proof)* ')'
//! ```
//!
//! Node ids inside a nested `ex { ... }` that already exist in the context
//! refer to the context node; other ids declare new nodes. Scripts may
//! start with `use "file";` lines and `let NAME = cond;` definitions.
//! Comments run from `//` to the end of the line.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::econd::Cond;
use crate::expr::{var, BinOp, CmpOp, Constraint, IntExpr, Label, Var};
use crate::graph::{Graph, HostGraph, NodeId, NodeLabel, SymGraph};
use crate::program::{resolve, rule_set, Exit, Program};
use crate::proof::{Hint, ProofNode, ProofRule, Triple};
use crate::rules::{RuleEnv, RuleSchema};
use crate::transform::Transformer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub file: Option<String>,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl ParseError {
    pub fn in_file(mut self, file: &str) -> Self {
        self.file = Some(file.to_string());
        self
    }
}

/// Named conditions available to references in a condition.
pub type CondNames = BTreeMap<String, Cond>;

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Sym(s) => write!(f, "'{s}'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 26] = [
    "->", "--", "=>", "!=", "<=", ">=", "{", "}", "(", ")", "[", "]", ",", ";", ":", ".", "!", "=", "<", ">", "+",
    "-", "*", "/", "^", "|",
];

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, message: String| ParseError {
        file: None,
        line,
        col,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l0, c0) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(s),
                line: l0,
                col: c0,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let n = s
                .parse::<i64>()
                .map_err(|_| err(l0, c0, format!("integer {s} is out of range")))?;
            out.push(Token {
                tok: Tok::Int(n),
                line: l0,
                col: c0,
            });
            continue;
        }
        if c == '"' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                j += 1;
            }
            if chars.get(j) != Some(&'"') {
                return Err(err(l0, c0, "unterminated string".into()));
            }
            let s: String = chars[start..j].iter().collect();
            col += j + 1 - i;
            i = j + 1;
            out.push(Token {
                tok: Tok::Str(s),
                line: l0,
                col: c0,
            });
            continue;
        }
        let sym = SYMBOLS.iter().find(|s| {
            let s: Vec<char> = s.chars().collect();
            chars[i..].starts_with(&s)
        });
        match sym {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push(Token {
                    tok: Tok::Sym(s),
                    line: l0,
                    col: c0,
                });
            }
            None => return Err(err(l0, c0, format!("unexpected character '{c}'"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

const KEYWORDS: [&str; 17] = [
    "ex", "all", "int", "not", "and", "or", "true", "false", "node", "edge", "rule", "graph", "if", "then", "else",
    "let", "use",
];

// ---------------------------------------------------------------------------
// Parser

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    rules: &'a RuleEnv,
    names: CondNames,
    /// Integer variables in scope; `None` means any variable is accepted.
    scope: Option<Vec<Var>>,
}

type PResult<T> = Result<T, ParseError>;

/// What label items may contain.
#[derive(Clone, Copy, PartialEq, Eq)]
enum LabelKind {
    Constant,
    Symbolic,
}

impl<'a> Parser<'a> {
    fn new(src: &str, rules: &'a RuleEnv, names: CondNames) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            rules,
            names,
            scope: Some(Vec::new()),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let t = &self.toks[pos.min(self.toks.len() - 1)];
        ParseError {
            file: None,
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{s}', found {}", self.peek())))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{s}', found {}", self.peek())))
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => Err(self.error(format!("unexpected {t}"))),
        }
    }

    fn name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            t => Err(self.error(format!("expected a name, found {t}"))),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat_sym("-");
        match self.bump() {
            Tok::Int(n) => Ok(if neg { -n } else { n }),
            t => {
                self.pos -= 1;
                Err(self.error(format!("expected an integer, found {t}")))
            }
        }
    }

    fn node_id(&mut self) -> PResult<NodeId> {
        let at = self.pos;
        let n = self.int()?;
        u32::try_from(n)
            .map(NodeId)
            .map_err(|_| self.error_at(at, format!("node id {n} is out of range")))
    }

    // -- expressions --------------------------------------------------------

    fn expr(&mut self) -> PResult<IntExpr> {
        let mut l = self.term()?;
        loop {
            let op = if self.eat_sym("+") {
                BinOp::Add
            } else if self.eat_sym("-") {
                BinOp::Sub
            } else {
                return Ok(l);
            };
            let r = self.term()?;
            l = IntExpr::bin(op, l, r);
        }
    }

    fn term(&mut self) -> PResult<IntExpr> {
        let mut l = self.factor()?;
        loop {
            let op = if self.eat_sym("*") {
                BinOp::Mul
            } else if self.eat_sym("/") {
                BinOp::Div
            } else {
                return Ok(l);
            };
            let r = self.factor()?;
            l = IntExpr::bin(op, l, r);
        }
    }

    fn factor(&mut self) -> PResult<IntExpr> {
        if self.eat_sym("-") {
            return Ok(match self.factor()? {
                IntExpr::Const(n) => IntExpr::Const(-n),
                e => IntExpr::Neg(Box::new(e)),
            });
        }
        if self.eat_sym("(") {
            let e = self.expr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        let at = self.pos;
        match self.bump() {
            Tok::Int(n) => Ok(IntExpr::Const(n)),
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                if let Some(scope) = &self.scope {
                    if !scope.iter().any(|v| **v == *s) {
                        return Err(self.error_at(at, format!("unbound variable {s}")));
                    }
                }
                Ok(IntExpr::var(&s))
            }
            t => Err(self.error_at(at, format!("expected an expression, found {t}"))),
        }
    }

    fn label(&mut self, kind: LabelKind) -> PResult<Label> {
        let mut items = vec![self.label_item(kind)?];
        while self.eat_sym(":") {
            items.push(self.label_item(kind)?);
        }
        Ok(Label(items))
    }

    fn label_item(&mut self, kind: LabelKind) -> PResult<IntExpr> {
        match kind {
            LabelKind::Constant => Ok(IntExpr::Const(self.int()?)),
            LabelKind::Symbolic => self.expr(),
        }
    }

    // -- graphs -------------------------------------------------------------

    /// `{ item* }` extending `base`. Returns the graph and whether any new
    /// node was declared.
    fn graph_body<L: NodeLabel>(
        &mut self,
        base: &Graph<L>,
        mut label: impl FnMut(&mut Self) -> PResult<L>,
    ) -> PResult<Graph<L>> {
        self.expect_sym("{")?;
        let mut g = base.clone();
        loop {
            if self.eat_sym("}") {
                return Ok(g);
            }
            let at = self.pos;
            if self.eat_kw("node") {
                let id = self.node_id()?;
                let l = if self.is_sym(";") { None } else { Some(label(self)?) };
                self.expect_sym(";")?;
                if base.has_node(id) {
                    match (base.label(id), l) {
                        (None, Some(l)) => g.set_label(id, Some(l)).expect("node exists"),
                        (_, None) => {}
                        (Some(old), Some(l)) if old.same(&l) => {}
                        (Some(_), Some(_)) => {
                            return Err(self.error_at(at, format!("node {id} is already labelled in the context")));
                        }
                    }
                } else {
                    g.add_node(id, l)
                        .map_err(|_| self.error_at(at, format!("node {id} is declared twice")))?;
                }
            } else if self.eat_kw("edge") {
                let s = self.node_id()?;
                let both = if self.eat_sym("--") {
                    true
                } else {
                    self.expect_sym("->")?;
                    false
                };
                let t = self.node_id()?;
                self.expect_sym(";")?;
                for (a, b) in [(s, t), (t, s)].into_iter().take(if both { 2 } else { 1 }) {
                    g.add_edge(a, b)
                        .map_err(|_| self.error_at(at, format!("edge {a} -> {b} refers to an undeclared node")))?;
                }
            } else {
                return Err(self.error(format!("expected 'node', 'edge' or '}}', found {}", self.peek())));
            }
        }
    }

    fn host_graph(&mut self) -> PResult<HostGraph> {
        self.expect_kw("graph")?;
        let g: Graph<Label> = self.graph_body(&SymGraph::new(), |p| p.label(LabelKind::Constant))?;
        Ok(g.map_labels(|l| l.as_constant().expect("constant label")))
    }

    // -- rules --------------------------------------------------------------

    fn rule(&mut self) -> PResult<RuleSchema> {
        let at = self.pos;
        self.expect_kw("rule")?;
        let name = self.name()?;
        self.expect_sym("(")?;
        let mut params: Vec<Var> = Vec::new();
        if !self.is_sym(")") {
            loop {
                let p = self.name()?;
                params.push(var(&p));
                if self.eat_sym(":") {
                    self.expect_kw("int")?;
                    if self.eat_sym(";") {
                        continue;
                    }
                }
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        self.expect_sym("{")?;
        let saved = self.scope.replace(params.clone());
        self.expect_kw_ident("lhs")?;
        let lhs = self.graph_body(&SymGraph::new(), |p| p.label(LabelKind::Symbolic))?;
        self.expect_kw_ident("rhs")?;
        let rhs = self.graph_body(&SymGraph::new(), |p| p.label(LabelKind::Symbolic))?;
        self.scope = saved;
        self.expect_sym("}")?;
        RuleSchema::new(&name, params, lhs, rhs).map_err(|e| self.error_at(at, e.to_string()))
    }

    fn expect_kw_ident(&mut self, s: &str) -> PResult<()> {
        self.expect_kw(s)
    }

    // -- programs -----------------------------------------------------------

    fn rule_names(&mut self) -> PResult<Vec<String>> {
        if self.eat_sym("{") {
            let mut names = vec![self.name()?];
            while self.eat_sym(",") {
                names.push(self.name()?);
            }
            self.expect_sym("}")?;
            Ok(rule_set(names))
        } else {
            Ok(vec![self.name()?])
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut p = self.program_atom()?;
        while self.eat_sym(";") {
            let q = self.program_atom()?;
            p = Program::seq(p, q);
        }
        Ok(p)
    }

    fn program_atom(&mut self) -> PResult<Program> {
        if self.eat_sym("(") {
            let p = self.program()?;
            self.expect_sym(")")?;
            if self.is_sym("!") {
                return Err(self.error("only rule sets can be iterated"));
            }
            return Ok(p);
        }
        if self.eat_kw("if") {
            let names = self.rule_names()?;
            self.expect_kw("then")?;
            let p = self.program_atom()?;
            self.expect_kw("else")?;
            let q = self.program_atom()?;
            return Ok(Program::IfElse(names, Box::new(p), Box::new(q)));
        }
        let names = self.rule_names()?;
        if self.eat_sym("!") {
            if self.is_sym("!") {
                return Err(self.error("a rule set can be iterated only once"));
            }
            Ok(Program::Bang(names))
        } else {
            Ok(Program::RuleSet(names))
        }
    }

    // -- conditions ---------------------------------------------------------

    fn cond(&mut self, ctx: &SymGraph) -> PResult<Cond> {
        let l = self.or(ctx)?;
        if self.eat_sym("=>") {
            let r = self.cond(ctx)?;
            return Ok(Cond::implies(l, r));
        }
        Ok(l)
    }

    fn or(&mut self, ctx: &SymGraph) -> PResult<Cond> {
        let mut cs = vec![self.and(ctx)?];
        while self.eat_kw("or") {
            cs.push(self.and(ctx)?);
        }
        Ok(if cs.len() == 1 { cs.pop().expect("one") } else { Cond::Or(cs) })
    }

    fn and(&mut self, ctx: &SymGraph) -> PResult<Cond> {
        let mut cs = vec![self.unary(ctx)?];
        while self.eat_kw("and") {
            cs.push(self.unary(ctx)?);
        }
        Ok(if cs.len() == 1 { cs.pop().expect("one") } else { Cond::And(cs) })
    }

    fn unary(&mut self, ctx: &SymGraph) -> PResult<Cond> {
        if self.eat_kw("not") {
            return Ok(Cond::not(self.unary(ctx)?));
        }
        let universal = self.is_kw("all");
        if self.eat_kw("ex") || self.eat_kw("all") {
            if self.eat_kw("int") {
                let mut vars = vec![var(&self.name()?)];
                while self.eat_sym(",") {
                    vars.push(var(&self.name()?));
                }
                self.expect_sym(".")?;
                let depth = self.push_scope(&vars);
                let body = self.cond(ctx);
                self.pop_scope(depth);
                let body = body?;
                return Ok(if universal {
                    vars.into_iter().rev().fold(body, |b, x| Cond::forall_int(x, b))
                } else {
                    Cond::exists_ints(vars, body)
                });
            }
            let g = self.graph_body(ctx, |p| p.label(LabelKind::Symbolic))?;
            let body = if universal {
                self.expect_sym(".")?;
                self.cond(&g)?
            } else if self.eat_sym(".") {
                self.cond(&g)?
            } else {
                Cond::True
            };
            return Ok(if universal { Cond::forall(g, body) } else { Cond::exists(g, body) });
        }
        if self.eat_kw("true") {
            return Ok(Cond::True);
        }
        if self.eat_kw("false") {
            return Ok(Cond::False);
        }
        if self.is_sym("(") {
            let start = self.pos;
            self.bump();
            if let Ok(c) = self.cond(ctx).and_then(|c| self.expect_sym(")").map(|_| c)) {
                if !self.at_operator() {
                    return Ok(c);
                }
            }
            self.pos = start;
            return self.constraint();
        }
        if let Tok::Ident(name) = self.peek().clone() {
            let at = self.pos;
            if (name == "App" || name == "WPost") && matches!(self.peek_at(1), Tok::Sym("(")) {
                if !ctx.is_empty() {
                    return Err(self.error("App and WPost can only be used at the top level"));
                }
                self.bump();
                self.bump();
                return if name == "App" { self.app_macro(at) } else { self.wpost_macro(at) };
            }
            let followed_by_op = matches!(
                self.peek_at(1),
                Tok::Sym("=" | "!=" | "<" | "<=" | ">" | ">=" | "+" | "-" | "*" | "/")
            );
            if !followed_by_op && !KEYWORDS.contains(&name.as_str()) {
                if let Some(c) = self.names.get(&name) {
                    if !ctx.is_empty() {
                        return Err(self.error("named conditions can only be used at the top level"));
                    }
                    let c = c.clone();
                    self.bump();
                    return Ok(c);
                }
                let bound = self.scope.as_ref().is_none_or(|s| s.iter().any(|v| **v == *name));
                if !bound {
                    return Err(self.error(format!("unknown condition or variable {name}")));
                }
            }
        }
        self.constraint()
    }

    fn at_operator(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Sym("=" | "!=" | "<" | "<=" | ">" | ">=" | "+" | "-" | "*" | "/")
        )
    }

    fn constraint(&mut self) -> PResult<Cond> {
        let l = self.expr()?;
        let op = match self.peek() {
            Tok::Sym("=") => CmpOp::Eq,
            Tok::Sym("!=") => CmpOp::Ne,
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("<=") => CmpOp::Le,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym(">=") => CmpOp::Ge,
            t => return Err(self.error(format!("expected a comparison, found {t}"))),
        };
        self.bump();
        let r = self.expr()?;
        Ok(Cond::Constraint(Constraint::cmp(op, l, r)))
    }

    fn push_scope(&mut self, vars: &[Var]) -> usize {
        match &mut self.scope {
            Some(s) => {
                let d = s.len();
                s.extend(vars.iter().cloned());
                d
            }
            None => 0,
        }
    }

    fn pop_scope(&mut self, depth: usize) {
        if let Some(s) = &mut self.scope {
            s.truncate(depth);
        }
    }

    fn resolve_rules(&self, names: &[String], at: usize) -> PResult<Vec<&'a RuleSchema>> {
        resolve(self.rules, names).map_err(|e| self.error_at(at, e.to_string()))
    }

    fn app_macro(&mut self, at: usize) -> PResult<Cond> {
        let mut names = Vec::new();
        if !self.is_sym(")") {
            loop {
                names.extend(self.rule_names()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        let names = rule_set(names);
        let rules = self.resolve_rules(&names, at)?;
        Ok(Transformer::default().app(&rules))
    }

    fn wpost_macro(&mut self, at: usize) -> PResult<Cond> {
        let names = self.rule_names()?;
        self.expect_sym(",")?;
        let c = self.cond(&SymGraph::new())?;
        self.expect_sym(")")?;
        let rules = self.resolve_rules(&names, at)?;
        Transformer::default()
            .wpost(&rules, &c)
            .map_err(|e| self.error_at(at, e.to_string()))
    }

    /// `let NAME = cond;` definitions.
    fn lets(&mut self) -> PResult<()> {
        while self.eat_kw("let") {
            let at = self.pos;
            let name = self.name()?;
            self.expect_sym("=")?;
            let c = self.cond(&SymGraph::new())?;
            self.expect_sym(";")?;
            if self.names.insert(name.clone(), c).is_some() {
                return Err(self.error_at(at, format!("{name} is defined twice")));
            }
        }
        Ok(())
    }

    fn skip_uses(&mut self) -> PResult<()> {
        while self.eat_kw("use") {
            match self.bump() {
                Tok::Str(_) => {}
                t => {
                    self.pos -= 1;
                    return Err(self.error(format!("expected a file name, found {t}")));
                }
            }
            self.expect_sym(";")?;
        }
        Ok(())
    }

    // -- proofs -------------------------------------------------------------

    fn triple(&mut self) -> PResult<Triple> {
        self.expect_sym("[")?;
        let pre = self.cond(&SymGraph::new())?;
        self.expect_sym("]")?;
        let program = self.program()?;
        self.expect_sym("[")?;
        let exit = match self.name_or_kw()? {
            s if s == "ok" => Exit::Ok,
            s if s == "er" => Exit::Er,
            s => return Err(self.error_at(self.pos - 1, format!("expected 'ok' or 'er', found '{s}'"))),
        };
        self.expect_sym(":")?;
        let post = self.cond(&SymGraph::new())?;
        self.expect_sym("]")?;
        Ok(Triple::new(pre, program, exit, post))
    }

    fn name_or_kw(&mut self) -> PResult<String> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            t => {
                self.pos -= 1;
                Err(self.error(format!("expected a name, found {t}")))
            }
        }
    }

    fn proof_node(&mut self) -> PResult<ProofNode> {
        self.expect_sym("(")?;
        self.expect_kw("rule")?;
        let at = self.pos;
        let rule_name = self.name_or_kw()?;
        let rule: ProofRule = rule_name.parse().map_err(|e: crate::proof::UnknownProofRule| self.error_at(at, e.to_string()))?;
        self.expect_kw_ident("conclusion")?;
        self.expect_sym(":")?;
        let conclusion = self.triple()?;
        let mut node = ProofNode::new(rule, conclusion, Vec::new());
        while self.eat_kw("hint") {
            self.expect_sym(":")?;
            let key = self.name_or_kw()?;
            self.expect_sym("=")?;
            let hint = if self.eat_sym("[") {
                let mut cs = vec![self.cond(&SymGraph::new())?];
                while self.eat_sym(",") {
                    cs.push(self.cond(&SymGraph::new())?);
                }
                self.expect_sym("]")?;
                Hint::Chain(cs)
            } else {
                Hint::Cond(self.cond(&SymGraph::new())?)
            };
            node.hints.insert(key, hint);
        }
        while self.eat_kw("child") {
            self.expect_sym(":")?;
            node.children.push(self.proof_node()?);
        }
        self.expect_sym(")")?;
        if let Some(k) = rule.arity() {
            if node.children.len() != k {
                return Err(self.error_at(
                    at,
                    format!("{rule} takes {k} premises, found {}", node.children.len()),
                ));
            }
        }
        Ok(node)
    }
}

// ---------------------------------------------------------------------------
// Entry points

/// Parses a host graph `graph { ... }`.
pub fn parse_graph(src: &str) -> Result<HostGraph, ParseError> {
    let empty = RuleEnv::new();
    let mut p = Parser::new(src, &empty, CondNames::new())?;
    let g = p.host_graph()?;
    p.expect_eof()?;
    Ok(g)
}

/// Parses a sequence of rule declarations.
pub fn parse_rules(src: &str) -> Result<Vec<RuleSchema>, ParseError> {
    let empty = RuleEnv::new();
    let mut p = Parser::new(src, &empty, CondNames::new())?;
    let mut out: Vec<RuleSchema> = Vec::new();
    while !matches!(p.peek(), Tok::Eof) {
        let at = p.pos;
        let r = p.rule()?;
        if out.iter().any(|o| o.name == r.name) {
            return Err(p.error_at(at, format!("rule {} is declared twice", r.name)));
        }
        out.push(r);
    }
    Ok(out)
}

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let empty = RuleEnv::new();
    let mut p = Parser::new(src, &empty, CondNames::new())?;
    let prog = p.program()?;
    p.expect_eof()?;
    Ok(prog)
}

/// Parses a closed condition, optionally preceded by `use` lines and `let`
/// definitions. `App` and `WPost` refer to `rules`; other names to `names`
/// and to the script's own definitions.
pub fn parse_condition(src: &str, rules: &RuleEnv, names: &CondNames) -> Result<Cond, ParseError> {
    let mut p = Parser::new(src, rules, names.clone())?;
    p.skip_uses()?;
    p.lets()?;
    let c = p.cond(&SymGraph::new())?;
    p.expect_eof()?;
    Ok(c)
}

/// Parses only `use` lines and `let` definitions (a condition library).
pub fn parse_definitions(src: &str, rules: &RuleEnv, names: &CondNames) -> Result<CondNames, ParseError> {
    let mut p = Parser::new(src, rules, names.clone())?;
    p.skip_uses()?;
    p.lets()?;
    p.expect_eof()?;
    Ok(p.names)
}

/// A condition over a given context graph, with the given variables free.
pub fn parse_condition_over(src: &str, ctx: &SymGraph, free: &[Var]) -> Result<Cond, ParseError> {
    let empty = RuleEnv::new();
    let mut p = Parser::new(src, &empty, CondNames::new())?;
    p.scope = Some(free.to_vec());
    let c = p.cond(ctx)?;
    p.expect_eof()?;
    Ok(c)
}

/// Parses a triple `[c] P [ok: d]`, with the same preamble as a condition.
pub fn parse_triple(src: &str, rules: &RuleEnv, names: &CondNames) -> Result<Triple, ParseError> {
    let mut p = Parser::new(src, rules, names.clone())?;
    p.skip_uses()?;
    p.lets()?;
    let t = p.triple()?;
    p.expect_eof()?;
    Ok(t)
}

#[derive(Debug, Clone)]
pub struct ProofScript {
    pub names: CondNames,
    pub root: ProofNode,
}

/// Parses a proof script: `use` lines, `let` definitions, one proof tree.
pub fn parse_proof(src: &str, rules: &RuleEnv, names: &CondNames) -> Result<ProofScript, ParseError> {
    let mut p = Parser::new(src, rules, names.clone())?;
    p.skip_uses()?;
    p.lets()?;
    let root = p.proof_node()?;
    p.expect_eof()?;
    Ok(ProofScript { names: p.names, root })
}

/// The files named by leading `use "file";` lines, with their positions.
pub fn script_uses(src: &str) -> Result<Vec<(String, usize, usize)>, ParseError> {
    let toks = lex(src)?;
    let mut out = Vec::new();
    let mut i = 0;
    while matches!(&toks[i].tok, Tok::Ident(s) if s == "use") {
        if let Tok::Str(f) = &toks[(i + 1).min(toks.len() - 1)].tok {
            out.push((f.clone(), toks[i].line, toks[i].col));
        }
        i += 3;
        if i >= toks.len() {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econd::{render, satisfies, SatConfig};
    use crate::expr::HostLabel;

    const RULES: &str = "
        // the two rules of the colouring program
        rule init(x) { lhs { node 0 x; } rhs { node 0 x:0; } }
        rule colour(x, y, i: int) {
            lhs { node 0 x:i; node 1 y; edge 0 -- 1; }
            rhs { node 0 x:i; node 1 y:i+1; edge 0 -- 1; }
        }";

    fn env() -> RuleEnv {
        let mut e = RuleEnv::new();
        for r in parse_rules(RULES).unwrap() {
            e.insert(r);
        }
        e
    }

    #[test]
    fn graphs() {
        let g = parse_graph("graph { node 0 1; node 1 2:0; node 2 -3; edge 0 -- 1; edge 2 -> 2; }").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.label(NodeId(2)), Some(&HostLabel(vec![-3])));
        let e = parse_graph("graph { node 0 x; }").unwrap_err();
        assert_eq!((e.line, e.col), (1, 16));
        assert!(parse_graph("graph { node 0 1; node 0 2; }").is_err());
        assert!(parse_graph("graph { edge 0 -> 1; }").is_err());
    }

    #[test]
    fn rules_round_trip() {
        let e = env();
        let colour = e.get("colour").unwrap();
        assert_eq!(colour.params.len(), 3);
        let again = parse_rules(&colour.to_string()).unwrap();
        assert_eq!(&again[0], colour);
        let err = parse_rules("rule bad(x) { lhs { } rhs { node 0 y; } }").unwrap_err();
        assert!(err.message.contains("unbound variable y"), "{err}");
    }

    #[test]
    fn programs() {
        for src in ["init; colour!", "if {colour, init} then (init; colour!) else colour", "a; (b; c)"] {
            let p = parse_program(src).unwrap();
            assert_eq!(p.to_string(), src);
        }
        assert!(parse_program("colour!!").is_err());
        assert!(parse_program("(a; b)!").is_err());
    }

    #[test]
    fn conditions() {
        let e = env();
        let c = parse_condition("WPost(init, true)", &e, &CondNames::new()).unwrap();
        assert_eq!(render(&c, &SymGraph::new()), "ex int x. ex { node 0 x:0; }");
        let src = "ex int a. ex { node 0 a; }. not ex int d, k. ex { node 1 d:k; }";
        let c = parse_condition(src, &e, &CondNames::new()).unwrap();
        assert_eq!(render(&c, &SymGraph::new()), src);
        let c = parse_condition("let n = ex int x. ex { node 0 x; }; not n and (1 + 1 = 2)", &e, &CondNames::new()).unwrap();
        let g = parse_graph("graph { }").unwrap();
        assert!(satisfies(&g, &c, &SatConfig::default()).unwrap().holds);
        assert!(parse_condition("ex int x. y = x", &e, &CondNames::new()).is_err());
        assert!(parse_condition("App(nope)", &e, &CondNames::new()).is_err());
        let c = parse_condition("all int x. (x < 3) => x <= 2", &e, &CondNames::new()).unwrap();
        assert!(satisfies(&g, &c, &SatConfig::default()).unwrap().holds);
    }

    #[test]
    fn proofs() {
        let src = r#"
            use "colouring.grs";
            let na = not App(init);
            (rule SeqFail
              conclusion: [na] init; colour! [er: na]
              child: (rule Cons
                conclusion: [na] init [er: na]
                child: (rule RuleSetFail conclusion: [true and na] init [er: true and na])))"#;
        assert_eq!(script_uses(src).unwrap()[0].0, "colouring.grs");
        let s = parse_proof(src, &env(), &CondNames::new()).unwrap();
        assert_eq!(s.root.size(), 3);
        let bad = src.replace("RuleSetFail", "Magic");
        assert!(parse_proof(&bad, &env(), &CondNames::new()).unwrap_err().message.contains("unknown proof rule"));
    }
}
