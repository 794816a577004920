//! Integer label expressions, interpretations, substitutions and
//! interpretation constraints.
//!
//! Labels are non-empty lists of integer expressions. Evaluation is partial:
//! an unbound variable, a zero divisor or an arithmetic overflow make the
//! whole expression undefined (`None`). Comparisons with an undefined operand
//! are false, which keeps satisfaction two-valued.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Variable identifier. Cheap to clone and shareable across threads.
pub type Var = Arc<str>;

pub fn var(name: &str) -> Var {
    Arc::from(name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    fn apply(self, l: i64, r: i64) -> Option<i64> {
        match self {
            BinOp::Add => l.checked_add(r),
            BinOp::Sub => l.checked_sub(r),
            BinOp::Mul => l.checked_mul(r),
            // truncates toward zero; zero divisor is undefined
            BinOp::Div => l.checked_div(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntExpr {
    Const(i64),
    Var(Var),
    Neg(Box<IntExpr>),
    Bin(BinOp, Box<IntExpr>, Box<IntExpr>),
}

impl IntExpr {
    pub fn var(name: &str) -> Self {
        IntExpr::Var(var(name))
    }

    pub fn bin(op: BinOp, l: IntExpr, r: IntExpr) -> Self {
        IntExpr::Bin(op, Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(l: IntExpr, r: IntExpr) -> Self {
        Self::bin(BinOp::Add, l, r)
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            IntExpr::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_const(&self) -> Option<i64> {
        match self {
            IntExpr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn eval(&self, interp: &Interp) -> Option<i64> {
        match self {
            IntExpr::Const(c) => Some(*c),
            IntExpr::Var(v) => interp.get(v),
            IntExpr::Neg(e) => e.eval(interp)?.checked_neg(),
            IntExpr::Bin(op, l, r) => op.apply(l.eval(interp)?, r.eval(interp)?),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            IntExpr::Const(_) => {}
            IntExpr::Var(v) => {
                out.insert(v.clone());
            }
            IntExpr::Neg(e) => e.collect_vars(out),
            IntExpr::Bin(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn mentions(&self, x: &str) -> bool {
        match self {
            IntExpr::Const(_) => false,
            IntExpr::Var(v) => &**v == x,
            IntExpr::Neg(e) => e.mentions(x),
            IntExpr::Bin(_, l, r) => l.mentions(x) || r.mentions(x),
        }
    }

    fn occurrences(&self, x: &str) -> usize {
        match self {
            IntExpr::Const(_) => 0,
            IntExpr::Var(v) => usize::from(&**v == x),
            IntExpr::Neg(e) => e.occurrences(x),
            IntExpr::Bin(_, l, r) => l.occurrences(x) + r.occurrences(x),
        }
    }

    pub fn collect_consts(&self, out: &mut BTreeSet<i64>) {
        match self {
            IntExpr::Const(c) => {
                out.insert(*c);
            }
            IntExpr::Var(_) => {}
            IntExpr::Neg(e) => {
                e.collect_consts(out);
                if let IntExpr::Const(c) = **e {
                    if let Some(n) = c.checked_neg() {
                        out.insert(n);
                    }
                }
            }
            IntExpr::Bin(_, l, r) => {
                l.collect_consts(out);
                r.collect_consts(out);
            }
        }
    }

    /// Simultaneous substitution of mapped variables.
    pub fn subst(&self, sigma: &Subst) -> IntExpr {
        if sigma.is_empty() {
            return self.clone();
        }
        match self {
            IntExpr::Const(_) => self.clone(),
            IntExpr::Var(v) => sigma.get(v).cloned().unwrap_or_else(|| self.clone()),
            IntExpr::Neg(e) => IntExpr::Neg(Box::new(e.subst(sigma))),
            IntExpr::Bin(op, l, r) => IntExpr::bin(*op, l.subst(sigma), r.subst(sigma)),
        }
    }

    /// Solves `self = target` for the single variable `x`, evaluating every
    /// other subterm under `interp`. Succeeds only when `x` occurs exactly
    /// once and the path to it uses invertible operations (`+`, `-`,
    /// negation, multiplication by a non-zero factor that divides evenly).
    pub fn solve_for(&self, x: &str, target: i64, interp: &Interp) -> Option<i64> {
        if self.occurrences(x) != 1 {
            return None;
        }
        let mut expr = self;
        let mut target = target;
        loop {
            match expr {
                IntExpr::Var(v) if &**v == x => return Some(target),
                IntExpr::Neg(e) => {
                    target = target.checked_neg()?;
                    expr = e;
                }
                IntExpr::Bin(op, l, r) => {
                    let left_has = l.mentions(x);
                    let (inner, other) = if left_has { (l, r) } else { (r, l) };
                    let k = other.eval(interp)?;
                    target = match (op, left_has) {
                        (BinOp::Add, _) => target.checked_sub(k)?,
                        // inner - k = t  => inner = t + k
                        (BinOp::Sub, true) => target.checked_add(k)?,
                        // k - inner = t  => inner = k - t
                        (BinOp::Sub, false) => k.checked_sub(target)?,
                        (BinOp::Mul, _) => {
                            if k == 0 || target % k != 0 {
                                return None;
                            }
                            target / k
                        }
                        (BinOp::Div, _) => return None,
                    };
                    expr = inner;
                }
                _ => return None,
            }
        }
    }

    /// Deterministic canonical form: a sum of monomials with folded
    /// constants and sorted commutative operands. Division subterms are kept
    /// as opaque factors; a division that cancels out is retained as a `0*d`
    /// term so that undefinedness is preserved.
    pub fn normalize(&self) -> IntExpr {
        match Poly::from_expr(self) {
            Some(p) => p.rebuild(),
            None => self.clone(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            IntExpr::Bin(op, _, _) => op.precedence(),
            IntExpr::Neg(_) => 3,
            IntExpr::Const(c) if *c < 0 => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntExpr::Const(c) => write!(f, "{c}"),
            IntExpr::Var(v) => write!(f, "{v}"),
            IntExpr::Neg(e) => {
                if e.precedence() <= 3 {
                    write!(f, "-({e})")
                } else {
                    write!(f, "-{e}")
                }
            }
            IntExpr::Bin(op, l, r) => {
                let p = op.precedence();
                if l.precedence() < p {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                f.write_str(op.symbol())?;
                // right operands of the same precedence need parentheses
                // (left associativity); so do leading minus signs
                if r.precedence() <= p || r.precedence() == 3 {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
        }
    }
}

/// A factor of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Atom {
    Var(Var),
    Div(IntExpr, IntExpr),
}

impl Atom {
    fn to_expr(&self) -> IntExpr {
        match self {
            Atom::Var(v) => IntExpr::Var(v.clone()),
            Atom::Div(l, r) => IntExpr::bin(BinOp::Div, l.clone(), r.clone()),
        }
    }
}

type Mono = Vec<Atom>;

#[derive(Debug, Clone, Default)]
struct Poly {
    terms: BTreeMap<Mono, i64>,
    /// Division atoms whose definedness the expression depends on.
    guards: BTreeSet<Atom>,
}

impl Poly {
    fn constant(c: i64) -> Self {
        let mut p = Poly::default();
        if c != 0 {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    fn atom(a: Atom) -> Self {
        let mut p = Poly::default();
        if let Atom::Div(..) = a {
            p.guards.insert(a.clone());
        }
        p.terms.insert(vec![a], 1);
        p
    }

    fn as_constant(&self) -> Option<i64> {
        if !self.guards.is_empty() {
            return None;
        }
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    fn from_expr(e: &IntExpr) -> Option<Poly> {
        Some(match e {
            IntExpr::Const(c) => Poly::constant(*c),
            IntExpr::Var(v) => Poly::atom(Atom::Var(v.clone())),
            IntExpr::Neg(e) => Poly::from_expr(e)?.scale(-1)?,
            IntExpr::Bin(BinOp::Add, l, r) => Poly::from_expr(l)?.plus(&Poly::from_expr(r)?)?,
            IntExpr::Bin(BinOp::Sub, l, r) => {
                Poly::from_expr(l)?.plus(&Poly::from_expr(r)?.scale(-1)?)?
            }
            IntExpr::Bin(BinOp::Mul, l, r) => Poly::from_expr(l)?.times(&Poly::from_expr(r)?)?,
            IntExpr::Bin(BinOp::Div, l, r) => {
                let ln = Poly::from_expr(l)?;
                let rn = Poly::from_expr(r)?;
                match (ln.as_constant(), rn.as_constant()) {
                    (Some(a), Some(b)) if b != 0 => Poly::constant(a.checked_div(b)?),
                    _ => Poly::atom(Atom::Div(ln.rebuild(), rn.rebuild())),
                }
            }
        })
    }

    fn scale(mut self, k: i64) -> Option<Poly> {
        for c in self.terms.values_mut() {
            *c = c.checked_mul(k)?;
        }
        self.terms.retain(|_, c| *c != 0);
        Some(self)
    }

    fn plus(mut self, other: &Poly) -> Option<Poly> {
        for (m, c) in &other.terms {
            let entry = self.terms.entry(m.clone()).or_insert(0);
            *entry = entry.checked_add(*c)?;
        }
        self.terms.retain(|_, c| *c != 0);
        self.guards.extend(other.guards.iter().cloned());
        Some(self)
    }

    fn times(&self, other: &Poly) -> Option<Poly> {
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m: Mono = m1.iter().chain(m2.iter()).cloned().collect();
                m.sort();
                let entry = out.terms.entry(m).or_insert(0);
                *entry = entry.checked_add(c1.checked_mul(*c2)?)?;
            }
        }
        out.terms.retain(|_, c| *c != 0);
        out.guards = self.guards.union(&other.guards).cloned().collect();
        Some(out)
    }

    fn rebuild(&self) -> IntExpr {
        let mut used: BTreeSet<&Atom> = BTreeSet::new();
        let mut terms: Vec<(IntExpr, i64)> = Vec::new();
        for (m, c) in self.terms.iter().filter(|(m, _)| !m.is_empty()) {
            used.extend(m.iter());
            let mono = m
                .iter()
                .map(Atom::to_expr)
                .reduce(|a, b| IntExpr::bin(BinOp::Mul, a, b))
                .expect("non-empty monomial");
            terms.push((mono, *c));
        }
        if let Some(c) = self.terms.get(&Vec::new()) {
            terms.push((IntExpr::Const(1), *c));
        }
        for g in &self.guards {
            if !used.contains(g) {
                terms.push((g.to_expr(), 0));
            }
        }
        let mut acc: Option<IntExpr> = None;
        for (mono, c) in terms {
            let is_const = mono == IntExpr::Const(1);
            let magnitude = |c: i64| -> IntExpr {
                let a = c.unsigned_abs();
                if is_const {
                    IntExpr::Const(a as i64)
                } else if a == 1 {
                    mono.clone()
                } else {
                    IntExpr::bin(BinOp::Mul, IntExpr::Const(a as i64), mono.clone())
                }
            };
            acc = Some(match acc {
                None => {
                    if is_const {
                        IntExpr::Const(c)
                    } else if c < 0 {
                        IntExpr::Neg(Box::new(magnitude(c)))
                    } else {
                        magnitude(c)
                    }
                }
                Some(prev) => {
                    let op = if c < 0 { BinOp::Sub } else { BinOp::Add };
                    IntExpr::bin(op, prev, magnitude(c))
                }
            });
        }
        acc.unwrap_or(IntExpr::Const(0))
    }
}

/// A node label over expressions: a non-empty list of integer expressions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub Vec<IntExpr>);

impl Label {
    pub fn new(items: Vec<IntExpr>) -> Self {
        debug_assert!(!items.is_empty(), "labels are non-empty");
        Label(items)
    }

    pub fn constant(values: &[i64]) -> Self {
        Label(values.iter().map(|v| IntExpr::Const(*v)).collect())
    }

    pub fn items(&self) -> &[IntExpr] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, interp: &Interp) -> Option<HostLabel> {
        self.0
            .iter()
            .map(|e| e.eval(interp))
            .collect::<Option<Vec<_>>>()
            .map(HostLabel)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for e in &self.0 {
            e.collect_vars(out);
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn subst(&self, sigma: &Subst) -> Label {
        Label(self.0.iter().map(|e| e.subst(sigma)).collect())
    }

    pub fn normalize(&self) -> Label {
        Label(self.0.iter().map(IntExpr::normalize).collect())
    }

    /// Syntactic equality after normalisation.
    pub fn same_as(&self, other: &Label) -> bool {
        self.len() == other.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a == b || a.normalize() == b.normalize())
    }

    pub fn as_constant(&self) -> Option<HostLabel> {
        self.eval(&Interp::default())
    }
}

impl From<&HostLabel> for Label {
    fn from(l: &HostLabel) -> Self {
        Label::constant(&l.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(":")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// A concrete node label: a non-empty list of integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct HostLabel(pub Vec<i64>);

impl HostLabel {
    pub fn new(values: Vec<i64>) -> Self {
        HostLabel(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for HostLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(":")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Finite partial map from variables to integers. Later bindings shadow
/// earlier ones, which lets evaluators push and pop bindings cheaply.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interp {
    bindings: Vec<(Var, i64)>,
}

impl Interp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> Option<i64> {
        self.bindings
            .iter()
            .rev()
            .find(|(v, _)| &**v == x)
            .map(|(_, n)| *n)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.get(x).is_some()
    }

    pub fn bind(&mut self, x: Var, value: i64) {
        self.bindings.push((x, value));
    }

    pub fn with(mut self, x: &str, value: i64) -> Self {
        self.bind(var(x), value);
        self
    }

    /// Number of stacked bindings, for use with [`Interp::truncate`].
    pub fn depth(&self) -> usize {
        self.bindings.len()
    }

    pub fn truncate(&mut self, depth: usize) {
        self.bindings.truncate(depth);
    }

    pub fn domain(&self) -> BTreeSet<Var> {
        self.bindings.iter().map(|(v, _)| v.clone()).collect()
    }

    /// The effective (unshadowed) bindings in variable order.
    pub fn to_map(&self) -> BTreeMap<Var, i64> {
        let mut m = BTreeMap::new();
        for (v, n) in &self.bindings {
            m.insert(v.clone(), *n);
        }
        m
    }
}

impl FromIterator<(Var, i64)> for Interp {
    fn from_iter<T: IntoIterator<Item = (Var, i64)>>(iter: T) -> Self {
        Interp {
            bindings: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Interp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, n)) in self.to_map().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={n}")?;
        }
        f.write_str("}")
    }
}

/// Finite map from variables to expressions.
pub type Subst = BTreeMap<Var, IntExpr>;

pub fn subst_of(pairs: &[(&str, IntExpr)]) -> Subst {
    pairs.iter().map(|(v, e)| (var(v), e.clone())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, l: i64, r: i64) -> bool {
        match self {
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Gt => l > r,
            CmpOp::Ge => l >= r,
        }
    }
}

/// Boolean formula over comparisons of integer expressions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    True,
    False,
    Cmp(CmpOp, IntExpr, IntExpr),
    Not(Box<Constraint>),
    And(Box<Constraint>, Box<Constraint>),
    Or(Box<Constraint>, Box<Constraint>),
}

impl Constraint {
    pub fn cmp(op: CmpOp, l: IntExpr, r: IntExpr) -> Self {
        Constraint::Cmp(op, l, r)
    }

    pub fn eq(l: IntExpr, r: IntExpr) -> Self {
        Constraint::Cmp(CmpOp::Eq, l, r)
    }

    pub fn eval(&self, interp: &Interp) -> bool {
        match self {
            Constraint::True => true,
            Constraint::False => false,
            Constraint::Cmp(op, l, r) => match (l.eval(interp), r.eval(interp)) {
                (Some(a), Some(b)) => op.holds(a, b),
                _ => false,
            },
            Constraint::Not(c) => !c.eval(interp),
            Constraint::And(a, b) => a.eval(interp) && b.eval(interp),
            Constraint::Or(a, b) => a.eval(interp) || b.eval(interp),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Constraint::True | Constraint::False => {}
            Constraint::Cmp(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Constraint::Not(c) => c.collect_vars(out),
            Constraint::And(a, b) | Constraint::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_consts(&self, out: &mut BTreeSet<i64>) {
        match self {
            Constraint::True | Constraint::False => {}
            Constraint::Cmp(_, l, r) => {
                l.collect_consts(out);
                r.collect_consts(out);
            }
            Constraint::Not(c) => c.collect_consts(out),
            Constraint::And(a, b) | Constraint::Or(a, b) => {
                a.collect_consts(out);
                b.collect_consts(out);
            }
        }
    }

    pub fn subst(&self, sigma: &Subst) -> Constraint {
        match self {
            Constraint::True | Constraint::False => self.clone(),
            Constraint::Cmp(op, l, r) => Constraint::Cmp(*op, l.subst(sigma), r.subst(sigma)),
            Constraint::Not(c) => Constraint::Not(Box::new(c.subst(sigma))),
            Constraint::And(a, b) => {
                Constraint::And(Box::new(a.subst(sigma)), Box::new(b.subst(sigma)))
            }
            Constraint::Or(a, b) => {
                Constraint::Or(Box::new(a.subst(sigma)), Box::new(b.subst(sigma)))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Constraint::Or(..) => 1,
            Constraint::And(..) => 2,
            Constraint::Not(_) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paren = |f: &mut fmt::Formatter<'_>, c: &Constraint, min: u8| {
            if c.precedence() < min {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        };
        match self {
            Constraint::True => f.write_str("true"),
            Constraint::False => f.write_str("false"),
            Constraint::Cmp(op, l, r) => write!(f, "{l} {} {r}", op.symbol()),
            Constraint::Not(c) => {
                f.write_str("not ")?;
                paren(f, c, 3)
            }
            Constraint::And(a, b) => {
                paren(f, a, 2)?;
                f.write_str(" and ")?;
                paren(f, b, 3)
            }
            Constraint::Or(a, b) => {
                paren(f, a, 1)?;
                f.write_str(" or ")?;
                paren(f, b, 2)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> IntExpr {
        IntExpr::var("x")
    }

    #[test]
    fn eval_basic() {
        let e = IntExpr::add(x(), IntExpr::Const(1));
        assert_eq!(e.eval(&Interp::new().with("x", 7)), Some(8));
        let div0 = IntExpr::bin(BinOp::Div, IntExpr::Const(1), IntExpr::Const(0));
        assert_eq!(div0.eval(&Interp::new()), None);
        let negprod = IntExpr::Neg(Box::new(IntExpr::bin(BinOp::Mul, x(), IntExpr::var("y"))));
        assert_eq!(negprod.eval(&Interp::new().with("x", 8).with("y", 8)), Some(-64));
    }

    #[test]
    fn unbound_variable_is_undefined() {
        assert_eq!(x().eval(&Interp::new()), None);
        let e = IntExpr::add(x(), IntExpr::Const(1));
        assert_eq!(e.eval(&Interp::new().with("y", 1)), None);
    }

    #[test]
    fn division_truncates_toward_zero() {
        let e = IntExpr::bin(BinOp::Div, IntExpr::Const(-7), IntExpr::Const(2));
        assert_eq!(e.eval(&Interp::new()), Some(-3));
    }

    #[test]
    fn constraints() {
        let i = Interp::new().with("x", 1).with("y", 2);
        let ne = Constraint::cmp(CmpOp::Ne, x(), IntExpr::var("y"));
        assert!(ne.eval(&i));
        assert!(Constraint::eq(x(), x()).eval(&Interp::new().with("x", 5)));
        let bad = Constraint::eq(
            IntExpr::bin(BinOp::Div, x(), IntExpr::Const(0)),
            IntExpr::Const(1),
        );
        assert!(!bad.eval(&Interp::new().with("x", 3)));
        assert!(Constraint::Not(Box::new(bad)).eval(&Interp::new().with("x", 3)));
    }

    #[test]
    fn substitution() {
        let e = IntExpr::bin(BinOp::Mul, x(), IntExpr::Const(2));
        let s = subst_of(&[("x", IntExpr::add(IntExpr::var("y"), IntExpr::Const(1)))]);
        assert_eq!(e.subst(&s).to_string(), "(y+1)*2");
        let l = Label(vec![IntExpr::Const(5), x()]);
        assert_eq!(l.subst(&subst_of(&[("x", IntExpr::Const(0))])).to_string(), "5:0");
        assert_eq!(x().subst(&Subst::new()), x());
    }

    #[test]
    fn substitution_is_simultaneous() {
        let e = IntExpr::add(x(), IntExpr::var("y"));
        let s = subst_of(&[("x", IntExpr::var("y")), ("y", IntExpr::var("x"))]);
        assert_eq!(e.subst(&s).to_string(), "y+x");
    }

    #[test]
    fn normalize_examples() {
        let a = IntExpr::add(IntExpr::Const(1), x());
        let b = IntExpr::add(x(), IntExpr::Const(1));
        assert_eq!(a.normalize(), b.normalize());
        let six = IntExpr::bin(BinOp::Mul, IntExpr::Const(2), IntExpr::Const(3));
        assert_eq!(six.normalize(), IntExpr::Const(6));
        let neg = IntExpr::Neg(Box::new(IntExpr::Const(4)));
        assert_eq!(neg.normalize(), IntExpr::Const(-4));
    }

    #[test]
    fn normalize_keeps_cancelled_division_undefined() {
        let d = IntExpr::bin(BinOp::Div, x(), IntExpr::Const(0));
        let e = IntExpr::bin(BinOp::Sub, d.clone(), d);
        let n = e.normalize();
        assert_eq!(n.eval(&Interp::new().with("x", 3)), None);
        let z = IntExpr::bin(
            BinOp::Mul,
            IntExpr::Const(0),
            IntExpr::bin(BinOp::Div, x(), IntExpr::var("y")),
        );
        let n = z.normalize();
        assert_eq!(n.eval(&Interp::new().with("x", 3).with("y", 0)), None);
        assert_eq!(n.eval(&Interp::new().with("x", 3).with("y", 2)), Some(0));
    }

    #[test]
    fn solve_for_inverts_linear_items() {
        let i = Interp::new().with("k", 2);
        let e = IntExpr::add(x(), IntExpr::Const(1));
        assert_eq!(e.solve_for("x", 5, &i), Some(4));
        let e = IntExpr::bin(BinOp::Sub, IntExpr::var("k"), x());
        assert_eq!(e.solve_for("x", 5, &i), Some(-3));
        let e = IntExpr::bin(BinOp::Mul, IntExpr::Const(3), x());
        assert_eq!(e.solve_for("x", 9, &i), Some(3));
        assert_eq!(e.solve_for("x", 10, &i), None);
        let e = IntExpr::bin(BinOp::Mul, x(), x());
        assert_eq!(e.solve_for("x", 9, &i), None);
        let e = IntExpr::bin(BinOp::Div, x(), IntExpr::Const(2));
        assert_eq!(e.solve_for("x", 2, &i), None);
    }

    #[test]
    fn display_round_trips_precedence() {
        let e = IntExpr::bin(
            BinOp::Sub,
            x(),
            IntExpr::bin(BinOp::Sub, IntExpr::var("y"), IntExpr::Const(1)),
        );
        assert_eq!(e.to_string(), "x-(y-1)");
        let e = IntExpr::add(x(), IntExpr::Const(-3));
        assert_eq!(e.to_string(), "x+(-3)");
    }
}
