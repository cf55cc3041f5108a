//! Guarded-event machines: abstract syntax, typing and evaluation.
//!
//! A [`Machine`] is the syntax tree produced by the parser. Before it can be
//! explored it is checked and lowered into a [`CompiledMachine`], where names
//! are resolved to variable/parameter slots and every expression is known to
//! be well typed, so evaluation during exploration cannot fail.

mod check;
mod link;

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use check::{
    eval_expr, validate_machine, Bindings, CompiledEvent, CompiledExpr, CompiledMachine,
    Diagnostic, EvalError, ModelError,
};
pub use link::{build_refinement_link, LinkError, ParamSource, PsiEntry, RefinementLink};

/// A runtime value. Enumeration constants are carried by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Sym(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

/// Finite value domain of a variable or parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Domain {
    Int { lo: i64, hi: i64 },
    Enum(Vec<String>),
    Bool,
}

impl Domain {
    /// All members in canonical order: ascending integers, declaration order
    /// for enumerations, `false` before `true`.
    pub fn values(&self) -> Vec<Value> {
        match self {
            Domain::Int { lo, hi } => (*lo..=*hi).map(Value::Int).collect(),
            Domain::Enum(cs) => cs.iter().cloned().map(Value::Sym).collect(),
            Domain::Bool => vec![Value::Bool(false), Value::Bool(true)],
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Domain::Int { lo, hi }, Value::Int(n)) => lo <= n && n <= hi,
            (Domain::Enum(cs), Value::Sym(s)) => cs.iter().any(|c| c == s),
            (Domain::Bool, Value::Bool(_)) => true,
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Domain::Int { lo, hi } => (hi - lo + 1).max(0) as usize,
            Domain::Enum(cs) => cs.len(),
            Domain::Bool => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "=",
            BinOp::Ne => "/=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "/\\",
            BinOp::Or => "\\/",
            BinOp::Implies => "=>",
        }
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul)
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }

    pub fn is_connective(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies)
    }
}

/// Surface expression. Identifiers stay unresolved (`Name`) until checking,
/// where they become a parameter, a variable or an enumeration constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Name(String),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    /// Membership in a finite set of literals.
    In(Box<Expr>, Vec<Expr>),
}

impl Expr {
    pub fn name(s: impl Into<String>) -> Expr {
        Expr::Name(s.into())
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    /// Left-nested conjunction; `true` for an empty list.
    pub fn conj(parts: impl IntoIterator<Item = Expr>) -> Expr {
        parts
            .into_iter()
            .reduce(|acc, e| Expr::bin(BinOp::And, acc, e))
            .unwrap_or(Expr::Bool(true))
    }

    /// Identifiers occurring in the expression, in first-occurrence order.
    pub fn names(&self) -> Vec<&str> {
        fn walk<'a>(e: &'a Expr, out: &mut Vec<&'a str>) {
            match e {
                Expr::Int(_) | Expr::Bool(_) => {}
                Expr::Name(n) => {
                    if !out.contains(&n.as_str()) {
                        out.push(n)
                    }
                }
                Expr::Binary(_, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Expr::Not(e) => walk(e, out),
                Expr::In(s, items) => {
                    walk(s, out);
                    items.iter().for_each(|i| walk(i, out));
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub target: String,
    pub value: Expr,
}

/// Binds an abstract parameter that has no same-named concrete parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub param: String,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinesClause {
    pub abstract_event: String,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDef {
    pub name: String,
    /// Parameters that are part of the event label.
    pub params: Vec<Param>,
    /// Internal choices (`choose`): enumerated like parameters but not
    /// observable in the label. This is how a nondeterministic assignment
    /// such as `x :: S` is written.
    pub choices: Vec<Param>,
    pub guard: Expr,
    pub actions: Vec<Assignment>,
    pub refines: Option<RefinesClause>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    pub name: String,
    pub refines: Option<String>,
    pub variables: Vec<Variable>,
    pub invariant: Option<Expr>,
    pub init: Vec<Assignment>,
    pub events: Vec<EventDef>,
    /// Where each item came from. Not part of structural equality.
    pub source: SourceMap,
}

impl Machine {
    pub fn event(&self, name: &str) -> Option<&EventDef> {
        self.events.iter().find(|e| e.name == name)
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    /// Events introduced by this machine that refine `skip`.
    pub fn new_events(&self) -> impl Iterator<Item = &EventDef> {
        let refining = self.refines.is_some();
        self.events
            .iter()
            .filter(move |e| refining && e.refines.is_none())
    }
}

/// 1-based location of a syntactic item.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file: Option<PathBuf>,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{}:", file.display())?;
        }
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Syntactic items a diagnostic can point at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Item {
    Machine,
    Variable(usize),
    Invariant,
    Init(usize),
    Event(usize),
    Param(usize, usize),
    Choice(usize, usize),
    Guard(usize),
    Action(usize, usize),
    Refines(usize),
    Witness(usize, usize),
}

#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    spans: HashMap<Item, SourceSpan>,
}

impl SourceMap {
    pub fn insert(&mut self, item: Item, span: SourceSpan) {
        self.spans.insert(item, span);
    }

    pub fn get(&self, item: Item) -> Option<&SourceSpan> {
        self.spans.get(&item)
    }

    pub fn set_file(&mut self, file: &std::path::Path) {
        for span in self.spans.values_mut() {
            span.file = Some(file.to_path_buf());
        }
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }
}

// Locations are metadata: a pretty-printed machine re-parses to an equal
// machine even though every span moved.
impl PartialEq for SourceMap {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for SourceMap {}
