use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use super::{Assignment, BinOp, Domain, EventDef, Expr, Item, Machine, Param, SourceSpan, Value};

/// A well-formedness problem found while checking a machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
    pub span: Option<SourceSpan>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.span {
            Some(span) => write!(f, "{span}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("machine `{machine}` is ill-formed:\n{}", render(.diagnostics))]
    Invalid {
        machine: String,
        diagnostics: Vec<Diagnostic>,
    },
}

fn render(ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| format!("  {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound identifier `{0}`")]
    Unbound(String),
    #[error("type mismatch: {0}")]
    Type(String),
}

/// Variable and parameter valuations for [`eval_expr`].
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    vars: BTreeMap<String, Value>,
    params: BTreeMap<String, Value>,
    constants: BTreeSet<String>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(mut self, name: &str, v: Value) -> Self {
        self.vars.insert(name.to_string(), v);
        self
    }

    pub fn param(mut self, name: &str, v: Value) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    /// Declares enumeration constants that bare identifiers may denote.
    pub fn constants<I, S>(mut self, cs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.constants.extend(cs.into_iter().map(Into::into));
        self
    }
}

/// Evaluates a surface expression directly, checking types as it goes.
///
/// Identifiers resolve to a parameter first, then a variable, then a declared
/// enumeration constant. This is the reference evaluator; exploration uses the
/// pre-checked [`CompiledExpr`] instead.
pub fn eval_expr(e: &Expr, env: &Bindings) -> Result<Value, EvalError> {
    let int = |v: Value| match v {
        Value::Int(n) => Ok(n),
        other => Err(EvalError::Type(format!("expected integer, found `{other}`"))),
    };
    let boolean = |v: Value| match v {
        Value::Bool(b) => Ok(b),
        other => Err(EvalError::Type(format!("expected boolean, found `{other}`"))),
    };
    Ok(match e {
        Expr::Int(n) => Value::Int(*n),
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Name(n) => {
            if let Some(v) = env.params.get(n).or_else(|| env.vars.get(n)) {
                v.clone()
            } else if env.constants.contains(n) {
                Value::Sym(n.clone())
            } else {
                return Err(EvalError::Unbound(n.clone()));
            }
        }
        Expr::Not(inner) => Value::Bool(!boolean(eval_expr(inner, env)?)?),
        Expr::Binary(op, l, r) => {
            let (lv, rv) = (eval_expr(l, env)?, eval_expr(r, env)?);
            match op {
                BinOp::Add => Value::Int(int(lv)?.wrapping_add(int(rv)?)),
                BinOp::Sub => Value::Int(int(lv)?.wrapping_sub(int(rv)?)),
                BinOp::Mul => Value::Int(int(lv)?.wrapping_mul(int(rv)?)),
                BinOp::Eq | BinOp::Ne => {
                    if std::mem::discriminant(&lv) != std::mem::discriminant(&rv) {
                        return Err(EvalError::Type(format!("cannot compare `{lv}` with `{rv}`")));
                    }
                    Value::Bool((lv == rv) == (*op == BinOp::Eq))
                }
                BinOp::Lt => Value::Bool(int(lv)? < int(rv)?),
                BinOp::Le => Value::Bool(int(lv)? <= int(rv)?),
                BinOp::Gt => Value::Bool(int(lv)? > int(rv)?),
                BinOp::Ge => Value::Bool(int(lv)? >= int(rv)?),
                BinOp::And => Value::Bool(boolean(lv)? & boolean(rv)?),
                BinOp::Or => Value::Bool(boolean(lv)? | boolean(rv)?),
                BinOp::Implies => Value::Bool(!boolean(lv)? | boolean(rv)?),
            }
        }
        Expr::In(subject, items) => {
            let v = eval_expr(subject, env)?;
            let mut found = false;
            for item in items {
                let iv = eval_expr(item, env)?;
                if std::mem::discriminant(&iv) != std::mem::discriminant(&v) {
                    return Err(EvalError::Type(format!("`{iv}` cannot be a member alongside `{v}`")));
                }
                found |= iv == v;
            }
            Value::Bool(found)
        }
    })
}

/// Expression with names resolved to state or argument slots.
#[derive(Debug, Clone, PartialEq)]
pub enum CompiledExpr {
    Lit(Value),
    Var(usize),
    /// Index into the event's arguments: parameters, then choices.
    Arg(usize),
    Binary(BinOp, Box<CompiledExpr>, Box<CompiledExpr>),
    Not(Box<CompiledExpr>),
    In(Box<CompiledExpr>, Vec<Value>),
}

impl CompiledExpr {
    /// Total over well-typed expressions, which checking guarantees.
    pub fn eval(&self, state: &[Value], args: &[Value]) -> Value {
        match self {
            CompiledExpr::Lit(v) => v.clone(),
            CompiledExpr::Var(i) => state[*i].clone(),
            CompiledExpr::Arg(i) => args[*i].clone(),
            CompiledExpr::Not(e) => Value::Bool(!e.eval_bool(state, args)),
            CompiledExpr::In(s, items) => {
                let v = s.eval(state, args);
                Value::Bool(items.contains(&v))
            }
            CompiledExpr::Binary(op, l, r) => match op {
                BinOp::And => Value::Bool(l.eval_bool(state, args) && r.eval_bool(state, args)),
                BinOp::Or => Value::Bool(l.eval_bool(state, args) || r.eval_bool(state, args)),
                BinOp::Implies => {
                    Value::Bool(!l.eval_bool(state, args) || r.eval_bool(state, args))
                }
                BinOp::Eq => Value::Bool(l.eval(state, args) == r.eval(state, args)),
                BinOp::Ne => Value::Bool(l.eval(state, args) != r.eval(state, args)),
                _ => {
                    let (a, b) = (l.eval_int(state, args), r.eval_int(state, args));
                    match op {
                        BinOp::Add => Value::Int(a.wrapping_add(b)),
                        BinOp::Sub => Value::Int(a.wrapping_sub(b)),
                        BinOp::Mul => Value::Int(a.wrapping_mul(b)),
                        BinOp::Lt => Value::Bool(a < b),
                        BinOp::Le => Value::Bool(a <= b),
                        BinOp::Gt => Value::Bool(a > b),
                        BinOp::Ge => Value::Bool(a >= b),
                        _ => unreachable!(),
                    }
                }
            },
        }
    }

    pub fn eval_bool(&self, state: &[Value], args: &[Value]) -> bool {
        match self.eval(state, args) {
            Value::Bool(b) => b,
            v => unreachable!("checked boolean expression produced `{v}`"),
        }
    }

    fn eval_int(&self, state: &[Value], args: &[Value]) -> i64 {
        match self.eval(state, args) {
            Value::Int(n) => n,
            v => unreachable!("checked integer expression produced `{v}`"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompiledEvent {
    pub name: String,
    pub params: Vec<Param>,
    pub choices: Vec<Param>,
    pub guard: CompiledExpr,
    pub actions: Vec<(usize, CompiledExpr)>,
    pub refines: Option<String>,
}

impl CompiledEvent {
    pub fn is_new(&self, machine_refines: bool) -> bool {
        machine_refines && self.refines.is_none()
    }
}

/// A machine that passed [`validate_machine`], ready for exploration.
#[derive(Debug, Clone)]
pub struct CompiledMachine {
    pub source: Machine,
    pub variables: Vec<String>,
    pub domains: Vec<Domain>,
    pub init: Vec<Value>,
    pub events: Vec<CompiledEvent>,
    pub invariant: Option<CompiledExpr>,
}

impl CompiledMachine {
    pub fn new(m: &Machine) -> Result<Self, ModelError> {
        let mut checker = Checker::new(m);
        let compiled = checker.run();
        match compiled {
            Some(c) if checker.diagnostics.is_empty() => Ok(c),
            _ => Err(ModelError::Invalid {
                machine: m.name.clone(),
                diagnostics: checker.diagnostics,
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.source.name
    }

    /// Names of events that refine `skip`.
    pub fn new_event_names(&self) -> BTreeSet<String> {
        self.source.new_events().map(|e| e.name.clone()).collect()
    }
}

/// Checks every machine and event invariant. Empty means well formed.
pub fn validate_machine(m: &Machine) -> Vec<Diagnostic> {
    let mut checker = Checker::new(m);
    checker.run();
    checker.diagnostics
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Ty {
    Int,
    Bool,
    Enum(Vec<String>),
    /// A bare enumeration constant; its enumeration comes from context.
    Const(String),
}

impl Ty {
    pub(crate) fn of_domain(d: &Domain) -> Ty {
        match d {
            Domain::Int { .. } => Ty::Int,
            Domain::Bool => Ty::Bool,
            Domain::Enum(cs) => Ty::Enum(cs.clone()),
        }
    }

    /// Whether values of the two types may be compared for equality.
    pub(crate) fn compatible(&self, other: &Ty) -> bool {
        match (self, other) {
            (Ty::Int, Ty::Int) | (Ty::Bool, Ty::Bool) | (Ty::Const(_), Ty::Const(_)) => true,
            (Ty::Enum(a), Ty::Enum(b)) => a == b,
            (Ty::Enum(cs), Ty::Const(c)) | (Ty::Const(c), Ty::Enum(cs)) => cs.contains(c),
            _ => false,
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Int => f.write_str("int"),
            Ty::Bool => f.write_str("bool"),
            Ty::Enum(cs) => write!(f, "enum {{{}}}", cs.join(", ")),
            Ty::Const(c) => write!(f, "constant {c}"),
        }
    }
}

/// Name resolution environment for one expression.
pub(crate) struct Scope<'a> {
    pub args: &'a [Param],
    pub vars: Option<&'a [super::Variable]>,
    pub constants: &'a HashSet<String>,
}

impl Scope<'_> {
    pub(crate) fn compile(&self, e: &Expr) -> Result<(CompiledExpr, Ty), String> {
        Ok(match e {
            Expr::Int(n) => (CompiledExpr::Lit(Value::Int(*n)), Ty::Int),
            Expr::Bool(b) => (CompiledExpr::Lit(Value::Bool(*b)), Ty::Bool),
            Expr::Name(n) => {
                if let Some(i) = self.args.iter().position(|p| &p.name == n) {
                    (CompiledExpr::Arg(i), Ty::of_domain(&self.args[i].domain))
                } else if let Some((i, v)) = self
                    .vars
                    .and_then(|vs| vs.iter().enumerate().find(|(_, v)| &v.name == n))
                {
                    (CompiledExpr::Var(i), Ty::of_domain(&v.domain))
                } else if self.constants.contains(n) {
                    (CompiledExpr::Lit(Value::Sym(n.clone())), Ty::Const(n.clone()))
                } else {
                    return Err(format!("unknown identifier {n}"));
                }
            }
            Expr::Not(inner) => {
                let (c, t) = self.compile(inner)?;
                expect(&t, &Ty::Bool, "operand of `not`")?;
                (CompiledExpr::Not(Box::new(c)), Ty::Bool)
            }
            Expr::Binary(op, l, r) => {
                let (lc, lt) = self.compile(l)?;
                let (rc, rt) = self.compile(r)?;
                let ty = if op.is_arithmetic() {
                    expect(&lt, &Ty::Int, op.symbol())?;
                    expect(&rt, &Ty::Int, op.symbol())?;
                    Ty::Int
                } else if op.is_connective() {
                    expect(&lt, &Ty::Bool, op.symbol())?;
                    expect(&rt, &Ty::Bool, op.symbol())?;
                    Ty::Bool
                } else if matches!(op, BinOp::Eq | BinOp::Ne) {
                    if !lt.compatible(&rt) {
                        return Err(format!("cannot compare {lt} with {rt}"));
                    }
                    Ty::Bool
                } else {
                    expect(&lt, &Ty::Int, op.symbol())?;
                    expect(&rt, &Ty::Int, op.symbol())?;
                    Ty::Bool
                };
                (CompiledExpr::Binary(*op, Box::new(lc), Box::new(rc)), ty)
            }
            Expr::In(subject, items) => {
                let (sc, st) = self.compile(subject)?;
                let mut values = Vec::with_capacity(items.len());
                for item in items {
                    let (ic, it) = self.compile(item)?;
                    let CompiledExpr::Lit(v) = ic else {
                        return Err("set members must be literals".into());
                    };
                    if !st.compatible(&it) {
                        return Err(format!("set member {v} does not fit {st}"));
                    }
                    values.push(v);
                }
                (CompiledExpr::In(Box::new(sc), values), Ty::Bool)
            }
        })
    }
}

fn expect(found: &Ty, want: &Ty, what: &str) -> Result<(), String> {
    if found == want {
        Ok(())
    } else {
        Err(format!("`{what}` expects {want}, found {found}"))
    }
}

/// Whether an expression of type `ty` may be stored in `domain`.
pub(crate) fn assignable(domain: &Domain, ty: &Ty) -> bool {
    match (domain, ty) {
        (Domain::Int { .. }, Ty::Int) | (Domain::Bool, Ty::Bool) => true,
        (Domain::Enum(cs), Ty::Enum(other)) => cs == other,
        (Domain::Enum(cs), Ty::Const(c)) => cs.contains(c),
        _ => false,
    }
}

/// Every enumeration constant mentioned in any domain of the machine.
pub(crate) fn machine_constants(m: &Machine) -> HashSet<String> {
    let mut out = HashSet::new();
    let mut add = |d: &Domain| {
        if let Domain::Enum(cs) = d {
            out.extend(cs.iter().cloned());
        }
    };
    m.variables.iter().for_each(|v| add(&v.domain));
    for e in &m.events {
        e.params.iter().chain(&e.choices).for_each(|p| add(&p.domain));
    }
    out
}

struct Checker<'a> {
    m: &'a Machine,
    constants: HashSet<String>,
    diagnostics: Vec<Diagnostic>,
}

impl<'a> Checker<'a> {
    fn new(m: &'a Machine) -> Self {
        Checker {
            m,
            constants: machine_constants(m),
            diagnostics: Vec::new(),
        }
    }

    fn report(&mut self, item: Item, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            message: message.into(),
            span: self.m.source.get(item).cloned(),
        });
    }

    fn check_domain(&mut self, item: Item, owner: &str, d: &Domain) {
        match d {
            Domain::Int { lo, hi } if lo > hi => {
                self.report(item, format!("empty integer range {lo}..{hi} for {owner}"))
            }
            Domain::Enum(cs) => {
                if cs.is_empty() {
                    self.report(item, format!("enumeration for {owner} has no constants"));
                }
                let mut seen = HashSet::new();
                for c in cs {
                    if !seen.insert(c) {
                        self.report(item, format!("duplicate enumeration constant {c} for {owner}"));
                    }
                }
            }
            _ => {}
        }
    }

    fn run(&mut self) -> Option<CompiledMachine> {
        let m = self.m;
        let constants = self.constants.clone();
        let mut ok = true;

        let mut var_names = HashSet::new();
        for (i, v) in m.variables.iter().enumerate() {
            if !var_names.insert(v.name.as_str()) {
                self.report(Item::Variable(i), format!("duplicate variable {}", v.name));
                ok = false;
            }
            self.check_domain(Item::Variable(i), &v.name, &v.domain);
            if self.constants.contains(&v.name) {
                self.report(
                    Item::Variable(i),
                    format!("variable {} clashes with an enumeration constant", v.name),
                );
            }
        }

        let scope_vars = Scope {
            args: &[],
            vars: Some(&m.variables),
            constants: &constants,
        };
        let invariant = match &m.invariant {
            None => None,
            Some(inv) => match scope_vars.compile(inv) {
                Ok((c, Ty::Bool)) => Some(c),
                Ok((_, t)) => {
                    self.report(Item::Invariant, format!("invariant must be boolean, found {t}"));
                    ok = false;
                    None
                }
                Err(msg) => {
                    self.report(Item::Invariant, format!("invariant: {msg}"));
                    ok = false;
                    None
                }
            },
        };

        let init = self.check_init();
        ok &= init.is_some();

        let mut events = Vec::with_capacity(m.events.len());
        let mut event_names = HashSet::new();
        for (ei, e) in m.events.iter().enumerate() {
            if !event_names.insert(e.name.as_str()) {
                self.report(Item::Event(ei), format!("duplicate event {}", e.name));
            }
            if e.refines.is_some() && m.refines.is_none() {
                self.report(
                    Item::Refines(ei),
                    format!("event {} refines an event but machine {} refines no machine", e.name, m.name),
                );
            }
            match self.check_event(ei, e) {
                Some(ce) => events.push(ce),
                None => ok = false,
            }
        }

        if !ok {
            return None;
        }
        Some(CompiledMachine {
            source: m.clone(),
            variables: m.variables.iter().map(|v| v.name.clone()).collect(),
            domains: m.variables.iter().map(|v| v.domain.clone()).collect(),
            init: init?,
            events,
            invariant,
        })
    }

    fn check_init(&mut self) -> Option<Vec<Value>> {
        let m = self.m;
        let constants = self.constants.clone();
        let mut values: Vec<Option<Value>> = vec![None; m.variables.len()];
        let mut ok = true;
        let no_vars = Scope {
            args: &[],
            vars: None,
            constants: &constants,
        };
        for (i, Assignment { target, value }) in m.init.iter().enumerate() {
            let Some(vi) = m.variables.iter().position(|v| &v.name == target) else {
                self.report(Item::Init(i), format!("unknown assignment target {target} in init"));
                ok = false;
                continue;
            };
            if values[vi].is_some() {
                self.report(Item::Init(i), format!("variable {target} initialised twice"));
                ok = false;
                continue;
            }
            let domain = &m.variables[vi].domain;
            match no_vars.compile(value) {
                Ok((c, ty)) if assignable(domain, &ty) => {
                    let v = c.eval(&[], &[]);
                    if domain.contains(&v) {
                        values[vi] = Some(v);
                    } else {
                        self.report(Item::Init(i), format!("initial value {v} of {target} is outside its domain"));
                        ok = false;
                    }
                }
                Ok((_, ty)) => {
                    self.report(Item::Init(i), format!("cannot initialise {target} with {ty}"));
                    ok = false;
                }
                Err(msg) => {
                    self.report(Item::Init(i), format!("init of {target} must be a literal: {msg}"));
                    ok = false;
                }
            }
        }
        for (vi, v) in values.iter().enumerate() {
            if v.is_none() && ok {
                self.report(
                    Item::Machine,
                    format!("init incomplete: variable {} is not initialised", m.variables[vi].name),
                );
            }
        }
        let values: Option<Vec<Value>> = values.into_iter().collect();
        if ok {
            values
        } else {
            None
        }
    }

    fn check_event(&mut self, ei: usize, e: &EventDef) -> Option<CompiledEvent> {
        let m = self.m;
        let constants = self.constants.clone();
        let mut ok = true;
        let args: Vec<Param> = e.params.iter().chain(&e.choices).cloned().collect();
        let mut arg_names = HashSet::new();
        for (pi, p) in args.iter().enumerate() {
            let item = if pi < e.params.len() {
                Item::Param(ei, pi)
            } else {
                Item::Choice(ei, pi - e.params.len())
            };
            self.check_domain(item, &p.name, &p.domain);
            if !arg_names.insert(p.name.as_str()) {
                self.report(item, format!("duplicate parameter {} in event {}", p.name, e.name));
                ok = false;
            }
            if m.variable(&p.name).is_some() {
                self.report(item, format!("parameter {} of event {} shadows a variable", p.name, e.name));
                ok = false;
            }
            if self.constants.contains(&p.name) {
                self.report(item, format!("parameter {} clashes with an enumeration constant", p.name));
                ok = false;
            }
        }
        if !ok {
            return None;
        }
        let scope = Scope {
            args: &args,
            vars: Some(&m.variables),
            constants: &constants,
        };
        let guard = match scope.compile(&e.guard) {
            Ok((c, Ty::Bool)) => Some(c),
            Ok((_, t)) => {
                self.report(Item::Guard(ei), format!("guard of {} must be boolean, found {t}", e.name));
                None
            }
            Err(msg) => {
                self.report(Item::Guard(ei), format!("guard of {}: {msg}", e.name));
                None
            }
        };
        let mut actions = Vec::with_capacity(e.actions.len());
        let mut targets = HashSet::new();
        for (ai, a) in e.actions.iter().enumerate() {
            let Some(vi) = m.variables.iter().position(|v| v.name == a.target) else {
                self.report(
                    Item::Action(ei, ai),
                    format!("unknown assignment target {} in event {}", a.target, e.name),
                );
                ok = false;
                continue;
            };
            if !targets.insert(vi) {
                self.report(
                    Item::Action(ei, ai),
                    format!("variable {} assigned twice in event {}", a.target, e.name),
                );
                ok = false;
            }
            match scope.compile(&a.value) {
                Ok((c, ty)) if assignable(&m.variables[vi].domain, &ty) => actions.push((vi, c)),
                Ok((_, ty)) => {
                    self.report(
                        Item::Action(ei, ai),
                        format!("cannot assign {ty} to {} in event {}", a.target, e.name),
                    );
                    ok = false;
                }
                Err(msg) => {
                    self.report(Item::Action(ei, ai), format!("action on {} in {}: {msg}", a.target, e.name));
                    ok = false;
                }
            }
        }
        if !ok {
            return None;
        }
        Some(CompiledEvent {
            name: e.name.clone(),
            params: e.params.clone(),
            choices: e.choices.clone(),
            guard: guard?,
            actions,
            refines: e.refines.as_ref().map(|r| r.abstract_event.clone()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_machine;

    fn int(n: i64) -> Value {
        Value::Int(n)
    }

    #[test]
    fn evaluates_vending_guard() {
        let e = Expr::bin(
            BinOp::Le,
            Expr::bin(BinOp::Add, Expr::name("coin"), Expr::Int(1)),
            Expr::name("stock"),
        );
        let env = Bindings::new().var("stock", int(3)).var("coin", int(0));
        assert_eq!(eval_expr(&e, &env), Ok(Value::Bool(true)));
    }

    #[test]
    fn evaluates_negation_and_membership() {
        let neg = Expr::not(Expr::bin(BinOp::Eq, Expr::name("x"), Expr::Int(1)));
        assert_eq!(
            eval_expr(&neg, &Bindings::new().var("x", int(1))),
            Ok(Value::Bool(false))
        );
        let member = Expr::In(Box::new(Expr::name("npc")), vec![Expr::Int(1), Expr::Int(2)]);
        assert_eq!(
            eval_expr(&member, &Bindings::new().param("npc", int(2))),
            Ok(Value::Bool(true))
        );
    }

    #[test]
    fn eval_reports_unbound_and_type_errors() {
        let e = Expr::bin(BinOp::Add, Expr::name("y"), Expr::Int(1));
        assert_eq!(
            eval_expr(&e, &Bindings::new()),
            Err(EvalError::Unbound("y".into()))
        );
        let e = Expr::bin(BinOp::And, Expr::Int(1), Expr::Bool(true));
        assert!(matches!(eval_expr(&e, &Bindings::new()), Err(EvalError::Type(_))));
    }

    #[test]
    fn params_shadow_nothing_and_resolve_first() {
        let env = Bindings::new()
            .var("d", Value::Sym("soda".into()))
            .constants(["soda", "water"]);
        let e = Expr::bin(BinOp::Eq, Expr::name("d"), Expr::name("water"));
        assert_eq!(eval_expr(&e, &env), Ok(Value::Bool(false)));
    }

    fn diagnostics(src: &str) -> Vec<String> {
        let m = parse_machine(src).expect("parses");
        validate_machine(&m).into_iter().map(|d| d.message).collect()
    }

    #[test]
    fn unknown_assignment_target() {
        let ds = diagnostics(
            "machine m variables x : int 0..1; init x := 0; events
               e == when x = 0 then z := 1 end
             end",
        );
        assert_eq!(ds.len(), 1);
        assert!(ds[0].starts_with("unknown assignment target z"), "{ds:?}");
    }

    #[test]
    fn incomplete_init() {
        let ds = diagnostics(
            "machine m variables x : int 0..1; y : bool; init x := 0; events end",
        );
        assert_eq!(ds.len(), 1);
        assert!(ds[0].starts_with("init incomplete"), "{ds:?}");
    }

    #[test]
    fn reports_type_errors_and_clashes() {
        let ds = diagnostics(
            "machine m variables x : int 0..1; c : enum {a, b}; init x := 0; c := a; events
               e == any x : bool where x + 1 = 2 then c := x end
               f == when c = 3 then c := b end
               g == when c = a then x := a end
             end",
        );
        assert!(ds.iter().any(|d| d.contains("shadows a variable")), "{ds:?}");
        assert!(ds.iter().any(|d| d.contains("cannot compare")), "{ds:?}");
        assert!(ds.iter().any(|d| d.contains("cannot assign")), "{ds:?}");
    }

    #[test]
    fn refines_clause_needs_refining_machine() {
        let ds = diagnostics(
            "machine m variables x : int 0..1; init x := 0; events
               e refines e == when true then x := 1 end
             end",
        );
        assert_eq!(ds.len(), 1);
        assert!(ds[0].contains("refines no machine"));
    }

    #[test]
    fn diagnostics_carry_locations() {
        let m = parse_machine("machine m\nvariables x : int 0..1;\ninit x := 0;\nevents\n  e == when true then z := 1 end\nend")
            .unwrap();
        let ds = validate_machine(&m);
        let span = ds[0].span.as_ref().expect("span");
        assert_eq!((span.line, span.column), (5, 23));
    }

    #[test]
    fn out_of_domain_init_rejected() {
        let ds = diagnostics("machine m variables x : int 0..1; init x := 4; events end");
        assert!(ds[0].contains("outside its domain"));
    }
}
