use std::fmt::Write;

use crate::model::{BinOp, Domain, EventDef, Expr, Machine, Param};

/// Canonical text of a machine; re-parses to a structurally equal machine.
pub fn pretty_print(m: &Machine) -> String {
    let mut out = String::new();
    write!(out, "machine {}", m.name).unwrap();
    if let Some(r) = &m.refines {
        write!(out, " refines {r}").unwrap();
    }
    out.push_str("\nvariables\n");
    for v in &m.variables {
        writeln!(out, "  {} : {};", v.name, domain(&v.domain)).unwrap();
    }
    if let Some(inv) = &m.invariant {
        writeln!(out, "invariant\n  {}", print_expr(inv)).unwrap();
    }
    out.push_str("init\n");
    for a in &m.init {
        writeln!(out, "  {} := {};", a.target, print_expr(&a.value)).unwrap();
    }
    out.push_str("events\n");
    for (i, e) in m.events.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        event(&mut out, e);
    }
    out.push_str("end\n");
    out
}

fn domain(d: &Domain) -> String {
    match d {
        Domain::Int { lo, hi } => format!("int {lo}..{hi}"),
        Domain::Enum(cs) => format!("enum {{{}}}", cs.join(", ")),
        Domain::Bool => "bool".to_string(),
    }
}

fn params(ps: &[Param]) -> String {
    ps.iter()
        .map(|p| format!("{} : {}", p.name, domain(&p.domain)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn event(out: &mut String, e: &EventDef) {
    write!(out, "  {}", e.name).unwrap();
    if let Some(r) = &e.refines {
        write!(out, " refines {}", r.abstract_event).unwrap();
        if !r.witnesses.is_empty() {
            let ws: Vec<_> = r
                .witnesses
                .iter()
                .map(|w| format!("{} := {}", w.param, print_expr(&w.value)))
                .collect();
            write!(out, " with {}", ws.join(", ")).unwrap();
        }
    }
    out.push_str(" ==\n");
    if !e.params.is_empty() {
        writeln!(out, "    any {}", params(&e.params)).unwrap();
    }
    if !e.choices.is_empty() {
        writeln!(out, "    choose {}", params(&e.choices)).unwrap();
    }
    let kw = if e.params.is_empty() && e.choices.is_empty() {
        "when"
    } else {
        "where"
    };
    writeln!(out, "    {kw} {}", print_expr(&e.guard)).unwrap();
    if e.actions.is_empty() {
        out.push_str("    then skip\n");
    } else {
        let acts: Vec<_> = e
            .actions
            .iter()
            .map(|a| format!("{} := {}", a.target, print_expr(&a.value)))
            .collect();
        writeln!(out, "    then {}", acts.join(" ||\n         ")).unwrap();
    }
    out.push_str("    end\n");
}

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const CMP: u8 = 5;
const ADD: u8 = 6;
const MUL: u8 = 7;
const ATOM: u8 = 8;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Int(n) if *n < 0 => ADD,
        Expr::Int(_) | Expr::Bool(_) | Expr::Name(_) => ATOM,
        Expr::Not(_) => NOT,
        Expr::In(..) => CMP,
        Expr::Binary(op, ..) => match op {
            BinOp::Implies => IMPLIES,
            BinOp::Or => OR,
            BinOp::And => AND,
            BinOp::Add | BinOp::Sub => ADD,
            BinOp::Mul => MUL,
            _ => CMP,
        },
    }
}

fn wrap(e: &Expr, parens: bool) -> String {
    if parens {
        format!("({})", print_expr(e))
    } else {
        print_expr(e)
    }
}

/// Minimal-parenthesis rendering of an expression.
pub fn print_expr(e: &Expr) -> String {
    match e {
        Expr::Int(n) => n.to_string(),
        Expr::Bool(b) => b.to_string(),
        Expr::Name(n) => n.clone(),
        Expr::Not(inner) => format!("not {}", wrap(inner, prec(inner) < NOT)),
        Expr::In(subject, items) => {
            let items: Vec<_> = items.iter().map(print_expr).collect();
            format!("{} in {{{}}}", wrap(subject, prec(subject) <= CMP), items.join(", "))
        }
        Expr::Binary(op, l, r) => {
            let p = prec(e);
            let (lp, rp) = match op {
                BinOp::Implies => (prec(l) <= p, prec(r) < p),
                BinOp::Or | BinOp::And | BinOp::Add | BinOp::Sub | BinOp::Mul => {
                    (prec(l) < p, prec(r) <= p)
                }
                _ => (prec(l) <= p, prec(r) <= p),
            };
            format!("{} {} {}", wrap(l, lp), op.symbol(), wrap(r, rp))
        }
    }
}
