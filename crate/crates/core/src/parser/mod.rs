//! Reader and printer for the `.ebm` machine language.
//!
//! ```text
//! machine ID [refines ID]
//! variables { ID : domain ; }+
//! [invariant expr]
//! init { ID := literal ; }
//! events { event }
//! end
//!
//! event  ::= ID [refines ID [with ID := expr {, ID := expr}]] ==
//!            [any params] [choose params] [(when | where) expr]
//!            then (skip | ID := expr {|| ID := expr}) end
//! domain ::= int lo..hi | enum {c1, ...} | bool
//! ```
//!
//! Expression operators, loosest first: `=>` (right associative), `\/`,
//! `/\`, `not`, comparisons (`= /= < <= > >=`, `in {..}`), `+ -`, `*`.
//! Comments run from `//` to the end of the line.

mod lexer;
mod print;

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::model::{
    Assignment, BinOp, Domain, EventDef, Expr, Item, Machine, Param, RefinesClause, SourceMap,
    SourceSpan, Variable, Witness,
};
use lexer::{tokenize, Kw, Tok, Token};

pub use print::{pretty_print, print_expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

impl ParseError {
    pub(crate) fn at(line: usize, column: usize, length: usize, message: impl Into<String>) -> Self {
        ParseError {
            message: message.into(),
            span: SourceSpan {
                file: None,
                line,
                column,
                length,
            },
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

/// Parses one machine. Total: any input yields a machine or an error.
pub fn parse_machine(text: &str) -> Result<Machine, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        source: SourceMap::default(),
    };
    p.machine()
}

/// Parses a file, recording its path in every source location.
pub fn parse_file(path: &Path, text: &str) -> Result<Machine, ParseError> {
    match parse_machine(text) {
        Ok(mut m) => {
            m.source.set_file(path);
            Ok(m)
        }
        Err(mut e) => {
            e.span.file = Some(path.to_path_buf());
            Err(e)
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    source: SourceMap,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn here(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let t = self.here();
        ParseError::at(
            t.line,
            t.column,
            t.len,
            format!("expected {expected}, found {}", t.tok.describe()),
        )
    }

    fn eat_kw(&mut self, kw: Kw) -> bool {
        if *self.peek() == Tok::Kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(x) if *x == s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: Kw, what: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&format!("`{s}`")))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Token)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump())),
            _ => Err(self.error(what)),
        }
    }

    /// Span from `start` to the end of the previous token.
    fn span_from(&self, start: &Token) -> SourceSpan {
        let last = &self.tokens[self.pos.saturating_sub(1)];
        SourceSpan {
            file: None,
            line: start.line,
            column: start.column,
            length: (last.offset + last.len).saturating_sub(start.offset),
        }
    }

    fn duplicate(tok: &Token, what: &str, name: &str) -> ParseError {
        ParseError::at(tok.line, tok.column, tok.len, format!("duplicate {what} `{name}`"))
    }

    fn machine(&mut self) -> PResult<Machine> {
        self.expect_kw(Kw::Machine, "`machine`")?;
        let (name, name_tok) = self.ident("machine name")?;
        self.source.insert(Item::Machine, name_tok.span());
        let refines = if self.eat_kw(Kw::Refines) {
            Some(self.ident("name of the refined machine")?.0)
        } else {
            None
        };

        self.expect_kw(Kw::Variables, "`variables`")?;
        let mut variables = Vec::new();
        let mut seen = HashSet::new();
        loop {
            let (vname, tok) = self.ident("variable declaration")?;
            if !seen.insert(vname.clone()) {
                return Err(Self::duplicate(&tok, "variable", &vname));
            }
            self.expect_sym(":")?;
            let domain = self.domain()?;
            self.expect_sym(";")?;
            self.source.insert(Item::Variable(variables.len()), self.span_from(&tok));
            variables.push(Variable { name: vname, domain });
            if !matches!(self.peek(), Tok::Ident(_)) {
                break;
            }
        }

        let invariant = if self.eat_kw(Kw::Invariant) {
            let start = self.here().clone();
            let e = self.expr()?;
            self.source.insert(Item::Invariant, self.span_from(&start));
            Some(e)
        } else {
            None
        };

        self.expect_kw(Kw::Init, "`init`")?;
        let mut init = Vec::new();
        while let Tok::Ident(_) = self.peek() {
            let (target, tok) = self.ident("variable")?;
            self.expect_sym(":=")?;
            let value = self.expr()?;
            self.expect_sym(";")?;
            self.source.insert(Item::Init(init.len()), self.span_from(&tok));
            init.push(Assignment { target, value });
        }

        self.expect_kw(Kw::Events, "`events`")?;
        let mut events: Vec<EventDef> = Vec::new();
        let mut names = HashSet::new();
        while let Tok::Ident(_) = self.peek() {
            let tok = self.here().clone();
            let ev = self.event(events.len())?;
            if !names.insert(ev.name.clone()) {
                return Err(Self::duplicate(&tok, "event", &ev.name));
            }
            events.push(ev);
        }
        self.expect_kw(Kw::End, "event or `end`")?;
        if *self.peek() != Tok::Eof {
            return Err(self.error("end of input"));
        }

        Ok(Machine {
            name,
            refines,
            variables,
            invariant,
            init,
            events,
            source: std::mem::take(&mut self.source),
        })
    }

    fn int_literal(&mut self) -> PResult<i64> {
        let negative = self.eat_sym("-");
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(if negative { -n } else { n })
            }
            _ => Err(self.error("integer")),
        }
    }

    fn domain(&mut self) -> PResult<Domain> {
        if self.eat_kw(Kw::Int) {
            let lo = self.int_literal()?;
            self.expect_sym("..")?;
            let hi = self.int_literal()?;
            Ok(Domain::Int { lo, hi })
        } else if self.eat_kw(Kw::Enum) {
            self.expect_sym("{")?;
            let mut cs = Vec::new();
            loop {
                let (c, tok) = self.ident("enumeration constant")?;
                if cs.contains(&c) {
                    return Err(Self::duplicate(&tok, "enumeration constant", &c));
                }
                cs.push(c);
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym("}")?;
            Ok(Domain::Enum(cs))
        } else if self.eat_kw(Kw::Bool) {
            Ok(Domain::Bool)
        } else {
            Err(self.error("domain (`int lo..hi`, `enum {..}` or `bool`)"))
        }
    }

    fn params(&mut self, event: usize, choices: bool, taken: &mut HashSet<String>) -> PResult<Vec<Param>> {
        let mut out = Vec::new();
        loop {
            let (name, tok) = self.ident("parameter name")?;
            if !taken.insert(name.clone()) {
                return Err(Self::duplicate(&tok, "parameter", &name));
            }
            self.expect_sym(":")?;
            let domain = self.domain()?;
            let item = if choices {
                Item::Choice(event, out.len())
            } else {
                Item::Param(event, out.len())
            };
            self.source.insert(item, self.span_from(&tok));
            out.push(Param { name, domain });
            let comma = self.eat_sym(",");
            let more = matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Sym(":");
            if !more {
                if comma {
                    return Err(self.error("parameter"));
                }
                break;
            }
        }
        Ok(out)
    }

    fn event(&mut self, index: usize) -> PResult<EventDef> {
        let (name, name_tok) = self.ident("event name")?;
        self.source.insert(Item::Event(index), name_tok.span());
        let refines = if *self.peek() == Tok::Kw(Kw::Refines) {
            let start = self.bump();
            let (abstract_event, _) = self.ident("abstract event name")?;
            let mut witnesses = Vec::new();
            if self.eat_kw(Kw::With) {
                loop {
                    let (param, tok) = self.ident("witness parameter")?;
                    self.expect_sym(":=")?;
                    let value = self.expr()?;
                    self.source
                        .insert(Item::Witness(index, witnesses.len()), self.span_from(&tok));
                    witnesses.push(Witness { param, value });
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.source.insert(Item::Refines(index), self.span_from(&start));
            Some(RefinesClause {
                abstract_event,
                witnesses,
            })
        } else {
            None
        };
        self.expect_sym("==")?;

        let mut taken = HashSet::new();
        let params = if self.eat_kw(Kw::Any) {
            self.params(index, false, &mut taken)?
        } else {
            Vec::new()
        };
        let choices = if self.eat_kw(Kw::Choose) {
            self.params(index, true, &mut taken)?
        } else {
            Vec::new()
        };
        let guard = if self.eat_kw(Kw::When) || self.eat_kw(Kw::Where) {
            let start = self.here().clone();
            let g = self.expr()?;
            self.source.insert(Item::Guard(index), self.span_from(&start));
            g
        } else {
            self.source.insert(Item::Guard(index), name_tok.span());
            Expr::Bool(true)
        };

        self.expect_kw(Kw::Then, "`when`, `where` or `then`")?;
        let mut actions = Vec::new();
        if !self.eat_kw(Kw::Skip) && matches!(self.peek(), Tok::Ident(_)) {
            loop {
                let (target, tok) = self.ident("assignment target")?;
                self.expect_sym(":=")?;
                let value = self.expr()?;
                self.source
                    .insert(Item::Action(index, actions.len()), self.span_from(&tok));
                actions.push(Assignment { target, value });
                if !self.eat_sym("||") {
                    break;
                }
            }
        }
        self.expect_kw(Kw::End, "`||` or `end`")?;
        Ok(EventDef {
            name,
            params,
            choices,
            guard,
            actions,
            refines,
        })
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.disjunction()?;
        if self.eat_sym("=>") {
            let rhs = self.expr()?;
            Ok(Expr::bin(BinOp::Implies, lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> PResult<Expr> {
        let mut e = self.conjunction()?;
        while self.eat_sym("\\/") {
            e = Expr::bin(BinOp::Or, e, self.conjunction()?);
        }
        Ok(e)
    }

    fn conjunction(&mut self) -> PResult<Expr> {
        let mut e = self.negation()?;
        while self.eat_sym("/\\") {
            e = Expr::bin(BinOp::And, e, self.negation()?);
        }
        Ok(e)
    }

    fn negation(&mut self) -> PResult<Expr> {
        if self.eat_kw(Kw::Not) {
            Ok(Expr::not(self.negation()?))
        } else {
            self.comparison()
        }
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        if self.eat_kw(Kw::In) {
            self.expect_sym("{")?;
            let mut items = Vec::new();
            if !self.eat_sym("}") {
                loop {
                    items.push(self.set_member()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym("}")?;
            }
            return Ok(Expr::In(Box::new(lhs), items));
        }
        let op = match self.peek() {
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("/=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive()?;
        Ok(Expr::bin(op, lhs, rhs))
    }

    fn set_member(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Kw(Kw::True) => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Expr::Name(s))
            }
            Tok::Int(_) | Tok::Sym("-") => Ok(Expr::Int(self.int_literal()?)),
            _ => Err(self.error("literal set member")),
        }
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut e = self.multiplicative()?;
        loop {
            let op = if self.eat_sym("+") {
                BinOp::Add
            } else if self.eat_sym("-") {
                BinOp::Sub
            } else {
                return Ok(e);
            };
            e = Expr::bin(op, e, self.multiplicative()?);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        while self.eat_sym("*") {
            e = Expr::bin(BinOp::Mul, e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_sym("-") {
            if let Tok::Int(n) = *self.peek() {
                self.bump();
                return Ok(Expr::Int(-n));
            }
            let operand = self.unary()?;
            return Ok(Expr::bin(BinOp::Sub, Expr::Int(0), operand));
        }
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Expr::Name(s))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            _ => Err(self.error("expression")),
        }
    }
}

/// Parses a standalone expression, e.g. for tests and witnesses built in code.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        source: SourceMap::default(),
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of expression"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_variable_declaration() {
        let err = parse_machine("machine m variables end").unwrap_err();
        assert!(err.message.contains("expected variable declaration"), "{err}");
        assert_eq!((err.span.line, err.span.column), (1, 21));
    }

    #[test]
    fn duplicate_declarations_are_located() {
        let err = parse_machine("machine m variables x : bool;\n  x : bool; init x := true; events end")
            .unwrap_err();
        assert!(err.message.contains("duplicate variable `x`"));
        assert_eq!((err.span.line, err.span.column), (2, 3));

        let err = parse_machine(
            "machine m variables x : bool; init x := true; events
               e == then skip end
               e == then skip end
             end",
        )
        .unwrap_err();
        assert!(err.message.contains("duplicate event `e`"), "{err}");
        assert_eq!(err.span.line, 3);
    }

    #[test]
    fn precedence() {
        let e = parse_expr("a = 1 /\\ not b \\/ c => d => e").unwrap();
        assert_eq!(print_expr(&e), "a = 1 /\\ not b \\/ c => d => e");
        let Expr::Binary(BinOp::Implies, lhs, rhs) = e else { panic!() };
        assert!(matches!(*lhs, Expr::Binary(BinOp::Or, ..)));
        assert!(matches!(*rhs, Expr::Binary(BinOp::Implies, ..)));

        let e = parse_expr("1 - 2 - 3 * -4").unwrap();
        assert_eq!(
            e,
            Expr::bin(
                BinOp::Sub,
                Expr::bin(BinOp::Sub, Expr::Int(1), Expr::Int(2)),
                Expr::bin(BinOp::Mul, Expr::Int(3), Expr::Int(-4))
            )
        );
    }

    #[test]
    fn comparison_is_not_associative() {
        assert!(parse_expr("a < b < c").is_err());
    }

    #[test]
    fn trailing_garbage() {
        let err = parse_machine("machine m variables x : bool; init x := true; events end end").unwrap_err();
        assert!(err.message.contains("end of input"));
    }

    #[test]
    fn file_errors_carry_path() {
        let err = parse_file(Path::new("x.ebm"), "machine").unwrap_err();
        assert_eq!(err.to_string(), "x.ebm:1:8: expected machine name, found end of input");
    }
}
