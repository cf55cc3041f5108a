use super::ParseError;
use crate::model::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kw {
    Machine,
    Refines,
    Variables,
    Invariant,
    Init,
    Events,
    End,
    When,
    Where,
    Any,
    Choose,
    Then,
    With,
    Skip,
    True,
    False,
    Not,
    In,
    Int,
    Enum,
    Bool,
}

impl Kw {
    fn from_ident(s: &str) -> Option<Kw> {
        Some(match s {
            "machine" => Kw::Machine,
            "refines" => Kw::Refines,
            "variables" => Kw::Variables,
            "invariant" => Kw::Invariant,
            "init" => Kw::Init,
            "events" => Kw::Events,
            "end" => Kw::End,
            "when" => Kw::When,
            "where" => Kw::Where,
            "any" => Kw::Any,
            "choose" => Kw::Choose,
            "then" => Kw::Then,
            "with" => Kw::With,
            "skip" => Kw::Skip,
            "true" => Kw::True,
            "false" => Kw::False,
            "not" => Kw::Not,
            "in" => Kw::In,
            "int" => Kw::Int,
            "enum" => Kw::Enum,
            "bool" => Kw::Bool,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    Kw(Kw),
    /// Punctuation and operators, stored as their source text.
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Kw(k) => format!("keyword `{}`", format!("{k:?}").to_lowercase()),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub len: usize,
}

impl Token {
    pub(crate) fn span(&self) -> SourceSpan {
        SourceSpan {
            file: None,
            line: self.line,
            column: self.column,
            length: self.len,
        }
    }
}

// Longest match first.
const SYMBOLS: &[&str] = &[
    ":=", "..", "||", "==", "=>", "/=", "<=", ">=", "/\\", "\\/", ":", ";", ",", "(", ")", "{",
    "}", "=", "<", ">", "+", "-", "*",
];

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut i = 0;
    let bytes = text.as_bytes();

    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap();
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += c.len_utf8();
            continue;
        }
        if rest.starts_with("//") {
            let skip = rest.find('\n').unwrap_or(rest.len());
            column += rest[..skip].chars().count();
            i += skip;
            continue;
        }
        let start = (i, line, column);
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            let word = &rest[..len];
            let tok = match Kw::from_ident(word) {
                Some(kw) => Tok::Kw(kw),
                None => Tok::Ident(word.to_string()),
            };
            (tok, len)
        } else if c.is_ascii_digit() {
            let len = rest
                .find(|ch: char| !ch.is_ascii_digit())
                .unwrap_or(rest.len());
            let n = rest[..len].parse::<i64>().map_err(|_| {
                ParseError::at(line, column, len, "integer literal out of range")
            })?;
            (Tok::Int(n), len)
        } else if let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            (Tok::Sym(sym), sym.len())
        } else {
            return Err(ParseError::at(
                line,
                column,
                c.len_utf8(),
                format!("unexpected character `{c}`"),
            ));
        };
        debug_assert!(bytes.len() >= i + len);
        out.push(Token {
            tok,
            offset: start.0,
            line: start.1,
            column: start.2,
            len,
        });
        i += len;
        column += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        offset: text.len(),
        line,
        column,
        len: 0,
    });
    Ok(out)
}
