use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::sort::{DomainSpec, Value};
use super::term::{BinOp, Term, Var, VarDecl};

/// Names visible to the parser.
pub struct Scope<'a> {
    pub vars: &'a BTreeMap<String, Arc<VarDecl>>,
    pub domain: &'a DomainSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    Op(&'static str),
    End,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const OPS: [&str; 22] = [
    "=>", "&&", "||", "==", "!=", "<=", ">=", "::", ":=", ":", "<", ">", "!", "+", "-", "(", ")", "[", "]", ",", "@",
    "?",
];

/// Splits source text into tokens. `line` and `col` are the position of the
/// first character of `src`.
pub(crate) fn lex(src: &str, line: usize, col: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut ln, mut cl) = (line, col);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            ln += 1;
            cl = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            cl += 1;
            continue;
        }
        let start = (ln, cl);
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let n = text.parse::<i64>().map_err(|_| Error::Parse {
                line: ln,
                col: cl,
                message: format!("integer literal `{text}` out of range"),
            })?;
            out.push(Token {
                tok: Tok::Int(n),
                line: start.0,
                col: start.1,
            });
            cl += j - i;
            i = j;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '.') {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            out.push(Token {
                tok: Tok::Ident(text),
                line: start.0,
                col: start.1,
            });
            cl += j - i;
            i = j;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let op = OPS
            .iter()
            .find(|op| rest.starts_with(**op))
            .ok_or_else(|| Error::Parse {
                line: ln,
                col: cl,
                message: format!("unexpected character `{c}`"),
            })?;
        out.push(Token {
            tok: Tok::Op(op),
            line: start.0,
            col: start.1,
        });
        i += op.len();
        cl += op.len();
    }
    out.push(Token {
        tok: Tok::End,
        line: ln,
        col: cl,
    });
    Ok(out)
}

pub(crate) struct Parser<'a, 's> {
    toks: Vec<Token>,
    pos: usize,
    scope: &'a Scope<'s>,
}

impl<'a, 's> Parser<'a, 's> {
    pub(crate) fn new(toks: Vec<Token>, scope: &'a Scope<'s>) -> Self {
        Parser { toks, pos: 0, scope }
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn at_end(&self) -> bool {
        self.toks[self.pos].tok == Tok::End
    }

    pub(crate) fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Parse {
            line: t.line,
            col: t.col,
            message: message.into(),
        })
    }

    pub(crate) fn eat(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Tok::Op(o) if *o == op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, op: &str) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            self.error(format!("expected `{op}`"))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(s)
            }
            _ => self.error("expected an identifier"),
        }
    }

    pub(crate) fn is_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    /// Parses a term and checks that it is well sorted.
    pub(crate) fn term(&mut self) -> Result<Term> {
        let start = self.pos;
        let t = self.implies()?;
        if let Err(e) = t.type_of(self.scope.domain) {
            let tok = &self.toks[start];
            return Err(Error::Parse {
                line: tok.line,
                col: tok.col,
                message: e.to_string(),
            });
        }
        Ok(t)
    }

    fn implies(&mut self) -> Result<Term> {
        let lhs = self.or()?;
        if self.eat("=>") {
            let rhs = self.implies()?;
            return Ok(Term::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Term> {
        let mut t = self.and()?;
        while self.eat("||") {
            t = Term::or(t, self.and()?);
        }
        Ok(t)
    }

    fn and(&mut self) -> Result<Term> {
        let mut t = self.cmp()?;
        while self.eat("&&") {
            t = Term::and(t, self.cmp()?);
        }
        Ok(t)
    }

    fn cmp(&mut self) -> Result<Term> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Tok::Op("==") => BinOp::Eq,
            Tok::Op("!=") => BinOp::Ne,
            Tok::Op("<") => BinOp::Lt,
            Tok::Op("<=") => BinOp::Le,
            Tok::Op(">") => BinOp::Gt,
            Tok::Op(">=") => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.sum()?;
        if matches!(self.peek(), Tok::Op("==" | "!=" | "<" | "<=" | ">" | ">=")) {
            return self.error("comparisons do not chain; add parentheses");
        }
        Ok(Term::bin(op, lhs, rhs))
    }

    fn sum(&mut self) -> Result<Term> {
        let mut t = self.unary()?;
        loop {
            if self.eat("+") {
                t = Term::bin(BinOp::Add, t, self.unary()?);
            } else if self.eat("-") {
                t = Term::bin(BinOp::Sub, t, self.unary()?);
            } else {
                return Ok(t);
            }
        }
    }

    fn unary(&mut self) -> Result<Term> {
        if self.eat("!") {
            return Ok(Term::not(self.unary()?));
        }
        if self.eat("-") {
            return match self.next() {
                Tok::Int(n) => Ok(Term::int(-n)),
                _ => {
                    self.pos -= 1;
                    self.error("expected an integer after unary `-`")
                }
            };
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(Term::int(n))
            }
            Tok::Op("(") => {
                self.pos += 1;
                let t = self.implies()?;
                self.expect(")")?;
                Ok(t)
            }
            Tok::Op("[") => {
                self.pos += 1;
                Ok(Term::Const(self.list_literal()?))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                match name.as_str() {
                    "true" => return Ok(Term::tt()),
                    "false" => return Ok(Term::ff()),
                    "contains" if matches!(self.peek(), Tok::Op("(")) => {
                        self.pos += 1;
                        let l = self.implies()?;
                        self.expect(",")?;
                        let e = self.implies()?;
                        self.expect(")")?;
                        return Ok(Term::contains(l, e));
                    }
                    _ => {}
                }
                if self.eat("::") {
                    let variant = self.ident()?;
                    if !self.scope.domain.enum_has_variant(&name, &variant) {
                        self.pos -= 1;
                        return self.error(format!("`{name}::{variant}` is not an enum value"));
                    }
                    return Ok(Term::Const(Value::enum_value(&name, &variant)));
                }
                let Some(decl) = self.scope.vars.get(&name) else {
                    self.pos -= 1;
                    return self.error(format!("unknown variable `{name}`"));
                };
                let mut time = 0;
                if self.eat("@") {
                    match self.next() {
                        Tok::Int(n) if n >= 0 && n <= u32::MAX as i64 => time = n as u32,
                        _ => {
                            self.pos -= 1;
                            return self.error("expected a time index after `@`");
                        }
                    }
                }
                Ok(Term::Var(Var::at(decl.clone(), time)))
            }
            _ => self.error("expected a term"),
        }
    }

    fn list_literal(&mut self) -> Result<Value> {
        let mut items = Vec::new();
        if self.eat("]") {
            return Ok(Value::List(items));
        }
        loop {
            let t = self.unary()?;
            match t {
                Term::Const(v) => items.push(v),
                _ => return self.error("list literals may only contain constants"),
            }
            if self.eat("]") {
                return Ok(Value::List(items));
            }
            self.expect(",")?;
        }
    }
}

/// Parses a complete term.
pub fn parse_term(src: &str, scope: &Scope<'_>) -> Result<Term> {
    let toks = lex(src, 1, 1)?;
    let mut p = Parser::new(toks, scope);
    let t = p.term()?;
    if !p.at_end() {
        return p.error("unexpected trailing input");
    }
    Ok(t)
}

/// Parses a boolean term.
pub fn parse_formula(src: &str, scope: &Scope<'_>) -> Result<Term> {
    let t = parse_term(src, scope)?;
    t.check_bool(scope.domain).map_err(|e| Error::Parse {
        line: 1,
        col: 1,
        message: e.to_string(),
    })?;
    Ok(t)
}
