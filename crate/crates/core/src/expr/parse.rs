use std::collections::BTreeSet;

use super::ProcExpr;
use crate::error::{ExprError, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Plus,
    Dot,
    Bars,
    Star,
    Omega,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Equals,
    /// Lower-initial name, parenthesised arguments included.
    Action(String),
    /// Upper-initial name, parenthesised arguments included.
    Var(String),
    Tau,
    Delta,
    Encap,
    Hide,
    Eof,
}

#[derive(Clone, Debug)]
struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l0, c0) = (line, col);
        let simple = match c {
            '+' => Some(Tok::Plus),
            '.' => Some(Tok::Dot),
            '*' => Some(Tok::Star),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Lexed { tok, line: l0, col: c0 });
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '|' {
            if chars.get(i + 1) == Some(&'|') {
                out.push(Lexed { tok: Tok::Bars, line: l0, col: c0 });
                i += 2;
                col += 2;
                continue;
            }
            return Err(SyntaxError::new(l0, c0, "expected `||`"));
        }
        if c == '^' {
            let word: String = chars[i + 1..].iter().take(5).collect();
            if word == "omega" {
                out.push(Lexed { tok: Tok::Omega, line: l0, col: c0 });
                i += 6;
                col += 6;
                continue;
            }
            return Err(SyntaxError::new(l0, c0, "expected `^omega`"));
        }
        if c.is_ascii_alphabetic() {
            let mut name = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                let ch = chars[i];
                name.push(ch);
                advance(&mut i, &mut line, &mut col, ch);
            }
            let keyword = match name.as_str() {
                "tau" => Some(Tok::Tau),
                "delta" => Some(Tok::Delta),
                "encap" => Some(Tok::Encap),
                "hide" => Some(Tok::Hide),
                _ => None,
            };
            if let Some(tok) = keyword {
                out.push(Lexed { tok, line: l0, col: c0 });
                continue;
            }
            // Arguments: a balanced parenthesised group directly after the name, whitespace dropped.
            let mut j = i;
            let (mut jl, mut jc) = (line, col);
            while j < chars.len() && chars[j].is_whitespace() {
                let ch = chars[j];
                advance(&mut j, &mut jl, &mut jc, ch);
            }
            if j < chars.len() && chars[j] == '(' {
                let mut depth = 0;
                loop {
                    let Some(&ch) = chars.get(j) else {
                        return Err(SyntaxError::new(l0, c0, "unterminated argument list"));
                    };
                    if matches!(ch, '{' | '}' | ';' | '=' | '+' | '|') {
                        return Err(SyntaxError::new(jl, jc, format!("unexpected `{ch}` in arguments")));
                    }
                    if !ch.is_whitespace() {
                        name.push(ch);
                    }
                    if ch == '(' {
                        depth += 1;
                    } else if ch == ')' {
                        depth -= 1;
                    }
                    advance(&mut j, &mut jl, &mut jc, ch);
                    if depth == 0 {
                        break;
                    }
                }
                i = j;
                line = jl;
                col = jc;
            }
            let tok = if c.is_ascii_uppercase() { Tok::Var(name) } else { Tok::Action(name) };
            out.push(Lexed { tok, line: l0, col: c0 });
            continue;
        }
        return Err(SyntaxError::new(l0, c0, format!("unexpected character `{c}`")));
    }
    out.push(Lexed { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Recursive-descent parser over the expression grammar; also drives the
/// specification format.
pub struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    pub fn new(text: &str) -> Result<Parser, SyntaxError> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn position(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let (l, c) = self.position();
        SyntaxError::new(l, c, msg)
    }

    pub fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    pub fn expr(&mut self) -> Result<ProcExpr, SyntaxError> {
        let mut e = self.mid()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            e = ProcExpr::alt(e, self.mid()?);
        }
        Ok(e)
    }

    fn mid(&mut self) -> Result<ProcExpr, SyntaxError> {
        let mut e = self.seqt()?;
        let first = match self.peek() {
            Tok::Bars | Tok::Star => self.peek().clone(),
            _ => return Ok(e),
        };
        while *self.peek() == first {
            self.bump();
            let r = self.seqt()?;
            e = if first == Tok::Bars { ProcExpr::par(e, r) } else { ProcExpr::star(e, r) };
        }
        if matches!(self.peek(), Tok::Bars | Tok::Star) {
            return Err(self.error("ambiguous same-precedence mix of `||` and `*`; add parentheses"));
        }
        Ok(e)
    }

    fn seqt(&mut self) -> Result<ProcExpr, SyntaxError> {
        let mut e = self.post()?;
        while *self.peek() == Tok::Dot {
            self.bump();
            e = ProcExpr::seq(e, self.post()?);
        }
        Ok(e)
    }

    fn post(&mut self) -> Result<ProcExpr, SyntaxError> {
        let e = self.prim()?;
        if *self.peek() == Tok::Omega {
            self.bump();
            return Ok(ProcExpr::omega(e));
        }
        Ok(e)
    }

    fn prim(&mut self) -> Result<ProcExpr, SyntaxError> {
        match self.bump() {
            Tok::Action(a) => {
                check_name(&a).map_err(|m| self.error_prev(m))?;
                Ok(ProcExpr::Atom(a))
            }
            Tok::Var(x) => Ok(ProcExpr::Var(x)),
            Tok::Tau => Ok(ProcExpr::Tau),
            Tok::Delta => Ok(ProcExpr::Delta),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            kw @ (Tok::Encap | Tok::Hide) => {
                self.expect(Tok::LParen, "`(`")?;
                let set = self.label_set()?;
                self.expect(Tok::Comma, "`,`")?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(if kw == Tok::Encap { ProcExpr::encap(set, e) } else { ProcExpr::hide(set, e) })
            }
            _ => Err(self.error_prev("expected an action, `tau`, `delta`, a variable or `(`")),
        }
    }

    fn error_prev(&self, msg: impl Into<String>) -> SyntaxError {
        let t = &self.toks[self.pos.saturating_sub(1)];
        SyntaxError::new(t.line, t.col, msg)
    }

    pub fn label_set(&mut self) -> Result<BTreeSet<String>, SyntaxError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut set = BTreeSet::new();
        if *self.peek() == Tok::RBrace {
            self.bump();
            return Ok(set);
        }
        loop {
            match self.bump() {
                Tok::Action(a) => {
                    check_name(&a).map_err(|m| self.error_prev(m))?;
                    set.insert(a);
                }
                Tok::Tau => return Err(self.error_prev("`tau` may not be encapsulated or hidden")),
                _ => return Err(self.error_prev("expected an action in label set")),
            }
            match self.bump() {
                Tok::Comma => continue,
                Tok::RBrace => return Ok(set),
                _ => return Err(self.error_prev("expected `,` or `}`")),
            }
        }
    }
}

fn check_name(a: &str) -> Result<(), String> {
    let base = a.split('(').next().unwrap_or("");
    if base == "tau" || base == "delta" {
        return Err(format!("`{base}` is reserved"));
    }
    Ok(())
}

pub fn parse_expr(text: &str) -> Result<ProcExpr, ExprError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("unexpected trailing input").into());
    }
    Ok(e)
}

/// Reads a braced label set such as `{a, s1(0,1)}`.
pub fn parse_label_set(text: &str) -> Result<BTreeSet<String>, ExprError> {
    let mut p = Parser::new(text)?;
    let s = p.label_set()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("unexpected trailing input").into());
    }
    Ok(s)
}
