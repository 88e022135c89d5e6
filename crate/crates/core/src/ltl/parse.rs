//! Recursive-descent parser for the ASCII formula grammar.
//!
//! Precedence from tightest: `!` `F` `X`, then `U` (right associative), then
//! `&`, then `|` (both left associative).

use thiserror::Error;

use super::formula::{Formula, PropTable};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error("undeclared proposition `{name}` at column {col}")]
    Undeclared { name: String, col: usize },
}

impl ParseError {
    /// 1-based column of the offending token.
    pub fn column(&self) -> usize {
        match self {
            ParseError::Syntax { col, .. } | ParseError::Undeclared { col, .. } => *col,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    LParen,
    RParen,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::Eof, start));
        };
        self.pos += 1;
        let tok = match c {
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
            }
            _ => {
                return Err(ParseError::Syntax {
                    col: start + 1,
                    msg: format!("unexpected character `{}`", c as char),
                })
            }
        };
        Ok((tok, start))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
    props: &'a PropTable,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (t, at) = self.lex.next()?;
        self.tok = t;
        self.at = at;
        Ok(())
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.tok, Tok::Ident(s) if s == kw)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            col: self.at + 1,
            msg: msg.into(),
        })
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.tok == Tok::Or {
            self.bump()?;
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while self.tok == Tok::And {
            self.bump()?;
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.is_kw("U") {
            self.bump()?;
            return Ok(Formula::until(lhs, self.until()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.tok == Tok::Not {
            self.bump()?;
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_kw("F") {
            self.bump()?;
            return Ok(Formula::eventually(self.unary()?));
        }
        if self.is_kw("X") {
            self.bump()?;
            return Ok(Formula::next(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.tok.clone() {
            Tok::LParen => {
                self.bump()?;
                let inner = self.or()?;
                if self.tok != Tok::RParen {
                    return self.err("expected `)`");
                }
                self.bump()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let f = match name.as_str() {
                    "true" => Formula::True,
                    "false" => Formula::False,
                    "U" => return self.err("`U` needs a left operand"),
                    _ => match self.props.lookup(&name) {
                        Some(id) => Formula::Atom(id),
                        None => {
                            return Err(ParseError::Undeclared {
                                name,
                                col: self.at + 1,
                            })
                        }
                    },
                };
                self.bump()?;
                Ok(f)
            }
            Tok::Eof => self.err("unexpected end of formula"),
            other => self.err(format!("unexpected token {other:?}")),
        }
    }
}

/// Parses `text` against the declared propositions.
pub fn parse_formula(text: &str, props: &PropTable) -> Result<Formula, ParseError> {
    let mut p = Parser {
        lex: Lexer {
            src: text.as_bytes(),
            pos: 0,
        },
        tok: Tok::Eof,
        at: 0,
        props,
    };
    p.bump()?;
    let f = p.or()?;
    if p.tok != Tok::Eof {
        return p.err("trailing input");
    }
    Ok(f)
}
