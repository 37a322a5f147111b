//! Recursive-descent parser for the formula language.
//!
//! ```text
//! formula := or_expr
//! or_expr := and_expr { "or" and_expr }
//! and_expr := unary { "and" unary }
//! unary := "not" unary | primary
//! primary := "(" formula ")" | "if" formula "then" formula "else" formula | chain
//! chain := var relop var { relop var }
//! relop := "<=" | "<" | "=" | "!=" | ">=" | ">"
//! var := "x" digits
//! ```

use std::fmt;

use thiserror::Error;

use super::{Expr, Rel};

/// Syntax error with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Var(usize),
    Rel(Rel),
    LParen,
    RParen,
    And,
    Or,
    Not,
    If,
    Then,
    Else,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Var(i) => write!(f, "x{i}"),
            Tok::Rel(r) => write!(f, "'{}'", r.symbol()),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::And => f.write_str("'and'"),
            Tok::Or => f.write_str("'or'"),
            Tok::Not => f.write_str("'not'"),
            Tok::If => f.write_str("'if'"),
            Tok::Then => f.write_str("'then'"),
            Tok::Else => f.write_str("'else'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn err(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError { line: pos.line, column: pos.column, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
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
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, width) = match (c, two.as_str()) {
            (_, "<=") => (Tok::Rel(Rel::Le), 2),
            (_, ">=") => (Tok::Rel(Rel::Ge), 2),
            (_, "!=") => (Tok::Rel(Rel::Ne), 2),
            ('<', _) => (Tok::Rel(Rel::Lt), 1),
            ('>', _) => (Tok::Rel(Rel::Gt), 1),
            ('=', _) => (Tok::Rel(Rel::Eq), 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            _ if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_alphanumeric() {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "and" => Tok::And,
                    "or" => Tok::Or,
                    "not" => Tok::Not,
                    "if" => Tok::If,
                    "then" => Tok::Then,
                    "else" => Tok::Else,
                    w if w.len() > 1 && w.starts_with('x') && w[1..].bytes().all(|b| b.is_ascii_digit()) => {
                        let index: usize = w[1..]
                            .parse()
                            .map_err(|_| err(pos, format!("variable index too large in {w}")))?;
                        if index == 0 {
                            return Err(err(pos, "variable indices start at 1 (found x0)"));
                        }
                        Tok::Var(index)
                    }
                    w => return Err(err(pos, format!("unknown word {w:?}"))),
                };
                (tok, j - i)
            }
            _ => return Err(err(pos, format!("unexpected character {c:?}"))),
        };
        out.push((tok, pos));
        i += width;
        col += width;
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(err(self.pos(), format!("expected {want}, found {}", self.peek())))
        }
    }

    fn formula(&mut self) -> Result<Expr, ParseError> {
        let mut items = vec![self.and_expr()?];
        while *self.peek() == Tok::Or {
            self.bump();
            items.push(self.and_expr()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Or(items) })
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut items = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.bump();
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::And(items) })
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(Expr::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::If => {
                self.bump();
                let cond = self.formula()?;
                self.expect(Tok::Then)?;
                let then = self.formula()?;
                self.expect(Tok::Else)?;
                let other = self.formula()?;
                Ok(Expr::ite(cond, then, other))
            }
            Tok::Var(_) => self.chain(),
            t => Err(err(self.pos(), format!("expected a formula, found {t}"))),
        }
    }

    fn var(&mut self) -> Result<usize, ParseError> {
        match self.peek().clone() {
            Tok::Var(i) => {
                self.bump();
                Ok(i)
            }
            t => Err(err(self.pos(), format!("expected a variable, found {t}"))),
        }
    }

    fn chain(&mut self) -> Result<Expr, ParseError> {
        let mut vars = vec![self.var()?];
        let mut rels = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Rel(r) => {
                    self.bump();
                    rels.push(r);
                    vars.push(self.var()?);
                }
                _ if rels.is_empty() => {
                    return Err(err(
                        self.pos(),
                        format!("expected a comparison operator, found {}", self.peek()),
                    ))
                }
                _ => break,
            }
        }
        Ok(if rels.len() == 1 {
            Expr::Compare(rels[0], vars[0], vars[1])
        } else {
            Expr::Chain(vars, rels)
        })
    }
}

pub(super) fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, at: 0 };
    let expr = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(err(p.pos(), format!("unexpected {} after formula", p.peek())));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_not_and_or() {
        let e = parse_expr("not x1 < x2 and x2 < x3 or x1 = x3").unwrap();
        assert_eq!(
            e,
            Expr::Or(vec![
                Expr::And(vec![
                    Expr::not(Expr::Compare(Rel::Lt, 1, 2)),
                    Expr::Compare(Rel::Lt, 2, 3),
                ]),
                Expr::Compare(Rel::Eq, 1, 3),
            ])
        );
    }

    #[test]
    fn chains_keep_every_relation() {
        let e = parse_expr("x1 < x2 = x3 != x4").unwrap();
        assert_eq!(e, Expr::Chain(vec![1, 2, 3, 4], vec![Rel::Lt, Rel::Eq, Rel::Ne]));
    }

    #[test]
    fn truncated_input_points_past_the_end() {
        let e = parse_expr("x1 <").unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));
    }

    #[test]
    fn reports_line_and_column() {
        let e = parse_expr("x1 < x2 and\n  x3 ? x1").unwrap_err();
        assert_eq!((e.line, e.column), (2, 6));
        let e = parse_expr("x0 < x1").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        assert!(parse_expr("x1 < x2)").is_err());
        assert!(parse_expr("x1").is_err());
        assert!(parse_expr("if x1 < x2 then x2 < x1").is_err());
        assert!(parse_expr("X1 < x2").is_err());
    }
}
