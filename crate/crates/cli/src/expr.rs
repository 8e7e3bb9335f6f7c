//! The correspondence expression language.
//!
//! ```text
//! sum     := term ('+' term)*
//! term    := [rational '*'] primary
//! primary := 'diagonal'
//!          | 'graph' '(' endo ')'
//!          | 'transpose' '(' sum ')'
//!          | 'compose' '(' sum (',' sum)+ ')'
//!          | 'power' '(' sum ',' INT ')'
//!          | 'gr' '(' rational ')'
//!          | IDENT
//!          | '(' sum ')'
//! endo    := IDENT | 'id' | 'mult' '(' ['-'] INT ')'
//! rational := INT ['/' INT]
//! ```
//!
//! `compose(a, b)` is `a ∘ b`, so its pullback is `b^*` followed by `a^*`.

use std::fmt;

use corrdyn::correspondence::gr_correspondence;
use corrdyn::{AbelianVariety, Correspondence, EndomorphismMatrix, Rat};
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endo {
    Named(String),
    Identity,
    Mult(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Diagonal,
    Graph(Endo),
    Transpose(Box<Expr>),
    Compose(Vec<Expr>),
    Power(Box<Expr>, u32),
    Gr(Rat),
    Named(String),
    Scaled(Rat, Box<Expr>),
    Sum(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct ExprError {
    /// 1-based character column in the expression.
    pub column: usize,
    pub message: String,
}

fn err<T>(column: usize, message: impl Into<String>) -> Result<T, ExprError> {
    Err(ExprError { column, message: message.into() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    Comma,
    Plus,
    Star,
    Slash,
    Minus,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '-' => Some(Tok::Minus),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().expect("digits")), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            return err(col, format!("unexpected character '{c}'"));
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ExprError> {
        let (t, col) = self.next();
        if t == want {
            Ok(())
        } else {
            err(col, format!("expected {want}, found {t}"))
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut terms = vec![self.term()?];
        while *self.peek() == Tok::Plus {
            self.next();
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        if let Tok::Int(_) = self.peek() {
            let q = self.rational()?;
            self.expect(Tok::Star)?;
            let inner = self.primary()?;
            return Ok(Expr::Scaled(q, Box::new(inner)));
        }
        self.primary()
    }

    fn int(&mut self) -> Result<BigInt, ExprError> {
        match self.next() {
            (Tok::Int(n), _) => Ok(n),
            (t, col) => err(col, format!("expected an integer, found {t}")),
        }
    }

    fn rational(&mut self) -> Result<Rat, ExprError> {
        let col = self.col();
        let n = self.int()?;
        if *self.peek() == Tok::Slash {
            self.next();
            let d = self.int()?;
            if d.is_zero() {
                return err(col, "zero denominator");
            }
            return Ok(Rat::new(n, d));
        }
        Ok(Rat::from_integer(n))
    }

    fn small_int(&mut self) -> Result<i64, ExprError> {
        let col = self.col();
        let neg = if *self.peek() == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let n = self.int()?;
        let v: i64 = n.try_into().or_else(|_| err(col, "integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn endo(&mut self) -> Result<Endo, ExprError> {
        match self.next() {
            (Tok::Ident(s), _) if s == "id" => Ok(Endo::Identity),
            (Tok::Ident(s), _) if s == "mult" => {
                self.expect(Tok::LParen)?;
                let m = self.small_int()?;
                self.expect(Tok::RParen)?;
                Ok(Endo::Mult(m))
            }
            (Tok::Ident(s), _) => Ok(Endo::Named(s)),
            (t, col) => err(col, format!("expected an endomorphism, found {t}")),
        }
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let (t, col) = self.next();
        match t {
            Tok::LParen => {
                let e = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "diagonal" => Ok(Expr::Diagonal),
                "graph" => {
                    self.expect(Tok::LParen)?;
                    let e = self.endo()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Graph(e))
                }
                "transpose" => {
                    self.expect(Tok::LParen)?;
                    let e = self.sum()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Transpose(Box::new(e)))
                }
                "compose" => {
                    self.expect(Tok::LParen)?;
                    let mut parts = vec![self.sum()?];
                    while *self.peek() == Tok::Comma {
                        self.next();
                        parts.push(self.sum()?);
                    }
                    self.expect(Tok::RParen)?;
                    if parts.len() < 2 {
                        return err(col, "compose needs at least two arguments");
                    }
                    Ok(Expr::Compose(parts))
                }
                "power" => {
                    self.expect(Tok::LParen)?;
                    let e = self.sum()?;
                    self.expect(Tok::Comma)?;
                    let ecol = self.col();
                    let m = self.int()?;
                    let m: u32 = m.try_into().or_else(|_| err(ecol, "exponent out of range"))?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Power(Box::new(e), m))
                }
                "gr" => {
                    self.expect(Tok::LParen)?;
                    let r = self.rational()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Gr(r))
                }
                _ => Ok(Expr::Named(name)),
            },
            t => err(col, format!("unexpected {t}")),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.sum()?;
    match p.peek() {
        Tok::End => Ok(e),
        t => err(p.col(), format!("unexpected {t} after expression")),
    }
}

impl Expr {
    /// Correspondence names referenced directly by this expression.
    pub fn references(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Named(n) => out.push(n),
            Expr::Transpose(e) | Expr::Power(e, _) | Expr::Scaled(_, e) => e.collect_refs(out),
            Expr::Compose(es) | Expr::Sum(es) => es.iter().for_each(|e| e.collect_refs(out)),
            Expr::Diagonal | Expr::Graph(_) | Expr::Gr(_) => {}
        }
    }
}

/// Name lookups available while evaluating an expression.
pub trait Env {
    fn variety(&self) -> &AbelianVariety;
    fn endomorphism(&self, name: &str) -> Option<&EndomorphismMatrix>;
    fn correspondence(&self, name: &str) -> Option<&Correspondence>;
}

fn resolve_endo(env: &dyn Env, e: &Endo) -> Result<EndomorphismMatrix, String> {
    let x = env.variety();
    match e {
        Endo::Identity => Ok(x.identity()),
        Endo::Mult(m) => Ok(x.multiplication_map(*m)),
        Endo::Named(n) => env.endomorphism(n).cloned().ok_or_else(|| format!("unknown endomorphism '{n}'")),
    }
}

pub fn eval(expr: &Expr, env: &dyn Env) -> Result<Correspondence, String> {
    let x = env.variety();
    match expr {
        Expr::Diagonal => Ok(Correspondence::diagonal()),
        Expr::Graph(e) => Ok(Correspondence::graph(x, &resolve_endo(env, e)?)),
        Expr::Transpose(e) => eval(e, env)?.transpose(x).map_err(|e| e.to_string()),
        Expr::Compose(parts) => {
            let mut acc = eval(&parts[parts.len() - 1], env)?;
            for p in parts[..parts.len() - 1].iter().rev() {
                acc = eval(p, env)?.compose(x, &acc);
            }
            Ok(acc)
        }
        Expr::Power(e, m) => Ok(eval(e, env)?.power(x, *m)),
        Expr::Gr(r) => gr_correspondence(x, r).map_err(|e| e.to_string()),
        Expr::Named(n) => env.correspondence(n).cloned().ok_or_else(|| format!("unknown correspondence '{n}'")),
        Expr::Scaled(q, e) => eval(e, env)?.scale(q).map_err(|e| e.to_string()),
        Expr::Sum(es) => es.iter().try_fold(Correspondence::zero(), |acc, e| Ok(acc.add(&eval(e, env)?))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrdyn::linalg::ratio;

    #[test]
    fn parses_nested_expressions() {
        let e = parse("graph(phi) + 1/2*compose(transpose(graph(mult(2))), f)").unwrap();
        let Expr::Sum(terms) = e else { panic!("expected a sum") };
        assert_eq!(terms[0], Expr::Graph(Endo::Named("phi".into())));
        let Expr::Scaled(q, inner) = &terms[1] else { panic!("expected a scaled term") };
        assert_eq!(*q, ratio(1, 2));
        assert!(matches!(**inner, Expr::Compose(ref v) if v.len() == 2));
    }

    #[test]
    fn reports_error_columns() {
        assert_eq!(parse("graph(phi").unwrap_err().column, 10);
        assert_eq!(parse("graph(phi) +").unwrap_err().column, 13);
        assert_eq!(parse("a $ b").unwrap_err().column, 3);
        assert_eq!(parse("power(f, x)").unwrap_err().column, 10);
    }

    #[test]
    fn references_are_collected() {
        let e = parse("compose(f, g) + power(h, 2) + graph(phi)").unwrap();
        assert_eq!(e.references(), vec!["f", "g", "h"]);
    }

    #[test]
    fn negative_multiplication_map() {
        assert_eq!(parse("graph(mult(-1))").unwrap(), Expr::Graph(Endo::Mult(-1)));
    }
}
