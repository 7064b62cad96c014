//! A small expression language over operator sections.
//!
//! ```text
//! expr    := product ('-' product)*
//! product := term ('.' term)*
//! term    := number '*' term | atom | '(' expr ')'
//! atom    := W | W* | K | K* | J | P | U | U* | S(k) | Cz(k) | Mz(k)
//!          | M(φ) | T(φ) | H(φ) | B(φ) | L(φ) | Sh(φ) | V(φ) | V*(φ) | A(m, φ)
//! ```
//!
//! Composition binds tighter than subtraction. Symbol names refer to a table
//! supplied at evaluation time. Evaluation starts from an input window on the
//! rightmost factor and propagates image windows leftwards, so every product
//! it forms is exact.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::{build_family_image, FamilyKind};
use crate::symbol::LaurentSymbol;
use crate::text;
use crate::window::IndexWindow;
use crate::windowed::{build_elementary, ElementaryKind, WindowedMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    W,
    WStar,
    K,
    KStar,
    J,
    P,
    U,
    UStar,
    Shift(i64),
    Cz(i64),
    Mz(i64),
    /// `M(φ)`: multiplication.
    Mult(String),
    /// `T`, `H`, `B`, `L`, `Sh`, `V`, `V*` and `A(m, ·)` over a named symbol.
    Family(FamilyKind, String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorExpr {
    Atom(Atom),
    Scale(f64, Box<OperatorExpr>),
    /// Leftmost factor first; at least two factors.
    Compose(Vec<OperatorExpr>),
    Sub(Box<OperatorExpr>, Box<OperatorExpr>),
}

fn family_letter(kind: FamilyKind) -> Option<&'static str> {
    Some(match kind {
        FamilyKind::Toeplitz => "T",
        FamilyKind::Hankel => "H",
        FamilyKind::SlantToeplitz => "B",
        FamilyKind::SlantHankel => "L",
        FamilyKind::HToeplitz => "Sh",
        FamilyKind::SlantHToeplitz => "V",
        FamilyKind::SlantHAdjoint => "V*",
        FamilyKind::Extension(_) => return None,
    })
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::W => f.write_str("W"),
            Atom::WStar => f.write_str("W*"),
            Atom::K => f.write_str("K"),
            Atom::KStar => f.write_str("K*"),
            Atom::J => f.write_str("J"),
            Atom::P => f.write_str("P"),
            Atom::U => f.write_str("U"),
            Atom::UStar => f.write_str("U*"),
            Atom::Shift(k) => write!(f, "S({k})"),
            Atom::Cz(k) => write!(f, "Cz({k})"),
            Atom::Mz(k) => write!(f, "Mz({k})"),
            Atom::Mult(s) => write!(f, "M({s})"),
            Atom::Family(FamilyKind::Extension(m), s) => write!(f, "A({m}, {s})"),
            Atom::Family(kind, s) => write!(f, "{}({s})", family_letter(*kind).unwrap()),
        }
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorExpr::Atom(a) => write!(f, "{a}"),
            OperatorExpr::Scale(s, e) => match **e {
                OperatorExpr::Compose(_) | OperatorExpr::Sub(..) => {
                    write!(f, "{}*({e})", text::fmt_real(*s))
                }
                _ => write!(f, "{}*{e}", text::fmt_real(*s)),
            },
            OperatorExpr::Compose(parts) => {
                for (k, p) in parts.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" . ")?;
                    }
                    match p {
                        OperatorExpr::Compose(_) | OperatorExpr::Sub(..) => write!(f, "({p})")?,
                        _ => write!(f, "{p}")?,
                    }
                }
                Ok(())
            }
            OperatorExpr::Sub(a, b) => match **b {
                OperatorExpr::Sub(..) => write!(f, "{a} - ({b})"),
                _ => write!(f, "{a} - {b}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Star,
    Dot,
    Minus,
    Comma,
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut p = 0;
    while p < chars.len() {
        let (col, c) = chars[p];
        let col = col + 1;
        match c {
            c if c.is_whitespace() => p += 1,
            '*' => {
                out.push((col, Tok::Star));
                p += 1;
            }
            '.' if !chars.get(p + 1).is_some_and(|(_, d)| d.is_ascii_digit()) => {
                out.push((col, Tok::Dot));
                p += 1;
            }
            '-' => {
                out.push((col, Tok::Minus));
                p += 1;
            }
            ',' => {
                out.push((col, Tok::Comma));
                p += 1;
            }
            '(' => {
                out.push((col, Tok::Open));
                p += 1;
            }
            ')' => {
                out.push((col, Tok::Close));
                p += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = p;
                while p < chars.len() {
                    let d = chars[p].1;
                    let exp_sign =
                        matches!(d, '+' | '-') && matches!(chars[p - 1].1, 'e' | 'E') && p > start;
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let s: String = chars[start..p].iter().map(|(_, d)| d).collect();
                out.push((col, Tok::Number(s)));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = p;
                while p < chars.len() && (chars[p].1.is_alphanumeric() || chars[p].1 == '_') {
                    p += 1;
                }
                let s: String = chars[start..p].iter().map(|(_, d)| d).collect();
                out.push((col, Tok::Ident(s)));
            }
            other => return Err(Error::parse(col, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(c, _)| *c)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let col = self.col();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::parse(col, format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<OperatorExpr> {
        let mut lhs = self.product()?;
        while self.peek() == Some(&Tok::Minus) {
            self.bump();
            let rhs = self.product()?;
            lhs = OperatorExpr::Sub(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<OperatorExpr> {
        let mut parts = vec![self.term()?];
        while self.peek() == Some(&Tok::Dot) {
            self.bump();
            parts.push(self.term()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            OperatorExpr::Compose(parts)
        })
    }

    fn term(&mut self) -> Result<OperatorExpr> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Number(s)) => {
                let v = text::parse_real(&s, col)?;
                self.expect(Tok::Star, "`*` after a scalar")?;
                Ok(OperatorExpr::Scale(v, Box::new(self.term()?)))
            }
            Some(Tok::Open) => {
                let e = self.expr()?;
                self.expect(Tok::Close, "`)` (unbalanced parentheses)")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.atom(&name, col).map(OperatorExpr::Atom),
            Some(Tok::Close) => Err(Error::parse(col, "unbalanced parentheses")),
            Some(_) => Err(Error::parse(col, "expected an operator")),
            None => Err(Error::parse(col, "unexpected end of expression")),
        }
    }

    fn starred(&mut self) -> bool {
        // `W*` etc. A scalar never follows an atom, so a star here is part of it.
        if self.peek() == Some(&Tok::Star) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn args(&mut self) -> Result<Vec<(usize, Tok)>> {
        if self.peek() != Some(&Tok::Open) {
            return Ok(vec![]);
        }
        let open = self.col();
        self.bump();
        let mut out = Vec::new();
        loop {
            let col = self.col();
            match self.bump() {
                Some(Tok::Close) if out.is_empty() => break,
                Some(Tok::Minus) => match self.bump() {
                    Some(Tok::Number(s)) => out.push((col, Tok::Number(format!("-{s}")))),
                    _ => return Err(Error::parse(col, "expected a number after `-`")),
                },
                Some(t @ (Tok::Number(_) | Tok::Ident(_))) => out.push((col, t)),
                None => return Err(Error::parse(open, "unbalanced parentheses")),
                Some(_) => return Err(Error::parse(col, "expected an argument")),
            }
            let col = self.col();
            match self.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::Close) => break,
                None => return Err(Error::parse(open, "unbalanced parentheses")),
                Some(_) => return Err(Error::parse(col, "expected `,` or `)`")),
            }
        }
        Ok(out)
    }

    fn atom(&mut self, name: &str, col: usize) -> Result<Atom> {
        let star = matches!(name, "W" | "K" | "U" | "V") && self.starred();
        let label = if star {
            format!("{name}*")
        } else {
            name.to_string()
        };
        let args = self.args()?;
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::parse(
                    col,
                    format!("`{label}` takes {n} argument(s), got {}", args.len()),
                ))
            }
        };
        let int = |k: usize| -> Result<i64> {
            match &args[k] {
                (c, Tok::Number(s)) => s
                    .parse::<i64>()
                    .map_err(|_| Error::parse(*c, format!("expected an integer, got `{s}`"))),
                (c, _) => Err(Error::parse(*c, "expected an integer")),
            }
        };
        let ident = |k: usize| -> Result<String> {
            match &args[k] {
                (_, Tok::Ident(s)) => Ok(s.clone()),
                (c, _) => Err(Error::parse(*c, "expected a symbol name")),
            }
        };
        let family = |kind| -> Result<Atom> {
            arity(1)?;
            Ok(Atom::Family(kind, ident(0)?))
        };
        let plain = |a: Atom| -> Result<Atom> {
            arity(0)?;
            Ok(a)
        };
        match label.as_str() {
            "W" => plain(Atom::W),
            "W*" => plain(Atom::WStar),
            "K" => plain(Atom::K),
            "K*" => plain(Atom::KStar),
            "J" => plain(Atom::J),
            "P" => plain(Atom::P),
            "U" => plain(Atom::U),
            "U*" => plain(Atom::UStar),
            "S" | "Cz" | "Mz" => {
                arity(1)?;
                let k = int(0)?;
                Ok(match name {
                    "S" => Atom::Shift(k),
                    "Cz" => Atom::Cz(k),
                    _ => Atom::Mz(k),
                })
            }
            "M" => {
                arity(1)?;
                Ok(Atom::Mult(ident(0)?))
            }
            "T" => family(FamilyKind::Toeplitz),
            "H" => family(FamilyKind::Hankel),
            "B" => family(FamilyKind::SlantToeplitz),
            "L" => family(FamilyKind::SlantHankel),
            "Sh" => family(FamilyKind::HToeplitz),
            "V" => family(FamilyKind::SlantHToeplitz),
            "V*" => family(FamilyKind::SlantHAdjoint),
            "A" => {
                arity(2)?;
                let m = int(0)?;
                let m = u32::try_from(m)
                    .map_err(|_| Error::parse(args[0].0, "extension order must be nonnegative"))?;
                Ok(Atom::Family(FamilyKind::Extension(m), ident(1)?))
            }
            other => Err(Error::parse(col, format!("unknown operator `{other}`"))),
        }
    }
}

pub fn parse_expr(source: &str) -> Result<OperatorExpr> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: source.chars().count() + 1,
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        let col = p.col();
        let msg = if p.peek() == Some(&Tok::Close) {
            "unbalanced parentheses".to_string()
        } else {
            "expected `.`, `-` or end of expression".to_string()
        };
        return Err(Error::parse(col, msg));
    }
    Ok(e)
}

/// Named symbols available to an expression.
pub type SymbolTable = HashMap<String, LaurentSymbol>;

fn lookup<'a>(symbols: &'a SymbolTable, name: &str) -> Result<&'a LaurentSymbol> {
    symbols
        .get(name)
        .ok_or_else(|| Error::UnresolvedSymbol(name.to_string()))
}

fn eval_atom(atom: &Atom, input: IndexWindow, symbols: &SymbolTable) -> Result<WindowedMatrix> {
    let kind = match atom {
        Atom::W => ElementaryKind::W,
        Atom::WStar => ElementaryKind::WStar,
        Atom::K => ElementaryKind::K,
        Atom::KStar => ElementaryKind::KStar,
        Atom::J => ElementaryKind::J,
        Atom::P => ElementaryKind::P,
        Atom::U => ElementaryKind::U,
        Atom::UStar => ElementaryKind::UStar,
        Atom::Shift(k) => ElementaryKind::BilateralShift(*k),
        Atom::Cz(k) => ElementaryKind::Cz(*k),
        Atom::Mz(k) => ElementaryKind::Mz(*k),
        Atom::Mult(s) => ElementaryKind::Mult(lookup(symbols, s)?.clone()),
        Atom::Family(kind, s) => return build_family_image(*kind, lookup(symbols, s)?, input),
    };
    build_elementary(&kind, input)
}

/// Exact section of `e` on the column window `input`; the row window is the
/// full image of those columns.
pub fn eval_expr(
    e: &OperatorExpr,
    input: IndexWindow,
    symbols: &SymbolTable,
) -> Result<WindowedMatrix> {
    match e {
        OperatorExpr::Atom(a) => eval_atom(a, input, symbols),
        OperatorExpr::Scale(s, inner) => {
            Ok(eval_expr(inner, input, symbols)?.scale(Complex64::new(*s, 0.0)))
        }
        OperatorExpr::Compose(parts) => {
            let mut acc: Option<WindowedMatrix> = None;
            for part in parts.iter().rev() {
                let window = acc.as_ref().map_or(input, |m| m.rows());
                let step = eval_expr(part, window, symbols)?;
                acc = Some(match acc {
                    None => step,
                    Some(prev) => step.compose(&prev)?,
                });
            }
            acc.ok_or_else(|| Error::Precondition("empty composition".into()))
        }
        OperatorExpr::Sub(a, b) => {
            eval_expr(a, input, symbols)?.sub(&eval_expr(b, input, symbols)?)
        }
    }
}
