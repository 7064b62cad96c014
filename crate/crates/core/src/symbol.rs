//! Finitely supported Laurent symbols `φ = Σ a_n zⁿ`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::text::{self, FORMAT_HEADER};
use crate::window::IndexWindow;

/// Default number of circle samples for sup-norm and inner-ness tests.
pub const DEFAULT_GRID: usize = 4096;

/// A trigonometric polynomial with complex coefficients.
///
/// Exact zero coefficients are never stored, so the support is always tight
/// and the zero symbol has an empty support.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaurentSymbol {
    coeffs: BTreeMap<i64, Complex64>,
}

impl LaurentSymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::monomial(0, c)
    }

    /// `c · z^k`.
    pub fn monomial(k: i64, c: impl Into<Complex64>) -> Self {
        Self::from_terms([(k, c.into())]).expect("single term")
    }

    /// Builds a symbol from `(degree, coefficient)` pairs, rejecting repeated degrees.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (n, c) in terms {
            if coeffs.insert(n, c).is_some() {
                return Err(Error::DuplicateDegree(n));
            }
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(LaurentSymbol { coeffs })
    }

    /// Real coefficients `a_lo, a_lo+1, …`.
    pub fn from_real_slice(lo: i64, values: &[f64]) -> Self {
        Self::from_terms(
            values
                .iter()
                .enumerate()
                .map(|(k, &v)| (lo + k as i64, Complex64::new(v, 0.0))),
        )
        .expect("distinct degrees")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `a_n`, zero outside the support.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn support(&self) -> IndexWindow {
        match (self.coeffs.keys().next(), self.coeffs.keys().next_back()) {
            (Some(&lo), Some(&hi)) => IndexWindow::new(lo, hi),
            _ => IndexWindow::EMPTY,
        }
    }

    /// Nonzero terms in increasing degree.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.coeffs.keys().copied()
    }

    /// `φ(z)` for `z` on (or off) the circle.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms().map(|(n, c)| c * z.powi(n as i32)).sum()
    }

    /// The symbol `φ̄`: coefficient `n` is `conj(a_{-n})`.
    pub fn conj_reflect(&self) -> Self {
        LaurentSymbol {
            coeffs: self.terms().map(|(n, c)| (-n, c.conj())).collect(),
        }
    }

    /// Convolution of coefficient sequences.
    pub fn product(&self, other: &Self) -> Self {
        let mut out: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (n, a) in self.terms() {
            for (m, b) in other.terms() {
                *out.entry(n + m).or_default() += a * b;
            }
        }
        out.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        LaurentSymbol { coeffs: out }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms().map(|(n, c)| (n, s * c))).expect("distinct degrees")
    }

    /// `|φ|² = φ · φ̄` as a symbol.
    pub fn modulus_squared(&self) -> Self {
        self.product(&self.conj_reflect())
    }

    /// Largest `|φ(z)|` over `grid_size` equispaced points of the circle.
    pub fn sup_norm(&self, grid_size: usize) -> f64 {
        circle_points(grid_size)
            .map(|z| self.eval(z).norm())
            .fold(0.0, f64::max)
    }

    /// Analytic and unimodular on the sampling grid.
    pub fn is_inner(&self, grid_size: usize, tol: f64) -> bool {
        if self.support().lo() < 0 || self.is_zero() {
            return false;
        }
        circle_points(grid_size).all(|z| (self.eval(z).norm() - 1.0).abs() <= tol)
    }

    /// `Σ |a_n|²`.
    pub fn coefficient_l2(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest `|a_n - b_n|` over both supports.
    pub fn max_coefficient_distance(&self, other: &Self) -> f64 {
        self.degrees()
            .chain(other.degrees())
            .map(|n| (self.coefficient(n) - other.coefficient(n)).norm())
            .fold(0.0, f64::max)
    }

    /// Symbol-file text: header, then one `n re im` line per nonzero term.
    pub fn to_file_string(&self) -> String {
        let mut out = String::from(FORMAT_HEADER);
        out.push('\n');
        for (n, c) in self.terms() {
            out.push_str(&format!(
                "{n} {} {}\n",
                text::fmt_real(c.re),
                text::fmt_real(c.im)
            ));
        }
        out
    }

    /// Reads the `n re im` line format; `#` starts a comment.
    pub fn parse_file(source: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, raw) in source.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [n, re, im] = fields[..] else {
                return Err(Error::parse(
                    0,
                    format!("line {}: expected `n re im`, got `{line}`", lineno + 1),
                ));
            };
            let n = n.parse::<i64>().map_err(|_| {
                Error::parse(0, format!("line {}: non-integer degree `{n}`", lineno + 1))
            })?;
            let re = text::parse_real(re, 0)?;
            let im = text::parse_real(im, 0)?;
            terms.push((n, Complex64::new(re, im)));
        }
        Self::from_terms(terms)
    }
}

/// Parses the inline syntax `n:re[+im i], n:…`, e.g. `-1:2, 0:3, 1:5+2i`.
pub fn parse_symbol(text: &str) -> Result<LaurentSymbol> {
    let mut terms = Vec::new();
    let mut column = 0;
    for raw in text.split(',') {
        let term = raw.trim();
        let start = column + (raw.len() - raw.trim_start().len());
        column += raw.len() + 1;
        if term.is_empty() {
            if text.trim().is_empty() {
                break;
            }
            return Err(Error::parse(start, "empty term"));
        }
        let (deg, val) = term
            .split_once(':')
            .ok_or_else(|| Error::parse(start, format!("expected n:value, got `{term}`")))?;
        let n = deg
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::parse(start, format!("non-integer degree `{}`", deg.trim())))?;
        let c = text::parse_complex_inline(val, start + deg.len() + 1)?;
        terms.push((n, c));
    }
    LaurentSymbol::from_terms(terms)
}

fn circle_points(grid_size: usize) -> impl Iterator<Item = Complex64> {
    let g = grid_size.max(1);
    (0..g).map(move |k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / g as f64))
}

impl fmt::Display for LaurentSymbol {
    /// Inline syntax accepted by [`parse_symbol`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0:0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(n, c)| {
                if c.im == 0.0 {
                    format!("{n}:{:?}", c.re)
                } else {
                    format!("{n}:{:?}{:+?}i", c.re, c.im)
                }
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl Add for &LaurentSymbol {
    type Output = LaurentSymbol;

    fn add(self, rhs: &LaurentSymbol) -> LaurentSymbol {
        let mut coeffs = self.coeffs.clone();
        for (n, c) in rhs.terms() {
            *coeffs.entry(n).or_default() += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        LaurentSymbol { coeffs }
    }
}

impl Sub for &LaurentSymbol {
    type Output = LaurentSymbol;

    fn sub(self, rhs: &LaurentSymbol) -> LaurentSymbol {
        self + &rhs.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &LaurentSymbol {
    type Output = LaurentSymbol;

    fn mul(self, rhs: &LaurentSymbol) -> LaurentSymbol {
        self.product(rhs)
    }
}
