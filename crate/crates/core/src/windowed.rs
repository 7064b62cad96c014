//! Exact finite sections of operators on `ℓ²(ℤ)` / `H²`.
//!
//! A [`WindowedMatrix`] stores the block `⟨A e_j, e_i⟩` for `i ∈ rows`,
//! `j ∈ cols`, addressed by absolute indices. Besides the entry-exactness flag it
//! remembers whether every column's full image lies inside `rows`
//! (`image_complete`) and whether every row's full support lies inside `cols`
//! (`support_complete`). Those two facts decide when a product of sections is
//! still an exact section of the product operator.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symbol::LaurentSymbol;
use crate::text::{self, FORMAT_HEADER};
use crate::window::IndexWindow;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The elementary operators from which every family is composed.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementaryKind {
    /// Dyadic decimation: `e_n ↦ e_{n/2}` for even `n`, `0` otherwise.
    W,
    /// `e_n ↦ e_{2n}`.
    WStar,
    /// `e_{2n} ↦ e_n`, `e_{2n+1} ↦ e_{-n-1}` on `H²`.
    K,
    /// `e_n ↦ e_{2n}`, `e_{-n-1} ↦ e_{2n+1}`.
    KStar,
    /// Flip `e_n ↦ e_{-n-1}` on `H²`.
    J,
    /// Orthogonal projection onto `H²`.
    P,
    /// Unilateral forward shift.
    U,
    /// Unilateral backward shift, `U* e_0 = 0`.
    UStar,
    /// `e_n ↦ e_{n+power}` on `L²`.
    BilateralShift(i64),
    /// Composition with `z^k`: `e_n ↦ e_{kn}` on `H²`.
    Cz(i64),
    /// Multiplication by `z^k`.
    Mz(i64),
    /// Multiplication by a Laurent symbol.
    Mult(LaurentSymbol),
}

impl ElementaryKind {
    fn name(&self) -> String {
        match self {
            ElementaryKind::W => "W".into(),
            ElementaryKind::WStar => "W*".into(),
            ElementaryKind::K => "K".into(),
            ElementaryKind::KStar => "K*".into(),
            ElementaryKind::J => "J".into(),
            ElementaryKind::P => "P".into(),
            ElementaryKind::U => "U".into(),
            ElementaryKind::UStar => "U*".into(),
            ElementaryKind::BilateralShift(p) => format!("S({p})"),
            ElementaryKind::Cz(k) => format!("Cz({k})"),
            ElementaryKind::Mz(k) => format!("Mz({k})"),
            ElementaryKind::Mult(_) => "M(φ)".into(),
        }
    }

    fn hardy_only(&self) -> bool {
        matches!(
            self,
            ElementaryKind::K
                | ElementaryKind::J
                | ElementaryKind::U
                | ElementaryKind::UStar
                | ElementaryKind::Cz(_)
        )
    }

    /// Coefficient vector of `(operator) e_j`.
    pub fn image(&self, j: i64) -> Vec<(i64, Complex64)> {
        let unit = |i: i64| vec![(i, ONE)];
        match self {
            ElementaryKind::W => {
                if j.rem_euclid(2) == 0 {
                    unit(j.div_euclid(2))
                } else {
                    vec![]
                }
            }
            ElementaryKind::WStar => unit(2 * j),
            ElementaryKind::K => {
                if j % 2 == 0 {
                    unit(j / 2)
                } else {
                    unit(-(j + 1) / 2)
                }
            }
            ElementaryKind::KStar => {
                if j >= 0 {
                    unit(2 * j)
                } else {
                    unit(-2 * j - 1)
                }
            }
            ElementaryKind::J => unit(-j - 1),
            ElementaryKind::P => {
                if j >= 0 {
                    unit(j)
                } else {
                    vec![]
                }
            }
            ElementaryKind::U => unit(j + 1),
            ElementaryKind::UStar => {
                if j >= 1 {
                    unit(j - 1)
                } else {
                    vec![]
                }
            }
            ElementaryKind::BilateralShift(p) => unit(j + p),
            ElementaryKind::Cz(k) => unit(k * j),
            ElementaryKind::Mz(k) => unit(j + k),
            ElementaryKind::Mult(phi) => phi.terms().map(|(n, c)| (j + n, c)).collect(),
        }
    }

    /// Column indices `j` (over the operator's whole domain) with a nonzero entry in row `i`.
    pub fn preimage(&self, i: i64) -> Vec<i64> {
        match self {
            ElementaryKind::W => vec![2 * i],
            ElementaryKind::WStar => {
                if i.rem_euclid(2) == 0 {
                    vec![i.div_euclid(2)]
                } else {
                    vec![]
                }
            }
            ElementaryKind::K => {
                if i >= 0 {
                    vec![2 * i]
                } else {
                    vec![-2 * i - 1]
                }
            }
            ElementaryKind::KStar => match i {
                i if i < 0 => vec![],
                i if i % 2 == 0 => vec![i / 2],
                i => vec![-(i + 1) / 2],
            },
            ElementaryKind::J => {
                if i <= -1 {
                    vec![-i - 1]
                } else {
                    vec![]
                }
            }
            ElementaryKind::P => {
                if i >= 0 {
                    vec![i]
                } else {
                    vec![]
                }
            }
            ElementaryKind::U => {
                if i >= 1 {
                    vec![i - 1]
                } else {
                    vec![]
                }
            }
            ElementaryKind::UStar => {
                if i >= 0 {
                    vec![i + 1]
                } else {
                    vec![]
                }
            }
            ElementaryKind::BilateralShift(p) => vec![i - p],
            ElementaryKind::Cz(k) => {
                if i >= 0 && i % k == 0 {
                    vec![i / k]
                } else {
                    vec![]
                }
            }
            ElementaryKind::Mz(k) => vec![i - k],
            ElementaryKind::Mult(phi) => phi.degrees().map(|n| i - n).collect(),
        }
    }

    fn validate(&self, domain: &IndexWindow) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::Domain {
                operator: self.name(),
                window: *domain,
                reason: reason.into(),
            })
        };
        match self {
            ElementaryKind::Cz(k) if *k < 1 => fail("composition power must be at least 1"),
            ElementaryKind::Mz(k) if *k < 0 && domain.is_hardy() && !domain.is_empty() => {
                fail("negative powers of z need a bilateral window")
            }
            _ if self.hardy_only() && !domain.is_hardy() => {
                fail("operator acts on H², window has negative indices")
            }
            _ => Ok(()),
        }
    }
}

/// A complex vector indexed by an [`IndexWindow`].
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedVector {
    window: IndexWindow,
    values: Vec<Complex64>,
}

impl IndexedVector {
    pub fn zeros(window: IndexWindow) -> Self {
        IndexedVector {
            window,
            values: vec![ZERO; window.len()],
        }
    }

    /// The basis vector `e_n`.
    pub fn basis(n: i64) -> Self {
        IndexedVector {
            window: IndexWindow::single(n),
            values: vec![ONE],
        }
    }

    pub fn from_values(window: IndexWindow, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::WindowMismatch(format!(
                "{} values for window {window}",
                values.len()
            )));
        }
        Ok(IndexedVector { window, values })
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    /// Component at `i`, zero outside the window.
    pub fn get(&self, i: i64) -> Complex64 {
        self.window.position(i).map_or(ZERO, |p| self.values[p])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|c| *c == ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.window.iter().zip(self.values.iter().copied())
    }

    /// Largest `|u_i - v_i|` over the union of both windows.
    pub fn max_abs_diff(&self, other: &IndexedVector) -> f64 {
        self.window
            .hull(&other.window)
            .iter()
            .map(|i| (self.get(i) - other.get(i)).norm())
            .fold(0.0, f64::max)
    }
}

/// A dense section of an operator matrix on absolute row/column windows.
#[derive(Debug, Clone)]
pub struct WindowedMatrix {
    rows: IndexWindow,
    cols: IndexWindow,
    data: Vec<Complex64>,
    exact: bool,
    image_complete: bool,
    support_complete: bool,
}

impl WindowedMatrix {
    /// Zero block with no completeness claims.
    pub fn zeros(rows: IndexWindow, cols: IndexWindow) -> Self {
        WindowedMatrix {
            rows,
            cols,
            data: vec![ZERO; rows.len() * cols.len()],
            exact: true,
            image_complete: false,
            support_complete: false,
        }
    }

    pub fn from_fn(
        rows: IndexWindow,
        cols: IndexWindow,
        mut f: impl FnMut(i64, i64) -> Complex64,
    ) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in rows.iter() {
            for j in cols.iter() {
                let v = f(i, j);
                m.set(i, j, v);
            }
        }
        m
    }

    /// Identity on `window`; both completeness flags hold.
    pub fn identity(window: IndexWindow) -> Self {
        let mut m = Self::from_fn(window, window, |i, j| if i == j { ONE } else { ZERO });
        m.image_complete = true;
        m.support_complete = true;
        m
    }

    pub fn rows(&self) -> IndexWindow {
        self.rows
    }

    pub fn cols(&self) -> IndexWindow {
        self.cols
    }

    /// Every stored entry equals the operator's infinite-matrix entry.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Every column's full image lies inside `rows`.
    pub fn is_image_complete(&self) -> bool {
        self.image_complete
    }

    /// Every row's full support lies inside `cols`.
    pub fn is_support_complete(&self) -> bool {
        self.support_complete
    }

    pub(crate) fn with_flags(mut self, exact: bool, image: bool, support: bool) -> Self {
        self.exact = exact;
        self.image_complete = image;
        self.support_complete = support;
        self
    }

    /// Marks the section as column-complete; callers vouch for it.
    pub fn assume_image_complete(mut self) -> Self {
        self.image_complete = true;
        self
    }

    fn offset(&self, i: i64, j: i64) -> Option<usize> {
        let r = self.rows.position(i)?;
        let c = self.cols.position(j)?;
        Some(r * self.cols.len() + c)
    }

    pub fn get(&self, i: i64, j: i64) -> Option<Complex64> {
        self.offset(i, j).map(|k| self.data[k])
    }

    /// Entry at absolute `(i, j)`. Panics outside the windows.
    pub fn entry(&self, i: i64, j: i64) -> Complex64 {
        self.get(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside {} x {}", self.rows, self.cols))
    }

    pub fn set(&mut self, i: i64, j: i64, v: Complex64) {
        let k = self
            .offset(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside {} x {}", self.rows, self.cols));
        self.data[k] = v;
    }

    pub fn column(&self, j: i64) -> Result<IndexedVector> {
        if !self.cols.contains(j) {
            return Err(Error::OutOfWindow {
                index: j,
                window: self.cols,
            });
        }
        Ok(IndexedVector {
            window: self.rows,
            values: self.rows.iter().map(|i| self.entry(i, j)).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Nonzero entries in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        self.rows
            .iter()
            .flat_map(move |i| self.cols.iter().map(move |j| (i, j)))
            .zip(self.data.iter().copied())
            .filter(|(_, v)| *v != ZERO)
            .map(|((i, j), v)| (i, j, v))
    }

    /// Largest `|self - other|` over the shared windows (zero if they do not meet).
    pub fn max_abs_diff(&self, other: &WindowedMatrix) -> f64 {
        let rows = self.rows.intersect(&other.rows);
        let cols = self.cols.intersect(&other.cols);
        let mut worst = 0.0f64;
        for i in rows.iter() {
            for j in cols.iter() {
                worst = worst.max((self.entry(i, j) - other.entry(i, j)).norm());
            }
        }
        worst
    }

    pub fn same_windows(&self, other: &WindowedMatrix) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Sub-block on `rows × cols`, which must lie inside the current windows.
    pub fn restrict(&self, rows: IndexWindow, cols: IndexWindow) -> Result<WindowedMatrix> {
        if !self.rows.covers(&rows) || !self.cols.covers(&cols) {
            return Err(Error::WindowMismatch(format!(
                "cannot restrict {} x {} to {} x {}",
                self.rows, self.cols, rows, cols
            )));
        }
        let mut out = Self::from_fn(rows, cols, |i, j| self.entry(i, j));
        out.exact = self.exact;
        // Completeness survives only if everything cut away was zero.
        let dropped_rows_zero = self
            .nonzeros()
            .all(|(i, j, _)| !cols.contains(j) || rows.contains(i));
        let dropped_cols_zero = self
            .nonzeros()
            .all(|(i, j, _)| !rows.contains(i) || cols.contains(j));
        out.image_complete = self.image_complete && dropped_rows_zero;
        out.support_complete = self.support_complete && dropped_cols_zero;
        Ok(out)
    }

    pub fn restrict_rows(&self, rows: IndexWindow) -> Result<WindowedMatrix> {
        self.restrict(rows, self.cols)
    }

    pub fn restrict_cols(&self, cols: IndexWindow) -> Result<WindowedMatrix> {
        self.restrict(self.rows, cols)
    }

    /// Extends the row window to `self.rows ∪ rows` with zero rows.
    ///
    /// Only sound when every column's image already lies inside the rows.
    pub fn pad_rows(&self, rows: IndexWindow) -> Result<WindowedMatrix> {
        if self.exact && !self.image_complete {
            return Err(Error::ExactnessLoss(format!(
                "cannot pad rows {} of a column-incomplete section",
                self.rows
            )));
        }
        let hull = self.rows.hull(&rows);
        let mut out = Self::from_fn(hull, self.cols, |i, j| self.get(i, j).unwrap_or(ZERO));
        out.exact = self.exact;
        out.image_complete = self.image_complete;
        out.support_complete = false;
        Ok(out)
    }

    /// Section on exactly `rows × cols`: pads with zero rows if needed, then restricts.
    pub fn section(&self, rows: IndexWindow, cols: IndexWindow) -> Result<WindowedMatrix> {
        let padded = if self.rows.covers(&rows) {
            self.clone()
        } else {
            self.pad_rows(rows)?
        };
        padded.restrict(rows, cols)
    }

    pub fn scale(&self, s: Complex64) -> WindowedMatrix {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `self - other`; windows must agree, except that two column-complete
    /// sections are first padded to a common row window.
    pub fn sub(&self, other: &WindowedMatrix) -> Result<WindowedMatrix> {
        let (a, b) = self.aligned(other)?;
        let mut out = a.clone();
        for (x, y) in out.data.iter_mut().zip(b.data.iter()) {
            *x -= y;
        }
        out.exact = a.exact && b.exact;
        out.image_complete = a.image_complete && b.image_complete;
        out.support_complete = a.support_complete && b.support_complete;
        Ok(out)
    }

    fn aligned(&self, other: &WindowedMatrix) -> Result<(WindowedMatrix, WindowedMatrix)> {
        if self.cols != other.cols {
            return Err(Error::WindowMismatch(format!(
                "column windows differ: {} vs {}",
                self.cols, other.cols
            )));
        }
        if self.rows == other.rows {
            return Ok((self.clone(), other.clone()));
        }
        if self.image_complete && other.image_complete {
            let rows = self.rows.hull(&other.rows);
            return Ok((self.pad_rows(rows)?, other.pad_rows(rows)?));
        }
        Err(Error::WindowMismatch(format!(
            "row windows differ: {} vs {}",
            self.rows, other.rows
        )))
    }

    /// Conjugate transpose; windows and completeness flags swap.
    pub fn adjoint(&self) -> WindowedMatrix {
        let mut out = Self::from_fn(self.cols, self.rows, |i, j| self.entry(j, i).conj());
        out.exact = self.exact;
        out.image_complete = self.support_complete;
        out.support_complete = self.image_complete;
        out
    }

    /// `A v` on `A.rows`.
    pub fn apply(&self, v: &IndexedVector) -> Result<IndexedVector> {
        if !self.cols.covers(&v.window) {
            return Err(Error::WindowMismatch(format!(
                "vector window {} not inside columns {}",
                v.window, self.cols
            )));
        }
        let mut out = IndexedVector::zeros(self.rows);
        for (j, x) in v.iter().filter(|(_, x)| *x != ZERO) {
            for (p, i) in self.rows.iter().enumerate() {
                out.values[p] += self.entry(i, j) * x;
            }
        }
        Ok(out)
    }

    /// Product `self · rhs` as a section on `self.rows × rhs.cols`.
    ///
    /// Requires `self.cols ⊇ rhs.rows`. When `rhs` is column-complete the
    /// product is exact on all rows. Otherwise `self` must be row-complete and
    /// the result keeps only the rows whose support lies in `rhs.rows`.
    pub fn compose(&self, rhs: &WindowedMatrix) -> Result<WindowedMatrix> {
        if !self.cols.covers(&rhs.rows) {
            return Err(Error::WindowMismatch(format!(
                "left columns {} do not cover right rows {}",
                self.cols, rhs.rows
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for k in rhs.rows.iter() {
            for j in rhs.cols.iter() {
                let b = rhs.entry(k, j);
                if b == ZERO {
                    continue;
                }
                for i in self.rows.iter() {
                    let a = self.entry(i, k);
                    if a != ZERO {
                        let p = out.offset(i, j).expect("in window");
                        out.data[p] += a * b;
                    }
                }
            }
        }
        let inputs_exact = self.exact && rhs.exact;
        if !inputs_exact || rhs.image_complete {
            out.exact = inputs_exact;
            out.image_complete = self.image_complete && rhs.image_complete;
            out.support_complete =
                self.support_complete && rhs.support_complete && self.cols == rhs.rows;
            return Ok(out);
        }
        if !self.support_complete {
            return Err(Error::ExactnessLoss(format!(
                "right factor rows {} are truncated and left factor rows are not fully supported",
                rhs.rows
            )));
        }
        let good: Vec<i64> = self
            .rows
            .iter()
            .filter(|&i| {
                self.cols
                    .iter()
                    .all(|k| rhs.rows.contains(k) || self.entry(i, k) == ZERO)
            })
            .collect();
        let kept = IndexWindow::enclosing(good.iter().copied());
        if kept.is_empty() || kept.len() != good.len() {
            return Err(Error::ExactnessLoss(format!(
                "no contiguous block of rows of the product is exact (right rows {})",
                rhs.rows
            )));
        }
        let mut out = out.restrict_rows(kept)?;
        out.exact = true;
        out.image_complete = false;
        out.support_complete = false;
        Ok(out)
    }

    /// Text dump: `rows lo hi`, `cols lo hi`, then one line of `re:im` entries per row.
    pub fn to_dump_string(&self) -> String {
        let mut out = String::from(FORMAT_HEADER);
        out.push('\n');
        out.push_str(&format!("rows {} {}\n", self.rows.lo(), self.rows.hi()));
        out.push_str(&format!("cols {} {}\n", self.cols.lo(), self.cols.hi()));
        let width = self.cols.len();
        for r in 0..self.rows.len() {
            let line: Vec<String> = self.data[r * width..(r + 1) * width]
                .iter()
                .map(|c| text::fmt_complex(*c))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses a dump. Loaded sections are taken as exact with no completeness claims.
    pub fn parse_dump(source: &str) -> Result<WindowedMatrix> {
        let mut lines = source
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let mut header = |key: &str| -> Result<IndexWindow> {
            let (n, line) = lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("missing `{key}` header")))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            match f[..] {
                [k, lo, hi] if k == key => {
                    let lo = lo.parse::<i64>();
                    let hi = hi.parse::<i64>();
                    match (lo, hi) {
                        (Ok(lo), Ok(hi)) => Ok(IndexWindow::new(lo, hi)),
                        _ => Err(Error::parse(
                            0,
                            format!("line {}: bad window bounds", n + 1),
                        )),
                    }
                }
                _ => Err(Error::parse(
                    0,
                    format!("line {}: expected `{key} lo hi`", n + 1),
                )),
            }
        };
        let rows = header("rows")?;
        let cols = header("cols")?;
        let mut m = Self::zeros(rows, cols);
        for i in rows.iter() {
            let (n, line) = lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("missing data row for index {i}")))?;
            let entries: Vec<&str> = line.split(' ').filter(|s| !s.is_empty()).collect();
            if entries.len() != cols.len() {
                return Err(Error::parse(
                    0,
                    format!(
                        "line {}: {} entries, expected {}",
                        n + 1,
                        entries.len(),
                        cols.len()
                    ),
                ));
            }
            for (j, e) in cols.iter().zip(entries) {
                m.set(i, j, text::parse_complex_pair(e, 0)?);
            }
        }
        if let Some((n, _)) = lines.next() {
            return Err(Error::parse(0, format!("line {}: trailing data", n + 1)));
        }
        Ok(m)
    }

    /// Bitwise equality of windows and entries.
    pub fn bit_eq(&self, other: &WindowedMatrix) -> bool {
        self.same_windows(other)
            && self
                .data
                .iter()
                .zip(other.data.iter())
                .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits())
    }
}

impl fmt::Display for WindowedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dump_string())
    }
}

/// Exact section of an elementary operator on `domain`, with the codomain
/// window set to the smallest window holding every column's image.
pub fn build_elementary(kind: &ElementaryKind, domain: IndexWindow) -> Result<WindowedMatrix> {
    kind.validate(&domain)?;
    let images: Vec<Vec<(i64, Complex64)>> = domain.iter().map(|j| kind.image(j)).collect();
    let codomain = match kind {
        ElementaryKind::Mult(phi) if phi.is_zero() => domain,
        _ => IndexWindow::enclosing(images.iter().flatten().map(|(i, _)| *i)),
    };
    let mut m = WindowedMatrix::zeros(codomain, domain);
    for (j, col) in domain.iter().zip(images) {
        for (i, v) in col {
            m.set(i, j, v);
        }
    }
    let support_complete = codomain.iter().all(|i| {
        kind.preimage(i)
            .into_iter()
            .filter(|&j| !kind.hardy_only() || j >= 0)
            .all(|j| domain.contains(j))
    });
    Ok(m.with_flags(true, true, support_complete))
}

/// Composes elementary sections right to left starting from `domain`, each
/// built on the previous codomain: `chain = [A, B, C]` yields `A·B·C`.
pub fn build_chain(chain: &[ElementaryKind], domain: IndexWindow) -> Result<WindowedMatrix> {
    let mut acc: Option<WindowedMatrix> = None;
    for kind in chain.iter().rev() {
        let input = acc.as_ref().map_or(domain, |m| m.rows());
        let step = build_elementary(kind, input)?;
        acc = Some(match acc {
            None => step,
            Some(prev) => step.compose(&prev)?,
        });
    }
    acc.ok_or_else(|| Error::Precondition("empty operator chain".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(lo: i64, hi: i64) -> IndexWindow {
        IndexWindow::new(lo, hi)
    }

    fn is_identity(m: &WindowedMatrix) -> bool {
        m.rows() == m.cols()
            && m.rows().iter().all(|i| {
                m.cols()
                    .iter()
                    .all(|j| m.entry(i, j) == if i == j { ONE } else { ZERO })
            })
    }

    fn all_kinds() -> Vec<ElementaryKind> {
        vec![
            ElementaryKind::W,
            ElementaryKind::WStar,
            ElementaryKind::K,
            ElementaryKind::KStar,
            ElementaryKind::J,
            ElementaryKind::P,
            ElementaryKind::U,
            ElementaryKind::UStar,
            ElementaryKind::BilateralShift(-2),
            ElementaryKind::BilateralShift(3),
            ElementaryKind::Cz(1),
            ElementaryKind::Cz(3),
            ElementaryKind::Mz(2),
            ElementaryKind::Mult(LaurentSymbol::from_real_slice(-1, &[2.0, 3.0, 5.0, 7.0])),
        ]
    }

    #[test]
    fn w_section() {
        let m = build_elementary(&ElementaryKind::W, w(0, 4)).unwrap();
        assert_eq!(m.rows(), w(0, 2));
        for j in 0..=4 {
            for i in 0..=2 {
                let expect = if j % 2 == 0 && i == j / 2 { ONE } else { ZERO };
                assert_eq!(m.entry(i, j), expect);
            }
        }
        let e1 = m.apply(&IndexedVector::basis(2)).unwrap();
        assert_eq!(e1.max_abs_diff(&IndexedVector::basis(1)), 0.0);
    }

    #[test]
    fn k_section() {
        let m = build_elementary(&ElementaryKind::K, w(0, 3)).unwrap();
        assert_eq!(m.rows(), w(-2, 1));
        for (j, i) in [(0, 0), (1, -1), (2, 1), (3, -2)] {
            assert_eq!(
                m.column(j).unwrap().max_abs_diff(&IndexedVector::basis(i)),
                0.0
            );
        }
    }

    #[test]
    fn codomain_formulas() {
        let rows = |k: ElementaryKind, d: IndexWindow| build_elementary(&k, d).unwrap().rows();
        assert_eq!(rows(ElementaryKind::W, w(-3, 7)), w(-1, 3));
        assert_eq!(rows(ElementaryKind::UStar, w(0, 5)), w(0, 4));
        assert_eq!(rows(ElementaryKind::UStar, w(3, 5)), w(2, 4));
        assert!(rows(ElementaryKind::UStar, w(0, 0)).is_empty());
        assert_eq!(rows(ElementaryKind::P, w(-3, 4)), w(0, 4));
        assert_eq!(rows(ElementaryKind::Cz(3), w(1, 4)), w(3, 12));
        assert_eq!(rows(ElementaryKind::J, w(0, 2)), w(-3, -1));
        let phi = LaurentSymbol::from_real_slice(-1, &[2.0, 3.0, 5.0, 7.0]);
        assert_eq!(rows(ElementaryKind::Mult(phi), w(0, 3)), w(-1, 5));
        assert_eq!(
            rows(ElementaryKind::Mult(LaurentSymbol::zero()), w(0, 3)),
            w(0, 3)
        );
    }

    #[test]
    fn multiplication_by_one_is_identity() {
        let m =
            build_elementary(&ElementaryKind::Mult(LaurentSymbol::constant(1.0)), w(0, 3)).unwrap();
        assert!(is_identity(&m));
    }

    #[test]
    fn side_constraints() {
        for k in [
            ElementaryKind::J,
            ElementaryKind::K,
            ElementaryKind::U,
            ElementaryKind::UStar,
        ] {
            assert!(matches!(
                build_elementary(&k, w(-1, 3)),
                Err(Error::Domain { .. })
            ));
        }
        assert!(build_elementary(&ElementaryKind::Cz(0), w(0, 3)).is_err());
        assert!(build_elementary(&ElementaryKind::Mz(-1), w(0, 3)).is_err());
        assert!(build_elementary(&ElementaryKind::Mz(-1), w(-2, 3)).is_ok());
    }

    #[test]
    fn k_star_k_is_identity() {
        for n in [0, 1, 3, 8, 17] {
            let k = build_elementary(&ElementaryKind::K, w(0, n)).unwrap();
            let ks = build_elementary(&ElementaryKind::KStar, k.rows()).unwrap();
            assert!(is_identity(&ks.compose(&k).unwrap()));
        }
    }

    #[test]
    fn k_k_star_is_identity_on_bilateral_images() {
        for (lo, hi) in [(-2, 1), (-5, 4), (-1, 0), (-9, 8)] {
            let ks = build_elementary(&ElementaryKind::KStar, w(lo, hi)).unwrap();
            let k = build_elementary(&ElementaryKind::K, ks.rows()).unwrap();
            let prod = k.compose(&ks).unwrap();
            assert_eq!(prod.cols(), w(lo, hi));
            let sq = prod.restrict_rows(w(lo, hi)).unwrap();
            assert!(is_identity(&sq));
        }
    }

    #[test]
    fn w_w_star_is_identity() {
        let ws = build_elementary(&ElementaryKind::WStar, w(-3, 5)).unwrap();
        let wm = build_elementary(&ElementaryKind::W, ws.rows()).unwrap();
        assert!(is_identity(&wm.compose(&ws).unwrap()));
    }

    #[test]
    fn p_after_j_vanishes() {
        let pj = build_chain(&[ElementaryKind::P, ElementaryKind::J], w(0, 2)).unwrap();
        assert_eq!(pj.cols(), w(0, 2));
        assert_eq!(pj.max_abs(), 0.0);
        // The section is column-complete, so it pads to any Hardy row window.
        let padded = pj.section(w(0, 4), w(0, 2)).unwrap();
        assert_eq!(padded.max_abs(), 0.0);
    }

    #[test]
    fn adjoint_of_w_is_w_star() {
        let wm = build_elementary(&ElementaryKind::W, w(0, 4)).unwrap();
        let ws = build_elementary(&ElementaryKind::WStar, w(0, 2)).unwrap();
        let adj = wm.adjoint();
        assert_eq!(adj.max_abs_diff(&ws), 0.0);
        assert!(adj.adjoint().bit_eq(&wm));
        assert!(is_identity(&WindowedMatrix::identity(w(-2, 2)).adjoint()));
    }

    #[test]
    fn apply_examples() {
        let id = WindowedMatrix::identity(w(-2, 3));
        let v = IndexedVector::from_values(
            w(-1, 1),
            vec![Complex64::new(1.0, 2.0), ZERO, Complex64::new(-3.0, 0.5)],
        )
        .unwrap();
        assert_eq!(id.apply(&v).unwrap().max_abs_diff(&v), 0.0);
        let us = build_elementary(&ElementaryKind::UStar, w(0, 4)).unwrap();
        assert!(us.apply(&IndexedVector::basis(0)).unwrap().is_zero());
        assert!(us.apply(&IndexedVector::basis(7)).is_err());
    }

    #[test]
    fn compose_rejects_uncovered_rows() {
        let k = build_elementary(&ElementaryKind::K, w(0, 5)).unwrap();
        let p = build_elementary(&ElementaryKind::P, w(0, 2)).unwrap();
        assert!(matches!(p.compose(&k), Err(Error::WindowMismatch(_))));
    }

    #[test]
    fn compose_with_truncated_right_factor() {
        // A truncated section (rows cut off) times a row-local left factor keeps the exact rows.
        let phi = LaurentSymbol::from_real_slice(-1, &[2.0, 3.0, 5.0, 7.0]);
        let full = build_elementary(&ElementaryKind::Mult(phi.clone()), w(0, 6)).unwrap();
        let cut = full.restrict_rows(w(0, 4)).unwrap();
        assert!(!cut.is_image_complete());
        let us = build_elementary(&ElementaryKind::UStar, cut.rows()).unwrap();
        let prod = us.compose(&cut).unwrap();
        assert_eq!(prod.rows(), w(0, 3));
        for i in 0..=3 {
            for j in 0..=6 {
                assert_eq!(prod.entry(i, j), full.entry(i + 1, j));
            }
        }
        // Multiplication rows are not locally supported: refused.
        let m = build_elementary(&ElementaryKind::Mult(phi), cut.rows()).unwrap();
        assert!(matches!(m.compose(&cut), Err(Error::ExactnessLoss(_))));
    }

    #[test]
    fn dump_round_trip_is_bit_exact() {
        let phi = LaurentSymbol::from_terms([
            (-1, Complex64::new(0.1, -1.0 / 3.0)),
            (2, Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 1e-300)),
        ])
        .unwrap();
        let m = build_elementary(&ElementaryKind::Mult(phi), w(-2, 3)).unwrap();
        let back = WindowedMatrix::parse_dump(&m.to_dump_string()).unwrap();
        assert!(back.bit_eq(&m));
        let empty = build_elementary(&ElementaryKind::UStar, w(0, 0)).unwrap();
        assert!(WindowedMatrix::parse_dump(&empty.to_dump_string())
            .unwrap()
            .bit_eq(&empty));
    }

    #[test]
    fn dump_parse_errors() {
        assert!(WindowedMatrix::parse_dump("rows 0 1\ncols 0 0\n1:0\n").is_err());
        assert!(WindowedMatrix::parse_dump("rows 0 0\ncols 0 1\n1:0\n").is_err());
        assert!(WindowedMatrix::parse_dump("cols 0 0\nrows 0 0\n1:0\n").is_err());
        assert!(WindowedMatrix::parse_dump("rows 0 0\ncols 0 0\n1\n").is_err());
        assert!(WindowedMatrix::parse_dump("rows 0 0\ncols 0 0\n1:0\n2:0\n").is_err());
    }

    #[test]
    fn column_norms_match_definitions() {
        for kind in all_kinds() {
            let domain = if kind.hardy_only() {
                w(0, 12)
            } else {
                w(-6, 12)
            };
            let m = build_elementary(&kind, domain).unwrap();
            assert!(m.is_exact() && m.is_image_complete());
            for j in domain.iter() {
                let col = m.column(j).unwrap();
                let expected: f64 = kind.image(j).iter().map(|(_, c)| c.norm_sqr()).sum();
                assert_eq!(col.norm_sqr(), expected, "{kind:?} column {j}");
                if !matches!(kind, ElementaryKind::Mult(_)) {
                    assert!(col.iter().all(|(_, c)| c == ZERO || c == ONE));
                    assert!(expected == 0.0 || expected == 1.0);
                }
            }
        }
    }

    #[test]
    fn preimage_agrees_with_image() {
        for kind in all_kinds() {
            let lo = if kind.hardy_only() { 0 } else { -30 };
            for j in lo..=30 {
                for (i, _) in kind.image(j) {
                    assert!(kind.preimage(i).contains(&j), "{kind:?}: {j} -> {i}");
                }
            }
            for i in -20..=20 {
                for j in kind.preimage(i) {
                    if kind.hardy_only() && j < 0 {
                        continue;
                    }
                    assert!(
                        kind.image(j).iter().any(|(r, _)| *r == i),
                        "{kind:?}: row {i} col {j}"
                    );
                }
            }
        }
    }

    fn dense(rows: IndexWindow, cols: IndexWindow, seed: u64) -> WindowedMatrix {
        let mut s = seed;
        WindowedMatrix::from_fn(rows, cols, |_, _| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let a = ((s >> 33) % 7) as f64 - 3.0;
            let b = ((s >> 13) % 5) as f64 - 2.0;
            Complex64::new(a, b)
        })
        .with_flags(true, true, true)
    }

    proptest! {
        #[test]
        fn compose_is_associative(lo in -3i64..3, n in 1i64..5, m in 1i64..5, p in 1i64..5, seed in 0u64..1000) {
            let a = dense(IndexWindow::new(lo, lo + n), IndexWindow::new(0, m), seed);
            let b = dense(IndexWindow::new(0, m), IndexWindow::new(-1, p), seed + 1);
            let c = dense(IndexWindow::new(-1, p), IndexWindow::new(2, 4), seed + 2);
            let left = a.compose(&b).unwrap().compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert!(left.same_windows(&right));
            prop_assert_eq!(left.max_abs_diff(&right), 0.0);
        }

        #[test]
        fn adjoint_reverses_products(n in 1i64..5, m in 1i64..5, p in 1i64..5, seed in 0u64..1000) {
            let a = dense(IndexWindow::new(0, n), IndexWindow::new(-2, m), seed);
            let b = dense(IndexWindow::new(-2, m), IndexWindow::new(1, p), seed + 7);
            let lhs = a.compose(&b).unwrap().adjoint();
            let rhs = b.adjoint().compose(&a.adjoint()).unwrap();
            prop_assert!(lhs.same_windows(&rhs));
            prop_assert_eq!(lhs.max_abs_diff(&rhs), 0.0);
        }

        #[test]
        fn dump_round_trip(n in 0i64..4, m in 0i64..4, seed in 0u64..1000, scale in -1e6f64..1e6) {
            let a = dense(IndexWindow::new(-1, n), IndexWindow::new(2, m + 2), seed)
                .scale(Complex64::new(scale / 3.0, 0.0));
            let back = WindowedMatrix::parse_dump(&a.to_dump_string()).unwrap();
            prop_assert!(back.bit_eq(&a));
        }
    }
}
