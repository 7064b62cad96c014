//! Closed-form matrices of the operator families, and the compositional
//! builder that realizes each family as a product of elementary sections.
//!
//! Every closed-form entry is a single symbol coefficient (possibly
//! conjugated), so a family section is described exactly by its
//! [`CoefficientRef`] pattern.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symbol::LaurentSymbol;
use crate::window::IndexWindow;
use crate::windowed::{build_chain, ElementaryKind, WindowedMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `T_φ`, entry `a_{i-j}`.
    Toeplitz,
    /// `H_φ = P M_φ J`, entry `a_{i+j+1}`.
    Hankel,
    /// `B_φ = P W M_φ`, entry `a_{2i-j}`.
    SlantToeplitz,
    /// `L_φ = W H_φ`, entry `a_{2i+j+1}`.
    SlantHankel,
    /// `S_φ = P M_φ K`.
    HToeplitz,
    /// `V_φ = W P M_φ K`.
    SlantHToeplitz,
    /// `V_φ* = K* M_φ̄ P W*`.
    SlantHAdjoint,
    /// The `A_m` extension of `V_φ` to rows `≥ -m`.
    Extension(u32),
}

impl FamilyKind {
    /// The seven kinds that have a compositional definition.
    pub const COMPOSITIONAL: [FamilyKind; 7] = [
        FamilyKind::Toeplitz,
        FamilyKind::Hankel,
        FamilyKind::SlantToeplitz,
        FamilyKind::SlantHankel,
        FamilyKind::HToeplitz,
        FamilyKind::SlantHToeplitz,
        FamilyKind::SlantHAdjoint,
    ];

    /// Smallest admissible row index.
    pub fn row_min(&self) -> i64 {
        match self {
            FamilyKind::Extension(m) => -(*m as i64),
            _ => 0,
        }
    }

    pub fn name(&self) -> String {
        match self {
            FamilyKind::Toeplitz => "toeplitz".into(),
            FamilyKind::Hankel => "hankel".into(),
            FamilyKind::SlantToeplitz => "slant-toeplitz".into(),
            FamilyKind::SlantHankel => "slant-hankel".into(),
            FamilyKind::HToeplitz => "h-toeplitz".into(),
            FamilyKind::SlantHToeplitz => "slant-h-toeplitz".into(),
            FamilyKind::SlantHAdjoint => "slant-h-adjoint".into(),
            FamilyKind::Extension(m) => format!("extension-{m}"),
        }
    }

    pub fn from_name(name: &str) -> Option<FamilyKind> {
        if let Some(m) = name.strip_prefix("extension-") {
            return m.parse().ok().map(FamilyKind::Extension);
        }
        Self::COMPOSITIONAL.into_iter().find(|k| k.name() == name)
    }

    fn check_index(&self, i: i64, j: i64) -> Result<()> {
        if j < 0 || i < self.row_min() {
            return Err(Error::Precondition(format!(
                "entry ({i}, {j}) outside the index range of {}",
                self.name()
            )));
        }
        Ok(())
    }

    /// Which coefficient sits at `(i, j)`.
    pub fn coefficient_ref(&self, i: i64, j: i64) -> Result<CoefficientRef> {
        self.check_index(i, j)?;
        let plain = |index| CoefficientRef {
            index,
            conjugated: false,
        };
        Ok(match self {
            FamilyKind::Toeplitz => plain(i - j),
            FamilyKind::Hankel => plain(i + j + 1),
            FamilyKind::SlantToeplitz => plain(2 * i - j),
            FamilyKind::SlantHankel => plain(2 * i + j + 1),
            FamilyKind::HToeplitz => {
                let n = j / 2;
                if j % 2 == 0 {
                    plain(i - n)
                } else {
                    plain(i + n + 1)
                }
            }
            FamilyKind::SlantHToeplitz | FamilyKind::Extension(_) => {
                let n = j / 2;
                if j % 2 == 0 {
                    plain(2 * i - n)
                } else {
                    plain(2 * i + n + 1)
                }
            }
            FamilyKind::SlantHAdjoint => CoefficientRef {
                index: if i % 2 == 0 {
                    2 * j - i / 2
                } else {
                    2 * j + (i + 1) / 2
                },
                conjugated: true,
            },
        })
    }

    /// Rows `i ≥ row_min` at which column `j` holds coefficient `a_k`.
    pub fn rows_holding(&self, j: i64, k: i64) -> Vec<i64> {
        let half = |x: i64| (x.rem_euclid(2) == 0).then_some(x.div_euclid(2));
        let n = j / 2;
        let even = j % 2 == 0;
        let hits: Vec<i64> = match self {
            FamilyKind::Toeplitz => vec![j + k],
            FamilyKind::Hankel => vec![k - j - 1],
            FamilyKind::SlantToeplitz => half(j + k).into_iter().collect(),
            FamilyKind::SlantHankel => half(k - j - 1).into_iter().collect(),
            FamilyKind::HToeplitz => vec![if even { k + n } else { k - n - 1 }],
            FamilyKind::SlantHToeplitz | FamilyKind::Extension(_) => {
                half(if even { k + n } else { k - n - 1 })
                    .into_iter()
                    .collect()
            }
            FamilyKind::SlantHAdjoint => {
                let mut v = vec![4 * j - 2 * k];
                if k - 2 * j >= 1 {
                    v.push(2 * (k - 2 * j) - 1);
                }
                v
            }
        };
        hits.into_iter().filter(|&i| i >= self.row_min()).collect()
    }

    /// Smallest row window holding every nonzero entry of the columns in `cols`.
    pub fn image_rows(&self, phi: &LaurentSymbol, cols: IndexWindow) -> IndexWindow {
        IndexWindow::enclosing(
            cols.iter()
                .flat_map(|j| phi.degrees().flat_map(move |k| self.rows_holding(j, k))),
        )
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A reference to the symbol coefficient `a_index` or its conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoefficientRef {
    pub index: i64,
    pub conjugated: bool,
}

impl CoefficientRef {
    pub fn plain(index: i64) -> Self {
        CoefficientRef {
            index,
            conjugated: false,
        }
    }

    pub fn conj(index: i64) -> Self {
        CoefficientRef {
            index,
            conjugated: true,
        }
    }

    pub fn resolve(&self, phi: &LaurentSymbol) -> Complex64 {
        let c = phi.coefficient(self.index);
        if self.conjugated {
            c.conj()
        } else {
            c
        }
    }
}

impl fmt::Display for CoefficientRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conjugated {
            write!(f, "conj(a_{})", self.index)
        } else {
            write!(f, "a_{}", self.index)
        }
    }
}

/// Closed-form entry `(i, j)` of the family's matrix.
pub fn entry(kind: FamilyKind, phi: &LaurentSymbol, i: i64, j: i64) -> Result<Complex64> {
    Ok(kind.coefficient_ref(i, j)?.resolve(phi))
}

/// The symbolic pattern of a block: which coefficient sits where.
pub fn pattern(
    kind: FamilyKind,
    rows: IndexWindow,
    cols: IndexWindow,
) -> Result<Vec<Vec<CoefficientRef>>> {
    rows.iter()
        .map(|i| cols.iter().map(|j| kind.coefficient_ref(i, j)).collect())
        .collect()
}

fn check_windows(kind: FamilyKind, rows: IndexWindow, cols: IndexWindow) -> Result<()> {
    if !cols.is_empty() && cols.lo() < 0 {
        return Err(Error::Domain {
            operator: kind.name(),
            window: cols,
            reason: "columns index H², window has negative indices".into(),
        });
    }
    if !rows.is_empty() && rows.lo() < kind.row_min() {
        return Err(Error::Domain {
            operator: kind.name(),
            window: rows,
            reason: format!("rows start at {}", kind.row_min()),
        });
    }
    Ok(())
}

/// Section of the family on caller-chosen windows, from the closed form.
pub fn build_family(
    kind: FamilyKind,
    phi: &LaurentSymbol,
    rows: IndexWindow,
    cols: IndexWindow,
) -> Result<WindowedMatrix> {
    check_windows(kind, rows, cols)?;
    let m = WindowedMatrix::from_fn(rows, cols, |i, j| {
        kind.coefficient_ref(i, j)
            .expect("checked windows")
            .resolve(phi)
    });
    let complete = rows.covers(&kind.image_rows(phi, cols));
    Ok(m.with_flags(true, complete, false))
}

/// Section on `cols` whose row window is the full image of those columns.
pub fn build_family_image(
    kind: FamilyKind,
    phi: &LaurentSymbol,
    cols: IndexWindow,
) -> Result<WindowedMatrix> {
    build_family(kind, phi, kind.image_rows(phi, cols), cols)
}

/// The elementary factors of a family, leftmost first.
pub fn compositional_chain(kind: FamilyKind, phi: &LaurentSymbol) -> Result<Vec<ElementaryKind>> {
    use ElementaryKind::*;
    let mult = Mult(phi.clone());
    Ok(match kind {
        FamilyKind::Toeplitz => vec![P, mult],
        FamilyKind::Hankel => vec![P, mult, J],
        FamilyKind::SlantToeplitz => vec![P, W, mult],
        FamilyKind::SlantHankel => vec![W, P, mult, J],
        FamilyKind::HToeplitz => vec![P, mult, K],
        FamilyKind::SlantHToeplitz | FamilyKind::Extension(0) => vec![W, P, mult, K],
        FamilyKind::SlantHAdjoint => vec![KStar, Mult(phi.conj_reflect()), P, WStar],
        FamilyKind::Extension(m) => {
            return Err(Error::Precondition(format!(
                "A_{m} has no compositional definition"
            )))
        }
    })
}

/// Builds the family by composing elementary sections with exact window
/// propagation. Independent of the closed forms; used as their oracle.
pub fn build_compositional(
    kind: FamilyKind,
    phi: &LaurentSymbol,
    cols: IndexWindow,
) -> Result<WindowedMatrix> {
    if cols.is_empty() {
        return Err(Error::Precondition("empty column window".into()));
    }
    check_windows(kind, IndexWindow::EMPTY, cols)?;
    build_chain(&compositional_chain(kind, phi)?, cols)
}

/// Largest entrywise gap between the closed form and the compositional build on `rows × cols`.
pub fn oracle_residual(
    kind: FamilyKind,
    phi: &LaurentSymbol,
    rows: IndexWindow,
    cols: IndexWindow,
) -> Result<f64> {
    let closed = build_family(kind, phi, rows, cols)?;
    let composed = build_compositional(kind, phi, cols)?.section(rows, cols)?;
    Ok(closed.max_abs_diff(&composed))
}
