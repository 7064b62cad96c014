//! Finite-section checks of the analytic properties of `V_φ`: coisometry,
//! partial isometry, Hilbert–Schmidt growth, hyponormality, self-adjointness,
//! the norm bound, and the perp condition for slant Hankel membership.

use std::fmt;

use num_complex::Complex64;

use crate::error::Result;
use crate::families::{build_compositional, build_family, build_family_image, FamilyKind};
use crate::structure::{CheckReport, Collector, DEFAULT_TOL};
use crate::symbol::LaurentSymbol;
use crate::text::{self, FORMAT_HEADER};
use crate::window::IndexWindow;
use crate::windowed::{build_chain, ElementaryKind, WindowedMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "INFO",
        })
    }
}

/// A single measured quantity together with the windows it was measured on.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectSummary {
    pub quantity: String,
    pub value: f64,
    pub rows: IndexWindow,
    pub cols: IndexWindow,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// `|value|` for residuals; for bound checks, how far the bound is missed.
    pub residual: f64,
    /// Where the value was attained, when that is meaningful.
    pub witness: Option<(Vec<i64>, Complex64)>,
}

impl DefectSummary {
    /// A residual: passes when `|value| ≤ tolerance`.
    fn residual(
        quantity: &str,
        value: f64,
        rows: IndexWindow,
        cols: IndexWindow,
        tol: f64,
    ) -> Self {
        DefectSummary {
            quantity: quantity.into(),
            value,
            rows,
            cols,
            tolerance: tol,
            verdict: if value.abs() <= tol {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            residual: value.abs(),
            witness: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// Report text: verdict line, then a `quantity` line and an optional witness.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{FORMAT_HEADER}\n{} max_residual={}\nquantity {} value={} rows={} cols={} tol={}\n",
            self.verdict,
            text::fmt_real(self.residual),
            self.quantity,
            text::fmt_real(self.value),
            window_text(self.rows),
            window_text(self.cols),
            text::fmt_real(self.tolerance),
        );
        if let Some((idx, v)) = &self.witness {
            let idx: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            out.push_str(&format!(
                "{} ({}) lhs={} rhs=0.0:0.0\n",
                self.quantity,
                idx.join(", "),
                text::fmt_complex(*v)
            ));
        }
        out
    }
}

fn window_text(w: IndexWindow) -> String {
    if w.is_empty() {
        "empty".into()
    } else {
        format!("{}:{}", w.lo(), w.hi())
    }
}

impl fmt::Display for DefectSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Largest entry by modulus, first in row-major order.
fn largest_entry(m: &WindowedMatrix) -> Option<(i64, i64, Complex64)> {
    m.nonzeros().fold(
        None,
        |best: Option<(i64, i64, Complex64)>, (i, j, v)| match best {
            Some((_, _, b)) if b.norm() >= v.norm() => best,
            _ => Some((i, j, v)),
        },
    )
}

/// `max_{n ≤ n_max} ‖V V* e_n − e_n‖`, both factors built compositionally.
pub fn coisometry_defect(phi: &LaurentSymbol, n_max: u32) -> Result<DefectSummary> {
    let cols = IndexWindow::hardy(n_max as i64);
    let adj = build_compositional(FamilyKind::SlantHAdjoint, phi, cols)?;
    let v = build_compositional(FamilyKind::SlantHToeplitz, phi, adj.rows())?;
    let vv = v.compose(&adj)?;
    let mut worst = 0.0f64;
    for n in cols.iter() {
        let col = vv.column(n)?;
        let mut d = 0.0;
        for (i, x) in col.iter() {
            let target = if i == n { 1.0 } else { 0.0 };
            d += (x - target).norm_sqr();
        }
        if !vv.rows().contains(n) {
            d += 1.0;
        }
        worst = worst.max(d.sqrt());
    }
    Ok(DefectSummary::residual(
        "coisometry-defect",
        worst,
        vv.rows(),
        cols,
        DEFAULT_TOL,
    ))
}

/// `|Σ|a_n|² − 1|`; necessary for `V_φ*` to be an isometry.
pub fn isometry_sum_check(phi: &LaurentSymbol, tol: f64) -> DefectSummary {
    let value = (phi.coefficient_l2() - 1.0).abs();
    DefectSummary::residual(
        "isometry-sum",
        value,
        IndexWindow::EMPTY,
        phi.support(),
        tol,
    )
}

/// Largest entry of `(W T_ρ W*)(W T_φ K)` on `cols`, where `ρ = 1 − |φ|²`.
pub fn partial_isometry_identity(phi: &LaurentSymbol, cols: IndexWindow) -> Result<DefectSummary> {
    use ElementaryKind::*;
    let rho = &LaurentSymbol::constant(1.0) - &phi.modulus_squared();
    let right = build_chain(&[W, P, Mult(phi.clone()), K], cols)?;
    let left = build_chain(&[W, P, Mult(rho), WStar], right.rows())?;
    let prod = left.compose(&right)?;
    let top = largest_entry(&prod);
    let value = top.map_or(0.0, |(_, _, v)| v.norm());
    let mut s = DefectSummary::residual("partial-isometry", value, prod.rows(), cols, DEFAULT_TOL);
    if s.verdict == Verdict::Fail {
        s.witness = top.map(|(i, j, v)| (vec![i, j], v));
    }
    Ok(s)
}

/// Squared Frobenius norm of the `V_φ` section on `rows × cols`.
pub fn frobenius_of_section(
    phi: &LaurentSymbol,
    rows: IndexWindow,
    cols: IndexWindow,
) -> Result<f64> {
    Ok(build_family(FamilyKind::SlantHToeplitz, phi, rows, cols)?.frobenius_sqr())
}

/// `Σ_{m ≤ m_max} Σ_{n ≤ n_max} (|a_{2n−m}|² + |a_{2n+m+1}|²)`.
///
/// Equal to the squared Frobenius norm of rows `[0, n_max]`, columns `[0, 2 m_max + 1]`.
pub fn hs_partial_sums(phi: &LaurentSymbol, m_max: u32, n_max: u32) -> f64 {
    let mut total = 0.0;
    for m in 0..=m_max as i64 {
        for n in 0..=n_max as i64 {
            total +=
                phi.coefficient(2 * n - m).norm_sqr() + phi.coefficient(2 * n + m + 1).norm_sqr();
        }
    }
    total
}

/// `‖V e_k‖² − ‖V* e_k‖²`; negative values witness non-hyponormality.
pub fn hyponormal_defect(phi: &LaurentSymbol, k: u32) -> Result<f64> {
    let col = IndexWindow::single(k as i64);
    let v = build_family_image(FamilyKind::SlantHToeplitz, phi, col)?;
    let adj = build_family_image(FamilyKind::SlantHAdjoint, phi, col)?;
    Ok(v.frobenius_sqr() - adj.frobenius_sqr())
}

/// First `k ∈ {0, 1}` with a negative hyponormal defect, with its value.
pub fn hyponormal_witness(phi: &LaurentSymbol) -> Result<Option<(u32, f64)>> {
    for k in 0..=1 {
        let d = hyponormal_defect(phi, k)?;
        if d < -DEFAULT_TOL {
            return Ok(Some((k, d)));
        }
    }
    Ok(None)
}

/// Largest `|V(i,j) − V*(i,j)|` over `rows × cols`, from the closed forms.
pub fn self_adjoint_distance(
    phi: &LaurentSymbol,
    rows: IndexWindow,
    cols: IndexWindow,
) -> Result<f64> {
    let v = build_family(FamilyKind::SlantHToeplitz, phi, rows, cols)?;
    let adj = build_family(FamilyKind::SlantHAdjoint, phi, rows, cols)?;
    Ok(v.max_abs_diff(&adj))
}

/// Spectral norm estimate by power iteration on `AᴴA`, from the normalized all-ones vector.
pub fn section_norm(m: &WindowedMatrix) -> f64 {
    let (rows, cols) = (m.rows(), m.cols());
    if rows.is_empty() || cols.is_empty() {
        return 0.0;
    }
    let (r, c) = (rows.len(), cols.len());
    let a: Vec<Complex64> = rows
        .iter()
        .flat_map(|i| cols.iter().map(move |j| (i, j)))
        .map(|(i, j)| m.entry(i, j))
        .collect();
    let mut x = vec![Complex64::new(1.0 / (c as f64).sqrt(), 0.0); c];
    let mut lambda = 0.0f64;
    for _ in 0..200 {
        let mut y = vec![ZERO; r];
        for (p, yp) in y.iter_mut().enumerate() {
            *yp = a[p * c..(p + 1) * c]
                .iter()
                .zip(&x)
                .map(|(u, v)| u * v)
                .sum();
        }
        let mut g = vec![ZERO; c];
        for (p, yp) in y.iter().enumerate() {
            for (q, gq) in g.iter_mut().enumerate() {
                *gq += a[p * c + q].conj() * yp;
            }
        }
        let norm = g.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let converged = (norm - lambda).abs() <= 1e-10 * norm;
        lambda = norm;
        x = g.into_iter().map(|v| v / norm).collect();
        if converged {
            break;
        }
    }
    lambda.sqrt()
}

/// Section spectral norm of `V_φ` against `sup_norm(φ) + 1e−9`.
///
/// `value` is the estimated norm and `tolerance` the bound.
pub fn norm_bound_check(
    phi: &LaurentSymbol,
    rows: IndexWindow,
    cols: IndexWindow,
    grid_size: usize,
) -> Result<DefectSummary> {
    let section = build_family(FamilyKind::SlantHToeplitz, phi, rows, cols)?;
    let value = section_norm(&section);
    let bound = phi.sup_norm(grid_size) + 1e-9;
    Ok(DefectSummary {
        quantity: "section-norm".into(),
        value,
        rows,
        cols,
        tolerance: bound,
        verdict: if value <= bound {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        residual: (value - bound).max(0.0),
        witness: None,
    })
}

/// Both halves of the slant Hankel perp check.
#[derive(Debug, Clone, PartialEq)]
pub struct PerpReport {
    /// Coefficient relations `m1`, `m2`, `m3` with indices up to the bound.
    pub relations: CheckReport,
    /// `φ` has no terms of degree 1 or ≥ 3.
    pub membership: CheckReport,
}

impl PerpReport {
    pub fn passed(&self) -> bool {
        self.relations.passed && self.membership.passed
    }

    pub fn to_text(&self) -> String {
        format!(
            "# relations\n{}# membership\n{}",
            self.relations.to_text(),
            self.membership.to_text()
        )
    }
}

/// Checks `a_{2m+2j+7} = a_{2m+2j+1}`, `a_{4m+2j+6} = a_{4m+2j+8}` and
/// `a_{2j+4} = a_{2j+3}` for indices up to `idx_max`, and that the symbol
/// lives in degrees `≤ 0` plus `2`.
pub fn slant_hankel_perp_check(phi: &LaurentSymbol, idx_max: u32) -> PerpReport {
    let top = idx_max as i64;
    let a = |n: i64| phi.coefficient(n);
    let mut rel = Collector::new(DEFAULT_TOL);
    for m in 0..=top {
        for j in 0..=top {
            if 2 * m + 2 * j + 7 <= top {
                let n = 2 * m + 2 * j;
                rel.compare("m1", &[m, j], a(n + 7), a(n + 1));
            }
            if 4 * m + 2 * j + 8 <= top {
                let n = 4 * m + 2 * j;
                rel.compare("m2", &[m, j], a(n + 6), a(n + 8));
            }
        }
    }
    for j in 0..=top {
        if 2 * j + 4 <= top {
            rel.compare("m3", &[j], a(2 * j + 4), a(2 * j + 3));
        }
    }
    let mut mem = Collector::new(DEFAULT_TOL);
    for n in phi.degrees().filter(|&n| n == 1 || n >= 3) {
        mem.compare("membership", &[n], a(n), ZERO);
    }
    PerpReport {
        relations: rel.finish(),
        membership: mem.finish(),
    }
}

/// Lower bound on how far `V e_n` stays from zero.
///
/// For `n` from `max(0, −deg_min)` to `n_hi`, `max(‖B e_n‖, ‖B e_{n+1}‖, ‖L e_n‖)`
/// must stay at least `max|a_k|` (`B`, `L` the slant Toeplitz / Hankel
/// operators). `value` is the minimum; passes when `value ≥ tolerance`.
pub fn compactness_tail(phi: &LaurentSymbol, n_hi: u32) -> Result<DefectSummary> {
    let start = (-phi.support().lo()).max(0);
    let cols = IndexWindow::new(start, (n_hi as i64).max(start));
    let col_norm = |kind: FamilyKind, n: i64| -> Result<f64> {
        Ok(build_family_image(kind, phi, IndexWindow::single(n))?
            .frobenius_sqr()
            .sqrt())
    };
    let mut value = f64::INFINITY;
    let mut at = start;
    for n in cols.iter() {
        let here = col_norm(FamilyKind::SlantToeplitz, n)?
            .max(col_norm(FamilyKind::SlantToeplitz, n + 1)?)
            .max(col_norm(FamilyKind::SlantHankel, n)?);
        if here < value {
            value = here;
            at = n;
        }
    }
    let bound = phi.max_abs_coefficient() - 1e-12;
    let passed = value >= bound;
    Ok(DefectSummary {
        quantity: "column-norm-floor".into(),
        value,
        rows: IndexWindow::EMPTY,
        cols,
        tolerance: bound,
        verdict: if passed { Verdict::Pass } else { Verdict::Fail },
        residual: (bound - value).max(0.0),
        witness: (!passed).then(|| (vec![at], Complex64::new(value, 0.0))),
    })
}

/// The default test symbols, with display names.
pub fn corpus() -> Vec<(&'static str, LaurentSymbol)> {
    let r = |lo: i64, v: &[f64]| LaurentSymbol::from_real_slice(lo, v);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        ("0", LaurentSymbol::zero()),
        ("1", r(0, &[1.0])),
        ("z", r(1, &[1.0])),
        ("z^3", r(3, &[1.0])),
        ("z^-1", r(-1, &[1.0])),
        ("(1+z)/sqrt2", r(0, &[h, h])),
        ("2z^-1+3+5z+7z^2", r(-1, &[2.0, 3.0, 5.0, 7.0])),
        ("z^-1+z^2", r(-1, &[1.0, 0.0, 0.0, 1.0])),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(lo: i64, hi: i64) -> IndexWindow {
        IndexWindow::new(lo, hi)
    }

    fn sym(name: &str) -> LaurentSymbol {
        corpus().into_iter().find(|(n, _)| *n == name).unwrap().1
    }

    #[test]
    fn coisometry_examples() {
        for name in ["1", "z", "z^3", "(1+z)/sqrt2"] {
            let d = coisometry_defect(&sym(name), 16).unwrap();
            assert!(d.value <= 1e-12 && d.passed(), "{name}: {d}");
        }
        let two = LaurentSymbol::constant(2.0);
        let d = coisometry_defect(&two, 16).unwrap();
        assert!((d.value - 3.0).abs() < 1e-12);
        assert_eq!(d.verdict, Verdict::Fail);
    }

    #[test]
    fn inner_monomials_are_coisometric() {
        for k in 0..=6 {
            let d = coisometry_defect(&LaurentSymbol::monomial(k, 1.0), 16).unwrap();
            assert!(d.value <= 1e-12, "z^{k}");
        }
    }

    #[test]
    fn isometry_sum_examples() {
        assert!(isometry_sum_check(&sym("(1+z)/sqrt2"), 1e-12).value <= 1e-15);
        assert_eq!(isometry_sum_check(&sym("z^3"), 1e-12).value, 0.0);
        let d = isometry_sum_check(&LaurentSymbol::constant(2.0), 1e-12);
        assert_eq!(d.value, 3.0);
        assert_eq!(d.verdict, Verdict::Fail);
    }

    #[test]
    fn partial_isometry_examples() {
        let z2 = LaurentSymbol::monomial(2, 1.0);
        assert_eq!(partial_isometry_identity(&z2, w(0, 12)).unwrap().value, 0.0);
        let d = partial_isometry_identity(&sym("(1+z)/sqrt2"), w(0, 12)).unwrap();
        assert!(d.value <= 1e-12, "{d}");
        let d = partial_isometry_identity(&LaurentSymbol::constant(2.0), w(0, 12)).unwrap();
        assert!(d.value > 0.0 && d.witness.is_some());
        assert!(d.to_text().lines().count() == 4);
    }

    #[test]
    fn frobenius_examples() {
        let one = LaurentSymbol::constant(1.0);
        for n in [4, 8, 16] {
            assert_eq!(
                frobenius_of_section(&one, w(0, n - 1), w(0, 4 * n)).unwrap(),
                n as f64
            );
        }
        assert_eq!(hs_partial_sums(&LaurentSymbol::zero(), 10, 10), 0.0);
        let phi = LaurentSymbol::from_real_slice(-1, &[2.0, 3.0]);
        let sums: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&m| hs_partial_sums(&phi, m, 20))
            .collect();
        assert!(sums[0] < sums[1] && sums[1] < sums[2]);
    }

    #[test]
    fn hyponormal_examples() {
        assert_eq!(hyponormal_defect(&LaurentSymbol::zero(), 0).unwrap(), 0.0);
        assert_eq!(hyponormal_defect(&sym("z^-1"), 0).unwrap(), -1.0);
        let d = hyponormal_defect(&sym("(1+z)/sqrt2"), 0).unwrap();
        assert!((d + 0.5).abs() < 1e-15);
        for (name, phi) in corpus().into_iter().skip(1) {
            assert!(hyponormal_witness(&phi).unwrap().is_some(), "{name}");
        }
    }

    #[test]
    fn self_adjoint_examples() {
        let sq = w(0, 16);
        assert_eq!(
            self_adjoint_distance(&LaurentSymbol::zero(), sq, sq).unwrap(),
            0.0
        );
        assert!(self_adjoint_distance(&LaurentSymbol::constant(1.0), sq, sq).unwrap() >= 1.0);
        for (name, phi) in corpus().into_iter().skip(1) {
            assert!(
                self_adjoint_distance(&phi, sq, sq).unwrap() > 1e-6,
                "{name}"
            );
        }
    }

    #[test]
    fn norm_bound_examples() {
        let d = norm_bound_check(&LaurentSymbol::zero(), w(0, 8), w(0, 20), 64).unwrap();
        assert_eq!(d.value, 0.0);
        assert!(d.passed());
        let d = norm_bound_check(&sym("(1+z)/sqrt2"), w(0, 32), w(0, 129), 4096).unwrap();
        assert!(d.passed() && (d.value - 1.0).abs() < 1e-9, "{d}");
        let d = norm_bound_check(&sym("z^3"), w(0, 32), w(0, 129), 4096).unwrap();
        assert!(d.passed() && (d.value - 1.0).abs() < 1e-9, "{d}");
    }

    #[test]
    fn power_iteration_matches_a_diagonal() {
        let m = WindowedMatrix::from_fn(w(0, 2), w(0, 2), |i, j| {
            if i == j {
                Complex64::new((i + 1) as f64, 0.0)
            } else {
                ZERO
            }
        });
        assert!((section_norm(&m) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn perp_examples() {
        assert!(slant_hankel_perp_check(&sym("z^-1+z^2"), 16).passed());
        assert!(slant_hankel_perp_check(&LaurentSymbol::zero(), 16).passed());
        let r = slant_hankel_perp_check(&sym("z^3"), 16);
        assert!(!r.relations.passed && !r.membership.passed);
        assert!(r
            .relations
            .witnesses
            .iter()
            .any(|w| w.relation == "m3" && w.indices == vec![0]));
        assert_eq!(r.membership.witnesses[0].indices, vec![3]);
    }

    #[test]
    fn compactness_tail_holds_on_corpus() {
        for (name, phi) in corpus() {
            let d = compactness_tail(&phi, 64).unwrap();
            assert!(d.passed(), "{name}: {d}");
        }
    }

    fn small_symbol() -> impl Strategy<Value = LaurentSymbol> {
        prop::collection::vec((-5i64..=5, -3.0f64..3.0, -3.0f64..3.0), 0..5).prop_map(|t| {
            let map: std::collections::BTreeMap<i64, Complex64> = t
                .into_iter()
                .map(|(k, a, b)| (k, Complex64::new(a, b)))
                .collect();
            LaurentSymbol::from_terms(map).unwrap()
        })
    }

    proptest! {
        #[test]
        fn hs_sums_match_frobenius(phi in small_symbol(), m in 0u32..=32, n in 0u32..=32) {
            let f = frobenius_of_section(&phi, w(0, n as i64), w(0, 2 * m as i64 + 1)).unwrap();
            let s = hs_partial_sums(&phi, m, n);
            prop_assert!((f - s).abs() <= 1e-12 * (1.0 + f));
        }

        #[test]
        fn sections_respect_the_sup_norm(phi in small_symbol()) {
            prop_assert!(norm_bound_check(&phi, w(0, 12), w(0, 49), 1024).unwrap().passed());
        }

        #[test]
        fn nonzero_symbols_are_not_hyponormal(phi in small_symbol()) {
            prop_assume!(phi.max_abs_coefficient() > 1e-3);
            prop_assert!(hyponormal_witness(&phi).unwrap().is_some());
        }
    }
}
