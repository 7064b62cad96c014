//! Matrix-pattern predicates, symbol extraction and the shift/composition
//! identities that characterize slant H-Toeplitz sections.
//!
//! Every predicate quantifies only over index tuples lying inside the
//! supplied windows. A matrix "passes" when no in-window instance is violated;
//! when no instance fits at all the report is flagged vacuous.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::{build_family, FamilyKind};
use crate::symbol::LaurentSymbol;
use crate::text::{self, FORMAT_HEADER};
use crate::window::IndexWindow;
use crate::windowed::{build_elementary, ElementaryKind, WindowedMatrix};

/// Absolute tolerance for pattern checks; entries are single products of input data.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Default number of witnesses kept in a report.
pub const WITNESS_CAP: usize = 16;

/// One violated relation instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub relation: String,
    pub indices: Vec<i64>,
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(
            f,
            "{} ({}) lhs={} rhs={}",
            self.relation,
            idx.join(", "),
            text::fmt_complex(self.lhs),
            text::fmt_complex(self.rhs)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub passed: bool,
    pub max_residual: f64,
    /// Smallest index tuples first, at most the collector's cap.
    pub witnesses: Vec<Witness>,
    /// No relation instance fit inside the windows.
    pub vacuous: bool,
    /// Number of relation instances compared.
    pub checked: usize,
}

impl CheckReport {
    /// `PASS|FAIL max_residual=<r>`, then one line per witness.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{FORMAT_HEADER}\n{} max_residual={}\n",
            if self.passed { "PASS" } else { "FAIL" },
            text::fmt_real(self.max_residual)
        );
        if self.vacuous {
            out.push_str("# vacuous: no relation instance inside the windows\n");
        }
        for w in &self.witnesses {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse_text(source: &str) -> Result<CheckReport> {
        let mut vacuous = false;
        let mut lines = source.lines().filter(|l| {
            let t = l.trim();
            if t.starts_with("# vacuous") {
                vacuous = true;
            }
            !t.is_empty() && !t.starts_with('#')
        });
        let head = lines
            .next()
            .ok_or_else(|| Error::parse(0, "empty report"))?;
        let (verdict, rest) = head
            .split_once(' ')
            .ok_or_else(|| Error::parse(0, format!("bad report header `{head}`")))?;
        let passed = match verdict {
            "PASS" => true,
            "FAIL" => false,
            v => return Err(Error::parse(0, format!("unknown verdict `{v}`"))),
        };
        let r = rest
            .strip_prefix("max_residual=")
            .ok_or_else(|| Error::parse(verdict.len() + 1, "expected max_residual="))?;
        let max_residual = text::parse_real(r, verdict.len() + 14)?;
        let witnesses = lines.map(parse_witness).collect::<Result<Vec<_>>>()?;
        Ok(CheckReport {
            passed,
            max_residual,
            checked: 0,
            vacuous,
            witnesses,
        })
    }
}

fn parse_witness(line: &str) -> Result<Witness> {
    let bad = |col: usize| Error::parse(col, format!("bad witness line `{line}`"));
    let open = line.find('(').ok_or_else(|| bad(0))?;
    let close = line.find(')').ok_or_else(|| bad(open))?;
    let relation = line[..open].trim().to_string();
    let indices = line[open + 1..close]
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<i64>().map_err(|_| bad(open + 1)))
        .collect::<Result<Vec<_>>>()?;
    let rest = line[close + 1..].trim();
    let (l, r) = rest.split_once(' ').ok_or_else(|| bad(close + 1))?;
    let lhs = l.strip_prefix("lhs=").ok_or_else(|| bad(close + 2))?;
    let rhs = r.strip_prefix("rhs=").ok_or_else(|| bad(close + 2))?;
    Ok(Witness {
        relation,
        indices,
        lhs: text::parse_complex_pair(lhs, close + 6)?,
        rhs: text::parse_complex_pair(rhs, close + 6)?,
    })
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Accumulates relation instances into a [`CheckReport`].
#[derive(Debug, Clone)]
pub struct Collector {
    tol: f64,
    cap: usize,
    residual: f64,
    checked: usize,
    witnesses: Vec<Witness>,
}

impl Collector {
    pub fn new(tol: f64) -> Self {
        Self::with_cap(tol, WITNESS_CAP)
    }

    pub fn with_cap(tol: f64, cap: usize) -> Self {
        Collector {
            tol,
            cap,
            residual: 0.0,
            checked: 0,
            witnesses: Vec::new(),
        }
    }

    pub fn compare(&mut self, relation: &str, indices: &[i64], lhs: Complex64, rhs: Complex64) {
        self.checked += 1;
        let d = (lhs - rhs).norm();
        let d = if d.is_nan() { f64::INFINITY } else { d };
        self.residual = self.residual.max(d);
        if d > self.tol {
            self.witnesses.push(Witness {
                relation: relation.to_string(),
                indices: indices.to_vec(),
                lhs,
                rhs,
            });
            if self.witnesses.len() > 4 * self.cap.max(1) {
                self.trim();
            }
        }
    }

    /// Compares two sections entrywise on `rows × cols` (both must contain it).
    pub fn compare_sections(
        &mut self,
        relation: &str,
        lhs: &WindowedMatrix,
        rhs: &WindowedMatrix,
        rows: IndexWindow,
        cols: IndexWindow,
    ) {
        for i in rows.iter() {
            for j in cols.iter() {
                self.compare(relation, &[i, j], lhs.entry(i, j), rhs.entry(i, j));
            }
        }
    }

    fn trim(&mut self) {
        self.witnesses.sort_by(|a, b| {
            a.indices
                .cmp(&b.indices)
                .then_with(|| a.relation.cmp(&b.relation))
        });
        self.witnesses.truncate(self.cap);
    }

    pub fn finish(mut self) -> CheckReport {
        self.trim();
        CheckReport {
            passed: self.residual <= self.tol,
            max_residual: self.residual,
            witnesses: self.witnesses,
            vacuous: self.checked == 0,
            checked: self.checked,
        }
    }
}

fn insufficient(what: &str, m: &WindowedMatrix, need: String) -> Error {
    Error::WindowMismatch(format!(
        "insufficient window for {what}: have {} x {}, need {need}",
        m.rows(),
        m.cols()
    ))
}

fn require_hardy(what: &str, m: &WindowedMatrix) -> Result<()> {
    if m.rows().is_hardy() && m.cols().is_hardy() {
        Ok(())
    } else {
        Err(insufficient(what, m, "nonnegative windows".into()))
    }
}

/// Checks the defining relations of a slant H-Toeplitz matrix:
/// `a(k,0) = a(k+j,4j)`, `a(k,0) = a(k-j,4j-1)` and `a(0,2k) = a(i,2k+4i)`.
///
/// Witness indices are the two matrix positions `(r1, c1, r2, c2)`.
pub fn check_slant_h_matrix(m: &WindowedMatrix, tol: f64) -> Result<CheckReport> {
    let (rows, cols) = (m.rows(), m.cols());
    if !rows.is_hardy() || (!cols.is_empty() && cols.lo() != 0) {
        return Err(insufficient(
            "the slant H-Toeplitz predicate",
            m,
            "rows >= 0 and columns from 0".into(),
        ));
    }
    let mut c = Collector::new(tol);
    if rows.is_empty() || cols.is_empty() {
        return Ok(c.finish());
    }
    let cmax = cols.hi();
    for k in rows.iter() {
        let head = m.entry(k, 0);
        for j in 1..=cmax / 4 {
            if rows.contains(k + j) {
                c.compare(
                    "first-column-even",
                    &[k, 0, k + j, 4 * j],
                    head,
                    m.entry(k + j, 4 * j),
                );
            }
        }
        for j in 1..=(cmax + 1) / 4 {
            if k - j >= 0 && rows.contains(k - j) {
                c.compare(
                    "first-column-odd",
                    &[k, 0, k - j, 4 * j - 1],
                    head,
                    m.entry(k - j, 4 * j - 1),
                );
            }
        }
    }
    if rows.contains(0) {
        for k in 1..=cmax / 2 {
            let head = m.entry(0, 2 * k);
            for i in rows.iter().filter(|&i| i >= 1) {
                if 2 * k + 4 * i > cmax {
                    break;
                }
                c.compare(
                    "first-row",
                    &[0, 2 * k, i, 2 * k + 4 * i],
                    head,
                    m.entry(i, 2 * k + 4 * i),
                );
            }
        }
    }
    Ok(c.finish())
}

/// Checks `α(i+1, j+2) = α(i, j)` on every in-window pair.
pub fn check_slant_toeplitz_matrix(m: &WindowedMatrix, tol: f64) -> Result<CheckReport> {
    require_hardy("the slant Toeplitz predicate", m)?;
    let mut c = Collector::new(tol);
    for i in m.rows().iter().filter(|&i| m.rows().contains(i + 1)) {
        for j in m.cols().iter().filter(|&j| m.cols().contains(j + 2)) {
            c.compare(
                "slant-toeplitz",
                &[i, j],
                m.entry(i, j),
                m.entry(i + 1, j + 2),
            );
        }
    }
    Ok(c.finish())
}

/// Checks `β(i-1, j+2) = β(i, j)` for `i ≥ 1` on every in-window pair.
pub fn check_slant_hankel_matrix(m: &WindowedMatrix, tol: f64) -> Result<CheckReport> {
    require_hardy("the slant Hankel predicate", m)?;
    let mut c = Collector::new(tol);
    for i in m
        .rows()
        .iter()
        .filter(|&i| i >= 1 && m.rows().contains(i - 1))
    {
        for j in m.cols().iter().filter(|&j| m.cols().contains(j + 2)) {
            c.compare(
                "slant-hankel",
                &[i, j],
                m.entry(i, j),
                m.entry(i - 1, j + 2),
            );
        }
    }
    Ok(c.finish())
}

/// Reads the symbol off a slant H-Toeplitz section: even coefficients from
/// column 0, odd ones from column 1, negative ones from row 0.
pub fn extract_symbol(m: &WindowedMatrix) -> Result<LaurentSymbol> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows.is_empty() || cols.is_empty() {
        return Ok(LaurentSymbol::zero());
    }
    if rows.lo() != 0 || cols.lo() != 0 {
        return Err(insufficient(
            "symbol extraction",
            m,
            "windows starting at 0".into(),
        ));
    }
    let report = check_slant_h_matrix(m, DEFAULT_TOL)?;
    if !report.passed {
        let first = report
            .witnesses
            .first()
            .map(|w| w.to_string())
            .unwrap_or_default();
        return Err(Error::Precondition(format!(
            "not a slant H-Toeplitz section (max residual {}): {first}",
            report.max_residual
        )));
    }
    let mut terms = Vec::new();
    for i in rows.iter() {
        terms.push((2 * i, m.entry(i, 0)));
        if cols.contains(1) {
            terms.push((2 * i + 1, m.entry(i, 1)));
        }
    }
    for n in 1..=cols.hi() / 2 {
        terms.push((-n, m.entry(0, 2 * n)));
    }
    LaurentSymbol::from_terms(terms)
}

fn elementary(kind: ElementaryKind, domain: IndexWindow) -> Result<WindowedMatrix> {
    build_elementary(&kind, domain)
}

/// `left · m · (chain applied right to left on domain)`.
fn sandwich(
    m: &WindowedMatrix,
    chain: &[ElementaryKind],
    domain: IndexWindow,
) -> Result<WindowedMatrix> {
    let mut acc: Option<WindowedMatrix> = None;
    for kind in chain.iter().rev() {
        let input = acc.as_ref().map_or(domain, |a| a.rows());
        let step = elementary(kind.clone(), input)?;
        acc = Some(match acc {
            None => step,
            Some(prev) => step.compose(&prev)?,
        });
    }
    match acc {
        Some(right) => m.compose(&right),
        None => Ok(m.clone()),
    }
}

/// Largest column window `[0, c]` the identity check can use on `m`.
pub fn characterization_cols(m: &WindowedMatrix) -> Option<IndexWindow> {
    let cmax = m.cols().hi();
    (!m.cols().is_empty() && cmax >= 7).then(|| IndexWindow::hardy((cmax - 7) / 4))
}

/// Verifies on the columns `cols` the three identities
/// `A C2 = U* A C2 U²`, `U* A M3 C4 = A M3 C4 U` and `U* A e0 = A M3 e0`,
/// where `C2`, `C4` compose with `z²`, `z⁴` and `M3` multiplies by `z³`.
///
/// `m` must be the section on rows `[0, R]` (`R ≥ 1`) and columns
/// `[0, 4·cols.hi + 7]`; rows `[0, R-1]` are compared.
pub fn check_characterization(
    m: &WindowedMatrix,
    cols: IndexWindow,
    tol: f64,
) -> Result<CheckReport> {
    use ElementaryKind::*;
    let need_cols = IndexWindow::hardy(4 * cols.hi() + 7);
    let (rows, mcols) = (m.rows(), m.cols());
    if cols.is_empty()
        || !cols.is_hardy()
        || rows.is_empty()
        || rows.lo() != 0
        || rows.hi() < 1
        || mcols.lo() != 0
        || !mcols.covers(&need_cols)
    {
        return Err(insufficient(
            "the characterization identities",
            m,
            format!("rows [0, R] with R >= 1 and columns {need_cols}"),
        ));
    }
    let compared = IndexWindow::new(0, rows.hi() - 1);
    let back = elementary(UStar, rows)?;
    let mut c = Collector::new(tol);

    let lhs = sandwich(m, &[Cz(2)], cols)?;
    let rhs = back.compose(&sandwich(m, &[Cz(2), Mz(2)], cols)?)?;
    c.compare_sections("shift-decimated", &lhs, &rhs, compared, cols);

    let lhs = back.compose(&sandwich(m, &[Mz(3), Cz(4)], cols)?)?;
    let rhs = sandwich(m, &[Mz(3), Cz(4), Mz(1)], cols)?;
    c.compare_sections("shift-odd-tail", &lhs, &rhs, compared, cols);

    let e0 = IndexWindow::single(0);
    let lhs = back.compose(&m.restrict_cols(e0)?)?;
    let rhs = sandwich(m, &[Mz(3)], e0)?;
    c.compare_sections("shift-first-column", &lhs, &rhs, compared, e0);

    Ok(c.finish())
}

/// Verifies, for the `A_m` extension of the slant H-Toeplitz section `a`,
/// `A_m C2 = S(-m) A C2 U^{2m}`, `U* P A_m M3 C4 = A M3 C4 U`,
/// `U* P A_m e0 = A M3 e0`, and that `A_m` agrees with `a` on rows `≥ 0`.
///
/// The identity columns are the largest `[0, c]` the section supports.
pub fn check_extension_conditions(a: &WindowedMatrix, m: u32, tol: f64) -> Result<CheckReport> {
    use ElementaryKind::*;
    let phi = extract_symbol(a)?;
    let (rows, acols) = (a.rows(), a.cols());
    let mi = m as i64;
    let c_hi = if acols.is_empty() {
        -1
    } else {
        ((acols.hi() - 7) / 4).min((acols.hi() - 4 * mi) / 2)
    };
    if rows.is_empty() || rows.hi() < 1 || acols.hi() < 7 || c_hi < 0 {
        return Err(insufficient(
            "the extension identities",
            a,
            format!("rows [0, R] with R >= 1 and columns [0, {}]", 7.max(4 * mi)),
        ));
    }
    let cols = IndexWindow::hardy(c_hi);
    let ext_rows = IndexWindow::new(-mi, rows.hi());
    let am = build_family(FamilyKind::Extension(m), &phi, ext_rows, acols)?;
    let back = elementary(UStar, rows)?;
    let mut c = Collector::new(tol);

    let lhs = sandwich(&am, &[Cz(2)], cols)?;
    let rhs = elementary(BilateralShift(-mi), rows)?.compose(&sandwich(
        a,
        &[Cz(2), Mz(2 * mi)],
        cols,
    )?)?;
    c.compare_sections(
        "extension-decimated",
        &lhs,
        &rhs,
        IndexWindow::new(-mi, rows.hi() - mi),
        cols,
    );

    let proj = elementary(P, ext_rows)?.compose(&am)?;
    let compared = IndexWindow::new(0, rows.hi() - 1);
    let lhs = back.compose(&sandwich(&proj, &[Mz(3), Cz(4)], cols)?)?;
    let rhs = sandwich(a, &[Mz(3), Cz(4), Mz(1)], cols)?;
    c.compare_sections("extension-odd-tail", &lhs, &rhs, compared, cols);

    let e0 = IndexWindow::single(0);
    let lhs = back.compose(&proj.restrict_cols(e0)?)?;
    let rhs = sandwich(a, &[Mz(3)], e0)?;
    c.compare_sections("extension-first-column", &lhs, &rhs, compared, e0);

    c.compare_sections("extension-agrees", &am, a, rows, acols);
    Ok(c.finish())
}

/// Checks `V C2 = B_φ` and `V M1 C2 = L_φ` on `rows × cols`.
pub fn check_factor_identities(
    phi: &LaurentSymbol,
    rows: IndexWindow,
    cols: IndexWindow,
    tol: f64,
) -> Result<CheckReport> {
    use ElementaryKind::*;
    let v = build_family(
        FamilyKind::SlantHToeplitz,
        phi,
        rows,
        IndexWindow::hardy(2 * cols.hi() + 1),
    )?;
    let mut c = Collector::new(tol);
    let lhs = sandwich(&v, &[Cz(2)], cols)?;
    let rhs = build_family(FamilyKind::SlantToeplitz, phi, rows, cols)?;
    c.compare_sections("even-columns", &lhs, &rhs, rows, cols);
    let lhs = sandwich(&v, &[Mz(1), Cz(2)], cols)?;
    let rhs = build_family(FamilyKind::SlantHankel, phi, rows, cols)?;
    c.compare_sections("odd-columns", &lhs, &rhs, rows, cols);
    Ok(c.finish())
}
