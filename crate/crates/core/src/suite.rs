//! Named verification suites run by `slanth verify`.
//!
//! Each suite exercises one structural or analytic property over the default
//! corpus at fixed windows and reports a single pass/fail line.

use num_complex::Complex64;

use crate::analysis::{
    coisometry_defect, corpus, frobenius_of_section, hyponormal_witness, isometry_sum_check,
    norm_bound_check, partial_isometry_identity, self_adjoint_distance, slant_hankel_perp_check,
};
use crate::error::Result;
use crate::families::{build_family, oracle_residual, pattern, FamilyKind};
use crate::structure::{
    characterization_cols, check_characterization, check_extension_conditions,
    check_slant_h_matrix, extract_symbol, DEFAULT_TOL,
};
use crate::symbol::{LaurentSymbol, DEFAULT_GRID};
use crate::window::IndexWindow;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} {} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

type SuiteFn = fn() -> Result<(bool, String)>;

const SUITES: [(&str, SuiteFn); 10] = [
    ("oracle", oracle),
    ("golden", golden),
    ("roundtrip", roundtrip),
    ("characterization", characterization),
    ("interleave", interleave),
    ("coisometry", coisometry),
    ("negative", negative),
    ("perp", perp),
    ("norm", norm),
    ("extension", extension),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

/// Runs one suite by name; `None` if the name is unknown.
pub fn run_suite(name: &str) -> Option<SuiteOutcome> {
    let (name, f) = SUITES.iter().find(|(n, _)| *n == name)?;
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(SuiteOutcome {
        name,
        passed,
        detail,
    })
}

pub fn run_all() -> Vec<SuiteOutcome> {
    suite_names().into_iter().filter_map(run_suite).collect()
}

fn w(lo: i64, hi: i64) -> IndexWindow {
    IndexWindow::new(lo, hi)
}

fn generic() -> LaurentSymbol {
    LaurentSymbol::from_real_slice(-1, &[2.0, 3.0, 5.0, 7.0])
}

fn nonzero_corpus() -> impl Iterator<Item = (&'static str, LaurentSymbol)> {
    corpus().into_iter().filter(|(_, p)| !p.is_zero())
}

fn oracle() -> Result<(bool, String)> {
    let cols = w(0, 33);
    let mut worst = 0.0f64;
    let mut combos = 0;
    for (_, phi) in corpus() {
        for kind in FamilyKind::COMPOSITIONAL {
            worst = worst.max(oracle_residual(kind, &phi, w(0, 33), cols)?);
            combos += 1;
        }
    }
    Ok((
        worst <= 1e-13,
        format!("combinations={combos} max_residual={worst:e}"),
    ))
}

/// Leading 5×7 block of `V_φ` as coefficient indices.
pub const V_BLOCK: [[i64; 7]; 5] = [
    [0, 1, -1, 2, -2, 3, -3],
    [2, 3, 1, 4, 0, 5, -1],
    [4, 5, 3, 6, 2, 7, 1],
    [6, 7, 5, 8, 4, 9, 3],
    [8, 9, 7, 10, 6, 11, 5],
];

/// Leading 7×7 block of `A_1`, rows from −1.
pub const A1_BLOCK: [[i64; 7]; 7] = [
    [-2, -1, -3, 0, -4, 1, -5],
    [0, 1, -1, 2, -2, 3, -3],
    [2, 3, 1, 4, 0, 5, -1],
    [4, 5, 3, 6, 2, 7, 1],
    [6, 7, 5, 8, 4, 9, 3],
    [8, 9, 7, 10, 6, 11, 5],
    [10, 11, 9, 12, 8, 13, 7],
];

/// Leading 8×7 block of `A_2`, rows from −2.
pub const A2_BLOCK: [[i64; 7]; 8] = [
    [-4, -3, -5, -2, -6, -1, -7],
    [-2, -1, -3, 0, -4, 1, -5],
    [0, 1, -1, 2, -2, 3, -3],
    [2, 3, 1, 4, 0, 5, -1],
    [4, 5, 3, 6, 2, 7, 1],
    [6, 7, 5, 8, 4, 9, 3],
    [8, 9, 7, 10, 6, 11, 5],
    [10, 11, 9, 12, 8, 13, 7],
];

fn block_matches<const C: usize>(kind: FamilyKind, top: i64, want: &[[i64; C]]) -> Result<bool> {
    let p = pattern(
        kind,
        w(top, top + want.len() as i64 - 1),
        w(0, C as i64 - 1),
    )?;
    Ok(p.iter().zip(want).all(|(row, exp)| {
        row.iter()
            .zip(exp.iter())
            .all(|(r, &k)| !r.conjugated && r.index == k)
    }))
}

fn golden() -> Result<(bool, String)> {
    let v = block_matches(FamilyKind::SlantHToeplitz, 0, &V_BLOCK)?;
    let a1 = block_matches(FamilyKind::Extension(1), -1, &A1_BLOCK)?;
    let a2 = block_matches(FamilyKind::Extension(2), -2, &A2_BLOCK)?;
    Ok((v && a1 && a2, format!("V={v} A_1={a1} A_2={a2}")))
}

fn roundtrip() -> Result<(bool, String)> {
    let mut failed = Vec::new();
    for (name, phi) in corpus() {
        let m = build_family(FamilyKind::SlantHToeplitz, &phi, w(0, 8), w(0, 33))?;
        if extract_symbol(&m)? != phi {
            failed.push(name);
        }
    }
    Ok((failed.is_empty(), format!("mismatches={failed:?}")))
}

/// Positions that both the pattern relations and the identities constrain.
pub const PERTURBATION_SITES: [(i64, i64); 6] = [(0, 0), (2, 0), (3, 3), (1, 7), (2, 4), (0, 6)];

fn characterization() -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst = 0.0f64;
    for (_, phi) in corpus() {
        let m = build_family(FamilyKind::SlantHToeplitz, &phi, w(0, 10), w(0, 39))?;
        let cols = characterization_cols(&m).expect("wide enough");
        let p = check_slant_h_matrix(&m, DEFAULT_TOL)?;
        let c = check_characterization(&m, cols, DEFAULT_TOL)?;
        worst = worst.max(p.max_residual).max(c.max_residual);
        ok &= p.passed && c.passed;
        for &(i, j) in &PERTURBATION_SITES {
            let mut bad = m.clone();
            bad.set(i, j, m.entry(i, j) + Complex64::new(1.0, 0.0));
            let p = check_slant_h_matrix(&bad, DEFAULT_TOL)?;
            let c = check_characterization(&bad, cols, DEFAULT_TOL)?;
            ok &= !p.passed && !p.witnesses.is_empty() && !c.passed && !c.witnesses.is_empty();
        }
    }
    Ok((ok, format!("max_residual={worst:e}")))
}

fn interleave() -> Result<(bool, String)> {
    let rows = w(0, 40);
    let mut ok = true;
    for (_, phi) in corpus() {
        let v = build_family(FamilyKind::SlantHToeplitz, &phi, rows, w(0, 33))?;
        let b = build_family(FamilyKind::SlantToeplitz, &phi, rows, w(0, 16))?;
        let l = build_family(FamilyKind::SlantHankel, &phi, rows, w(0, 16))?;
        for n in 0..=16 {
            for i in rows.iter() {
                ok &= v.entry(i, 2 * n) == b.entry(i, n) && v.entry(i, 2 * n + 1) == l.entry(i, n);
            }
        }
    }
    Ok((ok, "columns n <= 16".into()))
}

fn coisometry() -> Result<(bool, String)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let symbols = [
        LaurentSymbol::constant(1.0),
        LaurentSymbol::monomial(1, 1.0),
        LaurentSymbol::monomial(3, 1.0),
        LaurentSymbol::from_real_slice(0, &[h, h]),
    ];
    let mut worst = 0.0f64;
    for phi in &symbols {
        worst = worst
            .max(coisometry_defect(phi, 16)?.value)
            .max(isometry_sum_check(phi, 1e-12).value)
            .max(partial_isometry_identity(phi, w(0, 16))?.value);
    }
    Ok((worst <= 1e-12, format!("max_defect={worst:e}")))
}

fn negative() -> Result<(bool, String)> {
    let sq = w(0, 16);
    let mut failed = Vec::new();
    for (name, phi) in nonzero_corpus() {
        let hypo = hyponormal_witness(&phi)?.is_some();
        let sa = self_adjoint_distance(&phi, sq, sq)? > 1e-6;
        let b = build_family(FamilyKind::SlantToeplitz, &phi, w(0, 8), w(0, 33))?;
        let rep = check_slant_h_matrix(&b, DEFAULT_TOL)?;
        let excl = !rep.passed && !rep.witnesses.is_empty();
        let f: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&n| frobenius_of_section(&phi, w(0, n - 1), w(0, 4 * n)))
            .collect::<Result<_>>()?;
        let hs = f[1] - f[0] >= 0.5 && f[2] - f[1] >= 0.5;
        if !(hypo && sa && excl && hs) {
            failed.push(name);
        }
    }
    Ok((failed.is_empty(), format!("without witness={failed:?}")))
}

fn perp() -> Result<(bool, String)> {
    let good = slant_hankel_perp_check(
        &LaurentSymbol::from_real_slice(-1, &[1.0, 0.0, 0.0, 1.0]),
        16,
    );
    let bad = slant_hankel_perp_check(&LaurentSymbol::monomial(3, 1.0), 16);
    let m3 = bad.relations.witnesses.iter().any(|w| w.relation == "m3");
    Ok((
        good.passed() && !bad.passed() && m3,
        format!(
            "z^-1+z^2={} z^3={} m3_witness={m3}",
            good.passed(),
            bad.passed()
        ),
    ))
}

fn norm() -> Result<(bool, String)> {
    let mut worst = f64::NEG_INFINITY;
    for (_, phi) in corpus() {
        let d = norm_bound_check(&phi, w(0, 32), w(0, 129), DEFAULT_GRID)?;
        worst = worst.max(d.value - phi.sup_norm(DEFAULT_GRID));
    }
    Ok((worst <= 1e-6, format!("max(norm - sup)={worst:e}")))
}

fn extension() -> Result<(bool, String)> {
    let phi = generic();
    let a = build_family(FamilyKind::SlantHToeplitz, &phi, w(0, 12), w(0, 47))?;
    let mut worst = 0.0f64;
    let mut ok = true;
    for m in [1, 2] {
        let r = check_extension_conditions(&a, m, DEFAULT_TOL)?;
        ok &= r.passed;
        worst = worst.max(r.max_residual);
    }
    let (rows, cols) = (w(0, 12), w(0, 47));
    for (_, phi) in corpus() {
        let base = build_family(FamilyKind::SlantHToeplitz, &phi, rows, cols)?;
        for m in 0..=3 {
            let am = build_family(FamilyKind::Extension(m), &phi, w(-(m as i64), 12), cols)?;
            ok &= am.max_abs_diff(&base) == 0.0;
            for n in 0..m {
                let an = build_family(FamilyKind::Extension(n), &phi, w(-(n as i64), 12), cols)?;
                ok &= am.max_abs_diff(&an) == 0.0;
            }
        }
    }
    Ok((ok && worst <= 1e-12, format!("max_residual={worst:e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for o in run_all() {
            assert!(o.passed, "{}", o.line());
        }
        assert_eq!(run_all().len(), 10);
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope").is_none());
    }
}
