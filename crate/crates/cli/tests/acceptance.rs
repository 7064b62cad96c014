//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.
//!
//! Checks are written directly against the library API (not through the
//! `verify` suites) so the two act as cross-checks; the last criterion drives
//! the built binary.

use std::process::Command;

use num_complex::Complex64;
use slanth::analysis::{
    coisometry_defect, corpus, frobenius_of_section, hyponormal_defect, isometry_sum_check,
    norm_bound_check, partial_isometry_identity, self_adjoint_distance, slant_hankel_perp_check,
};
use slanth::families::{build_compositional, pattern};
use slanth::structure::{
    check_characterization, check_extension_conditions, check_slant_h_matrix, extract_symbol,
};
use slanth::{build_family, FamilyKind, IndexWindow, LaurentSymbol, WindowedMatrix};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn w(lo: i64, hi: i64) -> IndexWindow {
    IndexWindow::new(lo, hi)
}

fn generic() -> LaurentSymbol {
    LaurentSymbol::from_real_slice(-1, &[2.0, 3.0, 5.0, 7.0])
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn oracle_equivalence() -> Check {
    let cols = w(0, 33);
    let mut combos = 0;
    let mut worst = 0.0f64;
    for (name, phi) in corpus() {
        for kind in FamilyKind::COMPOSITIONAL {
            let composed = build_compositional(kind, &phi, cols).map_err(e)?;
            let rows = composed.rows().hull(&w(0, 33)).intersect(&w(0, i64::MAX));
            let closed = build_family(kind, &phi, rows, cols).map_err(e)?;
            let composed = composed.section(rows, cols).map_err(e)?;
            let r = closed.max_abs_diff(&composed);
            ensure(r <= 1e-13, format!("{kind} on {name}: residual {r:e}"))?;
            worst = worst.max(r);
            combos += 1;
        }
    }
    ensure(combos >= 56, format!("only {combos} combinations"))?;
    Ok(format!(
        "{combos} symbol x kind combinations, max residual {worst:e}"
    ))
}

fn golden_matrices() -> Check {
    // Coefficient index at each position, read off the displayed matrices.
    let v: [[i64; 7]; 5] = [
        [0, 1, -1, 2, -2, 3, -3],
        [2, 3, 1, 4, 0, 5, -1],
        [4, 5, 3, 6, 2, 7, 1],
        [6, 7, 5, 8, 4, 9, 3],
        [8, 9, 7, 10, 6, 11, 5],
    ];
    let a1_top = [-2, -1, -3, 0, -4, 1, -5];
    let a2_top = [-4, -3, -5, -2, -6, -1, -7];
    let same = |kind: FamilyKind, top: i64, rows: &[Vec<i64>]| -> Result<bool, String> {
        let p = pattern(kind, w(top, top + rows.len() as i64 - 1), w(0, 6)).map_err(e)?;
        Ok(p.iter().zip(rows).all(|(got, want)| {
            got.iter()
                .map(|r| (r.index, r.conjugated))
                .eq(want.iter().map(|&k| (k, false)))
        }))
    };
    let v_rows: Vec<Vec<i64>> = v.iter().map(|r| r.to_vec()).collect();
    let mut a1 = vec![a1_top.to_vec()];
    a1.extend((0..6).map(v_row));
    let mut a2 = vec![a2_top.to_vec(), a1_top.to_vec()];
    a2.extend((0..6).map(v_row));
    ensure(
        same(FamilyKind::SlantHToeplitz, 0, &v_rows)?,
        "V block differs",
    )?;
    ensure(
        same(FamilyKind::Extension(1), -1, &a1)?,
        "A_1 block differs",
    )?;
    ensure(
        same(FamilyKind::Extension(2), -2, &a2)?,
        "A_2 block differs",
    )?;
    Ok("V 5x7, A_1 7x7 from row -1, A_2 8x7 from row -2".into())
}

/// Row `i` of the `V` pattern over columns 0..=6, written out longhand.
fn v_row(i: i64) -> Vec<i64> {
    let t = 2 * i;
    vec![t, t + 1, t - 1, t + 2, t - 2, t + 3, t - 3]
}

fn roundtrip_injectivity() -> Check {
    let mut n = 0;
    for (name, phi) in corpus() {
        let s = phi.support();
        if !(s.is_empty() || w(-16, 16).covers(&s)) {
            continue;
        }
        let m = build_family(FamilyKind::SlantHToeplitz, &phi, w(0, 8), w(0, 33)).map_err(e)?;
        let back = extract_symbol(&m).map_err(e)?;
        ensure(back == phi, format!("{name}: extracted {back}"))?;
        n += 1;
    }
    Ok(format!("{n} corpus symbols recovered exactly"))
}

fn predicate_characterization_agreement() -> Check {
    let sites = [
        (0, 0),
        (1, 0),
        (4, 0),
        (2, 3),
        (0, 7),
        (1, 4),
        (3, 8),
        (0, 10),
    ];
    let mut worst = 0.0f64;
    for (name, phi) in corpus() {
        let m = build_family(FamilyKind::SlantHToeplitz, &phi, w(0, 12), w(0, 43)).map_err(e)?;
        let p = check_slant_h_matrix(&m, 1e-12).map_err(e)?;
        let c = check_characterization(&m, w(0, 9), 1e-12).map_err(e)?;
        ensure(
            p.passed && c.passed,
            format!("{name}: clean section rejected"),
        )?;
        worst = worst.max(p.max_residual).max(c.max_residual);
        for (i, j) in sites {
            let mut bad = m.clone();
            bad.set(i, j, m.entry(i, j) + Complex64::new(1.0, 0.0));
            let p = check_slant_h_matrix(&bad, 1e-12).map_err(e)?;
            let c = check_characterization(&bad, w(0, 9), 1e-12).map_err(e)?;
            ensure(
                !p.passed && !p.witnesses.is_empty(),
                format!("{name}: pattern missed ({i}, {j})"),
            )?;
            ensure(
                !c.passed && !c.witnesses.is_empty(),
                format!("{name}: identities missed ({i}, {j})"),
            )?;
        }
    }
    Ok(format!(
        "clean residual {worst:e}; {} perturbation sites caught by both",
        sites.len()
    ))
}

fn interleaving() -> Check {
    let rows = w(0, 24);
    for (name, phi) in corpus() {
        let v = build_family(FamilyKind::SlantHToeplitz, &phi, rows, w(0, 33)).map_err(e)?;
        let b = build_family(FamilyKind::SlantToeplitz, &phi, rows, w(0, 16)).map_err(e)?;
        let l = build_family(FamilyKind::SlantHankel, &phi, rows, w(0, 16)).map_err(e)?;
        for n in 0..=16 {
            for i in rows.iter() {
                ensure(
                    v.entry(i, 2 * n) == b.entry(i, n) && v.entry(i, 2 * n + 1) == l.entry(i, n),
                    format!("{name}: column pair {n} row {i}"),
                )?;
            }
        }
    }
    Ok("even/odd columns equal B/L columns for n <= 16".into())
}

fn coisometry() -> Check {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cases = [
        ("1", LaurentSymbol::constant(1.0)),
        ("z", LaurentSymbol::monomial(1, 1.0)),
        ("z^3", LaurentSymbol::monomial(3, 1.0)),
        ("(1+z)/sqrt2", LaurentSymbol::from_real_slice(0, &[h, h])),
    ];
    let mut worst = 0.0f64;
    for (name, phi) in &cases {
        let c = coisometry_defect(phi, 16).map_err(e)?.value;
        let s = isometry_sum_check(phi, 1e-12).value;
        let p = partial_isometry_identity(phi, w(0, 16)).map_err(e)?.value;
        ensure(
            c <= 1e-12 && s <= 1e-12 && p <= 1e-12,
            format!("{name}: defects {c:e} {s:e} {p:e}"),
        )?;
        worst = worst.max(c).max(s).max(p);
    }
    Ok(format!("max defect {worst:e}"))
}

fn negative_results() -> Check {
    let mut n = 0;
    for (name, phi) in corpus().into_iter().filter(|(_, p)| !p.is_zero()) {
        let hypo = (0..=1)
            .map(|k| hyponormal_defect(&phi, k))
            .collect::<Result<Vec<_>, _>>()
            .map_err(e)?;
        ensure(
            hypo.iter().any(|&d| d < -1e-12),
            format!("{name}: hyponormal defects {hypo:?}"),
        )?;
        let sa = self_adjoint_distance(&phi, w(0, 16), w(0, 16)).map_err(e)?;
        ensure(sa > 1e-6, format!("{name}: self-adjoint distance {sa:e}"))?;
        let b = build_family(FamilyKind::SlantToeplitz, &phi, w(0, 8), w(0, 33)).map_err(e)?;
        let r = check_slant_h_matrix(&b, 1e-12).map_err(e)?;
        ensure(
            !r.passed && !r.witnesses.is_empty(),
            format!("{name}: B section passes the slant H-Toeplitz pattern"),
        )?;
        let f = [8i64, 16, 32]
            .iter()
            .map(|&k| frobenius_of_section(&phi, w(0, k - 1), w(0, 4 * k)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(e)?;
        ensure(
            f[1] - f[0] >= 0.5 && f[2] - f[1] >= 0.5,
            format!("{name}: Frobenius growth {f:?}"),
        )?;
        n += 1;
    }
    Ok(format!("{n} nonzero symbols produce all four witnesses"))
}

fn perp_check() -> Check {
    let good = LaurentSymbol::from_real_slice(-1, &[1.0, 0.0, 0.0, 1.0]);
    let r = slant_hankel_perp_check(&good, 16);
    ensure(r.passed(), "z^-1 + z^2 rejected")?;
    let r = slant_hankel_perp_check(&LaurentSymbol::monomial(3, 1.0), 16);
    ensure(!r.passed(), "z^3 accepted")?;
    let w3 = r
        .relations
        .witnesses
        .iter()
        .find(|w| w.relation == "m3")
        .ok_or("no m3 witness for z^3")?;
    Ok(format!("z^3 fails with {w3}"))
}

fn norm_bound() -> Check {
    let mut worst = f64::NEG_INFINITY;
    for (name, phi) in corpus() {
        let d = norm_bound_check(&phi, w(0, 32), w(0, 129), 4096).map_err(e)?;
        let sup = phi.sup_norm(4096);
        ensure(
            d.value <= sup + 1e-6,
            format!("{name}: norm {} > sup {sup}", d.value),
        )?;
        worst = worst.max(d.value - sup);
    }
    Ok(format!("max(section norm - sup norm) = {worst:e}"))
}

fn extension_conditions() -> Check {
    let a = build_family(FamilyKind::SlantHToeplitz, &generic(), w(0, 12), w(0, 47)).map_err(e)?;
    let mut worst = 0.0f64;
    for m in [1, 2] {
        let r = check_extension_conditions(&a, m, 1e-12).map_err(e)?;
        ensure(r.passed, format!("m = {m}: {}", r.to_text()))?;
        worst = worst.max(r.max_residual);
    }
    for (name, phi) in corpus() {
        let sections: Vec<WindowedMatrix> = (0..=3u32)
            .map(|m| build_family(FamilyKind::Extension(m), &phi, w(-(m as i64), 10), w(0, 30)))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        for x in &sections {
            for y in &sections {
                ensure(
                    x.max_abs_diff(y) == 0.0,
                    format!("{name}: A_m differ on shared rows"),
                )?;
            }
        }
    }
    Ok(format!(
        "identities residual {worst:e}; A_0..A_3 agree on shared entries"
    ))
}

fn slanth(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_slanth"))
        .args(args)
        .output()
        .expect("run slanth")
}

fn cli_conformance() -> Check {
    let out = slanth(&["verify", "--all"]);
    ensure(
        out.status.code() == Some(0),
        format!("verify --all exited {:?}", out.status),
    )?;

    let dir = tempfile::tempdir().map_err(e)?;
    let file = dir.path().join("v.txt");
    let file_s = file.to_str().unwrap();
    let phi = "phi=-1:0.1, 0:1e-7-0.3i, 1:3.333333333333333, 2:-7";
    let out = slanth(&[
        "build",
        "--family",
        "slant-h-toeplitz",
        "--symbol",
        phi,
        "--rows",
        "0:8",
        "--cols",
        "0:33",
        "--out",
        file_s,
    ]);
    ensure(
        out.status.success(),
        format!("build exited {:?}", out.status),
    )?;
    let text = std::fs::read_to_string(&file).map_err(e)?;
    let loaded = WindowedMatrix::parse_dump(&text).map_err(e)?;
    let sym = slanth::parse_symbol(phi.trim_start_matches("phi=")).map_err(e)?;
    let direct = build_family(FamilyKind::SlantHToeplitz, &sym, w(0, 8), w(0, 33)).map_err(e)?;
    ensure(
        loaded.bit_eq(&direct),
        "dump does not reproduce the section bit for bit",
    )?;
    ensure(loaded.to_dump_string() == text, "re-dump differs from file")?;
    let out = slanth(&["check", "slant-h", "--matrix", file_s]);
    ensure(
        out.status.code() == Some(0),
        format!("check on clean dump exited {:?}", out.status),
    )?;

    let mut bad = loaded.clone();
    bad.set(2, 4, bad.entry(2, 4) + Complex64::new(1.0, 0.0));
    let bad_file = dir.path().join("bad.txt");
    std::fs::write(&bad_file, bad.to_dump_string()).map_err(e)?;
    let out = slanth(&["check", "slant-h", "--matrix", bad_file.to_str().unwrap()]);
    ensure(
        out.status.code() == Some(1),
        format!("check on perturbed dump exited {:?}", out.status),
    )?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    let witnesses = stdout
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("PASS") && !l.starts_with("FAIL"))
        .count();
    ensure(witnesses >= 1, "no witness lines")?;
    Ok(format!(
        "verify exit 0; perturbed check exit 1 with {witnesses} witness lines; dump bit-exact"
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("oracle equivalence", oracle_equivalence),
        ("golden matrices", golden_matrices),
        ("roundtrip injectivity", roundtrip_injectivity),
        (
            "predicate/characterization agreement",
            predicate_characterization_agreement,
        ),
        ("interleaving", interleaving),
        ("coisometry", coisometry),
        ("negative results produce witnesses", negative_results),
        ("slant-Hankel perp", perp_check),
        ("norm bound", norm_bound),
        ("extension conditions", extension_conditions),
        ("CLI conformance", cli_conformance),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
