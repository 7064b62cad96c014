//! Number formatting shared by the text formats.
//!
//! Reals are written with the shortest decimal that parses back to the same
//! `f64`; complex entries as `re:im`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const FORMAT_HEADER: &str = "#fmt 1";

pub fn fmt_real(x: f64) -> String {
    format!("{x:?}")
}

pub fn fmt_complex(c: Complex64) -> String {
    format!("{:?}:{:?}", c.re, c.im)
}

pub fn parse_real(s: &str, column: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::parse(column, format!("not a number: `{s}`")))
}

/// Parses `re:im`.
pub fn parse_complex_pair(s: &str, column: usize) -> Result<Complex64> {
    let (re, im) = s
        .split_once(':')
        .ok_or_else(|| Error::parse(column, format!("expected re:im, got `{s}`")))?;
    Ok(Complex64::new(
        parse_real(re, column)?,
        parse_real(im, column + re.len() + 1)?,
    ))
}

/// Parses the inline complex syntax `re`, `re+imi`, `re-imi`, `imi`, `i`, `-i`.
pub fn parse_complex_inline(s: &str, column: usize) -> Result<Complex64> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::parse(column, "empty number"));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(s, column)?, 0.0));
    };
    // Split point: the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re.is_empty() {
        0.0
    } else {
        parse_real(re.trim(), column)?
    };
    let im = match im.trim() {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => parse_real(t.strip_prefix('+').unwrap_or(t), column)?,
    };
    Ok(Complex64::new(re, im))
}
