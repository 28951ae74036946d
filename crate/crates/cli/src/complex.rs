//! Complex numbers on the command line.
//!
//! Accepted forms, with no embedded whitespace:
//!
//! ```text
//! 1.5        -0.25e-3      real
//! 2i  -i  i  1e-5i         imaginary
//! 1+2i  1e-5-3.5i  0.7-i   cartesian, real part first
//! 0.7@45                   polar, modulus @ degrees
//! ```
//!
//! `2i+1`, `1+2`, `1+2i+3i`, `i2` and non-finite parts are rejected.

use qdilog::Complex64;

fn real(s: &str) -> Result<f64, String> {
    let ok = !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'));
    match s.parse::<f64>() {
        Ok(v) if ok && v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a finite real number")),
    }
}

fn imag(s: &str) -> Result<f64, String> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => real(s),
    }
}

/// Byte offset of the sign that separates real and imaginary parts.
fn split_point(s: &str) -> Option<usize> {
    let b = s.as_bytes();
    (1..b.len())
        .rev()
        .find(|&k| matches!(b[k], b'+' | b'-') && !matches!(b[k - 1], b'e' | b'E'))
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    if s.chars().any(char::is_whitespace) {
        return Err(format!("'{s}': whitespace inside a complex number"));
    }
    if let Some((r, deg)) = s.split_once('@') {
        let r = real(r)?;
        let deg = real(deg)?;
        if r < 0.0 {
            return Err(format!("'{s}': polar modulus must be nonnegative"));
        }
        return Ok(Complex64::from_polar(r, deg.to_radians()));
    }
    let err = |e: String| format!("cannot parse '{s}' as a complex number: {e}");
    match s.strip_suffix('i') {
        Some(body) => match split_point(body) {
            Some(k) => Ok(Complex64::new(
                real(&body[..k]).map_err(err)?,
                imag(&body[k..]).map_err(err)?,
            )),
            None => Ok(Complex64::new(0.0, imag(body).map_err(err)?)),
        },
        None => Ok(Complex64::new(real(s).map_err(err)?, 0.0)),
    }
}
