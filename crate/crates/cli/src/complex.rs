//! Parsing of inline complex literals such as `0.5+0i`, `-0.3-0.2i`, `2i`.

use num_complex::Complex64;

use crate::error::{CliError, Result};

pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Invalid(format!("cannot parse complex number {text:?}"));
    let number = |t: &str| t.parse::<f64>().ok().filter(|x| x.is_finite());
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return number(&s).map(|re| Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    // Split at the last sign that is not a leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (number(&body[..k]).ok_or_else(bad)?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => number(t).ok_or_else(bad)?,
    };
    Ok(Complex64::new(re, im))
}

/// Comma-separated list of complex literals, e.g. a point of the ball.
pub fn parse_complex_vector(text: &str) -> Result<Vec<Complex64>> {
    text.split(',').map(parse_complex).collect()
}
