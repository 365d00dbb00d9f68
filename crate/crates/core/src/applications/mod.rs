//! Radial Carleson measures and the hyperbolic-derivative audit of self-maps.

mod audit;
mod carleson;
mod measure;
mod selfmap;

pub use audit::{cor43_audit, hyperbolic_ratio, AuditConfig, AUDIT, EXCLUSION};
pub use carleson::{
    carleson_classify, carleson_necessity_probe, carleson_partial_integrals, carleson_report, classify_partials,
    doubling_depths, CarlesonClass, NumericClass, BLOWUP_GROWTH, BLOWUP_THRESHOLD, CLASSIFY, PROBE,
};
pub use measure::RadialMeasure;
pub use selfmap::SelfMap;

use num_complex::Complex64;

use crate::{Error, Result};

fn parse_real(input: &str, text: &str, offset: usize) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(input, offset, format!("expected a number, found {text:?}")))
}

/// `0.3`, `-0.5i`, `0.1+0.2i`, `i`.
fn parse_complex(input: &str, text: &str, offset: usize) -> Result<Complex64> {
    let t = text.trim();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(input, t, offset)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let imag = |s: &str, at: usize| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => parse_real(input, s, at),
        }
    };
    match split {
        Some(j) => Ok(Complex64::new(
            parse_real(input, &body[..j], offset)?,
            imag(&body[j..], offset + j)?,
        )),
        None => Ok(Complex64::new(0.0, imag(body, offset)?)),
    }
}

/// Splits `[a,b,...]` at top-level commas, returning `(offset, item)` pairs.
fn split_list<'a>(input: &str, text: &'a str, offset: usize) -> Result<Vec<(usize, &'a str)>> {
    let inner = text
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::parse(input, offset, "expected a bracketed list `[...]`"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (j, c) in inner.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push((offset + 1 + start, &inner[start..j]));
                start = j + 1;
            }
            _ => {}
        }
    }
    out.push((offset + 1 + start, &inner[start..]));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let p = |s: &str| parse_complex(s, s, 0).unwrap();
        assert_eq!(p("0.3"), Complex64::new(0.3, 0.0));
        assert_eq!(p("0.5i"), Complex64::new(0.0, 0.5));
        assert_eq!(p("-0.5i"), Complex64::new(0.0, -0.5));
        assert_eq!(p("0.1+0.2i"), Complex64::new(0.1, 0.2));
        assert_eq!(p("0.1-i"), Complex64::new(0.1, -1.0));
        assert_eq!(p("1e-3+2e-1i"), Complex64::new(1e-3, 0.2));
        assert!(parse_complex("x", "x", 0).is_err());
    }

    #[test]
    fn list_split() {
        let items = split_list("[0.1,0.5i]", "[0.1,0.5i]", 0).unwrap();
        assert_eq!(items, vec![(1, "0.1"), (5, "0.5i")]);
        assert!(split_list("0.1", "0.1", 0).is_err());
    }
}
