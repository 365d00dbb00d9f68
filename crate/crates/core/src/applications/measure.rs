use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{parse_real, split_list};
use crate::{Error, Result};

/// A positive measure on `[0, 1)`.
///
/// DSL: `power:β` for `(1−r)^β dr`, `atom:r0:mass`, `mix:[m1,m2,...]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RadialMeasure {
    Power { beta: f64 },
    Atom { r0: f64, mass: f64 },
    Mixture(Vec<RadialMeasure>),
}

impl RadialMeasure {
    pub fn power(beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::Domain(format!("power exponent must be finite, got {beta}")));
        }
        Ok(RadialMeasure::Power { beta })
    }

    pub fn atom(r0: f64, mass: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r0) {
            return Err(Error::Domain(format!("atom location must lie in [0, 1), got {r0}")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!("atom mass must be positive, got {mass}")));
        }
        Ok(RadialMeasure::Atom { r0, mass })
    }

    pub fn mixture(parts: Vec<RadialMeasure>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Domain("a mixture needs at least one component".into()));
        }
        Ok(RadialMeasure::Mixture(parts))
    }

    fn parse_at(input: &str, text: &str, offset: usize) -> Result<Self> {
        let t = text.trim();
        let offset = offset + (text.len() - text.trim_start().len());
        let (head, rest) = t
            .split_once(':')
            .ok_or_else(|| Error::parse(input, offset, "expected `power:`, `atom:` or `mix:`"))?;
        let body = offset + head.len() + 1;
        let domain = |e: Error| match e {
            Error::Domain(m) => Error::parse(input, body, m),
            other => other,
        };
        match head {
            "power" => RadialMeasure::power(parse_real(input, rest, body)?).map_err(domain),
            "atom" => {
                let (a, b) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::parse(input, body, "expected `atom:r0:mass`"))?;
                let r0 = parse_real(input, a, body)?;
                let mass = parse_real(input, b, body + a.len() + 1)?;
                RadialMeasure::atom(r0, mass).map_err(domain)
            }
            "mix" => {
                let parts = split_list(input, rest, body)?
                    .into_iter()
                    .map(|(at, item)| RadialMeasure::parse_at(input, item, at))
                    .collect::<Result<Vec<_>>>()?;
                RadialMeasure::mixture(parts).map_err(domain)
            }
            _ => Err(Error::parse(input, offset, format!("unknown measure family {head:?}"))),
        }
    }
}

impl FromStr for RadialMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RadialMeasure::parse_at(s, s, 0)
    }
}

impl fmt::Display for RadialMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialMeasure::Power { beta } => write!(f, "power:{beta}"),
            RadialMeasure::Atom { r0, mass } => write!(f, "atom:{r0}:{mass}"),
            RadialMeasure::Mixture(parts) => {
                f.write_str("mix:[")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl TryFrom<String> for RadialMeasure {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RadialMeasure> for String {
    fn from(m: RadialMeasure) -> String {
        m.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in ["power:-0.5", "atom:0.5:1", "mix:[power:0,atom:0.25:2,mix:[power:1]]"] {
            let m: RadialMeasure = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert_eq!("atom:0.5:1.0".parse::<RadialMeasure>().unwrap(), RadialMeasure::Atom { r0: 0.5, mass: 1.0 });
    }

    #[test]
    fn parse_errors_carry_positions() {
        let pos = |s: &str| match s.parse::<RadialMeasure>().unwrap_err() {
            Error::Parse { position, .. } => position,
            e => panic!("{e}"),
        };
        assert_eq!(pos("power:x"), 6);
        assert_eq!(pos("atom:1.5:1"), 5);
        assert_eq!(pos("atom:0.5:y"), 9);
        assert_eq!(pos("cube:1"), 0);
        assert_eq!(pos("mix:[power:0,atom:0.1:z]"), 22);
    }
}
