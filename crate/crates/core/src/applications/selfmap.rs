use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{parse_complex, parse_real, split_list};
use crate::{Error, Result};

/// A holomorphic self-map of the disk with closed-form derivative.
///
/// DSL: `scale:c`, `moebius:a`, `blaschke:[a1,a2,...]`, `atomic:c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SelfMap {
    /// `z ↦ cz`, `|c| ≤ 1`.
    Scale(Complex64),
    /// `z ↦ (z + a)/(1 + āz)`, `|a| < 1`.
    Moebius(Complex64),
    /// `z ↦ Π (z − a_j)/(1 − ā_j z)`.
    Blaschke(Vec<Complex64>),
    /// `z ↦ exp(c (z + 1)/(z − 1))`, `c > 0`.
    Atomic(f64),
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl SelfMap {
    pub fn identity() -> Self {
        SelfMap::Scale(one())
    }

    fn validate(self) -> Result<Self> {
        let ok = match &self {
            SelfMap::Scale(c) => c.norm() <= 1.0,
            SelfMap::Moebius(a) => a.norm() < 1.0,
            SelfMap::Blaschke(zeros) => zeros.iter().all(|a| a.norm() < 1.0),
            SelfMap::Atomic(c) => *c > 0.0 && c.is_finite(),
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::Domain(format!("{self} does not map the disk into itself")))
        }
    }

    pub fn value(&self, z: Complex64) -> Complex64 {
        match self {
            SelfMap::Scale(c) => c * z,
            SelfMap::Moebius(a) => (z + a) / (one() + a.conj() * z),
            SelfMap::Blaschke(zeros) => zeros.iter().map(|a| (z - a) / (one() - a.conj() * z)).product(),
            SelfMap::Atomic(c) => (*c * (z + 1.0) / (z - 1.0)).exp(),
        }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match self {
            SelfMap::Scale(c) => *c,
            SelfMap::Moebius(a) => {
                let d = one() + a.conj() * z;
                (1.0 - a.norm_sqr()) / (d * d)
            }
            SelfMap::Blaschke(zeros) => {
                let factors: Vec<Complex64> = zeros.iter().map(|a| (z - a) / (one() - a.conj() * z)).collect();
                let mut total = Complex64::new(0.0, 0.0);
                for (j, a) in zeros.iter().enumerate() {
                    let d = one() - a.conj() * z;
                    let mut term = (1.0 - a.norm_sqr()) / (d * d);
                    for (i, f) in factors.iter().enumerate() {
                        if i != j {
                            term *= f;
                        }
                    }
                    total += term;
                }
                total
            }
            SelfMap::Atomic(c) => {
                let d = z - 1.0;
                self.value(z) * (-2.0 * c) / (d * d)
            }
        }
    }

    /// `1 − |φ(z)|` without cancellation where a closed form allows it.
    pub fn one_minus_modulus(&self, z: Complex64) -> f64 {
        let gap = 1.0 - z.norm_sqr();
        match self {
            SelfMap::Scale(c) => 1.0 - c.norm() * z.norm(),
            SelfMap::Moebius(a) => {
                // 1 − |φ|² = (1 − |a|²)(1 − |z|²)/|1 + āz|².
                let d = (1.0 - a.norm_sqr()) * gap / (one() + a.conj() * z).norm_sqr();
                d / (1.0 + (1.0 - d).max(0.0).sqrt())
            }
            SelfMap::Blaschke(zeros) => {
                // ln|B| = ½ Σ ln(1 − δ_j), δ_j = 1 − |b_j|².
                let log_mod: f64 = zeros
                    .iter()
                    .map(|a| {
                        let delta = (1.0 - a.norm_sqr()) * gap / (one() - a.conj() * z).norm_sqr();
                        0.5 * (-delta).ln_1p()
                    })
                    .sum();
                -log_mod.exp_m1()
            }
            // |φ| = exp(−c (1 − |z|²)/|1 − z|²).
            SelfMap::Atomic(c) => -(-c * gap / (one() - z).norm_sqr()).exp_m1(),
        }
    }

    fn parse_at(input: &str, text: &str) -> Result<Self> {
        let (head, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::parse(input, 0, "expected `scale:`, `moebius:`, `blaschke:` or `atomic:`"))?;
        let body = head.len() + 1;
        let map = match head {
            "scale" => SelfMap::Scale(parse_complex(input, rest, body)?),
            "moebius" => SelfMap::Moebius(parse_complex(input, rest, body)?),
            "blaschke" => SelfMap::Blaschke(
                split_list(input, rest, body)?
                    .into_iter()
                    .map(|(at, item)| {
                        let a = parse_complex(input, item, at)?;
                        if a.norm() < 1.0 {
                            Ok(a)
                        } else {
                            Err(Error::parse(input, at, "Blaschke zeros must lie in the open disk"))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            "atomic" => SelfMap::Atomic(parse_real(input, rest, body)?),
            _ => return Err(Error::parse(input, 0, format!("unknown self-map family {head:?}"))),
        };
        map.validate().map_err(|e| match e {
            Error::Domain(m) => Error::parse(input, body, m),
            other => other,
        })
    }
}

fn fmt_complex(c: &Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

impl fmt::Display for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelfMap::Scale(c) => write!(f, "scale:{}", fmt_complex(c)),
            SelfMap::Moebius(a) => write!(f, "moebius:{}", fmt_complex(a)),
            SelfMap::Blaschke(zeros) => {
                let items: Vec<String> = zeros.iter().map(fmt_complex).collect();
                write!(f, "blaschke:[{}]", items.join(","))
            }
            SelfMap::Atomic(c) => write!(f, "atomic:{c}"),
        }
    }
}

impl FromStr for SelfMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SelfMap::parse_at(s, s.trim())
    }
}

impl TryFrom<String> for SelfMap {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SelfMap> for String {
    fn from(m: SelfMap) -> String {
        m.to_string()
    }
}
