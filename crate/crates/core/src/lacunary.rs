//! Hadamard gap series `Σ a_k z^{n_k}` with `n_k = 2ᵏ` or `n_k = 2ᵏ − 1`.

use std::f64::consts::{LN_2, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::gauge::Gauge;
use crate::holomorphic::Holomorphic;
use crate::summation::NeumaierSum;
use crate::{Error, Result};

/// Largest truncation order chosen automatically.
pub const MAX_AUTO_ORDER: usize = 40;
/// Largest truncation order accepted at all (`2^62` still fits in `u64`).
pub const MAX_ORDER: usize = 62;
/// Tail tolerance used by [`default_order`].
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

// Powers below this modulus are flushed to zero.
const FLUSH: f64 = 1e-150;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExponentRule {
    #[serde(rename = "2^k")]
    PowersOfTwo,
    #[serde(rename = "2^k-1")]
    PowersOfTwoMinusOne,
}

impl ExponentRule {
    pub fn exponent(self, k: usize) -> u64 {
        match self {
            ExponentRule::PowersOfTwo => 1u64 << k,
            ExponentRule::PowersOfTwoMinusOne => (1u64 << k) - 1,
        }
    }
}

impl fmt::Display for ExponentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExponentRule::PowersOfTwo => "2^k",
            ExponentRule::PowersOfTwoMinusOne => "2^k-1",
        })
    }
}

impl FromStr for ExponentRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2^k" | "2k" => Ok(ExponentRule::PowersOfTwo),
            "2^k-1" | "2k-1" => Ok(ExponentRule::PowersOfTwoMinusOne),
            _ => Err(Error::parse(s, 0, "expected `2^k` or `2^k-1`")),
        }
    }
}

/// A truncated gap series `Σ_{k=0}^{K} a_k z^{n_k}`.
///
/// When built from a gauge, `a_k = ω(2^{-k})` and the omitted terms `k > K`
/// are covered by the tail bounds of [`GapSeries::eval`].
#[derive(Clone, Debug, PartialEq)]
pub struct GapSeries {
    coeffs: Vec<f64>,
    rule: ExponentRule,
    gauge: Option<Gauge>,
}

/// A value together with a bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Serialized form: `{gauge, rule, K, coeffs[]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub gauge: Option<Gauge>,
    pub rule: ExponentRule,
    #[serde(rename = "K")]
    pub order: usize,
    pub coeffs: Vec<f64>,
}

/// Whether `Σ ω²(2^{-k})` is finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum L2Membership {
    /// Certified enclosure of the full sum.
    InL2 { lower: f64, upper: f64 },
    /// The sum diverges; `partial_sums` lists `(k, Σ_{j≤k} ω²(2^{-j}))`.
    NotInL2 {
        evidence: String,
        partial_sums: Vec<(usize, f64)>,
    },
}

impl L2Membership {
    pub fn is_in_l2(&self) -> bool {
        matches!(self, L2Membership::InL2 { .. })
    }
}

impl GapSeries {
    /// A series with explicit coefficients `a_0..=a_K`.
    pub fn new(coeffs: Vec<f64>, rule: ExponentRule) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_ORDER + 1 {
            return Err(Error::Domain(format!(
                "a gap series needs between 1 and {} coefficients, got {}",
                MAX_ORDER + 1,
                coeffs.len()
            )));
        }
        Ok(GapSeries {
            coeffs,
            rule,
            gauge: None,
        })
    }

    /// The extremal series `Σ_{k=0}^{K} ω(2^{-k}) z^{n_k}`.
    pub fn extremal(gauge: Gauge, order: usize, rule: ExponentRule) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::Resource(format!("order {order} exceeds {MAX_ORDER}")));
        }
        Ok(GapSeries {
            coeffs: (0..=order).map(|k| gauge.omega_dyadic(k)).collect(),
            rule,
            gauge: Some(gauge),
        })
    }

    /// The extremal series truncated by [`default_order`] for radius `r_max`.
    pub fn extremal_for_radius(gauge: Gauge, rule: ExponentRule, r_max: f64) -> Result<Self> {
        Self::extremal(gauge, default_order(&gauge, rule, r_max), rule)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn rule(&self) -> ExponentRule {
        self.rule
    }

    pub fn gauge(&self) -> Option<Gauge> {
        self.gauge
    }

    /// Truncation order `K` (index of the last coefficient).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn exponents(&self) -> Vec<u64> {
        (0..self.coeffs.len()).map(|k| self.rule.exponent(k)).collect()
    }

    pub fn record(&self) -> SeriesRecord {
        SeriesRecord {
            gauge: self.gauge,
            rule: self.rule,
            order: self.order(),
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn from_record(record: &SeriesRecord) -> Result<Self> {
        let mut s = GapSeries::new(record.coeffs.clone(), record.rule)?;
        if s.order() != record.order {
            return Err(Error::Domain(format!(
                "record declares K={} but holds {} coefficients",
                record.order,
                record.coeffs.len()
            )));
        }
        s.gauge = record.gauge;
        Ok(s)
    }

    /// Series with coefficients multiplied term by term by `signs`.
    pub fn with_signs(&self, signs: &[f64]) -> GapSeries {
        GapSeries {
            coeffs: self.coeffs.iter().zip(signs).map(|(a, s)| a * s).collect(),
            rule: self.rule,
            gauge: None,
        }
    }

    /// Series multiplied by a constant (drops the gauge link).
    pub fn scaled(&self, factor: f64) -> GapSeries {
        GapSeries {
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
            rule: self.rule,
            gauge: None,
        }
    }

    /// The series of `Rf = Σ a_k n_k z^{n_k}`.
    pub fn derivative_series(&self) -> GapSeries {
        GapSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a * self.rule.exponent(k) as f64)
                .collect(),
            rule: self.rule,
            gauge: None,
        }
    }

    /// Bound on `Σ_{k>K} |a_k| ρ^{n_k}` (or the same with weights `n_k` for
    /// the derivative), using `a_k = ω(2^{-k}) ≤ ω(2^{-K-1})` for `k > K`.
    /// Zero when the series is not gauge-backed: it is then exactly the
    /// finite sum.
    pub fn tail_bound(&self, rho: f64, derivative: bool) -> f64 {
        match self.gauge {
            Some(gauge) => gauge_tail_bound(&gauge, self.rule, self.order(), rho, derivative),
            None => 0.0,
        }
    }

    fn check_disk(z: Complex64) -> Result<()> {
        if !(z.norm() < 1.0) {
            return Err(Error::Domain(format!("|z| must be < 1, got |z| = {}", z.norm())));
        }
        Ok(())
    }

    /// Visits `(k, z^{n_k})` with powers built by repeated squaring.
    fn sum_terms(&self, z: Complex64, weight: impl Fn(usize, f64) -> f64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let mut square = z; // z^{2^k}
        let mut power = Complex64::new(1.0, 0.0); // z^{2^k - 1}
        let mut acc = zero;
        for (k, &a) in self.coeffs.iter().enumerate() {
            let zk = match self.rule {
                ExponentRule::PowersOfTwo => square,
                ExponentRule::PowersOfTwoMinusOne => power,
            };
            if zk == zero {
                // Flushed: every later power vanishes too (except the
                // constant term of the 2^k - 1 rule, handled at k = 0).
                if k > 0 || self.rule == ExponentRule::PowersOfTwo {
                    break;
                }
            }
            acc += zk * weight(k, a);
            power *= square;
            square *= square;
            if square.norm() < FLUSH {
                square = zero;
            }
            if power.norm() < FLUSH {
                power = zero;
            }
        }
        acc
    }

    /// `f(z)` with the tail bound of the truncated terms.
    pub fn eval(&self, z: Complex64) -> Result<SeriesValue> {
        Self::check_disk(z)?;
        Ok(SeriesValue {
            value: self.sum_terms(z, |_, a| a),
            tail_bound: self.tail_bound(z.norm(), false),
        })
    }

    /// `Rf(z) = Σ a_k n_k z^{n_k}` with the tail bound of the truncated terms.
    pub fn radial_derivative_eval(&self, z: Complex64) -> Result<SeriesValue> {
        Self::check_disk(z)?;
        let rule = self.rule;
        Ok(SeriesValue {
            value: self.sum_terms(z, |k, a| a * rule.exponent(k) as f64),
            tail_bound: self.tail_bound(z.norm(), true),
        })
    }

    /// Classification of `Σ ω²(2^{-k})` for the gauge this series came from.
    pub fn l2_membership(&self) -> Result<L2Membership> {
        let gauge = self
            .gauge
            .ok_or_else(|| Error::Unsupported("l2_membership needs a gauge-backed series".into()))?;
        Ok(l2_membership(&gauge))
    }

    /// `|a_k| r^{n_k}` for every term.
    fn term_moduli(&self, r: f64) -> Vec<f64> {
        let ln_r = r.ln();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let n = self.rule.exponent(k);
                if n == 0 {
                    a.abs()
                } else {
                    a.abs() * (n as f64 * ln_r).exp()
                }
            })
            .collect()
    }

    /// Largest exponent whose term is not negligible on the circle of radius `r`.
    pub fn significant_exponent(&self, r: f64) -> u64 {
        let moduli = self.term_moduli(r);
        let total: f64 = moduli.iter().sum();
        moduli
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 1e-13 * total)
            .map(|(k, _)| self.rule.exponent(k))
            .max()
            .unwrap_or(0)
    }
}

/// Tail bound for the extremal series of `gauge` truncated at `order`.
fn gauge_tail_bound(gauge: &Gauge, rule: ExponentRule, order: usize, rho: f64, derivative: bool) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    if order >= MAX_ORDER {
        return f64::INFINITY;
    }
    let w = gauge.omega_dyadic(order + 1);
    let n = rule.exponent(order + 1) as f64;
    let head = (n * rho.ln()).exp();
    if derivative {
        w * head * (n * (1.0 - rho) + rho) / ((1.0 - rho) * (1.0 - rho))
    } else {
        w * head / (1.0 - rho)
    }
}

/// Smallest `K ≤ 40` whose value tail bound at `r_max` is at most `1e-12`.
pub fn default_order(gauge: &Gauge, rule: ExponentRule, r_max: f64) -> usize {
    (0..=MAX_AUTO_ORDER)
        .find(|&k| gauge_tail_bound(gauge, rule, k, r_max, false) <= DEFAULT_TAIL_TOL)
        .unwrap_or(MAX_AUTO_ORDER)
}

/// Closed-form classification of `Σ_k ω²(2^{-k})`, which dominates `I_ω(0+)`.
pub fn l2_membership(gauge: &Gauge) -> L2Membership {
    use crate::gauge::GaugeKind;
    let partial_sums = || {
        let mut acc = NeumaierSum::new();
        let mut out = Vec::new();
        let mut next = 10;
        for k in 0..=100_000usize {
            let w = gauge.omega_dyadic(k);
            acc += w * w;
            if k + 1 == next {
                out.push((k, acc.value()));
                next *= 10;
            }
        }
        out
    };
    match gauge.kind() {
        GaugeKind::Const => L2Membership::NotInL2 {
            evidence: "sum of omega^2(2^-k) = sum of 1 diverges; it dominates I(0+) = infinity".into(),
            partial_sums: partial_sums(),
        },
        GaugeKind::Pow { alpha } => {
            // Geometric series with ratio 2^{-2α}.
            let sum = 1.0 / (1.0 - (-2.0 * alpha * LN_2).exp());
            L2Membership::InL2 {
                lower: sum * (1.0 - 1e-15),
                upper: sum * (1.0 + 1e-15),
            }
        }
        GaugeKind::Log { beta } => {
            let gamma = 2.0 * beta + 1.0;
            if gamma >= 0.0 {
                L2Membership::NotInL2 {
                    evidence: format!(
                        "omega^2(2^-k) = (1 + k ln 2)^{} is not summable (compare with the harmonic series)",
                        2.0 * beta
                    ),
                    partial_sums: partial_sums(),
                }
            } else {
                // Decreasing terms f(k) = (1 + k ln 2)^{2β}:
                // S_M ≤ Σ ≤ S_M + ∫_M^∞ f.
                let m = 100_000usize;
                let s_m: f64 = (0..=m)
                    .map(|k| gauge.omega_dyadic(k).powi(2))
                    .sum::<NeumaierSum>()
                    .value();
                let tail = (1.0 + m as f64 * LN_2).powf(gamma) / (-gamma * LN_2);
                L2Membership::InL2 {
                    lower: s_m,
                    upper: s_m + tail,
                }
            }
        }
    }
}

/// Two-level table of `e^{2πi j/N}` for `N = 2^levels`.
struct Twiddles {
    low_bits: u32,
    low: Vec<Complex64>,
    high: Vec<Complex64>,
}

impl Twiddles {
    fn new(levels: u32) -> Self {
        let low_bits = levels.div_ceil(2);
        let n = 2f64.powi(levels as i32);
        let low = (0..1usize << low_bits)
            .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / n))
            .collect();
        let high = (0..1usize << (levels - low_bits))
            .map(|j| Complex64::from_polar(1.0, TAU * ((j as f64) * 2f64.powi(low_bits as i32)) / n))
            .collect();
        Twiddles { low_bits, low, high }
    }

    #[inline]
    fn get(&self, idx: usize) -> Complex64 {
        self.low[idx & ((1 << self.low_bits) - 1)] * self.high[idx >> self.low_bits]
    }
}

struct Ladder<'a, P: Fn(f64) -> f64> {
    levels: u32,
    coeffs: &'a [f64],
    twiddles: Twiddles,
    power: P,
    buckets: Vec<NeumaierSum>,
}

impl<P: Fn(f64) -> f64> Ladder<'_, P> {
    // Node at `level` fixes the low `level` bits `v` of the sample index; the
    // term attached to that level has period 2^level in the index.
    fn visit(&mut self, level: u32, v: usize, partial: Complex64) {
        if level == self.levels {
            let tz = if v == 0 { self.levels } else { v.trailing_zeros() };
            self.buckets[tz as usize] += (self.power)(partial.norm_sqr());
            return;
        }
        let k = (self.levels - level - 1) as usize;
        let c = self.coeffs.get(k).copied().unwrap_or(0.0);
        let shift = self.levels - level - 1;
        for bit in 0..2usize {
            let child = v | (bit << level);
            let next = if c == 0.0 {
                partial
            } else {
                partial + self.twiddles.get(child << shift) * c
            };
            self.visit(level + 1, child, next);
        }
    }
}

impl GapSeries {
    /// Trapezoid averages of `|f(r e^{iθ})|^p` on `2^levels, 2^{levels-1}, …, 1`
    /// uniform angles.
    ///
    /// Sample `j` of the finest grid is the sum over `k` of
    /// `a_k r^{2ᵏ} e^{2πi (j mod 2^{levels-k}) / 2^{levels-k}}`: term `k`
    /// depends only on the low `levels − k` bits of `j`. A depth-first walk
    /// over those bits adds one term per tree node, so all `2^levels`
    /// samples cost `O(2^levels)` instead of `O(K·2^levels)`, and coarser
    /// grids are the leaves with enough trailing zero bits.
    pub fn circle_power_ladder(&self, r: f64, p: f64, levels: u32) -> Vec<f64> {
        assert!(r > 0.0 && r < 1.0, "radius must lie in (0, 1)");
        let ln_r = r.ln();
        // Weights of z^{2^k}; the 2^k − 1 rule is handled by |f| = |g| / r.
        let weights: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * ((1u64 << k) as f64 * ln_r).exp())
            .collect();
        let levels_usize = levels as usize;
        let root: f64 = weights.iter().skip(levels_usize).sum();
        let scale = match self.rule {
            ExponentRule::PowersOfTwo => 1.0,
            ExponentRule::PowersOfTwoMinusOne => r.powf(-p),
        };
        let half_p = 0.5 * p;
        let buckets = {
            let power = move |norm_sqr: f64| {
                if half_p == 1.0 {
                    norm_sqr
                } else if half_p == 0.5 {
                    norm_sqr.sqrt()
                } else {
                    norm_sqr.powf(half_p)
                }
            };
            let mut ladder = Ladder {
                levels,
                coeffs: &weights[..weights.len().min(levels_usize)],
                twiddles: Twiddles::new(levels.max(1)),
                power,
                buckets: vec![NeumaierSum::new(); levels_usize + 1],
            };
            ladder.visit(0, 0, Complex64::new(root, 0.0));
            ladder.buckets
        };
        let mut out = vec![0.0; levels_usize + 1];
        let mut acc = NeumaierSum::new();
        for t in (0..=levels_usize).rev() {
            acc = acc + buckets[t];
            out[t] = scale * acc.value() / 2f64.powi((levels_usize - t) as i32);
        }
        out
    }
}

impl Holomorphic for GapSeries {
    fn value(&self, z: Complex64) -> Complex64 {
        self.sum_terms(z, |_, a| a)
    }

    fn radial_derivative(&self, z: Complex64) -> Complex64 {
        let rule = self.rule;
        self.sum_terms(z, |k, a| a * rule.exponent(k) as f64)
    }

    fn radial_derivative_function(&self) -> Box<dyn Holomorphic + '_> {
        Box::new(self.derivative_series())
    }

    fn nonnegative_coefficients(&self) -> bool {
        self.coeffs.iter().all(|&a| a >= 0.0)
    }

    fn mean_square(&self, r: f64) -> Option<f64> {
        let moduli = self.term_moduli(r);
        Some(moduli.iter().map(|c| c * c).sum::<NeumaierSum>().value())
    }

    fn angle_hint(&self, r: f64) -> usize {
        (4 * self.significant_exponent(r).max(1) as usize)
            .next_power_of_two()
            .max(16)
    }

    fn power_mean_ladder(&self, r: f64, p: f64, levels: u32) -> Option<Vec<f64>> {
        Some(self.circle_power_ladder(r, p, levels))
    }
}
