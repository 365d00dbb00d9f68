//! Rademacher functions and sign-averaged moments of randomized gap series.
//!
//! For `F_y(z) = Σ_k R_k(y) a_k z^{n_k}` the first `K` Rademacher functions
//! take every sign pattern on a dyadic cell of length `2^{-K}`, so
//! `∫₀¹ |F_y(z)|^{2p} dy` is exactly the average over all `2^K` patterns.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gauge::Gauge;
use crate::lacunary::{ExponentRule, GapSeries};
use crate::summation::NeumaierSum;
use crate::{Error, Result};

/// Largest number of randomized terms enumerated exactly.
pub const MAX_EXACT_TERMS: usize = 24;

// Patterns per Gray-code chunk; the partial sum is rebuilt at each chunk start.
const CHUNK_BITS: usize = 12;
// Monte Carlo samples per seeded stream.
const MC_TASK: usize = 4096;
// Terms below this fraction of Σ|w_k| cannot move an f64 average.
const PRUNE: f64 = 1e-17;

/// `R_k(y)`: the sign of `sin(2^{k+1} π y)`, with `+1` where the sine vanishes.
pub fn rademacher(k: u32, y: f64) -> i8 {
    let x = y * 2f64.powi(k as i32);
    let frac = x - x.floor();
    if frac > 0.5 && frac < 1.0 {
        -1
    } else {
        1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum MomentMode {
    Exact,
    MonteCarlo { seed: u64, samples: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    pub value: f64,
    /// Standard error of the Monte Carlo mean; zero for exact enumeration.
    pub std_error: f64,
    pub mode: MomentMode,
    /// Terms that took part (after pruning negligible ones in exact mode).
    pub terms_used: usize,
}

/// The randomized family `F_y = Σ_{k<K} R_k(y) a_k z^{2ᵏ−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RademacherFamily {
    base: GapSeries,
}

impl RademacherFamily {
    pub fn new(base: GapSeries) -> Result<Self> {
        if base.rule() != ExponentRule::PowersOfTwoMinusOne {
            return Err(Error::Domain("a Rademacher family uses the 2^k-1 exponent rule".into()));
        }
        Ok(RademacherFamily { base })
    }

    /// Family over the extremal coefficients `ω(2^{-k})`, `k < terms`.
    pub fn extremal(gauge: Gauge, terms: usize) -> Result<Self> {
        if terms == 0 {
            return Err(Error::Domain("a Rademacher family needs at least one term".into()));
        }
        Self::new(GapSeries::extremal(gauge, terms - 1, ExponentRule::PowersOfTwoMinusOne)?)
    }

    pub fn base(&self) -> &GapSeries {
        &self.base
    }

    /// Number of randomized terms `K`.
    pub fn terms(&self) -> usize {
        self.base.order() + 1
    }

    /// Same family with every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        RademacherFamily {
            base: self.base.scaled(factor),
        }
    }

    /// `F_y(z)`.
    pub fn eval(&self, y: f64, z: Complex64) -> Result<Complex64> {
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::Domain(format!("y must lie in [0, 1], got {y}")));
        }
        let signs: Vec<f64> = (0..self.terms()).map(|k| rademacher(k as u32, y) as f64).collect();
        Ok(self.base.with_signs(&signs).eval(z)?.value)
    }

    /// `w_k = a_k z^{n_k}`.
    fn weights(&self, z: Complex64) -> Result<Vec<Complex64>> {
        if !(z.norm() < 1.0) {
            return Err(Error::Domain(format!("|z| must be < 1, got |z| = {}", z.norm())));
        }
        let mut out = Vec::with_capacity(self.terms());
        let mut power = Complex64::new(1.0, 0.0);
        let mut square = z;
        for &a in self.base.coeffs() {
            out.push(power * a);
            power *= square;
            square *= square;
        }
        Ok(out)
    }

    /// `Σ a_k² |z|^{2n_k}`, the `p = 1` moment.
    pub fn quadratic_sum(&self, z: Complex64) -> Result<f64> {
        Ok(self.weights(z)?.iter().map(|w| w.norm_sqr()).sum::<NeumaierSum>().value())
    }

    /// `∫₀¹ |F_y(z)|^{2p} dy`.
    pub fn moment_integral(&self, z: Complex64, p: f64, mode: MomentMode) -> Result<MomentValue> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Domain(format!("p must be positive, got {p}")));
        }
        let weights = self.weights(z)?;
        match mode {
            MomentMode::Exact => {
                if self.terms() > MAX_EXACT_TERMS {
                    return Err(Error::Resource(format!(
                        "exact enumeration needs K <= {MAX_EXACT_TERMS} terms, family has {}; use Monte Carlo mode",
                        self.terms()
                    )));
                }
                let (value, terms_used) = exact_moment(&weights, p);
                Ok(MomentValue {
                    value,
                    std_error: 0.0,
                    mode,
                    terms_used,
                })
            }
            MomentMode::MonteCarlo { seed, samples } => {
                if samples < 2 {
                    return Err(Error::Domain("Monte Carlo needs at least 2 samples".into()));
                }
                let (value, std_error) = monte_carlo_moment(&weights, p, seed, samples);
                Ok(MomentValue {
                    value,
                    std_error,
                    mode,
                    terms_used: weights.len(),
                })
            }
        }
    }
}

#[inline]
fn power_of_square(s: f64, p: f64) -> f64 {
    if p == 1.0 {
        s
    } else if p == 2.0 {
        s * s
    } else {
        s.powf(p)
    }
}

/// Average of `|Σ ε_k w_k|^{2p}` over all sign patterns.
///
/// `ε` and `−ε` give the same modulus, so the first term keeps sign `+1`.
/// The remaining patterns are split on their high bits into chunks walked
/// in Gray-code order: one term flips per step.
fn exact_moment(weights: &[Complex64], p: f64) -> (f64, usize) {
    let total: f64 = weights.iter().map(|w| w.norm()).sum();
    let kept: Vec<Complex64> = weights.iter().copied().filter(|w| w.norm() >= PRUNE * total).collect();
    if kept.is_empty() {
        return (0.0, 0);
    }
    let free = kept.len() - 1;
    let low_bits = free.min(CHUNK_BITS);
    let high_bits = free - low_bits;
    let low = &kept[1..=low_bits];
    let high = &kept[1 + low_bits..];

    let chunk_sums: Vec<NeumaierSum> = (0..1usize << high_bits)
        .into_par_iter()
        .map(|chunk| {
            let mut s = kept[0] + low.iter().sum::<Complex64>();
            for (b, &w) in high.iter().enumerate() {
                if chunk >> b & 1 == 1 {
                    s -= w;
                } else {
                    s += w;
                }
            }
            let mut signs = vec![1.0f64; low.len()];
            let mut acc = NeumaierSum::new();
            acc += power_of_square(s.norm_sqr(), p);
            for i in 1..1usize << low_bits {
                let b = i.trailing_zeros() as usize;
                s -= low[b] * (2.0 * signs[b]);
                signs[b] = -signs[b];
                acc += power_of_square(s.norm_sqr(), p);
            }
            acc
        })
        .collect();
    let sum: NeumaierSum = chunk_sums.iter().map(|c| c.value()).sum();
    (sum.value() / 2f64.powi(free as i32), kept.len())
}

/// Seeded Monte Carlo over the binary digits of `y`: digit `k+1` of `y` is
/// a fair bit and `R_k(y) = −1` exactly when it is `1`.
fn monte_carlo_moment(weights: &[Complex64], p: f64, seed: u64, samples: usize) -> (f64, f64) {
    let tasks = samples.div_ceil(MC_TASK);
    let partial: Vec<(f64, f64)> = (0..tasks)
        .into_par_iter()
        .map(|task| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(task as u64);
            let n = MC_TASK.min(samples - task * MC_TASK);
            let mut sum = NeumaierSum::new();
            let mut sum_sq = NeumaierSum::new();
            for _ in 0..n {
                let bits = rng.next_u64();
                let s: Complex64 = weights
                    .iter()
                    .enumerate()
                    .map(|(k, &w)| if bits >> k & 1 == 1 { -w } else { w })
                    .sum();
                let v = power_of_square(s.norm_sqr(), p);
                sum += v;
                sum_sq += v * v;
            }
            (sum.value(), sum_sq.value())
        })
        .collect();
    let n = samples as f64;
    let sum: NeumaierSum = partial.iter().map(|t| t.0).sum();
    let sum_sq: NeumaierSum = partial.iter().map(|t| t.1).sum();
    let mean = sum.value() / n;
    let var = ((sum_sq.value() - n * mean * mean) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rademacher_examples() {
        assert_eq!(rademacher(0, 0.25), 1);
        assert_eq!(rademacher(0, 0.75), -1);
        assert_eq!(rademacher(1, 0.3), -1);
        assert_eq!(rademacher(0, 0.5), 1);
        assert_eq!(rademacher(0, 0.0), 1);
        assert_eq!(rademacher(3, 1.0), 1);
    }

    #[test]
    fn rademacher_matches_sine_sign_off_dyadics() {
        for i in 0..500 {
            let y = (i as f64 + 0.37) / 500.0;
            for k in 0..8 {
                let s = (2f64.powi(k as i32 + 1) * std::f64::consts::PI * y).sin();
                assert_eq!(rademacher(k, y), if s < 0.0 { -1 } else { 1 }, "k={k} y={y}");
            }
        }
    }

    #[test]
    fn family_eval_examples() {
        let fam = RademacherFamily::extremal(Gauge::constant(), 3).unwrap();
        assert_eq!(fam.eval(0.25, c(0.0)).unwrap(), c(1.0));
        let y = 0.25;
        let oracle: f64 = (0..3)
            .map(|k| rademacher(k, y) as f64 * 0.5f64.powi((1 << k) - 1))
            .sum();
        assert!((fam.eval(y, c(0.5)).unwrap() - c(oracle)).norm() < 1e-15);
        assert!(fam.eval(0.2, c(1.0)).is_err());
    }

    #[test]
    fn exact_matches_brute_force() {
        let fam = RademacherFamily::extremal(Gauge::power(0.5).unwrap(), 9).unwrap();
        let z = Complex64::from_polar(0.93, 0.7);
        let w = fam.weights(z).unwrap();
        for p in [0.5, 1.0, 1.5, 2.0] {
            let brute: f64 = (0..1usize << w.len())
                .map(|mask| {
                    let s: Complex64 =
                        w.iter().enumerate().map(|(k, &x)| if mask >> k & 1 == 1 { -x } else { x }).sum();
                    s.norm_sqr().powf(p)
                })
                .sum::<f64>()
                / 2f64.powi(w.len() as i32);
            let exact = fam.moment_integral(z, p, MomentMode::Exact).unwrap().value;
            assert!((exact - brute).abs() < 1e-13 * brute, "p={p}: {exact} vs {brute}");
        }
    }

    #[test]
    fn closed_forms() {
        let fam = RademacherFamily::extremal(Gauge::log(-0.5).unwrap(), 10).unwrap();
        let z = Complex64::from_polar(0.97, 1.1);
        let w = fam.weights(z).unwrap();
        let s2: f64 = w.iter().map(|x| x.norm_sqr()).sum();
        let s4: f64 = w.iter().map(|x| x.norm_sqr().powi(2)).sum();
        let sq: Complex64 = w.iter().map(|x| x * x).sum();
        let fourth = 2.0 * s2 * s2 + sq.norm_sqr() - 2.0 * s4;
        let m1 = fam.moment_integral(z, 1.0, MomentMode::Exact).unwrap().value;
        let m2 = fam.moment_integral(z, 2.0, MomentMode::Exact).unwrap().value;
        assert!((m1 - s2).abs() < 1e-14 * s2);
        assert!((m2 - fourth).abs() < 1e-12 * fourth);
        assert!(m2 >= m1 * m1);
    }

    #[test]
    fn single_term() {
        let fam = RademacherFamily::new(GapSeries::new(vec![1.5], ExponentRule::PowersOfTwoMinusOne).unwrap())
            .unwrap();
        let m = fam.moment_integral(c(0.4), 1.5, MomentMode::Exact).unwrap();
        assert!((m.value - 1.5f64.powf(3.0)).abs() < 1e-14);
    }

    #[test]
    fn sign_flip_invariance() {
        let base = GapSeries::new(vec![1.0, 0.8, -0.6, 0.4, 0.3], ExponentRule::PowersOfTwoMinusOne).unwrap();
        let flipped = base.with_signs(&[1.0, -1.0, 1.0, 1.0, -1.0]);
        let z = Complex64::from_polar(0.8, 0.3);
        for p in [0.5, 1.0, 2.0] {
            let a = RademacherFamily::new(base.clone()).unwrap().moment_integral(z, p, MomentMode::Exact).unwrap();
            let b = RademacherFamily::new(flipped.clone()).unwrap().moment_integral(z, p, MomentMode::Exact).unwrap();
            assert!((a.value - b.value).abs() < 1e-14 * a.value);
        }
    }

    #[test]
    fn monte_carlo_within_three_standard_errors() {
        let fam = RademacherFamily::extremal(Gauge::constant(), 14).unwrap();
        let z = Complex64::from_polar(0.95, 0.2);
        for p in [0.5, 1.0, 2.0] {
            let exact = fam.moment_integral(z, p, MomentMode::Exact).unwrap().value;
            let mc = fam
                .moment_integral(z, p, MomentMode::MonteCarlo { seed: 7, samples: 200_000 })
                .unwrap();
            assert!((mc.value - exact).abs() <= 3.0 * mc.std_error, "p={p}: {exact} vs {mc:?}");
            let again = fam
                .moment_integral(z, p, MomentMode::MonteCarlo { seed: 7, samples: 200_000 })
                .unwrap();
            assert_eq!(mc.value.to_bits(), again.value.to_bits());
        }
    }

    #[test]
    fn exact_mode_refuses_large_families() {
        let fam = RademacherFamily::extremal(Gauge::constant(), 25).unwrap();
        let err = fam.moment_integral(c(0.5), 1.0, MomentMode::Exact).unwrap_err();
        assert!(matches!(err, Error::Resource(ref m) if m.contains("Monte Carlo")));
    }
}
