//! Adaptive Gauss–Kronrod quadrature with dyadic splitting.
//!
//! The integrands met in this crate are smooth on every dyadic interval
//! `[2^{-m-1}, 2^{-m}]` but carry `1/t` or `1/(1-t)` singularities at the
//! ends of `(0, 1)`. The helpers here cut the range at dyadic points first
//! and run a 7/15-point Gauss–Kronrod bisection on each piece.

use crate::summation::NeumaierSum;
use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of a quadrature: value and an estimate of the absolute error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_intervals: 200,
        }
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut samples = [0.0; 15];
    samples[7] = fc;
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        samples[i] = f1;
        samples[14 - i] = f2;
        kronrod += w * (f1 + f2);
        resabs += w * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for i in 0..7 {
        resasc += WGK[i] * ((samples[i] - mean).abs() + (samples[14 - i] - mean).abs());
    }
    let value = kronrod * half;
    let resasc = resasc * half.abs();
    let resabs = resabs * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let roundoff = 50.0 * f64::EPSILON * resabs;
    if roundoff > err {
        err = roundoff;
    }
    (value, err)
}

/// Adaptive bisection on `[a, b]`, always splitting the interval with the
/// largest error estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    let (v, e) = gauss_kronrod(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let total: f64 = intervals.iter().map(|iv| iv.2).sum::<NeumaierSum>().value();
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if !total.is_finite() {
            return Err(Error::Numeric {
                message: format!("non-finite integrand on [{a}, {b}]"),
                partial: total,
            });
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(Integral {
                value: total,
                abs_error: err,
            });
        }
        if intervals.len() >= opts.max_intervals {
            return Err(Error::Numeric {
                message: format!(
                    "quadrature on [{a}, {b}] did not converge in {} intervals (error estimate {err:e})",
                    opts.max_intervals
                ),
                partial: total,
            });
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Numeric {
                message: format!("interval [{lo}, {hi}] cannot be bisected further"),
                partial: total,
            });
        }
        let (v1, e1) = gauss_kronrod(&f, lo, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Sum of adaptive integrals over consecutive pieces `[b_i, b_{i+1}]`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    opts: QuadOptions,
) -> Result<Integral> {
    let mut value = NeumaierSum::new();
    let mut abs_error = 0.0;
    for w in breakpoints.windows(2) {
        let piece = integrate(&f, w[0], w[1], opts)?;
        value += piece.value;
        abs_error += piece.abs_error;
    }
    Ok(Integral {
        value: value.value(),
        abs_error,
    })
}

/// Breakpoints `x, 2^{-m}, ..., 1/2, 1` for integrals over `[x, 1]`.
pub fn dyadic_breaks_from(x: f64) -> Vec<f64> {
    let mut breaks = vec![1.0];
    let mut t = 0.5;
    while t > x {
        breaks.push(t);
        t *= 0.5;
    }
    breaks.push(x);
    breaks.reverse();
    breaks
}

/// Breakpoints `0, 1/2, 3/4, ..., 1 - 2^{-m}, r` for integrals over `[0, r]`
/// with `r < 1`.
pub fn dyadic_breaks_toward_one(r: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let mut gap = 0.5;
    while 1.0 - gap < r {
        breaks.push(1.0 - gap);
        gap *= 0.5;
    }
    if r > 0.0 {
        breaks.push(r);
    }
    breaks
}
