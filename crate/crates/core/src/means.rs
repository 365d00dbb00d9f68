//! Integral means on circles and grid estimates of weighted Bloch norms.
//!
//! Norms reported here are maxima over finite grids ("grid sup"): lower
//! estimates of the true suprema.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gauge::Gauge;
use crate::holomorphic::Holomorphic;
use crate::summation::NeumaierSum;
use crate::{Error, Result};

/// Dyadic radii `r_m = 1 − 2^{-m}`, `m = m_min..=m_max`, with `angles`
/// samples per circle where an angular sweep is needed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub m_min: u32,
    pub m_max: u32,
    pub angles: usize,
}

impl RadialGrid {
    pub fn new(m_min: u32, m_max: u32, angles: usize) -> Result<Self> {
        if m_min == 0 || m_min > m_max || m_max > 50 {
            return Err(Error::Domain(format!(
                "radial grid needs 1 <= m_min <= m_max <= 50, got {m_min}..={m_max}"
            )));
        }
        if angles < 16 || !angles.is_power_of_two() {
            return Err(Error::Domain(format!(
                "angles per circle must be a power of two >= 16, got {angles}"
            )));
        }
        Ok(RadialGrid { m_min, m_max, angles })
    }

    /// `m = 1..=m_max` with 16 angles.
    pub fn dyadic(m_max: u32) -> Result<Self> {
        Self::new(1, m_max, 16)
    }

    pub fn depths(&self) -> impl Iterator<Item = u32> {
        self.m_min..=self.m_max
    }

    pub fn radii(&self) -> Vec<f64> {
        self.depths().map(dyadic_radius).collect()
    }

    pub fn r_max(&self) -> f64 {
        dyadic_radius(self.m_max)
    }

    pub fn describe(&self) -> String {
        format!(
            "r = 1 - 2^-m, m = {}..={}, {} angles per circle",
            self.m_min, self.m_max, self.angles
        )
    }
}

/// `1 − 2^{-m}`.
pub fn dyadic_radius(m: u32) -> f64 {
    1.0 - 0.5f64.powi(m as i32)
}

#[derive(Clone, Copy, Debug)]
pub struct MeanOptions {
    /// Relative agreement required between successive angle doublings.
    pub rel_tol: f64,
    /// Angle cap for pointwise sampling.
    pub max_angles: usize,
    /// Angle cap (as a power of two) for the lacunary ladder.
    pub max_ladder_levels: u32,
}

impl Default for MeanOptions {
    fn default() -> Self {
        MeanOptions {
            rel_tol: 1e-8,
            max_angles: 1 << 18,
            max_ladder_levels: 28,
        }
    }
}

/// A trapezoid mean and how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanValue {
    pub value: f64,
    pub angles: usize,
    /// False when the angle cap was hit before two doublings agreed.
    pub converged: bool,
}

/// `(1/N) Σ h(θ_j)^p` over uniform angles, doubling `N` (reusing samples)
/// until two levels agree to `rel_tol`; returns the `p`-th root.
pub fn circle_mean<H: Fn(f64) -> f64>(h: H, p: f64, start_angles: usize, opts: &MeanOptions) -> MeanValue {
    let sample = |theta: f64| {
        let v = h(theta);
        if p == 1.0 {
            v
        } else if p == 2.0 {
            v * v
        } else {
            v.powf(p)
        }
    };
    let mut n = start_angles.next_power_of_two().max(2);
    let mut sum: NeumaierSum = (0..n).map(|j| sample(TAU * j as f64 / n as f64)).sum();
    let mut mean = sum.value() / n as f64;
    loop {
        if n >= opts.max_angles {
            return MeanValue {
                value: mean.powf(1.0 / p),
                angles: n,
                converged: false,
            };
        }
        let fine = 2 * n;
        for j in 0..n {
            sum += sample(TAU * (2 * j + 1) as f64 / fine as f64);
        }
        let next = sum.value() / fine as f64;
        let done = (next - mean).abs() <= opts.rel_tol * next.abs();
        mean = next;
        n = fine;
        if done {
            return MeanValue {
                value: mean.powf(1.0 / p),
                angles: n,
                converged: true,
            };
        }
    }
}

/// `M_p(f, r) = (∫ |f(r e^{iθ})|^p dθ/2π)^{1/p}` by the trapezoid rule.
pub fn integral_mean(f: &dyn Holomorphic, p: f64, r: f64, opts: &MeanOptions) -> Result<MeanValue> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("radius must lie in (0, 1), got {r}")));
    }
    let hint = f.angle_hint(r).max(16);
    let mut levels = hint.trailing_zeros().min(opts.max_ladder_levels);
    if f.power_mean_ladder(r, p, 1).is_some() {
        loop {
            let ladder = f.power_mean_ladder(r, p, levels).expect("ladder available");
            let (fine, coarse) = (ladder[0], ladder[1]);
            let converged = (fine - coarse).abs() <= opts.rel_tol * fine.abs();
            if converged || levels >= opts.max_ladder_levels {
                return Ok(MeanValue {
                    value: fine.powf(1.0 / p),
                    angles: 1 << levels,
                    converged,
                });
            }
            levels += 1;
        }
    }
    Ok(circle_mean(
        |theta| f.value(Complex64::from_polar(r, theta)).norm(),
        p,
        hint.min(opts.max_angles),
        opts,
    ))
}

/// A grid estimate of a norm with the point where it was attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub argmax_r: f64,
    pub argmax_theta: Option<f64>,
    pub grid: RadialGrid,
    pub label: &'static str,
}

const GRID_SUP: &str = "grid sup";

fn first_max(values: impl IntoIterator<Item = (f64, Option<f64>, f64)>) -> (f64, Option<f64>, f64) {
    values
        .into_iter()
        .fold((0.0, None, f64::NEG_INFINITY), |best, cur| if cur.2 > best.2 { cur } else { best })
}

/// `|f(0)| + max |Rf(z)| (1−|z|) / ω(1−|z|)` over the grid.
///
/// For series with nonnegative coefficients only `θ = 0` is sampled.
pub fn bloch_norm_estimate(f: &dyn Holomorphic, gauge: &Gauge, grid: &RadialGrid) -> NormEstimate {
    let origin = f.value(Complex64::new(0.0, 0.0)).norm();
    let positive = f.nonnegative_coefficients();
    let radii = grid.radii();
    let per_radius: Vec<(f64, Option<f64>, f64)> = radii
        .par_iter()
        .map(|&r| {
            let weight = (1.0 - r) / gauge.omega(1.0 - r);
            if positive {
                (r, Some(0.0), f.radial_derivative(Complex64::new(r, 0.0)).norm() * weight)
            } else {
                let (theta, v) = (0..grid.angles)
                    .map(|j| {
                        let theta = TAU * j as f64 / grid.angles as f64;
                        (theta, f.radial_derivative(Complex64::from_polar(r, theta)).norm())
                    })
                    .fold((0.0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
                (r, Some(theta), v * weight)
            }
        })
        .collect();
    let (argmax_r, argmax_theta, best) = first_max(per_radius);
    NormEstimate {
        value: origin + best.max(0.0),
        argmax_r,
        argmax_theta,
        grid: *grid,
        label: GRID_SUP,
    }
}

/// `|f(0)| + max_r M_p(Rf, r) (1−r) / ω(1−r)` over the grid radii.
pub fn hardy_bloch_norm_estimate(
    f: &dyn Holomorphic,
    gauge: &Gauge,
    p: f64,
    grid: &RadialGrid,
    opts: &MeanOptions,
) -> Result<NormEstimate> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    let origin = f.value(Complex64::new(0.0, 0.0)).norm();
    let rf = f.radial_derivative_function();
    let radii = grid.radii();
    let per_radius = radii
        .par_iter()
        .map(|&r| {
            let m = integral_mean(rf.as_ref(), p, r, opts)?;
            Ok((r, None, m.value * (1.0 - r) / gauge.omega(1.0 - r)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (argmax_r, argmax_theta, best) = first_max(per_radius);
    Ok(NormEstimate {
        value: origin + best.max(0.0),
        argmax_r,
        argmax_theta,
        grid: *grid,
        label: GRID_SUP,
    })
}
