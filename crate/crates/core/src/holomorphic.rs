//! Functions holomorphic on the unit disk.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A function holomorphic on the open unit disk with a computable radial
/// derivative `Rf(z) = z f'(z)`.
///
/// Callers only evaluate at `|z| < 1`.
pub trait Holomorphic: Send + Sync {
    fn value(&self, z: Complex64) -> Complex64;

    fn radial_derivative(&self, z: Complex64) -> Complex64;

    /// `Rf` as a function in its own right.
    fn radial_derivative_function(&self) -> Box<dyn Holomorphic + '_>;

    /// True when every Taylor coefficient is real and nonnegative, so that
    /// `|f|` and `|Rf|` on a circle peak on the positive radius.
    fn nonnegative_coefficients(&self) -> bool {
        false
    }

    /// `M_2(f, r)²` from orthogonality of the monomials, when known.
    fn mean_square(&self, _r: f64) -> Option<f64> {
        None
    }

    /// Smallest power-of-two angle count worth trying on the circle of
    /// radius `r` (twice the largest significant frequency, at least 16).
    fn angle_hint(&self, _r: f64) -> usize {
        16
    }

    /// Trapezoid averages of `|f(r e^{iθ})|^p` over `2^levels`, `2^{levels-1}`, …
    /// uniform angles, for implementors that can produce them faster than
    /// pointwise evaluation.
    fn power_mean_ladder(&self, _r: f64, _p: f64, _levels: u32) -> Option<Vec<f64>> {
        None
    }
}

/// A polynomial `Σ c_j z^j` with dense complex coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        Polynomial { coeffs: vec![c] }
    }

    /// `f(z) = z`.
    pub fn identity() -> Self {
        Polynomial {
            coeffs: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

impl Holomorphic for Polynomial {
    fn value(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn radial_derivative(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (j, &c)| acc * z + c * j as f64)
    }

    fn radial_derivative_function(&self) -> Box<dyn Holomorphic + '_> {
        Box::new(Polynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| c * j as f64)
                .collect(),
        })
    }

    fn nonnegative_coefficients(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0 && c.re >= 0.0)
    }

    fn mean_square(&self, r: f64) -> Option<f64> {
        Some(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c.norm_sqr() * r.powi(2 * j as i32))
                .sum(),
        )
    }

    fn angle_hint(&self, _r: f64) -> usize {
        (2 * self.coeffs.len()).next_power_of_two().max(16)
    }
}
