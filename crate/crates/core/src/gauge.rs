//! Gauge functions `ω: (0, 1] → (0, ∞)` and their quadratic integrals.
//!
//! Three parametric families are supported:
//!
//! | DSL        | `ω(t)`                    | `I_ω(x) = ∫ₓ¹ ω²(t)/t dt`                  |
//! |------------|---------------------------|--------------------------------------------|
//! | `const`    | `1`                       | `ln(1/x)`                                  |
//! | `pow:α`    | `t^α`, `0 < α < 1`        | `(1 − x^{2α}) / (2α)`                      |
//! | `log:β`    | `(1 + ln(1/t))^β`, `β ≤ 0` | `((1+L)^{2β+1} − 1)/(2β+1)`, `L = ln(1/x)` |
//!
//! Every gauge also carries the exponent `ε` of the hypothesis
//! "`ω(t)/t^{1−ε}` is nonincreasing". It is data: the regularity check reports
//! whether it holds, nothing assumes it silently.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::quadrature::{self, QuadOptions};
use crate::{Error, Result};

/// Relative slack used by monotonicity scans on sampled grids.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GaugeKind {
    Const,
    Pow { alpha: f64 },
    Log { beta: f64 },
}

/// A gauge `ω` together with its regularity exponent `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Gauge {
    kind: GaugeKind,
    eps: f64,
}

/// `I_ω(x)` and `Φ_ω(x) = 1 + I_ω(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticIntegralValue {
    pub x: f64,
    pub value_i: f64,
    pub value_phi: f64,
    pub method: IntegralMethod,
    pub abs_error_bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegralMethod {
    ClosedForm,
    Quadrature,
}

/// Classification of `I_ω(0+)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum Dichotomy {
    /// `I_ω(0+) < ∞`; carries the limit.
    Convergent { limit: f64 },
    /// `I_ω(0+) = ∞`.
    Divergent,
    /// Only numeric evidence is available: `(x, I_ω(x))` for `x = 2^{-m}`.
    Unknown { evidence: Vec<(f64, f64)> },
}

impl Dichotomy {
    pub fn is_convergent(&self) -> bool {
        matches!(self, Dichotomy::Convergent { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Dichotomy::Divergent)
    }
}

/// Partial sum of `Ψ(r) = Σ ω²(2^{-k}) r^{2ᵏ−1}` with a certified tail bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiValue {
    pub r: f64,
    pub value: f64,
    pub tail_bound: f64,
    /// Last index `K` included in the partial sum.
    pub order: usize,
}

/// Outcome of one monotonicity condition on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub name: String,
    pub passed: bool,
    /// First pair `(t_a, t_b)` where the monotonicity breaks.
    pub first_violation: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub gauge: Gauge,
    pub conditions: Vec<ConditionResult>,
}

impl RegularityReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| !c.passed)
    }
}

pub const CONDITION_INCREASING: &str = "omega increasing";
pub const CONDITION_EPS: &str = "omega(t)/t^(1-eps) decreasing";
pub const CONDITION_NORMAL_UPPER: &str = "tau*omega(1/tau)/tau decreasing in tau";
pub const CONDITION_NORMAL_LOWER: &str = "tau*omega(1/tau)/tau^eps increasing in tau";

impl Gauge {
    pub fn constant() -> Self {
        Gauge {
            kind: GaugeKind::Const,
            eps: 0.5,
        }
    }

    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("pow gauge needs 0 < alpha < 1, got {alpha}")));
        }
        Ok(Gauge {
            kind: GaugeKind::Pow { alpha },
            eps: 0.5 * (1.0 - alpha),
        })
    }

    pub fn log(beta: f64) -> Result<Self> {
        if !(beta <= 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!(
                "log gauge needs beta <= 0 (increasing gauge), got {beta}"
            )));
        }
        let eps = if beta >= -0.5 || beta <= -1.0 {
            0.5
        } else {
            0.5 * (1.0 + beta)
        };
        Ok(Gauge {
            kind: GaugeKind::Log { beta },
            eps,
        })
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!("eps must lie in (0, 1), got {eps}")));
        }
        self.eps = eps;
        Ok(self)
    }

    /// The gauges exercised by the certification suite.
    pub fn builtins() -> Vec<Gauge> {
        vec![
            Gauge::constant(),
            Gauge::power(0.25).unwrap(),
            Gauge::power(0.5).unwrap(),
            Gauge::power(0.75).unwrap(),
            Gauge::log(-0.5).unwrap(),
            Gauge::log(-0.75).unwrap(),
        ]
    }

    pub fn kind(&self) -> GaugeKind {
        self.kind
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `ω(t)` for `t ∈ (0, 1]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain(format!("gauge argument must lie in (0, 1], got {t}")));
        }
        Ok(self.omega(t))
    }

    /// Unchecked `ω(t)`; callers guarantee `t ∈ (0, 1]`.
    pub(crate) fn omega(&self, t: f64) -> f64 {
        match self.kind {
            GaugeKind::Const => 1.0,
            GaugeKind::Pow { alpha } => t.powf(alpha),
            GaugeKind::Log { beta } => (1.0 - t.ln()).powf(beta),
        }
    }

    /// `ω(2^{-k})`, exact in `k` for the log family.
    pub(crate) fn omega_dyadic(&self, k: usize) -> f64 {
        match self.kind {
            GaugeKind::Const => 1.0,
            GaugeKind::Pow { alpha } => (-(k as f64) * alpha * std::f64::consts::LN_2).exp(),
            GaugeKind::Log { beta } => (1.0 + k as f64 * std::f64::consts::LN_2).powf(beta),
        }
    }

    /// `I_ω(e^{-s})` in closed form, as a function of `s = ln(1/x) ≥ 0`.
    pub(crate) fn integral_from_log(&self, s: f64) -> f64 {
        match self.kind {
            GaugeKind::Const => s,
            GaugeKind::Pow { alpha } => -(-2.0 * alpha * s).exp_m1() / (2.0 * alpha),
            GaugeKind::Log { beta } => {
                let gamma = 2.0 * beta + 1.0;
                if gamma.abs() < 1e-12 {
                    s.ln_1p()
                } else {
                    (gamma * s.ln_1p()).exp_m1() / gamma
                }
            }
        }
    }

    /// `Φ_ω(x) = 1 + I_ω(x)` for `x ∈ (0, 1]`.
    pub fn phi(&self, x: f64) -> f64 {
        1.0 + self.integral_from_log(-x.ln())
    }

    /// `Φ_ω(e^{-s})`, usable far below the smallest positive float.
    pub fn phi_from_log(&self, s: f64) -> f64 {
        1.0 + self.integral_from_log(s)
    }

    /// `I_ω(x)` and `Φ_ω(x)` in closed form.
    pub fn quadratic_integral(&self, x: f64) -> Result<QuadraticIntegralValue> {
        check_open_unit(x)?;
        let value_i = self.integral_from_log(-x.ln());
        Ok(QuadraticIntegralValue {
            x,
            value_i,
            value_phi: 1.0 + value_i,
            method: IntegralMethod::ClosedForm,
            abs_error_bound: 4.0 * f64::EPSILON * value_i.max(1.0),
        })
    }

    /// `I_ω(x)` by adaptive quadrature split at the dyadic points `2^{-m} > x`.
    pub fn quadratic_integral_quadrature(&self, x: f64) -> Result<QuadraticIntegralValue> {
        check_open_unit(x)?;
        let opts = QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-13,
            max_intervals: 100,
        };
        let breaks = quadrature::dyadic_breaks_from(x);
        let integral = quadrature::integrate_pieces(
            |t| {
                let w = self.omega(t);
                w * w / t
            },
            &breaks,
            opts,
        )?;
        if integral.abs_error > 1e-10 {
            return Err(Error::Numeric {
                message: format!("quadrature error estimate {:e} exceeds 1e-10", integral.abs_error),
                partial: integral.value,
            });
        }
        Ok(QuadraticIntegralValue {
            x,
            value_i: integral.value,
            value_phi: 1.0 + integral.value,
            method: IntegralMethod::Quadrature,
            abs_error_bound: integral.abs_error,
        })
    }

    /// `I_ω(0+)` when finite.
    pub fn integral_at_zero(&self) -> Option<f64> {
        match self.kind {
            GaugeKind::Const => None,
            GaugeKind::Pow { alpha } => Some(1.0 / (2.0 * alpha)),
            GaugeKind::Log { beta } => {
                let gamma = 2.0 * beta + 1.0;
                (gamma < 0.0).then(|| -1.0 / gamma)
            }
        }
    }

    /// Exact dichotomy for the closed-form families.
    pub fn classify_dichotomy(&self) -> Dichotomy {
        match self.integral_at_zero() {
            Some(limit) => Dichotomy::Convergent { limit },
            None => Dichotomy::Divergent,
        }
    }

    /// Numeric evidence for the dichotomy: `I_ω(2^{-m})` by quadrature,
    /// `m = 1..=40`. Finite computation cannot certify divergence, so the
    /// result is always [`Dichotomy::Unknown`].
    pub fn numeric_evidence(&self) -> Result<Dichotomy> {
        let evidence = (1..=40)
            .map(|m| {
                let x = 0.5f64.powi(m);
                self.quadratic_integral_quadrature(x).map(|v| (x, v.value_i))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Dichotomy::Unknown { evidence })
    }

    /// Scans the four monotonicity conditions on a grid in `(0, 1]`.
    pub fn check_regularity(&self, grid: &[f64]) -> Result<RegularityReport> {
        if let Some(&bad) = grid.iter().find(|&&t| !(t > 0.0 && t <= 1.0)) {
            return Err(Error::Domain(format!("grid point {bad} outside (0, 1]")));
        }
        if grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain("regularity grid must be sorted".into()));
        }
        let eps = self.eps;
        let omega: Vec<f64> = grid.iter().map(|&t| self.omega(t)).collect();
        let by_t = |name: &str, values: Vec<f64>, increasing: bool| {
            scan_monotone(name, grid, &values, increasing)
        };

        // τ-form conditions are scanned with τ = 1/t increasing.
        let taus: Vec<f64> = grid.iter().rev().map(|&t| 1.0 / t).collect();
        let t_of_tau: Vec<f64> = grid.iter().rev().copied().collect();
        let upper: Vec<f64> = taus
            .iter()
            .zip(&t_of_tau)
            .map(|(&tau, &t)| tau * self.omega(t) / tau)
            .collect();
        let lower: Vec<f64> = taus
            .iter()
            .zip(&t_of_tau)
            .map(|(&tau, &t)| tau * self.omega(t) / tau.powf(eps))
            .collect();

        let conditions = vec![
            by_t(CONDITION_INCREASING, omega.clone(), true),
            by_t(
                CONDITION_EPS,
                grid.iter()
                    .zip(&omega)
                    .map(|(&t, &w)| w / t.powf(1.0 - eps))
                    .collect(),
                false,
            ),
            scan_monotone(CONDITION_NORMAL_UPPER, &t_of_tau, &upper, false),
            scan_monotone(CONDITION_NORMAL_LOWER, &t_of_tau, &lower, true),
        ];
        Ok(RegularityReport {
            gauge: *self,
            conditions,
        })
    }

    /// Regularity on the dyadic grid `2^{-m}`, `m = 0..=depth`, refined by midpoints.
    pub fn check_regularity_dyadic(&self, depth: u32) -> RegularityReport {
        let mut grid = Vec::new();
        for m in (0..=depth).rev() {
            let t = 0.5f64.powi(m as i32);
            grid.push(t);
            if m > 0 {
                grid.push(1.5 * t);
            }
        }
        self.check_regularity(&grid).expect("dyadic grid is valid")
    }

    /// `Ψ(r) = Σ_{k≥0} ω²(2^{-k}) r^{2ᵏ−1}` truncated at `order` (or at the
    /// smallest order whose tail bound is below `1e-12`).
    ///
    /// The tail after index `K` is at most `ω²(2^{-K-1}) r^{2^{K+1}−1} / (1−r)`
    /// because `ω` is increasing.
    pub fn psi(&self, r: f64, order: Option<usize>) -> Result<PsiValue> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain(format!("psi needs 0 <= r < 1, got {r}")));
        }
        const MAX_ORDER: usize = 60;
        let tail = |k: usize| -> f64 {
            if r == 0.0 {
                return 0.0;
            }
            let w = self.omega_dyadic(k + 1);
            let exponent = (2f64.powi(k as i32 + 1) - 1.0) * r.ln();
            w * w * exponent.exp() / (1.0 - r)
        };
        let order = match order {
            Some(k) => k.min(MAX_ORDER),
            None => (0..=MAX_ORDER).find(|&k| tail(k) <= 1e-12).unwrap_or(MAX_ORDER),
        };
        let mut sum = crate::summation::NeumaierSum::new();
        // r^{2^k - 1} accumulated as a product of the squares r^{2^j}.
        let mut power = 1.0;
        let mut square = r;
        for k in 0..=order {
            let w = self.omega_dyadic(k);
            sum += w * w * power;
            power *= square;
            square *= square;
        }
        Ok(PsiValue {
            r,
            value: sum.value(),
            tail_bound: tail(order),
            order,
        })
    }
}

fn check_open_unit(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("argument must lie in (0, 1), got {x}")));
    }
    Ok(())
}

fn scan_monotone(name: &str, ts: &[f64], values: &[f64], increasing: bool) -> ConditionResult {
    let first_violation = ts
        .windows(2)
        .zip(values.windows(2))
        .find(|(_, v)| {
            let slack = MONOTONE_SLACK * v[0].abs().max(v[1].abs());
            if increasing {
                v[1] < v[0] - slack
            } else {
                v[1] > v[0] + slack
            }
        })
        .map(|(t, _)| (t[0], t[1]));
    ConditionResult {
        name: name.to_string(),
        passed: first_violation.is_none(),
        first_violation,
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GaugeKind::Const => write!(f, "const")?,
            GaugeKind::Pow { alpha } => write!(f, "pow:{alpha}")?,
            GaugeKind::Log { beta } => write!(f, "log:{beta}")?,
        }
        write!(f, ";eps={}", self.eps)
    }
}

fn parse_number(input: &str, text: &str, offset: usize) -> Result<f64> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(input, offset, format!("expected a finite number, found {text:?}"))),
    }
}

impl FromStr for Gauge {
    type Err = Error;

    /// Parses `const`, `pow:<α>`, `log:<β>`, each optionally followed by `;eps=<ε>`.
    fn from_str(input: &str) -> Result<Self> {
        let (head, eps_part) = match input.find(';') {
            Some(i) => (&input[..i], Some((i + 1, &input[i + 1..]))),
            None => (input, None),
        };
        let gauge = if head == "const" {
            Gauge::constant()
        } else if let Some(arg) = head.strip_prefix("pow:") {
            let alpha = parse_number(input, arg, 4)?;
            Gauge::power(alpha).map_err(|e| Error::parse(input, 4, e.to_string()))?
        } else if let Some(arg) = head.strip_prefix("log:") {
            let beta = parse_number(input, arg, 4)?;
            Gauge::log(beta).map_err(|e| Error::parse(input, 4, e.to_string()))?
        } else {
            let position = head.find(':').unwrap_or(0);
            return Err(Error::parse(
                input,
                position,
                "expected one of `const`, `pow:<alpha>`, `log:<beta>`",
            ));
        };
        match eps_part {
            None => Ok(gauge),
            Some((offset, text)) => {
                let Some(value) = text.strip_prefix("eps=") else {
                    return Err(Error::parse(input, offset, "expected `eps=<value>`"));
                };
                let eps = parse_number(input, value, offset + 4)?;
                gauge
                    .with_eps(eps)
                    .map_err(|e| Error::parse(input, offset + 4, e.to_string()))
            }
        }
    }
}

impl TryFrom<String> for Gauge {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<Gauge> for String {
    fn from(g: Gauge) -> String {
        g.to_string()
    }
}
