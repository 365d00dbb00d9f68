use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::RadialMeasure;
use crate::gauge::Gauge;
use crate::quadrature::{integrate, QuadOptions};
use crate::report::{extremal_ratio, Check, EstimateReport, Extremum, GridPoint, Verdict};
use crate::stochastic::{MomentMode, RademacherFamily};
use crate::summation::NeumaierSum;
use crate::{Error, Result};

pub const PROBE: &str = "carleson-necessity-probe";
pub const CLASSIFY: &str = "carleson";

/// Partial integrals above this value that still grow by
/// [`BLOWUP_GROWTH`] per refinement are declared divergent.
pub const BLOWUP_THRESHOLD: f64 = 1e12;
pub const BLOWUP_GROWTH: f64 = 1.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum CarlesonClass {
    Finite { value: f64 },
    Infinite { reason: String },
}

impl CarlesonClass {
    pub fn is_finite(&self) -> bool {
        matches!(self, CarlesonClass::Finite { .. })
    }
}

/// Verdict read off a sequence of partial integrals alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum NumericClass {
    Finite { value: f64 },
    Infinite { last: f64 },
    Undecided { last: f64 },
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_intervals: 400,
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("q must be positive, got {q}")))
    }
}

/// `∫₀¹ Φ^{q/2}(1 − r) dρ(r)`.
///
/// For `(1−r)^β dr` the substitution `1 − r = e^{-s}` gives
/// `∫₀^∞ Φ^{q/2}(e^{-s}) e^{-(β+1)s} ds`. Every supported gauge has
/// `ω ≤ ω(1) = 1`, so `1 ≤ Φ(e^{-s}) ≤ 1 + s` and the integral is finite
/// exactly when `β > −1`.
pub fn carleson_classify(gauge: &Gauge, q: f64, rho: &RadialMeasure) -> Result<CarlesonClass> {
    check_q(q)?;
    match rho {
        RadialMeasure::Power { beta } => {
            if *beta <= -1.0 {
                return Ok(CarlesonClass::Infinite {
                    reason: format!("(1 - r)^{beta} is not integrable at r = 1 and Phi >= 1"),
                });
            }
            let c = beta + 1.0;
            let f = |s: f64| gauge.phi_from_log(s).powf(0.5 * q) * (-c * s).exp();
            // Stop once the envelope (1 + s)^{q/2+1} e^{-cs} is negligible.
            let mut breaks = vec![0.0, 1.0];
            let mut s: f64 = 1.0;
            while (1.0 + s).powf(0.5 * q + 1.0) * (-c * s).exp() > 1e-18 * c && s < 131_072.0 {
                s *= 2.0;
                breaks.push(s);
            }
            let mut total = NeumaierSum::new();
            for w in breaks.windows(2) {
                total += integrate(f, w[0], w[1], quad_opts())?.value;
            }
            Ok(CarlesonClass::Finite { value: total.value() })
        }
        RadialMeasure::Atom { r0, mass } => Ok(CarlesonClass::Finite {
            value: mass * gauge.phi(1.0 - r0).powf(0.5 * q),
        }),
        RadialMeasure::Mixture(parts) => {
            let mut total = NeumaierSum::new();
            for p in parts {
                match carleson_classify(gauge, q, p)? {
                    CarlesonClass::Finite { value } => total += value,
                    inf => return Ok(inf),
                }
            }
            Ok(CarlesonClass::Finite { value: total.value() })
        }
    }
}

/// `∫_{[0, 1−2^{-m}]} w(r, 1 − r) dρ(r)` for each depth in `depths` (sorted).
fn partials_of<W: Fn(f64, f64) -> f64>(w: &W, rho: &RadialMeasure, depths: &[u32]) -> Result<Vec<f64>> {
    match rho {
        RadialMeasure::Power { beta } => {
            let c = beta + 1.0;
            // r = 1 − e^{-s}, dr = e^{-s} ds.
            let f = |s: f64| {
                let u = (-s).exp();
                w(-(-s).exp_m1(), u) * u.powf(c)
            };
            let mut out = Vec::with_capacity(depths.len());
            let mut acc = NeumaierSum::new();
            let mut j = 0u32;
            for &m in depths {
                while j < m {
                    acc += integrate(f, j as f64 * LN_2, (j + 1) as f64 * LN_2, quad_opts())?.value;
                    j += 1;
                }
                out.push(acc.value());
            }
            Ok(out)
        }
        RadialMeasure::Atom { r0, mass } => Ok(depths
            .iter()
            .map(|&m| if *r0 <= 1.0 - 0.5f64.powi(m as i32) { mass * w(*r0, 1.0 - r0) } else { 0.0 })
            .collect()),
        RadialMeasure::Mixture(parts) => {
            let mut out = vec![0.0; depths.len()];
            for p in parts {
                for (o, v) in out.iter_mut().zip(partials_of(w, p, depths)?) {
                    *o += v;
                }
            }
            Ok(out)
        }
    }
}

fn check_depths(depths: &[u32]) -> Result<()> {
    if depths.is_empty() || depths.windows(2).any(|w| w[0] >= w[1]) || depths[0] == 0 {
        return Err(Error::Domain("depths must be positive and strictly increasing".into()));
    }
    if *depths.last().expect("nonempty") > 1024 {
        return Err(Error::Resource("depths above 1024 underflow 1 - r".into()));
    }
    Ok(())
}

/// `(m, ∫_{[0, 1−2^{-m}]} Φ^{q/2}(1 − r) dρ(r))` for each depth.
pub fn carleson_partial_integrals(
    gauge: &Gauge,
    q: f64,
    rho: &RadialMeasure,
    depths: &[u32],
) -> Result<Vec<(u32, f64)>> {
    check_q(q)?;
    check_depths(depths)?;
    let w = |_r: f64, u: f64| gauge.phi(u).powf(0.5 * q);
    Ok(depths.iter().copied().zip(partials_of(&w, rho, depths)?).collect())
}

/// Classifies from the last two partial integrals: divergent when the last
/// exceeds [`BLOWUP_THRESHOLD`] and grew by at least [`BLOWUP_GROWTH`];
/// finite when it moved by at most `1e-9` relative; undecided otherwise.
pub fn classify_partials(partials: &[(u32, f64)]) -> NumericClass {
    let n = partials.len();
    let last = partials.last().map_or(0.0, |p| p.1);
    if n < 2 {
        return NumericClass::Undecided { last };
    }
    let prev = partials[n - 2].1;
    if last > BLOWUP_THRESHOLD && last >= BLOWUP_GROWTH * prev {
        NumericClass::Infinite { last }
    } else if (last - prev).abs() <= 1e-9 * last.abs() {
        NumericClass::Finite { value: last }
    } else {
        NumericClass::Undecided { last }
    }
}

/// Depths `1, 2, 4, …, 1024`.
pub fn doubling_depths() -> Vec<u32> {
    (0..=10).map(|j| 1u32 << j).collect()
}

/// Classification report: partial integrals over `m = 1..=m_max` as points,
/// the analytic class as verdict, and the numeric blow-up reading alongside.
pub fn carleson_report(gauge: &Gauge, q: f64, rho: &RadialMeasure, m_max: u32) -> Result<EstimateReport> {
    let class = carleson_classify(gauge, q, rho)?;
    let depths: Vec<u32> = (1..=m_max).collect();
    let partials = carleson_partial_integrals(gauge, q, rho, &depths)?;
    let points: Vec<GridPoint> = partials
        .iter()
        .map(|&(m, v)| GridPoint::new(1.0 - 0.5f64.powi(m as i32), None, v, 1.0))
        .collect();
    let numeric = classify_partials(&carleson_partial_integrals(gauge, q, rho, &doubling_depths())?);
    let verdict = match &class {
        CarlesonClass::Finite { value } => Verdict::Holds { constant: *value },
        CarlesonClass::Infinite { reason } => Verdict::Violated {
            r: 1.0,
            theta: None,
            detail: reason.clone(),
        },
    };
    let mut report = EstimateReport::new(
        CLASSIFY,
        gauge.to_string(),
        format!("partial integrals over [0, 1 - 2^-m], m = 1..={m_max}"),
        Extremum::Max,
        points,
        verdict,
    );
    report.values.insert("q".into(), q);
    if let CarlesonClass::Finite { value } = class {
        report.values.insert("value".into(), value);
    }
    report.checks.push(Check {
        name: "numeric-refinement".into(),
        passed: match (&class, numeric) {
            (CarlesonClass::Finite { .. }, NumericClass::Infinite { .. }) => false,
            (CarlesonClass::Infinite { .. }, NumericClass::Finite { .. }) => false,
            _ => true,
        },
        detail: serde_json::to_string(&numeric)?,
    });
    report.provenance.notes.push(format!("measure {rho}"));
    report
        .provenance
        .tolerances
        .insert("blowup_threshold".into(), BLOWUP_THRESHOLD);
    Ok(report)
}

/// Fubini check of `∫∫ |F_y(rζ)|^q dσ(ζ) dρ(r)` averaged over `y`, for the
/// Rademacher family with `terms` terms, against the partial integrals of
/// `Φ^{q/2}` on the same depths.
///
/// For `q = 2` the inner average is `Σ a_k² r^{2n_k}`; otherwise it is the
/// exact sign average on 16 angles.
pub fn carleson_necessity_probe(
    gauge: &Gauge,
    q: f64,
    rho: &RadialMeasure,
    terms: usize,
    m_max: u32,
) -> Result<EstimateReport> {
    const ANGLES: usize = 16;
    check_q(q)?;
    let class = carleson_classify(gauge, q, rho)?;
    let family = RademacherFamily::extremal(*gauge, terms)?;
    if m_max == 0 || m_max > 50 {
        return Err(Error::Domain(format!("probe depth must lie in 1..=50, got {m_max}")));
    }
    let inner = |r: f64, _u: f64| -> f64 {
        if q == 2.0 {
            return family.quadratic_sum(Complex64::new(r, 0.0)).unwrap_or(f64::NAN);
        }
        let total: NeumaierSum = (0..ANGLES)
            .map(|j| {
                let z = Complex64::from_polar(r, TAU * j as f64 / ANGLES as f64);
                family
                    .moment_integral(z, 0.5 * q, MomentMode::Exact)
                    .map_or(f64::NAN, |m| m.value)
            })
            .sum();
        total.value() / ANGLES as f64
    };
    let depths: Vec<u32> = (1..=m_max).collect();
    let probe = partials_of(&inner, rho, &depths)?;
    let phi = carleson_partial_integrals(gauge, q, rho, &depths)?;
    if probe.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric {
            message: "probe integrand is not finite".into(),
            partial: probe.last().copied().unwrap_or(f64::NAN),
        });
    }
    let points: Vec<GridPoint> = depths
        .iter()
        .zip(probe.iter().zip(&phi))
        .map(|(&m, (&lhs, &(_, rhs)))| GridPoint::new(1.0 - 0.5f64.powi(m as i32), None, lhs, rhs))
        .collect();
    let last = *probe.last().expect("nonempty");
    let half = probe[probe.len() / 2 - usize::from(probe.len() > 1)];
    let (name, passed, detail) = if class.is_finite() {
        let step = if probe.len() > 1 { last - probe[probe.len() - 2] } else { 0.0 };
        (
            "partials-stabilize",
            step <= 1e-3 * last,
            format!("last refinement adds {step:e} to {last:e}"),
        )
    } else {
        (
            "partials-grow",
            last >= BLOWUP_GROWTH * half,
            format!("partial at depth {m_max} is {last:e}, at half depth {half:e}"),
        )
    };
    let max = extremal_ratio(&points, Extremum::Max).expect("nonempty").ratio;
    let verdict = if passed {
        Verdict::Holds { constant: max }
    } else {
        Verdict::Violated {
            r: points.last().expect("nonempty").r,
            theta: None,
            detail: detail.clone(),
        }
    };
    let mut report = EstimateReport::new(
        PROBE,
        gauge.to_string(),
        format!("partial integrals over [0, 1 - 2^-m], m = 1..={m_max}"),
        Extremum::Max,
        points,
        verdict,
    );
    report.checks.push(Check {
        name: name.into(),
        passed,
        detail,
    });
    report.values.insert("q".into(), q);
    report.values.insert("terms".into(), terms as f64);
    report.values.insert("probe_last".into(), last);
    if let CarlesonClass::Finite { value } = class {
        report.values.insert("classified_value".into(), value);
    }
    report.provenance.truncation = Some(terms);
    report.provenance.notes.push(format!("measure {rho}"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(beta: f64) -> RadialMeasure {
        RadialMeasure::power(beta).unwrap()
    }

    #[test]
    fn const_power_threshold() {
        let g = Gauge::constant();
        for beta in [-1.5, -1.0, -0.5, 0.0, 1.0] {
            let c = carleson_classify(&g, 2.0, &power(beta)).unwrap();
            assert_eq!(c.is_finite(), beta > -1.0, "beta={beta}");
        }
        match carleson_classify(&g, 2.0, &power(0.0)).unwrap() {
            CarlesonClass::Finite { value } => assert!((value - 2.0).abs() < 1e-10),
            c => panic!("{c:?}"),
        }
        // ∫ (1 + s) e^{-(β+1)s} ds = 1/c + 1/c² with c = β + 1.
        match carleson_classify(&g, 2.0, &power(-0.5)).unwrap() {
            CarlesonClass::Finite { value } => assert!((value - 6.0).abs() < 1e-9),
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn atoms_and_mixtures() {
        let g = Gauge::power(0.5).unwrap();
        let atom = RadialMeasure::atom(0.75, 2.0).unwrap();
        let expected = 2.0 * g.phi(0.25).powf(1.5);
        match carleson_classify(&g, 3.0, &atom).unwrap() {
            CarlesonClass::Finite { value } => assert!((value - expected).abs() < 1e-14),
            c => panic!("{c:?}"),
        }
        let mix: RadialMeasure = "mix:[atom:0.75:2,power:-2]".parse().unwrap();
        assert!(!carleson_classify(&g, 3.0, &mix).unwrap().is_finite());
    }

    #[test]
    fn numeric_refinement() {
        let g = Gauge::constant();
        let d = doubling_depths();
        let finite = classify_partials(&carleson_partial_integrals(&g, 2.0, &power(0.0), &d).unwrap());
        assert!(matches!(finite, NumericClass::Finite { value } if (value - 2.0).abs() < 1e-9));
        let blow = classify_partials(&carleson_partial_integrals(&g, 2.0, &power(-1.5), &d).unwrap());
        assert!(matches!(blow, NumericClass::Infinite { .. }));
        let slow = classify_partials(&carleson_partial_integrals(&g, 2.0, &power(-1.0), &d).unwrap());
        assert!(matches!(slow, NumericClass::Undecided { .. }));
    }

    #[test]
    fn probe_examples() {
        let g = Gauge::constant();
        let atom = RadialMeasure::atom(0.0, 1.0).unwrap();
        let r = carleson_necessity_probe(&g, 2.0, &atom, 8, 6).unwrap();
        assert!((r.values["probe_last"] - 1.0).abs() < 1e-15);

        let fin = carleson_necessity_probe(&g, 2.0, &power(0.0), 12, 20).unwrap();
        assert!(fin.verdict.holds());
        // ∫₀¹ r^{2n} dr = 1/(2n + 1) with n = 2^k − 1.
        let oracle: f64 = (0..12).map(|k| 1.0 / (2f64.powi(k + 1) - 1.0)).sum();
        assert!((fin.values["probe_last"] - oracle).abs() < 1e-5 * oracle);

        let inf = carleson_necessity_probe(&g, 2.0, &power(-1.0), 12, 20).unwrap();
        assert!(inf.verdict.holds());
        assert!(inf.check("partials-grow").unwrap().passed);

        let q3 = carleson_necessity_probe(&g, 3.0, &power(0.0), 6, 8).unwrap();
        assert!(q3.values["probe_last"] > 0.0);
    }
}
