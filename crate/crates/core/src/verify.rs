//! Grid certifications of the inequalities linking gap series, integral
//! means and the quadratic integral `Φ_ω`.
//!
//! Every function returns an [`EstimateReport`] whose constant is measured
//! on an explicit grid; nothing is extrapolated to a true infimum or supremum.

use std::f64::consts::{E, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gauge::Gauge;
use crate::holomorphic::Holomorphic;
use crate::lacunary::{default_order, ExponentRule, GapSeries};
use crate::means::{
    bloch_norm_estimate, dyadic_radius, hardy_bloch_norm_estimate, integral_mean, MeanOptions, RadialGrid,
};
use crate::quadrature::{self, QuadOptions};
use crate::report::{extremal_ratio, Check, EstimateReport, Extremum, GridPoint, Verdict};
use crate::stochastic::{MomentMode, RademacherFamily, MAX_EXACT_TERMS};
use crate::summation::NeumaierSum;
use crate::{Error, Result};

pub const LEMMA31: &str = "psi-lower-bound";
pub const REVERSE: &str = "reverse-estimate";
pub const PHI_DOUBLING: &str = "phi-doubling";
pub const DIRECT: &str = "direct-estimate";
pub const HARDY_BLOCH: &str = "hardy-bloch-estimate";
pub const DIVERGENCE: &str = "divergence-demo";

/// Relative tolerance allowed on the radial integral inequalities.
pub const INNER_TOL: f64 = 1e-8;

fn verdict_from(points: &[GridPoint], extremum: Extremum, ok: bool, detail: &str) -> Verdict {
    let best = extremal_ratio(points, extremum).expect("nonempty grid");
    if ok {
        Verdict::Holds { constant: best.ratio }
    } else {
        Verdict::Violated {
            r: best.r,
            theta: best.theta,
            detail: detail.to_string(),
        }
    }
}

/// `min_m Ψ(r_m)/Φ(1 − r_m)` over `r_m = 1 − 2^{-m}`, `m = 1..=m_max`,
/// together with the chain `2Ψ(r) ≥ ω²(1) + e^{-1} Σ_{k≤n} ω²(2^{-k})`
/// where `2^{-n-1} ≤ 1 − r < 2^{-n}`.
pub fn verify_lemma31(gauge: &Gauge, m_max: u32) -> Result<EstimateReport> {
    let grid = RadialGrid::dyadic(m_max)?;
    let mut points = Vec::new();
    let mut chain = Vec::new();
    let mut chain_ok = true;
    let mut first_break = None;
    let mut omega_sq = NeumaierSum::new();
    let mut max_order = 0;
    for m in grid.depths() {
        let r = dyadic_radius(m);
        let psi = gauge.psi(r, None)?;
        max_order = max_order.max(psi.order);
        let phi = gauge.phi(0.5f64.powi(m as i32));
        points.push(GridPoint::new(r, None, psi.value, phi));

        // n = m − 1 here since 1 − r = 2^{-m}.
        let w = gauge.omega_dyadic(m as usize - 1);
        omega_sq += w * w;
        let lhs = 2.0 * psi.value;
        let rhs = gauge.omega(1.0).powi(2) + omega_sq.value() / E;
        let gp = GridPoint::new(r, None, lhs, rhs);
        if lhs < rhs {
            chain_ok = false;
            first_break.get_or_insert(r);
        }
        chain.push(gp);
    }
    let min = extremal_ratio(&points, Extremum::Min).expect("nonempty").ratio;
    let ok = min > 0.0 && chain_ok;
    let detail = match first_break {
        Some(r) => format!("chain inequality fails at r = {r}"),
        None => "minimum ratio is not positive".into(),
    };
    let mut report = EstimateReport::new(
        LEMMA31,
        gauge.to_string(),
        grid.describe(),
        Extremum::Min,
        points,
        verdict_from_min(min, ok, &detail, first_break),
    );
    report.checks.push(Check {
        name: "chain".into(),
        passed: chain_ok,
        detail: "2 psi(r) >= omega(1)^2 + (1/e) sum_{k<=n} omega(2^-k)^2".into(),
    });
    report.extra_points.insert("chain".into(), chain);
    // Ψ(0)/Φ(1) = ω²(1).
    report.values.insert("ratio_at_origin".into(), gauge.omega(1.0).powi(2));
    report.provenance.truncation = Some(max_order);
    report.provenance.tolerances.insert("psi_tail".into(), 1e-12);
    Ok(report)
}

fn verdict_from_min(min: f64, ok: bool, detail: &str, at: Option<f64>) -> Verdict {
    if ok {
        Verdict::Holds { constant: min }
    } else {
        Verdict::Violated {
            r: at.unwrap_or(0.0),
            theta: None,
            detail: detail.to_string(),
        }
    }
}

/// Regularity hypotheses on a dyadic grid down to `2^{-40}`.
pub fn require_regular(gauge: &Gauge) -> Result<()> {
    let report = gauge.check_regularity_dyadic(40);
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(Error::precondition(
            c.name.clone(),
            format!(
                "{} violates it between t = {:?}",
                gauge,
                c.first_violation.unwrap_or((f64::NAN, f64::NAN))
            ),
        )),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReverseConfig {
    pub m_max: u32,
    /// Number of randomized terms; chosen from the tail bound when absent.
    pub terms: Option<usize>,
    pub angles: usize,
    pub mode: MomentMode,
}

impl Default for ReverseConfig {
    fn default() -> Self {
        ReverseConfig {
            m_max: 20,
            terms: None,
            angles: 16,
            mode: MomentMode::Exact,
        }
    }
}

/// Measured `τ = min ∫₀¹ |F_y(z)|^{2p} dy / Φ^p(1 − |z|)` for the Rademacher
/// family normalized so that every `F_y` has grid Bloch norm at most 1.
///
/// The grid is `z = 0` and `z = r_m e^{iθ}` for the dyadic radii and uniform angles.
pub fn verify_reverse(gauge: &Gauge, p: f64, cfg: &ReverseConfig) -> Result<EstimateReport> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    require_regular(gauge)?;
    let grid = RadialGrid::new(1, cfg.m_max, cfg.angles)?;
    let rule = ExponentRule::PowersOfTwoMinusOne;
    let auto = default_order(gauge, rule, grid.r_max()) + 1;
    let terms = match (cfg.terms, cfg.mode) {
        (Some(k), _) => k,
        (None, MomentMode::Exact) => auto.min(MAX_EXACT_TERMS),
        (None, _) => auto,
    };
    let family = RademacherFamily::extremal(*gauge, terms)?;

    // |RF_y| ≤ RF_+ pointwise, so the all-plus series bounds every F_y.
    let norm_depth = (terms as u32 + 8).clamp(cfg.m_max, 50);
    let norm = bloch_norm_estimate(family.base(), gauge, &RadialGrid::dyadic(norm_depth)?);
    let normalized = family.scaled(1.0 / norm.value);

    let mut zs = vec![(0.0, None, Complex64::new(0.0, 0.0))];
    for r in grid.radii() {
        for j in 0..grid.angles {
            let theta = TAU * j as f64 / grid.angles as f64;
            zs.push((r, Some(theta), Complex64::from_polar(r, theta)));
        }
    }
    let mut points = Vec::with_capacity(zs.len());
    for (r, theta, z) in zs {
        let m = normalized.moment_integral(z, p, cfg.mode)?;
        let phi = gauge.phi(1.0 - r).powf(p);
        points.push(GridPoint::new(r, theta, m.value, phi));
    }
    let tau = extremal_ratio(&points, Extremum::Min).expect("nonempty").ratio;
    let verdict = verdict_from(&points, Extremum::Min, tau > 0.0, "measured tau is not positive");
    let mut report = EstimateReport::new(REVERSE, gauge.to_string(), grid.describe(), Extremum::Min, points, verdict);
    report.values.insert("tau".into(), tau);
    report.values.insert("normalization".into(), norm.value);
    report.values.insert("p".into(), p);
    report.values.insert("terms".into(), terms as f64);
    report.provenance.truncation = Some(terms);
    if let MomentMode::MonteCarlo { seed, .. } = cfg.mode {
        report.provenance.seed = Some(seed);
    }
    report.provenance.notes.push(format!(
        "normalization = grid sup of the all-plus series over m = 1..={norm_depth}"
    ));
    if terms < auto {
        report
            .provenance
            .notes
            .push(format!("terms capped at {terms}; the tail bound asks for {auto}"));
    }
    Ok(report)
}

/// `Φ(1 − r)/Φ(1 − r²)` over radii in `(2/3, 1)`; holds iff every ratio is at most 4.
pub fn verify_phi_doubling(gauge: &Gauge, radii: &[f64]) -> Result<EstimateReport> {
    if radii.is_empty() {
        return Err(Error::Domain("empty radius grid".into()));
    }
    if let Some(&bad) = radii.iter().find(|&&r| !(r > 2.0 / 3.0 && r < 1.0)) {
        return Err(Error::Domain(format!("radius {bad} outside (2/3, 1)")));
    }
    let points: Vec<GridPoint> = radii
        .iter()
        .map(|&r| {
            let x = 1.0 - r;
            GridPoint::new(r, None, gauge.phi(x), gauge.phi(x * (1.0 + r)))
        })
        .collect();
    let violations = points.iter().filter(|p| p.ratio > 4.0).count();
    let verdict = match points.iter().find(|p| p.ratio > 4.0) {
        None => Verdict::Holds {
            constant: extremal_ratio(&points, Extremum::Max).expect("nonempty").ratio,
        },
        Some(p) => Verdict::Violated {
            r: p.r,
            theta: None,
            detail: format!("ratio {} > 4", p.ratio),
        },
    };
    let grid = format!(
        "{} radii in ({}, {})",
        radii.len(),
        radii.iter().copied().fold(f64::INFINITY, f64::min),
        radii.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    );
    let mut report = EstimateReport::new(PHI_DOUBLING, gauge.to_string(), grid, Extremum::Max, points, verdict);
    report.values.insert("violations".into(), violations as f64);
    Ok(report)
}

/// `n` radii in `(2/3, 1)` with `1 − r` log-spaced from `1/3` down to `~3e-14`.
pub fn doubling_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 1.0 - 10f64.powf(-13.0 * (i as f64 + 0.5) / n as f64) / 3.0)
        .collect()
}

/// `∫₀ʳ w(t) (r − t) dt` along the positive radius.
fn radial_moment<W: Fn(f64) -> f64>(w: W, r: f64) -> Result<f64> {
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-11,
        max_intervals: 400,
    };
    Ok(quadrature::integrate_pieces(|t| w(t) * (r - t), &quadrature::dyadic_breaks_toward_one(r), opts)?.value)
}

fn mean_ratio_scan(
    name: &str,
    gauge: &Gauge,
    f: &dyn Holomorphic,
    p: f64,
    grid: &RadialGrid,
    norm: f64,
    opts: &MeanOptions,
    inner: &(dyn Fn(f64) -> Result<f64> + Sync),
) -> Result<EstimateReport> {
    let radii = grid.radii();
    let rows = radii
        .par_iter()
        .map(|&r| {
            let mean = integral_mean(f, p, r, opts)?;
            let phi = gauge.phi(1.0 - r);
            let main = GridPoint::new(r, None, mean.value, norm * phi.sqrt());
            let lhs = inner(r)?;
            let side = GridPoint::new(r, None, lhs, norm * norm * phi);
            Ok((main, side, mean.converged))
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<GridPoint> = rows.iter().map(|r| r.0).collect();
    let inner_points: Vec<GridPoint> = rows.iter().map(|r| r.1).collect();
    let unconverged = rows.iter().filter(|r| !r.2).count();
    let inner_bad = inner_points.iter().find(|g| g.lhs > g.rhs * (1.0 + INNER_TOL));
    let max = extremal_ratio(&points, Extremum::Max).expect("nonempty").ratio;
    let verdict = match inner_bad {
        Some(g) => Verdict::Violated {
            r: g.r,
            theta: None,
            detail: format!("radial integral {} exceeds {}", g.lhs, g.rhs),
        },
        None if !max.is_finite() => Verdict::Violated {
            r: 0.0,
            theta: None,
            detail: "ratio is not finite".into(),
        },
        None => Verdict::Holds { constant: max },
    };
    let mut report = EstimateReport::new(name, gauge.to_string(), grid.describe(), Extremum::Max, points, verdict);
    report.checks.push(Check {
        name: "radial-integral".into(),
        passed: inner_bad.is_none(),
        detail: format!("int_0^r |R f|^2 (r - t) dt <= norm^2 Phi(1 - r) within relative {INNER_TOL:e}"),
    });
    report.extra_points.insert("radial-integral".into(), inner_points);
    report.values.insert("norm".into(), norm);
    report.values.insert("p".into(), p);
    report.values.insert("unconverged_means".into(), unconverged as f64);
    report.provenance.tolerances.insert("mean_rel".into(), opts.rel_tol);
    report.provenance.tolerances.insert("radial_integral_rel".into(), INNER_TOL);
    Ok(report)
}

/// `max_r M_p(f, r) / (‖f‖ Φ^{1/2}(1 − r))` with `‖f‖` the grid Bloch norm,
/// plus `∫₀ʳ |Rf(t)|² (r − t) dt ≤ ‖f‖² Φ(1 − r)` at each grid radius.
pub fn verify_direct(gauge: &Gauge, f: &dyn Holomorphic, p: f64, grid: &RadialGrid) -> Result<EstimateReport> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    let norm = bloch_norm_estimate(f, gauge, grid);
    let inner = |r: f64| radial_moment(|t| f.radial_derivative(Complex64::new(t, 0.0)).norm_sqr(), r);
    let mut report = mean_ratio_scan(DIRECT, gauge, f, p, grid, norm.value, &MeanOptions::default(), &inner)?;
    report.values.insert("norm_argmax_r".into(), norm.argmax_r);
    Ok(report)
}

/// As [`verify_direct`] with the Hardy–Bloch norm, `p ≥ 2`, and the radial
/// integral taken over `M_p²(Rf, t)`.
pub fn verify_hardy_bloch(gauge: &Gauge, f: &dyn Holomorphic, p: f64, grid: &RadialGrid) -> Result<EstimateReport> {
    if !(p >= 2.0) {
        return Err(Error::precondition("2 <= p < infinity", format!("got p = {p}")));
    }
    let opts = MeanOptions::default();
    let norm = hardy_bloch_norm_estimate(f, gauge, p, grid, &opts)?;
    let rf = f.radial_derivative_function();
    let rf = rf.as_ref();
    let mean_sq = |t: f64| -> f64 {
        if t == 0.0 {
            return rf.value(Complex64::new(0.0, 0.0)).norm_sqr();
        }
        match (p == 2.0).then(|| rf.mean_square(t)).flatten() {
            Some(v) => v,
            None => integral_mean(rf, p, t, &opts).map_or(f64::NAN, |m| m.value * m.value),
        }
    };
    let inner = |r: f64| radial_moment(mean_sq, r);
    let mut report = mean_ratio_scan(HARDY_BLOCH, gauge, f, p, grid, norm.value, &opts, &inner)?;
    report.values.insert("norm_argmax_r".into(), norm.argmax_r);
    Ok(report)
}

/// Oscillation of the extremal series along rays, next to the `ℓ²`
/// classification of its coefficients.
///
/// At depth `m`, `osc` is the largest range of `Re f` or `Im f` over the
/// radii `r_{m-9}, …, r_m` on any ray.
pub fn divergence_demo(gauge: &Gauge, rays: &[f64], m_max: u32) -> Result<EstimateReport> {
    const WINDOW: usize = 10;
    if rays.is_empty() {
        return Err(Error::Domain("at least one ray is needed".into()));
    }
    let grid = RadialGrid::dyadic(m_max)?;
    let series = GapSeries::extremal_for_radius(*gauge, ExponentRule::PowersOfTwo, grid.r_max())?;
    let radii = grid.radii();
    let values: Vec<Vec<Complex64>> = rays
        .iter()
        .map(|&theta| {
            radii
                .iter()
                .map(|&r| series.value(Complex64::from_polar(r, theta)))
                .collect()
        })
        .collect();
    let mut points = Vec::new();
    for (i, &r) in radii.iter().enumerate() {
        let lo = (i + 1).saturating_sub(WINDOW);
        let osc = values
            .iter()
            .map(|ray| {
                let w = &ray[lo..=i];
                let range = |part: fn(&Complex64) -> f64| {
                    let (mn, mx) = w
                        .iter()
                        .map(part)
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
                    mx - mn
                };
                range(|z| z.re).max(range(|z| z.im))
            })
            .fold(0.0, f64::max);
        points.push(GridPoint::new(r, None, osc, 1.0));
    }
    let membership = crate::lacunary::l2_membership(gauge);
    let dichotomy = gauge.classify_dichotomy();
    let agree = membership.is_in_l2() == dichotomy.is_convergent();
    let last = points.last().expect("nonempty").ratio;
    let verdict = if agree {
        Verdict::Holds { constant: last }
    } else {
        Verdict::Violated {
            r: grid.r_max(),
            theta: None,
            detail: "l2 classification disagrees with the integral dichotomy".into(),
        }
    };
    let mut report = EstimateReport::new(DIVERGENCE, gauge.to_string(), grid.describe(), Extremum::Max, points, verdict);
    report.values.insert("in_l2".into(), if membership.is_in_l2() { 1.0 } else { 0.0 });
    report.values.insert("final_oscillation".into(), last);
    report.values.insert("rays".into(), rays.len() as f64);
    report.checks.push(Check {
        name: "l2-membership".into(),
        passed: agree,
        detail: serde_json::to_string(&membership)?,
    });
    report.provenance.truncation = Some(series.order());
    report
        .provenance
        .notes
        .push("oscillation along sampled rays is evidence; the l2 classification is the verdict".into());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holomorphic::Polynomial;

    #[test]
    fn lemma31_const_and_pow() {
        for g in [Gauge::constant(), Gauge::power(0.5).unwrap()] {
            let r = verify_lemma31(&g, 20).unwrap();
            assert!(r.verdict.holds());
            assert!(r.extremal_constant > 0.0);
            assert!(r.check("chain").unwrap().passed);
        }
    }

    #[test]
    fn lemma31_min_matches_brute_force() {
        let g = Gauge::log(-0.5).unwrap();
        let report = verify_lemma31(&g, 12).unwrap();
        let brute = (1..=12)
            .map(|m| {
                let r = 1.0 - 0.5f64.powi(m);
                let psi: f64 = (0..40)
                    .map(|k| (1.0 + k as f64 * std::f64::consts::LN_2).powf(-1.0) * r.powf(2f64.powi(k) - 1.0))
                    .sum();
                psi / (1.0 + (1.0 + m as f64 * std::f64::consts::LN_2).ln())
            })
            .fold(f64::INFINITY, f64::min);
        assert!((report.extremal_constant - brute).abs() < 1e-10);
    }

    #[test]
    fn phi_doubling_examples() {
        let g = Gauge::constant();
        let r = verify_phi_doubling(&g, &[0.9]).unwrap();
        let oracle = (1.0 + 10f64.ln()) / (1.0 + (1.0 / 0.19f64).ln());
        assert!((r.extremal_constant - oracle).abs() < 1e-14);
        assert!(r.verdict.holds());
        let p = verify_phi_doubling(&Gauge::power(0.5).unwrap(), &[0.99]).unwrap();
        assert!(p.extremal_constant <= 4.0);
        assert!(verify_phi_doubling(&g, &[0.5]).is_err());
        let grid = doubling_grid(1000);
        assert!(grid.iter().all(|&r| r > 2.0 / 3.0 && r < 1.0));
        let all = verify_phi_doubling(&g, &grid).unwrap();
        assert!(all.points.iter().all(|p| p.ratio >= 1.0));
    }

    #[test]
    fn direct_for_identity_and_constants() {
        let g = Gauge::constant();
        let grid = RadialGrid::dyadic(10).unwrap();
        let r = verify_direct(&g, &Polynomial::identity(), 2.0, &grid).unwrap();
        assert!(r.verdict.holds());
        assert!(r.extremal_constant <= 4.0);
        let c = Polynomial::constant(Complex64::new(2.0, 0.0));
        let rc = verify_direct(&g, &c, 1.0, &grid).unwrap();
        assert!(rc.extremal_constant <= 1.0 + 1e-15);
        let hb = verify_hardy_bloch(&g, &Polynomial::identity(), 2.0, &grid).unwrap();
        assert!(hb.verdict.holds());
        assert!(matches!(
            verify_hardy_bloch(&g, &c, 1.5, &grid),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn reverse_rejects_irregular_gauge() {
        let g = Gauge::power(0.5).unwrap().with_eps(0.8).unwrap();
        let err = verify_reverse(&g, 1.0, &ReverseConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition { ref hypothesis, .. } if hypothesis.contains("eps")));
    }

    #[test]
    fn reverse_small_grid() {
        let cfg = ReverseConfig {
            m_max: 8,
            terms: Some(10),
            ..Default::default()
        };
        let r = verify_reverse(&Gauge::constant(), 2.0, &cfg).unwrap();
        assert!(r.verdict.holds());
        assert!(r.values["tau"] > 0.0);
        assert_eq!(r.points[0].r, 0.0);
    }

    #[test]
    fn divergence_single_radius() {
        let r = divergence_demo(&Gauge::constant(), &[0.3], 1).unwrap();
        assert_eq!(r.points[0].lhs, 0.0);
        assert!(r.verdict.holds());
    }
}
