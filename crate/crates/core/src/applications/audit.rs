use std::cell::Cell;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SelfMap;
use crate::gauge::Gauge;
use crate::means::{circle_mean, MeanOptions, RadialGrid};
use crate::report::{Check, EstimateReport, Extremum, GridPoint, Verdict};
use crate::{Error, Result};

pub const AUDIT: &str = "hyperbolic-audit";

/// Samples with `1 − |φ| <` this value are left out of the audit means.
pub const EXCLUSION: f64 = 1e-14;

/// `|φ'(z)| (1 − |z|) / (1 − |φ(z)|) · Ω(1 − |φ(z)|)`.
pub fn hyperbolic_ratio(phi: &SelfMap, big_omega: &Gauge, z: Complex64) -> Result<f64> {
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!("|z| must be < 1, got |z| = {}", z.norm())));
    }
    let gap = phi.one_minus_modulus(z);
    if !(gap > 0.0) {
        return Err(Error::Singularity(format!("|phi(z)| >= 1 numerically at z = {z}")));
    }
    let gap = gap.min(1.0);
    Ok(phi.derivative(z).norm() * (1.0 - z.norm()) / gap * big_omega.omega(gap))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub p: f64,
    pub grid: RadialGrid,
}

/// Two-stage audit of a self-map against gauges `ω` (convergent) and `Ω`
/// (divergent):
///
/// 1. `M_{2p}(hyperbolic ratio, r) ≤ ω(1 − r)` on every grid radius;
/// 2. when that holds, `sup_r ∫ Φ_Ω^p(1 − |φ(rζ)|) dσ(ζ)` on the grid.
pub fn cor43_audit(phi: &SelfMap, omega: &Gauge, big_omega: &Gauge, cfg: &AuditConfig) -> Result<EstimateReport> {
    let p = cfg.p;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be at least 1, got {p}")));
    }
    if !omega.classify_dichotomy().is_convergent() {
        return Err(Error::precondition(
            "I_omega(0+) < infinity",
            format!("{omega} has a divergent quadratic integral"),
        ));
    }
    if !big_omega.classify_dichotomy().is_divergent() {
        return Err(Error::precondition(
            "I_Omega(0+) = infinity",
            format!("{big_omega} has a convergent quadratic integral"),
        ));
    }
    let grid = cfg.grid;
    let opts = MeanOptions {
        max_angles: grid.angles << 8,
        ..MeanOptions::default()
    };
    let radii = grid.radii();
    let sample = |r: f64, theta: f64, excluded: &Cell<usize>| -> Option<(f64, f64)> {
        let z = Complex64::from_polar(r, theta);
        let gap = phi.one_minus_modulus(z);
        if gap < EXCLUSION {
            excluded.set(excluded.get() + 1);
            return None;
        }
        let ratio = hyperbolic_ratio(phi, big_omega, z).ok()?;
        Some((ratio, big_omega.phi_from_log(-gap.min(1.0).ln()).powf(p)))
    };

    let hypothesis: Vec<(GridPoint, usize)> = radii
        .par_iter()
        .map(|&r| {
            let excluded = Cell::new(0);
            let m = circle_mean(
                |t| sample(r, t, &excluded).map_or(0.0, |s| s.0),
                2.0 * p,
                grid.angles,
                &opts,
            );
            (GridPoint::new(r, None, m.value, omega.omega(1.0 - r)), excluded.get())
        })
        .collect();
    let excluded: usize = hypothesis.iter().map(|h| h.1).sum();
    let points: Vec<GridPoint> = hypothesis.into_iter().map(|h| h.0).collect();
    let violation = points.iter().find(|g| g.lhs > g.rhs * (1.0 + 1e-12)).copied();

    let mut phi_points = Vec::new();
    let verdict = match violation {
        Some(g) => Verdict::Violated {
            r: g.r,
            theta: None,
            detail: format!("M_2p of the hyperbolic ratio is {} > omega(1 - r) = {}", g.lhs, g.rhs),
        },
        None => {
            phi_points = radii
                .par_iter()
                .map(|&r| {
                    let skipped = Cell::new(0);
                    let m = circle_mean(
                        |t| sample(r, t, &skipped).map_or(0.0, |s| s.1),
                        1.0,
                        grid.angles,
                        &opts,
                    );
                    GridPoint::new(r, None, m.value, 1.0)
                })
                .collect::<Vec<_>>();
            let sup = phi_points.iter().map(|g| g.lhs).fold(0.0, f64::max);
            Verdict::Holds { constant: sup }
        }
    };
    let mut report = EstimateReport::new(
        AUDIT,
        omega.to_string(),
        grid.describe(),
        Extremum::Max,
        points,
        verdict,
    );
    report.checks.push(Check {
        name: "hypothesis".into(),
        passed: violation.is_none(),
        detail: "M_2p(hyperbolic ratio, r) <= omega(1 - r) on the grid".into(),
    });
    if !phi_points.is_empty() {
        let sup = phi_points.iter().map(|g| g.lhs).fold(0.0, f64::max);
        report.values.insert("sup_phi_integral".into(), sup);
        report.extra_points.insert("phi-integral".into(), phi_points);
    }
    report.values.insert("p".into(), p);
    report.values.insert("excluded_samples".into(), excluded as f64);
    report.provenance.tolerances.insert("exclusion".into(), EXCLUSION);
    report.provenance.notes.push(format!("map {phi}, Omega {big_omega}"));
    Ok(report)
}
