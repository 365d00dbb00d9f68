//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed.
//!
//! Reference values come from oracles written here from first principles,
//! not from the library routines under test.

use std::f64::consts::{LN_2, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use blochlab::applications::{
    carleson_classify, cor43_audit, AuditConfig, CarlesonClass, RadialMeasure, SelfMap,
};
use blochlab::cli::{build_report, Command, RunConfig};
use blochlab::lacunary::{l2_membership, L2Membership};
use blochlab::means::RadialGrid;
use blochlab::report::Verdict;
use blochlab::stochastic::{MomentMode, RademacherFamily};
use blochlab::verify::{
    divergence_demo, doubling_grid, verify_direct, verify_lemma31, verify_phi_doubling, verify_reverse, ReverseConfig,
};
use blochlab::{Complex64, ExponentRule, GapSeries, Gauge, GaugeKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ok<T>(r: blochlab::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// `ω(t)` straight from the family definitions.
fn omega(g: &Gauge, t: f64) -> f64 {
    match g.kind() {
        GaugeKind::Const => 1.0,
        GaugeKind::Pow { alpha } => t.powf(alpha),
        GaugeKind::Log { beta } => (1.0 + (1.0 / t).ln()).powf(beta),
    }
}

/// `Φ(x) = 1 + ∫ₓ¹ ω²(t)/t dt` from the antiderivatives.
fn phi(g: &Gauge, x: f64) -> f64 {
    let s = (1.0 / x).ln();
    1.0 + match g.kind() {
        GaugeKind::Const => s,
        GaugeKind::Pow { alpha } => (1.0 - x.powf(2.0 * alpha)) / (2.0 * alpha),
        GaugeKind::Log { beta } => {
            let gamma = 2.0 * beta + 1.0;
            if gamma == 0.0 {
                (1.0 + s).ln()
            } else {
                ((1.0 + s).powf(gamma) - 1.0) / gamma
            }
        }
    }
}

/// `Ψ(r) = Σ ω²(2^{-k}) r^{2ᵏ−1}` summed until the terms vanish.
fn psi(g: &Gauge, r: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..64 {
        let term = omega(g, 0.5f64.powi(k)).powi(2) * r.powf(2f64.powi(k) - 1.0);
        sum += term;
        if term < 1e-300 {
            break;
        }
    }
    sum
}

fn criterion_1() -> Outcome {
    let gauges = [Gauge::constant(), Gauge::power(0.5).unwrap(), Gauge::log(-0.5).unwrap()];
    let mut worst = 0.0f64;
    for g in &gauges {
        for m in 1..=30 {
            let x = 0.5f64.powi(m);
            let s = m as f64 * LN_2;
            let oracle = match g.kind() {
                GaugeKind::Const => s,
                GaugeKind::Pow { .. } => 1.0 - x,
                GaugeKind::Log { .. } => (1.0 + s).ln(),
            };
            let quad = ok(g.quadratic_integral_quadrature(x))?.value_i;
            let closed = ok(g.quadratic_integral(x))?.value_i;
            worst = worst.max((quad - oracle).abs()).max((closed - oracle).abs());
        }
    }
    ensure(worst <= 1e-9, format!("largest deviation {worst:e}"))?;
    Ok(format!("max |quadrature - closed form| = {worst:.2e}"))
}

fn criterion_2() -> Outcome {
    let mut spread = 0.0f64;
    for g in Gauge::builtins() {
        let r20 = ok(verify_lemma31(&g, 20))?;
        let r24 = ok(verify_lemma31(&g, 24))?;
        let (a, b) = (r20.extremal_constant, r24.extremal_constant);
        ensure(a > 0.0 && b > 0.0, format!("{g}: non-positive minimum"))?;
        let change = (a - b).abs() / a;
        spread = spread.max(change);
        ensure(change < 0.05, format!("{g}: minimum moved by {:.2}%", 100.0 * change))?;
        ensure(r24.check("chain").is_some_and(|c| c.passed), format!("{g}: chain fails"))?;

        let mut tail = 0.0;
        let mut min = f64::INFINITY;
        for m in 1..=24 {
            let r = 1.0 - 0.5f64.powi(m);
            let p = psi(&g, r);
            min = min.min(p / phi(&g, 0.5f64.powi(m)));
            tail += omega(&g, 0.5f64.powi(m - 1)).powi(2);
            let chain_rhs = omega(&g, 1.0).powi(2) + tail / std::f64::consts::E;
            ensure(2.0 * p >= chain_rhs, format!("{g}: chain oracle fails at m = {m}"))?;
        }
        ensure(
            (min - b).abs() <= 1e-9 * min,
            format!("{g}: reported minimum {b} vs oracle {min}"),
        )?;
    }
    Ok(format!("min ratio positive, largest 20->24 change {:.3}%", 100.0 * spread))
}

fn criterion_3() -> Outcome {
    let g = Gauge::power(0.5).unwrap();
    let fam = ok(RademacherFamily::extremal(g, 10))?;
    let mut worst1 = 0.0f64;
    let mut worst2 = 0.0f64;
    for r in [0.99, 0.995, 0.999] {
        let z = Complex64::new(r, 0.0);
        let w: Vec<f64> = (0..10)
            .map(|k| omega(&g, 0.5f64.powi(k)) * r.powi((1 << k) - 1))
            .collect();
        let s: f64 = w.iter().map(|x| x * x).sum();
        let s4: f64 = w.iter().map(|x| x.powi(4)).sum();
        let m1 = ok(fam.moment_integral(z, 1.0, MomentMode::Exact))?;
        let m2 = ok(fam.moment_integral(z, 2.0, MomentMode::Exact))?;
        ensure(m1.terms_used == 10 && m2.terms_used == 10, "pattern count is not 1024")?;
        worst1 = worst1.max((m1.value - s).abs() / s);
        let fourth = 3.0 * s * s - 2.0 * s4;
        worst2 = worst2.max((m2.value - fourth).abs() / fourth);
        // p = 1 is an equality, so it is compared at the closed-form tolerance.
        ensure(
            m1.value >= s * (1.0 - 1e-14) && m2.value >= s * s,
            format!("power mean fails at r = {r}"),
        )?;
    }
    ensure(worst1 <= 1e-14, format!("p = 1 relative error {worst1:e}"))?;
    ensure(worst2 <= 1e-12, format!("p = 2 relative error {worst2:e}"))?;
    Ok(format!("p=1 rel err {worst1:.1e}, p=2 rel err {worst2:.1e}"))
}

fn criterion_4() -> Outcome {
    let g = Gauge::power(0.5).unwrap();
    let r1 = ok(verify_reverse(&g, 1.0, &ReverseConfig::default()))?;
    let tau = r1.values["tau"];
    let norm = r1.values["normalization"];
    ensure(tau > 0.0, "tau is not positive")?;
    let mut oracle = psi(&g, 0.0) / (norm * norm);
    for m in 1..=20 {
        let r = 1.0 - 0.5f64.powi(m);
        oracle = oracle.min(psi(&g, r * r) / (norm * norm * phi(&g, 1.0 - r)));
    }
    ensure(
        (tau - oracle).abs() <= 1e-10,
        format!("tau {tau} vs closed form {oracle}"),
    )?;
    let cfg = ReverseConfig {
        terms: Some(20),
        ..ReverseConfig::default()
    };
    let r2 = ok(verify_reverse(&g, 2.0, &cfg))?;
    let tau2 = r2.values["tau"];
    ensure(tau2 > 0.0, "p = 2 tau is not positive")?;
    Ok(format!("tau(p=1) = {tau:.6e} (|diff| {:.1e}), tau(p=2, K=20) = {tau2:.6e}", (tau - oracle).abs()))
}

fn criterion_5() -> Outcome {
    let grid = doubling_grid(1000);
    ensure(grid.len() == 1000 && grid.iter().all(|&r| r > 2.0 / 3.0 && r < 1.0), "bad grid")?;
    let mut worst = 0.0f64;
    for g in Gauge::builtins() {
        let report = ok(verify_phi_doubling(&g, &grid))?;
        ensure(report.verdict.holds(), format!("{g}: verdict violated"))?;
        let violations = grid
            .iter()
            .filter(|&&r| phi(&g, 1.0 - r) > 4.0 * phi(&g, 1.0 - r * r))
            .count();
        ensure(violations == 0, format!("{g}: {violations} oracle violations"))?;
        worst = worst.max(report.extremal_constant);
    }
    Ok(format!("zero violations, largest ratio {worst:.4}"))
}

fn criterion_6() -> Outcome {
    let g = Gauge::constant();
    let mut parts = Vec::new();
    for p in [1.0, 2.0] {
        let mut maxima = Vec::new();
        for m_max in [16, 20] {
            let grid = ok(RadialGrid::dyadic(m_max))?;
            let f = ok(GapSeries::extremal_for_radius(g, ExponentRule::PowersOfTwo, grid.r_max()))?;
            let report = ok(verify_direct(&g, &f, p, &grid))?;
            ensure(report.check("radial-integral").is_some_and(|c| c.passed), "radial integral fails")?;
            ensure(report.extremal_constant.is_finite(), "ratio not finite")?;
            if p == 2.0 {
                // Orthogonality: M_2² = Σ a_k² r^{2n_k}.
                for pt in &report.points {
                    let m2: f64 = f
                        .coeffs()
                        .iter()
                        .enumerate()
                        .map(|(k, a)| a * a * pt.r.powf(2.0 * 2f64.powi(k as i32)))
                        .sum::<f64>()
                        .sqrt();
                    ensure((pt.lhs - m2).abs() <= 1e-8 * m2, format!("M_2 at r = {}", pt.r))?;
                }
            }
            maxima.push(report.extremal_constant);
        }
        let change = (maxima[1] - maxima[0]).abs() / maxima[0];
        ensure(change < 0.1, format!("p = {p}: max ratio moved by {:.2}%", 100.0 * change))?;
        parts.push(format!("p={p}: {:.4} -> {:.4}", maxima[0], maxima[1]));
    }
    Ok(parts.join(", "))
}

fn criterion_7() -> Outcome {
    let g = Gauge::constant();
    let mut value0 = f64::NAN;
    for beta in [-1.5, -1.0, -0.5, 0.0, 1.0] {
        let class = ok(carleson_classify(&g, 2.0, &ok(RadialMeasure::power(beta))?))?;
        ensure(class.is_finite() == (beta > -1.0), format!("beta = {beta}: {class:?}"))?;
        if let CarlesonClass::Finite { value } = class {
            // ∫₀^∞ (1 + s) e^{-cs} ds = 1/c + 1/c², c = β + 1.
            let c = beta + 1.0;
            let oracle = 1.0 / c + 1.0 / (c * c);
            ensure((value - oracle).abs() <= 1e-6, format!("beta = {beta}: {value} vs {oracle}"))?;
            if beta == 0.0 {
                value0 = value;
            }
        }
    }
    ensure((value0 - 2.0).abs() <= 1e-6, format!("beta = 0 value {value0}"))?;
    Ok(format!("threshold at beta = -1, beta=0 value {value0:.12}"))
}

fn criterion_8() -> Outcome {
    for alpha in [0.25, 0.5, 0.75] {
        let g = Gauge::power(alpha).unwrap();
        let exact = 1.0 / (1.0 - 2f64.powf(-2.0 * alpha));
        match l2_membership(&g) {
            L2Membership::InL2 { lower, upper } => {
                ensure(lower <= exact && exact <= upper, format!("pow:{alpha} enclosure misses {exact}"))?
            }
            other => return Err(format!("pow:{alpha}: {other:?}")),
        }
    }
    for g in [Gauge::constant(), Gauge::log(-0.5).unwrap()] {
        ensure(!l2_membership(&g).is_in_l2(), format!("{g} classified InL2"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let rays: Vec<f64> = (0..8).map(|_| rng.gen::<f64>() * TAU).collect();
    let report = ok(divergence_demo(&Gauge::power(0.5).unwrap(), &rays, 20))?;
    let osc: Vec<f64> = report.points.iter().map(|p| p.lhs).collect();
    let last = &osc[osc.len() - 5..];
    ensure(
        last.windows(2).all(|w| w[1] < w[0]),
        format!("oscillation not decreasing: {last:?}"),
    )?;
    Ok(format!("pow InL2, const/log NotInL2, osc {:.3e} -> {:.3e}", last[0], last[4]))
}

fn criterion_9() -> Outcome {
    let omega_g = Gauge::power(0.5).unwrap();
    let big = Gauge::constant();
    let cfg = AuditConfig {
        p: 1.0,
        grid: ok(RadialGrid::new(1, 12, 64))?,
    };
    let id = ok(cor43_audit(&SelfMap::identity(), &omega_g, &big, &cfg))?;
    let at = match &id.verdict {
        Verdict::Violated { r, .. } => *r,
        v => return Err(format!("identity map: {v:?}")),
    };
    // Identity: ratio ≡ Ω(1 − r) = 1 > √(1 − r) for every r > 0.
    ensure(at > 0.0 && 1.0 > (1.0 - at).sqrt(), "violation point inconsistent")?;
    let half = ok(cor43_audit(&SelfMap::Scale(Complex64::new(0.5, 0.0)), &omega_g, &big, &cfg))?;
    ensure(half.verdict.holds(), "scale(0.5) hypothesis fails")?;
    let sup = half.values["sup_phi_integral"];
    let bound = 1.0 + 2f64.ln();
    ensure(sup <= bound * (1.0 + 1e-12), format!("sup {sup} above Phi(1/2) = {bound}"))?;
    Ok(format!("identity violated at r = {at}, scale(0.5) sup {sup:.6} <= {bound:.6}"))
}

fn determinism_configs() -> Vec<RunConfig> {
    let mut out = Vec::new();
    for g in ["const", "pow:0.5", "log:-0.5"] {
        let mut c = RunConfig::new(Command::GaugeReport);
        c.gauge = g.into();
        out.push(c);
    }
    let mut c = RunConfig::new(Command::VerifyLemma31);
    c.m_max = Some(24);
    out.push(c);
    let mut c = RunConfig::new(Command::VerifyReverse);
    c.gauge = "pow:0.5".into();
    c.p = Some(2.0);
    c.terms = Some(16);
    out.push(c);
    let mut c = RunConfig::new(Command::VerifyReverse);
    c.gauge = "pow:0.5".into();
    c.mode = blochlab::cli::Mode::Mc;
    c.seed = 11;
    c.samples = Some(20_000);
    c.m_max = Some(8);
    out.push(c);
    let mut c = RunConfig::new(Command::VerifyPhiDoubling);
    c.gauge = "log:-0.75".into();
    out.push(c);
    let mut c = RunConfig::new(Command::VerifyDirect);
    c.p = Some(1.0);
    out.push(c);
    let mut c = RunConfig::new(Command::Carleson);
    c.measure = Some("power:0".into());
    out.push(c);
    let mut c = RunConfig::new(Command::DivergenceDemo);
    c.gauge = "pow:0.5".into();
    c.seed = 7;
    out.push(c);
    let mut c = RunConfig::new(Command::HyperbolicAudit);
    c.gauge = "pow:0.5".into();
    c.map = Some("scale:0.5".into());
    out.push(c);
    out
}

fn criterion_10() -> Outcome {
    let configs = determinism_configs();
    let render = |c: &RunConfig| -> Result<String, String> {
        let mut r = ok(build_report(c))?;
        r.config = Some(serde_json::to_value(c).map_err(|e| e.to_string())?);
        ok(r.to_json())
    };
    for c in &configs {
        let a = render(c)?;
        let b = render(c)?;
        ensure(a == b, format!("{} reports differ", c.command))?;
    }
    let a = criterion_outputs()?;
    let b = criterion_outputs()?;
    ensure(a == b, "criterion outputs differ between runs")?;
    Ok(format!("{} command reports and criteria 1-9 byte-identical", configs.len()))
}

fn criterion_outputs() -> Result<Vec<String>, String> {
    let runs: [fn() -> Outcome; 9] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ];
    runs.iter().map(|f| f()).collect()
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("quadrature vs closed form", criterion_1, Duration::from_secs(1)),
        ("psi lower bound", criterion_2, Duration::from_secs(5)),
        ("sign enumeration closed forms", criterion_3, Duration::from_secs(1)),
        ("reverse estimate", criterion_4, Duration::from_secs(30)),
        ("phi doubling", criterion_5, Duration::from_secs(1)),
        ("direct estimate", criterion_6, Duration::from_secs(30)),
        ("carleson threshold", criterion_7, Duration::from_secs(5)),
        ("l2 dichotomy and oscillation", criterion_8, Duration::from_secs(5)),
        ("hyperbolic audit", criterion_9, Duration::from_secs(10)),
        ("determinism", criterion_10, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {elapsed:.2?}, budget {budget:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {:>2} {name}: {detail} [{elapsed:.2?}]", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
