//! Batch front-end: one [`RunConfig`] runs one certification and writes
//! `<out>/<command>.json` and `<out>/<command>.csv`.
//!
//! Exit codes: `0` when the verdict holds, `2` when it is violated, `1` on
//! usage, parse, precondition or numeric errors.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::applications::{carleson_report, cor43_audit, AuditConfig, RadialMeasure, SelfMap};
use crate::gauge::Gauge;
use crate::lacunary::{default_order, l2_membership, ExponentRule, GapSeries};
use crate::means::{bloch_norm_estimate, dyadic_radius, RadialGrid};
use crate::report::{Check, EstimateReport, Extremum, GridPoint, Verdict};
use crate::stochastic::MomentMode;
use crate::verify::{self, ReverseConfig};
use crate::{Error, Result};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "BLOCHLAB_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    GaugeReport,
    ExtremalBuild,
    VerifyLemma31,
    VerifyReverse,
    VerifyDirect,
    VerifyHardyBloch,
    VerifyPhiDoubling,
    DivergenceDemo,
    Carleson,
    HyperbolicAudit,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::GaugeReport,
        Command::ExtremalBuild,
        Command::VerifyLemma31,
        Command::VerifyReverse,
        Command::VerifyDirect,
        Command::VerifyHardyBloch,
        Command::VerifyPhiDoubling,
        Command::DivergenceDemo,
        Command::Carleson,
        Command::HyperbolicAudit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::GaugeReport => "gauge-report",
            Command::ExtremalBuild => "extremal-build",
            Command::VerifyLemma31 => "verify-lemma31",
            Command::VerifyReverse => "verify-reverse",
            Command::VerifyDirect => "verify-direct",
            Command::VerifyHardyBloch => "verify-hardy-bloch",
            Command::VerifyPhiDoubling => "verify-phi-doubling",
            Command::DivergenceDemo => "divergence-demo",
            Command::Carleson => "carleson",
            Command::HyperbolicAudit => "hyperbolic-audit",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::parse(s, 0, "unknown command"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Mc,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "mc" => Ok(Mode::Mc),
            _ => Err(Error::parse(s, 0, "expected `exact` or `mc`")),
        }
    }
}

/// Everything a run needs. Unset options fall back to per-command defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub gauge: String,
    pub omega2: Option<String>,
    pub measure: Option<String>,
    pub map: Option<String>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub m_min: Option<u32>,
    pub m_max: Option<u32>,
    pub angles: Option<usize>,
    #[serde(rename = "K")]
    pub terms: Option<usize>,
    pub seed: u64,
    pub mode: Mode,
    pub samples: Option<usize>,
    pub rule: Option<String>,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            gauge: "const".into(),
            omega2: None,
            measure: None,
            map: None,
            p: None,
            q: None,
            m_min: None,
            m_max: None,
            angles: None,
            terms: None,
            seed: 0,
            mode: Mode::Exact,
            samples: None,
            rule: None,
            out: PathBuf::from("out"),
        }
    }

    fn grid(&self, m_max: u32, angles: usize) -> Result<RadialGrid> {
        RadialGrid::new(
            self.m_min.unwrap_or(1),
            self.m_max.unwrap_or(m_max),
            self.angles.unwrap_or(angles),
        )
    }

    fn rule(&self) -> Result<ExponentRule> {
        self.rule.as_deref().map_or(Ok(ExponentRule::PowersOfTwo), str::parse)
    }

    fn required<'a>(value: &'a Option<String>, flag: &str) -> Result<&'a str> {
        value
            .as_deref()
            .ok_or_else(|| Error::Domain(format!("--{flag} is required for this command")))
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: EstimateReport,
    pub exit_code: i32,
    pub json_path: PathBuf,
    pub csv_path: PathBuf,
}

/// Sizes the global thread pool from [`THREADS_ENV`] when set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::parse(&value, 0, format!("{THREADS_ENV} must be a positive integer")))?;
    // A pool that is already built keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs one command, writes its report files and returns the exit code.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let mut report = build_report(config)?;
    report.config = Some(serde_json::to_value(config)?);
    let (json_path, csv_path) = report.write(&config.out, config.command.name())?;
    let exit_code = if report.verdict.holds() { 0 } else { 2 };
    Ok(RunOutcome {
        report,
        exit_code,
        json_path,
        csv_path,
    })
}

/// The report a config describes, without writing files.
pub fn build_report(config: &RunConfig) -> Result<EstimateReport> {
    let gauge: Gauge = config.gauge.parse()?;
    let mut report = match config.command {
        Command::GaugeReport => gauge_report(&gauge, config.m_min.unwrap_or(1), config.m_max.unwrap_or(30))?,
        Command::ExtremalBuild => extremal_build(config, &gauge)?,
        Command::VerifyLemma31 => verify::verify_lemma31(&gauge, config.m_max.unwrap_or(20))?,
        Command::VerifyReverse => {
            let mode = match config.mode {
                Mode::Exact => MomentMode::Exact,
                Mode::Mc => MomentMode::MonteCarlo {
                    seed: config.seed,
                    samples: config.samples.unwrap_or(100_000),
                },
            };
            let cfg = ReverseConfig {
                m_max: config.m_max.unwrap_or(20),
                terms: config.terms,
                angles: config.angles.unwrap_or(16),
                mode,
            };
            verify::verify_reverse(&gauge, config.p.unwrap_or(1.0), &cfg)?
        }
        Command::VerifyDirect | Command::VerifyHardyBloch => {
            let grid = config.grid(16, 16)?;
            let series = extremal_series(config, &gauge, grid.r_max())?;
            let p = config.p.unwrap_or(2.0);
            let mut r = if config.command == Command::VerifyDirect {
                verify::verify_direct(&gauge, &series, p, &grid)?
            } else {
                verify::verify_hardy_bloch(&gauge, &series, p, &grid)?
            };
            r.provenance.truncation = Some(series.order());
            r
        }
        Command::VerifyPhiDoubling => verify::verify_phi_doubling(&gauge, &verify::doubling_grid(1000))?,
        Command::DivergenceDemo => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let rays: Vec<f64> = (0..8).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect();
            let mut r = verify::divergence_demo(&gauge, &rays, config.m_max.unwrap_or(20))?;
            r.provenance.seed = Some(config.seed);
            r
        }
        Command::Carleson => {
            let rho: RadialMeasure = RunConfig::required(&config.measure, "measure")?.parse()?;
            carleson_report(&gauge, config.q.unwrap_or(2.0), &rho, config.m_max.unwrap_or(20))?
        }
        Command::HyperbolicAudit => {
            let map: SelfMap = RunConfig::required(&config.map, "map")?.parse()?;
            let big_omega: Gauge = config.omega2.as_deref().unwrap_or("const").parse()?;
            let cfg = AuditConfig {
                p: config.p.unwrap_or(1.0),
                grid: config.grid(12, 64)?,
            };
            cor43_audit(&map, &gauge, &big_omega, &cfg)?
        }
    };
    if report.provenance.seed.is_none() && config.mode == Mode::Mc {
        report.provenance.seed = Some(config.seed);
    }
    Ok(report)
}

fn extremal_series(config: &RunConfig, gauge: &Gauge, r_max: f64) -> Result<GapSeries> {
    let rule = config.rule()?;
    let order = config.terms.unwrap_or_else(|| default_order(gauge, rule, r_max));
    GapSeries::extremal(*gauge, order, rule)
}

/// Closed form against quadrature for `I_ω(2^{-m})`, plus the regularity scan.
pub fn gauge_report(gauge: &Gauge, m_min: u32, m_max: u32) -> Result<EstimateReport> {
    if m_min == 0 || m_min > m_max || m_max > 60 {
        return Err(Error::Domain(format!("need 1 <= m_min <= m_max <= 60, got {m_min}..={m_max}")));
    }
    let mut points = Vec::new();
    let mut worst = 0.0f64;
    for m in m_min..=m_max {
        let x = 0.5f64.powi(m as i32);
        let closed = gauge.quadratic_integral(x)?.value_i;
        let quad = gauge.quadratic_integral_quadrature(x)?.value_i;
        worst = worst.max((closed - quad).abs());
        points.push(GridPoint::new(x, None, closed, quad));
    }
    let regularity = gauge.check_regularity_dyadic(40);
    let mut checks = vec![Check {
        name: "closed-form-vs-quadrature".into(),
        passed: worst <= 1e-9,
        detail: format!("largest absolute difference {worst:e}"),
    }];
    for c in &regularity.conditions {
        checks.push(Check {
            name: c.name.clone(),
            passed: c.passed,
            detail: match c.first_violation {
                Some((a, b)) => format!("first violation between t = {a} and t = {b}"),
                None => "holds on the dyadic grid down to 2^-40".into(),
            },
        });
    }
    let ok = checks.iter().all(|c| c.passed);
    let verdict = if ok {
        Verdict::Holds { constant: worst }
    } else {
        let failed = checks.iter().find(|c| !c.passed).expect("a failed check");
        Verdict::Violated {
            r: 0.0,
            theta: None,
            detail: format!("{}: {}", failed.name, failed.detail),
        }
    };
    let mut report = EstimateReport::new(
        "gauge-report",
        gauge.to_string(),
        format!("x = 2^-m, m = {m_min}..={m_max}"),
        Extremum::Max,
        points,
        verdict,
    );
    report.checks = checks;
    report.values.insert("eps".into(), gauge.eps());
    report.values.insert("max_abs_difference".into(), worst);
    if let Some(limit) = gauge.integral_at_zero() {
        report.values.insert("integral_at_zero".into(), limit);
    }
    report.provenance.tolerances.insert("closed_vs_quadrature".into(), 1e-9);
    Ok(report)
}

fn extremal_build(config: &RunConfig, gauge: &Gauge) -> Result<EstimateReport> {
    let grid = config.grid(20, 16)?;
    let series = extremal_series(config, gauge, grid.r_max())?;
    let norm = bloch_norm_estimate(&series, gauge, &grid);
    let points: Vec<GridPoint> = grid
        .depths()
        .map(|m| {
            let r = dyadic_radius(m);
            let v = series.eval(num_complex::Complex64::new(r, 0.0)).map(|v| v.value.norm());
            v.map(|v| GridPoint::new(r, Some(0.0), v, gauge.phi(1.0 - r).sqrt()))
        })
        .collect::<Result<_>>()?;
    let mut report = EstimateReport::new(
        "extremal-build",
        gauge.to_string(),
        grid.describe(),
        Extremum::Max,
        points,
        Verdict::Holds { constant: norm.value },
    );
    report.values.insert("bloch_norm_grid_sup".into(), norm.value);
    report.values.insert("K".into(), series.order() as f64);
    report.values.insert(
        "l2_member".into(),
        if l2_membership(gauge).is_in_l2() { 1.0 } else { 0.0 },
    );
    report.provenance.truncation = Some(series.order());
    report.provenance.notes.push(serde_json::to_string(&series.record())?);
    Ok(report)
}
