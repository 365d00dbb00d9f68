use std::path::PathBuf;
use std::process::ExitCode;

use blochlab::cli::{configure_threads, run, Command, Mode, RunConfig};
use clap::error::ErrorKind;
use clap::Parser;

/// Numerical certifications for weighted Bloch spaces on the unit disk.
#[derive(Parser, Debug)]
#[command(name = "blochlab", version)]
struct Args {
    /// gauge-report | extremal-build | verify-lemma31 | verify-reverse | verify-direct |
    /// verify-hardy-bloch | verify-phi-doubling | divergence-demo | carleson | hyperbolic-audit
    command: String,
    /// Gauge: const, pow:ALPHA, log:BETA, optionally ;eps=E
    #[arg(long, default_value = "const")]
    gauge: String,
    /// Second gauge (Omega) for hyperbolic-audit
    #[arg(long)]
    omega2: Option<String>,
    /// Radial measure: power:B, atom:R0:MASS, mix:[...]
    #[arg(long)]
    measure: Option<String>,
    /// Self-map: scale:C, moebius:A, blaschke:[A1,...], atomic:C
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long = "mmin")]
    m_min: Option<u32>,
    #[arg(long = "mmax")]
    m_max: Option<u32>,
    #[arg(long)]
    angles: Option<usize>,
    /// Truncation: series order, or number of randomized terms for verify-reverse
    #[arg(long = "K")]
    terms: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// exact | mc
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Monte Carlo sample count
    #[arg(long)]
    samples: Option<usize>,
    /// Exponent rule for extremal series: 2^k | 2^k-1
    #[arg(long)]
    rule: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn config(args: Args) -> blochlab::Result<RunConfig> {
    let command: Command = args.command.parse()?;
    let mode: Mode = args.mode.parse()?;
    Ok(RunConfig {
        command,
        gauge: args.gauge,
        omega2: args.omega2,
        measure: args.measure,
        map: args.map,
        p: args.p,
        q: args.q,
        m_min: args.m_min,
        m_max: args.m_max,
        angles: args.angles,
        terms: args.terms,
        seed: args.seed,
        mode,
        samples: args.samples,
        rule: args.rule,
        out: args.out,
    })
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let outcome = configure_threads().and_then(|_| config(args)).and_then(|c| run(&c));
    match outcome {
        Ok(o) => {
            let status = if o.exit_code == 0 { "holds" } else { "violated" };
            println!(
                "{}: {} (constant {}) -> {}",
                o.report.name,
                status,
                o.report.extremal_constant,
                o.json_path.display()
            );
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("blochlab: {e}");
            ExitCode::from(1)
        }
    }
}
