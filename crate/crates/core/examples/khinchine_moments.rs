//! Moments of a Rademacher-signed family, exact and Monte Carlo, against the
//! square function.
use blochlab::{Complex64, Gauge, MomentMode, RademacherFamily};

fn main() -> blochlab::Result<()> {
    let fam = RademacherFamily::extremal(Gauge::constant(), 14)?;
    let z = Complex64::from_polar(0.99, 0.3);
    let s = fam.quadratic_sum(z)?;
    for p in [0.5, 1.0, 2.0] {
        let exact = fam.moment_integral(z, p, MomentMode::Exact)?;
        let mc = fam.moment_integral(z, p, MomentMode::MonteCarlo { seed: 7, samples: 50_000 })?;
        println!(
            "p = {p}: exact {:.8}  mc {:.8} +- {:.1e}  S^p {:.8}",
            exact.value,
            mc.value,
            mc.std_error,
            s.powf(p)
        );
    }
    Ok(())
}
