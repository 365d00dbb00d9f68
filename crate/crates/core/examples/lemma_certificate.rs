//! Lower bound for Psi(r) / Phi(1 - r) on dyadic radii, per gauge.
use blochlab::verify::verify_lemma31;
use blochlab::Gauge;

fn main() -> blochlab::Result<()> {
    for g in Gauge::builtins() {
        let rep = verify_lemma31(&g, 30)?;
        println!(
            "{g:<12} min ratio {:.6}  at origin {:.6}  checks ok: {}",
            rep.extremal_constant,
            rep.values["ratio_at_origin"],
            rep.all_checks_pass()
        );
    }
    Ok(())
}
