//! Closed-form I(x) and Phi(x) for the built-in gauges, next to quadrature.
use blochlab::Gauge;

fn main() -> blochlab::Result<()> {
    for g in Gauge::builtins() {
        println!("{g}  ({:?})", g.classify_dichotomy());
        for x in [0.5, 1e-3, 1e-9] {
            let exact = g.quadratic_integral(x)?;
            let quad = g.quadratic_integral_quadrature(x)?;
            println!(
                "  x = {x:<8e} I = {:<22.15e} quad = {:<22.15e} Phi = {:.6}",
                exact.value_i, quad.value_i, exact.value_phi
            );
        }
    }
    Ok(())
}
