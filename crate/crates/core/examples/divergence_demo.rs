//! Radial oscillation of the extremal series when the coefficients are not
//! square summable, and its absence when they are.
use blochlab::verify::divergence_demo;
use blochlab::Gauge;

fn main() -> blochlab::Result<()> {
    let rays = [0.0, 1.0, 2.5, 4.0];
    for g in [Gauge::constant(), Gauge::power(0.5)?] {
        let rep = divergence_demo(&g, &rays, 24)?;
        println!(
            "{g:<8} in L2: {}  final oscillation {:.4}",
            rep.values["in_l2"] != 0.0,
            rep.values["final_oscillation"]
        );
    }
    Ok(())
}
