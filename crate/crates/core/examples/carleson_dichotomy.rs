//! Finite or infinite Carleson integral for a few radial measures.
use blochlab::applications::{carleson_classify, carleson_partial_integrals, RadialMeasure};
use blochlab::Gauge;

fn main() -> blochlab::Result<()> {
    let g = Gauge::power(0.5)?;
    for text in ["power:0", "power:-0.5", "power:-1", "atom:0.9:2", "mix:[power:1,atom:0.5:1]"] {
        let rho: RadialMeasure = text.parse()?;
        let class = carleson_classify(&g, 2.0, &rho)?;
        let partials = carleson_partial_integrals(&g, 2.0, &rho, &[8, 32, 128])?;
        println!("{text:<26} {class:?}  partials {partials:?}");
    }
    Ok(())
}
