//! Integral means M_p(f, r) of a lacunary series and its Bloch-type norms.
use blochlab::means::{bloch_norm_estimate, hardy_bloch_norm_estimate, integral_mean, MeanOptions};
use blochlab::{ExponentRule, GapSeries, Gauge, RadialGrid};

fn main() -> blochlab::Result<()> {
    let g = Gauge::log(-0.5)?;
    let f = GapSeries::extremal(g, 16, ExponentRule::PowersOfTwo)?;
    let opts = MeanOptions::default();
    for p in [1.0, 2.0, 4.0] {
        let m = integral_mean(&f, p, 0.99, &opts)?;
        println!("M_{p}(f, 0.99) = {:.10} using {} angles", m.value, m.angles);
    }
    let grid = RadialGrid::dyadic(16)?;
    let b = bloch_norm_estimate(&f, &g, &grid);
    let hb = hardy_bloch_norm_estimate(&f, &g, 2.0, &grid, &opts)?;
    println!("Bloch {:.6} at r = {:.6}, Hardy-Bloch {:.6}", b.value, b.argmax_r, hb.value);
    Ok(())
}
