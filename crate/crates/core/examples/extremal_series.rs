//! Builds the extremal gap series of a gauge and evaluates it near the circle.
use blochlab::{Complex64, ExponentRule, GapSeries, Gauge};

fn main() -> blochlab::Result<()> {
    let g = Gauge::power(0.5)?;
    let f = GapSeries::extremal_for_radius(g, ExponentRule::PowersOfTwo, 0.999)?;
    println!("{g}: K = {}, first coefficients {:?}", f.order(), &f.coeffs()[..4]);
    for r in [0.5, 0.9, 0.99, 0.999] {
        let v = f.eval(Complex64::new(r, 0.0))?;
        println!("  f({r}) = {:.10}  (tail <= {:.1e})", v.value.re, v.tail_bound);
    }
    println!("{}", serde_json::to_string(&f.record()).expect("record serializes"));
    Ok(())
}
