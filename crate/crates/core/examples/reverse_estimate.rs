//! Measured constant in the reverse (lower) integral estimate.
use blochlab::verify::{verify_reverse, ReverseConfig};
use blochlab::Gauge;

fn main() -> blochlab::Result<()> {
    let cfg = ReverseConfig { m_max: 12, ..ReverseConfig::default() };
    for g in [Gauge::constant(), Gauge::power(0.5)?] {
        for p in [1.0, 2.0] {
            let rep = verify_reverse(&g, p, &cfg)?;
            println!("{g} p = {p}: tau = {:.6e} with {} terms", rep.values["tau"], rep.values["terms"]);
        }
    }
    // eps = 0.8 breaks regularity for pow:0.5, so this is refused.
    let bad = Gauge::power(0.5)?.with_eps(0.8)?;
    if let Err(e) = verify_reverse(&bad, 1.0, &cfg) {
        println!("refused: {e}");
    }
    Ok(())
}
