//! Audits a few self-maps of the disc against a convergent/divergent gauge pair.
use blochlab::applications::{cor43_audit, AuditConfig, SelfMap};
use blochlab::{Gauge, RadialGrid};

fn main() -> blochlab::Result<()> {
    let omega = Gauge::power(0.5)?;
    let big_omega = Gauge::log(-0.5)?;
    let cfg = AuditConfig { p: 1.0, grid: RadialGrid::new(1, 10, 64)? };
    for text in ["scale:0.5", "moebius:0.3+0.2i", "atomic:1", "scale:1"] {
        let map: SelfMap = text.parse()?;
        let rep = cor43_audit(&map, &omega, &big_omega, &cfg)?;
        println!("{text:<18} holds: {:<5} {:?}", rep.verdict.holds(), rep.values.get("sup_phi_integral"));
    }
    Ok(())
}
