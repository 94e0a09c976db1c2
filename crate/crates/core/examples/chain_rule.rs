//! Θ′(E)·∂E is a subgradient of Θ∘E.

use subgradient_flow::analysis::{chain_rule_check, KlProfile};
use subgradient_flow::energies::Power;
use subgradient_flow::hilbert::GridFunction;

fn main() -> subgradient_flow::Result<()> {
    let p: f64 = 4.0;
    let theta = (p - 1.0) / p;
    let profile = KlProfile::new(theta, p.powf(-theta), 0.0)?;
    let e = Power::new(p)?;
    for u in [-1.5, -0.3, 0.2, 1.0, 2.5] {
        let r = chain_rule_check(&e, &profile, &GridFunction::scalar(u)?)?;
        println!(
            "u = {u:+.2}: composite gradient {:+.10}, probe defect {:.1e}",
            r.composite_element.values()[0],
            r.max_defect
        );
    }
    Ok(())
}
