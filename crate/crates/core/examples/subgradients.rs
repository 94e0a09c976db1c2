//! Slopes from the Moreau–Yosida ladder and probed subgradient checks.

use subgradient_flow::energies::TotalVariation;
use subgradient_flow::energy::{check_subgradient, moreau_yosida_ladder, Energy};
use subgradient_flow::hilbert::{Grid, GridFunction};

fn main() -> subgradient_flow::Result<()> {
    let tv = TotalVariation::new(Grid::line(32)?)?;
    let u = GridFunction::sample_1d(32, |x| if x < 0.5 { 0.0 } else { 1.0 })?;
    let est = moreau_yosida_ladder(&tv, &u, 1e-10)?;
    println!("TV(u) = {}", tv.value(&u));
    println!("slope = {:.10} after {} refinements", est.slope, est.lambdas.len());

    let good = check_subgradient(&tv, &u, &est.selection, 16);
    println!("minimal selection accepted: {} (worst violation {:.2e})", good.tested, good.worst_violation);
    let bad = check_subgradient(&tv, &u, &est.selection.scale(-1.0), 16);
    println!("negated selection accepted: {} (worst violation {:.2e})", bad.tested, bad.worst_violation);
    Ok(())
}
