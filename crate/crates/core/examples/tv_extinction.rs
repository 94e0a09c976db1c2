//! TV flow of a step reaches a constant in finite time.

use subgradient_flow::energies::TotalVariation;
use subgradient_flow::flow::{run, FlowConfig};
use subgradient_flow::hilbert::{Grid, GridFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tv = TotalVariation::new(Grid::line(64)?)?;
    let u0 = GridFunction::sample_1d(64, |x| if x < 0.5 { 0.0 } else { 1.0 })?;
    for tau in [1e-2, 1e-3, 1e-4] {
        let traj = run(&tv, &u0, &FlowConfig::new(tau, 0.4))?;
        let t = traj.extinction_time(0.0).map_or("none".into(), |t| format!("{t:.4}"));
        println!("tau = {tau:<7} extinction at t = {t}, final state {}", traj.final_state().values()[0]);
    }
    Ok(())
}
