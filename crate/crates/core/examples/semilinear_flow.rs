//! Allen–Cahn type flow with a double-well potential.

use std::f64::consts::PI;

use subgradient_flow::analysis::{analyze, AnalysisOptions};
use subgradient_flow::energies::{semilinear_energy, DoubleWell};
use subgradient_flow::flow::{run, FlowConfig};
use subgradient_flow::hilbert::GridFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = semilinear_energy(65, DoubleWell::default())?;
    println!("{} with omega = {}", e.name(), e.omega());
    for a in [0.6, -0.2] {
        let u0 = GridFunction::sample_1d(65, |x| a + 0.3 * (PI * x).cos())?;
        let traj = run(e.as_ref(), &u0, &FlowConfig::new(1e-2, 20.0))?;
        let phi = traj.final_state();
        let report = analyze(&traj, e.as_ref(), &AnalysisOptions::default());
        let om = report.omega.expect("omega section");
        println!(
            "mean {a:+}: limit in [{:.6}, {:.6}], E = {:.3e}, converged {}",
            phi.min(),
            phi.max(),
            om.energy_at_phi,
            om.converged
        );
    }
    Ok(())
}
