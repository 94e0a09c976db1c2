//! Heat flow inside the box 0 <= u <= 1.

use std::f64::consts::PI;
use std::sync::Arc;

use subgradient_flow::energies::Dirichlet;
use subgradient_flow::energy::{constrained_energy, BoxConstraint};
use subgradient_flow::flow::{run, FlowConfig};
use subgradient_flow::hilbert::{Grid, GridFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Grid::line(65)?;
    let e = constrained_energy(Arc::new(Dirichlet::new(g)), Arc::new(BoxConstraint::new(0.0, 1.0)?), &GridFunction::constant(g, 0.5))?;
    let u0 = GridFunction::sample_1d(65, |x| (x + 0.4 * (2.0 * PI * x).cos()).clamp(0.0, 1.0))?;
    let traj = run(e.as_ref(), &u0, &FlowConfig::new(1e-3, 2.0))?;
    for (k, u) in traj.states.iter().step_by(500) {
        println!("t = {:<5} E = {:.6e} range [{:.4}, {:.4}]", traj.times[*k], traj.energies[*k], u.min(), u.max());
    }
    Ok(())
}
