//! Heat flow from u0 = x settles at its mean.

use subgradient_flow::analysis::omega_limit_report;
use subgradient_flow::energies::Dirichlet;
use subgradient_flow::energy::Energy;
use subgradient_flow::flow::{run, FlowConfig};
use subgradient_flow::hilbert::{Grid, GridFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = Dirichlet::new(Grid::line(129)?);
    let u0 = GridFunction::sample_1d(129, |x| x)?;
    let traj = run(&e, &u0, &FlowConfig::new(1e-3, 3.0))?;
    for k in [0, 100, 500, 1000, 3000] {
        println!("t = {:<5} E = {:.6e}", traj.times[k], traj.energies[k]);
    }
    let om = omega_limit_report(&traj, &e, 0.2)?;
    println!(
        "converged {} to mean {:.12} (initial mean {:.12}), slope at limit {:.1e}",
        om.converged,
        e.space().mean(&om.candidate_phi),
        e.space().mean(&u0),
        om.slope_at_phi.unwrap_or(f64::NAN)
    );
    Ok(())
}
