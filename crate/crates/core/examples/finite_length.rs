//! The trajectory length after any time is bounded by the KL profile of the
//! remaining energy gap.

use subgradient_flow::analysis::{finite_length_certificate, fit_kl_profile};
use subgradient_flow::energies::Dirichlet;
use subgradient_flow::flow::{run, FlowConfig};
use subgradient_flow::hilbert::{Grid, GridFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = Dirichlet::new(Grid::line(65)?);
    let u0 = GridFunction::sample_1d(65, |x| x * x * (3.0 - 2.0 * x))?;
    let traj = run(&e, &u0, &FlowConfig::new(1e-3, 5.0))?;
    let fit = fit_kl_profile(&traj, None)?;
    let cert = finite_length_certificate(&traj, &fit.profile, fit.window.clone());
    println!("theta = {:.4}, window rows {:?}", fit.profile.theta, fit.window);
    println!("length in window {:.6} <= bound {:.6}: {}", cert.window_length, cert.bound, cert.pass);
    for t in [0.0, 0.1, 0.5, 1.0] {
        println!("length after t = {t}: {:.6e}", cert.tail_length_after(t));
    }
    Ok(())
}
