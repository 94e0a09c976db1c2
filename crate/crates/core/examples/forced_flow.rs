//! A forcing pulse raises the energy while the forced energy H keeps
//! decreasing.

use subgradient_flow::energies::Quadratic;
use subgradient_flow::flow::{discrete_h, run, FlowConfig, Forcing};
use subgradient_flow::hilbert::{Grid, GridFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Grid::line(33)?;
    let e = Quadratic::new(g);
    let pulse = Forcing::pulse(GridFunction::sample(g, |x, _| 2.0 - x)?, 0.0, 1.0)?;
    let cfg = FlowConfig::new(1e-2, 3.0).with_forcing(pulse);
    let traj = run(&e, &GridFunction::zeros(g), &cfg)?;
    for k in [0, 50, 100, 150, 300] {
        println!("t = {:<4} E = {:.6} H = {:.6}", traj.times[k], traj.energies[k], traj.h_values[k]);
    }
    let h = discrete_h(&traj, &cfg);
    println!("H non-increasing: {} (worst excess {:.1e})", h.decreasing, h.worst_excess);
    Ok(())
}
