//! Fitting the Łojasiewicz exponent along power-law flows.

use subgradient_flow::analysis::fit_kl_profile;
use subgradient_flow::energies::Power;
use subgradient_flow::flow::{run, FlowConfig};
use subgradient_flow::hilbert::GridFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>4} {:>10} {:>10} {:>10}", "p", "theta", "expected", "margin");
    for p in [2.0, 3.0, 4.0, 6.0] {
        let t_end = if p == 2.0 { 20.0 } else { 200.0 };
        let cfg = FlowConfig::new(1e-3, t_end).with_record_every(10);
        let traj = run(&Power::new(p)?, &GridFunction::scalar(1.0)?, &cfg)?;
        let fit = fit_kl_profile(&traj, None)?;
        println!("{p:>4} {:>10.5} {:>10.5} {:>10.4}", fit.profile.theta, (p - 1.0) / p, fit.margin_min);
    }
    Ok(())
}
