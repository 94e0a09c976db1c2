//! Oscillations that vanish in L² but keep their Dirichlet energy stay far
//! from zero in the energy metric.

use std::f64::consts::PI;

use subgradient_flow::energies::Dirichlet;
use subgradient_flow::energy::energy_metric;
use subgradient_flow::hilbert::{Grid, GridFunction};

fn main() -> subgradient_flow::Result<()> {
    println!("{:>5} {:>12} {:>12}", "n", "|u|", "d_E(u, 0)");
    for n in [33, 65, 129, 257, 513] {
        let k = (n - 1) as f64 / 4.0;
        let u = GridFunction::sample_1d(n, |x| (k * PI * x).sin() / k)?;
        let e = Dirichlet::new(Grid::line(n)?);
        let m = energy_metric(&e, &u, &GridFunction::zeros(u.grid()))?;
        println!("{n:>5} {:>12.4e} {:>12.6}", m.d, m.de);
    }
    Ok(())
}
