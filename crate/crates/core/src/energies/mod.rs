//! Concrete energies with exact or certified proximal maps.

mod calibration;
mod dirichlet;
mod semilinear;
mod tv;

pub use calibration::{Power, Quadratic, Zero};
pub use dirichlet::Dirichlet;
pub use semilinear::{semilinear_energy, semilinear_energy_on, DoubleWell, HarmonicWell, Well};
pub use tv::{taut_string, TotalVariation};

use crate::hilbert::GridFunction;

/// Backward-Euler heat step: the prox of the Dirichlet energy.
pub fn dirichlet_prox(v: &GridFunction, lambda: f64) -> crate::Result<GridFunction> {
    use crate::energy::Energy;
    Dirichlet::new(v.grid()).prox(v, lambda)
}

/// Exact 1-D total-variation prox.
pub fn tv_prox(v: &GridFunction, lambda: f64) -> crate::Result<GridFunction> {
    use crate::energy::Energy;
    TotalVariation::new(v.grid())?.prox(v, lambda)
}
