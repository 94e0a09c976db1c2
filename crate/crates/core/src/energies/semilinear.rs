//! Dirichlet energy plus a pointwise potential `∫F(u)`.

use std::sync::Arc;

use crate::energies::Dirichlet;
use crate::energy::{EnergyHandle, SumEnergy};
use crate::error::{Error, Result};
use crate::hilbert::{Grid, GridFunction, InnerProductSpec};

/// A scalar potential with globally Lipschitz derivative.
pub trait Well: Send + Sync {
    fn f(&self, s: f64) -> f64;
    fn df(&self, s: f64) -> f64;
    /// Lipschitz constant of `df`.
    fn lipschitz(&self) -> f64;
    fn name(&self) -> String;
}

/// `¼(1 − s²)²` on `|s| ≤ cutoff`, continued by its second-order Taylor
/// polynomial outside so that `F′` stays Lipschitz.
#[derive(Debug, Clone, Copy)]
pub struct DoubleWell {
    pub cutoff: f64,
}

impl Default for DoubleWell {
    fn default() -> Self {
        Self { cutoff: 2.0 }
    }
}

impl DoubleWell {
    fn core(s: f64) -> (f64, f64, f64) {
        let q = 1.0 - s * s;
        (0.25 * q * q, s * s * s - s, 3.0 * s * s - 1.0)
    }
}

impl Well for DoubleWell {
    fn f(&self, s: f64) -> f64 {
        let a = s.abs();
        if a <= self.cutoff {
            return Self::core(s).0;
        }
        let (f0, f1, f2) = Self::core(self.cutoff);
        let d = a - self.cutoff;
        f0 + f1 * d + 0.5 * f2 * d * d
    }

    fn df(&self, s: f64) -> f64 {
        let a = s.abs();
        if a <= self.cutoff {
            return Self::core(s).1;
        }
        let (_, f1, f2) = Self::core(self.cutoff);
        s.signum() * (f1 + f2 * (a - self.cutoff))
    }

    fn lipschitz(&self) -> f64 {
        // F″ = 3s² − 1 ranges over [−1, 3c² − 1] inside and is 3c² − 1 outside.
        (3.0 * self.cutoff * self.cutoff - 1.0).max(1.0)
    }

    fn name(&self) -> String {
        if self.cutoff == 2.0 {
            "double".into()
        } else {
            format!("double(cutoff={})", self.cutoff)
        }
    }
}

/// `F(s) = ½s²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HarmonicWell;

impl Well for HarmonicWell {
    fn f(&self, s: f64) -> f64 {
        0.5 * s * s
    }

    fn df(&self, s: f64) -> f64 {
        s
    }

    fn lipschitz(&self) -> f64 {
        1.0
    }

    fn name(&self) -> String {
        "harmonic".into()
    }
}

/// `½∫|∇u|² + ∫F(u)` on a 1-D grid of `n` nodes with `ω = L(F′)`.
pub fn semilinear_energy(n: usize, well: impl Well + 'static) -> Result<EnergyHandle> {
    semilinear_energy_on(Grid::line(n)?, Arc::new(well))
}

/// Same as [`semilinear_energy`] on an arbitrary 1-D or 2-D grid.
pub fn semilinear_energy_on(grid: Grid, well: Arc<dyn Well>) -> Result<EnergyHandle> {
    if grid.dim() == 0 {
        return Err(Error::InvalidGrid("semilinear energies need a 1-D or 2-D grid".into()));
    }
    let space = InnerProductSpec::trapezoidal(grid);
    let base: EnergyHandle = Arc::new(Dirichlet::new(grid));
    let label = format!("{} + well={}", base.name(), well.name());
    let lipschitz = well.lipschitz();
    let (wv, wg) = (well.clone(), well);
    let value = move |u: &GridFunction| {
        u.values().iter().zip(space.weights()).map(|(s, w)| w * wv.f(*s)).sum::<f64>()
    };
    let gradient = move |u: &GridFunction| u.map(|s| wg.df(s));
    Ok(Arc::new(SumEnergy::new(base, value, gradient, lipschitz, "well")?.with_name(label)))
}
