//! Analytic calibration energies.

use crate::energy::Energy;
use crate::error::{Error, Result};
use crate::hilbert::{Grid, GridFunction, InnerProductSpec};

/// `E ≡ 0`.
#[derive(Debug, Clone)]
pub struct Zero {
    space: InnerProductSpec,
}

impl Zero {
    pub fn new(grid: Grid) -> Self {
        Self {
            space: InnerProductSpec::trapezoidal(grid),
        }
    }
}

impl Energy for Zero {
    fn name(&self) -> String {
        "zero".into()
    }
    fn space(&self) -> &InnerProductSpec {
        &self.space
    }
    fn value(&self, _u: &GridFunction) -> f64 {
        0.0
    }
    fn omega(&self) -> f64 {
        0.0
    }
    fn solve_prox(&self, v: &GridFunction, _lambda: f64) -> Result<GridFunction> {
        Ok(v.clone())
    }
}

/// `E(u) = ½‖u‖²_H`; `prox(v, λ) = v/(1+λ)` and the flow is `e^{-t}u₀`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    space: InnerProductSpec,
}

impl Quadratic {
    pub fn new(grid: Grid) -> Self {
        Self {
            space: InnerProductSpec::trapezoidal(grid),
        }
    }
}

impl Energy for Quadratic {
    fn name(&self) -> String {
        format!("quadratic({})", self.space.grid().n())
    }
    fn space(&self) -> &InnerProductSpec {
        &self.space
    }
    fn value(&self, u: &GridFunction) -> f64 {
        0.5 * self.space.dot(u, u)
    }
    fn omega(&self) -> f64 {
        0.0
    }
    fn solve_prox(&self, v: &GridFunction, lambda: f64) -> Result<GridFunction> {
        Ok(v.scale(1.0 / (1.0 + lambda)))
    }
}

/// `E(u) = |u|^p / p` on the one-node grid. Its Łojasiewicz exponent at
/// the origin is `(p−1)/p`.
#[derive(Debug, Clone)]
pub struct Power {
    p: f64,
    space: InnerProductSpec,
}

impl Power {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("power energy needs p > 1, got {p}")));
        }
        Ok(Self {
            p,
            space: InnerProductSpec::trapezoidal(Grid::Point),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Solves `t + λ t^{p−1} = a` for `t ∈ [0, a]` by Newton's method
    /// safeguarded with bisection.
    fn shrink(&self, a: f64, lambda: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        let p = self.p;
        let phi = |t: f64| t + lambda * t.powf(p - 1.0) - a;
        let (mut lo, mut hi) = (0.0f64, a);
        // initial guess: the better of the linear and the power-dominated regime
        let mut t = (a / lambda).powf(1.0 / (p - 1.0)).min(a);
        for _ in 0..200 {
            let f = phi(t);
            if f == 0.0 {
                return t;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let df = 1.0 + lambda * (p - 1.0) * t.powf(p - 2.0);
            let mut next = t - f / df;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-16 * a.max(1e-300) || hi - lo <= 4.0 * f64::EPSILON * hi {
                return next;
            }
            t = next;
        }
        t
    }
}

impl Energy for Power {
    fn name(&self) -> String {
        format!("power({})", self.p)
    }
    fn space(&self) -> &InnerProductSpec {
        &self.space
    }
    fn value(&self, u: &GridFunction) -> f64 {
        u.values()[0].abs().powf(self.p) / self.p
    }
    fn omega(&self) -> f64 {
        0.0
    }
    fn solve_prox(&self, v: &GridFunction, lambda: f64) -> Result<GridFunction> {
        let x = v.values()[0];
        let t = self.shrink(x.abs(), lambda);
        Ok(GridFunction::from_parts(Grid::Point, vec![t.copysign(x)]))
    }
}
