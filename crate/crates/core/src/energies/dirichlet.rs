//! The Dirichlet energy `½∫|∇u|²` with natural (Neumann) boundary conditions.

use crate::energy::Energy;
use crate::error::{Error, Result};
use crate::hilbert::{forward_difference_energy_quadratic_form, Grid, GridFunction, InnerProductSpec};

/// Relative residual for the 2-D conjugate-gradient prox solve.
const CG_TOL: f64 = 1e-12;

/// `E(u) = ½ ⟨K u, u⟩` where `K` is the forward-difference stiffness
/// matrix (tridiagonal in 1-D, `K₁⊗M₁ + M₁⊗K₁` in 2-D) and `M` the
/// diagonal trapezoidal mass. The `H`-gradient `M⁻¹K` is the standard
/// Neumann Laplacian (with a sign flip), so constants span its kernel.
#[derive(Debug, Clone)]
pub struct Dirichlet {
    space: InnerProductSpec,
}

impl Dirichlet {
    pub fn new(grid: Grid) -> Self {
        Self {
            space: InnerProductSpec::trapezoidal(grid),
        }
    }

    pub fn grid(&self) -> Grid {
        self.space.grid()
    }

    /// Euclidean stiffness action `K u`.
    pub fn stiffness(&self, u: &GridFunction) -> GridFunction {
        let grid = self.grid();
        let v = u.values();
        let mut out = vec![0.0; v.len()];
        match grid {
            Grid::Point => {}
            Grid::Line(n) => {
                let ih = 1.0 / grid.h();
                for i in 0..n - 1 {
                    let d = (v[i + 1] - v[i]) * ih;
                    out[i] -= d;
                    out[i + 1] += d;
                }
            }
            Grid::Square(n) => {
                let ih = 1.0 / grid.h();
                let w1 = |i: usize| if i == 0 || i + 1 == n { 0.5 * grid.h() } else { grid.h() };
                for a in 0..n {
                    let wa = w1(a) * ih;
                    for b in 0..n - 1 {
                        // along x in row a
                        let (l, r) = (a * n + b, a * n + b + 1);
                        let d = (v[r] - v[l]) * wa;
                        out[l] -= d;
                        out[r] += d;
                        // along y in column a
                        let (lo, hi) = (b * n + a, (b + 1) * n + a);
                        let d = (v[hi] - v[lo]) * wa;
                        out[lo] -= d;
                        out[hi] += d;
                    }
                }
            }
        }
        GridFunction::from_parts(grid, out)
    }

    /// `M⁻¹K u`, the `H`-gradient of the energy (the negative discrete
    /// Neumann Laplacian).
    pub fn laplacian(&self, u: &GridFunction) -> GridFunction {
        let k = self.stiffness(u);
        let w = self.space.weights();
        GridFunction::from_parts(
            u.grid(),
            k.values().iter().zip(w).map(|(a, b)| a / b).collect(),
        )
    }

    fn solve_tridiagonal(&self, v: &GridFunction, lambda: f64) -> Result<GridFunction> {
        let grid = self.grid();
        let n = grid.len();
        let w = self.space.weights();
        let c = lambda / grid.h();
        let diag = |i: usize| w[i] + c * if i == 0 || i + 1 == n { 1.0 } else { 2.0 };
        let rhs: Vec<f64> = v.values().iter().zip(w).map(|(a, b)| a * b).collect();
        // Thomas algorithm; off-diagonals are all −c.
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        let mut denom = diag(0);
        cp[0] = -c / denom;
        dp[0] = rhs[0] / denom;
        for i in 1..n {
            denom = diag(i) + c * cp[i - 1];
            if !(denom > 0.0) {
                return Err(Error::InvalidParameter(format!("tridiagonal solve broke down at row {i}")));
            }
            cp[i] = -c / denom;
            dp[i] = (rhs[i] + c * dp[i - 1]) / denom;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        GridFunction::new(grid, x)
    }

    fn solve_cg(&self, v: &GridFunction, lambda: f64) -> Result<GridFunction> {
        let grid = self.grid();
        let w = self.space.weights();
        let apply = |x: &GridFunction| -> Vec<f64> {
            let k = self.stiffness(x);
            x.values()
                .iter()
                .zip(k.values())
                .zip(w)
                .map(|((xi, ki), wi)| wi * xi + lambda * ki)
                .collect()
        };
        // Jacobi preconditioner: diagonal of M + λK.
        let unit_diag = self.stiffness_diagonal();
        let pre: Vec<f64> = w.iter().zip(&unit_diag).map(|(wi, ki)| 1.0 / (wi + lambda * ki)).collect();
        let b: Vec<f64> = v.values().iter().zip(w).map(|(a, b)| a * b).collect();
        let bnorm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut x = v.values().to_vec();
        let ax = apply(&GridFunction::from_parts(grid, x.clone()));
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let mut z: Vec<f64> = r.iter().zip(&pre).map(|(a, b)| a * b).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let mut history = Vec::new();
        for _ in 0..(10 * grid.len()).max(100) {
            let rnorm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            if rnorm <= CG_TOL * bnorm || rnorm == 0.0 {
                return GridFunction::new(grid, x);
            }
            history.push(rnorm / bnorm.max(f64::MIN_POSITIVE));
            let ap = apply(&GridFunction::from_parts(grid, p.clone()));
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if !(pap > 0.0) {
                return Err(Error::ProxNotConverged { residuals: history });
            }
            let alpha = rz / pap;
            for i in 0..x.len() {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            for i in 0..z.len() {
                z[i] = r[i] * pre[i];
            }
            let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..p.len() {
                p[i] = z[i] + beta * p[i];
            }
        }
        let tail = history.len().saturating_sub(16);
        Err(Error::ProxNotConverged {
            residuals: history[tail..].to_vec(),
        })
    }

    fn stiffness_diagonal(&self) -> Vec<f64> {
        let grid = self.grid();
        match grid {
            Grid::Point => vec![0.0],
            Grid::Line(n) => (0..n)
                .map(|i| if i == 0 || i + 1 == n { 1.0 } else { 2.0 } / grid.h())
                .collect(),
            Grid::Square(n) => {
                let h = grid.h();
                let w1 = |i: usize| if i == 0 || i + 1 == n { 0.5 * h } else { h };
                let deg = |i: usize| if i == 0 || i + 1 == n { 1.0 } else { 2.0 };
                (0..n * n)
                    .map(|idx| {
                        let (iy, ix) = (idx / n, idx % n);
                        (w1(iy) * deg(ix) + w1(ix) * deg(iy)) / h
                    })
                    .collect()
            }
        }
    }
}

impl Energy for Dirichlet {
    fn name(&self) -> String {
        match self.grid() {
            Grid::Square(n) => format!("dirichlet2d({n})"),
            g => format!("dirichlet1d({})", g.n()),
        }
    }

    fn space(&self) -> &InnerProductSpec {
        &self.space
    }

    fn value(&self, u: &GridFunction) -> f64 {
        forward_difference_energy_quadratic_form(u)
    }

    fn omega(&self) -> f64 {
        0.0
    }

    /// Solves `(M + λK) u = M v`.
    fn solve_prox(&self, v: &GridFunction, lambda: f64) -> Result<GridFunction> {
        match self.grid() {
            Grid::Point => Ok(v.clone()),
            Grid::Line(_) => self.solve_tridiagonal(v, lambda),
            Grid::Square(_) => self.solve_cg(v, lambda),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn residual(e: &Dirichlet, u: &GridFunction, v: &GridFunction, lambda: f64) -> f64 {
        let w = e.space().weights();
        let k = e.stiffness(u);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..u.len() {
            let lhs = w[i] * u.values()[i] + lambda * k.values()[i];
            let rhs = w[i] * v.values()[i];
            num += (lhs - rhs).powi(2);
            den += rhs * rhs;
        }
        (num / den).sqrt()
    }

    #[test]
    fn stiffness_matches_energy() {
        for grid in [Grid::Line(23), Grid::Square(9)] {
            let e = Dirichlet::new(grid);
            let u = GridFunction::sample(grid, |x, y| (3.0 * x).sin() + x * y * y).unwrap();
            let quad: f64 = 0.5 * u.values().iter().zip(e.stiffness(&u).values()).map(|(a, b)| a * b).sum::<f64>();
            assert!((quad - e.value(&u)).abs() < 1e-12);
            let c = GridFunction::constant(grid, 2.0);
            assert!(e.stiffness(&c).values().iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn constants_are_fixed_points() {
        for grid in [Grid::Line(17), Grid::Square(7)] {
            let c = GridFunction::constant(grid, -1.25);
            let u = Dirichlet::new(grid).prox(&c, 0.3).unwrap();
            assert!(u.max_abs_diff(&c) < 1e-13);
        }
    }

    #[test]
    fn prox_preserves_mean_and_solves_system() {
        for grid in [Grid::Line(41), Grid::Square(11)] {
            let e = Dirichlet::new(grid);
            let v = GridFunction::sample(grid, |x, y| (7.0 * x).sin() + (y - 0.3).abs()).unwrap();
            for lambda in [1e-4, 1e-2, 1.0] {
                let u = e.prox(&v, lambda).unwrap();
                assert!((e.space().mean(&u) - e.space().mean(&v)).abs() < 1e-12);
                assert!(residual(&e, &u, &v, lambda) <= 1e-12, "{grid} {lambda}");
            }
        }
    }

    #[test]
    fn cosine_mode_decays_by_discrete_eigenvalue() {
        let n = 201;
        let grid = Grid::Line(n);
        let h = grid.h();
        let mu = 4.0 * (PI * h / 2.0).sin().powi(2) / (h * h);
        let v = GridFunction::sample_1d(n, |x| (PI * x).cos()).unwrap();
        let lambda = 0.1;
        let u = Dirichlet::new(grid).prox(&v, lambda).unwrap();
        assert!(u.max_abs_diff(&v.scale(1.0 / (1.0 + lambda * mu))) < 1e-12);
        assert!(u.max_abs_diff(&v.scale(1.0 / (1.0 + lambda * PI * PI))) < 2e-3);
    }
}
