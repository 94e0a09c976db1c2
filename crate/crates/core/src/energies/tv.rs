//! One-dimensional total variation and its exact proximal map.

use crate::energy::Energy;
use crate::error::{Error, Result};
use crate::hilbert::{Grid, GridFunction, InnerProductSpec};

/// `TV(u) = Σ |u_{i+1} − u_i|` on a uniform 1-D grid.
#[derive(Debug, Clone)]
pub struct TotalVariation {
    space: InnerProductSpec,
}

impl TotalVariation {
    pub fn new(grid: Grid) -> Result<Self> {
        match grid {
            Grid::Line(_) => Ok(Self {
                space: InnerProductSpec::trapezoidal(grid),
            }),
            other => Err(Error::InvalidGrid(format!("total variation is only available on 1-D grids, got {other}"))),
        }
    }
}

impl Energy for TotalVariation {
    fn name(&self) -> String {
        format!("tv1d({})", self.space.grid().n())
    }

    fn space(&self) -> &InnerProductSpec {
        &self.space
    }

    fn value(&self, u: &GridFunction) -> f64 {
        u.values().windows(2).map(|p| (p[1] - p[0]).abs()).sum()
    }

    fn omega(&self) -> f64 {
        0.0
    }

    fn solve_prox(&self, v: &GridFunction, lambda: f64) -> Result<GridFunction> {
        GridFunction::new(v.grid(), taut_string(v.values(), self.space.weights(), lambda))
    }
}

/// Minimizer of `Σ|u_{i+1} − u_i| + Σ w_i (u_i − v_i)² / (2λ)`.
///
/// With `X_k = Σ_{i<k} w_i` and `S_k = Σ_{i<k} w_i v_i`, the cumulative sums
/// `U_k = Σ_{i<k} w_i u_i` of the minimizer trace the shortest path from
/// `(0, 0)` to `(X_n, S_n)` inside the tube `|U_k − S_k| ≤ λ`; `u_i` is the
/// slope of that path over `[X_i, X_{i+1}]`.
pub fn taut_string(v: &[f64], w: &[f64], lambda: f64) -> Vec<f64> {
    let n = v.len();
    assert_eq!(n, w.len(), "weights and data differ in length");
    if n == 0 {
        return Vec::new();
    }
    let mut x = vec![0.0; n + 1];
    let mut s = vec![0.0; n + 1];
    for i in 0..n {
        x[i + 1] = x[i] + w[i];
        s[i + 1] = s[i] + w[i] * v[i];
    }
    let upper = |k: usize| if k == n { s[n] } else { s[k] + lambda };
    let lower = |k: usize| if k == n { s[n] } else { s[k] - lambda };

    let mut u = vec![0.0; n];
    let (mut start, mut y0) = (0usize, 0.0f64);
    while start < n {
        let x0 = x[start];
        let mut min_up = f64::INFINITY;
        let mut arg_up = start;
        let mut max_lo = f64::NEG_INFINITY;
        let mut arg_lo = start;
        let mut bend = None;
        for k in start + 1..=n {
            let dx = x[k] - x0;
            let up = (upper(k) - y0) / dx;
            let lo = (lower(k) - y0) / dx;
            if up < max_lo {
                bend = Some((arg_lo, max_lo, lower(arg_lo)));
                break;
            }
            if lo > min_up {
                bend = Some((arg_up, min_up, upper(arg_up)));
                break;
            }
            if up <= min_up {
                min_up = up;
                arg_up = k;
            }
            if lo >= max_lo {
                max_lo = lo;
                arg_lo = k;
            }
        }
        let (knot, slope, y) = bend.unwrap_or((n, (s[n] - y0) / (x[n] - x0), s[n]));
        for ui in &mut u[start..knot] {
            *ui = slope;
        }
        start = knot;
        y0 = y;
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    fn objective(u: &[f64], v: &[f64], w: &[f64], lambda: f64) -> f64 {
        let tv: f64 = u.windows(2).map(|p| (p[1] - p[0]).abs()).sum();
        let fid: f64 = u.iter().zip(v).zip(w).map(|((a, b), c)| c * (a - b).powi(2)).sum();
        tv + fid / (2.0 * lambda)
    }

    #[test]
    fn constant_data_is_fixed() {
        let g = Grid::Line(20);
        let v = GridFunction::constant(g, 3.5);
        let u = TotalVariation::new(g).unwrap().prox(&v, 0.7).unwrap();
        assert!(u.max_abs_diff(&v) < 1e-14);
    }

    #[test]
    fn large_step_flattens_to_weighted_mean() {
        let g = Grid::Line(31);
        let e = TotalVariation::new(g).unwrap();
        let v = GridFunction::sample_1d(31, |x| (9.0 * x).sin() + x).unwrap();
        let u = e.prox(&v, 10.0).unwrap();
        let m = e.space().mean(&v);
        assert!(u.values().iter().all(|ui| (ui - m).abs() < 1e-13));
    }

    #[test]
    fn step_contrast_shrinks_by_known_amount() {
        let n = 64;
        let g = Grid::Line(n);
        let e = TotalVariation::new(g).unwrap();
        let v = GridFunction::sample_1d(n, |x| if x < 0.5 { 0.0 } else { 1.0 }).unwrap();
        let lambda = 0.05;
        let u = e.prox(&v, lambda).unwrap();
        // each half has mass 1/2, so each plateau moves by λ / (1/2)
        assert!((u.values()[0] - 2.0 * lambda).abs() < 1e-13);
        assert!((u.values()[n - 1] - (1.0 - 2.0 * lambda)).abs() < 1e-13);
    }

    #[test]
    fn beats_random_perturbations() {
        let n = 25;
        let g = Grid::Line(n);
        let e = TotalVariation::new(g).unwrap();
        let w = e.space().weights().to_vec();
        let v: Vec<f64> = (0..n).map(|i| ((i * 7919) % 13) as f64 / 6.0 - 1.0).collect();
        for lambda in [1e-3, 3e-2, 0.2] {
            let u = taut_string(&v, &w, lambda);
            let best = objective(&u, &v, &w, lambda);
            for j in 0..200 {
                let pert: Vec<f64> = u
                    .iter()
                    .enumerate()
                    .map(|(i, ui)| ui + 1e-4 * (((i + 3) * (j + 11) * 2654435761usize) % 1000) as f64 / 500.0 - 1e-4)
                    .collect();
                assert!(objective(&pert, &v, &w, lambda) >= best - 1e-14);
            }
        }
    }

    #[test]
    fn rejects_square_grid() {
        assert!(TotalVariation::new(Grid::Square(4)).is_err());
    }
}
