//! Reference computations written independently of the library's solvers.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Trapezoid weights of the uniform grid on [0, 1] with `n` nodes.
pub fn trapezoid(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let h = 1.0 / (n - 1) as f64;
    (0..n).map(|i| if i == 0 || i == n - 1 { h / 2.0 } else { h }).collect()
}

pub fn weighted_norm(w: &[f64], u: &[f64]) -> f64 {
    w.iter().zip(u).map(|(w, x)| w * x * x).sum::<f64>().sqrt()
}

pub fn weighted_distance(w: &[f64], u: &[f64], v: &[f64]) -> f64 {
    w.iter().zip(u.iter().zip(v)).map(|(w, (a, b))| w * (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// `½ Σ (u_{i+1} − u_i)² / h`.
pub fn dirichlet_1d(u: &[f64]) -> f64 {
    let h = 1.0 / (u.len() - 1) as f64;
    0.5 * u.windows(2).map(|p| (p[1] - p[0]).powi(2)).sum::<f64>() / h
}

pub fn total_variation(u: &[f64]) -> f64 {
    u.windows(2).map(|p| (p[1] - p[0]).abs()).sum()
}

/// `argmin ½‖u − v‖²_M + λ Σ|u_{i+1} − u_i|` through its dual
/// `min_{|z|≤1} ½‖v − λ M⁻¹Dᵀz‖²_M`, solved by projected gradient steps
/// until the dual iterate stops moving.
pub fn tv_prox_dual(v: &[f64], w: &[f64], lambda: f64) -> Vec<f64> {
    let n = v.len();
    if n < 2 || lambda == 0.0 {
        return v.to_vec();
    }
    let primal = |z: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let left = if i > 0 { z[i - 1] } else { 0.0 };
                let right = if i + 1 < n { z[i] } else { 0.0 };
                // (Dᵀz)_i = z_{i−1} − z_i
                v[i] - lambda * (left - right) / w[i]
            })
            .collect()
    };
    let wmin = w.iter().copied().fold(f64::INFINITY, f64::min);
    let step = wmin / (4.0 * lambda * lambda);
    let mut z = vec![0.0; n - 1];
    for _ in 0..2_000_000 {
        let u = primal(&z);
        let mut moved = 0.0f64;
        for i in 0..n - 1 {
            // gradient of the dual objective is −λ D u
            let next = (z[i] + step * lambda * (u[i + 1] - u[i])).clamp(-1.0, 1.0);
            moved = moved.max((next - z[i]).abs());
            z[i] = next;
        }
        if moved < 1e-15 {
            break;
        }
    }
    primal(&z)
}

/// `‖P_{∂TV(u)}0‖_M`: minimises `‖M⁻¹Dᵀz‖_M` over `z_i = sign(Δu_i)` on
/// jumps and `z_i ∈ [−1, 1]` on flat pairs, by projected gradient.
pub fn tv_min_norm_subgradient(u: &[f64], w: &[f64]) -> f64 {
    let n = u.len();
    let mut z: Vec<f64> = u.windows(2).map(|p| (p[1] - p[0]).signum() * f64::from(p[1] != p[0])).collect();
    let free: Vec<bool> = u.windows(2).map(|p| p[1] == p[0]).collect();
    let g = |z: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let left = if i > 0 { z[i - 1] } else { 0.0 };
                let right = if i + 1 < n { z[i] } else { 0.0 };
                (left - right) / w[i]
            })
            .collect()
    };
    let wmin = w.iter().copied().fold(f64::INFINITY, f64::min);
    let step = wmin / 4.0;
    for _ in 0..2_000_000 {
        let gv = g(&z);
        let mut moved = 0.0f64;
        for i in 0..n - 1 {
            if free[i] {
                // ∂/∂z_i ½‖M⁻¹Dᵀz‖²_M = g_{i+1} − g_i
                let next = (z[i] - step * (gv[i + 1] - gv[i])).clamp(-1.0, 1.0);
                moved = moved.max((next - z[i]).abs());
                z[i] = next;
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    weighted_norm(w, &g(&z))
}

/// Dense Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Prox of the 1-D Dirichlet energy: `(M + λK)u = Mv` assembled densely.
pub fn dirichlet_prox_dense(v: &[f64], lambda: f64) -> Vec<f64> {
    let n = v.len();
    let h = 1.0 / (n - 1) as f64;
    let w = trapezoid(n);
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n - 1 {
        let k = lambda / h;
        a[i][i] += k;
        a[i + 1][i + 1] += k;
        a[i][i + 1] -= k;
        a[i + 1][i] -= k;
    }
    for i in 0..n {
        a[i][i] += w[i];
    }
    dense_solve(a, v.iter().zip(&w).map(|(x, w)| x * w).collect())
}

/// The unforced flow of `½‖u‖²` after time `t`.
pub fn quadratic_flow_exact(u0: &[f64], t: f64) -> Vec<f64> {
    u0.iter().map(|x| x * (-t).exp()).collect()
}

/// The unforced flow of `|u|^p / p` on ℝ after time `t`.
pub fn power_flow_exact(u0: f64, p: f64, t: f64) -> f64 {
    if p == 2.0 {
        return u0 * (-t).exp();
    }
    let base = u0.abs().powf(2.0 - p) + (p - 2.0) * t;
    if base <= 0.0 {
        0.0
    } else {
        u0.signum() * base.powf(1.0 / (2.0 - p))
    }
}

/// Gradient of `Θ∘E` for `E = |u|^p/p` and the profile `c/(1−θ) s^{1−θ}`.
pub fn power_composite_gradient(u: f64, p: f64, theta: f64, c: f64) -> f64 {
    let e = u.abs().powf(p) / p;
    c * e.powf(-theta) * u.abs().powf(p - 2.0) * u
}

/// Random vector mixing a few cosine modes with nodewise noise.
pub fn random_profile(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let a: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let h = if n > 1 { 1.0 / (n - 1) as f64 } else { 0.0 };
    (0..n)
        .map(|i| {
            let x = i as f64 * h;
            a.iter()
                .enumerate()
                .map(|(j, c)| c * (j as f64 * std::f64::consts::PI * x).cos())
                .sum::<f64>()
                + 0.2 * rng.gen_range(-1.0..1.0)
        })
        .collect()
}
