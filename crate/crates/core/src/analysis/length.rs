use std::ops::Range;

use serde::Serialize;

use crate::flow::Trajectory;

use super::kl::KlProfile;

pub const LENGTH_SLACK: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct LengthCertificate {
    /// `Σ‖u_{k+1} − u_k‖` over the whole run.
    pub total_length: f64,
    /// The same sum restricted to the window.
    pub window_length: f64,
    /// `[Θ(E_{k₀} − e_inf) − Θ(E_K − e_inf)]·(1 + slack)`.
    pub bound: f64,
    pub slack: f64,
    pub window: Range<usize>,
    pub pass: bool,
    /// First and last window rows `j` at which the partial sum from `k₀`
    /// to `j` exceeds its own bound.
    pub violation_range: Option<(usize, usize)>,
    /// `(t_k, Σ_{j>k}‖u_j − u_{j−1}‖)` at every row.
    pub tail_lengths: Vec<(f64, f64)>,
}

impl LengthCertificate {
    /// Length travelled after time `t`.
    pub fn tail_length_after(&self, t: f64) -> f64 {
        self.tail_lengths
            .iter()
            .find(|(tk, _)| *tk >= t)
            .map_or(0.0, |(_, l)| *l)
    }
}

/// Checks the integrated finite-length estimate on `window`.
pub fn finite_length_certificate(traj: &Trajectory, profile: &KlProfile, window: Range<usize>) -> LengthCertificate {
    let total = traj.total_length();
    let tail_lengths = traj
        .times
        .iter()
        .zip(&traj.cumulative_length)
        .map(|(t, c)| (*t, total - c))
        .collect();
    let window = window.start.min(traj.len())..window.end.min(traj.len());
    if window.len() < 2 {
        return LengthCertificate {
            total_length: total,
            window_length: 0.0,
            bound: 0.0,
            slack: LENGTH_SLACK,
            window,
            pass: true,
            violation_range: None,
            tail_lengths,
        };
    }
    let k0 = window.start;
    let theta0 = profile.big_theta(traj.energies[k0] - profile.e_inf);
    let mut violation: Option<(usize, usize)> = None;
    for j in k0 + 1..window.end {
        let travelled = traj.cumulative_length[j] - traj.cumulative_length[k0];
        let allowed = (theta0 - profile.big_theta(traj.energies[j] - profile.e_inf)) * (1.0 + LENGTH_SLACK);
        if travelled > allowed + 1e-12 {
            violation = Some(violation.map_or((j, j), |(a, _)| (a, j)));
        }
    }
    let kend = window.end - 1;
    let window_length = traj.cumulative_length[kend] - traj.cumulative_length[k0];
    let bound = (theta0 - profile.big_theta(traj.energies[kend] - profile.e_inf)) * (1.0 + LENGTH_SLACK);
    LengthCertificate {
        total_length: total,
        window_length,
        bound,
        slack: LENGTH_SLACK,
        window,
        pass: violation.is_none(),
        violation_range: violation,
        tail_lengths,
    }
}
