use serde::Serialize;

use crate::energy::{slope, Energy};
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::hilbert::GridFunction;

use super::Verdict;

/// Minimum number of recorded states in the tail window.
pub const MIN_TAIL_STATES: usize = 10;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OmegaThresholds {
    pub h_distance: f64,
    pub energy_gap: f64,
    pub slope: f64,
    /// Radius used to group tail states into clusters.
    pub cluster_radius: f64,
}

impl Default for OmegaThresholds {
    fn default() -> Self {
        Self {
            h_distance: 1e-6,
            energy_gap: 1e-6,
            slope: 1e-6,
            cluster_radius: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    /// Row of the first tail state in the cluster.
    pub representative: usize,
    pub energy: f64,
    pub members: usize,
}

#[derive(Debug, Clone)]
pub struct OmegaLimitReport {
    /// The last recorded state.
    pub candidate_phi: GridFunction,
    pub energy_at_phi: f64,
    /// Rows of the tail states (the last one is `φ` itself).
    pub tail_rows: Vec<usize>,
    pub tail_h_distances: Vec<f64>,
    pub tail_energy_gaps: Vec<f64>,
    pub tail_de_distances: Vec<f64>,
    /// `None` when the quotient ladder did not settle.
    pub slope_at_phi: Option<f64>,
    /// Largest `d_E(u_k, φ)` over the second half of the tail.
    pub de_final: f64,
    pub converged: bool,
    /// `slope(φ)` below threshold, i.e. `(φ, 0) ∈ ∂E` numerically.
    pub stationary: bool,
    /// When the tail `H`-distances vanish, so do the `d_E`-distances.
    pub topology_consistent: bool,
    pub clusters: Vec<Cluster>,
    /// Spread of cluster energies; `E` is constant on the limit set.
    pub cluster_energy_spread: f64,
    pub thresholds: OmegaThresholds,
}

fn late_max(values: &[f64]) -> f64 {
    // the last entry is φ itself and carries no information
    let n = values.len().saturating_sub(1);
    values[n / 2..n].iter().copied().fold(0.0, f64::max)
}

pub fn omega_limit_report(traj: &Trajectory, energy: &dyn Energy, tail_fraction: f64) -> Result<OmegaLimitReport> {
    omega_limit_report_with(traj, energy, tail_fraction, &OmegaThresholds::default())
}

pub fn omega_limit_report_with(
    traj: &Trajectory,
    energy: &dyn Energy,
    tail_fraction: f64,
    thresholds: &OmegaThresholds,
) -> Result<OmegaLimitReport> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("tail fraction must lie in (0, 1], got {tail_fraction}")));
    }
    let first_row = ((1.0 - tail_fraction) * traj.steps() as f64).floor() as usize;
    let tail: Vec<&(usize, GridFunction)> = traj.states.iter().filter(|(k, _)| *k >= first_row).collect();
    if tail.len() < MIN_TAIL_STATES {
        return Err(Error::TailTooShort {
            have: tail.len(),
            need: MIN_TAIL_STATES,
        });
    }
    let space = energy.space();
    let phi = traj.final_state().clone();
    let e_phi = energy.value(&phi);
    let tail_rows: Vec<usize> = tail.iter().map(|(k, _)| *k).collect();
    let tail_h_distances: Vec<f64> = tail.iter().map(|(_, u)| space.distance(u, &phi)).collect();
    let tail_energy_gaps: Vec<f64> = tail_rows.iter().map(|k| (traj.energies[*k] - e_phi).abs()).collect();
    let tail_de_distances: Vec<f64> = tail_h_distances.iter().zip(&tail_energy_gaps).map(|(d, g)| d + g).collect();

    let slope_at_phi = slope(energy, &phi, traj.slope_tol).ok();
    let h_late = late_max(&tail_h_distances);
    let gap_late = late_max(&tail_energy_gaps);
    let de_final = late_max(&tail_de_distances);
    let converged = h_late <= thresholds.h_distance && gap_late <= thresholds.energy_gap;
    let stationary = slope_at_phi.is_some_and(|s| s <= thresholds.slope);
    let topology_consistent = !converged || de_final <= thresholds.h_distance + thresholds.energy_gap;

    let mut clusters: Vec<(GridFunction, Cluster)> = Vec::new();
    for (k, u) in &tail {
        match clusters.iter_mut().find(|(rep, _)| space.distance(rep, u) <= thresholds.cluster_radius) {
            Some((_, c)) => c.members += 1,
            None => clusters.push((
                u.clone(),
                Cluster {
                    representative: *k,
                    energy: traj.energies[*k],
                    members: 1,
                },
            )),
        }
    }
    let clusters: Vec<Cluster> = clusters.into_iter().map(|(_, c)| c).collect();
    let (lo, hi) = clusters
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.energy), hi.max(c.energy)));

    Ok(OmegaLimitReport {
        candidate_phi: phi,
        energy_at_phi: e_phi,
        tail_rows,
        tail_h_distances,
        tail_energy_gaps,
        tail_de_distances,
        slope_at_phi,
        de_final,
        converged,
        stationary,
        topology_consistent,
        clusters,
        cluster_energy_spread: hi - lo,
        thresholds: *thresholds,
    })
}

/// Outcome of the `d_E(u_k, φ) → 0` test.
#[derive(Debug, Clone, Serialize)]
pub struct TauEReport {
    pub verdict: Verdict,
    pub rows: Vec<usize>,
    pub de_values: Vec<f64>,
    /// Largest `d_E(u_k, φ)` over the tail, `φ` itself excluded.
    pub tail_max: f64,
    pub threshold: f64,
}

/// Checks `d_E(u(t_k), φ) → 0` over the last `tail_fraction` of the run.
/// PASS when the whole tail lies within `threshold` of `φ`, FAIL when the
/// distances grow, INDETERMINATE when they shrink but the horizon is too
/// short to reach the threshold.
pub fn tau_e_convergence_check(
    traj: &Trajectory,
    energy: &dyn Energy,
    phi: &GridFunction,
    tail_fraction: f64,
    threshold: f64,
) -> Result<TauEReport> {
    let e_phi = energy.value(phi);
    if !e_phi.is_finite() {
        return Err(Error::OutsideDomain {
            which: "phi".into(),
            energy: energy.name(),
        });
    }
    let first_row = ((1.0 - tail_fraction.clamp(0.0, 1.0)) * traj.steps() as f64).floor() as usize;
    let space = energy.space();
    let mut rows = Vec::new();
    let mut de_values = Vec::new();
    for (k, u) in traj.states.iter().filter(|(k, _)| *k >= first_row) {
        if u == phi {
            continue;
        }
        rows.push(*k);
        de_values.push(space.distance(u, phi) + (traj.energies[*k] - e_phi).abs());
    }
    let tail_max = de_values.iter().copied().fold(0.0, f64::max);
    let verdict = if de_values.is_empty() || tail_max <= threshold {
        if de_values.is_empty() && traj.steps() == 0 {
            Verdict::Indeterminate
        } else {
            Verdict::Pass
        }
    } else {
        let slack = threshold + 1e-12 * tail_max;
        let grows = de_values.windows(2).any(|w| w[1] > w[0] + slack);
        if grows {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        }
    };
    Ok(TauEReport {
        verdict,
        rows,
        de_values,
        tail_max,
        threshold,
    })
}
