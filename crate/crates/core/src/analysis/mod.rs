//! Post-hoc diagnostics on computed trajectories: limit points, the
//! Kurdyka–Łojasiewicz–Simon inequality, the chain rule and finite length.

mod kl;
mod length;
mod omega;

pub use kl::{
    chain_rule_check, check_kls_inequality, fit_kl_profile, ChainRuleReport, KlFit, KlProfile, KlsPoint, KlsPointStatus,
    KlsReport, KLS_PASS_MARGIN,
};
pub use length::{finite_length_certificate, LengthCertificate, LENGTH_SLACK};
pub use omega::{
    omega_limit_report, omega_limit_report_with, tau_e_convergence_check, Cluster, OmegaLimitReport, OmegaThresholds,
    TauEReport, MIN_TAIL_STATES,
};

use serde::{Deserialize, Serialize};

use crate::energy::Energy;
use crate::flow::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Indeterminate => "INDETERMINATE",
        })
    }
}

/// Which diagnostics [`analyze`] runs, and their thresholds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisOptions {
    pub kl_fit: bool,
    pub omega: bool,
    pub length: bool,
    pub chain_rule: bool,
    pub kls_check: bool,
    pub tail_fraction: f64,
    pub converge_threshold: f64,
    pub slope_threshold: f64,
    /// Number of window states probed by the chain-rule check.
    pub chain_rule_points: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            kl_fit: true,
            omega: true,
            length: true,
            chain_rule: true,
            kls_check: true,
            tail_fraction: 0.2,
            converge_threshold: 1e-6,
            slope_threshold: 1e-6,
            chain_rule_points: 5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KlSection {
    pub theta: f64,
    pub c: f64,
    pub e_inf: f64,
    pub window: [usize; 2],
    pub margin_min: f64,
    pub points: usize,
    pub clamped: bool,
    pub kls_verdict: Option<Verdict>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaSection {
    pub converged: bool,
    #[serde(rename = "dE_final")]
    pub de_final: f64,
    pub slope_at_phi: Option<f64>,
    pub energy_at_phi: f64,
    pub stationary: bool,
    pub clusters: usize,
    pub tau_e_verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct LengthSection {
    pub total: f64,
    pub bound: f64,
    pub window_length: f64,
    pub pass: bool,
    pub violation_range: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainRuleSection {
    pub max_defect: f64,
    pub points: usize,
}

/// The per-run `report.json` document. Sections whose diagnostic was
/// switched off or could not be computed are `null`; the reason for the
/// latter is listed in `notes`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct AnalysisReport {
    pub kl: Option<KlSection>,
    pub omega: Option<OmegaSection>,
    pub length: Option<LengthSection>,
    pub chain_rule: Option<ChainRuleSection>,
    pub notes: Vec<String>,
}

/// Runs the diagnostics selected in `opts` on a completed trajectory.
pub fn analyze(traj: &Trajectory, energy: &dyn Energy, opts: &AnalysisOptions) -> AnalysisReport {
    let mut report = AnalysisReport::default();
    let fit = if opts.kl_fit || opts.length || opts.chain_rule || opts.kls_check {
        match fit_kl_profile(traj, None) {
            Ok(f) => Some(f),
            Err(e) => {
                report.notes.push(format!("kl: {e}"));
                None
            }
        }
    } else {
        None
    };

    if opts.omega {
        let thresholds = OmegaThresholds {
            h_distance: opts.converge_threshold,
            energy_gap: opts.converge_threshold,
            slope: opts.slope_threshold,
            ..OmegaThresholds::default()
        };
        match omega_limit_report_with(traj, energy, opts.tail_fraction, &thresholds) {
            Ok(om) => {
                let tau_e = tau_e_convergence_check(traj, energy, &om.candidate_phi, opts.tail_fraction, opts.converge_threshold);
                report.omega = Some(OmegaSection {
                    converged: om.converged,
                    de_final: om.de_final,
                    slope_at_phi: om.slope_at_phi,
                    energy_at_phi: om.energy_at_phi,
                    stationary: om.stationary,
                    clusters: om.clusters.len(),
                    tau_e_verdict: tau_e.map_or(Verdict::Indeterminate, |r| r.verdict),
                });
            }
            Err(e) => report.notes.push(format!("omega: {e}")),
        }
    }

    if let Some(fit) = &fit {
        let window_states: Vec<_> = traj
            .states
            .iter()
            .filter(|(k, _)| fit.window.contains(k))
            .map(|(_, u)| u.clone())
            .collect();
        let kls_verdict = opts
            .kls_check
            .then(|| check_kls_inequality(energy, &fit.profile, &subsample(&window_states, 20), traj.slope_tol).verdict);
        if opts.kl_fit {
            report.kl = Some(KlSection {
                theta: fit.profile.theta,
                c: fit.profile.c,
                e_inf: fit.profile.e_inf,
                window: [fit.window.start, fit.window.end],
                margin_min: fit.margin_min,
                points: fit.rows.len(),
                clamped: fit.clamped,
                kls_verdict,
            });
        }
        if opts.length {
            let cert = finite_length_certificate(traj, &fit.profile, fit.window.clone());
            report.length = Some(LengthSection {
                total: cert.total_length,
                bound: cert.bound,
                window_length: cert.window_length,
                pass: cert.pass,
                violation_range: cert.violation_range,
            });
        }
        if opts.chain_rule {
            let mut worst: f64 = 0.0;
            let mut used = 0;
            for u in subsample(&window_states, opts.chain_rule_points) {
                match chain_rule_check(energy, &fit.profile, &u) {
                    Ok(r) => {
                        worst = worst.max(r.max_defect);
                        used += 1;
                    }
                    Err(e) => report.notes.push(format!("chain_rule: {e}")),
                }
            }
            if used > 0 {
                report.chain_rule = Some(ChainRuleSection {
                    max_defect: worst,
                    points: used,
                });
            }
        }
    }
    report
}

fn subsample<T: Clone>(items: &[T], count: usize) -> Vec<T> {
    if items.len() <= count {
        return items.to_vec();
    }
    if count <= 1 {
        return items.first().cloned().into_iter().collect();
    }
    (0..count).map(|i| items[i * (items.len() - 1) / (count - 1)].clone()).collect()
}
