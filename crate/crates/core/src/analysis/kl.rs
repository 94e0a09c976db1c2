use std::ops::Range;

use serde::Serialize;

use crate::energy::{moreau_yosida_ladder, probe_inequality, slope, Energy, ProbeConfig};
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::hilbert::GridFunction;

use super::Verdict;

/// Łojasiewicz profile `Θ(s) = c/(1−θ)·s^{1−θ}` for `s = E − e_inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KlProfile {
    pub theta: f64,
    pub c: f64,
    pub e_inf: f64,
}

impl KlProfile {
    pub fn new(theta: f64, c: f64, e_inf: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidParameter(format!("theta must lie in (0, 1), got {theta}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
        }
        Ok(Self { theta, c, e_inf })
    }

    /// `Θ(s)`, continued as an odd function to `s < 0`.
    pub fn big_theta(&self, s: f64) -> f64 {
        s.signum() * self.c / (1.0 - self.theta) * s.abs().powf(1.0 - self.theta)
    }

    /// `Θ′(s) = c·s^{−θ}` for `s > 0`.
    pub fn derivative(&self, s: f64) -> f64 {
        self.c * s.abs().powf(-self.theta)
    }

    fn second_derivative(&self, s: f64) -> f64 {
        -self.theta * self.c * s.abs().powf(-self.theta - 1.0) * s.signum()
    }

    /// `Θ′(E − e_inf)·|∂E|`; the KLS inequality asks for at least 1.
    pub fn margin(&self, energy: f64, slope: f64) -> f64 {
        self.derivative(energy - self.e_inf) * slope
    }
}

#[derive(Debug, Clone)]
pub struct KlFit {
    pub profile: KlProfile,
    /// Rows of the trajectory used by the fit.
    pub window: Range<usize>,
    pub rows: Vec<usize>,
    pub rms_residual: f64,
    pub noise_floor: f64,
    /// Amount by which `e_inf` was lowered below `E_K − 10·defect_K`.
    pub e_inf_shift: f64,
    /// Margins at the fitted rows.
    pub margins: Vec<f64>,
    pub margin_min: f64,
    /// The least-squares exponent fell outside `(0, 1)` and was clamped.
    pub clamped: bool,
}

/// Fits `log|∂E| = θ log(E − e_inf) − log c` over `window`, or over an
/// automatically chosen window: from the first unforced row whose slope
/// drops below half the largest unforced slope to the last row whose energy
/// gap exceeds 100 times the noise floor. The energy gap is taken against
/// `E_K` lowered by ten final defects, and further lowered when that
/// straightens the log-log relation.
pub fn fit_kl_profile(traj: &Trajectory, window: Option<Range<usize>>) -> Result<KlFit> {
    let rows = traj.len();
    if rows < 2 {
        return Err(Error::FitUnreliable("trajectory has no steps".into()));
    }
    let last = rows - 1;
    let defect_last = traj.dissipation_residuals[last];
    let e_cap = traj.energies[last] - 10.0 * defect_last;
    let lookback = (traj.steps() / 100).max(1);
    let noise_floor = (traj.energies[last - lookback] - traj.energies[last])
        .abs()
        .max(10.0 * defect_last)
        .max(1e-14 * traj.energies[0].abs().max(1.0));
    let resolution = 100.0 * traj.slope_tol;

    let window = match window {
        Some(w) => w.start.min(rows)..w.end.min(rows),
        None => {
            // rows driven by forcing are outside the scope of the inequality
            let unforced = traj.forcing_sq.iter().rposition(|&f| f > 0.0).map_or(0, |k| k + 1);
            let max_slope = traj.slopes[unforced..].iter().flatten().copied().fold(0.0, f64::max);
            let start = traj.slopes[unforced..]
                .iter()
                .position(|s| s.is_some_and(|s| s < 0.5 * max_slope))
                .map_or(unforced, |k| k + unforced);
            let end = (0..rows)
                .rev()
                .find(|&k| traj.energies[k] - e_cap > 100.0 * noise_floor)
                .map_or(0, |k| k + 1);
            // constant-slope flows never halve their slope
            let start = if start >= end { unforced } else { start };
            start..end
        }
    };

    let mut gaps = Vec::new();
    let mut ys = Vec::new();
    let mut used = Vec::new();
    for k in window.clone() {
        let gap = traj.energies[k] - e_cap;
        match traj.slopes[k] {
            Some(s) if s > resolution && gap > 100.0 * noise_floor => {
                gaps.push(gap);
                ys.push(s.ln());
                used.push(k);
            }
            _ => {}
        }
    }
    if used.len() < 5 {
        return Err(Error::FitUnreliable(format!(
            "only {} usable points in rows {window:?} (noise floor {noise_floor:e})",
            used.len()
        )));
    }

    // Slowly decaying energies end the run well above E(φ); lower e_inf
    // when that straightens the log-log relation markedly.
    let base = least_squares(&gaps, &ys, 0.0);
    let gap_min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let mut shift = 0.0;
    let mut best = base;
    let (lo, hi) = ((1e-3 * gap_min).ln(), (10.0 * gap_min).ln());
    for i in 0..=200 {
        let s = (lo + (hi - lo) * i as f64 / 200.0).exp();
        let cand = least_squares(&gaps, &ys, s);
        if cand.rms < best.rms {
            best = cand;
            shift = s;
        }
    }
    if best.rms >= 0.5 * base.rms {
        best = base;
        shift = 0.0;
    }
    let e_inf = e_cap - shift;
    let Fit { theta: raw_theta, mx, my, .. } = best;
    let theta = raw_theta.clamp(1e-6, 1.0 - 1e-6);
    let clamped = theta != raw_theta;
    // intercept for the (possibly clamped) exponent: log c = θ·x̄ − ȳ
    let c = (theta * mx - my).exp();
    let xs: Vec<f64> = gaps.iter().map(|g| (g + shift).ln()).collect();
    let n = xs.len() as f64;
    let profile = KlProfile::new(theta, c, e_inf)?;
    let rms_residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (theta * x - c.ln())).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let margins: Vec<f64> = used
        .iter()
        .map(|&k| profile.margin(traj.energies[k], traj.slopes[k].unwrap_or(0.0)))
        .collect();
    let margin_min = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(KlFit {
        profile,
        window,
        rows: used,
        rms_residual,
        noise_floor,
        e_inf_shift: shift,
        margins,
        margin_min,
        clamped,
    })
}

#[derive(Debug, Clone, Copy)]
struct Fit {
    theta: f64,
    mx: f64,
    my: f64,
    rms: f64,
}

fn least_squares(gaps: &[f64], ys: &[f64], shift: f64) -> Fit {
    let xs: Vec<f64> = gaps.iter().map(|g| (g + shift).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let theta = if sxx > 1e-24 { sxy / sxx } else { 0.0 };
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - theta * (x - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Fit { theta, mx, my, rms }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KlsPointStatus {
    Evaluated,
    /// At or below `e_inf`, or critical: outside the inequality's scope.
    Skipped,
    /// Slope below resolution while the energy is still above `e_inf`.
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct KlsPoint {
    pub energy_gap: f64,
    pub slope: f64,
    pub margin: Option<f64>,
    pub status: KlsPointStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct KlsReport {
    pub points: Vec<KlsPoint>,
    pub margin_min: Option<f64>,
    pub verdict: Verdict,
}

/// Margin below which the KLS check fails.
pub const KLS_PASS_MARGIN: f64 = 0.95;

/// Evaluates `Θ′(E(v) − e_inf)·|∂E(v)|` at each point.
pub fn check_kls_inequality(
    energy: &dyn Energy,
    profile: &KlProfile,
    points: &[GridFunction],
    slope_tol: f64,
) -> KlsReport {
    let resolution = 100.0 * slope_tol;
    let noise = 1e-14 * profile.e_inf.abs().max(1.0);
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let gap = energy.value(p) - profile.e_inf;
        let s = slope(energy, p, slope_tol).unwrap_or(f64::NAN);
        let (margin, status) = if !(gap > noise) {
            (None, KlsPointStatus::Skipped)
        } else if !(s > resolution) {
            (None, KlsPointStatus::Indeterminate)
        } else {
            (Some(profile.margin(gap + profile.e_inf, s)), KlsPointStatus::Evaluated)
        };
        out.push(KlsPoint {
            energy_gap: gap,
            slope: s,
            margin,
            status,
        });
    }
    let margin_min = out.iter().filter_map(|p| p.margin).reduce(f64::min);
    let verdict = match margin_min {
        Some(m) if m >= KLS_PASS_MARGIN => Verdict::Pass,
        Some(_) => Verdict::Fail,
        None => Verdict::Indeterminate,
    };
    KlsReport {
        points: out,
        margin_min,
        verdict,
    }
}

#[derive(Debug, Clone)]
pub struct ChainRuleReport {
    /// `Θ′(E(u) − e_inf)`.
    pub theta_prime: f64,
    /// Extrapolated minimal selection `g ≈ P_{∂E(u)} 0`.
    pub selection: GridFunction,
    /// `Θ′·g`, the candidate element of `∂(Θ∘E)(u)`.
    pub composite_element: GridFunction,
    /// Local semiconvexity allowance used for the composite.
    pub composite_omega: f64,
    /// Worst probed violation of the composite subgradient inequality.
    pub max_defect: f64,
    pub worst_probe: Option<String>,
}

/// Checks that `Θ′(E(u) − e_inf)·P_{∂E(u)}0 ∈ ∂(Θ∘(E − e_inf))(u)` by
/// probing the composite's subgradient inequality on a small ball around
/// `u`.
pub fn chain_rule_check(energy: &dyn Energy, profile: &KlProfile, u: &GridFunction) -> Result<ChainRuleReport> {
    let e_u = energy.value(u);
    if !e_u.is_finite() {
        return Err(Error::OutsideDomain {
            which: "u".into(),
            energy: energy.name(),
        });
    }
    let gap = e_u - profile.e_inf;
    if !(gap > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "chain rule needs E(u) > e_inf, got E(u) − e_inf = {gap:e}"
        )));
    }
    let space = energy.space();
    let estimate = moreau_yosida_ladder(energy, u, 1e-11)?;
    let theta_prime = profile.derivative(gap);
    let composite_element = estimate.selection.scale(theta_prime);
    let g_sq = space.dot(&estimate.selection, &estimate.selection);
    let composite_omega = theta_prime * energy.omega().max(0.0) + 2.0 * profile.second_derivative(gap).abs() * g_sq;

    // radii small against the distance to the level set E = e_inf
    let reach = gap / space.norm_of(&estimate.selection).max(1e-300);
    let base = (1e-3 * reach).min(1e-3 * space.norm_of(u).max(1e-6)).max(1e-9);
    let cfg = ProbeConfig {
        samples: 24,
        radii: vec![base, 0.1 * base, 0.01 * base],
        canonical_radii: vec![base, 0.01 * base],
        max_canonical: 64,
        tol: 1e-8,
        seed: 0xc4a1,
        omega: None,
    };
    let composite = |v: &GridFunction| {
        let e = energy.value(v);
        if e.is_finite() {
            profile.big_theta(e - profile.e_inf)
        } else {
            f64::INFINITY
        }
    };
    let check = probe_inequality(
        &composite,
        &|v| energy.project_domain(v),
        space,
        composite_omega,
        u,
        &composite_element,
        &cfg,
    );
    Ok(ChainRuleReport {
        theta_prime,
        selection: estimate.selection,
        composite_element,
        composite_omega,
        max_defect: check.worst_violation.max(0.0),
        worst_probe: check.worst_probe.map(|p| p.probe),
    })
}
