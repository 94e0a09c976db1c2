//! Minimizing-movement (implicit Euler) solution of `u̇ + ∂E(u) ∋ f`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::energy::{check_subgradient_with, slope, Energy, ProbeConfig};
use crate::error::{Error, Result};
use crate::hilbert::GridFunction;

/// Default certification tolerance for a single step.
pub const DEFAULT_PROX_TOL: f64 = 1e-8;
/// Default tolerance for slopes recorded along a trajectory.
pub const DEFAULT_SLOPE_TOL: f64 = 1e-8;

type ForcingFn = dyn Fn(f64) -> GridFunction + Send + Sync;

/// Right-hand side `f(t)`, sampled at left endpoints `t_k`.
#[derive(Clone)]
pub enum Forcing {
    /// `f(t) = profile` for `t_start ≤ t < t_stop`, zero otherwise.
    Pulse {
        profile: GridFunction,
        t_start: f64,
        t_stop: f64,
    },
    /// Arbitrary `f(t)`. Its energy beyond the horizon is taken to be zero.
    Function(Arc<ForcingFn>),
}

impl Forcing {
    pub fn pulse(profile: GridFunction, t_start: f64, t_stop: f64) -> Result<Self> {
        if !(t_start.is_finite() && t_stop.is_finite() && t_start <= t_stop) {
            return Err(Error::InvalidParameter(format!(
                "forcing window [{t_start}, {t_stop}) is not a finite interval"
            )));
        }
        Ok(Forcing::Pulse {
            profile,
            t_start,
            t_stop,
        })
    }

    pub fn from_fn(f: impl Fn(f64) -> GridFunction + Send + Sync + 'static) -> Self {
        Forcing::Function(Arc::new(f))
    }

    /// `f(t)`, or `None` where the forcing vanishes.
    pub fn at(&self, t: f64) -> Option<GridFunction> {
        match self {
            Forcing::Pulse {
                profile,
                t_start,
                t_stop,
            } => (t >= *t_start && t < *t_stop).then(|| profile.clone()),
            Forcing::Function(f) => Some(f(t)),
        }
    }

    /// `½∫_{t}^{∞} ‖f(s)‖² ds` for the part of the forcing past `t`.
    fn tail_energy(&self, t: f64, norm_sq: impl Fn(&GridFunction) -> f64) -> f64 {
        match self {
            Forcing::Pulse {
                profile,
                t_start,
                t_stop,
            } => 0.5 * (t_stop - t_start.max(t)).max(0.0) * norm_sq(profile),
            Forcing::Function(_) => 0.0,
        }
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::Pulse { t_start, t_stop, .. } => write!(f, "Pulse[{t_start}, {t_stop})"),
            Forcing::Function(_) => f.write_str("Function"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub tau: f64,
    pub t_end: f64,
    pub forcing: Option<Forcing>,
    /// Largest accepted violation of the per-step inclusion.
    pub prox_tol: f64,
    /// Stride for stored states and slopes; `None` picks 1 for grids of at
    /// most 256 nodes and 10 otherwise.
    pub record_every: Option<usize>,
    pub slope_tol: f64,
    /// Probe every step's inclusion `f_k − δ_k ∈ ∂E(u_{k+1})`.
    pub certify: bool,
}

impl FlowConfig {
    pub fn new(tau: f64, t_end: f64) -> Self {
        Self {
            tau,
            t_end,
            forcing: None,
            prox_tol: DEFAULT_PROX_TOL,
            record_every: None,
            slope_tol: DEFAULT_SLOPE_TOL,
            certify: true,
        }
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn with_record_every(mut self, stride: usize) -> Self {
        self.record_every = Some(stride);
        self
    }

    pub fn without_certification(mut self) -> Self {
        self.certify = false;
        self
    }

    pub fn stride_for(&self, nodes: usize) -> usize {
        self.record_every.unwrap_or(if nodes <= 256 { 1 } else { 10 })
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.tau).round().max(1.0) as usize
    }

    /// Checks `0 < τ < 1/(2ω)` and `t_end ≥ τ`.
    pub fn validate(&self, energy: &dyn Energy) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("tau must be positive and finite, got {}", self.tau)));
        }
        let omega = energy.omega();
        if omega > 0.0 && self.tau >= 0.5 / omega {
            return Err(Error::Config(format!(
                "tau = {} violates tau < 1/(2*omega) = {} for `{}`",
                self.tau,
                0.5 / omega,
                energy.name()
            )));
        }
        if !(self.t_end >= self.tau && self.t_end.is_finite()) {
            return Err(Error::Config(format!(
                "t_end = {} must be finite and at least tau = {}",
                self.t_end, self.tau
            )));
        }
        if !(self.prox_tol > 0.0) || !(self.slope_tol > 0.0) {
            return Err(Error::Config("prox_tol and slope_tol must be positive".into()));
        }
        if self.record_every == Some(0) {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// One accepted implicit-Euler step.
#[derive(Debug, Clone)]
pub struct Step {
    pub state: GridFunction,
    /// `g = f − (u⁺ − u)/τ`, the certified element of `∂E(u⁺)`.
    pub subgradient: GridFunction,
    /// Worst probed violation of `g ∈ ∂E(u⁺)` (`-∞` when not probed).
    pub violation: f64,
}

fn certification_probes(step: usize) -> ProbeConfig {
    ProbeConfig {
        samples: 6,
        seed: 0x5eed ^ step as u64,
        ..ProbeConfig::default()
    }
}

/// `u⁺ = prox_E(u + τf, τ)`, certified to `DEFAULT_PROX_TOL`.
pub fn step(energy: &dyn Energy, u: &GridFunction, f: &GridFunction, tau: f64) -> Result<GridFunction> {
    step_with(energy, u, Some(f), tau, Some(DEFAULT_PROX_TOL), 0).map(|s| s.state)
}

/// Single step with optional forcing and optional certification.
pub fn step_with(
    energy: &dyn Energy,
    u: &GridFunction,
    f: Option<&GridFunction>,
    tau: f64,
    certify_tol: Option<f64>,
    index: usize,
) -> Result<Step> {
    let omega = energy.omega();
    if omega > 0.0 && tau >= 0.5 / omega {
        return Err(Error::InvalidParameter(format!(
            "tau = {tau} violates tau < 1/(2*omega) = {}",
            0.5 / omega
        )));
    }
    let v = match f {
        Some(f) => {
            u.same_grid(f)?;
            u.axpy(tau, f)
        }
        None => u.clone(),
    };
    let state = energy.prox(&v, tau)?;
    let subgradient = (&v - &state).scale(1.0 / tau);
    let violation = match certify_tol {
        Some(tol) => {
            let check = check_subgradient_with(energy, &state, &subgradient, &certification_probes(index));
            if check.worst_violation > tol {
                return Err(Error::StepFailed {
                    step: index,
                    source: Box::new(Error::InclusionViolated {
                        violation: check.worst_violation,
                        probe: check.worst_probe.map(|p| p.probe).unwrap_or_default(),
                    }),
                });
            }
            check.worst_violation
        }
        None => f64::NEG_INFINITY,
    };
    Ok(Step {
        state,
        subgradient,
        violation,
    })
}

/// A computed trajectory. Row `k` describes `u_k` at `t_k = kτ`; quantities
/// of the step `u_{k−1} → u_k` live in row `k` and are zero in row 0.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub energy_name: String,
    pub omega: f64,
    pub tau: f64,
    pub prox_tol: f64,
    pub slope_tol: f64,
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    /// `|∂E(u_k)|` on recorded rows.
    pub slopes: Vec<Option<f64>>,
    pub step_norms: Vec<f64>,
    pub cumulative_length: Vec<f64>,
    pub h_values: Vec<f64>,
    /// Energy-identity defect of the step ending in row `k`.
    pub dissipation_residuals: Vec<f64>,
    /// `‖f(t_k)‖²`, the forcing applied on the step leaving row `k`.
    pub forcing_sq: Vec<f64>,
    /// `‖g‖²` of the certified subgradient of the step ending in row `k`.
    pub subgradient_sq: Vec<f64>,
    /// Worst probed inclusion violation of the step ending in row `k`.
    pub violations: Vec<f64>,
    /// Recorded `(k, u_k)`; always contains the first and last rows.
    pub states: Vec<(usize, GridFunction)>,
    /// `½∫_{t_end}^{∞} ‖f‖²` for forcing extending past the horizon.
    pub tail_forcing: f64,
}

impl Trajectory {
    fn start(energy: &dyn Energy, u0: &GridFunction, cfg: &FlowConfig, e0: f64, slope0: Option<f64>, f0: f64) -> Self {
        Self {
            energy_name: energy.name(),
            omega: energy.omega(),
            tau: cfg.tau,
            prox_tol: cfg.prox_tol,
            slope_tol: cfg.slope_tol,
            times: vec![0.0],
            energies: vec![e0],
            slopes: vec![slope0],
            step_norms: vec![0.0],
            cumulative_length: vec![0.0],
            h_values: vec![e0],
            dissipation_residuals: vec![0.0],
            forcing_sq: vec![f0],
            subgradient_sq: vec![0.0],
            violations: vec![f64::NEG_INFINITY],
            states: vec![(0, u0.clone())],
            tail_forcing: 0.0,
        }
    }

    /// Number of rows, `K + 1`.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of completed steps `K`.
    pub fn steps(&self) -> usize {
        self.len().saturating_sub(1)
    }

    pub fn initial_state(&self) -> &GridFunction {
        &self.states[0].1
    }

    pub fn final_state(&self) -> &GridFunction {
        &self.states.last().expect("trajectory has states").1
    }

    pub fn final_energy(&self) -> f64 {
        *self.energies.last().expect("trajectory has rows")
    }

    pub fn total_length(&self) -> f64 {
        *self.cumulative_length.last().expect("trajectory has rows")
    }

    pub fn state_at(&self, k: usize) -> Option<&GridFunction> {
        self.states
            .binary_search_by_key(&k, |(i, _)| *i)
            .ok()
            .map(|pos| &self.states[pos].1)
    }

    /// First recorded time from which every recorded state is constant to
    /// `tol` (relative to `max(1, ‖u‖_∞)`).
    pub fn extinction_time(&self, tol: f64) -> Option<f64> {
        let flat = |u: &GridFunction| u.max() - u.min() <= tol * 1f64.max(u.max().abs()).max(u.min().abs());
        let mut first = None;
        for (k, u) in &self.states {
            if flat(u) {
                first.get_or_insert(*k);
            } else {
                first = None;
            }
        }
        first.map(|k| self.times[k])
    }

    fn recompute_h(&mut self) {
        let n = self.len();
        self.h_values.resize(n, 0.0);
        let mut tail = self.tail_forcing;
        for k in (0..n).rev() {
            if k + 1 < n {
                tail += 0.5 * self.tau * self.forcing_sq[k];
            }
            self.h_values[k] = self.energies[k] + tail;
        }
    }

    /// Writes the trajectory table with header
    /// `t,energy,slope,step_norm,cum_length,H,defect`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,energy,slope,step_norm,cum_length,H,defect")?;
        for k in 0..self.len() {
            let slope = self.slopes[k].map(|s| format!("{s:.16e}")).unwrap_or_default();
            writeln!(
                out,
                "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[k],
                self.energies[k],
                slope,
                self.step_norms[k],
                self.cumulative_length[k],
                self.h_values[k],
                self.dissipation_residuals[k]
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }

    /// Writes `traj.csv` and `state_<k>.csv` into `dir`. With
    /// `snapshot_every = 0` only the first and last states are written;
    /// otherwise every recorded `k` divisible by it, plus the last.
    pub fn export(&self, dir: &Path, snapshot_every: usize) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let path = dir.join("traj.csv");
        self.write_csv(std::io::BufWriter::new(fs::File::create(&path)?))?;
        written.push(path);
        let last = self.states.last().map(|(k, _)| *k).unwrap_or(0);
        for (k, u) in &self.states {
            let keep = *k == 0 || *k == last || (snapshot_every > 0 && k % snapshot_every == 0);
            if keep {
                let path = dir.join(format!("state_{k}.csv"));
                u.write_csv(std::io::BufWriter::new(fs::File::create(&path)?))?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

/// A failed run: the trajectory up to the failing step and the cause.
#[derive(Debug)]
pub struct RunError {
    pub partial: Trajectory,
    pub source: Error,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "run aborted after {} steps: {}", self.partial.steps(), self.source)
    }
}

impl std::error::Error for RunError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// Iterates [`step_with`] from `u0` until `t_end`.
pub fn run(energy: &dyn Energy, u0: &GridFunction, cfg: &FlowConfig) -> std::result::Result<Trajectory, Box<RunError>> {
    let space = energy.space().clone();
    let setup = (|| {
        cfg.validate(energy)?;
        if u0.grid() != space.grid() {
            return Err(Error::DimensionMismatch {
                expected: space.grid().len(),
                found: u0.len(),
            });
        }
        let e0 = energy.value(u0);
        if !e0.is_finite() {
            return Err(Error::OutsideDomain {
                which: "u0".into(),
                energy: energy.name(),
            });
        }
        Ok(e0)
    })();
    let empty = |e0: f64| {
        let mut t = Trajectory::start(energy, u0, cfg, e0, None, 0.0);
        t.recompute_h();
        t
    };
    let e0 = match setup {
        Ok(e0) => e0,
        Err(source) => {
            return Err(Box::new(RunError {
                partial: empty(energy.value(u0)),
                source,
            }))
        }
    };

    let stride = cfg.stride_for(u0.len());
    let steps = cfg.steps();
    let forcing_at = |t: f64| cfg.forcing.as_ref().and_then(|f| f.at(t));
    // mismatched forcing is reported by the step that uses it
    let norm_sq = |g: &GridFunction| if g.grid() == space.grid() { space.dot(g, g) } else { f64::NAN };
    let f0 = forcing_at(0.0).map_or(0.0, |f| norm_sq(&f));
    let slope_at = |u: &GridFunction| slope(energy, u, cfg.slope_tol).ok();

    let mut traj = Trajectory::start(energy, u0, cfg, e0, slope_at(u0), f0);
    traj.tail_forcing = cfg
        .forcing
        .as_ref()
        .map_or(0.0, |f| f.tail_energy(steps as f64 * cfg.tau, norm_sq));

    let mut u = u0.clone();
    let mut f_k = forcing_at(0.0);
    for k in 0..steps {
        let certify = cfg.certify.then_some(cfg.prox_tol);
        let outcome = match step_with(energy, &u, f_k.as_ref(), cfg.tau, certify, k).map_err(|e| match e {
            e @ Error::StepFailed { .. } => e,
            e => Error::StepFailed {
                step: k,
                source: Box::new(e),
            },
        }) {
            Ok(s) => s,
            Err(source) => {
                if traj.states.last().map(|(i, _)| *i) != Some(k) {
                    traj.states.push((k, u.clone()));
                }
                traj.recompute_h();
                return Err(Box::new(RunError { partial: traj, source }));
            }
        };

        let row = k + 1;
        let t = row as f64 * cfg.tau;
        let e_next = energy.value(&outcome.state);
        let delta = (&outcome.state - &u).scale(1.0 / cfg.tau);
        let step_norm = space.distance(&outcome.state, &u);
        let f_sq = traj.forcing_sq[k];
        let g_sq = norm_sq(&outcome.subgradient);
        let e_prev = traj.energies[k];
        let defect = (e_next - e_prev + cfg.tau * (0.5 * norm_sq(&delta) + 0.5 * g_sq - 0.5 * f_sq)).abs();

        let recorded = row % stride == 0 || row == steps;
        traj.times.push(t);
        traj.energies.push(e_next);
        traj.slopes.push(if recorded { slope_at(&outcome.state) } else { None });
        traj.step_norms.push(step_norm);
        traj.cumulative_length.push(traj.cumulative_length[k] + step_norm);
        traj.dissipation_residuals.push(defect);
        f_k = forcing_at(t);
        traj.forcing_sq.push(f_k.as_ref().map_or(0.0, norm_sq));
        traj.subgradient_sq.push(g_sq);
        traj.violations.push(outcome.violation);
        if recorded {
            traj.states.push((row, outcome.state.clone()));
        }
        u = outcome.state;
    }
    traj.recompute_h();
    Ok(traj)
}

/// Per-step defects of the discrete energy identity.
#[derive(Debug, Clone)]
pub struct EnergyIdentityReport {
    /// `|E_{k+1} − E_k + τ(½‖δ_k‖² + ½‖g_k‖² − ½‖f_k‖²)|` for `k = 0..K`.
    pub defects: Vec<f64>,
    pub max_defect: f64,
    pub mean_defect: f64,
    /// Worst `‖Δu‖²/(2τ) − (E_k − E_{k+1})` over the steps; the
    /// minimizing-movement inequality asks for it to be `≤ 0`.
    pub worst_dissipation_gap: f64,
}

pub fn energy_identity_report(traj: &Trajectory) -> EnergyIdentityReport {
    let defects: Vec<f64> = traj.dissipation_residuals.iter().skip(1).copied().collect();
    let max_defect = defects.iter().copied().fold(0.0, f64::max);
    let mean_defect = if defects.is_empty() {
        0.0
    } else {
        defects.iter().sum::<f64>() / defects.len() as f64
    };
    let worst_dissipation_gap = (1..traj.len())
        .map(|k| traj.step_norms[k].powi(2) / (2.0 * traj.tau) - (traj.energies[k - 1] - traj.energies[k]))
        .fold(f64::NEG_INFINITY, f64::max);
    EnergyIdentityReport {
        defects,
        max_defect,
        mean_defect,
        worst_dissipation_gap,
    }
}

/// `H_k = E(u_k) + ½Σ_{j≥k} τ‖f_j‖²` with its monotonicity check.
#[derive(Debug, Clone)]
pub struct DiscreteH {
    pub values: Vec<f64>,
    /// Worst `H_{k+1} − H_k − slack_k`; non-positive when `H` decreases.
    pub worst_excess: f64,
    /// First step `k` at which the excess is positive.
    pub first_violation: Option<usize>,
    pub decreasing: bool,
}

/// Slack per step is `ω τ ‖u_{k+1} − u_k‖² + 10·prox_tol`.
pub fn discrete_h(traj: &Trajectory, cfg: &FlowConfig) -> DiscreteH {
    let values = traj.h_values.clone();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut first_violation = None;
    for k in 1..values.len() {
        let slack = traj.omega * cfg.tau * traj.step_norms[k].powi(2) + 10.0 * cfg.prox_tol;
        let excess = values[k] - values[k - 1] - slack;
        if excess > 0.0 && first_violation.is_none() {
            first_violation = Some(k - 1);
        }
        worst_excess = worst_excess.max(excess);
    }
    DiscreteH {
        values,
        worst_excess,
        first_violation,
        decreasing: first_violation.is_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energies::{Dirichlet, Quadratic, TotalVariation};
    use crate::hilbert::Grid;
    use std::f64::consts::PI;

    #[test]
    fn quadratic_step_is_exact() {
        let e = Quadratic::new(Grid::Line(9));
        let u = GridFunction::sample_1d(9, |x| 1.0 - 2.0 * x * x).unwrap();
        let next = step(&e, &u, &GridFunction::zeros(u.grid()), 0.01).unwrap();
        assert!(next.max_abs_diff(&u.scale(1.0 / 1.01)) < 1e-15);
    }

    #[test]
    fn equilibrium_is_fixed() {
        let g = Grid::Line(33);
        let e = Dirichlet::new(g);
        let u = GridFunction::constant(g, 0.3);
        let next = step(&e, &u, &GridFunction::zeros(g), 1e-2).unwrap();
        assert!(next.max_abs_diff(&u) < 1e-10);
    }

    #[test]
    fn heat_step_scales_cosine_mode() {
        let n = 65;
        let g = Grid::Line(n);
        let h = g.h();
        let mu = 4.0 * (PI * h / 2.0).sin().powi(2) / (h * h);
        let u = GridFunction::sample_1d(n, |x| (PI * x).cos()).unwrap();
        let tau = 1e-3;
        let next = step(&Dirichlet::new(g), &u, &GridFunction::zeros(g), tau).unwrap();
        assert!(next.max_abs_diff(&u.scale(1.0 / (1.0 + tau * mu))) < 1e-10);
    }

    #[test]
    fn rejects_large_steps() {
        let e = crate::energies::semilinear_energy(9, crate::energies::DoubleWell::default()).unwrap();
        let u = GridFunction::zeros(e.space().grid());
        let cfg = FlowConfig::new(0.05, 1.0);
        let err = run(e.as_ref(), &u, &cfg).unwrap_err();
        assert!(matches!(err.source, Error::Config(_)));
        assert!(err.source.to_string().contains("1/(2*omega)"));
    }

    #[test]
    fn quadratic_run_matches_recursion() {
        let g = Grid::Line(5);
        let e = Quadratic::new(g);
        let u0 = GridFunction::constant(g, 1.0);
        let cfg = FlowConfig::new(1e-2, 1.0);
        let traj = run(&e, &u0, &cfg).unwrap();
        assert_eq!(traj.len(), 101);
        for k in 0..traj.len() {
            let exact = 0.5 * 1.01f64.powi(-2 * k as i32);
            assert!((traj.energies[k] - exact).abs() < 1e-14);
        }
        assert!(traj.slopes.iter().all(Option::is_some));
        assert!(traj.violations.iter().skip(1).all(|v| *v <= 1e-8));
        let rep = energy_identity_report(&traj);
        assert!(rep.worst_dissipation_gap <= 1e-15);
        assert!(discrete_h(&traj, &cfg).decreasing);
    }

    #[test]
    fn forced_h_accounts_for_forcing() {
        let g = Grid::Line(5);
        let e = Quadratic::new(g);
        let u0 = GridFunction::constant(g, 0.2);
        let f = Forcing::pulse(GridFunction::constant(g, 1.0), 0.0, 0.5).unwrap();
        let cfg = FlowConfig::new(1e-2, 0.3).with_forcing(f);
        let traj = run(&e, &u0, &cfg).unwrap();
        // remaining forcing past the horizon is ½·0.2·‖1‖²
        assert!((traj.tail_forcing - 0.1).abs() < 1e-12);
        assert!((traj.h_values.last().unwrap() - traj.final_energy() - 0.1).abs() < 1e-12);
        assert!(traj.energies[10] > traj.energies[0]);
        assert!(discrete_h(&traj, &cfg).decreasing);
    }

    #[test]
    fn partial_trajectory_on_failure() {
        let g = Grid::Line(5);
        let e = Quadratic::new(g);
        let u0 = GridFunction::constant(g, 1.0);
        let bad = Forcing::from_fn(move |t| {
            if t < 0.045 {
                GridFunction::zeros(g)
            } else {
                GridFunction::zeros(Grid::Line(6))
            }
        });
        let cfg = FlowConfig::new(1e-2, 1.0).with_forcing(bad);
        let err = run(&e, &u0, &cfg).unwrap_err();
        assert!(matches!(err.source, Error::StepFailed { step: 5, .. }));
        assert_eq!(err.partial.steps(), 5);
    }

    #[test]
    fn csv_layout() {
        let g = Grid::Line(5);
        let traj = run(&Quadratic::new(g), &GridFunction::constant(g, 1.0), &FlowConfig::new(0.1, 0.3).with_record_every(2)).unwrap();
        let csv = traj.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,energy,slope,step_norm,cum_length,H,defect");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[2].split(',').nth(2), Some(""));
        assert!(!lines[3].split(',').nth(2).unwrap().is_empty());
        assert!(!lines[4].split(',').nth(2).unwrap().is_empty());
    }

    #[test]
    fn tv_step_goes_flat() {
        let n = 64;
        let g = Grid::Line(n);
        let e = TotalVariation::new(g).unwrap();
        let u0 = GridFunction::sample_1d(n, |x| if x < 0.5 { 0.0 } else { 1.0 }).unwrap();
        let traj = run(&e, &u0, &FlowConfig::new(1e-2, 0.4)).unwrap();
        let t = traj.extinction_time(1e-12).unwrap();
        assert!((t - 0.25).abs() <= 0.011, "{t}");
        assert!((traj.slopes[3].unwrap() - 2.0).abs() < 1e-8);
    }
}
