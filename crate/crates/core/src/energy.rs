//! Proper, semiconvex, lower semicontinuous energies and their subgradients.
//!
//! An [`Energy`] exposes its value (with `+∞` outside the effective
//! domain), its semiconvexity modulus `ω`, and a proximal map. Everything
//! else here is built on those three: the energy metric `d_E`, the slope
//! `|∂E(u)|` as the limit of Moreau–Yosida quotients, sampled verification
//! of the semiconvex subgradient inequality, and the two combinators (sum
//! with a smooth term, restriction to a constraint set).

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hilbert::{GridFunction, InnerProductSpec};

/// Default absolute tolerance of the subgradient inequality.
pub const SUBGRADIENT_TOL: f64 = 1e-8;
/// Default tolerance for certified proximal maps.
pub const PROX_TOL: f64 = 1e-9;
/// Norm of the optimality residual at which iterative prox solves stop.
pub const PROX_SOLVE_RESIDUAL: f64 = 1e-11;
/// Maximum number of halvings in the Moreau–Yosida ladder.
pub const MAX_REFINEMENTS: usize = 40;

pub trait Energy: Send + Sync {
    fn name(&self) -> String;

    fn space(&self) -> &InnerProductSpec;

    /// `E(u)`, or `+∞` outside `dom E`.
    fn value(&self, u: &GridFunction) -> f64;

    /// Semiconvexity modulus: `u ↦ E(u) + ω/2‖u‖²` is convex.
    fn omega(&self) -> f64;

    /// Minimizer of `E(u) + ‖u − v‖²/(2λ)`; arguments already validated.
    fn solve_prox(&self, v: &GridFunction, lambda: f64) -> Result<GridFunction>;

    /// Maps an arbitrary point into `dom E`. Used to draw probe points.
    fn project_domain(&self, u: &GridFunction) -> GridFunction {
        u.clone()
    }

    /// Largest admissible prox step, `1/ω` (infinite for convex energies).
    fn max_prox_step(&self) -> f64 {
        let w = self.omega();
        if w > 0.0 {
            1.0 / w
        } else {
            f64::INFINITY
        }
    }

    /// Proximal map with the step and dimensions validated.
    fn prox(&self, v: &GridFunction, lambda: f64) -> Result<GridFunction> {
        check_step(self, lambda)?;
        if v.grid() != self.space().grid() {
            return Err(Error::DimensionMismatch {
                expected: self.space().grid().len(),
                found: v.len(),
            });
        }
        self.solve_prox(v, lambda)
    }

    fn in_domain(&self, u: &GridFunction) -> bool {
        self.value(u).is_finite()
    }
}

pub type EnergyHandle = Arc<dyn Energy>;

fn check_step<E: Energy + ?Sized>(energy: &E, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("prox step must be positive, got {lambda}")));
    }
    if lambda >= energy.max_prox_step() {
        return Err(Error::InvalidParameter(format!(
            "prox step {lambda} violates lambda < 1/omega = {} for `{}`",
            energy.max_prox_step(),
            energy.name()
        )));
    }
    Ok(())
}

fn require_domain(energy: &dyn Energy, u: &GridFunction, which: &str) -> Result<f64> {
    if u.grid() != energy.space().grid() {
        return Err(Error::DimensionMismatch {
            expected: energy.space().grid().len(),
            found: u.len(),
        });
    }
    let e = energy.value(u);
    if !e.is_finite() {
        return Err(Error::OutsideDomain {
            which: which.to_string(),
            energy: energy.name(),
        });
    }
    Ok(e)
}

/// Both components of the energy metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyMetricValue {
    /// `‖u − v‖_H`
    pub d: f64,
    /// `d_E(u,v) = ‖u − v‖_H + |E(u) − E(v)|`
    pub de: f64,
}

/// The metric `d_E` inducing the coarsest topology in which both the
/// embedding into `H` and `E` itself are continuous.
pub fn energy_metric(energy: &dyn Energy, u: &GridFunction, v: &GridFunction) -> Result<EnergyMetricValue> {
    let eu = require_domain(energy, u, "u")?;
    let ev = require_domain(energy, v, "v")?;
    let d = energy.space().distance(u, v);
    Ok(EnergyMetricValue {
        d,
        de: d + (eu - ev).abs(),
    })
}

/// Moreau–Yosida approximation `(u − prox(u,λ))/λ` of the minimal-norm
/// subgradient element.
pub fn minimal_selection(energy: &dyn Energy, u: &GridFunction, lambda: f64) -> Result<GridFunction> {
    require_domain(energy, u, "u")?;
    let p = energy.prox(u, lambda)?;
    Ok((u - &p).scale(1.0 / lambda))
}

/// Result of a converged Moreau–Yosida ladder.
#[derive(Debug, Clone)]
pub struct SlopeEstimate {
    /// Extrapolated limit of the quotient norms.
    pub slope: f64,
    /// Extrapolated limit of the quotient vectors, `≈ P_{∂E(u)} 0`.
    pub selection: GridFunction,
    /// Raw quotients `‖u − prox(u,λⱼ)‖/λⱼ`, `λⱼ = λ₀ 2^{-j}`.
    pub quotients: Vec<f64>,
    pub lambdas: Vec<f64>,
}

const ROMBERG_LEVELS: usize = 3;

/// Runs the quotient ladder `λⱼ = λ₀ 2^{-j}`, `λ₀ = min(1e-2, 1/(4ω))`,
/// with Richardson (Romberg) extrapolation of the quotient vectors.
///
/// Stops when two successive extrapolated vectors differ by less than
/// `tol · max(1, slope)`. If rounding takes over before that (the
/// differences grow for several levels in a row), the best estimate seen
/// is accepted provided its difference is below `1e-6 · max(1, slope)`.
pub fn moreau_yosida_ladder(energy: &dyn Energy, u: &GridFunction, tol: f64) -> Result<SlopeEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("slope tolerance must be positive, got {tol}")));
    }
    require_domain(energy, u, "u")?;
    let space = energy.space();
    let lambda0 = 1e-2f64.min(0.25 * energy.max_prox_step());

    let mut lambdas = Vec::new();
    let mut quotients = Vec::new();
    // previous Romberg row: prev[m] = R_{j-1, m}
    let mut prev: Vec<GridFunction> = Vec::new();
    let mut best: Option<(f64, GridFunction)> = None;
    let mut growing = 0usize;
    let mut last_diff = f64::INFINITY;

    for j in 0..=MAX_REFINEMENTS {
        let lambda = lambda0 * 0.5f64.powi(j as i32);
        let q = minimal_selection(energy, u, lambda)?;
        lambdas.push(lambda);
        quotients.push(space.norm_of(&q));

        let mut row = vec![q];
        for m in 1..=ROMBERG_LEVELS.min(j) {
            let factor = (1u64 << m) as f64;
            let r = row[m - 1]
                .scale(factor)
                .axpy(-1.0, &prev[m - 1])
                .scale(1.0 / (factor - 1.0));
            row.push(r);
        }
        if j >= 1 {
            let top = ROMBERG_LEVELS.min(j - 1);
            let diff = space.distance(&row[top], &prev[top]);
            let estimate = &row[top];
            let scale = space.norm_of(estimate).max(1.0);
            if diff <= tol * scale {
                return Ok(SlopeEstimate {
                    slope: space.norm_of(estimate),
                    selection: estimate.clone(),
                    quotients,
                    lambdas,
                });
            }
            if best.as_ref().is_none_or(|(d, _)| diff / scale < *d) {
                best = Some((diff / scale, estimate.clone()));
            }
            growing = if diff > last_diff { growing + 1 } else { 0 };
            last_diff = diff;
            if growing >= 4 && j >= 8 {
                break;
            }
        }
        prev = row;
    }
    match best {
        Some((d, selection)) if d <= 1e-6 => Ok(SlopeEstimate {
            slope: space.norm_of(&selection),
            selection,
            quotients,
            lambdas,
        }),
        _ => Err(Error::SlopeNotConverged { history: quotients }),
    }
}

/// Slope `|∂E(u)| = inf{‖f‖ : f ∈ ∂E(u)}`. Returns `+∞` outside `dom E`.
pub fn slope(energy: &dyn Energy, u: &GridFunction, tol: f64) -> Result<f64> {
    if u.grid() == energy.space().grid() && !energy.in_domain(u) {
        return Ok(f64::INFINITY);
    }
    moreau_yosida_ladder(energy, u, tol).map(|s| s.slope)
}

/// Probing schedule for [`check_subgradient_with`].
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    /// Number of random probe points.
    pub samples: usize,
    /// Distances `‖v − u‖_H` cycled through by the random probes.
    pub radii: Vec<f64>,
    /// Step sizes for the `u ± r·eᵢ/‖eᵢ‖` probes.
    pub canonical_radii: Vec<f64>,
    /// Cap on the number of canonical directions (evenly strided).
    pub max_canonical: usize,
    /// Allowed violation, scaled by `max(1, |E(u)|, |E(v)|, |⟨f, v−u⟩|)`.
    pub tol: f64,
    pub seed: u64,
    /// Overrides the energy's own `ω` in the inequality.
    pub omega: Option<f64>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            samples: 32,
            radii: vec![1e-3, 1e-1, 1.0],
            canonical_radii: vec![1e-3, 1e-1],
            max_canonical: 256,
            tol: SUBGRADIENT_TOL,
            seed: 0x5eed,
            omega: None,
        }
    }
}

/// Where the worst violation of the subgradient inequality was found.
#[derive(Debug, Clone)]
pub struct ProbeViolation {
    pub probe: String,
    /// `⟨f, v−u⟩ − [E(v) − E(u) + ω/2‖v−u‖²]`, divided by the scale.
    pub violation: f64,
}

/// A candidate pair `(u, f)` and the outcome of probing `f ∈ ∂E(u)`.
#[derive(Debug, Clone)]
pub struct SubgradientElement {
    pub point: GridFunction,
    pub element: GridFunction,
    pub tested: bool,
    /// Worst scaled violation over all probes (≤ 0 when none).
    pub worst_violation: f64,
    pub worst_probe: Option<ProbeViolation>,
    pub probes: usize,
}

/// Checks `E(v) − E(u) + ω/2‖v−u‖² ≥ ⟨f, v−u⟩` at `samples` random points
/// plus the deterministic probes `v = u` and `v = u ± r·eᵢ`.
pub fn check_subgradient(energy: &dyn Energy, u: &GridFunction, f: &GridFunction, samples: usize) -> SubgradientElement {
    let cfg = ProbeConfig {
        samples,
        ..ProbeConfig::default()
    };
    check_subgradient_with(energy, u, f, &cfg)
}

pub fn check_subgradient_with(
    energy: &dyn Energy,
    u: &GridFunction,
    f: &GridFunction,
    cfg: &ProbeConfig,
) -> SubgradientElement {
    let omega = cfg.omega.unwrap_or_else(|| energy.omega());
    probe_inequality(
        &|v| energy.value(v),
        &|v| energy.project_domain(v),
        energy.space(),
        omega,
        u,
        f,
        cfg,
    )
}

pub(crate) fn probe_inequality(
    value: &dyn Fn(&GridFunction) -> f64,
    project: &dyn Fn(&GridFunction) -> GridFunction,
    space: &InnerProductSpec,
    omega: f64,
    u: &GridFunction,
    f: &GridFunction,
    cfg: &ProbeConfig,
) -> SubgradientElement {
    let eu = value(u);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_probe = None;
    let mut probes = 0usize;

    let mut visit = |v: GridFunction, label: &dyn Fn() -> String| {
        let ev = value(&v);
        if !ev.is_finite() {
            return;
        }
        probes += 1;
        let dv = &v - u;
        let lhs = ev - eu + 0.5 * omega * space.dot(&dv, &dv);
        let rhs = space.dot(f, &dv);
        let scale = 1f64.max(eu.abs()).max(ev.abs()).max(rhs.abs());
        let violation = (rhs - lhs) / scale;
        if violation > worst {
            worst = violation;
            worst_probe = Some(ProbeViolation {
                probe: label(),
                violation,
            });
        }
    };

    if !eu.is_finite() {
        return SubgradientElement {
            point: u.clone(),
            element: f.clone(),
            tested: false,
            worst_violation: f64::INFINITY,
            worst_probe: Some(ProbeViolation {
                probe: "u outside dom E".into(),
                violation: f64::INFINITY,
            }),
            probes: 0,
        };
    }

    visit(u.clone(), &|| "v = u".to_string());

    let len = u.len();
    let stride = len.div_ceil(cfg.max_canonical.max(1)).max(1);
    let weights = space.weights();
    for i in (0..len).step_by(stride) {
        let unit = 1.0 / weights[i].sqrt();
        for &r in &cfg.canonical_radii {
            for sign in [1.0, -1.0] {
                let mut vals = u.values().to_vec();
                vals[i] += sign * r * unit;
                let v = project(&GridFunction::from_parts(u.grid(), vals));
                visit(v, &|| format!("v = u {} {r:e}·e_{i}", if sign > 0.0 { '+' } else { '-' }));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for s in 0..cfg.samples {
        let dir: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dir = GridFunction::from_parts(u.grid(), dir);
        let nrm = space.norm_of(&dir);
        if nrm == 0.0 {
            continue;
        }
        let r = if cfg.radii.is_empty() { 1.0 } else { cfg.radii[s % cfg.radii.len()] };
        let v = project(&u.axpy(r / nrm, &dir));
        visit(v, &|| format!("random sample {s} at radius {r:e}"));
    }

    SubgradientElement {
        point: u.clone(),
        element: f.clone(),
        tested: worst <= cfg.tol,
        worst_violation: worst,
        worst_probe,
        probes,
    }
}

/// Worst scaled violation of `(v − p)/λ ∈ ∂E(p)`, the optimality condition
/// of `p = prox(v, λ)`. A valid prox gives a value `≤ tol`.
pub fn prox_residual(energy: &dyn Energy, v: &GridFunction, lambda: f64, p: &GridFunction) -> f64 {
    let f = (v - p).scale(1.0 / lambda);
    check_subgradient(energy, p, &f, 32).worst_violation
}

type SmoothValue = dyn Fn(&GridFunction) -> f64 + Send + Sync;
type SmoothGradient = dyn Fn(&GridFunction) -> GridFunction + Send + Sync;

/// `E₁ + E₂` with `E₂` finite everywhere and `∇E₂` globally Lipschitz.
pub struct SumEnergy {
    base: EnergyHandle,
    smooth_value: Arc<SmoothValue>,
    smooth_gradient: Arc<SmoothGradient>,
    lipschitz: f64,
    label: String,
}

/// Builds `E₁ + E₂` with `ω = ω(E₁) + L`. The prox is computed by
/// proximal-gradient descent on the strongly convex prox subproblem.
pub fn sum_energy(
    base: EnergyHandle,
    value: impl Fn(&GridFunction) -> f64 + Send + Sync + 'static,
    gradient: impl Fn(&GridFunction) -> GridFunction + Send + Sync + 'static,
    lipschitz: f64,
) -> Result<EnergyHandle> {
    Ok(Arc::new(SumEnergy::new(base, value, gradient, lipschitz, "smooth")?))
}

impl SumEnergy {
    pub fn new(
        base: EnergyHandle,
        value: impl Fn(&GridFunction) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&GridFunction) -> GridFunction + Send + Sync + 'static,
        lipschitz: f64,
        smooth_name: &str,
    ) -> Result<Self> {
        if !(lipschitz >= 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidParameter(format!("Lipschitz constant must be finite and >= 0, got {lipschitz}")));
        }
        let label = format!("{} + {smooth_name}", base.name());
        Ok(Self {
            base,
            smooth_value: Arc::new(value),
            smooth_gradient: Arc::new(gradient),
            lipschitz,
            label,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.label = name.into();
        self
    }

    pub fn base(&self) -> &EnergyHandle {
        &self.base
    }

    pub fn smooth_value(&self, u: &GridFunction) -> f64 {
        (self.smooth_value)(u)
    }

    pub fn smooth_gradient(&self, u: &GridFunction) -> GridFunction {
        (self.smooth_gradient)(u)
    }
}

impl Energy for SumEnergy {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn space(&self) -> &InnerProductSpec {
        self.base.space()
    }

    fn value(&self, u: &GridFunction) -> f64 {
        let e1 = self.base.value(u);
        if !e1.is_finite() {
            return f64::INFINITY;
        }
        e1 + (self.smooth_value)(u)
    }

    fn omega(&self) -> f64 {
        self.base.omega() + self.lipschitz
    }

    fn project_domain(&self, u: &GridFunction) -> GridFunction {
        self.base.project_domain(u)
    }

    fn solve_prox(&self, v: &GridFunction, lambda: f64) -> Result<GridFunction> {
        // Minimize E₁(p) + g(p), g(p) = E₂(p) + ‖p − v‖²/(2λ), by
        // p ← prox_{E₁}(p − s∇g(p), s) with s = 1/(L + 1/λ). Stop when the
        // exact subgradient residual of the iterate is small:
        // (p − p⁺)/s + ∇g(p⁺) − ∇g(p) ∈ ∂(E₁ + g)(p⁺).
        let space = self.base.space();
        let inv_lambda = 1.0 / lambda;
        let step = 1.0 / (self.lipschitz + inv_lambda);
        let grad_g = |p: &GridFunction| {
            let mut g = (self.smooth_gradient)(p);
            g = g.axpy(inv_lambda, p).axpy(-inv_lambda, v);
            g
        };
        let mut p = self.base.prox(v, lambda.min(0.5 * self.base.max_prox_step()))?;
        let mut gp = grad_g(&p);
        let mut residuals = Vec::new();
        for _ in 0..10_000 {
            let next = self.base.prox(&p.axpy(-step, &gp), step)?;
            let g_next = grad_g(&next);
            let r = (&p - &next).scale(1.0 / step).axpy(1.0, &g_next).axpy(-1.0, &gp);
            let res = space.norm_of(&r);
            p = next;
            gp = g_next;
            if residuals.len() == 16 {
                residuals.remove(0);
            }
            residuals.push(res);
            // rounding in p alone leaves a residual of order ε‖p‖/s
            let floor = 16.0 * f64::EPSILON * space.norm_of(&p) / step;
            if res <= PROX_SOLVE_RESIDUAL * (1.0 + space.norm_of(v)) + floor {
                return Ok(p);
            }
        }
        Err(Error::ProxNotConverged { residuals })
    }
}

/// A closed convex set with an exact `H`-orthogonal projection.
pub trait Constraint: Send + Sync {
    fn contains(&self, u: &GridFunction) -> bool;
    fn project(&self, u: &GridFunction) -> GridFunction;
    fn describe(&self) -> String;
}

/// The trivial constraint `C = H`.
#[derive(Debug, Clone, Copy, Default)]
pub struct WholeSpace;

impl Constraint for WholeSpace {
    fn contains(&self, _u: &GridFunction) -> bool {
        true
    }
    fn project(&self, u: &GridFunction) -> GridFunction {
        u.clone()
    }
    fn describe(&self) -> String {
        "H".into()
    }
}

/// Nodewise bounds `lo ≤ uᵢ ≤ hi`. With diagonal quadrature weights the
/// `H`-projection is the componentwise clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxConstraint {
    pub lo: f64,
    pub hi: f64,
}

impl BoxConstraint {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!("box bounds must satisfy lo <= hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }
}

impl Constraint for BoxConstraint {
    fn contains(&self, u: &GridFunction) -> bool {
        u.values().iter().all(|&x| x >= self.lo && x <= self.hi)
    }
    fn project(&self, u: &GridFunction) -> GridFunction {
        u.map(|x| x.clamp(self.lo, self.hi))
    }
    fn describe(&self) -> String {
        format!("box=[{},{}]", self.lo, self.hi)
    }
}

/// `E_C = E + 1_C`.
pub struct ConstrainedEnergy {
    inner: EnergyHandle,
    constraint: Arc<dyn Constraint>,
}

/// Maximum number of Dykstra sweeps for the constrained prox.
pub const MAX_DYKSTRA_SWEEPS: usize = 10_000;

/// Restricts `energy` to `constraint`; `witness` must lie in `dom E ∩ C`.
pub fn constrained_energy(
    energy: EnergyHandle,
    constraint: Arc<dyn Constraint>,
    witness: &GridFunction,
) -> Result<EnergyHandle> {
    Ok(Arc::new(ConstrainedEnergy::new(energy, constraint, witness)?))
}

impl ConstrainedEnergy {
    pub fn new(energy: EnergyHandle, constraint: Arc<dyn Constraint>, witness: &GridFunction) -> Result<Self> {
        if witness.grid() != energy.space().grid() {
            return Err(Error::DimensionMismatch {
                expected: energy.space().grid().len(),
                found: witness.len(),
            });
        }
        if !constraint.contains(witness) {
            return Err(Error::Infeasible(format!("witness violates {}", constraint.describe())));
        }
        if !energy.in_domain(witness) {
            return Err(Error::Infeasible(format!("witness lies outside dom {}", energy.name())));
        }
        Ok(Self { inner: energy, constraint })
    }

    pub fn inner(&self) -> &EnergyHandle {
        &self.inner
    }

    pub fn constraint(&self) -> &Arc<dyn Constraint> {
        &self.constraint
    }
}

impl Energy for ConstrainedEnergy {
    fn name(&self) -> String {
        format!("constrained({}, {})", self.inner.name(), self.constraint.describe())
    }

    fn space(&self) -> &InnerProductSpec {
        self.inner.space()
    }

    fn value(&self, u: &GridFunction) -> f64 {
        if self.constraint.contains(u) {
            self.inner.value(u)
        } else {
            f64::INFINITY
        }
    }

    fn omega(&self) -> f64 {
        self.inner.omega()
    }

    fn project_domain(&self, u: &GridFunction) -> GridFunction {
        self.constraint.project(&self.inner.project_domain(u))
    }

    fn solve_prox(&self, v: &GridFunction, lambda: f64) -> Result<GridFunction> {
        // Dykstra-like splitting for prox of a sum (Bauschke–Combettes):
        //   y = prox_E(x + p), p ← x + p − y,
        //   x⁺ = P_C(y + q),   q ← y + q − x⁺.
        let space = self.inner.space();
        let tol = 1e-14 * (1.0 + space.norm_of(v));
        let mut x = v.clone();
        let mut p = GridFunction::zeros(v.grid());
        let mut q = GridFunction::zeros(v.grid());
        let mut residuals = Vec::new();
        for _ in 0..MAX_DYKSTRA_SWEEPS {
            let y = self.inner.prox(&(&x + &p), lambda)?;
            p = &(&x + &p) - &y;
            let yq = &y + &q;
            let x_next = self.constraint.project(&yq);
            q = &yq - &x_next;
            let change = space.distance(&x_next, &x);
            let gap = space.distance(&x_next, &y);
            x = x_next;
            if residuals.len() == 16 {
                residuals.remove(0);
            }
            residuals.push(change.max(gap));
            if change <= tol && gap <= tol {
                return Ok(x);
            }
        }
        Err(Error::ProxNotConverged { residuals })
    }
}
