//! Randomized property suites behind `sgflow verify`.
//!
//! Every suite draws its random data from ChaCha8 generators with fixed
//! seeds, so reruns report identical numbers.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    chain_rule_check, check_kls_inequality, finite_length_certificate, fit_kl_profile, omega_limit_report, KlProfile,
    Verdict,
};
use crate::catalogue::EnergySpec;
use crate::energies::{dirichlet_prox, tv_prox, Dirichlet, DoubleWell, Well};
use crate::energy::{
    check_subgradient, energy_metric, minimal_selection, prox_residual, slope, Energy, EnergyHandle, PROX_TOL,
};
use crate::error::{Error, Result};
use crate::flow::{discrete_h, energy_identity_report, run, step, FlowConfig, Forcing};
use crate::hilbert::{Grid, GridFunction};

pub const SUITES: &[&str] = &["metric", "subgradient", "prox", "flow", "analysis"];

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub suite: &'static str,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.detail
        )
    }
}

struct Suite {
    name: &'static str,
    results: Vec<PropertyResult>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            results: Vec::new(),
        }
    }

    fn record(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.results.push(PropertyResult {
            suite: self.name,
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn record_result(&mut self, name: impl Into<String>, outcome: Result<(bool, String)>) {
        match outcome {
            Ok((pass, detail)) => self.record(name, pass, detail),
            Err(e) => self.record(name, false, format!("error: {e}")),
        }
    }
}

/// Runs `suite` (one of [`SUITES`] or `all`).
pub fn run_suite(suite: &str) -> Result<Vec<PropertyResult>> {
    match suite {
        "metric" => Ok(metric_suite()),
        "subgradient" => Ok(subgradient_suite()),
        "prox" => Ok(prox_suite()),
        "flow" => Ok(flow_suite()),
        "analysis" => Ok(analysis_suite()),
        "all" => Ok(SUITES.iter().flat_map(|s| run_suite(s).unwrap_or_default()).collect()),
        other => Err(Error::Config(format!("unknown suite `{other}` (expected one of {SUITES:?} or all)"))),
    }
}

fn catalogue(names: &[&str]) -> Vec<(String, EnergyHandle)> {
    names
        .iter()
        .map(|n| {
            let spec: EnergySpec = n.parse().expect("built-in catalogue names parse");
            (n.to_string(), spec.build().expect("built-in catalogue names build"))
        })
        .collect()
}

const METRIC_ENERGIES: &[&str] = &[
    "quadratic",
    "dirichlet1d(65)",
    "tv1d(64)",
    "semilinear(65)",
    "constrained(dirichlet1d(65), box=[0,1])",
];

const PROX_ENERGIES: &[&str] = &[
    "quadratic",
    "power(3)",
    "dirichlet1d(65)",
    "dirichlet2d(9)",
    "tv1d(64)",
    "semilinear(65)",
    "semilinear(33, well=harmonic)",
    "constrained(dirichlet1d(65), box=[0,1])",
];

/// Random element of `dom E`: a few low modes plus nodewise noise.
pub fn random_point(energy: &dyn Energy, rng: &mut ChaCha8Rng, amplitude: f64) -> GridFunction {
    let grid = energy.space().grid();
    let modes: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let offset = rng.gen_range(-0.5..0.5);
    let values = (0..grid.len())
        .map(|i| {
            let x = match grid {
                Grid::Square(n) => grid.coord(i % n),
                _ => grid.coord(i),
            };
            let smooth: f64 = modes.iter().enumerate().map(|(j, a)| a * (j as f64 * PI * x).cos()).sum();
            amplitude * (offset + 0.5 * smooth + 0.2 * rng.gen_range(-1.0..1.0))
        })
        .collect();
    energy.project_domain(&GridFunction::new(grid, values).expect("finite samples"))
}

fn metric_suite() -> Vec<PropertyResult> {
    let mut s = Suite::new("metric");
    let mut rng = ChaCha8Rng::seed_from_u64(0x3e7c);
    for (name, e) in catalogue(METRIC_ENERGIES) {
        let mut violations = 0usize;
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let u = random_point(e.as_ref(), &mut rng, 1.0);
            let v = random_point(e.as_ref(), &mut rng, 1.0);
            let w = random_point(e.as_ref(), &mut rng, 1.0);
            let (Ok(uv), Ok(vu), Ok(vw), Ok(uw), Ok(uu)) = (
                energy_metric(e.as_ref(), &u, &v),
                energy_metric(e.as_ref(), &v, &u),
                energy_metric(e.as_ref(), &v, &w),
                energy_metric(e.as_ref(), &u, &w),
                energy_metric(e.as_ref(), &u, &u),
            ) else {
                violations += 1;
                continue;
            };
            let scale = 1f64.max(uv.de).max(vw.de).max(uw.de);
            let tri = (uw.de - uv.de - vw.de) / scale;
            let sym = (uv.de - vu.de).abs() / scale;
            worst = worst.max(tri).max(sym);
            let ok = uv.de >= uv.d
                && uv.d >= 0.0
                && uu.de == 0.0
                && (uv.de > 0.0) == (u != v)
                && sym <= 1e-12
                && tri <= 1e-12;
            if !ok {
                violations += 1;
            }
        }
        s.record(
            format!("metric axioms for {name}"),
            violations == 0,
            format!("{violations} violations in 1000 triples, worst relative excess {worst:.2e}"),
        );
    }

    let outcome = (|| {
        let base: EnergyHandle = "dirichlet1d(65)".parse::<EnergySpec>()?.build()?;
        let con = "constrained(dirichlet1d(65), box=[0,1])".parse::<EnergySpec>()?.build()?;
        let mut mismatches = 0;
        for _ in 0..500 {
            let u = random_point(con.as_ref(), &mut rng, 1.0);
            let v = random_point(con.as_ref(), &mut rng, 1.0);
            if energy_metric(con.as_ref(), &u, &v)? != energy_metric(base.as_ref(), &u, &v)? {
                mismatches += 1;
            }
        }
        Ok((mismatches == 0, format!("{mismatches} of 500 feasible pairs differ")))
    })();
    s.record_result("constrained metric equals unconstrained metric", outcome);

    let outcome = (|| {
        let mut detail = Vec::new();
        let mut ok = true;
        let mut last_norm = f64::INFINITY;
        for n in [33usize, 65, 129, 257] {
            let k = (n - 1) as f64 / 4.0;
            let e = Dirichlet::new(Grid::line(n)?);
            let u = GridFunction::sample_1d(n, |x| (k * PI * x).sin() / k)?;
            let zero = GridFunction::zeros(u.grid());
            let m = energy_metric(&e, &u, &zero)?;
            ok &= m.de >= PI * PI / 8.0 && m.d < last_norm;
            last_norm = m.d;
            detail.push(format!("n={n}: |u|={:.3e} d_E={:.4}", m.d, m.de));
        }
        Ok((ok && last_norm < 0.02, detail.join("; ")))
    })();
    s.record_result("L2-small oscillations stay d_E-far from 0", outcome);
    s.results
}

/// `M⁻¹Dᵀ sign(Du)`, the TV gradient where no difference vanishes.
fn tv_gradient(u: &GridFunction) -> GridFunction {
    let grid = u.grid();
    let v = u.values();
    let mut g = vec![0.0; v.len()];
    for i in 0..v.len() - 1 {
        let z = (v[i + 1] - v[i]).signum();
        g[i] -= z;
        g[i + 1] += z;
    }
    let g = g.iter().enumerate().map(|(i, x)| x / grid.weight(i)).collect();
    GridFunction::new(grid, g).expect("finite")
}

fn subgradient_suite() -> Vec<PropertyResult> {
    let mut s = Suite::new("subgradient");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5b9d);
    let well = DoubleWell::default();
    type Gradient = Box<dyn Fn(&GridFunction) -> GridFunction>;
    let cases: Vec<(&str, Gradient)> = vec![
        ("quadratic", Box::new(|u: &GridFunction| u.clone())),
        ("power(4)", Box::new(|u: &GridFunction| u.map(|x| x.abs().powi(2) * x))),
        ("dirichlet1d(65)", Box::new(|u: &GridFunction| Dirichlet::new(u.grid()).laplacian(u))),
        ("dirichlet2d(9)", Box::new(|u: &GridFunction| Dirichlet::new(u.grid()).laplacian(u))),
        ("tv1d(64)", Box::new(tv_gradient)),
        (
            "semilinear(65)",
            Box::new(move |u: &GridFunction| Dirichlet::new(u.grid()).laplacian(u).axpy(1.0, &u.map(|x| well.df(x)))),
        ),
    ];
    for (name, grad) in &cases {
        let e = catalogue(&[name]).remove(0).1;
        let mut worst = f64::NEG_INFINITY;
        let mut failures = 0;
        for _ in 0..20 {
            let u = random_point(e.as_ref(), &mut rng, 1.0);
            let r = check_subgradient(e.as_ref(), &u, &grad(&u), 16);
            worst = worst.max(r.worst_violation);
            failures += usize::from(!r.tested);
        }
        s.record(
            format!("exact gradients of {name} pass the inequality"),
            failures == 0,
            format!("{failures} of 20 rejected, worst violation {worst:.2e}"),
        );
    }

    let e = catalogue(&["quadratic"]).remove(0).1;
    let u = random_point(e.as_ref(), &mut rng, 1.0);
    let wrong = check_subgradient(e.as_ref(), &u, &u.scale(2.0), 16);
    s.record(
        "wrong element is rejected",
        !wrong.tested,
        format!(
            "violation {:.3e} at {}",
            wrong.worst_violation,
            wrong.worst_probe.map(|p| p.probe).unwrap_or_default()
        ),
    );

    for (name, e) in catalogue(&["quadratic", "dirichlet1d(33)", "semilinear(33)", "tv1d(32)"]) {
        let outcome = (|| {
            let u = random_point(e.as_ref(), &mut rng, 1.0);
            let d = random_point(e.as_ref(), &mut rng, 1.0);
            let mut pairs = Vec::new();
            for k in 10..16 {
                let uk = u.axpy(0.5f64.powi(k), &d);
                let fk = minimal_selection(e.as_ref(), &uk, 1e-6)?;
                pairs.push((uk, fk));
            }
            let f_lim = minimal_selection(e.as_ref(), &u, 1e-6)?;
            let drift = e.space().distance(&pairs.last().unwrap().1, &f_lim);
            let gap = (e.value(&pairs.last().unwrap().0) - e.value(&u)).abs();
            let r = check_subgradient(e.as_ref(), &u, &f_lim, 16);
            Ok((
                r.tested && gap < 1e-3,
                format!("limit violation {:.2e}, |E(u_k) − E(u)| {gap:.2e}, selection drift {drift:.2e}", r.worst_violation),
            ))
        })();
        s.record_result(format!("graph closedness for {name}"), outcome);
    }

    for (name, e) in catalogue(&["quadratic", "dirichlet1d(33)", "tv1d(32)", "constrained(dirichlet1d(33), box=[0,1])"]) {
        let outcome = (|| {
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..10 {
                let u = random_point(e.as_ref(), &mut rng, 1.0);
                let mut prev = 0.0;
                for j in 0..12 {
                    let lambda = 0.1 * 0.5f64.powi(j);
                    let q = e.space().norm_of(&minimal_selection(e.as_ref(), &u, lambda)?);
                    worst = worst.max(prev - q);
                    prev = q;
                }
            }
            Ok((worst <= 1e-10, format!("largest decrease when λ shrinks {worst:.2e}")))
        })();
        s.record_result(format!("Moreau-Yosida quotients increase for {name}"), outcome);
    }

    let outcome = (|| {
        let e = catalogue(&["quadratic"]).remove(0).1;
        let u = GridFunction::constant(e.space().grid(), 1.0);
        let sl = slope(e.as_ref(), &u, 1e-8)?;
        let d = catalogue(&["dirichlet1d(33)"]).remove(0).1;
        let s0 = slope(d.as_ref(), &GridFunction::constant(d.space().grid(), 0.7), 1e-8)?;
        Ok(((sl - 1.0).abs() <= 1e-8 && s0 <= 1e-8, format!("slope(quadratic, 1) = {sl}, slope at constant = {s0:.1e}")))
    })();
    s.record_result("slope calibration", outcome);

    let outcome = (|| {
        let semi = catalogue(&["semilinear(33)"]).remove(0).1;
        let base = Dirichlet::new(semi.space().grid());
        let u = random_point(semi.as_ref(), &mut rng, 1.0);
        let d = random_point(semi.as_ref(), &mut rng, 1.0);
        let mut ok = true;
        let mut detail = String::new();
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for k in [4, 8, 12, 16] {
            let uk = u.axpy(0.5f64.powi(k), &d);
            let a = energy_metric(semi.as_ref(), &uk, &u)?.de;
            let b = energy_metric(&base, &uk, &u)?.de;
            detail = format!("at 2^-{k}: d_E = {a:.2e}, d_E1 = {b:.2e}");
            ok &= a * 8.0 < prev.0 && b * 8.0 < prev.1;
            prev = (a, b);
        }
        ok &= prev.0 < 1e-4 && prev.1 < 1e-4;
        let shifted = u.map(|x| x + 0.5);
        let far_a = energy_metric(semi.as_ref(), &shifted, &u)?.de;
        let far_b = energy_metric(&base, &shifted, &u)?.de;
        ok &= far_a >= 0.49 && far_b >= 0.49;
        Ok((ok, format!("{detail}; shifted: {far_a:.3}, {far_b:.3}")))
    })();
    s.record_result("semilinear and Dirichlet metrics share convergent sequences", outcome);
    s.results
}

fn prox_suite() -> Vec<PropertyResult> {
    let mut s = Suite::new("prox");
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a0c);
    for (name, e) in catalogue(PROX_ENERGIES) {
        let mut worst = f64::NEG_INFINITY;
        let mut errors = Vec::new();
        let hi = 1f64.min(0.5 * e.max_prox_step()).ln();
        let lo = 1e-4f64.ln();
        for _ in 0..200 {
            let v = random_point(e.as_ref(), &mut rng, 1.5);
            let lambda = rng.gen_range(lo..hi).exp();
            match e.prox(&v, lambda) {
                Ok(p) => worst = worst.max(prox_residual(e.as_ref(), &v, lambda, &p)),
                Err(err) => errors.push(err.to_string()),
            }
        }
        s.record(
            format!("prox residual for {name}"),
            errors.is_empty() && worst <= PROX_TOL,
            if errors.is_empty() {
                format!("worst residual {worst:.2e} over 200 (v, λ)")
            } else {
                format!("{} failures, first: {}", errors.len(), errors[0])
            },
        );
    }

    let outcome = (|| {
        let g = Grid::line(65)?;
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..100 {
            let e = Dirichlet::new(g);
            let a = random_point(&e, &mut rng, 1.0);
            let b = random_point(&e, &mut rng, 1.0);
            let lambda = rng.gen_range(1e-3..1.0);
            let sp = e.space();
            worst = worst.max(sp.distance(&dirichlet_prox(&a, lambda)?, &dirichlet_prox(&b, lambda)?) - sp.distance(&a, &b));
        }
        Ok((worst <= 1e-12, format!("largest expansion {worst:.2e}")))
    })();
    s.record_result("Dirichlet prox is nonexpansive", outcome);

    let outcome = (|| {
        let mut worst = 0.0f64;
        let e = catalogue(&["tv1d(64)"]).remove(0).1;
        for _ in 0..100 {
            let v = random_point(e.as_ref(), &mut rng, 1.0);
            let c = rng.gen_range(-5.0..5.0);
            let lambda = rng.gen_range(1e-3..0.5);
            let shifted = tv_prox(&v.map(|x| x + c), lambda)?;
            let expected = tv_prox(&v, lambda)?.map(|x| x + c);
            worst = worst.max(shifted.max_abs_diff(&expected));
        }
        Ok((worst <= 1e-12, format!("largest deviation {worst:.2e}")))
    })();
    s.record_result("TV prox commutes with constants", outcome);
    s.results
}

fn flow_suite() -> Vec<PropertyResult> {
    let mut s = Suite::new("flow");
    let mut rng = ChaCha8Rng::seed_from_u64(0xf10c);

    let outcome = (|| {
        let e = catalogue(&["quadratic"]).remove(0).1;
        let u0 = GridFunction::sample_1d(33, |x| 1.0 + x)?;
        let mut errs = Vec::new();
        let mut defects = Vec::new();
        for tau in [1e-2, 5e-3, 2.5e-3] {
            let traj = run(e.as_ref(), &u0, &FlowConfig::new(tau, 1.0).without_certification()).map_err(|e| e.source)?;
            errs.push(traj.final_state().max_abs_diff(&u0.scale((-1.0f64).exp())));
            defects.push(energy_identity_report(&traj).max_defect);
        }
        let r: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
        let d: Vec<f64> = defects.windows(2).map(|w| w[0] / w[1]).collect();
        let ok = r.iter().all(|x| (1.8..=2.2).contains(x)) && d.iter().all(|x| (3.0..=5.0).contains(x));
        Ok((ok, format!("error ratios {r:.3?}, defect ratios {d:.3?}")))
    })();
    s.record_result("scheme order and energy-identity defect order", outcome);

    for (name, e) in catalogue(PROX_ENERGIES) {
        let outcome = (|| {
            let tau = 1e-2f64.min(0.25 * e.max_prox_step());
            let cfg = FlowConfig::new(tau, 20.0 * tau).with_record_every(1000).without_certification();
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..50 {
                let u0 = random_point(e.as_ref(), &mut rng, 1.0);
                let traj = run(e.as_ref(), &u0, &cfg).map_err(|e| e.source)?;
                for k in 1..traj.len() {
                    worst = worst.max(traj.energies[k] - traj.energies[k - 1]);
                }
            }
            Ok((worst <= 10.0 * cfg.prox_tol, format!("largest energy increase {worst:.2e}")))
        })();
        s.record_result(format!("unforced energy decreases for {name}"), outcome);
    }

    let outcome = (|| {
        let e = catalogue(&["quadratic"]).remove(0).1;
        let g = e.space().grid();
        let profile = GridFunction::sample(g, |x, _| 1.0 - x)?;
        let cfg = FlowConfig::new(1e-2, 3.0).with_forcing(Forcing::pulse(profile, 0.0, 1.0)?);
        let traj = run(e.as_ref(), &GridFunction::zeros(g), &cfg).map_err(|e| e.source)?;
        let h = discrete_h(&traj, &cfg);
        Ok((h.decreasing, format!("worst excess {:.2e}", h.worst_excess)))
    })();
    s.record_result("discrete H decreases under forcing", outcome);

    for (name, e) in catalogue(&["quadratic", "dirichlet1d(33)", "tv1d(32)"]) {
        let outcome = (|| {
            let mut u = random_point(e.as_ref(), &mut rng, 1.0);
            let mut v = random_point(e.as_ref(), &mut rng, 1.0);
            let zero = GridFunction::zeros(u.grid());
            let mut prev = e.space().distance(&u, &v);
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..100 {
                u = step(e.as_ref(), &u, &zero, 1e-2)?;
                v = step(e.as_ref(), &v, &zero, 1e-2)?;
                let d = e.space().distance(&u, &v);
                worst = worst.max(d - prev);
                prev = d;
            }
            Ok((worst <= 1e-10, format!("largest growth {worst:.2e}")))
        })();
        s.record_result(format!("contractivity for {name}"), outcome);
    }

    let outcome = (|| {
        let e = catalogue(&["dirichlet1d(65)"]).remove(0).1;
        let u0 = random_point(e.as_ref(), &mut rng, 1.0);
        let traj = run(e.as_ref(), &u0, &FlowConfig::new(1e-3, 1.0)).map_err(|e| e.source)?;
        let m0 = e.space().mean(&u0);
        let drift = traj
            .states
            .iter()
            .map(|(_, u)| (e.space().mean(u) - m0).abs())
            .fold(0.0, f64::max);
        let worst = traj.violations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((drift <= 1e-10 && worst <= traj.prox_tol, format!("mean drift {drift:.2e}, worst inclusion violation {worst:.2e}")))
    })();
    s.record_result("heat flow conserves the mean and certifies every step", outcome);
    s.results
}

fn analysis_suite() -> Vec<PropertyResult> {
    let mut s = Suite::new("analysis");
    let mut rng = ChaCha8Rng::seed_from_u64(0xa7a1);
    for p in [2.0, 3.0, 4.0, 6.0] {
        let outcome = (|| {
            let e = crate::energies::Power::new(p)?;
            let cfg = FlowConfig::new(1e-3, if p > 2.0 { 200.0 } else { 20.0 }).with_record_every(10);
            let traj = run(&e, &GridFunction::scalar(1.0)?, &cfg).map_err(|e| e.source)?;
            let fit = fit_kl_profile(&traj, None)?;
            let target = (p - 1.0) / p;
            Ok((
                (fit.profile.theta - target).abs() <= 0.02 && fit.margin_min >= 0.95,
                format!(
                    "theta {:.4} (expected {target:.4}), margin_min {:.4}",
                    fit.profile.theta, fit.margin_min
                ),
            ))
        })();
        s.record_result(format!("KL exponent for power({p})"), outcome);
    }

    for (name, e) in catalogue(&["quadratic", "dirichlet1d(65)"]) {
        let outcome = (|| {
            let u0 = random_point(e.as_ref(), &mut rng, 1.0);
            let traj = run(e.as_ref(), &u0, &FlowConfig::new(1e-3, 20.0).with_record_every(10)).map_err(|e| e.source)?;
            let om = omega_limit_report(&traj, e.as_ref(), 0.2)?;
            let fit = fit_kl_profile(&traj, None)?;
            let cert = finite_length_certificate(&traj, &fit.profile, fit.window.clone());
            let pts: Vec<GridFunction> = traj
                .states
                .iter()
                .filter(|(k, _)| fit.window.contains(k))
                .step_by(50)
                .map(|(_, u)| u.clone())
                .collect();
            let kls = check_kls_inequality(e.as_ref(), &fit.profile, &pts, traj.slope_tol);
            Ok((
                om.converged && om.topology_consistent && cert.pass && kls.verdict == Verdict::Pass,
                format!(
                    "converged {}, theta {:.4}, length {:.4} <= bound {:.4}, KLS {}",
                    om.converged, fit.profile.theta, cert.window_length, cert.bound, kls.verdict
                ),
            ))
        })();
        s.record_result(format!("limit, KLS and finite length for {name}"), outcome);
    }

    let outcome = (|| {
        let e = catalogue(&["quadratic"]).remove(0).1;
        let profile = KlProfile::new(0.5, 0.5f64.sqrt(), 0.0)?;
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let u = random_point(e.as_ref(), &mut rng, 1.0);
            let r = chain_rule_check(e.as_ref(), &profile, &u)?;
            let exact = u.scale(1.0 / e.space().norm_of(&u));
            worst = worst.max(e.space().distance(&r.composite_element, &exact)).max(r.max_defect);
        }
        Ok((worst <= 1e-8, format!("worst defect {worst:.2e}")))
    })();
    s.record_result("chain rule on the quadratic energy", outcome);
    s.results
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope").is_err());
    }

    #[test]
    fn metric_and_prox_suites_pass() {
        for suite in ["metric", "prox"] {
            for r in run_suite(suite).unwrap() {
                assert!(r.pass, "{r}");
            }
        }
    }

    #[test]
    fn subgradient_flow_analysis_suites_pass() {
        for suite in ["subgradient", "flow", "analysis"] {
            for r in run_suite(suite).unwrap() {
                assert!(r.pass, "{r}");
            }
        }
    }
}
