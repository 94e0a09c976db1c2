mod common;

use proptest::prelude::*;

use subgradient_flow::analysis::KlProfile;
use subgradient_flow::catalogue::EnergySpec;
use subgradient_flow::energies::{dirichlet_prox, taut_string, tv_prox, Dirichlet, TotalVariation};
use subgradient_flow::energy::{energy_metric, slope, Energy, EnergyHandle};
use subgradient_flow::flow::{run, FlowConfig};
use subgradient_flow::hilbert::{Grid, GridFunction};

use common::*;

fn line(values: Vec<f64>) -> GridFunction {
    GridFunction::new(Grid::line(values.len()).unwrap(), values).unwrap()
}

fn vectors(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    n.prop_flat_map(|n| prop::collection::vec(-2.0f64..2.0, n))
}

fn pair(n: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    n.prop_flat_map(|n| (prop::collection::vec(-2.0f64..2.0, n), prop::collection::vec(-2.0f64..2.0, n)))
}

fn triple(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    let v = || prop::collection::vec(-2.0f64..2.0, n);
    (v(), v(), v())
}

/// Piecewise-constant data with a few exact plateaus.
fn plateaus() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-2i32..=2, 1usize..6), 1..6).prop_map(|parts| {
        parts
            .into_iter()
            .flat_map(|(level, len)| std::iter::repeat_n(level as f64 * 0.5, len))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_metric_is_a_metric((u, v, w) in triple(17)) {
        let e = Dirichlet::new(Grid::line(17).unwrap());
        let (u, v, w) = (line(u), line(v), line(w));
        let uv = energy_metric(&e, &u, &v).unwrap().de;
        let vw = energy_metric(&e, &v, &w).unwrap().de;
        let uw = energy_metric(&e, &u, &w).unwrap().de;
        let scale = uv.max(vw).max(uw).max(1.0);
        prop_assert!(uw <= uv + vw + 1e-12 * scale);
        prop_assert!((uv - energy_metric(&e, &v, &u).unwrap().de).abs() <= 1e-12 * scale);
        prop_assert!(uv >= weighted_distance(&trapezoid(17), u.values(), v.values()) * (1.0 - 1e-12));
    }

    #[test]
    fn taut_string_matches_dual_oracle(v in vectors(2..24), lambda in 1e-3f64..1.0) {
        let w = trapezoid(v.len());
        let ours = taut_string(&v, &w, lambda);
        let oracle = tv_prox_dual(&v, &w, lambda);
        for (a, b) in ours.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn tv_prox_commutes_with_constants(v in vectors(2..40), c in -10.0f64..10.0, lambda in 1e-3f64..1.0) {
        let u = line(v);
        let shifted = tv_prox(&u.map(|x| x + c), lambda).unwrap();
        let expected = tv_prox(&u, lambda).unwrap().map(|x| x + c);
        prop_assert!(shifted.max_abs_diff(&expected) <= 1e-12);
    }

    #[test]
    fn tv_prox_does_not_increase_variation(v in vectors(2..40), lambda in 1e-3f64..1.0) {
        let p = tv_prox(&line(v.clone()), lambda).unwrap();
        prop_assert!(total_variation(p.values()) <= total_variation(&v) + 1e-12);
    }

    #[test]
    fn dirichlet_prox_is_firmly_nonexpansive((a, b) in pair(3..30), lambda in 1e-3f64..2.0) {
        let (a, b) = (line(a), line(b));
        let e = Dirichlet::new(a.grid());
        let s = e.space();
        let (pa, pb) = (dirichlet_prox(&a, lambda).unwrap(), dirichlet_prox(&b, lambda).unwrap());
        let lhs = s.dot(&(&pa - &pb), &(&pa - &pb));
        let rhs = s.dot(&(&pa - &pb), &(&a - &b));
        prop_assert!(lhs <= rhs + 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn dirichlet_prox_matches_dense_solve(v in vectors(3..30), lambda in 1e-3f64..2.0) {
        let ours = dirichlet_prox(&line(v.clone()), lambda).unwrap();
        for (a, b) in ours.values().iter().zip(dirichlet_prox_dense(&v, lambda)) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn tv_slope_matches_min_norm_subgradient(v in plateaus()) {
        prop_assume!(v.len() >= 2);
        let e = TotalVariation::new(Grid::line(v.len()).unwrap()).unwrap();
        let u = line(v.clone());
        let ours = slope(&e, &u, 1e-10).unwrap();
        let oracle = tv_min_norm_subgradient(&v, &trapezoid(v.len()));
        prop_assert!((ours - oracle).abs() <= 1e-6 * oracle.max(1.0), "{ours} vs {oracle}");
    }

    #[test]
    fn power_flow_tracks_closed_form(p in 1.5f64..6.0, u0 in 0.2f64..2.0) {
        let e: EnergyHandle = format!("power({p})").parse::<EnergySpec>().unwrap().build().unwrap();
        let cfg = FlowConfig::new(1e-3, 1.0).with_record_every(1000).without_certification();
        let traj = run(e.as_ref(), &GridFunction::scalar(u0).unwrap(), &cfg).unwrap();
        let exact = power_flow_exact(u0, p, 1.0);
        prop_assert!((traj.final_state().values()[0] - exact).abs() <= 5e-3 * u0.max(1.0));
    }

    #[test]
    fn unforced_energy_never_increases(v in vectors(3..20), tau in 1e-3f64..0.04) {
        let spec: EnergySpec = format!("semilinear({})", v.len()).parse().unwrap();
        let e = spec.build().unwrap();
        let cfg = FlowConfig::new(tau, 10.0 * tau).without_certification();
        let traj = run(e.as_ref(), &line(v), &cfg).unwrap();
        for k in 1..traj.len() {
            prop_assert!(traj.energies[k] <= traj.energies[k - 1] + 10.0 * cfg.prox_tol);
        }
    }

    #[test]
    fn exact_profiles_have_unit_margin(p in 1.5f64..8.0, u in 0.05f64..3.0) {
        let theta = (p - 1.0) / p;
        let profile = KlProfile::new(theta, p.powf(-theta), 0.0).unwrap();
        let margin = profile.margin(u.powf(p) / p, u.powf(p - 1.0));
        prop_assert!((margin - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn grid_functions_round_trip_through_csv(v in vectors(2..30)) {
        let u = line(v);
        let back = GridFunction::read_csv(u.to_csv_string().as_bytes()).unwrap();
        prop_assert_eq!(back.values(), u.values());
    }
}
