//! TOML run specifications.
//!
//! ```toml
//! run_id = "heat"
//! output_dir = "runs"        # optional, default "runs"
//! seed = 7                   # optional, default 0
//! energy = "dirichlet1d(129)"
//! initial = "ramp"
//!
//! [flow]
//! tau = 1e-3
//! t_end = 3.0
//! # prox_tol = 1e-8, slope_tol = 1e-8, record_every = 1, certify = true,
//! # snapshot_every = 0
//!
//! [flow.forcing]             # optional pulse f(t) = profile on [t_start, t_stop)
//! profile = "constant(1)"
//! t_start = 0.0
//! t_stop = 1.0
//!
//! [analysis]                 # optional, all switches default to true
//! tail_fraction = 0.2
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisOptions;
use crate::catalogue::{EnergySpec, InitialSpec};
use crate::energy::EnergyHandle;
use crate::error::{Error, Result};
use crate::flow::{FlowConfig, Forcing, DEFAULT_PROX_TOL, DEFAULT_SLOPE_TOL};
use crate::hilbert::GridFunction;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSpec {
    pub profile: InitialSpec,
    pub t_start: f64,
    pub t_stop: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub tau: f64,
    pub t_end: f64,
    #[serde(default = "default_prox_tol")]
    pub prox_tol: f64,
    #[serde(default = "default_slope_tol")]
    pub slope_tol: f64,
    #[serde(default)]
    pub record_every: Option<usize>,
    #[serde(default = "default_true")]
    pub certify: bool,
    /// Stride of the written `state_<k>.csv` files; 0 writes only the
    /// first and last state.
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default)]
    pub forcing: Option<ForcingSpec>,
}

fn default_prox_tol() -> f64 {
    DEFAULT_PROX_TOL
}

fn default_slope_tol() -> f64 {
    DEFAULT_SLOPE_TOL
}

fn default_true() -> bool {
    true
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub run_id: String,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    pub energy: EnergySpec,
    pub initial: InitialSpec,
    pub flow: FlowSpec,
    #[serde(default)]
    pub analysis: AnalysisOptions,
}

/// A validated spec with its energy, initial datum and flow settings built.
pub struct ResolvedRun {
    pub spec: RunSpec,
    pub energy: EnergyHandle,
    pub u0: GridFunction,
    pub flow: FlowConfig,
}

impl RunSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run specs always serialize")
    }

    /// Numeric fields reachable by parameter sweeps.
    pub const SWEEPABLE: &'static [&'static str] = &["tau", "t_end", "seed", "prox_tol", "slope_tol", "p", "n"];

    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        match name.trim_start_matches("flow.").trim_start_matches("energy.") {
            "tau" => self.flow.tau = value,
            "t_end" => self.flow.t_end = value,
            "prox_tol" => self.flow.prox_tol = value,
            "slope_tol" => self.flow.slope_tol = value,
            "seed" => {
                if !(value >= 0.0 && value.fract() == 0.0) {
                    return Err(Error::Config(format!("seed must be a whole number, got {value}")));
                }
                self.seed = value as u64;
            }
            p @ ("p" | "n") => self.energy.set_param(p, value)?,
            other => {
                return Err(Error::Config(format!(
                    "unknown sweep parameter `{other}` (expected one of {:?})",
                    Self::SWEEPABLE
                )))
            }
        }
        Ok(())
    }

    /// Checks every field and builds the objects the run needs.
    pub fn resolve(&self) -> Result<ResolvedRun> {
        if self.run_id.is_empty()
            || self.run_id.starts_with('.')
            || !self
                .run_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        {
            return Err(Error::Config(format!(
                "run_id `{}` must be nonempty, not start with '.', and use only [A-Za-z0-9._-]",
                self.run_id
            )));
        }
        let field = |name: &str, e: Error| Error::Config(format!("field `{name}`: {e}"));
        let energy = self.energy.build().map_err(|e| field("energy", e))?;
        let grid = energy.space().grid();
        let u0 = self.initial.generate(grid, self.seed).map_err(|e| field("initial", e))?;
        if !energy.in_domain(&u0) {
            return Err(Error::Config(format!(
                "field `initial`: {} lies outside the domain of {}",
                self.initial, self.energy
            )));
        }
        let mut flow = FlowConfig::new(self.flow.tau, self.flow.t_end);
        flow.prox_tol = self.flow.prox_tol;
        flow.slope_tol = self.flow.slope_tol;
        flow.record_every = self.flow.record_every;
        flow.certify = self.flow.certify;
        if let Some(f) = &self.flow.forcing {
            let profile = f.profile.generate(grid, self.seed).map_err(|e| field("flow.forcing.profile", e))?;
            flow.forcing = Some(Forcing::pulse(profile, f.t_start, f.t_stop).map_err(|e| field("flow.forcing", e))?);
        }
        flow.validate(energy.as_ref()).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("section [flow]: {msg}")),
            other => other,
        })?;
        let a = &self.analysis;
        if !(a.tail_fraction > 0.0 && a.tail_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "field `analysis.tail_fraction` must lie in (0, 1], got {}",
                a.tail_fraction
            )));
        }
        Ok(ResolvedRun {
            spec: self.clone(),
            energy,
            u0,
            flow,
        })
    }

    /// The spec with every default written out.
    pub fn resolved_defaults(&self, nodes: usize) -> RunSpec {
        let mut spec = self.clone();
        spec.flow.record_every = Some(spec.flow.record_every.unwrap_or(if nodes <= 256 { 1 } else { 10 }));
        if let EnergySpec::Quadratic { n: None } = spec.energy {
            spec.energy = EnergySpec::Quadratic {
                n: Some(crate::catalogue::DEFAULT_QUADRATIC_NODES),
            };
        }
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
run_id = "q"
energy = "quadratic"
initial = "constant(1)"
[flow]
tau = 1e-3
t_end = 5
"#;

    #[test]
    fn minimal_spec_gets_defaults() {
        let spec = RunSpec::from_toml(MINIMAL).unwrap();
        assert_eq!(spec.output_dir, PathBuf::from("runs"));
        assert_eq!(spec.seed, 0);
        assert_eq!(spec.flow.prox_tol, 1e-8);
        assert!(spec.analysis.kl_fit);
        let run = spec.resolve().unwrap();
        assert_eq!(run.u0.len(), 33);
        let full = spec.resolved_defaults(33);
        assert_eq!(full.flow.record_every, Some(1));
        let again = RunSpec::from_toml(&full.to_toml()).unwrap();
        assert_eq!(again.energy.to_string(), "quadratic(33)");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MINIMAL.replace("t_end = 5", "t_end = 5\ntua = 1");
        let err = RunSpec::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("tua"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn step_bound_is_enforced() {
        let text = MINIMAL.replace("quadratic", "semilinear(17)").replace("1e-3", "0.05");
        let err = RunSpec::from_toml(&text).unwrap().resolve().err().unwrap().to_string();
        assert!(err.contains("1/(2*omega)"), "{err}");
    }

    #[test]
    fn bad_run_ids() {
        for id in ["", "../x", "a b", ".hidden"] {
            let text = MINIMAL.replace("run_id = \"q\"", &format!("run_id = \"{id}\""));
            assert!(RunSpec::from_toml(&text).unwrap().resolve().is_err(), "{id}");
        }
    }

    #[test]
    fn initial_outside_constraint() {
        let text = MINIMAL.replace("\"quadratic\"", "\"constrained(quadratic, box=[-1,0])\"");
        let err = RunSpec::from_toml(&text).unwrap().resolve().err().unwrap().to_string();
        assert!(err.contains("outside the domain"), "{err}");
    }

    #[test]
    fn sweep_fields() {
        let mut spec = RunSpec::from_toml(MINIMAL).unwrap();
        spec.set_param("tau", 2e-3).unwrap();
        spec.set_param("flow.t_end", 1.0).unwrap();
        spec.set_param("n", 9.0).unwrap();
        assert_eq!(spec.flow.tau, 2e-3);
        assert_eq!(spec.energy.to_string(), "quadratic(9)");
        assert!(spec.set_param("p", 3.0).is_err());
        assert!(spec.set_param("gamma", 3.0).is_err());
    }
}
