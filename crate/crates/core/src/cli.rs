//! The `run`, `verify` and `sweep` commands.
//!
//! Exit codes: 0 when the command completed (FAIL verdicts are data),
//! 1 when a run aborted at runtime, 2 for configuration errors.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{analyze, AnalysisReport};
use crate::catalogue::EnergySpec;
use crate::config::{ResolvedRun, RunSpec};
use crate::error::Error;
use crate::flow::run;
use crate::hilbert::GridFunction;
use crate::verify::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

pub const PRNG: &str = "ChaCha8 (rand_chacha 0.3, seeded with seed_from_u64)";

#[derive(Debug, Clone, Default)]
pub struct GlobalOptions {
    /// Replaces `output_dir` of every spec.
    pub output_dir: Option<PathBuf>,
    /// Upper bound on concurrent sweep runs; `None` uses all cores.
    pub jobs: Option<usize>,
    /// Replaces `seed` of every spec.
    pub seed_override: Option<u64>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Parse(_) => Self::config(e.to_string()),
            other => Self::runtime(other.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub toolkit: String,
    pub version: String,
    pub prng: String,
    pub seed: u64,
    pub spec: RunSpec,
}

/// What a completed or aborted run left on disk.
#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub report: Option<AnalysisReport>,
    pub steps: usize,
    pub final_time: f64,
    pub final_energy: f64,
    pub exact_error: Option<f64>,
    pub error: Option<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            EXIT_RUNTIME
        } else {
            EXIT_OK
        }
    }
}

/// Reads a spec and applies the global overrides.
pub fn load_spec(path: &Path, global: &GlobalOptions) -> Result<RunSpec, CliError> {
    let mut spec = RunSpec::from_path(path)?;
    if let Some(dir) = &global.output_dir {
        spec.output_dir = dir.clone();
    }
    if let Some(seed) = global.seed_override {
        spec.seed = seed;
    }
    Ok(spec)
}

pub fn cmd_run(spec_path: &Path, global: &GlobalOptions) -> Result<RunOutcome, CliError> {
    let spec = load_spec(spec_path, global)?;
    let resolved = spec.resolve()?;
    execute(&resolved)
}

/// Runs a resolved spec into `<output_dir>/<run_id>/`. A runtime failure
/// still writes the partial trajectory plus `error.log` and is reported
/// through [`RunOutcome::error`].
pub fn execute(resolved: &ResolvedRun) -> Result<RunOutcome, CliError> {
    let spec = &resolved.spec;
    let dir = spec.output_dir.join(&spec.run_id);
    let io = |what: &str, e: &dyn fmt::Display| CliError::runtime(format!("cannot write {what} in {}: {e}", dir.display()));
    fs::create_dir_all(&dir).map_err(|e| io("output directory", &e))?;
    let _ = fs::remove_file(dir.join("error.log"));

    let manifest = Manifest {
        toolkit: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        prng: PRNG.to_string(),
        seed: spec.seed,
        spec: spec.resolved_defaults(resolved.u0.len()),
    };
    write_json(&dir.join("manifest.json"), &manifest).map_err(|e| io("manifest.json", &e))?;

    let energy = resolved.energy.as_ref();
    let (traj, error) = match run(energy, &resolved.u0, &resolved.flow) {
        Ok(traj) => (traj, None),
        Err(failure) => {
            let failure = *failure;
            let message = format!("run aborted after {} steps: {}", failure.partial.steps(), failure.source);
            (failure.partial, Some(message))
        }
    };
    traj.export(&dir, spec.flow.snapshot_every).map_err(|e| io("trajectory", &e))?;

    let mut outcome = RunOutcome {
        dir: dir.clone(),
        report: None,
        steps: traj.steps(),
        final_time: traj.times.last().copied().unwrap_or(0.0),
        final_energy: traj.final_energy(),
        exact_error: exact_error(&spec.energy, resolved, traj.final_state(), traj.times.last().copied().unwrap_or(0.0)),
        error: None,
    };
    if let Some(message) = error {
        fs::write(dir.join("error.log"), format!("{message}\n")).map_err(|e| io("error.log", &e))?;
        outcome.error = Some(message);
        return Ok(outcome);
    }
    let report = analyze(&traj, energy, &spec.analysis);
    write_json(&dir.join("report.json"), &report).map_err(|e| io("report.json", &e))?;
    outcome.report = Some(report);
    Ok(outcome)
}

fn write_json(path: &Path, value: &impl Serialize) -> crate::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Distance to the closed-form solution, for the unforced quadratic and
/// power flows.
fn exact_error(energy: &EnergySpec, resolved: &ResolvedRun, u: &GridFunction, t: f64) -> Option<f64> {
    if resolved.flow.forcing.is_some() {
        return None;
    }
    let u0 = &resolved.u0;
    let exact = match *energy {
        EnergySpec::Quadratic { .. } => u0.scale((-t).exp()),
        EnergySpec::Power { p: 2.0 } => u0.scale((-t).exp()),
        EnergySpec::Power { p } => u0.map(|x| {
            let base = x.abs().powf(2.0 - p) + (p - 2.0) * t;
            if base <= 0.0 {
                0.0
            } else {
                x.signum() * base.powf(1.0 / (2.0 - p))
            }
        }),
        _ => return None,
    };
    Some(resolved.energy.space().distance(u, &exact))
}

/// Runs a property suite, printing one line per property. Exit 0 iff all pass.
pub fn cmd_verify(suite: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    let results = run_suite(suite)?;
    let failed = results.iter().filter(|r| !r.pass).count();
    for r in &results {
        writeln!(out, "{r}").map_err(|e| CliError::runtime(e.to_string()))?;
    }
    writeln!(out, "{} of {} properties passed", results.len() - failed, results.len())
        .map_err(|e| CliError::runtime(e.to_string()))?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_RUNTIME })
}

/// Parses `--values`, a comma-separated list of numbers.
pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::config(format!("--values: `{s}` is not a finite number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(CliError::config("--values: empty list"));
    }
    Ok(values)
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub dir: PathBuf,
    pub csv: PathBuf,
    pub runs: Vec<(f64, RunOutcome)>,
}

impl SweepOutcome {
    pub fn exit_code(&self) -> i32 {
        self.runs.iter().map(|(_, r)| r.exit_code()).max().unwrap_or(EXIT_OK)
    }
}

pub const SWEEP_HEADER: &str = "value,run_id,status,theta,c,total_length,converged,final_energy,exact_error";

/// One run per value of `param`, written to
/// `<output_dir>/<run_id>/<param>-<index>/`, with the summary in
/// `<output_dir>/<run_id>/sweep.csv`. Every sub-spec is validated before
/// any run starts.
pub fn cmd_sweep(spec_path: &Path, param: &str, values: &[f64], global: &GlobalOptions) -> Result<SweepOutcome, CliError> {
    if values.is_empty() {
        return Err(CliError::config("--values: empty list"));
    }
    let template = load_spec(spec_path, global)?;
    let dir = template.output_dir.join(&template.run_id);
    let mut resolved = Vec::with_capacity(values.len());
    for (i, &value) in values.iter().enumerate() {
        let mut spec = template.clone();
        spec.set_param(param, value)
            .map_err(|e| CliError::config(format!("{param} = {value}: {e}")))?;
        spec.output_dir = dir.clone();
        spec.run_id = format!("{}-{i:03}", param.replace('.', "_"));
        resolved.push(spec.resolve().map_err(|e| CliError::config(format!("{param} = {value}: {e}")))?);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(global.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::runtime(e.to_string()))?;
    let runs: Vec<RunOutcome> = pool.install(|| resolved.par_iter().map(execute).collect::<Result<_, _>>())?;

    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for (value, (r, out)) in values.iter().zip(resolved.iter().zip(&runs)) {
        let kl = out.report.as_ref().and_then(|rep| rep.kl.as_ref());
        let omega = out.report.as_ref().and_then(|rep| rep.omega.as_ref());
        let length = out.report.as_ref().and_then(|rep| rep.length.as_ref());
        let field = |x: Option<f64>| x.map(|v| format!("{v:.16e}")).unwrap_or_default();
        csv.push_str(&format!(
            "{value},{},{},{},{},{},{},{:.16e},{}\n",
            r.spec.run_id,
            if out.error.is_some() { "failed" } else { "ok" },
            field(kl.map(|k| k.theta)),
            field(kl.map(|k| k.c)),
            field(length.map(|l| l.total)),
            omega.map(|o| o.converged.to_string()).unwrap_or_default(),
            out.final_energy,
            field(out.exact_error),
        ));
    }
    let csv_path = dir.join("sweep.csv");
    fs::write(&csv_path, csv).map_err(|e| CliError::runtime(format!("cannot write {}: {e}", csv_path.display())))?;
    Ok(SweepOutcome {
        dir,
        csv: csv_path,
        runs: values.iter().copied().zip(runs).collect(),
    })
}
