//! Runs a TOML spec through the same path as `sgflow run`.

use subgradient_flow::cli::execute;
use subgradient_flow::config::RunSpec;

const SPEC: &str = r#"
run_id = "example-heat"
energy = "dirichlet1d(129)"
initial = "ramp"

[flow]
tau = 1e-3
t_end = 2.0
snapshot_every = 500
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut spec = RunSpec::from_toml(SPEC)?;
    spec.output_dir = std::env::temp_dir().join("sgflow-examples");
    let outcome = execute(&spec.resolve()?)?;
    println!("artifacts in {}", outcome.dir.display());
    let report = outcome.report.expect("completed run");
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
