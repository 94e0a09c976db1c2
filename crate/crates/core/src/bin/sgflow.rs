use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use subgradient_flow::cli::{self, CliError, GlobalOptions};

/// Discrete gradient flows: run specs, property suites and sweeps.
#[derive(Parser)]
#[command(name = "sgflow", version)]
struct Args {
    /// Directory replacing `output_dir` of the spec.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Maximum number of concurrent sweep runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed replacing `seed` of the spec.
    #[arg(long, global = true)]
    seed_override: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one spec file.
    Run { spec: PathBuf },
    /// Run a property suite: metric, subgradient, prox, flow, analysis or all.
    Verify { suite: String },
    /// Run a spec once per value of a numeric parameter.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let global = GlobalOptions {
        output_dir: args.output_dir,
        jobs: args.jobs,
        seed_override: args.seed_override,
    };
    let result = match args.command {
        Command::Run { spec } => cli::cmd_run(&spec, &global).map(|out| {
            match &out.error {
                Some(e) => eprintln!("error: {e}\npartial artifacts in {}", out.dir.display()),
                None => println!("wrote {} ({} steps)", out.dir.display(), out.steps),
            }
            out.exit_code()
        }),
        Command::Verify { suite } => cli::cmd_verify(&suite, &mut std::io::stdout().lock()),
        Command::Sweep { spec, param, values } => cli::parse_values(&values)
            .and_then(|values| cli::cmd_sweep(&spec, &param, &values, &global))
            .map(|out| {
                for (value, run) in &out.runs {
                    if let Some(e) = &run.error {
                        eprintln!("error: {param} = {value}: {e}");
                    }
                }
                println!("wrote {}", out.csv.display());
                out.exit_code()
            }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
