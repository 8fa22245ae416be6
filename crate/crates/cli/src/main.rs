use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use talenti_lab::{
    batch_scenarios, exit_code_for_run, run_mesh_command, run_oracle_command, run_scenario_file,
};

#[derive(Parser)]
#[command(
    name = "talenti-lab",
    version,
    about = "p-Laplace Robin laboratory on multiply connected domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a directory of scenarios with --batch)
    Run {
        /// Scenario JSON file
        scenario: Option<PathBuf>,
        /// Output directory for reports and tables
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Directory of scenario files to run in lexicographic order
        #[arg(long, conflicts_with = "scenario")]
        batch: Option<PathBuf>,
        /// Override generator resolution to (k, 4k)
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Generate a mesh from a domain spec and write MESH v1 text
    Mesh {
        /// Domain spec JSON file
        spec: PathBuf,
        /// Output mesh path
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the radial benchmark only and write profile tables
    Oracle {
        /// Oracle parameter JSON file
        params: PathBuf,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            scenario,
            out,
            batch,
            resolution,
        } => {
            let files = match (scenario, batch) {
                (Some(file), None) => vec![file],
                (None, Some(dir)) => match batch_scenarios(&dir) {
                    Ok(files) => files,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(e.exit_code() as u8);
                    }
                },
                (None, None) => {
                    eprintln!("error: provide a scenario file or --batch <dir>");
                    return ExitCode::from(3);
                }
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let results: Vec<_> = files
                .iter()
                .map(|f| {
                    let r = run_scenario_file(f, &out, resolution);
                    if let Err(e) = &r {
                        eprintln!("error: {e}");
                    }
                    r
                })
                .collect();
            exit_code_for_run(&results)
        }
        Command::Mesh { spec, out } => match run_mesh_command(&spec, &out) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Command::Oracle { params, out } => match run_oracle_command(&params, &out) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
    };
    ExitCode::from(code as u8)
}
