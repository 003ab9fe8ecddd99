use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use msnls_cli::config::{parse_config, Resolved};
use msnls_cli::{output, problem_table, run_convergence, run_experiment, Axis, CliError};

#[derive(Parser)]
#[command(
    name = "msnls",
    version,
    about = "Structure-preserving solvers for the nonlinear Schrodinger equation with wave operator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured scheme(s) and write series, snapshots and metadata.
    Run { config: PathBuf },
    /// Refine one mesh axis and fit the convergence order.
    Converge {
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Run both schemes on the same configuration.
    Compare { config: PathBuf },
    /// Print the built-in problems.
    ListProblems,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Space,
    Time,
}

fn load(path: &Path) -> Result<Resolved, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

fn execute(command: Command, out_dir: &mut Option<PathBuf>) -> Result<(), CliError> {
    match command {
        Command::Run { config } => {
            let run = load(&config)?;
            *out_dir = Some(run.config.output_dir.clone());
            report_runs(&run, false)
        }
        Command::Compare { config } => {
            let run = load(&config)?;
            *out_dir = Some(run.config.output_dir.clone());
            report_runs(&run, true)
        }
        Command::Converge {
            config,
            axis,
            levels,
        } => {
            let run = load(&config)?;
            *out_dir = Some(run.config.output_dir.clone());
            let axis = match axis {
                AxisArg::Space => Axis::Space,
                AxisArg::Time => Axis::Time,
            };
            for sweep in run_convergence(&run, axis, levels)? {
                println!(
                    "{} {} sweep: fitted order {:.4}",
                    sweep.scheme,
                    axis.as_str(),
                    sweep.order
                );
                for (mesh, err) in &sweep.samples {
                    println!("  mesh {mesh:.6e}  err_max {err:.6e}");
                }
            }
            Ok(())
        }
        Command::ListProblems => {
            for line in problem_table() {
                println!("{line}");
            }
            Ok(())
        }
    }
}

fn report_runs(run: &Resolved, both: bool) -> Result<(), CliError> {
    let summary = run_experiment(run, both)?;
    for (dir, tr) in summary.dirs.iter().zip(&summary.trajectories) {
        println!(
            "{}: {} steps, energy drift {:.3e}, mass drift {:.3e}, fp iterations {} -> {}",
            tr.scheme,
            tr.rows.len(),
            tr.energy_drift(),
            tr.mass_drift(),
            tr.total_fp_iters,
            dir.display()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out_dir = None;
    match execute(cli.command, &mut out_dir) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let record = err.record();
            eprintln!("{record}");
            if let Some(dir) = out_dir {
                if output::ensure_dir(&dir).is_ok() {
                    let _ = output::write_json(&dir.join("error.json"), &record);
                }
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
