//! Benchmark CLI: run splitting experiments from config files, validate
//! configs, compare against the independent reference solvers, and re-run the
//! bundled benchmark tables.
//!
//! Exit codes: 0 on success, 1 on config/validation failure, 2 on solver
//! abort or I/O failure.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};
use geosplit::manifold::Manifold;
use geosplit::problems::{euclidean_heron_oracle, heron_objective, OracleError};
use geosplit::solver::{solve, TerminalStatus};

use geosplit_cli::config::{load_config, BuiltProblem, TraceFormat};
use geosplit_cli::{emit, reproduce};

#[derive(Parser)]
#[command(name = "geosplit", version, about = "Geodesic splitting benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a config file
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Trace output path (overrides the config's `out`)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trace format: csv or json (overrides the config's `format`)
        #[arg(long)]
        format: Option<String>,
    },
    /// Parse and validate a config file without running it
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve, then cross-check against the independent reference solution
    OracleCompare {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-run a bundled benchmark table (table1..table4)
    Reproduce {
        table: String,
        /// Directory for per-run trace files
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {:#}", e.inner);
            e.code
        }
    };
    std::process::exit(code);
}

struct CliError {
    code: i32,
    inner: anyhow::Error,
}

fn validation_err(e: anyhow::Error) -> CliError {
    CliError { code: 1, inner: e }
}

fn abort_err(e: anyhow::Error) -> CliError {
    CliError { code: 2, inner: e }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out, format } => cmd_run(&config, out, format),
        Command::Validate { config } => cmd_validate(&config),
        Command::OracleCompare { config } => cmd_oracle_compare(&config),
        Command::Reproduce { table, out_dir } => {
            let table = reproduce::Table::parse(&table).map_err(validation_err)?;
            reproduce::run_table(table, out_dir.as_deref()).map_err(abort_err)
        }
    }
}

fn cmd_run(path: &PathBuf, out: Option<PathBuf>, format: Option<String>) -> Result<(), CliError> {
    let mut experiment = load_config(path).map_err(validation_err)?;
    if let Some(f) = format {
        experiment.format = TraceFormat::parse(&f).map_err(validation_err)?;
    }
    if let Some(o) = out {
        experiment.out = Some(o);
    }

    let started = Instant::now();
    let trace = solve(&experiment.problem, &experiment.solver)
        .map_err(|e| abort_err(anyhow!(e)))?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    if trace.status == TerminalStatus::ParamInvalid {
        return Err(validation_err(anyhow!(
            "solver rejected parameters:\n  - {}",
            trace.param_violations.join("\n  - ")
        )));
    }

    println!(
        "{} {} iterations={} status={} stop_metric={} wall_ms={:.3}",
        experiment.solver.method.label(),
        path.display(),
        trace.iterations(),
        trace.status.label(),
        trace.final_stop_metric().map(emit::sig17).unwrap_or_else(|| "-".into()),
        wall_ms
    );
    if let Some(u) = &trace.u {
        println!("solution: {}", u.coords.iter().map(|c| emit::sig17(*c)).collect::<Vec<_>>().join(" "));
    }
    if let Some(out_path) = experiment.out.clone() {
        emit::emit_trace(&trace, &experiment.echo, &experiment.format, &out_path)
            .map_err(abort_err)?;
        println!("trace written to {}", out_path.display());
    }
    Ok(())
}

fn cmd_validate(path: &PathBuf) -> Result<(), CliError> {
    let experiment = load_config(path).map_err(validation_err)?;
    println!("ok: {}", path.display());
    for (k, v) in &experiment.echo {
        println!("  {k} = {v}");
    }
    Ok(())
}

fn cmd_oracle_compare(path: &PathBuf) -> Result<(), CliError> {
    let experiment = load_config(path).map_err(validation_err)?;
    let trace = solve(&experiment.problem, &experiment.solver)
        .map_err(|e| abort_err(anyhow!(e)))?;
    if trace.status != TerminalStatus::Converged {
        return Err(abort_err(anyhow!("solver did not converge ({})", trace.status.label())));
    }
    let u = trace.u.clone().expect("converged run has a solution");

    let (solver_objective, oracle_objective, point_gap) = match &experiment.problem {
        BuiltProblem::Rosenbrock(split) => {
            let minimizer = split.instance.minimizer();
            let gap = Manifold::Rosenbrock.dist(&u, &minimizer).map_err(|e| abort_err(anyhow!(e)))?;
            (split.instance.objective(&u), split.instance.objective(&minimizer), gap)
        }
        BuiltProblem::Heron(lifted) => {
            let instance = &lifted.instance;
            match euclidean_heron_oracle(instance, 1e-9, 500_000) {
                Ok(report) => {
                    let gap = instance
                        .base
                        .dist(&u, &report.point)
                        .map_err(|e| abort_err(anyhow!(e)))?;
                    let sobj = heron_objective(instance, &u).map_err(|e| abort_err(anyhow!(e)))?;
                    (sobj, report.objective, gap)
                }
                Err(e @ OracleError::NotConverged { .. }) => {
                    println!("inconclusive: {e}");
                    return Ok(());
                }
                Err(e) => return Err(abort_err(anyhow!(e))),
            }
        }
    };

    let objective_gap = (solver_objective - oracle_objective).abs();
    let pass = objective_gap <= 1e-6;
    println!("solver objective: {}", emit::sig17(solver_objective));
    println!("oracle objective: {}", emit::sig17(oracle_objective));
    println!("objective gap:    {}", emit::sig17(objective_gap));
    println!("point distance:   {}", emit::sig17(point_gap));
    println!("{}", if pass { "PASS (objective within 1e-6)" } else { "FAIL (objective gap above 1e-6)" });
    Ok(())
}
