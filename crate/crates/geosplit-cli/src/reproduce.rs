//! Bundled benchmark tables: each table is one or two experiment configs run
//! once per method.

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Result};
use geosplit::solver::{solve, Method, SolverTrace, TerminalStatus};

use crate::config::{load_config_text, Experiment};
use crate::emit::{emit_trace, sig17};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    Table1,
    Table2,
    Table3,
    Table4,
}

impl Table {
    pub fn parse(s: &str) -> Result<Table> {
        Ok(match s {
            "table1" => Table::Table1,
            "table2" => Table::Table2,
            "table3" => Table::Table3,
            "table4" => Table::Table4,
            other => bail!("unknown table '{other}', expected table1..table4"),
        })
    }
}

pub struct CaseSpec {
    pub name: &'static str,
    pub text: &'static str,
}

pub fn cases(table: Table) -> &'static [CaseSpec] {
    match table {
        Table::Table1 => &[CaseSpec { name: "table1", text: include_str!("../configs/table1.conf") }],
        Table::Table2 => &[
            CaseSpec { name: "table2_case1", text: include_str!("../configs/table2_case1.conf") },
            CaseSpec { name: "table2_case2", text: include_str!("../configs/table2_case2.conf") },
        ],
        Table::Table3 => &[
            CaseSpec { name: "table3_case1", text: include_str!("../configs/table3_case1.conf") },
            CaseSpec { name: "table3_case2", text: include_str!("../configs/table3_case2.conf") },
        ],
        Table::Table4 => &[
            CaseSpec { name: "table4_case1", text: include_str!("../configs/table4_case1.conf") },
            CaseSpec { name: "table4_case2", text: include_str!("../configs/table4_case2.conf") },
        ],
    }
}

/// One summary line of a benchmark run.
pub struct SummaryRow {
    pub algorithm: &'static str,
    pub iterations: usize,
    pub stop_metric: f64,
    pub wall_ms: f64,
}

pub const METHOD_ORDER: [Method; 3] = [Method::DrMann, Method::InertialDr, Method::PaccDr];

/// Run every method of a case config. Returns one row and trace per method.
pub fn run_case(case: &CaseSpec) -> Result<Vec<(SummaryRow, SolverTrace, Experiment)>> {
    let base = load_config_text(case.text)?;
    let mut out = Vec::new();
    for method in METHOD_ORDER {
        let experiment = base.with_method(method);
        let started = Instant::now();
        let trace = solve(&experiment.problem, &experiment.solver)?;
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        if trace.status != TerminalStatus::Converged {
            bail!(
                "{} with {} did not converge (status {})",
                case.name,
                method.label(),
                trace.status.label()
            );
        }
        out.push((
            SummaryRow {
                algorithm: method.label(),
                iterations: trace.iterations(),
                stop_metric: trace.final_stop_metric().unwrap_or(f64::NAN),
                wall_ms,
            },
            trace,
            experiment,
        ));
    }
    Ok(out)
}

/// Run a whole table, print its summary, optionally write per-run traces.
pub fn run_table(table: Table, out_dir: Option<&Path>) -> Result<()> {
    for case in cases(table) {
        println!("{}", case.name);
        println!("  {:<12} {:>10}  {:<22} {:>10}", "algorithm", "iterations", "stop_metric", "wall_ms");
        for (row, trace, experiment) in run_case(case)? {
            println!(
                "  {:<12} {:>10}  {:<22} {:>10.3}",
                row.algorithm,
                row.iterations,
                sig17(row.stop_metric),
                row.wall_ms
            );
            if let Some(dir) = out_dir {
                let path = dir.join(format!("{}_{}.csv", case.name, row.algorithm));
                emit_trace(&trace, &experiment.echo, &experiment.format, &path)?;
            }
        }
    }
    Ok(())
}
