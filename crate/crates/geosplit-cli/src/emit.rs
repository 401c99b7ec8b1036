//! Trace output: CSV and JSON renderings of a solve run.
//!
//! Both formats carry the resolved config, so every artifact is
//! self-describing, and both render numbers with 17 significant digits,
//! enough to reconstruct each double exactly. Files are written atomically
//! (temp file plus rename).

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use geosplit::solver::SolverTrace;

use crate::config::TraceFormat;

/// 17 significant digits: lossless for f64.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        sig17(x)
    } else {
        "null".into()
    }
}

pub fn render_csv(trace: &SolverTrace, echo: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in echo {
        let _ = writeln!(out, "# {k} = {v}");
    }
    let _ = writeln!(out, "# status = {}", trace.status.label());
    let _ = writeln!(out, "iter,stop_metric,residual,min_residual,objective,elapsed_ms");
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            sig17(r.stop_metric),
            sig17(r.residual),
            sig17(r.min_residual),
            sig17(r.objective),
            sig17(r.elapsed_ms)
        );
    }
    out
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn json_point(coords: &[f64]) -> String {
    let body: Vec<String> = coords.iter().map(|c| json_number(*c)).collect();
    format!("[{}]", body.join(","))
}

pub fn render_json(trace: &SolverTrace, echo: &[(String, String)]) -> String {
    let mut out = String::from("{\n  \"config\": [\n");
    for (i, (k, v)) in echo.iter().enumerate() {
        let comma = if i + 1 < echo.len() { "," } else { "" };
        let _ = writeln!(out, "    [{}, {}]{comma}", json_string(k), json_string(v));
    }
    let _ = writeln!(out, "  ],");
    let _ = writeln!(out, "  \"status\": {},", json_string(trace.status.label()));
    if let Some(v) = &trace.v {
        let _ = writeln!(out, "  \"v\": {},", json_point(&v.coords));
    }
    if let Some(u) = &trace.u {
        let _ = writeln!(out, "  \"u\": {},", json_point(&u.coords));
    }
    let _ = writeln!(out, "  \"records\": [");
    for (i, r) in trace.records.iter().enumerate() {
        let comma = if i + 1 < trace.records.len() { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{\"iter\": {}, \"stop_metric\": {}, \"residual\": {}, \"min_residual\": {}, \
             \"objective\": {}, \"elapsed_ms\": {}}}{comma}",
            r.n,
            json_number(r.stop_metric),
            json_number(r.residual),
            json_number(r.min_residual),
            json_number(r.objective),
            json_number(r.elapsed_ms)
        );
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn render(trace: &SolverTrace, echo: &[(String, String)], format: &TraceFormat) -> String {
    match format {
        TraceFormat::Csv => render_csv(trace, echo),
        TraceFormat::Json => render_json(trace, echo),
    }
}

/// Write a rendered trace atomically.
pub fn emit_trace(
    trace: &SolverTrace,
    echo: &[(String, String)],
    format: &TraceFormat,
    path: &Path,
) -> Result<()> {
    let body = render(trace, echo, format);
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create '{}'", dir.display()))?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, body).with_context(|| format!("cannot write '{}'", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("cannot move trace into '{}'", path.display()))?;
    Ok(())
}
