//! Experiment config files: a flat `key = value` text format.
//!
//! Grammar (one entry per line, `#` starts a comment):
//!
//! ```text
//! problem = rosenbrock | heron
//! method  = dr_mann | inertial_dr | pacc_dr
//! alpha   = <real in (0,1)>
//! theta   = <real in [0,1)>          # inertial only, default 0
//! p       = <integer >= 1>           # accelerated only, default 2
//! lambda  = <positive real>
//! tol     = <positive real>          # default 1e-14
//! max_iter = <positive integer>      # default 100000
//! x0      = <coords> | ones | constant <v>
//! x1      = <coords> | ones | constant <v>   # inertial only
//! format  = csv | json               # default csv
//! out     = <path>                   # optional trace output
//!
//! # rosenbrock problem
//! a = <positive real>
//! b = <positive real>
//!
//! # heron problem
//! dim = <base dimension m>
//! constraint_center = <m coords>
//! constraint_radius = <positive real>
//! target = point <m coords>          # repeatable
//! target = ball <radius> <m coords>  # repeatable
//! ```
//!
//! Start points for the Heron problem live on the lifted product manifold
//! `M^(N+1)`; the `ones` / `constant` forms fill every coordinate.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use geosplit::manifold::{GeometryError, Manifold, Point};
use geosplit::problems::{
    build_heron, build_rosenbrock, HeronInstance, LiftedHeron, RosenbrockSplitting, TargetSet,
};
use geosplit::solver::{validate_params, FixedPointProblem, Method, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum TraceFormat {
    Csv,
    Json,
}

impl TraceFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TraceFormat::Csv),
            "json" => Ok(TraceFormat::Json),
            other => bail!("unknown format '{other}', expected csv or json"),
        }
    }
}

#[derive(Debug, Clone)]
enum StartSpec {
    Coords(Vec<f64>),
    Constant(f64),
}

#[derive(Debug, Clone)]
enum ProblemSpec {
    Rosenbrock {
        a: f64,
        b: f64,
    },
    Heron {
        dim: usize,
        constraint_center: Vec<f64>,
        constraint_radius: f64,
        targets: Vec<(f64, Vec<f64>)>, // radius 0 encodes a point target
    },
}

/// A parsed and fully validated experiment: the built problem plus solver
/// parameters and output options.
pub struct Experiment {
    pub problem: BuiltProblem,
    pub solver: SolverConfig,
    pub format: TraceFormat,
    pub out: Option<PathBuf>,
    /// Resolved `key = value` pairs for self-describing trace headers.
    pub echo: Vec<(String, String)>,
}

/// Either bundled problem behind one fixed-point interface.
pub enum BuiltProblem {
    Rosenbrock(RosenbrockSplitting),
    Heron(LiftedHeron),
}

impl FixedPointProblem for BuiltProblem {
    fn manifold(&self) -> &Manifold {
        match self {
            BuiltProblem::Rosenbrock(p) => p.manifold(),
            BuiltProblem::Heron(p) => p.manifold(),
        }
    }
    fn apply(&self, x: &Point) -> Result<Point, GeometryError> {
        match self {
            BuiltProblem::Rosenbrock(p) => p.apply(x),
            BuiltProblem::Heron(p) => p.apply(x),
        }
    }
    fn recover(&self, x: &Point) -> Result<Point, GeometryError> {
        match self {
            BuiltProblem::Rosenbrock(p) => p.recover(x),
            BuiltProblem::Heron(p) => p.recover(x),
        }
    }
    fn objective(&self, block: &Point) -> f64 {
        match self {
            BuiltProblem::Rosenbrock(p) => p.objective(block),
            BuiltProblem::Heron(p) => p.objective(block),
        }
    }
}

struct RawConfig {
    values: BTreeMap<String, String>,
    targets: Vec<String>,
}

fn parse_raw(text: &str) -> Result<RawConfig> {
    let mut values = BTreeMap::new();
    let mut targets = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected 'key = value', got '{line}'", lineno + 1))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if value.is_empty() {
            bail!("line {}: empty value for '{key}'", lineno + 1);
        }
        if key == "target" {
            targets.push(value);
        } else if values.insert(key.clone(), value).is_some() {
            bail!("line {}: duplicate key '{key}'", lineno + 1);
        }
    }
    Ok(RawConfig { values, targets })
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|tok| tok.parse::<f64>().with_context(|| format!("bad number '{tok}'")))
        .collect()
}

fn parse_start(s: &str) -> Result<StartSpec> {
    if s == "ones" {
        return Ok(StartSpec::Constant(1.0));
    }
    if let Some(rest) = s.strip_prefix("constant") {
        let v: f64 = rest.trim().parse().with_context(|| format!("bad constant '{rest}'"))?;
        return Ok(StartSpec::Constant(v));
    }
    Ok(StartSpec::Coords(parse_floats(s)?))
}

fn fmt_floats(v: &[f64]) -> String {
    let mut out = String::new();
    for (i, c) in v.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{c}");
    }
    out
}

/// Parse, validate, and build an experiment from config text. Collects every
/// field-level problem into the error message instead of stopping at the
/// first one.
pub fn load_config_text(text: &str) -> Result<Experiment> {
    let raw = parse_raw(text)?;
    let mut errors: Vec<String> = Vec::new();
    let get = |key: &str| raw.values.get(key).map(String::as_str);

    let field = |key: &str, required: bool, errors: &mut Vec<String>| -> Option<String> {
        match get(key) {
            Some(v) => Some(v.to_string()),
            None => {
                if required {
                    errors.push(format!("missing required key '{key}'"));
                }
                None
            }
        }
    };

    let problem_kind = field("problem", true, &mut errors);
    let method = match field("method", true, &mut errors).as_deref() {
        Some("dr_mann") => Method::DrMann,
        Some("inertial_dr") => Method::InertialDr,
        Some("pacc_dr") => Method::PaccDr,
        Some(other) => {
            errors.push(format!(
                "unknown method '{other}', expected dr_mann, inertial_dr or pacc_dr"
            ));
            Method::DrMann
        }
        None => Method::DrMann,
    };

    let num = |key: &str, default: Option<f64>, errors: &mut Vec<String>| -> f64 {
        match get(key) {
            Some(v) => v.parse::<f64>().unwrap_or_else(|_| {
                errors.push(format!("key '{key}': bad number '{v}'"));
                f64::NAN
            }),
            None => match default {
                Some(d) => d,
                None => {
                    errors.push(format!("missing required key '{key}'"));
                    f64::NAN
                }
            },
        }
    };

    let alpha = num("alpha", None, &mut errors);
    let theta = num("theta", Some(0.0), &mut errors);
    let lambda = num("lambda", None, &mut errors);
    let tol = num("tol", Some(1e-14), &mut errors);
    let p = match get("p") {
        Some(v) => v.parse::<u32>().unwrap_or_else(|_| {
            errors.push(format!("key 'p': bad integer '{v}'"));
            0
        }),
        None => 2,
    };
    let max_iter = match get("max_iter") {
        Some(v) => v.parse::<usize>().unwrap_or_else(|_| {
            errors.push(format!("key 'max_iter': bad integer '{v}'"));
            0
        }),
        None => 100_000,
    };
    let format = match get("format") {
        Some(v) => TraceFormat::parse(v).unwrap_or_else(|e| {
            errors.push(e.to_string());
            TraceFormat::Csv
        }),
        None => TraceFormat::Csv,
    };
    let out = get("out").map(PathBuf::from);

    let spec = match problem_kind.as_deref() {
        Some("rosenbrock") => {
            if !raw.targets.is_empty() {
                errors.push("'target' keys are only valid for the heron problem".into());
            }
            Some(ProblemSpec::Rosenbrock {
                a: num("a", None, &mut errors),
                b: num("b", None, &mut errors),
            })
        }
        Some("heron") => {
            let dim = match get("dim") {
                Some(v) => v.parse::<usize>().unwrap_or_else(|_| {
                    errors.push(format!("key 'dim': bad integer '{v}'"));
                    0
                }),
                None => {
                    errors.push("missing required key 'dim'".into());
                    0
                }
            };
            let center = match get("constraint_center") {
                Some(v) => parse_floats(v).unwrap_or_else(|e| {
                    errors.push(format!("key 'constraint_center': {e}"));
                    Vec::new()
                }),
                None => {
                    errors.push("missing required key 'constraint_center'".into());
                    Vec::new()
                }
            };
            let radius = num("constraint_radius", None, &mut errors);
            let mut targets = Vec::new();
            if raw.targets.is_empty() {
                errors.push("heron problem needs at least one 'target' entry".into());
            }
            for t in &raw.targets {
                let mut toks = t.split_whitespace();
                match toks.next() {
                    Some("point") => {
                        match parse_floats(&toks.collect::<Vec<_>>().join(" ")) {
                            Ok(c) => targets.push((0.0, c)),
                            Err(e) => errors.push(format!("target '{t}': {e}")),
                        }
                    }
                    Some("ball") => {
                        let rest: Vec<&str> = toks.collect();
                        if rest.len() < 2 {
                            errors.push(format!("target '{t}': ball needs a radius and coords"));
                            continue;
                        }
                        match (rest[0].parse::<f64>(), parse_floats(&rest[1..].join(" "))) {
                            (Ok(r), Ok(c)) => targets.push((r, c)),
                            _ => errors.push(format!("target '{t}': bad ball entry")),
                        }
                    }
                    _ => errors.push(format!("target '{t}': expected 'point ...' or 'ball r ...'")),
                }
            }
            Some(ProblemSpec::Heron { dim, constraint_center: center, constraint_radius: radius, targets })
        }
        Some(other) => {
            errors.push(format!("unknown problem '{other}', expected rosenbrock or heron"));
            None
        }
        None => None,
    };

    let x0 = match get("x0") {
        Some(v) => match parse_start(v) {
            Ok(s) => Some(s),
            Err(e) => {
                errors.push(format!("key 'x0': {e}"));
                None
            }
        },
        None => {
            errors.push("missing required key 'x0'".into());
            None
        }
    };
    let x1 = match get("x1") {
        Some(v) => match parse_start(v) {
            Ok(s) => Some(s),
            Err(e) => {
                errors.push(format!("key 'x1': {e}"));
                None
            }
        },
        None => None,
    };

    for key in raw.values.keys() {
        const KNOWN: &[&str] = &[
            "problem", "method", "alpha", "theta", "p", "lambda", "tol", "max_iter", "x0", "x1",
            "format", "out", "a", "b", "dim", "constraint_center", "constraint_radius",
        ];
        if !KNOWN.contains(&key.as_str()) {
            errors.push(format!("unknown key '{key}'"));
        }
    }

    if !errors.is_empty() {
        bail!("invalid config:\n  - {}", errors.join("\n  - "));
    }
    let spec = spec.expect("present when no errors");
    let x0 = x0.expect("present when no errors");

    build_experiment(spec, method, alpha, theta, p, lambda, tol, max_iter, x0, x1, format, out)
}

#[allow(clippy::too_many_arguments)]
fn build_experiment(
    spec: ProblemSpec,
    method: Method,
    alpha: f64,
    theta: f64,
    p: u32,
    lambda: f64,
    tol: f64,
    max_iter: usize,
    x0: StartSpec,
    x1: Option<StartSpec>,
    format: TraceFormat,
    out: Option<PathBuf>,
) -> Result<Experiment> {
    let mut echo: Vec<(String, String)> = Vec::new();
    let problem = match &spec {
        ProblemSpec::Rosenbrock { a, b } => {
            echo.push(("problem".into(), "rosenbrock".into()));
            echo.push(("a".into(), format!("{a}")));
            echo.push(("b".into(), format!("{b}")));
            BuiltProblem::Rosenbrock(build_rosenbrock(*a, *b, lambda)?)
        }
        ProblemSpec::Heron { dim, constraint_center, constraint_radius, targets } => {
            echo.push(("problem".into(), "heron".into()));
            echo.push(("dim".into(), format!("{dim}")));
            echo.push(("constraint_center".into(), fmt_floats(constraint_center)));
            echo.push(("constraint_radius".into(), format!("{constraint_radius}")));
            let base = Manifold::LogOrthant(*dim);
            let center = base.point(constraint_center.clone())?;
            let mut sets = Vec::new();
            for (r, coords) in targets {
                let p = base.point(coords.clone())?;
                if *r == 0.0 {
                    echo.push(("target".into(), format!("point {}", fmt_floats(coords))));
                    sets.push(TargetSet::Point(p));
                } else {
                    echo.push(("target".into(), format!("ball {r} {}", fmt_floats(coords))));
                    sets.push(TargetSet::Ball { center: p, radius: *r });
                }
            }
            let instance =
                HeronInstance::new(base, center, *constraint_radius, sets, lambda)?;
            BuiltProblem::Heron(build_heron(instance)?)
        }
    };

    let manifold = problem.manifold().clone();
    let make_point = |s: &StartSpec| -> Result<Point> {
        Ok(match s {
            StartSpec::Coords(c) => manifold.point(c.clone())?,
            StartSpec::Constant(v) => manifold.constant_point(*v)?,
        })
    };
    let x0_point = make_point(&x0).context("key 'x0'")?;
    let x1_point = match &x1 {
        Some(s) => Some(make_point(s).context("key 'x1'")?),
        None => None,
    };

    let solver = SolverConfig {
        method,
        alpha,
        theta,
        p,
        lambda,
        tol,
        max_iter,
        x0: x0_point,
        x1: x1_point,
    };
    let report = validate_params(&solver);
    if !report.is_ok() {
        let mut msg = format!("invalid solver parameters:\n  - {}", report.violations.join("\n  - "));
        if let Some(bound) = report.theta_max {
            let _ = write!(msg, "\n  (admissible momentum bound theta_max = {bound})");
        }
        bail!(msg);
    }

    echo.push(("method".into(), method.label().into()));
    echo.push(("alpha".into(), format!("{alpha}")));
    echo.push(("theta".into(), format!("{theta}")));
    echo.push(("p".into(), format!("{p}")));
    echo.push(("lambda".into(), format!("{lambda}")));
    echo.push(("tol".into(), format!("{tol}")));
    echo.push(("max_iter".into(), format!("{max_iter}")));
    echo.push(("x0".into(), fmt_floats(&solver.x0.coords)));
    if let Some(x1) = &solver.x1 {
        echo.push(("x1".into(), fmt_floats(&x1.coords)));
    }

    Ok(Experiment { problem, solver, format, out, echo })
}

/// Load an experiment from a file path.
pub fn load_config(path: &std::path::Path) -> Result<Experiment> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config '{}'", path.display()))?;
    load_config_text(&text).with_context(|| format!("in config '{}'", path.display()))
}

impl Experiment {
    /// Same experiment with a different method (and an adjusted echo).
    pub fn with_method(&self, method: Method) -> Experiment
    where
        BuiltProblem: Clone,
    {
        let mut solver = self.solver.clone();
        solver.method = method;
        let echo = self
            .echo
            .iter()
            .map(|(k, v)| {
                if k == "method" {
                    (k.clone(), method.label().to_string())
                } else {
                    (k.clone(), v.clone())
                }
            })
            .collect();
        Experiment {
            problem: self.problem.clone(),
            solver,
            format: self.format.clone(),
            out: self.out.clone(),
            echo,
        }
    }
}

impl Clone for BuiltProblem {
    fn clone(&self) -> Self {
        match self {
            BuiltProblem::Rosenbrock(p) => BuiltProblem::Rosenbrock(p.clone()),
            BuiltProblem::Heron(p) => BuiltProblem::Heron(p.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_ROSENBROCK: &str = "\
problem = rosenbrock
method = dr_mann
alpha = 0.5
lambda = 1
a = 1
b = 2
x0 = 1 2
";

    #[test]
    fn minimal_config_fills_defaults() {
        let exp = load_config_text(MINIMAL_ROSENBROCK).unwrap();
        assert_eq!(exp.solver.tol, 1e-14);
        assert_eq!(exp.solver.max_iter, 100_000);
        assert_eq!(exp.solver.p, 2);
        assert_eq!(exp.format, TraceFormat::Csv);
    }

    #[test]
    fn momentum_violation_cites_the_bound() {
        let text = format!("{MINIMAL_ROSENBROCK}x1 = 1 3\ntheta = 0.9\n")
            .replace("method = dr_mann", "method = inertial_dr");
        let err = load_config_text(&text).unwrap_err().to_string();
        assert!(err.contains("theta_max"), "{err}");
        assert!(err.contains("0.3333333333333333"), "{err}");
    }

    #[test]
    fn missing_x1_for_inertial_is_rejected() {
        let text = MINIMAL_ROSENBROCK.replace("method = dr_mann", "method = inertial_dr");
        let err = load_config_text(&text).unwrap_err().to_string();
        assert!(err.contains("x1"), "{err}");
    }

    #[test]
    fn field_errors_are_collected() {
        let err = load_config_text("problem = heron\nmethod = nope\nalpha = x\n")
            .unwrap_err()
            .to_string();
        for needle in ["unknown method", "alpha", "dim", "x0", "target"] {
            assert!(err.contains(needle), "missing '{needle}' in: {err}");
        }
    }

    #[test]
    fn heron_config_builds_the_lifted_problem() {
        let text = "\
problem = heron
dim = 2
constraint_center = 35 35
constraint_radius = 0.4
target = point 15 70
target = ball 0.4 70 15
lambda = 0.45
method = dr_mann
alpha = 0.7
x0 = ones
";
        let exp = load_config_text(text).unwrap();
        // lifted over M^(N+1) with N = 2 targets
        assert_eq!(exp.problem.manifold().dim(), 6);
        assert_eq!(exp.solver.x0.coords, vec![1.0; 6]);
    }
}
