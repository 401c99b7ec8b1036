//! Fixed-point iterations for nonexpansive maps on Hadamard manifolds.
//!
//! Three methods share one driver:
//!
//! * `dr_mann` — the relaxed (Krasnoselskii-Mann) iteration
//!   `x_{n+1} = gamma(x_n, T x_n; alpha_n)`.
//! * `inertial_dr` — a momentum pre-step `y_n = exp_{x_n}(-theta_n log_{x_n} x_{n-1})`
//!   followed by the Mann step from `y_n`.
//! * `pacc_dr` — the p-accelerated normal-S step: Mann point, then `p` extra
//!   applications of `T`.
//!
//! A solve run is strictly sequential; distinct runs share no mutable state.

use std::time::Instant;

use thiserror::Error;

use crate::manifold::{GeometryError, Manifold, Point};

/// Which fixed-point iteration to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    DrMann,
    InertialDr,
    PaccDr,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::DrMann => "dr_mann",
            Method::InertialDr => "inertial_dr",
            Method::PaccDr => "pacc_dr",
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("non-finite coordinate detected at iteration {iter}")]
    NonFinite { iter: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A fixed-point problem: the nonexpansive map `T`, the recovery map that
/// turns a fixed-point estimate into a solution estimate, and an objective
/// for reporting.
pub trait FixedPointProblem {
    fn manifold(&self) -> &Manifold;

    /// One application of the nonexpansive map.
    fn apply(&self, x: &Point) -> Result<Point, GeometryError>;

    /// Solution recovery from a fixed-point estimate (identity by default).
    fn recover(&self, x: &Point) -> Result<Point, GeometryError> {
        Ok(x.clone())
    }

    /// Objective value at a recovered solution block; NaN when the problem
    /// carries no objective.
    fn objective(&self, _block: &Point) -> f64 {
        f64::NAN
    }
}

/// Solver parameters. Relaxation and momentum weights are constant over the
/// run, so condition (C1) reads `a = b = alpha`.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub method: Method,
    /// Relaxation weight `alpha in (0, 1)` of the Mann step.
    pub alpha: f64,
    /// Momentum weight `theta in [0, 1)`; inertial method only.
    pub theta: f64,
    /// Acceleration power `p >= 1`; p-accelerated method only.
    pub p: u32,
    /// Step size of the underlying proximal operators, echoed into traces.
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub x0: Point,
    /// Second starting point, required by the inertial method.
    pub x1: Option<Point>,
}

/// Outcome of [`validate_params`]: the computed momentum bound and one entry
/// per violated condition.
#[derive(Debug, Clone)]
pub struct ParamReport {
    /// Largest admissible momentum `theta_max = eps / (1 + eps + max(1, eps))`
    /// with `eps = (1 - b) / b`; only meaningful for the inertial method.
    pub theta_max: Option<f64>,
    pub violations: Vec<String>,
}

impl ParamReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Largest momentum weight admitted by condition (C3) for Mann upper bound `b`.
pub fn theta_bound(b: f64) -> f64 {
    let eps = (1.0 - b) / b;
    eps / (1.0 + eps + eps.max(1.0))
}

/// Check the method's parameter conditions. Reports, never throws.
pub fn validate_params(config: &SolverConfig) -> ParamReport {
    let mut violations = Vec::new();
    let mut theta_max = None;

    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        violations.push(format!("alpha = {} outside (0, 1)", config.alpha));
    }
    if !(config.tol > 0.0) {
        violations.push(format!("tol = {} must be positive", config.tol));
    }
    if config.max_iter == 0 {
        violations.push("max_iter must be at least 1".into());
    }
    if !(config.lambda > 0.0) {
        violations.push(format!("lambda = {} must be positive", config.lambda));
    }

    match config.method {
        Method::DrMann => {}
        Method::PaccDr => {
            if config.p == 0 {
                violations.push("acceleration power p must be at least 1".into());
            }
        }
        Method::InertialDr => {
            if config.x1.is_none() {
                violations.push("inertial method requires the second starting point x1".into());
            }
            if !(0.0..1.0).contains(&config.theta) {
                violations.push(format!("theta = {} outside [0, 1)", config.theta));
            } else if config.alpha > 0.0 && config.alpha < 1.0 {
                let bound = theta_bound(config.alpha);
                theta_max = Some(bound);
                if config.theta > 0.0 && config.theta >= bound {
                    violations.push(format!(
                        "theta = {} violates the momentum bound theta_max = {bound} for b = {}",
                        config.theta, config.alpha
                    ));
                }
            }
        }
    }

    ParamReport { theta_max, violations }
}

/// One Mann step `gamma(x, T x; alpha)`.
pub fn step_mann<P: FixedPointProblem + ?Sized>(
    problem: &P,
    x: &Point,
    alpha: f64,
) -> Result<Point, SolverError> {
    let tx = problem.apply(x)?;
    Ok(problem.manifold().geodesic(x, &tx, alpha)?)
}

/// One inertial step: extrapolate, then Mann from the extrapolated point.
/// Returns `(x_next, y)`.
pub fn step_inertial<P: FixedPointProblem + ?Sized>(
    problem: &P,
    x: &Point,
    x_prev: &Point,
    alpha: f64,
    theta: f64,
) -> Result<(Point, Point), SolverError> {
    let m = problem.manifold();
    let y = m.inertial_extrapolate(x, x_prev, theta)?;
    let ty = problem.apply(&y)?;
    let next = m.geodesic(&y, &ty, alpha)?;
    Ok((next, y))
}

/// One p-accelerated normal-S step: Mann point, then `p` applications of `T`.
pub fn step_pacc<P: FixedPointProblem + ?Sized>(
    problem: &P,
    x: &Point,
    alpha: f64,
    p: u32,
) -> Result<Point, SolverError> {
    let mut y = step_mann(problem, x, alpha)?;
    for _ in 0..p {
        y = problem.apply(&y)?;
    }
    Ok(y)
}

/// Running minimum of the fixed-point residual stream.
pub fn min_residual_update(prev_min: f64, residual: f64) -> f64 {
    prev_min.min(residual)
}

/// Squared-residual bound of the inertial method run with `x0 = x1`:
/// `min_{i<=n} d^2(x_i, T x_i) <= 5 / (a (1-b)) * (1 + th^2(1+th)/(K(1-th)^2)
/// + th(1+th)/(K(1-th))) * d^2(x0, v) / n` with
/// `K = eps - th (1 + eps + max(1, eps))`.
pub fn rate_certificate_inertial(
    a: f64,
    b: f64,
    theta: f64,
    d0: f64,
    n: usize,
) -> Result<f64, SolverError> {
    if !(0.0 < a && a <= b && b < 1.0) {
        return Err(SolverError::InvalidParameter(format!(
            "need 0 < a <= b < 1, got a = {a}, b = {b}"
        )));
    }
    if !(0.0..1.0).contains(&theta) {
        return Err(SolverError::InvalidParameter(format!("theta = {theta} outside [0, 1)")));
    }
    let eps = (1.0 - b) / b;
    let k = eps - theta * (1.0 + eps + eps.max(1.0));
    if k <= 0.0 {
        return Err(SolverError::InvalidParameter(format!(
            "momentum constant K = {k} is not positive; theta exceeds the admissible bound"
        )));
    }
    let one_minus = 1.0 - theta;
    let factor = 1.0
        + theta * theta * (1.0 + theta) / (k * one_minus * one_minus)
        + theta * (1.0 + theta) / (k * one_minus);
    Ok(5.0 / (a * (1.0 - b)) * factor * d0 * d0 / n as f64)
}

/// Residual bound of the p-accelerated method with constant relaxation:
/// `d(x_n, T x_n) <= d(x0, v) / sqrt(sum_{i<=n} alpha (1 - alpha))`.
pub fn rate_certificate_pacc(alpha: f64, d0: f64, n: usize) -> f64 {
    d0 / (n as f64 * alpha * (1.0 - alpha)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    Converged,
    MaxIter,
    ParamInvalid,
}

impl TerminalStatus {
    pub fn label(&self) -> &'static str {
        match self {
            TerminalStatus::Converged => "converged",
            TerminalStatus::MaxIter => "max_iter",
            TerminalStatus::ParamInvalid => "param_invalid",
        }
    }
}

/// Per-iteration record of a solve run.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub n: usize,
    pub point: Point,
    /// Fixed-point residual `d(x_n, T x_n)`.
    pub residual: f64,
    /// Running minimum of the residual stream up to `n`.
    pub min_residual: f64,
    /// Stopping metric `E_n`: base-manifold distance between the first blocks
    /// of consecutive recovered solutions.
    pub stop_metric: f64,
    pub objective: f64,
    pub elapsed_ms: f64,
}

/// Full record of a solve run.
#[derive(Debug, Clone)]
pub struct SolverTrace {
    pub config: SolverConfig,
    pub records: Vec<IterationRecord>,
    pub status: TerminalStatus,
    pub param_violations: Vec<String>,
    /// Terminal fixed-point estimate.
    pub v: Option<Point>,
    /// Recovered solution `u` (first block of the recovery of `v`).
    pub u: Option<Point>,
}

impl SolverTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_stop_metric(&self) -> Option<f64> {
        self.records.last().map(|r| r.stop_metric)
    }
}

/// Run the configured iteration until the stopping metric drops below `tol`
/// or `max_iter` steps have been taken. Records every iteration.
pub fn solve<P: FixedPointProblem + ?Sized>(
    problem: &P,
    config: &SolverConfig,
) -> Result<SolverTrace, SolverError> {
    let report = validate_params(config);
    if !report.is_ok() {
        return Ok(SolverTrace {
            config: config.clone(),
            records: Vec::new(),
            status: TerminalStatus::ParamInvalid,
            param_violations: report.violations,
            v: None,
            u: None,
        });
    }

    let m = problem.manifold().clone();
    let base = m.base().clone();
    let start = Instant::now();

    let mut prev: Point; // previous iterate, inertial only
    let mut cur: Point;
    match config.method {
        Method::InertialDr => {
            prev = config.x0.clone();
            cur = config.x1.clone().expect("validated above");
        }
        _ => {
            prev = config.x0.clone();
            cur = config.x0.clone();
        }
    }

    let mut prev_block = m.first_block(&problem.recover(&cur)?)?;
    // T(cur), reused across Mann-type steps
    let mut t_cur: Option<Point> = None;
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut min_res = f64::INFINITY;
    let mut status = TerminalStatus::MaxIter;

    for n in 1..=config.max_iter {
        let next = match config.method {
            Method::DrMann => {
                let tx = match t_cur.take() {
                    Some(t) => t,
                    None => problem.apply(&cur)?,
                };
                m.geodesic(&cur, &tx, config.alpha)?
            }
            Method::PaccDr => {
                let tx = match t_cur.take() {
                    Some(t) => t,
                    None => problem.apply(&cur)?,
                };
                let mut y = m.geodesic(&cur, &tx, config.alpha)?;
                for _ in 0..config.p {
                    y = problem.apply(&y)?;
                }
                y
            }
            Method::InertialDr => {
                let y = m.inertial_extrapolate(&cur, &prev, config.theta)?;
                let ty = problem.apply(&y)?;
                m.geodesic(&y, &ty, config.alpha)?
            }
        };
        if !next.is_finite() {
            return Err(SolverError::NonFinite { iter: n });
        }

        let t_next = problem.apply(&next)?;
        let residual = m.dist(&next, &t_next)?;
        min_res = min_residual_update(min_res, residual);

        let block = m.first_block(&problem.recover(&next)?)?;
        let stop_metric = base.dist(&block, &prev_block)?;
        let objective = problem.objective(&block);

        records.push(IterationRecord {
            n,
            point: next.clone(),
            residual,
            min_residual: min_res,
            stop_metric,
            objective,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });

        prev_block = block;
        match config.method {
            Method::InertialDr => {
                prev = cur;
                cur = next;
            }
            _ => {
                cur = next;
                t_cur = Some(t_next);
            }
        }

        if stop_metric < config.tol {
            status = TerminalStatus::Converged;
            break;
        }
    }

    let u = m.first_block(&problem.recover(&cur)?)?;
    Ok(SolverTrace {
        config: config.clone(),
        records,
        status,
        param_violations: Vec::new(),
        v: Some(cur),
        u: Some(u),
    })
}
