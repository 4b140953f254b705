//! Continuation drivers.
//!
//! Each path is parametrized by `τ ∈ [0, 1]`. The driver advances `τ` by an
//! adaptive increment: halved after a failed Newton solve, doubled after
//! three consecutive first-try successes, clamped to
//! `[min_path_step, 1/path_steps]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase::{phase_constants, PhaseConstants};
use crate::solver::newton::newton_solve;
use crate::solver::{PathKind, Problem, SolverConfig, Target};
use crate::torus::{integrability_constant, phase_extremes, PhaseExtremes, Rhs};

/// One accepted point of a continuation run.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuityState {
    pub path: PathKind,
    /// Path parameter (`s` of the corresponding family).
    pub param: f64,
    /// Solved constant added to the path's right-hand side.
    pub c: f64,
    /// Integrability constant of the path's background form.
    pub calibrated: f64,
    pub residual_sup: f64,
    pub max_p: f64,
    pub max_q: f64,
    pub newton_iterations: usize,
    pub residual_history: Vec<f64>,
    #[serde(skip)]
    pub phi: Vec<f64>,
}

/// Why a path stopped early.
#[derive(Debug, Clone, Serialize)]
pub struct PathFailure {
    pub path: PathKind,
    /// Last accepted parameter, if any.
    pub last_param: Option<f64>,
    pub attempted_param: f64,
    pub reason_code: String,
    pub reason: String,
    /// Phase extremes of the last attempted background plus the last
    /// accepted potential, when they could be evaluated.
    pub max_p: Option<f64>,
    pub max_p_node: Option<usize>,
    pub max_q: Option<f64>,
    pub max_q_node: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathTrail {
    pub path: PathKind,
    pub states: Vec<ContinuityState>,
    pub failure: Option<PathFailure>,
}

/// Outcome of [`solve`].
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    /// Nonconstant right-hand side on `n ≤ 3`.
    pub beyond_hypothesis: bool,
    pub path: PathKind,
    #[serde(skip)]
    pub phi: Vec<f64>,
    pub c: f64,
    pub residual_sup: f64,
    pub max_p: f64,
    pub max_q: f64,
    /// `|integrability constant(ω_φ) − (mean f + c)|` at the final state.
    pub calibration_gap: f64,
    pub newton_iterations: usize,
    pub trails: Vec<PathTrail>,
    pub failure: Option<PathFailure>,
    pub constants: ConstantsReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub im_lower_bound: f64,
    pub sin_floor: f64,
    pub sin_slope: f64,
    pub tan_slope: f64,
}

impl From<PhaseConstants<f64>> for ConstantsReport {
    fn from(k: PhaseConstants<f64>) -> Self {
        Self {
            im_lower_bound: k.im_lower_bound,
            sin_floor: k.sin_floor,
            sin_slope: k.sin_slope,
            tan_slope: k.tan_slope,
        }
    }
}

fn cot(x: f64) -> f64 {
    1.0 / x.tan()
}

/// Upper end of the `add_chi` family: `cot(θ₀/2n) − cot θ₀`.
pub fn add_chi_upper(problem: &Problem) -> f64 {
    let theta0 = problem.cone().target_phase;
    let n = problem.grid().dim() as f64;
    cot(theta0 / (2.0 * n)) - cot(theta0)
}

struct Segment<'a> {
    kind: PathKind,
    param_at: Box<dyn Fn(f64) -> f64 + 'a>,
    target_at: Box<dyn Fn(f64) -> Target + 'a>,
    /// Whether the constant `c` follows the integrability constant of the
    /// background (constant right-hand sides).
    calibrates: bool,
    /// Largest increment in `τ`.
    max_step: f64,
}

struct Point {
    phi: Vec<f64>,
    c: f64,
    calibrated: f64,
}

fn calibration(problem: &Problem, target: &Target) -> Result<f64> {
    integrability_constant(&target.base_form(problem), problem.cone().target_phase)
}

fn record(
    kind: PathKind,
    param: f64,
    calibrated: f64,
    out: &crate::solver::NewtonOutcome,
) -> ContinuityState {
    ContinuityState {
        path: kind,
        param,
        c: out.iterate.c,
        calibrated,
        residual_sup: out.iterate.eval.sup,
        max_p: out.iterate.eval.extremes.max_p,
        max_q: out.iterate.eval.extremes.max_q,
        newton_iterations: out.iterations,
        residual_history: out.history.clone(),
        phi: out.iterate.phi.clone(),
    }
}

fn failure(
    problem: &Problem,
    kind: PathKind,
    last_param: Option<f64>,
    attempted: f64,
    target: &Target,
    phi: &[f64],
    err: &Error,
) -> PathFailure {
    let omega = target.base_form(problem).axpy(1.0, &problem.spectral().ddbar(phi));
    let ext: PhaseExtremes = phase_extremes(&omega);
    PathFailure {
        path: kind,
        last_param,
        attempted_param: attempted,
        reason_code: err.reason_code().to_string(),
        reason: err.to_string(),
        max_p: Some(ext.max_p),
        max_p_node: Some(ext.p_node),
        max_q: Some(ext.max_q),
        max_q_node: Some(ext.q_node),
    }
}

fn run_segment(problem: &Problem, config: &SolverConfig, seg: &Segment, start: Point) -> (PathTrail, Option<Point>) {
    let mut trail = PathTrail {
        path: seg.kind,
        states: Vec::new(),
        failure: None,
    };
    let solve_at = |tau: f64, from: &Point| -> std::result::Result<(ContinuityState, Point), (Target, Error)> {
        let param = (seg.param_at)(tau);
        let target = (seg.target_at)(param);
        let calibrated = match calibration(problem, &target) {
            Ok(v) => v,
            Err(e) => return Err((target, e)),
        };
        let c0 = if seg.calibrates {
            from.c + (calibrated - from.calibrated)
        } else {
            from.c
        };
        let base = target.base_form(problem);
        match newton_solve(problem, &base, &target.rhs, from.phi.clone(), c0, config) {
            Ok(out) => {
                let state = record(seg.kind, param, calibrated, &out);
                let point = Point {
                    phi: out.iterate.phi,
                    c: out.iterate.c,
                    calibrated,
                };
                Ok((state, point))
            }
            Err(e) => Err((target, e)),
        }
    };

    let mut current = match solve_at(0.0, &start) {
        Ok((state, point)) => {
            trail.states.push(state);
            point
        }
        Err((target, e)) => {
            trail.failure = Some(failure(problem, seg.kind, None, (seg.param_at)(0.0), &target, &start.phi, &e));
            return (trail, None);
        }
    };
    let mut tau = 0.0;
    let mut step = seg.max_step;
    let mut streak = 0;
    let mut retrying = false;
    while tau < 1.0 {
        let next = (tau + step).min(1.0);
        match solve_at(next, &current) {
            Ok((state, point)) => {
                trail.states.push(state);
                current = point;
                tau = next;
                if retrying {
                    streak = 0;
                } else {
                    streak += 1;
                }
                retrying = false;
                if streak >= 3 {
                    step = (2.0 * step).min(seg.max_step);
                    streak = 0;
                }
            }
            Err((target, e)) => {
                step *= 0.5;
                streak = 0;
                retrying = true;
                if step < config.min_path_step {
                    trail.failure = Some(failure(
                        problem,
                        seg.kind,
                        Some((seg.param_at)(tau)),
                        (seg.param_at)(next),
                        &target,
                        &current.phi,
                        &e,
                    ));
                    return (trail, None);
                }
            }
        }
    }
    (trail, Some(current))
}

fn warm_start_segment<'a>(problem: &'a Problem, config: &SolverConfig) -> Segment<'a> {
    let theta0 = problem.cone().target_phase;
    let n = problem.grid().dim() as f64;
    Segment {
        kind: PathKind::WarmStart,
        param_at: Box::new(|tau| tau),
        target_at: Box::new(move |s| Target {
            form_scale: s,
            identity_shift: cot(theta0 / (2.0 * n)) - s * cot(theta0),
            rhs: Rhs::Constant(0.0),
        }),
        calibrates: true,
        max_step: 1.0 / config.path_steps as f64,
    }
}

fn add_chi_segment<'a>(problem: &'a Problem, config: &SolverConfig) -> Segment<'a> {
    let upper = add_chi_upper(problem);
    Segment {
        kind: PathKind::AddChi,
        param_at: Box::new(move |tau| upper * (1.0 - tau)),
        target_at: Box::new(|s| Target {
            form_scale: 1.0,
            identity_shift: s,
            rhs: Rhs::Constant(0.0),
        }),
        calibrates: true,
        max_step: 1.0 / config.path_steps as f64,
    }
}

fn deform_segment<'a>(problem: &'a Problem, config: &SolverConfig) -> Segment<'a> {
    let f = problem.rhs().clone();
    let f_mean = f.mean();
    let constant = matches!(f, Rhs::Constant(_));
    Segment {
        kind: PathKind::DeformF,
        param_at: Box::new(|tau| tau),
        target_at: Box::new(move |s| Target {
            form_scale: 1.0,
            identity_shift: 0.0,
            rhs: match &f {
                Rhs::Constant(v) => Rhs::Constant(*v),
                Rhs::Field(v) => Rhs::Field(v.iter().map(|x| s * x + (1.0 - s) * f_mean).collect()),
            },
        }),
        calibrates: false,
        max_step: if constant { 1.0 } else { 1.0 / config.path_steps as f64 },
    }
}

fn constant_target_segment<'a>(kind: PathKind, rhs: Rhs) -> Segment<'a> {
    Segment {
        kind,
        param_at: Box::new(|_| 1.0),
        target_at: Box::new(move |_| Target {
            form_scale: 1.0,
            identity_shift: 0.0,
            rhs: rhs.clone(),
        }),
        calibrates: false,
        max_step: 1.0,
    }
}

/// Runs the configured continuation for `problem`.
///
/// Configuration problems (including a negative right-hand side, outside
/// the solvability hypotheses on `n ≤ 3`) are errors; numerical failures are
/// reported in the returned [`SolveReport`].
pub fn solve(problem: &Problem, config: &SolverConfig) -> Result<SolveReport> {
    config.validate(problem.cone())?;
    let f = problem.rhs();
    if f.min() < 0.0 {
        return Err(Error::config(
            "f-hypothesis",
            format!("right-hand side must be nonnegative on n <= 3 (min {})", f.min()),
        ));
    }
    let beyond_hypothesis = match f {
        Rhs::Constant(_) => false,
        Rhs::Field(v) => v.iter().any(|x| *x != v[0]),
    };
    let theta0 = problem.cone().target_phase;
    let nodes = problem.grid().nodes();
    let f_mean = f.mean();
    let omega0_constant = integrability_constant(problem.omega0(), theta0)?;

    let mut trails = Vec::new();
    let mut run = |seg: Segment, start: Point| -> Option<Point> {
        let (trail, end) = run_segment(problem, config, &seg, start);
        trails.push(trail);
        end
    };
    let zero = || vec![0.0; nodes];
    let end = match config.path {
        PathKind::WarmStart => {
            let seg = warm_start_segment(problem, config);
            let cal0 = calibration(problem, &(seg.target_at)(0.0))?;
            run(seg, Point { phi: zero(), c: cal0, calibrated: cal0 })
                .and_then(|p| run(add_chi_segment(problem, config), p))
                .and_then(|p| {
                    let c = p.c - f_mean;
                    run(deform_segment(problem, config), Point { c, ..p })
                })
        }
        PathKind::AddChi => {
            let seg = add_chi_segment(problem, config);
            let cal0 = calibration(problem, &(seg.target_at)((seg.param_at)(0.0)))?;
            run(seg, Point { phi: zero(), c: cal0, calibrated: cal0 }).and_then(|p| {
                let c = p.c - f_mean;
                run(deform_segment(problem, config), Point { c, ..p })
            })
        }
        PathKind::DeformF => {
            let seg = constant_target_segment(PathKind::Direct, Rhs::Constant(f_mean));
            let start = Point {
                phi: zero(),
                c: omega0_constant - f_mean,
                calibrated: omega0_constant,
            };
            run(seg, start).and_then(|p| run(deform_segment(problem, config), p))
        }
        PathKind::Direct => {
            let seg = constant_target_segment(PathKind::Direct, f.clone());
            let start = Point {
                phi: zero(),
                c: omega0_constant - f_mean,
                calibrated: omega0_constant,
            };
            run(seg, start)
        }
    };
    let constants = phase_constants(problem.grid().dim(), problem.cone().phase_cap)?.into();
    let failure = trails.iter().find_map(|t| t.failure.clone());
    let newton_iterations = trails
        .iter()
        .flat_map(|t| t.states.iter().map(|s| s.newton_iterations))
        .sum();
    let report = match end {
        Some(point) => {
            let last = trails
                .iter()
                .rev()
                .find_map(|t| t.states.last())
                .expect("a successful run records states");
            let omega = problem.omega_phi(&point.phi);
            let gap = (integrability_constant(&omega, theta0)? - (f_mean + point.c)).abs();
            SolveReport {
                converged: true,
                beyond_hypothesis,
                path: config.path,
                residual_sup: last.residual_sup,
                max_p: last.max_p,
                max_q: last.max_q,
                phi: point.phi,
                c: point.c,
                calibration_gap: gap,
                newton_iterations,
                trails,
                failure: None,
                constants,
            }
        }
        None => SolveReport {
            converged: false,
            beyond_hypothesis,
            path: config.path,
            phi: Vec::new(),
            c: f64::NAN,
            residual_sup: f64::NAN,
            max_p: failure.as_ref().and_then(|f| f.max_p).unwrap_or(f64::NAN),
            max_q: failure.as_ref().and_then(|f| f.max_q).unwrap_or(f64::NAN),
            calibration_gap: f64::NAN,
            newton_iterations,
            trails,
            failure,
            constants,
        },
    };
    Ok(report)
}
