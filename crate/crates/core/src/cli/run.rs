//! Mode dispatch and the run report.

use std::time::Instant;

use serde::Serialize;

use crate::cli::config::{config_hash, ExperimentConfig, Mode, Resolved};
use crate::error::Result;
use crate::phase::phase_constants;
use crate::solver::{solve, Problem, SolveReport, SolverConfig};
use crate::stability::{
    family_margin, monotonicity_check, subtorus_profiles, StabilityReport, SubtorusProfile, TestFamily,
    MonotonicityTable, SCOPE,
};
use crate::torus::{phase_extremes, HermitianField, Rhs, TorusGrid};
use crate::verify::algebra::{algebra_suite, derivative_fidelity, epsilon2_for, ConcavityMargin};
use crate::verify::matrix::matrix_suite;
use crate::verify::SuiteReport;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_PATH_FAILURE: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    PropertyViolation,
    PathFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => EXIT_PASS,
            Status::PropertyViolation => EXIT_VIOLATION,
            Status::PathFailure => EXIT_PATH_FAILURE,
        }
    }
}

/// Explicit constants for the configured `n` and `Θ₀`, plus measured margins.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsSection {
    pub n: usize,
    pub target_phase: f64,
    pub phase_cap: f64,
    pub im_lower_bound: f64,
    pub sin_floor: f64,
    pub sin_slope: f64,
    pub tan_slope: f64,
    /// Measured worst concavity ratios, when the algebra campaign ran.
    pub eps10_hat: Vec<ConcavityMargin>,
    /// `ε₂` for the configured `n`; absent for `n ≥ 4` without a measured margin.
    pub eps2_used: Option<f64>,
}

/// Positivity of the subtorus margins of a solution.
#[derive(Debug, Clone, Serialize)]
pub struct SolutionMargins {
    pub max_p: f64,
    pub profiles: Vec<SubtorusProfile>,
    pub min_margin: Option<f64>,
    pub positive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilitySection {
    pub scope: &'static str,
    pub threshold: f64,
    pub family: StabilityReport,
    pub solution: Option<SolutionMargins>,
    pub monotonicity: Option<MonotonicityTable>,
    /// Why the solution checks did not run.
    pub skipped: Option<String>,
}

/// Deterministic numeric content of a run.
#[derive(Debug, Clone, Serialize)]
pub struct Payload {
    pub mode: Mode,
    pub status: Status,
    pub exit_code: i32,
    /// Names of the failed checks.
    pub failed: Vec<String>,
    pub constants: ConstantsSection,
    pub suites: Vec<SuiteReport>,
    pub solve: Option<SolveReport>,
    pub stability: Option<StabilitySection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub stage: &'static str,
    pub seconds: f64,
}

/// Fields kept for optional binary dumps.
#[derive(Debug, Clone)]
pub struct SolvedFields {
    pub grid: TorusGrid,
    pub phi: Vec<f64>,
    pub omega: HermitianField,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub payload: Payload,
    pub timings: Vec<Timing>,
    #[serde(skip)]
    pub fields: Option<SolvedFields>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        self.payload.exit_code
    }
}

struct Runner {
    timings: Vec<Timing>,
    failed: Vec<String>,
    path_failure: bool,
}

impl Runner {
    fn timed<T>(&mut self, stage: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(Timing {
            stage,
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    fn suite(&mut self, report: &SuiteReport) {
        for p in report.properties.iter().filter(|p| !p.passed) {
            self.failed.push(format!("{}/{}", report.suite, p.name));
        }
    }
}

fn build_problem(r: &Resolved) -> Result<Problem> {
    let grid = r.grid.expect("torus modes resolve a grid");
    let rhs = if r.f.is_constant() {
        Rhs::Constant(r.f.constant)
    } else {
        Rhs::Field(r.f.sample(&grid)?)
    };
    Problem::new(grid, r.cone, &r.omega0, rhs)
}

fn solution_margins(omega: &HermitianField, grid: &TorusGrid, theta0: f64) -> SolutionMargins {
    let profiles = subtorus_profiles(omega, grid, theta0);
    let min_margin = profiles.iter().map(|p| p.min_margin).reduce(f64::min);
    SolutionMargins {
        max_p: phase_extremes(omega).max_p,
        positive: min_margin.is_none_or(|m| m > 0.0),
        profiles,
        min_margin,
    }
}

fn run_stability(
    runner: &mut Runner,
    r: &Resolved,
    problem: &Problem,
    solved: Option<&SolveReport>,
) -> Result<StabilitySection> {
    let theta0 = r.cone.target_phase;
    let grid = problem.grid();
    let family = TestFamily::new(problem.omega0().clone(), r.rule.clone(), r.t_samples.clone(), r.threshold)?;
    let report = runner.timed("family-margin", || family_margin(&family, grid, theta0))?;
    if report.violated() {
        runner.failed.push("stability/family-margin".into());
    }
    let mut section = StabilitySection {
        scope: SCOPE,
        threshold: r.threshold,
        family: report,
        solution: None,
        monotonicity: None,
        skipped: None,
    };
    match solved {
        Some(s) if s.converged => {
            let omega = problem.omega_phi(&s.phi);
            let margins = solution_margins(&omega, grid, theta0);
            if margins.max_p < theta0 {
                if !margins.positive {
                    runner.failed.push("stability/solution-margins".into());
                }
                section.solution = Some(margins);
            } else {
                section.skipped = Some(format!("solution max P = {} is not below the target phase", margins.max_p));
            }
            let table = runner.timed("monotonicity", || {
                monotonicity_check(&family, problem.spectral(), &s.phi, theta0)
            })?;
            if !table.passed() {
                runner.failed.push("stability/monotonicity".into());
            }
            section.monotonicity = Some(table);
        }
        Some(s) => {
            let reason = s.failure.as_ref().map_or("unknown", |f| f.reason_code.as_str());
            section.skipped = Some(format!("solver did not converge ({reason})"));
        }
        None => section.skipped = Some("no solve in this mode".into()),
    }
    Ok(section)
}

fn solve_problem(runner: &mut Runner, problem: &Problem, config: &SolverConfig) -> Result<SolveReport> {
    let report = runner.timed("solve", || solve(problem, config))?;
    if !report.converged {
        runner.path_failure = true;
    }
    Ok(report)
}

/// Runs a resolved experiment. Errors are configuration or internal errors;
/// property violations and path failures are reported in the payload.
pub fn run_resolved(r: &Resolved) -> Result<RunReport> {
    let config = &r.config;
    let mode = config.mode;
    let mut runner = Runner {
        timings: Vec::new(),
        failed: Vec::new(),
        path_failure: false,
    };
    let problem = if mode.needs_torus() { Some(build_problem(r)?) } else { None };

    let mut suites = Vec::new();
    let mut margins: Vec<ConcavityMargin> = Vec::new();
    let mut eps10 = None;
    if mode == Mode::Report {
        let d = runner.timed("derivatives", || derivative_fidelity(&r.verify));
        runner.suite(&d);
        suites.push(d);
    }
    if matches!(mode, Mode::VerifyAlgebra | Mode::Report) {
        let a = runner.timed("algebra", || algebra_suite(&r.verify))?;
        runner.suite(&a.suite);
        eps10 = a.eps10(config.n);
        margins = a.concavity_margins.clone();
        suites.push(a.suite);
    }
    if matches!(mode, Mode::VerifyMatrix | Mode::Report) {
        let m = runner.timed("matrix", || matrix_suite(&r.verify));
        runner.suite(&m);
        suites.push(m);
    }

    let mut solved = None;
    let mut stability = None;
    let mut fields = None;
    if let Some(problem) = &problem {
        let s = solve_problem(&mut runner, problem, &config.solver)?;
        if s.converged {
            fields = Some(SolvedFields {
                grid: *problem.grid(),
                phi: s.phi.clone(),
                omega: problem.omega_phi(&s.phi),
            });
        }
        if matches!(mode, Mode::Stability | Mode::Report) {
            stability = Some(run_stability(&mut runner, r, problem, Some(&s))?);
        }
        solved = Some(s);
    }

    let k = phase_constants(config.n, r.cone.phase_cap)?;
    let constants = ConstantsSection {
        n: config.n,
        target_phase: r.cone.target_phase,
        phase_cap: r.cone.phase_cap,
        im_lower_bound: k.im_lower_bound,
        sin_floor: k.sin_floor,
        sin_slope: k.sin_slope,
        tan_slope: k.tan_slope,
        eps10_hat: margins,
        eps2_used: epsilon2_for(config.n, &r.cone, eps10).ok(),
    };
    let status = if runner.path_failure {
        runner.failed.push("solve/path".into());
        Status::PathFailure
    } else if runner.failed.is_empty() {
        Status::Pass
    } else {
        Status::PropertyViolation
    };
    let payload = Payload {
        mode,
        status,
        exit_code: status.exit_code(),
        failed: runner.failed,
        constants,
        suites,
        solve: solved,
        stability,
    };
    Ok(RunReport {
        config: config.clone(),
        config_hash: config_hash(config),
        payload,
        timings: runner.timings,
        fields,
    })
}

pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    run_resolved(&config.resolve()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::parse;

    #[test]
    fn trivial_solve_passes() {
        let c = parse("mode = \"solve\"\nn = 2\ngrid = 8\n").unwrap();
        let r = run(&c).unwrap();
        assert_eq!(r.exit_code(), EXIT_PASS);
        let s = r.payload.solve.unwrap();
        assert!(s.converged && s.residual_sup <= 1e-12);
    }

    #[test]
    fn stability_flags_a_negative_subtorus() {
        let c = parse(
            "mode = \"stability\"\nn = 2\ngrid = 8\ntarget_phase = 1.5707963267948966\n\
             [omega0]\nconstant = [[-0.05, 0.0], [0.0, 3.0]]\n\
             [family]\nt_samples = [0.0, 0.1, 0.5, 1.5]\n",
        )
        .unwrap();
        let r = run(&c).unwrap();
        let st = r.payload.stability.as_ref().unwrap();
        assert!(st.family.violated());
        assert_eq!(st.family.violations[0].t, 0.0);
        assert_eq!(st.family.violations[0].subset, "{1}");
        assert!(r.exit_code() == EXIT_VIOLATION || r.exit_code() == EXIT_PATH_FAILURE);
    }
}
