//! The experiment document: a TOML file whose every key has a default.
//!
//! The grammar is documented in `docs/config-schema.md`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::phase::ConeParams;
use crate::solver::SolverConfig;
use crate::stability::{geometric_t_samples, FamilyRule};
use crate::torus::{FormSpec, Mode as FourierMode, ScalarSpec, TorusGrid};
use crate::verify::VerifyConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    VerifyAlgebra,
    VerifyMatrix,
    Solve,
    Stability,
    /// Every campaign, a solve and a stability check in one report.
    Report,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::VerifyAlgebra => "verify-algebra",
            Mode::VerifyMatrix => "verify-matrix",
            Mode::Solve => "solve",
            Mode::Stability => "stability",
            Mode::Report => "report",
        }
    }

    pub fn needs_torus(self) -> bool {
        matches!(self, Mode::Solve | Mode::Stability | Mode::Report)
    }
}

/// One Fourier term `amplitude · cos(2π k·x + phase)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    /// Wavevector over `x₁,…,xₙ,y₁,…,yₙ`.
    pub k: Vec<i64>,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

impl From<&ModeEntry> for FourierMode {
    fn from(m: &ModeEntry) -> Self {
        FourierMode {
            wavevector: m.k.clone(),
            amplitude: m.amplitude,
            phase: m.phase,
        }
    }
}

/// Background form: constant Hermitian matrix plus `∂∂̄` of a potential.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormSection {
    /// Real part, row by row. Defaults to `cot(θ₀/2n)·I`.
    pub constant: Option<Vec<Vec<f64>>>,
    /// Imaginary part, row by row. Defaults to zero.
    pub constant_imag: Option<Vec<Vec<f64>>>,
    pub modes: Vec<ModeEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalarSection {
    pub constant: f64,
    pub modes: Vec<ModeEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleName {
    AddChi,
    LinearTo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilySection {
    pub rule: RuleName,
    /// Increment of `linear_to`, real part by rows.
    pub delta: Option<Vec<Vec<f64>>>,
    pub delta_imag: Option<Vec<Vec<f64>>>,
    /// Explicit samples; otherwise geometric on `[0, t_max]`.
    pub t_samples: Option<Vec<f64>>,
    pub t_max: f64,
    pub levels: usize,
    /// Defaults to the last sample.
    pub threshold: Option<f64>,
}

impl Default for FamilySection {
    fn default() -> Self {
        Self {
            rule: RuleName::AddChi,
            delta: None,
            delta_imag: None,
            t_samples: None,
            t_max: 1.0,
            levels: 6,
            threshold: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub samples: usize,
    pub max_n: usize,
    pub fd_samples: usize,
    pub matrix_samples: usize,
    pub pair_samples: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        let d = VerifyConfig::default();
        Self {
            samples: d.samples,
            max_n: d.max_n,
            fd_samples: d.fd_samples,
            matrix_samples: d.matrix_samples,
            pair_samples: d.pair_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Not part of the echoed config or its hash.
    #[serde(skip_serializing)]
    pub dir: String,
    /// Write `phi.bin` and `omega.bin` after a converged solve.
    pub dump_fields: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            dump_fields: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub seed: u64,
    /// Complex dimension.
    pub n: usize,
    /// Nodes per real axis.
    pub grid: usize,
    /// `θ₀`.
    pub target_phase: f64,
    /// `Θ₀`; defaults to `(θ₀ + π)/2`.
    pub phase_cap: Option<f64>,
    pub omega0: FormSection,
    pub f: ScalarSection,
    pub family: FamilySection,
    pub solver: SolverConfig,
    pub verify: VerifySection,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Report,
            seed: 1,
            n: 2,
            grid: 16,
            target_phase: PI / 3.0,
            phase_cap: None,
            omega0: FormSection::default(),
            f: ScalarSection::default(),
            family: FamilySection::default(),
            solver: SolverConfig::default(),
            verify: VerifySection::default(),
            output: OutputSection::default(),
        }
    }
}

pub fn parse(text: &str) -> Result<ExperimentConfig> {
    toml::from_str(text).map_err(|e| Error::config("parse", e.to_string()))
}

pub fn load(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("read", format!("{}: {e}", path.display())))?;
    parse(&text)
}

fn matrix(re: &[Vec<f64>], im: Option<&[Vec<f64>]>, n: usize, what: &str) -> Result<CMatrix<f64>> {
    let shape_err = || Error::config("form-shape", format!("{what} must be {n} rows of {n} numbers"));
    if re.len() != n || re.iter().any(|r| r.len() != n) {
        return Err(shape_err());
    }
    if let Some(im) = im {
        if im.len() != n || im.iter().any(|r| r.len() != n) {
            return Err(shape_err());
        }
    }
    let entries: Vec<Complex64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            Complex64::new(re[i][j], im.map_or(0.0, |m| m[i][j]))
        })
        .collect();
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::config("form-value", format!("{what} has a non-finite entry")));
    }
    let m = CMatrix::from_row_slice(n, n, &entries);
    if !m.is_hermitian(1e-12 * m.frobenius_norm().max(1.0)) {
        return Err(Error::config("form-hermitian", format!("{what} is not Hermitian")));
    }
    Ok(m)
}

fn cot(x: f64) -> f64 {
    1.0 / x.tan()
}

/// A config with every default filled in and every rule checked.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub cone: ConeParams<f64>,
    pub grid: Option<TorusGrid>,
    pub omega0: FormSpec,
    pub f: ScalarSpec,
    pub rule: FamilyRule,
    pub t_samples: Vec<f64>,
    pub threshold: f64,
    pub verify: VerifyConfig,
}

impl ExperimentConfig {
    /// Fills defaults that depend on other keys and validates everything.
    pub fn resolve(&self) -> Result<Resolved> {
        let mut config = self.clone();
        let theta0 = config.target_phase;
        let cap = config.phase_cap.unwrap_or((theta0 + PI) / 2.0);
        let cone = ConeParams::new(theta0, cap)?;
        config.phase_cap = Some(cap);

        let n = config.n;
        if n == 0 {
            return Err(Error::config("dimension", "n must be positive"));
        }
        let grid = if config.mode.needs_torus() {
            Some(TorusGrid::new(n, config.grid)?)
        } else {
            None
        };

        let diag = cot(theta0 / (2 * n) as f64);
        let re = config
            .omega0
            .constant
            .get_or_insert_with(|| (0..n).map(|i| (0..n).map(|j| if i == j { diag } else { 0.0 }).collect()).collect())
            .clone();
        let constant = matrix(&re, config.omega0.constant_imag.as_deref(), n, "omega0.constant")?;
        let omega0 = FormSpec {
            constant,
            modes: config.omega0.modes.iter().map(Into::into).collect(),
        };
        let f = ScalarSpec {
            constant: config.f.constant,
            modes: config.f.modes.iter().map(Into::into).collect(),
        };
        if !f.constant.is_finite() {
            return Err(Error::config("form-value", "f.constant must be finite"));
        }
        if let Some(grid) = &grid {
            omega0.validate(grid)?;
            let values = f.sample(grid)?;
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            if min < 0.0 {
                return Err(Error::config(
                    "f-hypothesis",
                    format!("f must be nonnegative for n <= 3 (min over the grid {min})"),
                ));
            }
        }

        let fam = &mut config.family;
        let rule = match fam.rule {
            RuleName::AddChi => {
                if fam.delta.is_some() || fam.delta_imag.is_some() {
                    return Err(Error::config("family", "delta only applies to rule linear_to"));
                }
                FamilyRule::AddChi
            }
            RuleName::LinearTo => {
                let re = fam
                    .delta
                    .as_deref()
                    .ok_or_else(|| Error::config("family", "rule linear_to needs family.delta"))?;
                FamilyRule::LinearTo(matrix(re, fam.delta_imag.as_deref(), n, "family.delta")?)
            }
        };
        if fam.t_samples.is_none() {
            if !(fam.t_max > 0.0 && fam.t_max.is_finite()) || fam.levels == 0 {
                return Err(Error::config("family", "t_max must be positive and levels at least 1"));
            }
            fam.t_samples = Some(geometric_t_samples(fam.t_max, fam.levels));
        }
        let t_samples = fam.t_samples.clone().unwrap_or_default();
        let threshold = *fam
            .threshold
            .get_or_insert(t_samples.last().copied().unwrap_or(0.0));

        config.solver.validate(&cone)?;
        let v = config.verify;
        if v.samples == 0 || v.fd_samples == 0 || v.matrix_samples == 0 || v.pair_samples == 0 {
            return Err(Error::config("verify-params", "sample counts must be positive"));
        }
        if !(1..=8).contains(&v.max_n) {
            return Err(Error::config("verify-params", "max_n must lie in 1..=8"));
        }
        let verify = VerifyConfig {
            seed: config.seed,
            samples: v.samples,
            max_n: v.max_n,
            fd_samples: v.fd_samples,
            matrix_samples: v.matrix_samples,
            pair_samples: v.pair_samples,
        };
        Ok(Resolved {
            config,
            cone,
            grid,
            omega0,
            f,
            rule,
            t_samples,
            threshold,
            verify,
        })
    }
}

/// Git-style blob hash of the canonical JSON of a resolved config.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let body = serde_json::to_string(config).expect("config serializes");
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", body.len()).as_bytes());
    h.update(body.as_bytes());
    hex::encode(h.finalize())
}
