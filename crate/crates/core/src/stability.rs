//! Subvariety integral conditions on coordinate subtori.
//!
//! For a nonempty proper subset `S` of the complex coordinates, the
//! coordinate subtori `V_S` are the `|S|`-dimensional slices obtained by
//! fixing every coordinate outside `S`. On a slice the restricted form is the
//! `S × S` principal block, and `∏_{k∈S}(μ_k + i) = det(ω_S + i)`.
//!
//! Only coordinate subtori are examined. A negative margin disproves the
//! subvariety condition; positive margins say nothing about other
//! subvarieties.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::mean;
use crate::torus::{node_eigen, phase_extremes, HermitianField, Spectral, TorusGrid};

/// Scope note carried by every report.
pub const SCOPE: &str = "coordinate subtori only; margins do not certify arbitrary subvarieties";

/// Lower bound on the finite-difference slopes accepted by [`monotonicity_check`].
pub const MONOTONICITY_SLACK: f64 = -1e-8;

fn cot(x: f64) -> f64 {
    1.0 / x.tan()
}

/// `det(M + i·I)` for a small complex matrix, by elimination with partial pivoting.
fn shifted_det(mut m: Vec<Complex64>, p: usize) -> Complex64 {
    for i in 0..p {
        m[i * p + i] += Complex64::i();
    }
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&a, &b| m[a * p + col].norm().total_cmp(&m[b * p + col].norm()))
            .expect("nonempty range");
        if m[pivot * p + col] == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..p {
                m.swap(pivot * p + k, col * p + k);
            }
            det = -det;
        }
        let d = m[col * p + col];
        det *= d;
        for r in col + 1..p {
            let factor = m[r * p + col] / d;
            for k in col..p {
                let v = m[col * p + k];
                m[r * p + k] -= factor * v;
            }
        }
    }
    det
}

fn restricted_integrand(node: &[Complex64], n: usize, subset: &[usize], cot0: f64) -> f64 {
    let p = subset.len();
    let block: Vec<Complex64> = subset
        .iter()
        .flat_map(|&r| subset.iter().map(move |&c| node[r * n + c]))
        .collect();
    let z = shifted_det(block, p);
    z.re - cot0 * z.im
}

/// Nonempty proper subsets of `{0, …, n−1}`, by size then lexicographically.
pub fn proper_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1..(1usize << n).saturating_sub(1))
        .map(|mask| (0..n).filter(|k| mask >> k & 1 == 1).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// One-based label such as `{1,3}`.
pub fn subset_label(subset: &[usize]) -> String {
    let parts: Vec<String> = subset.iter().map(|k| (k + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn check_subset(subset: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &k in subset {
        if k >= n || seen[k] {
            return Err(Error::Domain(format!("invalid coordinate subset {subset:?}")));
        }
        seen[k] = true;
    }
    if subset.is_empty() || subset.len() == n {
        return Err(Error::Domain("coordinate subset must be nonempty and proper".into()));
    }
    Ok(())
}

/// Real axes fixed on the subtori of `subset`: `x_j, y_j` for each `j ∉ S`.
pub fn complementary_axes(grid: &TorusGrid, subset: &[usize]) -> Vec<usize> {
    (0..grid.dim())
        .filter(|j| !subset.contains(j))
        .flat_map(|j| [grid.x_axis(j), grid.y_axis(j)])
        .collect()
}

fn slice_of(grid: &TorusGrid, comp: &[usize], node: usize) -> usize {
    let coords = grid.coords(node);
    comp.iter().rev().fold(0, |acc, &a| acc * grid.size() + coords[a])
}

/// Mean over one coordinate subtorus of `Re det(ω_S + i) − cot θ₀·Im det(ω_S + i)`.
///
/// `base_slice` gives the grid coordinates of the fixed axes, in the order of
/// [`complementary_axes`].
pub fn subtorus_integral(
    omega: &HermitianField,
    grid: &TorusGrid,
    subset: &[usize],
    base_slice: &[usize],
    target_phase: f64,
) -> Result<f64> {
    let n = grid.dim();
    check_subset(subset, n)?;
    let comp = complementary_axes(grid, subset);
    if base_slice.len() != comp.len() || base_slice.iter().any(|&c| c >= grid.size()) {
        return Err(Error::Domain("base slice does not match the grid".into()));
    }
    let free: Vec<usize> = (0..grid.axes()).filter(|a| !comp.contains(a)).collect();
    let count = grid.size().pow(free.len() as u32);
    let cot0 = cot(target_phase);
    let mut coords = vec![0; grid.axes()];
    for (&a, &c) in comp.iter().zip(base_slice) {
        coords[a] = c;
    }
    let values: Vec<f64> = (0..count)
        .map(|mut k| {
            let mut c = coords.clone();
            for &a in &free {
                c[a] = k % grid.size();
                k /= grid.size();
            }
            restricted_integrand(omega.node(grid.index(&c)), n, subset, cot0)
        })
        .collect();
    Ok(mean(&values))
}

/// Integrals of one subset over every base slice.
#[derive(Debug, Clone, Serialize)]
pub struct SubtorusProfile {
    pub subset: Vec<usize>,
    pub label: String,
    pub p: usize,
    /// Indexed by the mixed-radix slice number over [`complementary_axes`].
    #[serde(skip)]
    pub slice_values: Vec<f64>,
    pub slice_min: f64,
    pub argmin_slice: usize,
    /// Slice average: the integral over the cohomology class of `V_S`.
    pub slice_mean: f64,
    /// `slice_min / (n − p)`; `∫ χᵖ = 1` on every slice.
    pub min_margin: f64,
    pub mean_margin: f64,
}

/// Profiles of every nonempty proper subset, for one form.
pub fn subtorus_profiles(omega: &HermitianField, grid: &TorusGrid, target_phase: f64) -> Vec<SubtorusProfile> {
    let n = grid.dim();
    let cot0 = cot(target_phase);
    proper_subsets(n)
        .into_iter()
        .map(|subset| {
            let comp = complementary_axes(grid, &subset);
            let slices = grid.size().pow(comp.len() as u32);
            let values: Vec<f64> = (0..grid.nodes())
                .into_par_iter()
                .map(|node| restricted_integrand(omega.node(node), n, &subset, cot0))
                .collect();
            let mut buckets = vec![Vec::with_capacity(grid.nodes() / slices); slices];
            for (node, v) in values.into_iter().enumerate() {
                buckets[slice_of(grid, &comp, node)].push(v);
            }
            let slice_values: Vec<f64> = buckets.iter().map(|b| mean(b)).collect();
            let (argmin_slice, slice_min) = slice_values
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
            let slice_mean = mean(&slice_values);
            let codim = (n - subset.len()) as f64;
            SubtorusProfile {
                label: subset_label(&subset),
                p: subset.len(),
                subset,
                slice_values,
                slice_min,
                argmin_slice,
                slice_mean,
                min_margin: slice_min / codim,
                mean_margin: slice_mean / codim,
            }
        })
        .collect()
}

/// How `ω_{t,0}` depends on `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyRule {
    /// `ω₀ + tχ`.
    AddChi,
    /// `ω₀ + tΔ` for a constant positive-definite `Δ`.
    LinearTo(CMatrix<f64>),
}

impl FamilyRule {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyRule::AddChi => "add_chi",
            FamilyRule::LinearTo(_) => "linear_to",
        }
    }

    /// The `t`-derivative of the family.
    pub fn increment(&self, n: usize) -> CMatrix<f64> {
        match self {
            FamilyRule::AddChi => CMatrix::identity(n),
            FamilyRule::LinearTo(delta) => delta.clone(),
        }
    }
}

/// A sampled test family.
#[derive(Debug, Clone)]
pub struct TestFamily {
    base: HermitianField,
    rule: FamilyRule,
    t_samples: Vec<f64>,
    threshold: f64,
}

impl TestFamily {
    pub fn new(base: HermitianField, rule: FamilyRule, t_samples: Vec<f64>, threshold: f64) -> Result<Self> {
        if t_samples.first() != Some(&0.0) {
            return Err(Error::config("family", "t samples must start at 0"));
        }
        if t_samples.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::config("family", "t samples must be finite and strictly increasing"));
        }
        if !threshold.is_finite() || threshold < 0.0 {
            return Err(Error::config("family", "threshold must be a nonnegative number"));
        }
        if let FamilyRule::LinearTo(delta) = &rule {
            if delta.rows() != base.dim() || !delta.is_square() || !delta.is_hermitian(1e-12) {
                return Err(Error::config("family", "linear_to increment must be an n x n Hermitian matrix"));
            }
        }
        Ok(Self {
            base,
            rule,
            t_samples,
            threshold,
        })
    }

    pub fn base(&self) -> &HermitianField {
        &self.base
    }

    pub fn rule(&self) -> &FamilyRule {
        &self.rule
    }

    pub fn t_samples(&self) -> &[f64] {
        &self.t_samples
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// `ω_{t,0}`.
    pub fn form_at(&self, t: f64) -> HermitianField {
        let n = self.base.dim();
        let step = HermitianField::constant(&self.rule.increment(n), self.base.nodes());
        self.base.axpy(t, &step)
    }

    /// Checks monotonicity on consecutive samples and the threshold lower
    /// bound `ω_{t,0} > cot(θ₀/n)χ` on samples `t ≥ T`.
    pub fn validate(&self, target_phase: f64) -> Result<()> {
        let n = self.base.dim();
        let increment = self.rule.increment(n);
        for w in self.t_samples.windows(2) {
            let (t, s) = (w[0], w[1]);
            let diff = self.form_at(s).axpy(-1.0, &self.form_at(t));
            let min = min_node_eigenvalue(&diff);
            let expected = increment.scale(s - t).eigh()?.values[n - 1];
            if !(min > 0.0 && expected > 0.0) {
                return Err(Error::config(
                    "family-monotone",
                    format!("omega_s - omega_t is not positive definite for (s, t) = ({s}, {t})"),
                ));
            }
        }
        let bound = cot(target_phase / n as f64);
        let checked: Vec<f64> = self.t_samples.iter().copied().filter(|&t| t >= self.threshold).collect();
        if checked.is_empty() {
            return Err(Error::config("family-threshold", "no t sample at or beyond the threshold"));
        }
        for t in checked {
            let min = min_node_eigenvalue(&self.form_at(t).add_identity(-bound));
            if !(min > 0.0) {
                return Err(Error::config(
                    "family-threshold",
                    format!("omega_t - cot(theta0/n) I is not positive definite at t = {t}"),
                ));
            }
        }
        Ok(())
    }
}

fn min_node_eigenvalue(field: &HermitianField) -> f64 {
    let n = field.dim();
    (0..field.nodes())
        .into_par_iter()
        .map(|node| node_eigen(n, field.node(node)).values[n - 1])
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// `[0, t_max·2^{−(levels−1)}, …, t_max/2, t_max]`: refined towards `t = 0`.
pub fn geometric_t_samples(t_max: f64, levels: usize) -> Vec<f64> {
    let mut out = vec![0.0];
    out.extend((0..levels).rev().map(|k| t_max * 0.5f64.powi(k as i32)));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginRow {
    pub t: f64,
    pub profiles: Vec<SubtorusProfile>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub t: f64,
    pub subset: String,
    pub slice: usize,
    pub margin: f64,
}

/// Margins of a sampled family over all coordinate subtori.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub scope: &'static str,
    pub rule: &'static str,
    pub target_phase: f64,
    pub rows: Vec<MarginRow>,
    /// Smallest per-slice margin; `None` when `n = 1` (no proper subsets).
    pub eps1_hat: Option<f64>,
    pub violations: Vec<Violation>,
}

impl StabilityReport {
    pub fn violated(&self) -> bool {
        !self.violations.is_empty()
    }
}

/// Validates the family and evaluates every `(t, S, slice)`.
pub fn family_margin(family: &TestFamily, grid: &TorusGrid, target_phase: f64) -> Result<StabilityReport> {
    if family.base().nodes() != grid.nodes() || family.base().dim() != grid.dim() {
        return Err(Error::config("form-shape", "family base does not match the grid"));
    }
    family.validate(target_phase)?;
    let rows: Vec<MarginRow> = family
        .t_samples()
        .iter()
        .map(|&t| MarginRow {
            t,
            profiles: subtorus_profiles(&family.form_at(t), grid, target_phase),
        })
        .collect();
    let mut eps1_hat: Option<f64> = None;
    let mut violations = Vec::new();
    for row in &rows {
        for prof in &row.profiles {
            eps1_hat = Some(eps1_hat.map_or(prof.min_margin, |e| e.min(prof.min_margin)));
            if prof.min_margin <= 0.0 {
                violations.push(Violation {
                    t: row.t,
                    subset: prof.label.clone(),
                    slice: prof.argmin_slice,
                    margin: prof.min_margin,
                });
            }
        }
    }
    Ok(StabilityReport {
        scope: SCOPE,
        rule: family.rule().name(),
        target_phase,
        rows,
        eps1_hat,
        violations,
    })
}

/// Finite-difference slope of one subset's integrals between two samples.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeRow {
    pub t_lo: f64,
    pub t_hi: f64,
    pub subset: String,
    /// Smallest per-slice slope.
    pub slice_min: f64,
    /// Slope of the slice averages.
    pub mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedSample {
    pub t: f64,
    pub reason: String,
}

/// `t`-slopes of the subtorus integrals of `ω_{t,0} + ∂∂̄φ`.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityTable {
    pub rows: Vec<SlopeRow>,
    pub skipped: Vec<SkippedSample>,
    pub min_slope: Option<f64>,
}

impl MonotonicityTable {
    pub fn passed(&self) -> bool {
        self.min_slope.is_none_or(|m| m >= MONOTONICITY_SLACK)
    }
}

/// Differences the subtorus integrals along the family with `φ` held fixed.
///
/// Samples whose largest node phase `P` reaches `θ₀` leave the supercritical
/// branch and are skipped, together with the intervals touching them.
pub fn monotonicity_check(family: &TestFamily, spectral: &Spectral, phi: &[f64], target_phase: f64) -> Result<MonotonicityTable> {
    let grid = spectral.grid();
    if phi.len() != grid.nodes() || family.base().nodes() != grid.nodes() {
        return Err(Error::Domain("potential does not match the grid".into()));
    }
    let form = spectral.ddbar(phi);
    let mut skipped = Vec::new();
    let mut profiles: Vec<Option<Vec<SubtorusProfile>>> = Vec::new();
    for &t in family.t_samples() {
        let omega = family.form_at(t).axpy(1.0, &form);
        let ext = phase_extremes(&omega);
        if ext.max_p >= target_phase {
            skipped.push(SkippedSample {
                t,
                reason: format!("max P = {} at node {} is not below the target phase", ext.max_p, ext.p_node),
            });
            profiles.push(None);
        } else {
            profiles.push(Some(subtorus_profiles(&omega, grid, target_phase)));
        }
    }
    let ts = family.t_samples();
    let mut rows = Vec::new();
    for k in 0..ts.len().saturating_sub(1) {
        let (Some(lo), Some(hi)) = (&profiles[k], &profiles[k + 1]) else {
            continue;
        };
        let dt = ts[k + 1] - ts[k];
        for (a, b) in lo.iter().zip(hi) {
            let slice_min = a
                .slice_values
                .iter()
                .zip(&b.slice_values)
                .map(|(x, y)| (y - x) / dt)
                .fold(f64::INFINITY, f64::min);
            rows.push(SlopeRow {
                t_lo: ts[k],
                t_hi: ts[k + 1],
                subset: a.label.clone(),
                slice_min,
                mean: (b.slice_mean - a.slice_mean) / dt,
            });
        }
    }
    let min_slope = rows.iter().map(|r| r.slice_min).reduce(f64::min);
    Ok(MonotonicityTable {
        rows,
        skipped,
        min_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{FormSpec, Mode, PotentialField};
    use std::f64::consts::FRAC_PI_2;

    fn constant_field(m: &CMatrix<f64>, grid: &TorusGrid) -> HermitianField {
        HermitianField::constant(m, grid.nodes())
    }

    #[test]
    fn subsets_are_proper_and_ordered() {
        assert!(proper_subsets(1).is_empty());
        assert_eq!(proper_subsets(2), vec![vec![0], vec![1]]);
        let s3 = proper_subsets(3);
        assert_eq!(s3.len(), 6);
        assert_eq!(s3[3], vec![0, 1]);
        assert_eq!(subset_label(&s3[5]), "{2,3}");
    }

    #[test]
    fn shifted_det_matches_product() {
        let m = vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.5, 0.3),
            Complex64::new(0.5, -0.3),
            Complex64::new(-1.0, 0.0),
        ];
        let lam = node_eigen(2, &m).values;
        let prod = Complex64::new(lam[0], 1.0) * Complex64::new(lam[1], 1.0);
        assert!((shifted_det(m, 2) - prod).norm() < 1e-13);
    }

    #[test]
    fn constant_form_gives_closed_form() {
        let grid = TorusGrid::new(3, 8).unwrap();
        let c = 1.7;
        let theta0 = 1.1;
        let omega = constant_field(&CMatrix::identity(3).scale(c), &grid);
        for p in 1..3 {
            let z = Complex64::new(c, 1.0).powi(p as i32);
            let expected = z.re - cot(theta0) * z.im;
            let subset: Vec<usize> = (0..p).collect();
            let slice = vec![1; 2 * (3 - p)];
            let v = subtorus_integral(&omega, &grid, &subset, &slice, theta0).unwrap();
            assert!((v - expected).abs() < 1e-12);
        }
        assert!(subtorus_integral(&omega, &grid, &[0, 1, 2], &[], theta0).is_err());
        assert!(subtorus_integral(&omega, &grid, &[], &[0; 6], theta0).is_err());
    }

    #[test]
    fn transverse_potential_does_not_change_slices() {
        // The potential depends only on z₂, so ∂∂̄φ has no (1,1) entry.
        let grid = TorusGrid::new(2, 8).unwrap();
        let spec = FormSpec {
            constant: CMatrix::identity(2).scale(1.3),
            modes: vec![Mode {
                wavevector: vec![0, 1, 0, 2],
                amplitude: 0.01,
                phase: 0.4,
            }],
        };
        let spectral = Spectral::new(&grid);
        let omega = crate::torus::assemble_omega(&spec, &PotentialField::zeros(grid.nodes()), &spectral).unwrap();
        let theta0 = 1.0;
        let z = Complex64::new(1.3, 1.0);
        let expected = z.re - cot(theta0) * z.im;
        let prof = &subtorus_profiles(&omega, &grid, theta0)[0];
        assert_eq!(prof.label, "{1}");
        for v in &prof.slice_values {
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn slice_lookup_agrees_with_direct_integral() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let spectral = Spectral::new(&grid);
        let phi: Vec<f64> = (0..grid.nodes())
            .map(|i| {
                let x = grid.position(i);
                0.01 * (std::f64::consts::TAU * (x[0] + 2.0 * x[3])).sin()
            })
            .collect();
        let omega = constant_field(&CMatrix::identity(2).scale(2.0), &grid).axpy(1.0, &spectral.ddbar(&phi));
        for prof in subtorus_profiles(&omega, &grid, 1.2) {
            let slice = prof.argmin_slice;
            let base = vec![slice % 8, slice / 8];
            let direct = subtorus_integral(&omega, &grid, &prof.subset, &base, 1.2).unwrap();
            assert!((direct - prof.slice_min).abs() < 1e-13);
        }
    }

    #[test]
    fn add_chi_from_critical_identity_has_positive_margins() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let theta0 = 1.2;
        let c = cot(theta0 / 2.0);
        let family = TestFamily::new(
            constant_field(&CMatrix::identity(2).scale(c), &grid),
            FamilyRule::AddChi,
            vec![0.0, 0.5, 1.0],
            0.5,
        )
        .unwrap();
        let report = family_margin(&family, &grid, theta0).unwrap();
        assert!(!report.violated());
        for row in &report.rows {
            let z = Complex64::new(c + row.t, 1.0);
            let expected = z.re - cot(theta0) * z.im;
            for prof in &row.profiles {
                assert!((prof.min_margin - expected).abs() < 1e-12);
            }
        }
        assert!(report.eps1_hat.unwrap() > 0.0);
    }

    #[test]
    fn constructed_violation_is_located() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let theta0 = FRAC_PI_2;
        let omega0 = CMatrix::from_real_diagonal(&[cot(theta0) - 0.05, 3.0]);
        let family = TestFamily::new(
            constant_field(&omega0, &grid),
            FamilyRule::AddChi,
            vec![0.0, 0.1, 0.5, 1.5],
            1.5,
        )
        .unwrap();
        let report = family_margin(&family, &grid, theta0).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].t, 0.0);
        assert_eq!(report.violations[0].subset, "{1}");
    }

    #[test]
    fn family_conditions_are_enforced() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let base = constant_field(&CMatrix::identity(2), &grid);
        let bad = CMatrix::from_real_diagonal(&[1.0, -0.5]);
        let family = TestFamily::new(base.clone(), FamilyRule::LinearTo(bad), vec![0.0, 0.5], 0.0).unwrap();
        let err = family_margin(&family, &grid, 1.0).unwrap_err();
        assert_eq!(err.reason_code(), "family-monotone");
        assert!(err.to_string().contains("(0.5, 0)"));
        let family = TestFamily::new(base.clone(), FamilyRule::AddChi, vec![0.0, 0.5], 0.5).unwrap();
        let err = family_margin(&family, &grid, 0.5).unwrap_err();
        assert_eq!(err.reason_code(), "family-threshold");
        assert!(TestFamily::new(base, FamilyRule::AddChi, vec![0.1, 0.5], 0.5).is_err());
    }

    #[test]
    fn constant_slope_matches_derivative() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let spectral = Spectral::new(&grid);
        let theta0 = 1.3;
        let c = 1.1;
        let h = 1e-4;
        let family = TestFamily::new(
            constant_field(&CMatrix::identity(2).scale(c), &grid),
            FamilyRule::AddChi,
            vec![0.0, h],
            h,
        )
        .unwrap();
        let table = monotonicity_check(&family, &spectral, &vec![0.0; grid.nodes()], theta0).unwrap();
        // p = 1: the slope of Re(c+t+i) − cot θ₀·Im(c+t+i) is exactly 1.
        assert_eq!(table.rows.len(), 2);
        for row in &table.rows {
            assert!((row.slice_min - 1.0).abs() < 1e-9);
        }
        assert!(table.passed());
    }

    #[test]
    fn geometric_samples_refine_towards_zero() {
        assert_eq!(geometric_t_samples(2.0, 3), vec![0.0, 0.5, 1.0, 2.0]);
    }
}
