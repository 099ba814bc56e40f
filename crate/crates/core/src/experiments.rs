//! Convergence studies assembled into report tables.
//!
//! Every runner evaluates its grid points concurrently. Each point gets its
//! own seed derived from the spec seed and the point index, and rows are
//! assembled in grid order, so a report depends only on its inputs.

use crate::error::{Error, Result};
use crate::fields::{extend_compactly, generate_nonlocal_field, ScalarField, VectorField};
use crate::fractional::{
    frac_mean_curvature_direct, frac_mean_curvature_via_divergence, frac_p_laplacian_composed,
    frac_p_laplacian_direct, frac_perimeter, mollified_maximizer, perimeter_functional,
};
use crate::geometry::{boundary_quadrature, decompose_piecewise, Domain, Shape, Smoothness};
use crate::kernels::{check_admissible, levy_integral, KernelFamily};
use crate::operators::{bulk_divergence_integral, exterior_normal_integral_on, OperatorContext};
use crate::point::Point;
use crate::quadrature::adaptive::Sample;
use crate::quadrature::double::ball_double_via_covariogram;
use crate::quadrature::{integrate_adaptive, integrate_volume, QuadResult, QuadSpec};
use crate::rng::derive_seed;
use crate::special::{ball_volume, sphere_area};
use rayon::prelude::*;
use std::fmt;
use std::time::{Duration, Instant};

/// Gauss–Legendre order of the line integral in generated fields.
const LINE_RULE_ORDER: usize = 8;
/// Width of the cutoff band that makes unbounded fields compactly supported
/// for unbounded kernels.
const CUTOFF_MARGIN: f64 = 1.0;
/// Boundary nodes per unit of the resolution parameter for flux references.
const FLUX_NODES: usize = 512;

/// One grid point of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub param: f64,
    pub value: f64,
    pub reference: f64,
    pub err_est: f64,
    pub n_evals: u64,
    pub seed: u64,
    pub converged: bool,
    pub wall_time: Duration,
    /// Auxiliary named values; every row of a report carries the same names.
    pub extra: Vec<(String, f64)>,
}

impl ReportRow {
    fn new(param: f64, q: &QuadResult, reference: f64, seed: u64, started: Instant) -> Self {
        Self {
            param,
            value: q.value,
            reference,
            err_est: q.error_estimate,
            n_evals: q.n_evals,
            seed,
            converged: q.converged,
            wall_time: started.elapsed(),
            extra: Vec::new(),
        }
    }

    pub fn abs_err(&self) -> f64 {
        (self.value - self.reference).abs()
    }

    /// Relative to |reference|, or absolute when the reference is 0.
    pub fn rel_err(&self) -> f64 {
        if self.reference == 0.0 {
            self.abs_err()
        } else {
            self.abs_err() / self.reference.abs()
        }
    }

    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extra.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    fn with(mut self, name: impl Into<String>, v: f64) -> Self {
        self.extra.push((name.into(), v));
        self
    }
}

/// A named pass/fail assertion attached to a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub id: String,
    /// Header of the parameter column, e.g. "eps" or "s".
    pub param_name: String,
    pub rows: Vec<ReportRow>,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    fn new(id: impl Into<String>, param_name: &str, rows: Vec<ReportRow>) -> Self {
        Self {
            id: id.into(),
            param_name: param_name.into(),
            rows,
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn total_wall_time(&self) -> Duration {
        self.rows.iter().map(|r| r.wall_time).sum()
    }

    pub fn add_check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// Relative error of the last row at most `tol`.
    pub fn check_final_rel_err(&mut self, tol: f64) {
        let Some(last) = self.rows.last() else {
            return self.add_check("final relative error", false, "empty report");
        };
        let (p, e) = (last.param, last.rel_err());
        self.add_check(
            format!("final relative error <= {tol}"),
            e <= tol,
            format!("{}={p}: rel_err={e:.4e}", self.param_name),
        );
    }

    /// Absolute errors, ordered from the coarsest parameter to the finest,
    /// increase at most `max_inversions` times.
    pub fn check_errors_nonincreasing(&mut self, max_inversions: usize) {
        let rows = self.ordered_rows();
        let errs: Vec<f64> = rows.iter().map(|r| r.abs_err()).collect();
        // a rise smaller than the two error estimates is quadrature noise
        let inversions = rows
            .windows(2)
            .filter(|w| w[1].abs_err() - w[0].abs_err() > w[0].err_est + w[1].err_est)
            .count();
        self.add_check(
            format!("errors nonincreasing (<= {max_inversions} inversion)"),
            inversions <= max_inversions,
            format!(
                "{inversions} inversion(s) beyond the estimates in {}",
                sci(&errs)
            ),
        );
    }

    /// Every row satisfies |value − reference| ≤ k·err_est.
    pub fn check_within_estimates(&mut self, k: f64) {
        for r in &self.rows {
            let mut label = format!("{}={}", self.param_name, r.param);
            for (name, v) in &r.extra {
                if name == "p" || name == "point" {
                    label.push_str(&format!(" {name}={v}"));
                }
            }
            let tol = k * r.err_est;
            self.checks.push(Check {
                name: format!("|diff| <= {k} x combined estimate at {label}"),
                passed: r.abs_err() <= tol,
                detail: format!("diff={:.3e} tol={tol:.3e}", r.abs_err()),
            });
        }
    }

    /// Values strictly monotone in the parameter, in either direction.
    pub fn check_values_monotone(&mut self) {
        let vals: Vec<f64> = self.rows_by_param().iter().map(|r| r.value).collect();
        let up = vals.windows(2).all(|w| w[1] > w[0]);
        let down = vals.windows(2).all(|w| w[1] < w[0]);
        let dir = if up {
            "increasing"
        } else if down {
            "decreasing"
        } else {
            "not monotone"
        };
        self.add_check(
            format!("values monotone in {}", self.param_name),
            up || down,
            format!("{dir}: {vals:.6?}"),
        );
    }

    /// Rows from the coarsest parameter to the finest (largest first).
    fn ordered_rows(&self) -> Vec<&ReportRow> {
        let mut v: Vec<&ReportRow> = self.rows.iter().collect();
        v.sort_by(|a, b| b.param.total_cmp(&a.param));
        v
    }

    fn rows_by_param(&self) -> Vec<&ReportRow> {
        let mut v: Vec<&ReportRow> = self.rows.iter().collect();
        v.sort_by(|a, b| a.param.total_cmp(&b.param));
        v
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {}", self.id)?;
        write!(
            f,
            "{:>8} {:>16} {:>16} {:>10} {:>10} {:>10}",
            self.param_name, "value", "reference", "abs_err", "rel_err", "err_est"
        )?;
        if let Some(r) = self.rows.first() {
            for (k, _) in &r.extra {
                write!(f, " {k:>12}")?;
            }
        }
        writeln!(f)?;
        for r in &self.rows {
            write!(
                f,
                "{:>8} {:>16.9} {:>16.9} {:>10.3e} {:>10.3e} {:>10.3e}",
                r.param,
                r.value,
                r.reference,
                r.abs_err(),
                r.rel_err(),
                r.err_est
            )?;
            for (_, v) in &r.extra {
                write!(f, " {v:>12.6}")?;
            }
            writeln!(f)?;
        }
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {}: {}",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Seed of grid point `index`.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, index as u64)
}

/// Runs `f` on every grid point in parallel; rows come back in grid order.
fn run_grid<T, F>(params: &[T], spec: &QuadSpec, f: F) -> Result<Vec<ReportRow>>
where
    T: Sync,
    F: Fn(&T, QuadSpec) -> Result<ReportRow> + Sync,
{
    params
        .par_iter()
        .enumerate()
        .map(|(i, p)| f(p, spec.with_seed(point_seed(spec.seed, i))))
        .collect()
}

fn validate_family(family: &KernelFamily, domain: &Domain, eps_list: &[f64]) -> Result<()> {
    if family.dim != domain.dimension() {
        return Err(Error::DimensionMismatch(family.dim, domain.dimension()));
    }
    if !family.is_normalized() {
        return Err(Error::NotAdmissible(format!(
            "the {} family is not normalized",
            family.name()
        )));
    }
    for &eps in eps_list {
        let report = check_admissible(&family.pair_at(eps)?);
        if !report.pass {
            return Err(Error::NotAdmissible(format!("eps={eps}: {report:?}")));
        }
    }
    Ok(())
}

/// Kernels of unbounded reach need a compactly supported field.
fn field_for(
    family: &KernelFamily,
    domain: &Domain,
    field: &VectorField,
    eps: f64,
) -> Result<VectorField> {
    let reach = family.pair_at(eps)?.alpha.support_radius();
    if reach.is_infinite() && field.support().is_none() {
        extend_compactly(field.clone(), domain, CUTOFF_MARGIN)
    } else {
        Ok(field.clone())
    }
}

/// ∫_Ω div F by volume quadrature.
fn divergence_reference(domain: &Domain, field: &VectorField, spec: &QuadSpec) -> Result<f64> {
    Ok(integrate_volume(
        domain,
        |x: &Point| Sample::exact(field.divergence(x)),
        &spec.with_tol(1e-12, 1e-12),
    )?
    .value)
}

/// ∫_Ω 𝒟_ε f_ε against ∫_Ω div F for each ε.
pub fn run_dc(
    domain: &Domain,
    family: &KernelFamily,
    field: &VectorField,
    eps_list: &[f64],
    spec: &QuadSpec,
) -> Result<ExperimentReport> {
    validate_family(family, domain, eps_list)?;
    let reference = divergence_reference(domain, field, spec)?;
    let rows = run_grid(eps_list, spec, |&eps, sp| {
        let t = Instant::now();
        let pair = family.pair_at(eps)?;
        let f = generate_nonlocal_field(
            field_for(family, domain, field, eps)?,
            pair.alpha.clone(),
            LINE_RULE_ORDER,
        )?;
        let ctx = OperatorContext::new(domain.clone(), pair, sp)?;
        let q = bulk_divergence_integral(&ctx, &f)?;
        Ok(ReportRow::new(eps, &q, reference, sp.seed, t))
    })?;
    let mut report = ExperimentReport::new(
        format!(
            "converge-dc/{}/{}/{}",
            domain.name(),
            family.name(),
            field.name()
        ),
        "eps",
        rows,
    );
    report.check_errors_nonincreasing(1);
    Ok(report)
}

/// ∫_{Ωᶜ} 𝒩_ε f_ε against the boundary flux of F for each ε. Polygons
/// also get the contribution of each face neighbourhood, the leftover
/// corner region and its scaled measure ε⁻¹|B(δ, ε)|.
pub fn run_nc(
    domain: &Domain,
    family: &KernelFamily,
    field: &VectorField,
    eps_list: &[f64],
    spec: &QuadSpec,
) -> Result<ExperimentReport> {
    validate_family(family, domain, eps_list)?;
    let bq = boundary_quadrature(domain, FLUX_NODES)?;
    let flux = |z: &Point, n: &Point| field.eval(z).dot(n);
    let reference = bq.integrate(flux);
    let pieces = if domain.smoothness() == Smoothness::PiecewiseC1 {
        let shortest = domain
            .edges()
            .map(|es| es.iter().map(|e| e.length()).fold(f64::INFINITY, f64::min))
            .unwrap_or(0.0);
        Some(decompose_piecewise(domain, 0.999 * shortest / 4.0)?)
    } else {
        None
    };
    let rows = run_grid(eps_list, spec, |&eps, sp| {
        let t = Instant::now();
        let pair = family.pair_at(eps)?;
        let f = generate_nonlocal_field(
            field_for(family, domain, field, eps)?,
            pair.alpha.clone(),
            LINE_RULE_ORDER,
        )?;
        let ctx = OperatorContext::new(domain.clone(), pair, sp)?;
        let usable = pieces
            .as_ref()
            .filter(|p| !p.reentrant.iter().any(|&r| r) || eps < 0.5 * p.delta);
        let Some(dec) = usable else {
            let q = exterior_normal_integral_on(&ctx, &f, &|_| true)?;
            return Ok(ReportRow::new(eps, &q, reference, sp.seed, t));
        };
        let mut parts = Vec::with_capacity(dec.faces.len() + 1);
        for i in 0..dec.faces.len() {
            parts.push(exterior_normal_integral_on(&ctx, &f, &|x| {
                dec.face_of(x, eps) == Some(i)
            })?);
        }
        let corner = exterior_normal_integral_on(&ctx, &f, &|x| dec.face_of(x, eps).is_none())?;
        let mut all = parts.clone();
        all.push(corner);
        let q = crate::quadrature::sum_results(&all);
        let mut row = ReportRow::new(eps, &q, reference, sp.seed, t);
        for (i, p) in parts.iter().enumerate() {
            row = row
                .with(format!("face{i}"), p.value)
                .with(format!("face{i}_flux"), bq.integrate_face(i, flux));
        }
        Ok(row
            .with("corner", corner.value)
            .with("corner_measure", dec.leftover_measure(eps) / eps))
    })?;
    let mut report = ExperimentReport::new(
        format!(
            "converge-nc/{}/{}/{}",
            domain.name(),
            family.name(),
            field.name()
        ),
        "eps",
        rows,
    );
    report.check_errors_nonincreasing(1);
    if pieces.is_some() {
        let ordered: Vec<f64> = report
            .ordered_rows()
            .iter()
            .filter_map(|r| r.extra("corner_measure"))
            .collect();
        let decreasing = ordered.windows(2).all(|w| w[1] < w[0]);
        report.add_check("corner term decreasing", decreasing, sci(&ordered));
    }
    Ok(report)
}

/// Both sides of ∫_Ω 𝒟f = ∫_{Ωᶜ} 𝒩f per ε. `value` is the bulk side,
/// `reference` the exterior side and `err_est` the sum of both estimates.
pub fn run_nt_check(
    domain: &Domain,
    family: &KernelFamily,
    field: &VectorField,
    eps_list: &[f64],
    spec: &QuadSpec,
) -> Result<ExperimentReport> {
    validate_family(family, domain, eps_list)?;
    let rows = run_grid(eps_list, spec, |&eps, sp| {
        let t = Instant::now();
        let pair = family.pair_at(eps)?;
        let f = generate_nonlocal_field(
            field_for(family, domain, field, eps)?,
            pair.alpha.clone(),
            LINE_RULE_ORDER,
        )?;
        let ctx = OperatorContext::new(domain.clone(), pair, sp)?;
        let bulk = bulk_divergence_integral(&ctx, &f)?;
        let ext = exterior_normal_integral_on(&ctx, &f, &|_| true)?;
        let combined = bulk.error_estimate + ext.error_estimate;
        let q = QuadResult {
            error_estimate: combined,
            n_evals: bulk.n_evals + ext.n_evals,
            converged: bulk.converged && ext.converged,
            ..bulk
        };
        let diff = bulk.value - ext.value;
        Ok(ReportRow::new(eps, &q, ext.value, sp.seed, t)
            .with("difference", diff)
            .with("tolerance", 3.0 * combined)
            .with("pass", f64::from(u8::from(diff.abs() <= 3.0 * combined))))
    })?;
    let mut report = ExperimentReport::new(
        format!(
            "nt-check/{}/{}/{}",
            domain.name(),
            family.name(),
            field.name()
        ),
        "eps",
        rows,
    );
    report.check_within_estimates(3.0);
    Ok(report)
}

/// k_ε(t) = (2d(d+2) / ((d+1)ℋ^{d−1}(𝕊^{d−1}))) |B^{d−1}| ε^{−d−2} (ε² − t²)^{(d+1)/2} on (0, ε), zero elsewhere.
pub fn approx_identity_kernel(d: usize, eps: f64, t: f64) -> f64 {
    if t <= 0.0 || t >= eps {
        return 0.0;
    }
    let df = d as f64;
    let k = 2.0 * df * (df + 2.0) / ((df + 1.0) * sphere_area(d)) * ball_volume(d - 1);
    k * eps.powf(-df - 2.0) * (eps * eps - t * t).powf(0.5 * (df + 1.0))
}

/// Nonnegativity grid size for [`run_approx_identity`].
const IDENTITY_GRID: usize = 1000;

/// Total mass of k_ε, its mass beyond `delta`, and its minimum on a grid
/// covering [−ε, 2ε].
pub fn run_approx_identity(d: usize, eps_list: &[f64], delta: f64) -> Result<ExperimentReport> {
    crate::error::check_dim(d)?;
    crate::error::check_positive("delta", delta)?;
    let spec = QuadSpec::default();
    let rows = run_grid(eps_list, &spec, |&eps, sp| {
        crate::error::check_positive("eps", eps)?;
        let t = Instant::now();
        // t = ε sin θ removes the endpoint singularity of the derivative
        let mass_from = |lo: f64| -> QuadResult {
            let th0 = (lo / eps).min(1.0).asin();
            integrate_adaptive(
                |th| approx_identity_kernel(d, eps, eps * th.sin()) * eps * th.cos(),
                th0,
                std::f64::consts::FRAC_PI_2,
                1e-14,
                1e-13,
                200_000,
            )
        };
        let total = mass_from(0.0);
        let tail = if delta >= eps {
            0.0
        } else {
            mass_from(delta).value
        };
        let min = (0..=IDENTITY_GRID)
            .map(|i| {
                approx_identity_kernel(d, eps, -eps + 3.0 * eps * i as f64 / IDENTITY_GRID as f64)
            })
            .fold(f64::INFINITY, f64::min);
        Ok(ReportRow::new(eps, &total, 1.0, sp.seed, t)
            .with("tail_mass", tail)
            .with("grid_min", min))
    })?;
    let mut report = ExperimentReport::new(format!("approx-identity/d{d}"), "eps", rows);
    let bad: Vec<f64> = report
        .rows
        .iter()
        .filter(|r| r.abs_err() > 1e-6)
        .map(|r| r.param)
        .collect();
    report.add_check(
        "total mass 1 within 1e-6",
        bad.is_empty(),
        format!("failing eps: {bad:?}"),
    );
    let neg = report
        .rows
        .iter()
        .any(|r| r.extra("grid_min").is_some_and(|m| m < 0.0));
    report.add_check(
        "k_eps >= 0 on the grid",
        !neg,
        format!("{IDENTITY_GRID}+1 points per eps"),
    );
    let leak: Vec<f64> = report
        .rows
        .iter()
        .filter(|r| r.param <= delta && r.extra("tail_mass") != Some(0.0))
        .map(|r| r.param)
        .collect();
    report.add_check(
        format!("no mass beyond {delta} when eps <= {delta}"),
        leak.is_empty(),
        format!("leaking eps: {leak:?}"),
    );
    Ok(report)
}

/// Lévy integral ∫ min{1,|h|²}αμ of each pair against the normalization d.
pub fn run_kernel_check(
    family: &KernelFamily,
    eps_list: &[f64],
    tol: f64,
) -> Result<ExperimentReport> {
    let d = family.dim as f64;
    let rows = run_grid(eps_list, &QuadSpec::default(), |&eps, sp| {
        let t = Instant::now();
        let q = levy_integral(&family.pair_at(eps)?, 1e-12);
        Ok(ReportRow::new(eps, &q, d, sp.seed, t))
    })?;
    let mut report = ExperimentReport::new(
        format!("check-kernel/{}/d{}", family.name(), family.dim),
        "eps",
        rows,
    );
    let bad: Vec<f64> = report
        .rows
        .iter()
        .filter(|r| !(r.abs_err() <= tol))
        .map(|r| r.param)
        .collect();
    report.add_check(
        format!("|levy - d| <= {tol}"),
        bad.is_empty(),
        format!("failing eps: {bad:?}"),
    );
    Ok(report)
}

/// (1−s)Per_s(E) against Per(E) over the s grid; balls also carry the
/// covariogram value of the same quantity.
pub fn run_perimeter_sweep(
    domain: &Domain,
    s_list: &[f64],
    spec: &QuadSpec,
) -> Result<ExperimentReport> {
    let per = domain.boundary_measure();
    let d = domain.dimension();
    let rows = run_grid(s_list, spec, |&s, sp| {
        let t = Instant::now();
        let q = frac_perimeter(domain, s, &sp)?.scaled(1.0 - s);
        let row = ReportRow::new(s, &q, per, sp.seed, t);
        Ok(match domain.shape() {
            Shape::Ball { radius } => row.with(
                "covariogram",
                (1.0 - s) * ball_double_via_covariogram(d, *radius, s) / ball_volume(d - 1),
            ),
            _ => row,
        })
    })?;
    let mut report = ExperimentReport::new(format!("perimeter/{}", domain.name()), "s", rows);
    report.check_values_monotone();
    Ok(report)
}

/// Per_s(λE) against λ^{d−s} Per_s(E).
pub fn run_perimeter_scaling(
    domain: &Domain,
    s: f64,
    lambdas: &[f64],
    spec: &QuadSpec,
) -> Result<ExperimentReport> {
    let base = frac_perimeter(domain, s, spec)?;
    let d = domain.dimension() as f64;
    let rows = run_grid(lambdas, spec, |&lambda, sp| {
        let t = Instant::now();
        let q = frac_perimeter(&domain.scaled(lambda)?, s, &sp)?;
        let k = lambda.powf(d - s);
        let combined = QuadResult {
            error_estimate: q.error_estimate + k * base.error_estimate,
            ..q
        };
        Ok(ReportRow::new(
            lambda,
            &combined,
            k * base.value,
            sp.seed,
            t,
        ))
    })?;
    let mut report = ExperimentReport::new(
        format!("perimeter-scaling/{}/s{s}", domain.name()),
        "lambda",
        rows,
    );
    report.check_within_estimates(2.0);
    Ok(report)
}

/// P_s(g_ε) for the mollified maximizer against (1−s)Per_s(E).
pub fn run_mollified_convergence(
    domain: &Domain,
    s: f64,
    eps_list: &[f64],
    spec: &QuadSpec,
) -> Result<ExperimentReport> {
    let target = frac_perimeter(domain, s, spec)?.scaled(1.0 - s);
    let rows = run_grid(eps_list, spec, |&eps, sp| {
        let t = Instant::now();
        let g = mollified_maximizer(domain, eps)?;
        let q = perimeter_functional(domain, s, &g, &sp)?;
        Ok(ReportRow::new(eps, &q, target.value, sp.seed, t).with("ratio", q.value / target.value))
    })?;
    let mut report = ExperimentReport::new(
        format!("mollified-perimeter/{}/s{s}", domain.name()),
        "eps",
        rows,
    );
    let gaps: Vec<f64> = report.ordered_rows().iter().map(|r| r.rel_err()).collect();
    let trend = gaps.windows(2).all(|w| w[1] < w[0]);
    report.add_check("gap to (1-s)Per_s decreasing", trend, format!("{gaps:.4?}"));
    Ok(report)
}

/// Direct and composed evaluations of the fractional p-Laplacian of a
/// Gaussian at each point; `value` is the direct route.
pub fn run_p_laplacian(
    d: usize,
    s_list: &[f64],
    p_list: &[f64],
    points: &[Point],
    spec: &QuadSpec,
) -> Result<ExperimentReport> {
    let u = ScalarField::gaussian(1.0, 0.5, Point::ZERO)?;
    let mut grid = Vec::new();
    for &s in s_list {
        for &p in p_list {
            for (i, x) in points.iter().enumerate() {
                grid.push((s, p, i, *x));
            }
        }
    }
    let rows = run_grid(&grid, spec, |&(s, p, i, x), sp| {
        let t = Instant::now();
        let a = frac_p_laplacian_direct(&u, d, s, p, &x, &sp)?;
        let b = frac_p_laplacian_composed(&u, d, s, p, &x, &sp)?;
        let q = QuadResult {
            error_estimate: a.error_estimate + b.error_estimate,
            n_evals: a.n_evals + b.n_evals,
            converged: a.converged && b.converged,
            ..a
        };
        Ok(ReportRow::new(s, &q, b.value, sp.seed, t)
            .with("p", p)
            .with("point", i as f64))
    })?;
    let mut report = ExperimentReport::new(format!("p-laplacian/d{d}"), "s", rows);
    report.check_within_estimates(3.0);
    Ok(report)
}

/// (1−s)H_s(x) by direct integration against c_{d,s} div⁽ˢ⁾n(x).
pub fn run_curvature(
    domain: &Domain,
    s_list: &[f64],
    x: &Point,
    spec: &QuadSpec,
) -> Result<ExperimentReport> {
    let rows = run_grid(s_list, spec, |&s, sp| {
        let t = Instant::now();
        let a = frac_mean_curvature_direct(domain, s, x, &sp)?.scaled(1.0 - s);
        let b = frac_mean_curvature_via_divergence(domain, s, x, &sp)?;
        let q = QuadResult {
            error_estimate: a.error_estimate + b.error_estimate,
            n_evals: a.n_evals + b.n_evals,
            converged: a.converged && b.converged,
            ..a
        };
        Ok(ReportRow::new(s, &q, b.value, sp.seed, t))
    })?;
    let mut report = ExperimentReport::new(format!("curvature/{}", domain.name()), "s", rows);
    report.check_within_estimates(3.0);
    Ok(report)
}

/// Default mollification scales for the perimeter functional.
pub const MOLLIFIER_GRID: [f64; 3] = [0.2, 0.1, 0.05];

/// The perimeter sweep, mollified-maximizer convergence (at the median s),
/// p-Laplacian identity and curvature identity for a set E.
pub fn run_fractional_suite(
    domain: &Domain,
    s_list: &[f64],
    p_list: &[f64],
    spec: &QuadSpec,
) -> Result<Vec<ExperimentReport>> {
    if s_list.is_empty() {
        return Err(Error::InvalidParameter {
            name: "s_list",
            value: 0.0,
            reason: "must not be empty",
        });
    }
    let d = domain.dimension();
    let mut sorted = s_list.to_vec();
    sorted.sort_by(f64::total_cmp);
    let s_mid = sorted[sorted.len() / 2];
    let c = domain.center();
    let points = [c, c + Point::unit(0) * (0.3 * domain.extent())];
    let z = domain
        .nearest_boundary_point(&(c + Point::unit(0) * domain.extent()))
        .point;
    Ok(vec![
        run_perimeter_sweep(domain, s_list, spec)?,
        run_mollified_convergence(domain, s_mid, &MOLLIFIER_GRID, spec)?,
        run_p_laplacian(d, s_list, p_list, &points, spec)?,
        run_curvature(domain, s_list, &z, spec)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::VectorKind;
    use crate::geometry::make_ball;
    use crate::kernels::make_localizing_family;

    #[test]
    fn approximate_identity_masses() {
        for d in 1..=3 {
            let r = run_approx_identity(d, &[0.5, 0.1], 0.2).unwrap();
            assert!(r.passed(), "{r}");
            assert_eq!(r.rows[1].extra("tail_mass"), Some(0.0));
        }
    }

    #[test]
    fn errors_are_recomputed() {
        let mut row = ReportRow::new(0.1, &QuadResult::exact(1.5), 2.0, 0, Instant::now());
        assert_eq!(row.abs_err(), 0.5);
        row.value = 2.5;
        assert_eq!(row.abs_err(), 0.5);
        assert_eq!(row.rel_err(), 0.25);
    }

    #[test]
    fn divergence_free_field_has_zero_reference() {
        let disk = make_ball(2, Point::ZERO, 1.0).unwrap();
        let fam = make_localizing_family(2).unwrap();
        let spec = QuadSpec::default().with_tol(1e-7, 1e-6);
        let r = run_dc(
            &disk,
            &fam,
            &VectorField::new(2, VectorKind::Rotation),
            &[0.4, 0.2],
            &spec,
        )
        .unwrap();
        for row in &r.rows {
            assert_eq!(row.reference, 0.0);
            assert!(row.value.abs() < 1e-6, "{r}");
        }
    }

    #[test]
    fn grid_seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..4).map(|i| point_seed(7, i)).collect();
        let b: Vec<u64> = (0..4).map(|i| point_seed(7, i)).collect();
        assert_eq!(a, b);
        let mut c = a.clone();
        c.dedup();
        assert_eq!(c.len(), 4);
    }
}
