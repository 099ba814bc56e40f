//! Nonlocal divergence and normal operators, the nonlocal Gauss–Green forms,
//! scalar products and the duality between 𝒟 and 𝒢.

use crate::error::{Error, Result};
use crate::fields::{difference_field, FarField, NonlocalField, Regularity, ScalarField};
use crate::geometry::{collar_charts, collar_points, make_ball, Domain, Shape};
use crate::kernels::{AdmissiblePair, RadialProfile};
use crate::point::Point;
use crate::quadrature::adaptive::{integrate_adaptive_nested, Sample};
use crate::quadrature::graded::{integrate_graded, GradeEnd, Grading};
use crate::quadrature::sphere::{integrate_sphere, SphereTol};
use crate::quadrature::{
    integrate_charts, integrate_pv, integrate_pv_fn, integrate_pv_fn_with_kinks, integrate_volume,
    sum_results, QuadResult, QuadSpec,
};
use crate::special::sphere_area;
use rayon::prelude::*;

/// Ω together with an admissible kernel pair and quadrature settings.
#[derive(Debug, Clone)]
pub struct OperatorContext {
    pub domain: Domain,
    pub pair: AdmissiblePair,
    pub spec: QuadSpec,
}

impl OperatorContext {
    pub fn new(domain: Domain, pair: AdmissiblePair, spec: QuadSpec) -> Result<Self> {
        if domain.dimension() != pair.dimension() {
            return Err(Error::DimensionMismatch(
                domain.dimension(),
                pair.dimension(),
            ));
        }
        spec.validate()?;
        Ok(Self { domain, pair, spec })
    }

    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    pub fn mu(&self) -> &RadialProfile {
        &self.pair.mu
    }

    /// Tolerances for pointwise operator values inside an outer integral
    /// over a region of measure `measure`.
    fn inner_spec(&self, measure: f64) -> QuadSpec {
        let mut s = self.spec.inner();
        s.abs_tol = self.spec.abs_tol / (4.0 * measure.max(1.0));
        s
    }

    pub(crate) fn check_field(&self, f: &NonlocalField) -> Result<()> {
        if f.dim != self.dimension() {
            return Err(Error::DimensionMismatch(f.dim, self.dimension()));
        }
        Ok(())
    }
}

/// 𝒟f(x) = 2 pv ∫ f(x, y) μ(y − x) dy.
pub fn nonlocal_divergence(
    ctx: &OperatorContext,
    f: &NonlocalField,
    x: &Point,
) -> Result<QuadResult> {
    ctx.check_field(f)?;
    nonlocal_divergence_with(ctx, f, x, &ctx.spec)
}

fn nonlocal_divergence_with(
    ctx: &OperatorContext,
    f: &NonlocalField,
    x: &Point,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    Ok(integrate_pv(x, f, ctx.mu(), spec)?.scaled(2.0))
}

/// 𝒩f(x) = −2 ∫_Ω f(x, y) μ(y − x) dy for x outside Ω.
pub fn nonlocal_normal(ctx: &OperatorContext, f: &NonlocalField, x: &Point) -> Result<QuadResult> {
    ctx.check_field(f)?;
    nonlocal_normal_with(ctx, f, x, &ctx.spec)
}

fn nonlocal_normal_with(
    ctx: &OperatorContext,
    f: &NonlocalField,
    x: &Point,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let g = |y: &Point| f.eval(x, y);
    let jumps = f.regularity() == Regularity::Jumps;
    Ok(integrate_over_domain_from(ctx, x, &g, jumps, spec)?.scaled(-2.0))
}

/// ∫_Ω g(y) μ(y − x) dy in polar coordinates around x, with exact ray
/// intersections of Ω.
fn integrate_over_domain_from(
    ctx: &OperatorContext,
    x: &Point,
    g: &(dyn Fn(&Point) -> f64 + Sync),
    jumps: bool,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let d = ctx.dimension();
    let mu = ctx.mu();
    let dom = &ctx.domain;
    let supp = mu.support_radius();
    let tmax = if dom.is_bounded() {
        supp.min((*x - dom.center()).norm() + dom.extent())
    } else if supp.is_finite() {
        supp
    } else {
        return Err(Error::UnsupportedShape(
            "unbounded domain with an unbounded kernel",
        ));
    };
    if dom.signed_distance(x) >= tmax {
        return Ok(QuadResult::zero());
    }
    let breaks = mu.breakpoints();
    let area = sphere_area(d);
    let ray_tol = spec.abs_tol / (4.0 * area);
    let grading = Grading {
        abs_tol: ray_tol,
        ..Grading::from_spec(spec, false)
    };
    let ray = |u: Point| -> Sample {
        let mut parts = Vec::new();
        for (a, b) in dom.ray_intervals(x, &u, tmax) {
            let h = |r: f64| Sample::exact(g(&(*x + u * r)) * mu.eval(r) * r.powi(d as i32 - 1));
            let cut: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
            let singular = mu.singularity_exponent() > 0.0 && a < 0.1 * (b - a);
            if singular && cut.is_empty() {
                parts.push(integrate_graded(h, a, b, GradeEnd::Lower, &grading));
            } else {
                parts.push(integrate_adaptive_nested(
                    h,
                    a,
                    b,
                    &cut,
                    1,
                    ray_tol,
                    spec.rel_tol,
                    spec.max_evals / 16,
                    false,
                ));
            }
        }
        sum_results(&parts).sample()
    };
    let tol = SphereTol {
        abs_tol: spec.abs_tol,
        rel_tol: spec.rel_tol,
        max_evals: spec.max_evals,
        init_panels: if jumps { 16 } else { 8 },
    };
    Ok(integrate_sphere(d, false, ray, &[], &tol))
}

/// ∫_Ω 𝒟f(x) dx.
pub fn bulk_divergence_integral(ctx: &OperatorContext, f: &NonlocalField) -> Result<QuadResult> {
    ctx.check_field(f)?;
    let inner = ctx.inner_spec(ctx.domain.volume());
    let failure = std::sync::Mutex::new(None);
    let g = |x: &Point| match nonlocal_divergence_with(ctx, f, x, &inner) {
        Ok(r) => r.sample(),
        Err(e) => {
            failure.lock().unwrap().get_or_insert(e);
            Sample::exact(0.0)
        }
    };
    let out = integrate_volume(&ctx.domain, g, &ctx.spec)?;
    match failure.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// ∫_{Ωᶜ} 𝒩f(x) dx.
pub fn exterior_normal_integral(ctx: &OperatorContext, f: &NonlocalField) -> Result<QuadResult> {
    exterior_normal_integral_on(ctx, f, &|_| true)
}

/// ∫_{Ωᶜ ∩ A} 𝒩f(x) dx with A given by its indicator.
pub fn exterior_normal_integral_on(
    ctx: &OperatorContext,
    f: &NonlocalField,
    region: &(dyn Fn(&Point) -> bool + Sync),
) -> Result<QuadResult> {
    ctx.check_field(f)?;
    let failure = std::sync::Mutex::new(None);
    let mut inner = ctx.inner_spec(exterior_measure_hint(ctx));
    if uses_monte_carlo_collar(ctx) {
        inner = inner.with_tol(
            inner.abs_tol.max(MC_INNER_ABS),
            inner.rel_tol.max(MC_INNER_REL),
        );
    }
    let g = |x: &Point| {
        if !region(x) {
            return Sample::exact(0.0);
        }
        match nonlocal_normal_with(ctx, f, x, &inner) {
            Ok(r) => r.sample(),
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                Sample::exact(0.0)
            }
        }
    };
    let out = integrate_exterior(ctx, &g)?;
    match failure.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn exterior_measure_hint(ctx: &OperatorContext) -> f64 {
    let eps = ctx.mu().support_radius();
    if eps.is_finite() {
        ctx.domain.boundary_measure() * eps
    } else {
        ctx.domain.boundary_measure()
    }
}

/// Number of strata of three-dimensional Monte Carlo collars.
const COLLAR_STRATA: usize = 216;
/// Pointwise tolerances inside a Monte Carlo collar, whose sampling error
/// dominates anything tighter.
const MC_INNER_ABS: f64 = 1e-4;
const MC_INNER_REL: f64 = 1e-3;

fn uses_monte_carlo_collar(ctx: &OperatorContext) -> bool {
    ctx.dimension() == 3 && ctx.domain.is_bounded() && ctx.mu().support_radius().is_finite()
}

/// ∫_{Ωᶜ} g(x) dx for a g that vanishes beyond the kernel's reach of Ω.
///
/// Localizing kernels integrate over the collar Ωᶜ_ε (charts in d ≤ 2,
/// stratified Monte Carlo in d = 3). Unbounded kernels integrate spherical
/// shells around a ball out to a truncation radius and close the remainder
/// with a power-law fit of the last shells.
pub fn integrate_exterior(
    ctx: &OperatorContext,
    g: &(dyn Fn(&Point) -> Sample + Sync),
) -> Result<QuadResult> {
    let dom = &ctx.domain;
    let eps = ctx.mu().support_radius();
    if !dom.is_bounded() {
        return Err(Error::UnsupportedShape(
            "exterior integral of an unbounded domain",
        ));
    }
    if uses_monte_carlo_collar(ctx) {
        return monte_carlo_collar(dom, eps, g, ctx.spec.seed);
    }
    if eps.is_finite() {
        return Ok(integrate_charts(&collar_charts(dom, eps)?, g, &ctx.spec));
    }
    shells_to_infinity(ctx, g)
}

fn monte_carlo_collar(
    dom: &Domain,
    eps: f64,
    g: &(dyn Fn(&Point) -> Sample + Sync),
    seed: u64,
) -> Result<QuadResult> {
    let wp = collar_points(dom, eps, COLLAR_STRATA, seed)?;
    let strata = wp.strata.as_ref().expect("stratified sample");
    let vals: Vec<(f64, u64)> = wp
        .points
        .par_iter()
        .zip(&wp.weights)
        .map(|(x, &w)| {
            if w == 0.0 {
                (0.0, 0)
            } else {
                let s = g(x);
                (s.value * w, s.evals)
            }
        })
        .collect();
    let k = crate::geometry::SAMPLES_PER_STRATUM;
    let mut sums = Vec::new();
    let mut vars = Vec::new();
    for (chunk, st) in vals.chunks(k).zip(strata.chunks(k)) {
        debug_assert!(st.iter().all(|&s| s == st[0]));
        let z: Vec<f64> = chunk.iter().map(|c| c.0 * k as f64).collect();
        let mean = z.iter().sum::<f64>() / k as f64;
        let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / ((k - 1) * k) as f64;
        sums.push(mean);
        vars.push(var);
    }
    Ok(QuadResult {
        value: crate::sum::pairwise_sum(&sums),
        error_estimate: crate::sum::pairwise_sum(&vars).sqrt(),
        n_evals: vals.iter().map(|v| v.1).sum(),
        seed_used: Some(seed),
        converged: true,
    })
}

fn shells_to_infinity(
    ctx: &OperatorContext,
    g: &(dyn Fn(&Point) -> Sample + Sync),
) -> Result<QuadResult> {
    let dom = &ctx.domain;
    let Shape::Ball { radius } = dom.shape() else {
        return Err(Error::UnsupportedShape(
            "exterior integral with an unbounded kernel outside a ball",
        ));
    };
    let d = dom.dimension();
    let c = dom.center();
    let spec = &ctx.spec;
    let r_out = spec
        .truncation_radius
        .unwrap_or(16.0 * radius)
        .max(2.0 * radius + 1.0);
    let tol = SphereTol {
        abs_tol: spec.abs_tol / 16.0,
        rel_tol: spec.rel_tol,
        max_evals: spec.max_evals,
        init_panels: 4,
    };
    let shell = |rho: f64| -> Sample {
        let q = integrate_sphere(d, false, |u: Point| g(&(c + u * rho)), &[], &tol);
        let w = rho.powi(d as i32 - 1);
        Sample {
            value: q.value * w,
            err: q.error_estimate * w,
            evals: q.n_evals,
            ok: q.converged,
        }
    };
    let grading = Grading {
        abs_tol: spec.abs_tol / 4.0,
        ..Grading::from_spec(spec, true)
    };
    let near = integrate_graded(shell, *radius, radius + 1.0, GradeEnd::Lower, &grading);
    let mut breaks = Vec::new();
    let mut b = 2.0 * (radius + 1.0);
    while b < r_out {
        breaks.push(b);
        b *= 2.0;
    }
    let mid = integrate_adaptive_nested(
        shell,
        radius + 1.0,
        r_out,
        &breaks,
        1,
        spec.abs_tol / 4.0,
        spec.rel_tol,
        spec.max_evals,
        true,
    );
    // shell mass ∝ ρ^{−q} beyond r_out
    let s1 = shell(0.5 * r_out).value;
    let s2 = shell(r_out).value;
    let tail = if s2 == 0.0 {
        QuadResult::zero()
    } else if s1 * s2 <= 0.0 {
        return Err(Error::UnknownTail);
    } else {
        let q = (s1 / s2).log2();
        if q <= 1.0 {
            return Err(Error::NonIntegrable(format!(
                "exterior shells decay like ρ^-{q:.3}"
            )));
        }
        let v = s2 * r_out / (q - 1.0);
        QuadResult {
            value: v,
            error_estimate: 0.5 * v.abs(),
            n_evals: 2,
            seed_used: None,
            converged: true,
        }
    };
    Ok(sum_results(&[near, mid, tail]))
}

/// The nonlocal Gauss–Green forms for a pair of test functions, with
/// ν the context's μ.
#[derive(Debug, Clone)]
pub struct GaussGreen<'a> {
    ctx: &'a OperatorContext,
    phi: ScalarField,
    psi: ScalarField,
}

/// Gauss–Green forms L_ν φ, N_ν φ and E_ν(φ, ψ) bound to a context.
pub fn gauss_green_forms<'a>(
    ctx: &'a OperatorContext,
    phi: ScalarField,
    psi: ScalarField,
) -> GaussGreen<'a> {
    GaussGreen { ctx, phi, psi }
}

/// Both sides of ∫_Ω L_ν φ ψ = E_ν(φ, ψ) − ∫_{Ωᶜ} N_ν φ ψ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussGreenCheck {
    pub bulk: QuadResult,
    pub energy: QuadResult,
    pub boundary: QuadResult,
}

impl GaussGreenCheck {
    pub fn residual(&self) -> f64 {
        (self.bulk.value - (self.energy.value - self.boundary.value)).abs()
    }

    pub fn combined_error(&self) -> f64 {
        (self.bulk.error_estimate.powi(2)
            + self.energy.error_estimate.powi(2)
            + self.boundary.error_estimate.powi(2))
        .sqrt()
    }
}

impl GaussGreen<'_> {
    fn difference(&self) -> NonlocalField {
        difference_field(self.ctx.dimension(), self.phi.clone())
    }

    /// L_ν φ(x) = 2 pv ∫ (φ(x) − φ(y)) ν(x − y) dy, the divergence of φ(x) − φ(y).
    pub fn laplace_at(&self, x: &Point) -> Result<QuadResult> {
        nonlocal_divergence(self.ctx, &self.difference(), x)
    }

    /// N_ν φ(y) = 2 ∫_Ω (φ(y) − φ(x)) ν(x − y) dx for y outside Ω.
    pub fn normal_at(&self, y: &Point) -> Result<QuadResult> {
        // 𝒩 of φ(x) − φ(y) is −2∫_Ω (φ(y) − φ(x)) ν, the opposite sign
        Ok(nonlocal_normal(self.ctx, &self.difference(), y)?.scaled(-1.0))
    }

    /// E_ν(φ, ψ) = ∬_{(Ωᶜ×Ωᶜ)ᶜ} (φ(x) − φ(y))(ψ(x) − ψ(y)) ν(x − y).
    pub fn energy(&self) -> Result<QuadResult> {
        let (phi, psi) = (&self.phi, &self.psi);
        let k = |x: &Point, y: &Point| (phi.eval(x) - phi.eval(y)) * (psi.eval(x) - psi.eval(y));
        let reach = support_reach(&[phi, psi]);
        let far = |x: &Point| match reach {
            Some((c, r)) => FarField::Scaling {
                radius: (*x - c).norm() + r + 1e-9,
                weight: None,
            },
            None => FarField::Unknown,
        };
        symmetric_double(self.ctx, &self.ctx.domain, &k, &far, &self.ctx.spec)
    }

    /// Evaluates the three terms of the Gauss–Green identity.
    pub fn check(&self) -> Result<GaussGreenCheck> {
        let ctx = self.ctx;
        let d = self.difference();
        let inner = ctx.inner_spec(ctx.domain.volume());
        let failure = std::sync::Mutex::new(None);
        let record = |e: Error| {
            failure.lock().unwrap().get_or_insert(e);
            Sample::exact(0.0)
        };
        let bulk = integrate_volume(
            &ctx.domain,
            |x: &Point| match nonlocal_divergence_with(ctx, &d, x, &inner) {
                Ok(r) => (r.scaled(self.psi.eval(x))).sample(),
                Err(e) => record(e),
            },
            &ctx.spec,
        )?;
        let inner_ext = ctx.inner_spec(exterior_measure_hint(ctx));
        let boundary = integrate_exterior(ctx, &|y: &Point| {
            let p = self.psi.eval(y);
            if p == 0.0 {
                return Sample::exact(0.0);
            }
            match nonlocal_normal_with(ctx, &d, y, &inner_ext) {
                Ok(r) => r.scaled(-p).sample(),
                Err(e) => record(e),
            }
        })?;
        let energy = self.energy()?;
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        Ok(GaussGreenCheck {
            bulk,
            energy,
            boundary,
        })
    }
}

/// Ball containing the supports of all the given functions, if compact.
fn support_reach(fs: &[&ScalarField]) -> Option<(Point, f64)> {
    let sup: Vec<(Point, f64)> = fs.iter().map(|f| f.support()).collect::<Option<_>>()?;
    let c = sup[0].0;
    let r = sup
        .iter()
        .map(|(p, r)| (*p - c).norm() + r)
        .fold(0.0, f64::max);
    Some((c, r))
}

/// ∬_{(Rᶜ×Rᶜ)ᶜ} K(x, y) μ(y − x) dy dx for a symmetric K, written as
/// ∫_R ∫_{ℝᵈ} K(x, y) (2 − 1_R(y)) μ(y − x) dy dx.
fn symmetric_double(
    ctx: &OperatorContext,
    region: &Domain,
    k: &(dyn Fn(&Point, &Point) -> f64 + Sync),
    far: &(dyn Fn(&Point) -> FarField + Sync),
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let mu = ctx.mu();
    let inner = ctx.inner_spec(region.volume());
    let failure = std::sync::Mutex::new(None);
    let g = |x: &Point| {
        let h = |y: &Point| {
            let m = if region.inside(y) { 1.0 } else { 2.0 };
            m * k(x, y)
        };
        // the mask changes value at ∂R, so the far field starts beyond it
        let ff = match far(x) {
            FarField::Scaling { radius, weight } => FarField::Scaling {
                radius: radius.max((*x - region.center()).norm() + region.extent() + 1e-9),
                weight,
            },
            other => other,
        };
        let kinks = [
            region.signed_distance(x).abs(),
            (*x - region.center()).norm() + region.extent(),
        ];
        match integrate_pv_fn_with_kinks(x, &h, ff, true, &kinks, mu, &inner) {
            Ok(r) => r.sample(),
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                Sample::exact(0.0)
            }
        }
    };
    let out = integrate_volume(region, g, spec)?;
    match failure.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// ∬ K(x, y) μ(y − x) dy dx for a symmetric K that vanishes unless one of
/// the points lies in the ball B(c, r). With χ a smooth bump on a slightly
/// larger ball, W(x, y) = χ(x)/(χ(x) + χ(y)) satisfies W(x, y) + W(y, x) = 1
/// wherever K is nonzero, so the integral equals 2∬ K W. Unlike a sharp
/// mask this keeps the inner integrand smooth.
fn symmetric_double_smooth(
    ctx: &OperatorContext,
    c: Point,
    r: f64,
    k: &(dyn Fn(&Point, &Point) -> f64 + Sync),
    far: &(dyn Fn(&Point) -> FarField + Sync),
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let reach = 1.25 * r;
    let outer = make_ball(ctx.dimension(), c, reach)?;
    let chi = |z: &Point| {
        let t = 1.0 - (*z - c).norm_sq() / (reach * reach);
        if t > 0.0 {
            t * t * t
        } else {
            0.0
        }
    };
    let mu = ctx.mu();
    let inner = ctx.inner_spec(outer.volume());
    let failure = std::sync::Mutex::new(None);
    let g = |x: &Point| {
        let cx = chi(x);
        if cx == 0.0 {
            return Sample::exact(0.0);
        }
        let h = |y: &Point| 2.0 * cx / (cx + chi(y)) * k(x, y);
        let ff = match far(x) {
            FarField::Scaling { radius, weight } => FarField::Scaling {
                radius: radius.max((*x - c).norm() + reach + 1e-9),
                weight,
            },
            other => other,
        };
        match integrate_pv_fn(x, &h, ff, true, mu, &inner) {
            Ok(r) => r.sample(),
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                Sample::exact(0.0)
            }
        }
    };
    let out = integrate_volume(&outer, g, spec)?;
    match failure.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// ∫ φ ψ dx over the support of φ.
pub fn scalar_product(
    phi: &ScalarField,
    psi: &ScalarField,
    dim: usize,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let (c, r) = phi
        .support()
        .or_else(|| psi.support())
        .ok_or(Error::NotAdmissible(
            "scalar product needs a compactly supported factor".into(),
        ))?;
    let ball = make_ball(dim, c, r)?;
    integrate_volume(
        &ball,
        |x: &Point| Sample::exact(phi.eval(x) * psi.eval(x)),
        spec,
    )
}

/// ⟨f, g⟩_w = ∬ f(x, y) g(x, y) w(y − x) dy dx.
///
/// `region` must be bounded and such that f·g vanishes when both points lie
/// outside it.
pub fn nonlocal_scalar_product(
    ctx: &OperatorContext,
    f: &NonlocalField,
    g: &NonlocalField,
    weight: &RadialProfile,
    region: &Domain,
) -> Result<QuadResult> {
    ctx.check_field(f)?;
    ctx.check_field(g)?;
    let wctx = OperatorContext {
        pair: AdmissiblePair::new(ctx.pair.alpha.clone(), weight.clone())?,
        ..ctx.clone()
    };
    let k = |x: &Point, y: &Point| f.eval(x, y) * g.eval(x, y);
    let far = |x: &Point| product_far(f.far_field(x), g.far_field(x));
    symmetric_double(&wctx, region, &k, &far, &ctx.spec)
}

fn product_far(a: FarField, b: FarField) -> FarField {
    match (a, b) {
        (
            FarField::Scaling {
                radius: r1,
                weight: w1,
            },
            FarField::Scaling {
                radius: r2,
                weight: w2,
            },
        ) => {
            let weight = match (w1, w2) {
                (None, w) | (w, None) => w,
                (Some(p), Some(q)) => Some(p.product(&q).expect("same dimension")),
            };
            FarField::Scaling {
                radius: r1.max(r2),
                weight,
            }
        }
        (FarField::Bounded { sup: s1 }, FarField::Bounded { sup: s2 }) => {
            FarField::Bounded { sup: s1 * s2 }
        }
        _ => FarField::Unknown,
    }
}

/// Both sides of ⟨𝒟f, φ⟩ = −⟨f, 𝒢_α φ⟩_{α⁻¹μ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Duality {
    pub divergence_side: QuadResult,
    pub gradient_side: QuadResult,
}

impl Duality {
    pub fn residual(&self) -> f64 {
        (self.divergence_side.value + self.gradient_side.value).abs()
    }

    pub fn combined_error(&self) -> f64 {
        self.divergence_side
            .error_estimate
            .hypot(self.gradient_side.error_estimate)
    }
}

/// Evaluates both pairings; the left-hand side over the support ball of φ,
/// the right-hand side through the symmetry of f(x, y)(φ(y) − φ(x)).
pub fn duality(ctx: &OperatorContext, f: &NonlocalField, phi: &ScalarField) -> Result<Duality> {
    ctx.check_field(f)?;
    let d = ctx.dimension();
    let Some((c, r)) = phi.support() else {
        return Err(Error::NotAdmissible(
            "duality needs a compactly supported test function".into(),
        ));
    };
    let s = make_ball(d, c, r)?;
    let sctx = OperatorContext {
        domain: s.clone(),
        ..ctx.clone()
    };
    let inner = sctx.inner_spec(s.volume());
    let failure = std::sync::Mutex::new(None);
    let lhs = integrate_volume(
        &s,
        |x: &Point| {
            let p = phi.eval(x);
            if p == 0.0 {
                return Sample::exact(0.0);
            }
            match nonlocal_divergence_with(&sctx, f, x, &inner) {
                Ok(v) => v.scaled(p).sample(),
                Err(e) => {
                    failure.lock().unwrap().get_or_insert(e);
                    Sample::exact(0.0)
                }
            }
        },
        &ctx.spec,
    )?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    // ⟨f, 𝒢_α φ⟩_{α⁻¹μ} = ∬ f(x, y)(φ(y) − φ(x)) μ(y − x)
    let k = |x: &Point, y: &Point| f.eval(x, y) * (phi.eval(y) - phi.eval(x));
    let far = |x: &Point| f.far_field(x);
    let rhs = symmetric_double_smooth(&sctx, c, r, &k, &far, &ctx.spec)?;
    Ok(Duality {
        divergence_side: lhs,
        gradient_side: rhs,
    })
}

/// |⟨𝒟f, φ⟩ + ⟨f, 𝒢_α φ⟩_{α⁻¹μ}|.
pub fn duality_residual(
    ctx: &OperatorContext,
    f: &NonlocalField,
    phi: &ScalarField,
) -> Result<f64> {
    Ok(duality(ctx, f, phi)?.residual())
}
