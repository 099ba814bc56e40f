//! Fractional gradient and divergence, the fractional p-Laplacian, the
//! fractional perimeter with its dual functional, and fractional mean
//! curvature.
//!
//! Order s ∈ (0, 1) corresponds to the fractional kernel family at ε = 1 − s.

use crate::error::{check_dim, Error, Result};
use crate::fields::{
    gradient_field, normal_field, FarField, FieldKind, Mollified, NonlocalField, ScalarField,
};
use crate::gauss::GaussLegendre;
use crate::geometry::{make_ball, Domain, Shape};
use crate::kernels::{make_fractional_family, AdmissiblePair, RadialProfile};
use crate::operators::{bulk_divergence_integral, OperatorContext};
use crate::point::Point;
use crate::quadrature::adaptive::{integrate_adaptive_nested, Sample};
use crate::quadrature::sphere::{integrate_hemisphere_graded, integrate_sphere, SphereTol};
use crate::quadrature::{
    integrate_double_graded, integrate_pv, integrate_pv_fn, QuadResult, QuadSpec,
};
use crate::special::{ball_volume, perimeter_constant, sphere_area};
use std::f64::consts::PI;
use std::sync::Arc;

/// Order, dimension and integrability exponent of a fractional problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams {
    pub d: usize,
    pub s: f64,
    pub p: f64,
    /// c_{d,s} = Γ(d/2 + 1/2)√π / (4sΓ(d/2 + 1))
    pub c_ds: f64,
}

impl FracParams {
    pub fn new(d: usize, s: f64, p: f64) -> Result<Self> {
        check_dim(d)?;
        check_order(s)?;
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "must be at least 1",
            });
        }
        Ok(Self {
            d,
            s,
            p,
            c_ds: perimeter_constant(d, s),
        })
    }
}

fn check_order(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "s",
            value: s,
            reason: "fractional order must lie in (0, 1)",
        })
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "p-Laplacian needs p >= 2",
        })
    }
}

/// The fractional pair (|h|^{−s}, (2ds(1−s)/ℋ^{d−1}(𝕊^{d−1}))|h|^{−d−s}).
pub fn fractional_pair(d: usize, s: f64) -> Result<AdmissiblePair> {
    check_order(s)?;
    make_fractional_family(d)?.pair_at(1.0 - s)
}

/// ∇⁽ˢ⁾φ(x, y) = (φ(y) − φ(x)) / |y − x|^s.
pub fn frac_gradient(phi: ScalarField, d: usize, s: f64) -> Result<NonlocalField> {
    Ok(gradient_field(phi, fractional_pair(d, s)?.alpha))
}

/// div⁽ˢ⁾f(x) = 2 pv ∫ f(x, y) μ_s(y − x) dy.
pub fn frac_divergence(
    f: &NonlocalField,
    s: f64,
    x: &Point,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let pair = fractional_pair(f.dim, s)?;
    Ok(integrate_pv(x, f, &pair.mu, spec)?.scaled(2.0))
}

/// −(−Δ)ˢ_p u(x) = (1 − s) pv ∫ |u(y) − u(x)|^{p−2}(u(y) − u(x)) |y − x|^{−d−sp} dy.
pub fn frac_p_laplacian_direct(
    u: &ScalarField,
    d: usize,
    s: f64,
    p: f64,
    x: &Point,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    check_dim(d)?;
    check_order(s)?;
    check_p(p)?;
    let ux = u.eval(x);
    let g = |y: &Point| {
        let t = u.eval(y) - ux;
        t.abs().powf(p - 2.0) * t
    };
    let far = match u.support() {
        Some((c, r)) => FarField::Scaling {
            radius: (*x - c).norm() + r + 1e-9,
            weight: None,
        },
        None if matches!(u, ScalarField::Constant(_)) => FarField::Bounded { sup: 0.0 },
        None => FarField::Unknown,
    };
    let mu = RadialProfile::power(d, 1.0 - s, -(d as f64) - s * p)?;
    integrate_pv_fn(x, &g, far, false, &mu, spec)
}

/// (ℋ^{d−1}(𝕊^{d−1}) / (4ds)) · div⁽ˢ⁾(|∇⁽ˢ⁾u|^{p−2} ∇⁽ˢ⁾u)(x).
pub fn frac_p_laplacian_composed(
    u: &ScalarField,
    d: usize,
    s: f64,
    p: f64,
    x: &Point,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    check_dim(d)?;
    check_order(s)?;
    check_p(p)?;
    let field = NonlocalField {
        dim: d,
        kind: FieldKind::PowerGradient { u: u.clone(), s, p },
    };
    let k = sphere_area(d) / (4.0 * d as f64 * s);
    Ok(frac_divergence(&field, s, x, spec)?.scaled(k))
}

/// Per_s(E) = (1/|B^{d−1}|) ∫_E ∫_{Eᶜ} |y − x|^{−d−s} dy dx.
pub fn frac_perimeter(domain: &Domain, s: f64, spec: &QuadSpec) -> Result<QuadResult> {
    check_order(s)?;
    let q = integrate_double_graded(domain, s, spec)?;
    Ok(q.scaled(1.0 / ball_volume(domain.dimension() - 1)))
}

/// P_s(f) = c_{d,s} ∫_E div⁽ˢ⁾f(x) dx.
pub fn perimeter_functional(
    domain: &Domain,
    s: f64,
    f: &NonlocalField,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let d = domain.dimension();
    let ctx = OperatorContext::new(domain.clone(), fractional_pair(d, s)?, *spec)?;
    if let (Shape::Ball { radius }, FieldKind::Mollified(m)) = (domain.shape(), &f.kind) {
        if m.is_radial() && m.domain() == domain {
            ctx.check_field(f)?;
            let q = radial_bulk_divergence(domain, *radius, m.scale(), s, f, spec)?;
            return Ok(q.scaled(perimeter_constant(d, s)));
        }
    }
    Ok(bulk_divergence_integral(&ctx, f)?.scaled(perimeter_constant(d, s)))
}

/// ∫_B div⁽ˢ⁾f for a field invariant under rotations about the centre of
/// the ball: one point per shell, with a break where the transition band
/// of the mollified profile begins.
fn radial_bulk_divergence(
    domain: &Domain,
    radius: f64,
    band: f64,
    s: f64,
    f: &NonlocalField,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let d = domain.dimension();
    let area = sphere_area(d);
    let inner = spec
        .inner()
        .with_tol(spec.abs_tol * 1e-2 / domain.volume(), spec.rel_tol * 1e-2);
    let failure = std::sync::Mutex::new(None);
    let shell = |rho: f64| -> Sample {
        let x = domain.center() + Point::unit(d - 1) * rho;
        match frac_divergence(f, s, &x, &inner) {
            Ok(q) => {
                let w = area * rho.powi(d as i32 - 1);
                Sample {
                    value: q.value * w,
                    err: q.error_estimate * w,
                    evals: q.n_evals,
                    ok: q.converged,
                }
            }
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                Sample::exact(0.0)
            }
        }
    };
    let edge = (radius - 2.0 * band).max(0.0);
    let out = integrate_adaptive_nested(
        shell,
        0.0,
        radius,
        &[edge],
        4,
        spec.abs_tol,
        spec.rel_tol,
        spec.max_evals,
        true,
    );
    match failure.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Chebyshev interpolant on [a, b] in barycentric form.
#[derive(Debug, Clone)]
struct Chebyshev {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl Chebyshev {
    fn fit(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let nodes: Vec<f64> = (0..=n).map(|k| (PI * k as f64 / n as f64).cos()).collect();
        let values = nodes
            .iter()
            .map(|&t| f(0.5 * (a + b) + 0.5 * (b - a) * t))
            .collect();
        Self {
            a,
            b,
            nodes,
            values,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let n = self.nodes.len() - 1;
        let mut num = 0.0;
        let mut den = 0.0;
        for (k, (&tk, &vk)) in self.nodes.iter().zip(&self.values).enumerate() {
            let diff = t - tk;
            if diff == 0.0 {
                return vk;
            }
            let w = if k == 0 || k == n { 0.5 } else { 1.0 } * if k % 2 == 0 { 1.0 } else { -1.0 };
            num += w * vk / diff;
            den += w / diff;
        }
        num / den
    }
}

/// Chebyshev nodes per mollified profile.
const PROFILE_NODES: usize = 48;

/// Mollified indicators of the inward and outward erosions of a ball. Both
/// are radial, so each is tabulated once as a function of |x − c| across
/// its transition band.
#[derive(Debug, Clone)]
pub struct BallMollifier {
    domain: Domain,
    radius: f64,
    eps: f64,
    inner: Chebyshev,
    outer: Chebyshev,
}

/// Radial profile (1 − r²/ε²)⁴ of the mollifier before normalisation.
fn bump(r: f64, eps: f64) -> f64 {
    let t = 1.0 - (r / eps).powi(2);
    if t > 0.0 {
        t.powi(4)
    } else {
        0.0
    }
}

impl BallMollifier {
    pub fn new(domain: &Domain, eps: f64) -> Result<Self> {
        let Shape::Ball { radius } = *domain.shape() else {
            return Err(Error::UnsupportedShape(
                "mollified maximizer outside a ball",
            ));
        };
        if !(eps > 0.0 && eps < 0.5 && 2.0 * eps < radius) {
            return Err(Error::InvalidParameter {
                name: "eps_moll",
                value: eps,
                reason: "must lie in (0, 0.5) and below half the radius",
            });
        }
        let d = domain.dimension();
        let rule = GaussLegendre::new(8);
        let mass =
            sphere_area(d) * rule.integrate(0.0, eps, |r| bump(r, eps) * r.powi(d as i32 - 1));
        let inner_ball = make_ball(d, Point::ZERO, radius - eps)?;
        let outer_ball = make_ball(d, Point::ZERO, radius + eps)?;
        let inner = Chebyshev::fit(radius - 2.0 * eps, radius, PROFILE_NODES, |rho| {
            convolve_ball(&inner_ball, rho, eps, mass, &rule)
        });
        let outer = Chebyshev::fit(radius, radius + 2.0 * eps, PROFILE_NODES, |rho| {
            1.0 - convolve_ball(&outer_ball, rho, eps, mass, &rule)
        });
        Ok(Self {
            domain: domain.clone(),
            radius,
            eps,
            inner,
            outer,
        })
    }

    fn rho(&self, x: &Point) -> f64 {
        (*x - self.domain.center()).norm()
    }
}

/// (φ_ε ∗ 1_B)(ρ e) for a centred ball B, by polar quadrature around the
/// evaluation point with exact ray clipping.
fn convolve_ball(ball: &Domain, rho: f64, eps: f64, mass: f64, rule: &GaussLegendre) -> f64 {
    let d = ball.dimension();
    let x = Point::unit(d - 1) * rho;
    let ray = |u: Point| -> Sample {
        let v: f64 = ball
            .ray_intervals(&x, &u, eps)
            .iter()
            .map(|&(a, b)| rule.integrate(a, b, |r| bump(r, eps) * r.powi(d as i32 - 1)))
            .sum();
        Sample::exact(v)
    };
    let tol = SphereTol {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_evals: 200_000,
        init_panels: 4,
    };
    integrate_sphere(d, false, ray, &[], &tol).value / mass
}

impl Mollified for BallMollifier {
    fn inner(&self, x: &Point) -> f64 {
        let rho = self.rho(x);
        if rho <= self.radius - 2.0 * self.eps {
            1.0
        } else if rho >= self.radius {
            0.0
        } else {
            self.inner.eval(rho).clamp(0.0, 1.0)
        }
    }

    fn outer(&self, x: &Point) -> f64 {
        let rho = self.rho(x);
        if rho <= self.radius {
            0.0
        } else if rho >= self.radius + 2.0 * self.eps {
            1.0
        } else {
            self.outer.eval(rho).clamp(0.0, 1.0)
        }
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn scale(&self) -> f64 {
        self.eps
    }

    fn is_radial(&self) -> bool {
        true
    }
}

/// g_ε(x, y) = A(x)B(y) − A(y)B(x) with A, B the mollified indicators of
/// {sd < −ε} and {sd > ε}.
pub fn mollified_maximizer(domain: &Domain, eps_moll: f64) -> Result<NonlocalField> {
    let m = BallMollifier::new(domain, eps_moll)?;
    Ok(NonlocalField {
        dim: domain.dimension(),
        kind: FieldKind::Mollified(Arc::new(m)),
    })
}

/// ∫₀^∞ (2 − 2·1_E(x+ru) − 2·1_E(x−ru)) r^{−1−s} dr, in closed form from
/// the ray intersections.
fn ray_profile(domain: &Domain, x: &Point, u: &Point, s: f64) -> f64 {
    let tmax = if domain.is_bounded() {
        (*x - domain.center()).norm() + domain.extent() + 1.0
    } else {
        1e6
    };
    // x sits on ∂E only up to rounding: snap interval ends within the
    // boundary tolerance onto r = 0
    const SNAP: f64 = 1e-9;
    let clean = |iv: Vec<(f64, f64)>| -> Vec<(f64, f64)> {
        iv.into_iter()
            .filter(|&(_, b)| b > SNAP)
            .map(|(a, b)| (if a < SNAP { 0.0 } else { a }, b))
            .collect()
    };
    let plus = clean(domain.ray_intervals(x, u, tmax));
    let minus = clean(domain.ray_intervals(x, &(*u * -1.0), tmax));
    let mut cuts = vec![0.0, tmax];
    for &(a, b) in plus.iter().chain(&minus) {
        cuts.push(a);
        cuts.push(b);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let inside = |iv: &[(f64, f64)], r: f64| iv.iter().any(|&(a, b)| r > a && r < b) as i32;
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let m = 0.5 * (lo + hi);
        let n = inside(&plus, m) + inside(&minus, m);
        if n == 1 {
            continue;
        }
        if lo == 0.0 {
            // only reachable along an exactly tangent ray
            return 0.0;
        }
        acc += (1 - n) as f64 * (lo.powf(-s) - hi.powf(-s)) / s;
    }
    let reach =
        |iv: &[(f64, f64)]| iv.last().is_some_and(|&(_, b)| b >= tmax * (1.0 - 1e-12)) as i32;
    let n_inf = reach(&plus) + reach(&minus);
    acc += (1 - n_inf) as f64 * tmax.powf(-s) / s;
    2.0 * acc
}

/// Snaps `x` onto ∂E and returns the boundary point with its inward normal.
fn boundary_frame(domain: &Domain, x: &Point) -> Result<(Point, Point)> {
    let z = if domain.signed_distance(x).abs() < 1e-9 {
        *x
    } else {
        domain.nearest_boundary_point(x).point
    };
    let nrm = domain.normal_at(&z);
    if nrm.at_corner {
        return Err(Error::NotAdmissible("mean curvature at a corner".into()));
    }
    Ok((z, nrm.n * -1.0))
}

/// H_s(x; E) = (1/|B^{d−1}|) pv ∫ (1_{Eᶜ}(y) − 1_E(y)) |y − x|^{−d−s} dy for x ∈ ∂E.
///
/// Directions are paired ±u over the half sphere around the inward normal;
/// each pair is integrated radially in closed form, and the angular integral
/// is graded toward the tangent directions.
pub fn frac_mean_curvature_direct(
    domain: &Domain,
    s: f64,
    x: &Point,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    check_order(s)?;
    let d = domain.dimension();
    let (z, nu) = boundary_frame(domain, x)?;
    let raw = integrate_hemisphere_graded(
        d,
        &nu,
        |u: Point| Sample::exact(ray_profile(domain, &z, &u, s)),
        spec,
    );
    Ok(raw.scaled(1.0 / ball_volume(d - 1)))
}

/// c_{d,s} div⁽ˢ⁾n(x) with n the nonlocal normal field of E, at x ∈ ∂E.
pub fn frac_mean_curvature_via_divergence(
    domain: &Domain,
    s: f64,
    x: &Point,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    check_order(s)?;
    let (z, _) = boundary_frame(domain, x)?;
    let n = normal_field(domain);
    Ok(frac_divergence(&n, s, &z, spec)?.scaled(perimeter_constant(domain.dimension(), s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_half_space;
    use crate::special::perimeter_constant_geometric;
    use statrs::function::gamma::gamma;

    fn spec() -> QuadSpec {
        QuadSpec::default().with_tol(1e-9, 1e-8)
    }

    #[test]
    fn constants() {
        let p = FracParams::new(2, 0.5, 2.0).unwrap();
        assert!((p.c_ds - PI / 4.0).abs() < 1e-12);
        for d in 1..=3 {
            for s in [0.1, 0.5, 0.9] {
                assert!(
                    (perimeter_constant(d, s) - perimeter_constant_geometric(d, s)).abs() < 1e-12
                );
            }
        }
        assert!(FracParams::new(2, 1.0, 2.0).is_err());
        assert!(FracParams::new(2, 0.0, 2.0).is_err());
    }

    #[test]
    fn gradient_values() {
        let phi = ScalarField::Linear {
            a: Point::unit(0),
            b: 0.0,
        };
        for s in [0.2, 0.7] {
            let g = frac_gradient(phi.clone(), 2, s).unwrap();
            assert!((g.eval(&Point::ZERO, &Point::unit(0)) - 1.0).abs() < 1e-15);
        }
        let c = frac_gradient(ScalarField::Constant(3.0), 2, 0.4).unwrap();
        assert_eq!(c.eval(&Point::ZERO, &Point::new2(0.3, 0.2)), 0.0);
        assert_eq!(
            frac_divergence(&c, 0.4, &Point::ZERO, &spec())
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn laplacian_of_gaussian_is_negative_at_peak() {
        let u = ScalarField::gaussian(1.0, 0.5, Point::ZERO).unwrap();
        let g = frac_gradient(u, 2, 0.5).unwrap();
        assert!(
            frac_divergence(&g, 0.5, &Point::ZERO, &spec())
                .unwrap()
                .value
                < 0.0
        );
    }

    /// (−Δ)ˢ of A·exp(−|x|²/(2σ²)) at its centre, from the Fourier side.
    fn fourier_laplacian_at_centre(d: usize, s: f64, sigma: f64) -> f64 {
        let dd = d as f64;
        let a = 0.5 * sigma * sigma;
        (2.0 * PI).powf(-dd)
            * (2.0 * PI * sigma * sigma).powf(dd / 2.0)
            * sphere_area(d)
            * gamma(s + dd / 2.0)
            / (2.0 * a.powf(s + dd / 2.0))
    }

    #[test]
    fn p2_matches_fourier_oracle() {
        for (d, s) in [(1, 0.5), (2, 0.5), (2, 0.3)] {
            let sigma = 0.4;
            let u = ScalarField::gaussian(1.0, sigma, Point::ZERO).unwrap();
            let direct = frac_p_laplacian_direct(&u, d, s, 2.0, &Point::ZERO, &spec()).unwrap();
            // literature normalisation of the singular-integral form
            let c = 4f64.powf(s) * gamma(d as f64 / 2.0 + s)
                / (PI.powf(d as f64 / 2.0) * gamma(-s).abs());
            let expected = -(1.0 - s) * fourier_laplacian_at_centre(d, s, sigma) / c;
            assert!(
                (direct.value - expected).abs() < 1e-6 * expected.abs(),
                "d={d} s={s} {direct:?} {expected}"
            );
        }
    }

    #[test]
    fn p_laplacian_routes_agree() {
        let u = ScalarField::gaussian(1.0, 0.5, Point::new2(0.1, 0.0)).unwrap();
        for s in [0.3, 0.7] {
            for p in [2.0, 3.0] {
                for x in [Point::ZERO, Point::new2(0.5, 0.0)] {
                    let a = frac_p_laplacian_direct(&u, 2, s, p, &x, &spec()).unwrap();
                    let b = frac_p_laplacian_composed(&u, 2, s, p, &x, &spec()).unwrap();
                    let err = a.error_estimate.hypot(b.error_estimate);
                    assert!(
                        (a.value - b.value).abs() <= 3.0 * err.max(1e-12),
                        "s={s} p={p} {a:?} {b:?}"
                    );
                }
            }
        }
        let c = ScalarField::Constant(1.0);
        assert_eq!(
            frac_p_laplacian_direct(&c, 2, 0.5, 3.0, &Point::ZERO, &spec())
                .unwrap()
                .value,
            0.0
        );
        assert!(frac_p_laplacian_direct(&u, 2, 0.5, 1.5, &Point::ZERO, &spec()).is_err());
    }

    #[test]
    fn perimeter_scaling_and_translation() {
        let s = 0.5;
        let sp = QuadSpec::default().with_tol(1e-7, 1e-7);
        let disk = make_ball(2, Point::ZERO, 1.0).unwrap();
        let a = frac_perimeter(&disk, s, &sp).unwrap();
        let b = frac_perimeter(&disk.scaled(2.0).unwrap(), s, &sp).unwrap();
        let k = 2f64.powf(2.0 - s);
        assert!(
            (b.value - k * a.value).abs() <= 2.0 * (b.error_estimate + k * a.error_estimate),
            "{a:?} {b:?}"
        );
        let t = frac_perimeter(&disk.translated(Point::new2(3.0, -1.0)), s, &sp).unwrap();
        assert!((t.value - a.value).abs() <= 2.0 * (a.error_estimate + t.error_estimate));
    }

    #[test]
    fn mollifier_profiles() {
        let disk = make_ball(2, Point::ZERO, 1.0).unwrap();
        let eps = 0.1;
        let m = BallMollifier::new(&disk, eps).unwrap();
        let rule = GaussLegendre::new(8);
        let mass = 2.0 * PI * rule.integrate(0.0, eps, |r| bump(r, eps) * r);
        // unit mass: far from the eroded ball the convolution is 0 or 1
        let big = make_ball(2, Point::ZERO, 5.0).unwrap();
        assert!((convolve_ball(&big, 0.0, eps, mass, &rule) - 1.0).abs() < 1e-12);
        let inner_ball = make_ball(2, Point::ZERO, 1.0 - eps).unwrap();
        for rho in [0.81, 0.85, 0.9, 0.95, 0.99] {
            let direct = convolve_ball(&inner_ball, rho, eps, mass, &rule);
            let x = Point::new2(rho * 0.6, rho * 0.8);
            assert!((m.inner(&x) - direct).abs() < 1e-8, "{rho}");
        }
        let g = mollified_maximizer(&disk, eps).unwrap();
        let deep_in = Point::new2(0.3, 0.1);
        let deep_out = Point::new2(1.5, 0.0);
        assert_eq!(g.eval(&deep_in, &deep_out), 1.0);
        let (x, y) = (Point::new2(0.92, 0.0), Point::new2(0.0, 1.05));
        assert_eq!(g.eval(&x, &y), -g.eval(&y, &x));
        assert!(mollified_maximizer(&crate::geometry::make_lshape(), 0.1).is_err());
    }

    #[test]
    fn curvature_of_half_space_vanishes() {
        let h = make_half_space(2).unwrap();
        let d = frac_mean_curvature_direct(&h, 0.5, &Point::ZERO, &spec()).unwrap();
        assert!(d.value.abs() < 1e-12, "{d:?}");
        let v =
            frac_mean_curvature_via_divergence(&h, 0.5, &Point::new2(0.3, 0.0), &spec()).unwrap();
        assert!(v.value.abs() < 1e-12, "{v:?}");
    }

    #[test]
    fn disk_curvature() {
        let disk = make_ball(2, Point::ZERO, 1.0).unwrap();
        for s in [0.3, 0.5, 0.7] {
            // along direction θ from the inward normal the chord is 2cos θ
            let exact =
                2f64.powf(-s) / s * PI.sqrt() * gamma((1.0 - s) / 2.0) / gamma(1.0 - s / 2.0);
            let a = frac_mean_curvature_direct(&disk, s, &Point::new2(1.0, 0.0), &spec()).unwrap();
            assert!(
                (a.value - exact).abs() < 1e-7 * exact,
                "s={s} {a:?} {exact}"
            );
            let b = frac_mean_curvature_direct(&disk, s, &Point::new2(0.6, -0.8), &spec()).unwrap();
            assert!(
                (a.value - b.value).abs() <= 2.0 * a.error_estimate.max(1e-9),
                "{a:?} {b:?}"
            );
            let v = frac_mean_curvature_via_divergence(&disk, s, &Point::new2(0.0, 1.0), &spec())
                .unwrap();
            let err = v.error_estimate.hypot((1.0 - s) * a.error_estimate);
            assert!(
                (v.value - (1.0 - s) * a.value).abs() <= 3.0 * err.max(1e-9),
                "s={s} {v:?} {}",
                (1.0 - s) * a.value
            );
        }
    }
}
