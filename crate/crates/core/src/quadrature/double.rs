//! ∫_E ∫_{Eᶜ} |y − x|^{−q} dy dx for q = d + s, s ∈ (0, 1).
//!
//! The inner integral is done ray by ray in closed form from the exact
//! ray/domain intersections, leaving a smooth-except-at-tangents angular
//! integral. The outer integral is graded toward ∂E, where the inner value
//! blows up like dist^{−s}.

use super::adaptive::Sample;
use super::graded::{integrate_graded, GradeEnd, Grading};
use super::sphere::{integrate_sphere, SphereTol};
use super::{integrate_volume, QuadResult, QuadSpec};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Shape};
use crate::point::Point;

/// ∫_{Eᶜ} |y − x|^{−d−s} dy for x ∈ E.
pub fn complement_potential(domain: &Domain, x: &Point, s: f64, tol: &SphereTol) -> QuadResult {
    let d = domain.dimension();
    let tmax = (*x - domain.center()).norm() + domain.extent() + 1.0;
    let ray = |u: Point| -> Sample {
        let iv = domain.ray_intervals(x, &u, tmax);
        // E ∩ ray starts at 0 since x ∈ E; integrate r^{−1−s} over the gaps
        let mut acc = 0.0;
        let mut prev_end = match iv.first() {
            Some(&(a, b)) if a <= 1e-14 => b,
            _ => 0.0,
        };
        if prev_end <= 0.0 {
            return Sample::exact(f64::INFINITY);
        }
        for &(a, b) in iv.iter().skip(1) {
            acc += (prev_end.powf(-s) - a.powf(-s)) / s;
            prev_end = b;
        }
        if prev_end < tmax {
            acc += prev_end.powf(-s) / s;
        }
        Sample::exact(acc)
    };
    integrate_sphere(d, false, ray, &[], tol)
}

/// ∫_E ∫_{Eᶜ} |y − x|^{−d−s} dy dx.
pub fn integrate_double_graded(domain: &Domain, s: f64, spec: &QuadSpec) -> Result<QuadResult> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            reason: "must lie in (0, 1)",
        });
    }
    if !domain.is_bounded() {
        return Err(Error::UnsupportedShape(
            "double integral over an unbounded set",
        ));
    }
    spec.validate()?;
    let d = domain.dimension();
    let tol = SphereTol {
        abs_tol: spec.abs_tol * 1e-2,
        rel_tol: spec.rel_tol * 1e-2,
        max_evals: spec.inner().max_evals,
        init_panels: 4,
    };
    if let Shape::Ball { radius } = domain.shape() {
        let c = domain.center();
        // the potential is rotation invariant, so each shell needs one point,
        // placed on the polar axis of the sphere parametrisation;
        // the radial integral is graded toward the sphere
        let area = crate::special::sphere_area(d);
        let shell = |rho: f64| -> Sample {
            let q = complement_potential(domain, &(c + Point::unit(d - 1) * rho), s, &tol);
            let w = area * rho.powi(d as i32 - 1);
            Sample {
                value: q.value * w,
                err: q.error_estimate * w,
                evals: q.n_evals,
                ok: q.converged,
            }
        };
        let grading = Grading::from_spec(spec, true);
        return Ok(integrate_graded(
            shell,
            0.0,
            *radius,
            GradeEnd::Upper,
            &grading,
        ));
    }
    integrate_volume(
        domain,
        |x: &Point| complement_potential(domain, x, s, &tol).sample(),
        spec,
    )
}

/// ∫₀^∞ r^{−1−s} (|E| − g(r)) dr · ℋ^{d−1}(𝕊^{d−1}) for a ball, with g the
/// covariogram |E ∩ (E + r e₁)|; an independent route to the same double
/// integral.
pub fn ball_double_via_covariogram(d: usize, radius: f64, s: f64) -> f64 {
    let vol = crate::special::ball_volume(d) * radius.powi(d as i32);
    let cov = |r: f64| -> f64 {
        if r >= 2.0 * radius {
            return 0.0;
        }
        let h = 0.5 * r;
        match d {
            1 => 2.0 * radius - r,
            2 => {
                2.0 * radius * radius * (h / radius).acos()
                    - 2.0 * h * (radius * radius - h * h).sqrt()
            }
            _ => 2.0 * std::f64::consts::PI / 3.0 * (radius - h).powi(2) * (2.0 * radius + h),
        }
    };
    let g = |r: f64| Sample::exact(r.powf(-1.0 - s) * (vol - cov(r)));
    let grading = Grading {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        max_evals: 2_000_000,
        ..Grading::from_spec(&QuadSpec::default(), false)
    };
    let near = integrate_graded(g, 0.0, 2.0 * radius, GradeEnd::Lower, &grading);
    let far = vol * (2.0 * radius).powf(-s) / s;
    crate::special::sphere_area(d) * (near.value + far)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_ball;

    #[test]
    fn disk_against_covariogram() {
        for (d, s) in [(1, 0.5), (2, 0.5), (2, 0.8), (3, 0.3)] {
            let ball = make_ball(d, Point::ZERO, 1.0).unwrap();
            let spec = QuadSpec::default()
                .with_tol(1e-7, 1e-7)
                .with_max_evals(20_000_000);
            let q = integrate_double_graded(&ball, s, &spec).unwrap();
            let oracle = ball_double_via_covariogram(d, 1.0, s);
            assert!(
                (q.value - oracle).abs() < 1e-5 * oracle,
                "d={d} s={s} {q:?} {oracle}"
            );
        }
    }

    #[test]
    fn interval_closed_form() {
        // d = 1, E = (−1, 1): ∫_E ((1−x)^{−s} + (1+x)^{−s})/s dx = 2·2^{1−s}/(s(1−s))
        let s = 0.4;
        let exact = 2.0 * 2f64.powf(1.0 - s) / (s * (1.0 - s));
        assert!((ball_double_via_covariogram(1, 1.0, s) - exact).abs() < 1e-9 * exact);
    }
}
