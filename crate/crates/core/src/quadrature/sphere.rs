//! Integration over the unit sphere 𝕊^{d−1}, d ∈ {1, 2, 3}.

use super::adaptive::{integrate_adaptive_nested, Sample};
use super::graded::{integrate_graded, GradeEnd, Grading};
use super::{QuadResult, QuadSpec};
use crate::point::Point;
use std::f64::consts::PI;

/// Tolerances for a sphere integral.
#[derive(Debug, Clone, Copy)]
pub struct SphereTol {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: u64,
    pub init_panels: usize,
}

/// ∫_{𝕊^{d−1}} f(u) dσ(u). With `half = true` only the hemisphere
/// {u : u·e_d ≥ 0} (d = 1: u = +1) is covered, for integrands already
/// symmetrised over ±u.
///
/// `angle_breaks` (d = 2 only) are polar angles where the integrand may jump.
pub fn integrate_sphere<F>(
    d: usize,
    half: bool,
    f: F,
    angle_breaks: &[f64],
    tol: &SphereTol,
) -> QuadResult
where
    F: Fn(Point) -> Sample + Sync,
{
    match d {
        1 => {
            let a = f(Point::new1(1.0));
            let mut r = QuadResult {
                value: a.value,
                error_estimate: a.err,
                n_evals: a.evals,
                seed_used: None,
                converged: a.ok,
            };
            if !half {
                let b = f(Point::new1(-1.0));
                r.value += b.value;
                r.error_estimate += b.err;
                r.n_evals += b.evals;
                r.converged &= b.ok;
            }
            r
        }
        2 => {
            let top = if half { PI } else { 2.0 * PI };
            let breaks: Vec<f64> = angle_breaks
                .iter()
                .map(|t| t.rem_euclid(2.0 * PI))
                .collect();
            integrate_adaptive_nested(
                |t: f64| f(Point::new2(t.cos(), t.sin())),
                0.0,
                top,
                &breaks,
                tol.init_panels,
                tol.abs_tol,
                tol.rel_tol,
                tol.max_evals,
                false,
            )
        }
        3 => {
            let lo = if half { 0.0 } else { -1.0 };
            let inner_tol = SphereTol {
                abs_tol: tol.abs_tol / 4.0,
                max_evals: (tol.max_evals / 16).max(500),
                ..*tol
            };
            integrate_adaptive_nested(
                |z: f64| {
                    let rho = (1.0 - z * z).max(0.0).sqrt();
                    let r = integrate_adaptive_nested(
                        |p: f64| f(Point::new3(rho * p.cos(), rho * p.sin(), z)),
                        0.0,
                        2.0 * PI,
                        &[],
                        inner_tol.init_panels,
                        inner_tol.abs_tol,
                        inner_tol.rel_tol,
                        inner_tol.max_evals,
                        false,
                    );
                    r.sample()
                },
                lo,
                1.0,
                &[],
                tol.init_panels.div_ceil(2),
                tol.abs_tol,
                tol.rel_tol,
                tol.max_evals,
                false,
            )
        }
        _ => panic!("unsupported dimension {d}"),
    }
}

/// Closest relative approach to the rim. Geometric integrands resolve ray
/// intersections only down to a snapping distance, so levels nearer the rim
/// are extrapolated rather than sampled.
const RIM_DEPTH: f64 = 1e-6;

/// ∫ f(u) dσ(u) over the hemisphere {u : u·axis ≥ 0}, graded toward its
/// rim u·axis = 0 where integrands built from a boundary through the
/// centre are singular. In the plane `axis` must have a zero third
/// component.
pub fn integrate_hemisphere_graded<F>(d: usize, axis: &Point, f: F, spec: &QuadSpec) -> QuadResult
where
    F: Fn(Point) -> Sample + Sync,
{
    let grading = Grading {
        depth_floor: RIM_DEPTH,
        ..Grading::from_spec(spec, false)
    };
    match d {
        1 => {
            let a = f(*axis);
            QuadResult {
                value: a.value,
                error_estimate: a.err,
                n_evals: a.evals,
                seed_used: None,
                converged: a.ok,
            }
        }
        2 => {
            let tau = Point::new2(-axis[1], axis[0]);
            let g = |th: f64| f(*axis * th.cos() + tau * th.sin());
            integrate_graded(g, -0.5 * PI, 0.5 * PI, GradeEnd::Both, &grading)
        }
        _ => {
            let (t1, t2) = axis.tangent_frame();
            let inner = spec.inner();
            let g = |th: f64| -> Sample {
                let (st, ct) = th.sin_cos();
                let ring = |ph: f64| f(*axis * ct + (t1 * ph.cos() + t2 * ph.sin()) * st);
                let r = integrate_adaptive_nested(
                    ring,
                    0.0,
                    2.0 * PI,
                    &[],
                    4,
                    inner.abs_tol,
                    inner.rel_tol,
                    inner.max_evals,
                    false,
                );
                r.scaled(st).sample()
            };
            integrate_graded(
                g,
                0.0,
                0.5 * PI,
                GradeEnd::Upper,
                &Grading {
                    parallel: true,
                    ..grading
                },
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::sphere_area;

    fn tol() -> SphereTol {
        SphereTol {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_evals: 1_000_000,
            init_panels: 2,
        }
    }

    #[test]
    fn hemisphere_about_an_axis() {
        let spec = QuadSpec::default().with_tol(1e-12, 1e-12);
        let axes = [
            Point::new1(-1.0),
            Point::new2(0.6, -0.8),
            Point::new3(0.0, 0.6, 0.8),
        ];
        for (d, axis) in (1..=3).zip(axes) {
            let h = integrate_hemisphere_graded(d, &axis, |_| 1.0.into(), &spec);
            assert!(
                (h.value - 0.5 * sphere_area(d)).abs() < 1e-10,
                "d={d} {h:?}"
            );
            // ∫ u·axis over the hemisphere is |B^{d−1}|
            let m = integrate_hemisphere_graded(d, &axis, |u: Point| u.dot(&axis).into(), &spec);
            assert!(
                (m.value - crate::special::ball_volume(d - 1)).abs() < 1e-10,
                "d={d} {m:?}"
            );
        }
    }

    #[test]
    fn areas() {
        for d in 1..=3 {
            let r = integrate_sphere(d, false, |_| 1.0.into(), &[], &tol());
            assert!((r.value - sphere_area(d)).abs() < 1e-11, "d={d}");
            let h = integrate_sphere(d, true, |_| 1.0.into(), &[], &tol());
            assert!((h.value - 0.5 * sphere_area(d)).abs() < 1e-11, "d={d}");
        }
    }

    #[test]
    fn second_moments() {
        // ∫ u_1² dσ = |𝕊^{d−1}| / d
        for d in 1..=3 {
            let r = integrate_sphere(d, false, |u: Point| (u[0] * u[0]).into(), &[], &tol());
            assert!((r.value - sphere_area(d) / d as f64).abs() < 1e-11, "d={d}");
        }
    }
}
