//! Weighted point sets over the exterior collar Ωᶜ_ε.

use super::charts::collar_charts;
use super::{Domain, Shape};
use crate::error::{check_positive, Error, Result};
use crate::gauss::GaussLegendre;
use crate::point::Point;
use crate::rng::StreamKey;
use std::f64::consts::PI;

/// Points with volume weights. Monte Carlo sets also carry the stratum of
/// each point so callers can estimate the sampling variance.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPoints {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub strata: Option<Vec<usize>>,
}

impl WeightedPoints {
    pub fn total_weight(&self) -> f64 {
        crate::sum::pairwise_sum(&self.weights)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Samples per stratum in the Monte Carlo collar.
pub const SAMPLES_PER_STRATUM: usize = 2;

/// Discretises {x ∈ Ωᶜ : dist(x, ∂Ω) < eps}.
///
/// In one and two dimensions this is a boundary-fitted Gauss–Legendre
/// product rule with `n` nodes per chart axis. In three dimensions it is a
/// stratified Monte Carlo sample with about `n` strata of
/// [`SAMPLES_PER_STRATUM`] points each, keyed by `seed`.
pub fn collar_points(domain: &Domain, eps: f64, n: usize, seed: u64) -> Result<WeightedPoints> {
    check_positive("eps", eps)?;
    if eps >= 1.0 || n == 0 {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "collar needs 0 < eps < 1 and n >= 1",
        });
    }
    if domain.dimension() <= 2 {
        return Ok(product_rule(domain, eps, n));
    }
    stratified(domain, eps, n, seed)
}

fn product_rule(domain: &Domain, eps: f64, n: usize) -> WeightedPoints {
    let gl = GaussLegendre::new(n);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for ch in collar_charts(domain, eps).expect("planar collar charts") {
        let a0: Vec<(f64, f64)> = gl.mapped(ch.lo[0], ch.hi[0]).collect();
        let a1: Vec<(f64, f64)> = if ch.dim > 1 {
            gl.mapped(ch.lo[1], ch.hi[1]).collect()
        } else {
            vec![(0.0, 1.0)]
        };
        for &(u0, w0) in &a0 {
            for &(u1, w1) in &a1 {
                let (x, j) = ch.eval(&[u0, u1, 0.0]);
                points.push(x);
                weights.push(w0 * w1 * j);
            }
        }
    }
    WeightedPoints {
        points,
        weights,
        strata: None,
    }
}

fn stratified(domain: &Domain, eps: f64, n: usize, seed: u64) -> Result<WeightedPoints> {
    let key = StreamKey::new(seed, 0xc011a5);
    let m = ((n as f64).cbrt().round() as usize).max(1);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut strata = Vec::new();
    match domain.shape() {
        Shape::Ball { radius } => {
            // strata in (r³, z, φ): equal-volume cells of the spherical shell
            let (r0, r1) = (*radius, radius + eps);
            let cell = 4.0 * PI / 3.0 * (r1.powi(3) - r0.powi(3))
                / (m * m * m) as f64
                / SAMPLES_PER_STRATUM as f64;
            let c = domain.center();
            for s in 0..m * m * m {
                let (i, j, k) = (s % m, (s / m) % m, s / (m * m));
                for q in 0..SAMPLES_PER_STRATUM {
                    let u: [f64; 3] = key.uniforms((s * SAMPLES_PER_STRATUM + q) as u64);
                    let v = r0.powi(3) + (i as f64 + u[0]) / m as f64 * (r1.powi(3) - r0.powi(3));
                    let r = v.cbrt();
                    let z = -1.0 + 2.0 * (j as f64 + u[1]) / m as f64;
                    let phi = 2.0 * PI * (k as f64 + u[2]) / m as f64;
                    let rho = (1.0 - z * z).max(0.0).sqrt();
                    points.push(c + Point::new3(r * rho * phi.cos(), r * rho * phi.sin(), r * z));
                    weights.push(cell);
                    strata.push(s);
                }
            }
        }
        Shape::Box { .. } => {
            // rejection over the enlarged bounding box, one cell per stratum
            let (lo, hi) = domain.bounding_box(eps);
            let side = [
                (hi[0] - lo[0]) / m as f64,
                (hi[1] - lo[1]) / m as f64,
                (hi[2] - lo[2]) / m as f64,
            ];
            let cell = side[0] * side[1] * side[2] / SAMPLES_PER_STRATUM as f64;
            for s in 0..m * m * m {
                let (i, j, k) = (s % m, (s / m) % m, s / (m * m));
                for q in 0..SAMPLES_PER_STRATUM {
                    let u: [f64; 3] = key.uniforms((s * SAMPLES_PER_STRATUM + q) as u64);
                    let x = Point::new3(
                        lo[0] + (i as f64 + u[0]) * side[0],
                        lo[1] + (j as f64 + u[1]) * side[1],
                        lo[2] + (k as f64 + u[2]) * side[2],
                    );
                    let sd = domain.signed_distance(&x);
                    // rejected samples keep their slot with zero weight so that
                    // per-stratum variance estimates stay unbiased
                    let w = if sd > 0.0 && sd < eps { cell } else { 0.0 };
                    points.push(x);
                    weights.push(w);
                    strata.push(s);
                }
            }
        }
        _ => return Err(Error::UnsupportedShape("three-dimensional collar")),
    }
    Ok(WeightedPoints {
        points,
        weights,
        strata: Some(strata),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{make_ball, make_box, make_lshape};
    use super::*;

    #[test]
    fn collar_areas() {
        let disk = make_ball(2, Point::ZERO, 1.0).unwrap();
        let w = collar_points(&disk, 0.1, 16, 1).unwrap().total_weight();
        assert!((w - 0.21 * PI).abs() < 0.01 * 0.21 * PI);
        let bx = make_box(2, &[1.0, 1.0]).unwrap();
        let w = collar_points(&bx, 0.1, 16, 1).unwrap().total_weight();
        let exact = 0.8 + PI * 0.01;
        assert!((w - exact).abs() < 0.01 * exact);
    }

    #[test]
    fn collar_shrinks_with_eps() {
        for dom in [make_ball(2, Point::ZERO, 1.0).unwrap(), make_lshape()] {
            let sweep: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
                .iter()
                .map(|&e| collar_points(&dom, e, 8, 0).unwrap().total_weight())
                .collect();
            assert!(sweep.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn monte_carlo_collars() {
        let ball = make_ball(3, Point::ZERO, 1.0).unwrap();
        let wp = collar_points(&ball, 0.1, 4096, 9).unwrap();
        let exact = 4.0 * PI / 3.0 * (1.1f64.powi(3) - 1.0);
        assert!((wp.total_weight() - exact).abs() < 1e-12 * exact);
        assert!(wp.points.iter().all(|x| {
            let sd = ball.signed_distance(x);
            sd > 0.0 && sd < 0.1
        }));
        let bx = make_box(3, &[1.0, 1.0, 1.0]).unwrap();
        let wp = collar_points(&bx, 0.1, 100_000, 9).unwrap();
        let exact = 24.0 * 0.1 + 12.0 * 2.0 * PI * 0.01 / 4.0 + 4.0 * PI * 0.001 / 3.0;
        assert!(
            (wp.total_weight() - exact).abs() < 0.03 * exact,
            "{} {exact}",
            wp.total_weight()
        );
        // same seed, same sample
        assert_eq!(wp, collar_points(&bx, 0.1, 100_000, 9).unwrap());
    }
}
