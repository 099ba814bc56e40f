//! Parametrisations of domains and exterior collars by parameter boxes.
//!
//! A [`Chart`] maps a box `[lo, hi] ⊂ ℝᵏ` onto part of ℝᵈ with a Jacobian
//! factor, so that ∫ g = Σ_charts ∫_box g(map(u)) J(u) du. Charts of one
//! family cover their region up to a null set without overlap.

use super::{ellipse_speed, Domain, Shape};
use crate::error::{Error, Result};
use crate::point::Point;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartMap {
    /// x = u.
    Rect,
    /// u = (r, θ): x = c + r(cos θ, sin θ).
    Polar { center: Point },
    /// u = (r, z, φ): x = c + r(√(1−z²) cos φ, √(1−z²) sin φ, z).
    Spherical { center: Point },
    /// u = (ρ, θ): x = c + (aρ cos θ, bρ sin θ).
    Elliptic { center: Point, a: f64, b: f64 },
    /// u = (θ, t): x = z(θ) + t n(θ) for the ellipse boundary z.
    EllipseOffset { center: Point, a: f64, b: f64 },
    /// u = (t, σ): a strip over the edge a→b at normal height t, whose ends
    /// retreat by `t·shrink_a` and `t·shrink_b` (reflex neighbours).
    EdgeStrip {
        a: Point,
        b: Point,
        shrink_a: f64,
        shrink_b: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    pub dim: usize,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub map: ChartMap,
    /// Parameter axis along which `u − lo` is the distance to the boundary
    /// (collar charts).
    pub normal_axis: Option<usize>,
}

impl Chart {
    fn new(dim: usize, lo: [f64; 3], hi: [f64; 3], map: ChartMap) -> Self {
        Self {
            dim,
            lo,
            hi,
            map,
            normal_axis: None,
        }
    }

    fn with_normal_axis(mut self, axis: usize) -> Self {
        self.normal_axis = Some(axis);
        self
    }

    /// Point and Jacobian at parameter `u`.
    pub fn eval(&self, u: &[f64; 3]) -> (Point, f64) {
        match self.map {
            ChartMap::Rect => {
                let mut x = Point::ZERO;
                x.0[..self.dim].copy_from_slice(&u[..self.dim]);
                (x, 1.0)
            }
            ChartMap::Polar { center } => {
                let (s, c) = u[1].sin_cos();
                (center + Point::new2(u[0] * c, u[0] * s), u[0])
            }
            ChartMap::Spherical { center } => {
                let rho = (1.0 - u[1] * u[1]).max(0.0).sqrt();
                let (s, c) = u[2].sin_cos();
                (
                    center + Point::new3(u[0] * rho * c, u[0] * rho * s, u[0] * u[1]),
                    u[0] * u[0],
                )
            }
            ChartMap::Elliptic { center, a, b } => {
                let (s, c) = u[1].sin_cos();
                (
                    center + Point::new2(a * u[0] * c, b * u[0] * s),
                    a * b * u[0],
                )
            }
            ChartMap::EllipseOffset { center, a, b } => {
                let (s, c) = u[0].sin_cos();
                let v = ellipse_speed(a, b, u[0]);
                let n = Point::new2(b * c, a * s) / v;
                let kappa = a * b / (v * v * v);
                (
                    center + Point::new2(a * c, b * s) + n * u[1],
                    v * (1.0 + kappa * u[1]),
                )
            }
            ChartMap::EdgeStrip {
                a,
                b,
                shrink_a,
                shrink_b,
            } => {
                let len = (b - a).norm();
                let tan = (b - a) / len;
                let nrm = Point::new2(tan[1], -tan[0]);
                let t = u[0];
                let span = len - t * (shrink_a + shrink_b);
                let s = t * shrink_a + u[1] * span;
                (a + tan * s + nrm * t, span)
            }
        }
    }

    /// Parameter-box volume times the mean Jacobian is the chart's measure;
    /// this returns the exact measure where it is known in closed form.
    pub fn measure(&self) -> f64 {
        let w = |i: usize| self.hi[i] - self.lo[i];
        match self.map {
            ChartMap::Rect => (0..self.dim).map(w).product(),
            ChartMap::Polar { .. } => 0.5 * (self.hi[0].powi(2) - self.lo[0].powi(2)) * w(1),
            ChartMap::Spherical { .. } => {
                (self.hi[0].powi(3) - self.lo[0].powi(3)) / 3.0 * w(1) * w(2)
            }
            ChartMap::Elliptic { a, b, .. } => {
                a * b * 0.5 * (self.hi[0].powi(2) - self.lo[0].powi(2)) * w(1)
            }
            ChartMap::EllipseOffset { a, b, .. } => {
                // ∫∫ v(1+κt) = L·t + ½·(∫ vκ dθ)·t² with ∫ vκ dθ = 2π over a full turn
                let len = Domain {
                    dim: 2,
                    center: Point::ZERO,
                    shape: Shape::Ellipse { a, b },
                }
                .boundary_measure();
                let t = self.hi[1];
                len * t + PI * t * t
            }
            ChartMap::EdgeStrip {
                a,
                b,
                shrink_a,
                shrink_b,
            } => {
                let len = (b - a).norm();
                let t = self.hi[0];
                len * t - 0.5 * t * t * (shrink_a + shrink_b)
            }
        }
    }
}

/// Charts covering Ω.
pub fn volume_charts(domain: &Domain) -> Result<Vec<Chart>> {
    let c = domain.center;
    let d = domain.dim;
    Ok(match &domain.shape {
        Shape::Ball { radius } => match d {
            1 => vec![Chart::new(
                1,
                [c[0] - radius, 0.0, 0.0],
                [c[0] + radius, 0.0, 0.0],
                ChartMap::Rect,
            )],
            2 => vec![Chart::new(
                2,
                [0.0, 0.0, 0.0],
                [*radius, 2.0 * PI, 0.0],
                ChartMap::Polar { center: c },
            )],
            _ => vec![Chart::new(
                3,
                [0.0, -1.0, 0.0],
                [*radius, 1.0, 2.0 * PI],
                ChartMap::Spherical { center: c },
            )],
        },
        Shape::Box { half_widths } => {
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            for i in 0..d {
                lo[i] = c[i] - half_widths[i];
                hi[i] = c[i] + half_widths[i];
            }
            vec![Chart::new(d, lo, hi, ChartMap::Rect)]
        }
        Shape::Ellipse { a, b } => vec![Chart::new(
            2,
            [0.0, 0.0, 0.0],
            [1.0, 2.0 * PI, 0.0],
            ChartMap::Elliptic {
                center: c,
                a: *a,
                b: *b,
            },
        )],
        Shape::LShape => [
            ([-1.0, -1.0], [0.0, 0.0]),
            ([0.0, -1.0], [1.0, 0.0]),
            ([-1.0, 0.0], [0.0, 1.0]),
        ]
        .iter()
        .map(|(lo, hi)| {
            Chart::new(
                2,
                [lo[0] + c[0], lo[1] + c[1], 0.0],
                [hi[0] + c[0], hi[1] + c[1], 0.0],
                ChartMap::Rect,
            )
        })
        .collect(),
        Shape::HalfSpace => {
            return Err(Error::UnsupportedShape(
                "volume charts of an unbounded domain",
            ))
        }
    })
}

/// Charts covering the exterior collar {x ∈ Ωᶜ : dist(x, ∂Ω) < eps}, with
/// the boundary-distance coordinate marked as `normal_axis`.
pub fn collar_charts(domain: &Domain, eps: f64) -> Result<Vec<Chart>> {
    let c = domain.center;
    let d = domain.dim;
    Ok(match &domain.shape {
        Shape::Ball { radius } if d == 1 => interval_collar(c[0] - radius, c[0] + radius, eps),
        Shape::Box { half_widths } if d == 1 => {
            interval_collar(c[0] - half_widths[0], c[0] + half_widths[0], eps)
        }
        Shape::Ball { radius } if d == 2 => vec![Chart::new(
            2,
            [*radius, 0.0, 0.0],
            [radius + eps, 2.0 * PI, 0.0],
            ChartMap::Polar { center: c },
        )
        .with_normal_axis(0)],
        Shape::Ball { radius } => vec![Chart::new(
            3,
            [*radius, -1.0, 0.0],
            [radius + eps, 1.0, 2.0 * PI],
            ChartMap::Spherical { center: c },
        )
        .with_normal_axis(0)],
        Shape::Ellipse { a, b } => vec![Chart::new(
            2,
            [0.0, 0.0, 0.0],
            [2.0 * PI, eps, 0.0],
            ChartMap::EllipseOffset {
                center: c,
                a: *a,
                b: *b,
            },
        )
        .with_normal_axis(1)],
        Shape::Box { .. } | Shape::LShape if d == 2 => polygon_collar(domain, eps),
        _ => {
            return Err(Error::UnsupportedShape(
                "deterministic collar charts (use Monte Carlo)",
            ))
        }
    })
}

fn interval_collar(lo: f64, hi: f64, eps: f64) -> Vec<Chart> {
    vec![
        Chart::new(1, [lo - eps, 0.0, 0.0], [lo, 0.0, 0.0], ChartMap::Rect),
        Chart::new(1, [hi, 0.0, 0.0], [hi + eps, 0.0, 0.0], ChartMap::Rect),
    ]
}

/// Edge strips plus disk sectors at convex vertices.
fn polygon_collar(domain: &Domain, eps: f64) -> Vec<Chart> {
    let edges = domain.edges().expect("polygon");
    let n = edges.len();
    let turn = |i: usize| {
        // signed turning angle at the start vertex of edge i
        let t0 = edges[(i + n - 1) % n].tangent();
        let t1 = edges[i].tangent();
        (t0[0] * t1[1] - t0[1] * t1[0]).atan2(t0.dot(&t1))
    };
    let shrink = |angle: f64| {
        if angle < 0.0 {
            (0.5 * angle.abs()).tan()
        } else {
            0.0
        }
    };
    let mut charts = Vec::new();
    for i in 0..n {
        let e = edges[i];
        charts.push(
            Chart::new(
                2,
                [0.0, 0.0, 0.0],
                [eps, 1.0, 0.0],
                ChartMap::EdgeStrip {
                    a: e.a,
                    b: e.b,
                    shrink_a: shrink(turn(i)),
                    shrink_b: shrink(turn((i + 1) % n)),
                },
            )
            .with_normal_axis(0),
        );
    }
    for i in 0..n {
        let ang = turn(i);
        if ang > 0.0 {
            let nprev = edges[(i + n - 1) % n].normal();
            let th0 = nprev[1].atan2(nprev[0]);
            charts.push(
                Chart::new(
                    2,
                    [0.0, th0, 0.0],
                    [eps, th0 + ang, 0.0],
                    ChartMap::Polar { center: edges[i].a },
                )
                .with_normal_axis(0),
            );
        }
    }
    charts
}
