//! Surface quadrature on ∂Ω.

use super::{ellipse_speed, Domain, Shape};
use crate::error::{Error, Result};
use crate::gauss::GaussLegendre;
use crate::point::Point;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub point: Point,
    pub weight: f64,
    pub normal: Point,
    /// Index of the boundary face carrying the node (0 for smooth shapes).
    pub face: usize,
}

/// Nodes, weights and outward normals on ∂Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryQuadrature {
    pub nodes: Vec<BoundaryNode>,
    pub resolution: usize,
}

impl BoundaryQuadrature {
    pub fn total_weight(&self) -> f64 {
        crate::sum::pairwise_sum(&self.nodes.iter().map(|n| n.weight).collect::<Vec<_>>())
    }

    /// Σ wᵢ g(zᵢ, nᵢ).
    pub fn integrate<G: Fn(&Point, &Point) -> f64>(&self, g: G) -> f64 {
        let v: Vec<f64> = self
            .nodes
            .iter()
            .map(|n| n.weight * g(&n.point, &n.normal))
            .collect();
        crate::sum::pairwise_sum(&v)
    }

    /// Σ wᵢ g(zᵢ, nᵢ) restricted to one face.
    pub fn integrate_face<G: Fn(&Point, &Point) -> f64>(&self, face: usize, g: G) -> f64 {
        let v: Vec<f64> = self
            .nodes
            .iter()
            .filter(|n| n.face == face)
            .map(|n| n.weight * g(&n.point, &n.normal))
            .collect();
        crate::sum::pairwise_sum(&v)
    }
}

/// Trapezoidal rule in the angle for circles and ellipses (n nodes),
/// Gauss–Legendre in z times trapezoid in φ for spheres (n × 2n nodes),
/// midpoint rule with n nodes per edge (n × n per face in 3-D) for flat faces.
pub fn boundary_quadrature(domain: &Domain, n: usize) -> Result<BoundaryQuadrature> {
    if n < 8 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "boundary quadrature needs n >= 8",
        });
    }
    let c = domain.center();
    let d = domain.dimension();
    let mut nodes = Vec::new();
    match domain.shape() {
        Shape::Ball { radius } if d == 1 => {
            for (k, s) in [-1.0, 1.0].into_iter().enumerate() {
                nodes.push(BoundaryNode {
                    point: c + Point::new1(s * radius),
                    weight: 1.0,
                    normal: Point::new1(s),
                    face: k,
                });
            }
        }
        Shape::Ball { radius } if d == 2 => {
            for k in 0..n {
                let t = 2.0 * PI * k as f64 / n as f64;
                let u = Point::new2(t.cos(), t.sin());
                nodes.push(BoundaryNode {
                    point: c + u * *radius,
                    weight: 2.0 * PI * radius / n as f64,
                    normal: u,
                    face: 0,
                });
            }
        }
        Shape::Ball { radius } => {
            let gl = GaussLegendre::new(n);
            let m = 2 * n;
            for (z, wz) in gl.mapped(-1.0, 1.0) {
                let rho = (1.0 - z * z).sqrt();
                for k in 0..m {
                    let p = 2.0 * PI * k as f64 / m as f64;
                    let u = Point::new3(rho * p.cos(), rho * p.sin(), z);
                    nodes.push(BoundaryNode {
                        point: c + u * *radius,
                        weight: radius * radius * wz * 2.0 * PI / m as f64,
                        normal: u,
                        face: 0,
                    });
                }
            }
        }
        Shape::Ellipse { a, b } => {
            for k in 0..n {
                let t = 2.0 * PI * k as f64 / n as f64;
                let (s, co) = t.sin_cos();
                let v = ellipse_speed(*a, *b, t);
                nodes.push(BoundaryNode {
                    point: c + Point::new2(a * co, b * s),
                    weight: v * 2.0 * PI / n as f64,
                    normal: Point::new2(b * co, a * s) / v,
                    face: 0,
                });
            }
        }
        Shape::Box { half_widths } => {
            let mut face = 0;
            for axis in 0..d {
                for side in [-1.0, 1.0] {
                    let others: Vec<usize> = (0..d).filter(|&j| j != axis).collect();
                    let counts = vec![n; others.len()];
                    let total: usize = counts.iter().product();
                    let cell: f64 = others
                        .iter()
                        .map(|&j| 2.0 * half_widths[j] / n as f64)
                        .product();
                    for idx in 0..total {
                        let mut p = c;
                        p[axis] += side * half_widths[axis];
                        let mut rem = idx;
                        for &j in &others {
                            let k = rem % n;
                            rem /= n;
                            p[j] += -half_widths[j]
                                + (k as f64 + 0.5) * 2.0 * half_widths[j] / n as f64;
                        }
                        let mut nrm = Point::ZERO;
                        nrm[axis] = side;
                        nodes.push(BoundaryNode {
                            point: p,
                            weight: cell,
                            normal: nrm,
                            face,
                        });
                    }
                    face += 1;
                }
            }
        }
        Shape::LShape => {
            for (face, e) in domain.edges().expect("polygon").iter().enumerate() {
                let len = e.length();
                for k in 0..n {
                    let s = (k as f64 + 0.5) / n as f64;
                    nodes.push(BoundaryNode {
                        point: e.a + (e.b - e.a) * s,
                        weight: len / n as f64,
                        normal: e.normal(),
                        face,
                    });
                }
            }
        }
        Shape::HalfSpace => {
            return Err(Error::UnsupportedShape(
                "boundary quadrature of an unbounded domain",
            ))
        }
    }
    Ok(BoundaryQuadrature {
        nodes,
        resolution: n,
    })
}
