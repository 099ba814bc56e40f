//! Domains with exact signed distance, nearest boundary points, outward
//! normals and exact ray intersections.

mod boundary;
mod charts;
mod collar;
mod piecewise;

pub use boundary::{boundary_quadrature, BoundaryNode, BoundaryQuadrature};
pub use charts::{collar_charts, volume_charts, Chart, ChartMap};
pub use collar::{collar_points, WeightedPoints, SAMPLES_PER_STRATUM};
pub use piecewise::{decompose_piecewise, Face, PiecewiseDecomposition};

use crate::error::{check_dim, check_positive, Error, Result};
use crate::point::Point;
use crate::special::{ball_volume, sphere_area};
use std::f64::consts::PI;

/// Queries within this distance of a corner report a flagged normal.
pub const CORNER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    C1,
    PiecewiseC1,
}

/// Shape parameters, relative to the domain's center.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball {
        radius: f64,
    },
    Box {
        half_widths: [f64; 3],
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// (−1,1)² with the closed quadrant [0,1]² removed.
    LShape,
    /// {x : x_d < 0}.
    HalfSpace,
}

/// An open domain Ω ⊂ ℝᵈ.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    dim: usize,
    center: Point,
    shape: Shape,
}

/// Result of a nearest-boundary-point query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub point: Point,
    /// Signed distance of the query point.
    pub t: f64,
    /// The nearest point lies on a corner of a piecewise-C¹ boundary.
    pub at_corner: bool,
}

/// Outward normal at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    pub n: Point,
    /// Set when the point is a corner and `n` is the first adjacent face's normal.
    pub at_corner: bool,
}

/// A straight boundary edge of a polygon, oriented counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: Point,
    pub b: Point,
}

impl Edge {
    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    pub fn tangent(&self) -> Point {
        (self.b - self.a).normalized()
    }

    /// Outward normal for a counter-clockwise polygon.
    pub fn normal(&self) -> Point {
        let t = self.tangent();
        Point::new2(t[1], -t[0])
    }

    /// Closest point on the segment and its parameter in [0, 1].
    pub fn project(&self, x: &Point) -> (Point, f64) {
        let d = self.b - self.a;
        let s = ((*x - self.a).dot(&d) / d.norm_sq()).clamp(0.0, 1.0);
        (self.a + d * s, s)
    }
}

const LSHAPE_VERTICES: [[f64; 2]; 6] = [
    [-1.0, -1.0],
    [1.0, -1.0],
    [1.0, 0.0],
    [0.0, 0.0],
    [0.0, 1.0],
    [-1.0, 1.0],
];

pub fn make_ball(d: usize, center: Point, radius: f64) -> Result<Domain> {
    check_dim(d)?;
    check_positive("radius", radius)?;
    Ok(Domain {
        dim: d,
        center,
        shape: Shape::Ball { radius },
    })
}

/// Axis-aligned box centred at the origin.
pub fn make_box(d: usize, half_widths: &[f64]) -> Result<Domain> {
    check_dim(d)?;
    if half_widths.len() != d {
        return Err(Error::DimensionMismatch(d, half_widths.len()));
    }
    let mut hw = [0.0; 3];
    for (i, &w) in half_widths.iter().enumerate() {
        check_positive("half_width", w)?;
        hw[i] = w;
    }
    Ok(Domain {
        dim: d,
        center: Point::ZERO,
        shape: Shape::Box { half_widths: hw },
    })
}

/// Ellipse x²/a² + y²/b² < 1 in the plane.
pub fn make_ellipse(a: f64, b: f64) -> Result<Domain> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    Ok(Domain {
        dim: 2,
        center: Point::ZERO,
        shape: Shape::Ellipse { a, b },
    })
}

pub fn make_lshape() -> Domain {
    Domain {
        dim: 2,
        center: Point::ZERO,
        shape: Shape::LShape,
    }
}

pub fn make_half_space(d: usize) -> Result<Domain> {
    check_dim(d)?;
    Ok(Domain {
        dim: d,
        center: Point::ZERO,
        shape: Shape::HalfSpace,
    })
}

impl Domain {
    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn name(&self) -> &'static str {
        match self.shape {
            Shape::Ball { .. } => "ball",
            Shape::Box { .. } => "box",
            Shape::Ellipse { .. } => "ellipse",
            Shape::LShape => "lshape",
            Shape::HalfSpace => "half-space",
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        match self.shape {
            Shape::Ball { .. } | Shape::Ellipse { .. } | Shape::HalfSpace => Smoothness::C1,
            Shape::Box { .. } | Shape::LShape => {
                if self.dim == 1 {
                    Smoothness::C1
                } else {
                    Smoothness::PiecewiseC1
                }
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.shape, Shape::HalfSpace)
    }

    /// The same domain shifted by `v`.
    pub fn translated(&self, v: Point) -> Domain {
        Domain {
            center: self.center + v,
            ..self.clone()
        }
    }

    /// The same domain scaled by `k > 0` about its center.
    pub fn scaled(&self, k: f64) -> Result<Domain> {
        check_positive("scale", k)?;
        let shape = match &self.shape {
            Shape::Ball { radius } => Shape::Ball { radius: radius * k },
            Shape::Box { half_widths } => Shape::Box {
                half_widths: half_widths.map(|w| w * k),
            },
            Shape::Ellipse { a, b } => Shape::Ellipse { a: a * k, b: b * k },
            Shape::LShape | Shape::HalfSpace => return Err(Error::UnsupportedShape("scaling")),
        };
        Ok(Domain {
            shape,
            ..self.clone()
        })
    }

    pub fn inside(&self, x: &Point) -> bool {
        self.signed_distance(x) < 0.0
    }

    /// Lebesgue measure |Ω|.
    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius } => ball_volume(self.dim) * radius.powi(self.dim as i32),
            Shape::Box { half_widths } => half_widths[..self.dim].iter().map(|w| 2.0 * w).product(),
            Shape::Ellipse { a, b } => PI * a * b,
            Shape::LShape => 3.0,
            Shape::HalfSpace => f64::INFINITY,
        }
    }

    /// Surface measure ℋ^{d−1}(∂Ω).
    pub fn boundary_measure(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius } => sphere_area(self.dim) * radius.powi(self.dim as i32 - 1),
            Shape::Box { half_widths: w } => match self.dim {
                1 => 2.0,
                2 => 4.0 * (w[0] + w[1]),
                _ => 8.0 * (w[0] * w[1] + w[1] * w[2] + w[0] * w[2]),
            },
            Shape::Ellipse { a, b } => {
                crate::quadrature::integrate_adaptive(
                    |t: f64| ellipse_speed(*a, *b, t),
                    0.0,
                    2.0 * PI,
                    1e-13,
                    1e-13,
                    100_000,
                )
                .value
            }
            Shape::LShape => 8.0,
            Shape::HalfSpace => f64::INFINITY,
        }
    }

    /// max_{x ∈ Ω̄} |x − center|.
    pub fn extent(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius } => *radius,
            Shape::Box { half_widths } => half_widths.iter().map(|w| w * w).sum::<f64>().sqrt(),
            Shape::Ellipse { a, b } => a.max(*b),
            Shape::LShape => 2f64.sqrt(),
            Shape::HalfSpace => f64::INFINITY,
        }
    }

    /// Axis-aligned box `[lo, hi]` around Ω̄ enlarged by `margin`.
    pub fn bounding_box(&self, margin: f64) -> (Point, Point) {
        let c = self.center;
        let half: [f64; 3] = match &self.shape {
            Shape::Ball { radius } => [*radius; 3],
            Shape::Box { half_widths } => *half_widths,
            Shape::Ellipse { a, b } => [*a, *b, 0.0],
            Shape::LShape => [1.0, 1.0, 0.0],
            Shape::HalfSpace => [f64::INFINITY; 3],
        };
        let mut lo = Point::ZERO;
        let mut hi = Point::ZERO;
        for i in 0..self.dim {
            lo[i] = c[i] - half[i] - margin;
            hi[i] = c[i] + half[i] + margin;
        }
        (lo, hi)
    }

    /// Bounding box that strictly contains {x : sd(x) ≤ 1}.
    pub fn default_bounding_box(&self) -> (Point, Point) {
        self.bounding_box(1.0 + 1e-6)
    }

    /// Edges of a planar polygonal domain, counter-clockwise.
    pub fn edges(&self) -> Option<Vec<Edge>> {
        let verts: Vec<Point> = match &self.shape {
            Shape::Box { half_widths: w } if self.dim == 2 => vec![
                Point::new2(-w[0], -w[1]),
                Point::new2(w[0], -w[1]),
                Point::new2(w[0], w[1]),
                Point::new2(-w[0], w[1]),
            ],
            Shape::LShape => LSHAPE_VERTICES
                .iter()
                .map(|v| Point::new2(v[0], v[1]))
                .collect(),
            _ => return None,
        };
        let n = verts.len();
        Some(
            (0..n)
                .map(|i| Edge {
                    a: verts[i] + self.center,
                    b: verts[(i + 1) % n] + self.center,
                })
                .collect(),
        )
    }

    /// Signed distance: negative inside, positive outside, zero on ∂Ω.
    pub fn signed_distance(&self, x: &Point) -> f64 {
        let p = *x - self.center;
        match &self.shape {
            Shape::Ball { radius } => p.norm() - radius,
            Shape::Box { half_widths } => box_sd(&p, half_widths, self.dim),
            Shape::Ellipse { .. } => self.nearest_boundary_point(x).t,
            Shape::LShape => {
                let dist = self.polygon_nearest(x).1;
                if lshape_inside(&p) {
                    -dist
                } else {
                    dist
                }
            }
            Shape::HalfSpace => p[self.dim - 1],
        }
    }

    /// The point of ∂Ω closest to `x`, ties going to the lexicographically
    /// smallest candidate.
    pub fn nearest_boundary_point(&self, x: &Point) -> Nearest {
        let c = self.center;
        let p = *x - c;
        let d = self.dim;
        match &self.shape {
            Shape::Ball { radius } => {
                let r = p.norm();
                let dir = if r == 0.0 { -Point::unit(0) } else { p / r };
                Nearest {
                    point: c + dir * *radius,
                    t: r - radius,
                    at_corner: false,
                }
            }
            Shape::Box { half_widths } => {
                let sd = box_sd(&p, half_widths, d);
                let (z, corner) = if sd > 0.0 {
                    let mut z = p;
                    for i in 0..d {
                        z[i] = z[i].clamp(-half_widths[i], half_widths[i]);
                    }
                    (z, box_corner(&z, half_widths, d))
                } else {
                    // project onto the closest face; ties by lexicographic order
                    let mut best: Option<Point> = None;
                    for i in 0..d {
                        for side in [-1.0, 1.0] {
                            let gap = half_widths[i] - side * p[i];
                            if (gap - (-sd)).abs() <= 1e-14 * (1.0 + half_widths[i]) {
                                let mut z = p;
                                z[i] = side * half_widths[i];
                                if best.is_none_or(|b| z.lex_cmp(&b).is_lt()) {
                                    best = Some(z);
                                }
                            }
                        }
                    }
                    let z = best.expect("some face attains the distance");
                    (z, box_corner(&z, half_widths, d))
                };
                Nearest {
                    point: z + c,
                    t: sd,
                    at_corner: corner,
                }
            }
            Shape::Ellipse { a, b } => {
                let (z, dist) = ellipse_nearest(*a, *b, &p);
                let inside = (p[0] / a).powi(2) + (p[1] / b).powi(2) < 1.0;
                Nearest {
                    point: z + c,
                    t: if inside { -dist } else { dist },
                    at_corner: false,
                }
            }
            Shape::LShape => {
                let (z, dist, corner) = self.polygon_nearest(x);
                Nearest {
                    point: z,
                    t: if lshape_inside(&p) { -dist } else { dist },
                    at_corner: corner,
                }
            }
            Shape::HalfSpace => {
                let mut z = *x;
                z[d - 1] = c[d - 1];
                Nearest {
                    point: z,
                    t: p[d - 1],
                    at_corner: false,
                }
            }
        }
    }

    fn polygon_nearest(&self, x: &Point) -> (Point, f64, bool) {
        let edges = self.edges().expect("polygonal domain");
        let mut best: Option<(Point, f64, bool)> = None;
        for e in &edges {
            let (z, s) = e.project(x);
            let dist = (*x - z).norm();
            let corner = s == 0.0 || s == 1.0;
            best = match best {
                None => Some((z, dist, corner)),
                Some(b) => {
                    if dist < b.1 - 1e-14 || (dist <= b.1 + 1e-14 && z.lex_cmp(&b.0).is_lt()) {
                        Some((z, dist, corner))
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let (z, dist, _) = best.expect("polygon has edges");
        let corner = edges.iter().any(|e| (z - e.a).norm() <= CORNER_TOL);
        (z, dist, corner)
    }

    /// Outward unit normal at (or projected onto) the boundary point `z`.
    pub fn normal_at(&self, z: &Point) -> Normal {
        let c = self.center;
        let p = *z - c;
        let d = self.dim;
        match &self.shape {
            Shape::Ball { .. } => Normal {
                n: if p.norm() == 0.0 {
                    -Point::unit(0)
                } else {
                    p.normalized()
                },
                at_corner: false,
            },
            Shape::Ellipse { a, b } => Normal {
                n: Point::new2(p[0] / (a * a), p[1] / (b * b)).normalized(),
                at_corner: false,
            },
            Shape::HalfSpace => Normal {
                n: Point::unit(d - 1),
                at_corner: false,
            },
            Shape::Box { half_widths } => {
                // faces in the order −e₀, +e₀, −e₁, +e₁, ...
                let mut hits = Vec::new();
                let mut best = (f64::INFINITY, 0usize);
                for i in 0..d {
                    for (k, side) in [-1.0, 1.0].into_iter().enumerate() {
                        let gap = (half_widths[i] - side * p[i]).abs();
                        if gap <= CORNER_TOL {
                            hits.push(2 * i + k);
                        }
                        if gap < best.0 {
                            best = (gap, 2 * i + k);
                        }
                    }
                }
                let face = hits.first().copied().unwrap_or(best.1);
                let mut n = Point::ZERO;
                n[face / 2] = if face % 2 == 0 { -1.0 } else { 1.0 };
                Normal {
                    n,
                    at_corner: hits.len() > 1,
                }
            }
            Shape::LShape => {
                let edges = self.edges().expect("polygon");
                let mut best = (f64::INFINITY, 0usize);
                let mut hits = Vec::new();
                for (i, e) in edges.iter().enumerate() {
                    let (q, _) = e.project(z);
                    let gap = (q - *z).norm();
                    if gap <= CORNER_TOL {
                        hits.push(i);
                    }
                    if gap < best.0 {
                        best = (gap, i);
                    }
                }
                let face = hits.first().copied().unwrap_or(best.1);
                Normal {
                    n: edges[face].normal(),
                    at_corner: hits.len() > 1,
                }
            }
        }
    }

    /// Parameter intervals `(t0, t1)` ⊂ [0, tmax] with `origin + t·dir ∈ Ω`,
    /// sorted and disjoint. `dir` must be a unit vector.
    pub fn ray_intervals(&self, origin: &Point, dir: &Point, tmax: f64) -> Vec<(f64, f64)> {
        let p = *origin - self.center;
        let d = self.dim;
        let raw: Vec<(f64, f64)> = match &self.shape {
            Shape::Ball { radius } => quadric_interval(&p, dir, &[1.0; 3], *radius, d)
                .into_iter()
                .collect(),
            Shape::Ellipse { a, b } => {
                quadric_interval(&p, dir, &[1.0 / (a * a), 1.0 / (b * b), 0.0], 1.0, 2)
                    .into_iter()
                    .collect()
            }
            Shape::Box { half_widths } => slab_interval(
                &p,
                dir,
                &[-half_widths[0], -half_widths[1], -half_widths[2]],
                half_widths,
                d,
            )
            .into_iter()
            .collect(),
            Shape::LShape => {
                let mut v: Vec<(f64, f64)> = [
                    slab_interval(&p, dir, &[-1.0, -1.0, 0.0], &[1.0, 0.0, 0.0], 2),
                    slab_interval(&p, dir, &[-1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 2),
                ]
                .into_iter()
                .flatten()
                .collect();
                v.sort_by(|a, b| a.0.total_cmp(&b.0));
                merge_intervals(v)
            }
            Shape::HalfSpace => {
                let z = p[d - 1];
                let u = dir[d - 1];
                if u == 0.0 {
                    if z < 0.0 {
                        vec![(0.0, f64::INFINITY)]
                    } else {
                        vec![]
                    }
                } else {
                    let t = -z / u;
                    if u > 0.0 {
                        vec![(f64::NEG_INFINITY, t)]
                    } else {
                        vec![(t, f64::INFINITY)]
                    }
                }
            }
        };
        raw.into_iter()
            .filter_map(|(a, b)| {
                let a = a.max(0.0);
                let b = b.min(tmax);
                (b > a).then_some((a, b))
            })
            .collect()
    }
}

fn box_sd(p: &Point, hw: &[f64; 3], d: usize) -> f64 {
    let mut outside = 0.0;
    let mut inside = f64::NEG_INFINITY;
    for i in 0..d {
        let q = p[i].abs() - hw[i];
        outside += q.max(0.0).powi(2);
        inside = inside.max(q);
    }
    if inside > 0.0 {
        outside.sqrt()
    } else {
        inside
    }
}

fn box_corner(z: &Point, hw: &[f64; 3], d: usize) -> bool {
    (0..d)
        .filter(|&i| (z[i].abs() - hw[i]).abs() <= CORNER_TOL)
        .count()
        > 1
}

fn lshape_inside(p: &Point) -> bool {
    p[0] > -1.0 && p[0] < 1.0 && p[1] > -1.0 && p[1] < 1.0 && !(p[0] >= 0.0 && p[1] >= 0.0)
}

pub(crate) fn ellipse_speed(a: f64, b: f64, t: f64) -> f64 {
    (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt()
}

/// Nearest point on the ellipse by Newton iteration on the parametric angle,
/// falling back to a dense grid search.
fn ellipse_nearest(a: f64, b: f64, p: &Point) -> (Point, f64) {
    let at = |t: f64| Point::new2(a * t.cos(), b * t.sin());
    let dist2 = |t: f64| (*p - at(t)).norm_sq();
    // coarse start
    let coarse = 64;
    let mut t = 0.0;
    let mut best = f64::INFINITY;
    for k in 0..coarse {
        let tk = 2.0 * PI * k as f64 / coarse as f64;
        let v = dist2(tk);
        if v < best {
            best = v;
            t = tk;
        }
    }
    let mut converged = false;
    for _ in 0..64 {
        let (s, c) = t.sin_cos();
        // g(t) = ½ d/dt |p − z(t)|²
        let g = a * s * p[0] - b * c * p[1] - (a * a - b * b) * s * c;
        let gp = a * c * p[0] + b * s * p[1] - (a * a - b * b) * (c * c - s * s);
        if gp <= 0.0 {
            break;
        }
        let step = g / gp;
        t -= step.clamp(-0.5, 0.5);
        if step.abs() < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged || dist2(t) > best {
        // deterministic fallback: dense grid then golden-section polish
        let n = 20_000;
        let mut tb = 0.0;
        let mut vb = f64::INFINITY;
        for k in 0..n {
            let tk = 2.0 * PI * k as f64 / n as f64;
            let v = dist2(tk);
            if v < vb {
                vb = v;
                tb = tk;
            }
        }
        let h = 2.0 * PI / n as f64;
        let (mut lo, mut hi) = (tb - h, tb + h);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if dist2(m1) < dist2(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        t = 0.5 * (lo + hi);
    }
    let z = at(t);
    (z, (*p - z).norm())
}

/// Interval where Σ wᵢ (pᵢ + t uᵢ)² < r² (weights on the first `d` axes).
fn quadric_interval(p: &Point, u: &Point, w: &[f64; 3], r: f64, d: usize) -> Option<(f64, f64)> {
    let (mut a, mut b, mut c) = (0.0, 0.0, -r * r);
    for i in 0..d {
        a += w[i] * u[i] * u[i];
        b += 2.0 * w[i] * p[i] * u[i];
        c += w[i] * p[i] * p[i];
    }
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 || a == 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // numerically stable roots
    let q = -0.5 * (b + b.signum() * sq);
    let (mut t0, mut t1) = if q == 0.0 {
        (-sq / (2.0 * a), sq / (2.0 * a))
    } else {
        (q / a, c / q)
    };
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    Some((t0, t1))
}

/// Interval where lo < p + t u < hi componentwise on the first `d` axes.
fn slab_interval(
    p: &Point,
    u: &Point,
    lo: &[f64; 3],
    hi: &[f64; 3],
    d: usize,
) -> Option<(f64, f64)> {
    let mut t0 = f64::NEG_INFINITY;
    let mut t1 = f64::INFINITY;
    for i in 0..d {
        if u[i] == 0.0 {
            if p[i] <= lo[i] || p[i] >= hi[i] {
                return None;
            }
        } else {
            let a = (lo[i] - p[i]) / u[i];
            let b = (hi[i] - p[i]) / u[i];
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
    }
    (t1 > t0).then_some((t0, t1))
}

fn merge_intervals(sorted: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in sorted {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn shapes() -> Vec<Domain> {
        vec![
            make_ball(2, Point::ZERO, 1.0).unwrap(),
            make_ball(3, Point::new3(0.1, 0.2, -0.3), 0.7).unwrap(),
            make_box(2, &[1.0, 0.5]).unwrap(),
            make_box(3, &[1.0, 0.5, 0.75]).unwrap(),
            make_ellipse(1.5, 0.6).unwrap(),
            make_lshape(),
        ]
    }

    #[test]
    fn documented_values() {
        let disk = make_ball(2, Point::ZERO, 1.0).unwrap();
        assert_eq!(disk.signed_distance(&Point::new2(2.0, 0.0)), 1.0);
        let n = disk.nearest_boundary_point(&Point::new2(0.5, 0.0));
        assert_eq!(n.point, Point::new2(1.0, 0.0));
        assert_eq!(n.t, -0.5);
        let l = make_lshape();
        assert!(!l.inside(&Point::new2(0.5, 0.5)));
        assert!(l.inside(&Point::new2(-0.5, 0.5)));
        let bx = make_box(2, &[1.0, 1.0]).unwrap();
        assert_eq!(bx.signed_distance(&Point::ZERO), -1.0);
        let n = bx.nearest_boundary_point(&Point::new2(2.0, 0.0));
        assert_eq!((n.point, n.t), (Point::new2(1.0, 0.0), 1.0));
    }

    #[test]
    fn lshape_reentrant_corner_matches_grid_search() {
        let l = make_lshape();
        let edges = l.edges().unwrap();
        let brute = |x: Point| {
            let mut best = (f64::INFINITY, Point::ZERO);
            for e in &edges {
                for k in 0..=20_000 {
                    let z = e.a + (e.b - e.a) * (k as f64 / 20_000.0);
                    let dz = (x - z).norm();
                    if dz < best.0 - 1e-13 || (dz <= best.0 + 1e-13 && z.lex_cmp(&best.1).is_lt()) {
                        best = (dz, z);
                    }
                }
            }
            best
        };
        for delta in [0.01, 0.1, 0.3] {
            // diagonal point inside the L: the re-entrant corner is nearest
            let x = Point::new2(-delta, -delta);
            let n = l.nearest_boundary_point(&x);
            let (dist, z) = brute(x);
            assert!((n.point - z).norm() < 1e-12 && n.point.norm() < 1e-15);
            assert!((n.t + 2f64.sqrt() * delta).abs() < 1e-14 && (dist - n.t.abs()).abs() < 1e-12);
            assert!(n.at_corner);
            // diagonal point in the notch: two edges tie, lexicographic winner
            let x = Point::new2(delta, delta);
            let n = l.nearest_boundary_point(&x);
            let (_, z) = brute(x);
            assert!((n.point - z).norm() < 1e-12);
            assert_eq!(n.point, Point::new2(0.0, delta));
            assert!((n.t - delta).abs() < 1e-15);
        }
    }

    #[test]
    fn sign_and_lipschitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dom in shapes() {
            let d = dom.dimension();
            let (lo, hi) = dom.bounding_box(0.5);
            let sample = |rng: &mut ChaCha8Rng| {
                let mut x = Point::ZERO;
                for i in 0..d {
                    x[i] = rng.gen_range(lo[i]..hi[i]);
                }
                x
            };
            for _ in 0..2000 {
                let x = sample(&mut rng);
                let y = sample(&mut rng);
                let (sx, sy) = (dom.signed_distance(&x), dom.signed_distance(&y));
                assert_eq!(dom.inside(&x), sx < 0.0);
                assert!((sx - sy).abs() <= (x - y).norm() + 1e-9, "{}", dom.name());
                let n = dom.nearest_boundary_point(&x);
                assert!(
                    ((x - n.point).norm() - sx.abs()).abs() < 1e-9,
                    "{}",
                    dom.name()
                );
                assert!(dom.signed_distance(&n.point).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn exterior_offset_is_normal_for_smooth_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dom in [
            make_ball(2, Point::ZERO, 1.0).unwrap(),
            make_ellipse(1.5, 0.6).unwrap(),
        ] {
            for _ in 0..500 {
                let x = Point::new2(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let n = dom.nearest_boundary_point(&x);
                if n.t <= 1e-3 {
                    continue;
                }
                let dir = (x - n.point).normalized();
                assert!((dir - dom.normal_at(&n.point).n).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn normals_match_distance_gradient() {
        for dom in shapes() {
            let q = boundary_quadrature(&dom, 40).unwrap();
            let d = dom.dimension();
            for node in q.nodes.iter().step_by(7) {
                if dom.normal_at(&node.point).at_corner {
                    continue;
                }
                let h = 1e-7;
                let mut g = Point::ZERO;
                for i in 0..d {
                    let e = Point::unit(i) * h;
                    g[i] = (dom.signed_distance(&(node.point + e))
                        - dom.signed_distance(&(node.point - e)))
                        / (2.0 * h);
                }
                assert!(
                    (g.normalized() - node.normal).norm() < 1e-6,
                    "{}",
                    dom.name()
                );
            }
        }
    }

    #[test]
    fn corner_normals_are_flagged() {
        let bx = make_box(2, &[1.0, 1.0]).unwrap();
        let n = bx.normal_at(&Point::new2(1.0, 1.0));
        assert!(n.at_corner);
        assert_eq!(n.n, Point::new2(1.0, 0.0));
        let l = make_lshape();
        assert!(l.normal_at(&Point::ZERO).at_corner);
        assert!(!l.normal_at(&Point::new2(0.5, 0.0)).at_corner);
    }

    #[test]
    fn rays_agree_with_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dom in shapes() {
            let d = dom.dimension();
            for _ in 0..200 {
                let mut o = Point::ZERO;
                let mut u = Point::ZERO;
                for i in 0..d {
                    o[i] = rng.gen_range(-2.0..2.0);
                    u[i] = rng.gen_range(-1.0..1.0);
                }
                let u = u.normalized();
                let iv = dom.ray_intervals(&o, &u, 5.0);
                for k in 0..200 {
                    let t = 5.0 * (k as f64 + 0.5) / 200.0;
                    let ins = iv.iter().any(|(a, b)| t > *a && t < *b);
                    let sd = dom.signed_distance(&(o + u * t));
                    if sd.abs() > 1e-9 {
                        assert_eq!(ins, sd < 0.0, "{} t={t}", dom.name());
                    }
                }
            }
        }
    }

    #[test]
    fn bounding_box_contains_unit_offset() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dom in shapes() {
            let d = dom.dimension();
            let (lo, hi) = dom.default_bounding_box();
            let (blo, bhi) = dom.bounding_box(2.0);
            for _ in 0..5000 {
                let mut x = Point::ZERO;
                for i in 0..d {
                    x[i] = rng.gen_range(blo[i]..bhi[i]);
                }
                if dom.signed_distance(&x) <= 1.0 {
                    assert!((0..d).all(|i| x[i] > lo[i] && x[i] < hi[i]));
                }
            }
        }
    }

    #[test]
    fn measures() {
        let e = make_ellipse(1.0, 1.0).unwrap();
        assert!((e.boundary_measure() - 2.0 * PI).abs() < 1e-12);
        assert_eq!(make_lshape().volume(), 3.0);
        assert_eq!(make_box(2, &[1.0, 1.0]).unwrap().boundary_measure(), 8.0);
    }
}
