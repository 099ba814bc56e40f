//! Decomposition of a polygonal boundary into C¹ faces plus a corner set,
//! with shrunken faces and their exterior normal neighbourhoods.

use super::charts::collar_charts;
use super::{Domain, Edge, Smoothness};
use crate::error::{Error, Result};
use crate::point::Point;

/// An open boundary face with the portion kept after shrinking by δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub edge: Edge,
    /// Arc-length trimmed at the start / end of the edge.
    pub trim_start: f64,
    pub trim_end: f64,
}

impl Face {
    /// Arc-length coordinate and signed normal height of `x` relative to the face.
    fn local(&self, x: &Point) -> (f64, f64) {
        let rel = *x - self.edge.a;
        (rel.dot(&self.edge.tangent()), rel.dot(&self.edge.normal()))
    }

    /// Length of the shrunken face G_{i,δ}.
    pub fn kept_length(&self) -> f64 {
        (self.edge.length() - self.trim_start - self.trim_end).max(0.0)
    }

    /// z ∈ G_{i,δ}.
    pub fn contains(&self, z: &Point) -> bool {
        let (s, t) = self.local(z);
        t.abs() <= 1e-12 && s > self.trim_start && s < self.edge.length() - self.trim_end
    }

    /// x ∈ G^ε_{i,δ} = {z + t n : z ∈ G_{i,δ}, 0 < t < ε}.
    pub fn in_neighbourhood(&self, x: &Point, eps: f64) -> bool {
        let (s, t) = self.local(x);
        t > 0.0 && t < eps && s > self.trim_start && s < self.edge.length() - self.trim_end
    }
}

/// ∂Ω = G₁ ∪ … ∪ G_N ∪ B for a planar polygonal domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseDecomposition {
    pub domain: Domain,
    pub delta: f64,
    pub faces: Vec<Face>,
    pub corners: Vec<Point>,
    /// Corners with interior angle above π, where adjacent faces are trimmed.
    pub reentrant: Vec<bool>,
}

impl PiecewiseDecomposition {
    /// Exterior collar measure |Ωᶜ_ε| in closed form.
    pub fn collar_measure(&self, eps: f64) -> f64 {
        collar_charts(&self.domain, eps)
            .expect("polygon collar")
            .iter()
            .map(|c| c.measure())
            .sum()
    }

    /// |B(δ, ε)| = |Ωᶜ_ε ∖ ∪ G^ε_{i,δ}|, valid while the neighbourhoods are
    /// disjoint subsets of the collar (ε below δ/2 at re-entrant corners).
    pub fn leftover_measure(&self, eps: f64) -> f64 {
        let faces: f64 = self.faces.iter().map(|f| f.kept_length() * eps).sum();
        self.collar_measure(eps) - faces
    }

    /// Index of the face neighbourhood containing `x`, if any.
    pub fn face_of(&self, x: &Point, eps: f64) -> Option<usize> {
        self.faces.iter().position(|f| f.in_neighbourhood(x, eps))
    }

    /// The same decomposition with a different trimming length.
    pub fn with_delta(&self, delta: f64) -> Result<PiecewiseDecomposition> {
        decompose_piecewise(&self.domain, delta)
    }
}

/// Splits ∂Ω into its edges. Faces next to re-entrant corners are trimmed
/// by δ at that corner; faces between convex corners are kept whole.
pub fn decompose_piecewise(domain: &Domain, delta: f64) -> Result<PiecewiseDecomposition> {
    if domain.smoothness() != Smoothness::PiecewiseC1 {
        return Err(Error::UnsupportedShape("decomposition of a C1 domain"));
    }
    let edges = domain.edges().ok_or(Error::UnsupportedShape(
        "piecewise decomposition outside the plane",
    ))?;
    let shortest = edges
        .iter()
        .map(|e| e.length())
        .fold(f64::INFINITY, f64::min);
    if !(delta > 0.0 && delta < shortest / 4.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "must lie in (0, shortest edge / 4)",
        });
    }
    let n = edges.len();
    let reentrant: Vec<bool> = (0..n)
        .map(|i| {
            let t0 = edges[(i + n - 1) % n].tangent();
            let t1 = edges[i].tangent();
            t0[0] * t1[1] - t0[1] * t1[0] < 0.0
        })
        .collect();
    let faces = (0..n)
        .map(|i| Face {
            edge: edges[i],
            trim_start: if reentrant[i] { delta } else { 0.0 },
            trim_end: if reentrant[(i + 1) % n] { delta } else { 0.0 },
        })
        .collect();
    Ok(PiecewiseDecomposition {
        domain: domain.clone(),
        delta,
        faces,
        corners: edges.iter().map(|e| e.a).collect(),
        reentrant,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{make_ball, make_box, make_lshape};
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn box_faces_are_untrimmed() {
        let dec = decompose_piecewise(&make_box(2, &[1.0, 1.0]).unwrap(), 0.1).unwrap();
        assert_eq!(dec.faces.len(), 4);
        assert_eq!(dec.corners.len(), 4);
        assert!(dec
            .faces
            .iter()
            .all(|f| f.trim_start == 0.0 && f.trim_end == 0.0));
        assert!((dec.leftover_measure(0.1) - PI * 0.01).abs() < 1e-12);
    }

    #[test]
    fn lshape_trims_reentrant_faces() {
        let dec = decompose_piecewise(&make_lshape(), 0.1).unwrap();
        assert_eq!(dec.faces.len(), 6);
        let trimmed = dec
            .faces
            .iter()
            .filter(|f| f.trim_start > 0.0 || f.trim_end > 0.0)
            .count();
        assert_eq!(trimmed, 2);
        // G_{δ} on the face {0} × (0, 1) is {(0, x) : δ < x < 1}
        let f = dec.faces.iter().find(|f| f.edge.a == Point::ZERO).unwrap();
        assert!(f.contains(&Point::new2(0.0, 0.15)));
        assert!(!f.contains(&Point::new2(0.0, 0.05)));
    }

    #[test]
    fn shrunken_faces_are_nested() {
        let big = decompose_piecewise(&make_lshape(), 0.2).unwrap();
        let small = big.with_delta(0.05).unwrap();
        for (fb, fs) in big.faces.iter().zip(&small.faces) {
            for k in 1..200 {
                let z = fb.edge.a + (fb.edge.b - fb.edge.a) * (k as f64 / 200.0);
                if fb.contains(&z) {
                    assert!(fs.contains(&z));
                }
            }
        }
    }

    #[test]
    fn neighbourhoods_disjoint_below_half_delta() {
        let delta = 0.1;
        let dec = decompose_piecewise(&make_lshape(), delta).unwrap();
        let eps = 0.049;
        for i in 0..400 {
            for j in 0..400 {
                let x = Point::new2(
                    -1.1 + 2.2 * (i as f64 + 0.5) / 400.0,
                    -1.1 + 2.2 * (j as f64 + 0.5) / 400.0,
                );
                let hits = dec
                    .faces
                    .iter()
                    .filter(|f| f.in_neighbourhood(&x, eps))
                    .count();
                assert!(hits <= 1);
            }
        }
    }

    #[test]
    fn leftover_measure_matches_grid_count() {
        let delta = 0.1;
        let dec = decompose_piecewise(&make_lshape(), delta).unwrap();
        let mut ratios = Vec::new();
        for eps in [0.05, 0.01] {
            let m = 4000;
            let h = (2.0 + 2.0 * eps) / m as f64;
            let mut count = 0usize;
            for i in 0..m {
                for j in 0..m {
                    let x = Point::new2(
                        -1.0 - eps + (i as f64 + 0.5) * h,
                        -1.0 - eps + (j as f64 + 0.5) * h,
                    );
                    let sd = dec.domain.signed_distance(&x);
                    if sd > 0.0 && sd < eps && dec.face_of(&x, eps).is_none() {
                        count += 1;
                    }
                }
            }
            let grid = count as f64 * h * h;
            let closed = dec.leftover_measure(eps);
            assert!((grid - closed).abs() < 0.02 * closed, "{grid} {closed}");
            ratios.push(closed / eps);
        }
        assert!(ratios[1] < ratios[0]);
        assert!(ratios[1] < 2.0 * delta + 0.05);
    }

    #[test]
    fn smooth_domain_rejected() {
        assert!(decompose_piecewise(&make_ball(2, Point::ZERO, 1.0).unwrap(), 0.1).is_err());
    }
}
