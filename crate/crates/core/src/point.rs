//! Points and vectors in up to three dimensions.
//!
//! Coordinates beyond the active dimension are kept at zero, so every
//! operation can run over all three components.

use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// A point (or displacement) in ℝᵈ, d ≤ 3.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub const ZERO: Point = Point([0.0; 3]);

    pub fn new1(x: f64) -> Self {
        Point([x, 0.0, 0.0])
    }

    pub fn new2(x: f64, y: f64) -> Self {
        Point([x, y, 0.0])
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Point([x, y, z])
    }

    /// Builds a point from a slice of at most three coordinates.
    pub fn from_slice(c: &[f64]) -> Self {
        let mut p = [0.0; 3];
        for (dst, src) in p.iter_mut().zip(c) {
            *dst = *src;
        }
        Point(p)
    }

    /// Unit vector along axis `i`.
    pub fn unit(i: usize) -> Self {
        let mut p = [0.0; 3];
        p[i] = 1.0;
        Point(p)
    }

    pub fn dot(&self, o: &Point) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Point {
        let n = self.norm();
        if n == 0.0 {
            *self
        } else {
            *self / n
        }
    }

    /// Lexicographic total order on coordinates (NaN-free inputs assumed).
    pub fn lex_cmp(&self, o: &Point) -> Ordering {
        for i in 0..3 {
            match self.0[i].total_cmp(&o.0[i]) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    pub fn distance(&self, o: &Point) -> f64 {
        (*self - *o).norm()
    }

    /// Two unit vectors completing the unit vector `self` to an orthonormal
    /// frame of ℝ³ (in the plane the first one is the rotation by +π/2).
    pub fn tangent_frame(&self) -> (Point, Point) {
        let nu = *self;
        let e = if nu[0].abs() < 0.9 {
            Point::unit(0)
        } else {
            Point::unit(1)
        };
        let t1 = (e - nu * nu.dot(&e)).normalized();
        let t2 = Point::new3(
            nu[1] * t1[2] - nu[2] * t1[1],
            nu[2] * t1[0] - nu[0] * t1[2],
            nu[0] * t1[1] - nu[1] * t1[0],
        );
        (t1, t2)
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Point {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        *self = *self + o;
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl SubAssign for Point {
    fn sub_assign(&mut self, o: Point) {
        *self = *self - o;
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        p * self
    }
}

impl Div<f64> for Point {
    type Output = Point;
    fn div(self, k: f64) -> Point {
        Point([self.0[0] / k, self.0[1] / k, self.0[2] / k])
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point([-self.0[0], -self.0[1], -self.0[2]])
    }
}
