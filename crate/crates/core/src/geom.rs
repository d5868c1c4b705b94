//! Small 2D vector and bounding-box types used throughout the crate.

use std::ops::{Add, Mul, Neg, Sub};

/// A 2D point / vector with `f64` coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub const fn zero() -> Self {
        Point { x: 0.0, y: 0.0 }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product; positive when `other` is
    /// counterclockwise from `self`.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Point) -> f64 {
        (self - other).norm_sq()
    }

    /// Unit vector in the same direction; `(1, 0)` for the zero vector.
    pub fn normalized(self) -> Point {
        let n = self.norm();
        if n == 0.0 {
            Point::new(1.0, 0.0)
        } else {
            Point::new(self.x / n, self.y / n)
        }
    }

    /// Rotate counterclockwise by `angle` radians.
    pub fn rotated(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Signed angle in (-pi, pi] that rotates `self` onto `other`.
    pub fn signed_angle_to(self, other: Point) -> f64 {
        self.cross(other).atan2(self.dot(other))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Clamp a vector to a maximum magnitude.
    pub fn limited(self, max: f64) -> Point {
        let n = self.norm();
        if n > max && n > 0.0 {
            self * (max / n)
        } else {
            self
        }
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    pub fn new(min: Point, max: Point) -> Self {
        Bounds { min, max }
    }

    /// Tight box over a nonempty point iterator; `None` when empty.
    pub fn from_points<I: IntoIterator<Item = Point>>(points: I) -> Option<Bounds> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = Bounds::new(first, first);
        for p in it {
            b.expand(p);
        }
        Some(b)
    }

    pub fn expand(&mut self, p: Point) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn union(self, other: Bounds) -> Bounds {
        let mut b = self;
        b.expand(other.min);
        b.expand(other.max);
        b
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new(
            0.5 * (self.min.x + self.max.x),
            0.5 * (self.min.y + self.max.y),
        )
    }

    /// Diagonal length; zero for a single point.
    pub fn diameter(&self) -> f64 {
        self.min.dist(self.max)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_angle_sign_convention() {
        let e1 = Point::new(1.0, 0.0);
        let e2 = Point::new(0.0, 1.0);
        assert!((e1.signed_angle_to(e2) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((e2.signed_angle_to(e1) + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn rotation_composes_with_signed_angle() {
        let a = Point::new(0.6, 0.8);
        let b = Point::new(-0.8, 0.6);
        let ang = a.signed_angle_to(b);
        let r = a.rotated(ang);
        assert!((r - b).norm() < 1e-12);
    }

    #[test]
    fn bounds_cover_points() {
        let b = Bounds::from_points([
            Point::new(1.0, 5.0),
            Point::new(-2.0, 0.0),
            Point::new(3.0, 2.0),
        ])
        .unwrap();
        assert_eq!(b.min, Point::new(-2.0, 0.0));
        assert_eq!(b.max, Point::new(3.0, 5.0));
    }
}
