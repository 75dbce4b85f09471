//! Planar vectors, 2x2 matrices and the bracket.

use crate::scalar::{approx_eq, Scalar};
use std::ops::{Add, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Vec2<S> {
    pub fn new(x: S, y: S) -> Self {
        Vec2 { x, y }
    }

    pub fn zero() -> Self {
        Vec2::new(S::zero(), S::zero())
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        Vec2::new(S::from_i64(x), S::from_i64(y))
    }

    pub fn scale(&self, k: &S) -> Self {
        Vec2::new(self.x.clone() * k.clone(), self.y.clone() * k.clone())
    }

    pub fn div(&self, k: &S) -> Self {
        Vec2::new(self.x.clone() / k.clone(), self.y.clone() / k.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Sup norm as a float, used for tolerance scaling.
    pub fn norm_f64(&self) -> f64 {
        self.x.to_f64().abs().max(self.y.to_f64().abs())
    }

    pub fn to_f64(&self) -> Vec2<f64> {
        Vec2::new(self.x.to_f64(), self.y.to_f64())
    }

    /// Quarter turn counterclockwise.
    pub fn rotate90(&self) -> Self {
        Vec2::new(-self.y.clone(), self.x.clone())
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        approx_eq(&self.x, &o.x, tol) && approx_eq(&self.y, &o.y, tol)
    }
}

impl<S: Scalar> Add for Vec2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Scalar> Sub for Vec2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl<S: Scalar> Neg for Vec2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec2::new(-self.x, -self.y)
    }
}

/// The determinant `[a,b] = a.x*b.y - b.x*a.y`.
pub fn bracket<S: Scalar>(a: &Vec2<S>, b: &Vec2<S>) -> S {
    a.x.clone() * b.y.clone() - b.x.clone() * a.y.clone()
}

/// Row-major 2x2 matrix `[[a,b],[c,d]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat2<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl<S: Scalar> Mat2<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(S::one(), S::zero(), S::zero(), S::one())
    }

    pub fn scalar(k: S) -> Self {
        Mat2::new(k.clone(), S::zero(), S::zero(), k)
    }

    /// Matrix whose columns are `u` and `v`.
    pub fn from_columns(u: &Vec2<S>, v: &Vec2<S>) -> Self {
        Mat2::new(u.x.clone(), v.x.clone(), u.y.clone(), v.y.clone())
    }

    pub fn det(&self) -> S {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn trace(&self) -> S {
        self.a.clone() + self.d.clone()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        Mat2::new(
            a.clone() * o.a.clone() + b.clone() * o.c.clone(),
            a.clone() * o.b.clone() + b.clone() * o.d.clone(),
            c.clone() * o.a.clone() + d.clone() * o.c.clone(),
            c.clone() * o.b.clone() + d.clone() * o.d.clone(),
        )
    }

    pub fn apply(&self, v: &Vec2<S>) -> Vec2<S> {
        Vec2::new(
            self.a.clone() * v.x.clone() + self.b.clone() * v.y.clone(),
            self.c.clone() * v.x.clone() + self.d.clone() * v.y.clone(),
        )
    }

    pub fn adjugate(&self) -> Self {
        Mat2::new(self.d.clone(), -self.b.clone(), -self.c.clone(), self.a.clone())
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let adj = self.adjugate();
        Some(Mat2::new(adj.a / det.clone(), adj.b / det.clone(), adj.c / det.clone(), adj.d / det))
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a.clone(), self.c.clone(), self.b.clone(), self.d.clone())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Mat2::identity(), |acc, _| acc.mul(self))
    }

    pub fn max_abs_f64(&self) -> f64 {
        [&self.a, &self.b, &self.c, &self.d].iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Entry-wise comparison: exact for rationals, absolute `tol` for floats.
    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        if S::EXACT {
            return self == o;
        }
        [(&self.a, &o.a), (&self.b, &o.b), (&self.c, &o.c), (&self.d, &o.d)]
            .iter()
            .all(|(x, y)| (x.to_f64() - y.to_f64()).abs() <= tol)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Mat2::identity(), tol)
    }

    /// True if the matrix is a multiple of the identity, relative to its diagonal scale.
    pub fn is_scalar_multiple(&self, tol: f64) -> bool {
        if S::EXACT {
            return self.b.is_zero() && self.c.is_zero() && self.a == self.d;
        }
        let scale = self.a.to_f64().abs().max(self.d.to_f64().abs());
        let off = self.b.to_f64().abs().max(self.c.to_f64().abs());
        let diff = (self.a.to_f64() - self.d.to_f64()).abs();
        scale > 0.0 && off <= tol * scale && diff <= tol * scale
    }

    pub fn to_f64(&self) -> Mat2<f64> {
        Mat2::new(self.a.to_f64(), self.b.to_f64(), self.c.to_f64(), self.d.to_f64())
    }
}
