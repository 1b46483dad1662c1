//! Plane points, closed intervals and axis-aligned rectangles.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance_squared(self, other: Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(self, other: Self) -> T {
        self.distance_squared(other).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Real> Add for Point<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> Sub for Point<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Mul<T> for Point<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<T: Real> Neg for Point<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    /// Builds `[lo, hi]`, swapping the endpoints if they arrive reversed.
    pub fn new(lo: T, hi: T) -> Self {
        if lo <= hi {
            Self { lo, hi }
        } else {
            Self { lo: hi, hi: lo }
        }
    }

    pub fn unit() -> Self {
        Self::new(T::zero(), T::one())
    }

    pub fn point(x: T) -> Self {
        Self::new(x, x)
    }

    pub fn length(&self) -> T {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> T {
        (self.lo + self.hi) / T::lit(2.0)
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_with_tol(&self, x: T, tol: T) -> bool {
        self.lo - tol <= x && x <= self.hi + tol
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Closed intervals intersect when they share at least one point.
    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Axis-aligned rectangle `x_interval × y_interval`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle<T> {
    pub x_interval: Interval<T>,
    pub y_interval: Interval<T>,
}

impl<T: Real> Rectangle<T> {
    pub fn new(x_interval: Interval<T>, y_interval: Interval<T>) -> Self {
        Self {
            x_interval,
            y_interval,
        }
    }

    pub fn width(&self) -> T {
        self.x_interval.length()
    }

    pub fn height(&self) -> T {
        self.y_interval.length()
    }

    pub fn corners(&self) -> [Point<T>; 4] {
        let (x0, x1) = (self.x_interval.lo, self.x_interval.hi);
        let (y0, y1) = (self.y_interval.lo, self.y_interval.hi);
        [
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ]
    }

    /// Smallest axis-aligned rectangle containing the given points.
    pub fn bounding(points: &[Point<T>]) -> Option<Self> {
        let first = points.first()?;
        let (mut x0, mut x1, mut y0, mut y1) = (first.x, first.x, first.y, first.y);
        for p in &points[1..] {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        Some(Self::new(Interval::new(x0, x1), Interval::new(y0, y1)))
    }
}

/// Projection onto the first coordinate.
pub fn project_x<T: Real>(r: &Rectangle<T>) -> Interval<T> {
    r.x_interval
}
