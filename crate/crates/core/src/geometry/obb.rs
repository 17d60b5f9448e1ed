use std::f64::consts::FRAC_PI_2;

use super::gaussian::{Gaussian2D, Sym2};
use super::polygon::Polygon;
use super::Point;
use crate::error::GeometryError;

pub const HALF_PI: f64 = FRAC_PI_2;

/// Reduces `theta` into `[0, π/2)`.
///
/// Returns the reduced angle and whether an odd number of quarter turns was
/// removed, in which case the width and height of a box must be exchanged to
/// describe the same rectangle.
pub fn canonical_angle(theta: f64) -> (f64, bool) {
    let turns = (theta / HALF_PI).floor();
    let mut reduced = theta - turns * HALF_PI;
    let mut odd = (turns as i64).rem_euclid(2) == 1;
    if reduced >= HALF_PI {
        reduced -= HALF_PI;
        odd = !odd;
    }
    if reduced < 0.0 {
        reduced = 0.0;
    }
    (reduced, odd)
}

/// Oriented bounding box.
///
/// `w` is the extent along the direction rotated by `theta` from the x-axis and
/// `h` the perpendicular extent. `theta` is always in `[0, π/2)`; the
/// constructor folds any other angle into that range, exchanging `w` and `h`
/// when needed so the rectangle itself is unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obb {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
    pub theta: f64,
}

impl Obb {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64, theta: f64) -> Result<Self, GeometryError> {
        if ![cx, cy, w, h, theta].iter().all(|v| v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(GeometryError::NonPositiveSize { w, h });
        }
        let (theta, swap) = canonical_angle(theta);
        let (w, h) = if swap { (h, w) } else { (w, h) };
        Ok(Self { cx, cy, w, h, theta })
    }

    pub fn center(&self) -> Point {
        Point::new(self.cx, self.cy)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn long_edge(&self) -> f64 {
        self.w.max(self.h)
    }

    pub fn short_edge(&self) -> f64 {
        self.w.min(self.h)
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Obb {
        Obb { cx: self.cx + dx, cy: self.cy + dy, ..*self }
    }

    /// Maps a point into the box frame: x along the width edge, y along the
    /// height edge, origin at the center.
    pub fn to_local(&self, p: Point) -> Point {
        (p - self.center()).rotate(-self.theta)
    }

    pub fn to_global(&self, p: Point) -> Point {
        p.rotate(self.theta) + self.center()
    }

    /// Four corners, counterclockwise, starting from the local (-w/2, -h/2).
    pub fn corners(&self) -> Polygon {
        let (hw, hh) = (self.w / 2.0, self.h / 2.0);
        let local = [
            Point::new(-hw, -hh),
            Point::new(hw, -hh),
            Point::new(hw, hh),
            Point::new(-hw, hh),
        ];
        Polygon::new_unchecked(local.iter().map(|&p| self.to_global(p)).collect())
    }

    /// Closed containment test. A slack of a few ulps of the box size keeps
    /// corners and edge midpoints computed in floating point inside.
    pub fn contains(&self, p: Point) -> bool {
        let q = self.to_local(p);
        let slack = 1e-9 * (1.0 + self.long_edge() + self.center().norm());
        q.x.abs() <= self.w / 2.0 + slack && q.y.abs() <= self.h / 2.0 + slack
    }

    /// Covariance-form Gaussian of the box.
    ///
    /// Without shrinking the base covariance is `diag(w², h²)/12`. With
    /// shrinking it is `min(w, h)/12 · diag(w, h)`, which keeps the short axis
    /// and pulls the long axis in to `sqrt(w·h)`.
    pub fn to_gaussian(&self, shrink: bool) -> Gaussian2D {
        let (a, b) = if shrink {
            let m = self.short_edge() / 12.0;
            (m * self.w, m * self.h)
        } else {
            (self.w * self.w / 12.0, self.h * self.h / 12.0)
        };
        Gaussian2D {
            mu: self.center(),
            sigma: Sym2::rotated_diag(a, b, self.theta),
        }
    }
}

/// Free-function form of [`Obb::to_gaussian`].
pub fn obb_to_gaussian(obb: &Obb, shrink: bool) -> Gaussian2D {
    obb.to_gaussian(shrink)
}
