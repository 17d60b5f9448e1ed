use std::f64::consts::PI;
use std::ops::{Add, Mul};

use super::Point;
use crate::error::GeometryError;

/// Symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Self { xx, xy, yy }
    }

    /// `R(θ) · diag(a, b) · R(θ)ᵀ`.
    pub fn rotated_diag(a: f64, b: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            xx: a * c * c + b * s * s,
            xy: (a - b) * c * s,
            yy: a * s * s + b * c * c,
        }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    /// Inverse through the adjugate, with the determinant floored at `floor`.
    pub fn inverse_floored(&self, floor: f64) -> Sym2 {
        let d = self.det().max(floor);
        Sym2::new(self.yy / d, -self.xy / d, self.xx / d)
    }

    pub fn inverse(&self) -> Sym2 {
        self.inverse_floored(f64::MIN_POSITIVE)
    }

    pub fn apply(&self, v: Point) -> Point {
        Point::new(self.xx * v.x + self.xy * v.y, self.xy * v.x + self.yy * v.y)
    }

    /// `vᵀ · M · v`.
    pub fn quad_form(&self, v: Point) -> f64 {
        v.x * (self.xx * v.x + self.xy * v.y) + v.y * (self.xy * v.x + self.yy * v.y)
    }

    /// Frobenius inner product `tr(M · N)` of two symmetric matrices.
    pub fn inner(&self, other: &Sym2) -> f64 {
        self.xx * other.xx + 2.0 * self.xy * other.xy + self.yy * other.yy
    }

    pub fn outer(v: Point) -> Sym2 {
        Sym2::new(v.x * v.x, v.x * v.y, v.y * v.y)
    }

    /// Eigenvalues, larger first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * self.trace();
        let r = (0.5 * (self.xx - self.yy)).hypot(self.xy);
        (mean + r, mean - r)
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    fn add(self, rhs: Sym2) -> Sym2 {
        Sym2::new(self.xx + rhs.xx, self.xy + rhs.xy, self.yy + rhs.yy)
    }
}

impl Mul<f64> for Sym2 {
    type Output = Sym2;
    fn mul(self, rhs: f64) -> Sym2 {
        Sym2::new(self.xx * rhs, self.xy * rhs, self.yy * rhs)
    }
}

/// Bivariate normal distribution with mean `mu` and covariance `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian2D {
    pub mu: Point,
    pub sigma: Sym2,
}

impl Gaussian2D {
    pub fn new(mu: Point, sigma: Sym2) -> Result<Self, GeometryError> {
        let (hi, lo) = sigma.eigenvalues();
        if !mu.is_finite() || !hi.is_finite() || lo <= 0.0 {
            return Err(GeometryError::NotPositiveDefinite);
        }
        Ok(Self { mu, sigma })
    }

    /// Squared Mahalanobis distance of `x` from the mean.
    pub fn mahalanobis_sq(&self, x: Point) -> f64 {
        self.sigma.inverse().quad_form(x - self.mu)
    }

    /// Unnormalized kernel `exp(-½ (x-μ)ᵀ Σ⁻¹ (x-μ))`, in `(0, 1]`.
    pub fn kernel(&self, x: Point) -> f64 {
        (-0.5 * self.mahalanobis_sq(x)).exp()
    }

    /// Probability density at `x`.
    pub fn density(&self, x: Point) -> f64 {
        self.kernel(x) / (2.0 * PI * self.sigma.det().sqrt())
    }
}

/// Free-function form of [`Gaussian2D::density`].
pub fn gaussian_density(g: &Gaussian2D, x: Point) -> f64 {
    g.density(x)
}

/// Free-function form of [`Gaussian2D::kernel`].
pub fn gaussian_kernel(g: &Gaussian2D, x: Point) -> f64 {
    g.kernel(x)
}
