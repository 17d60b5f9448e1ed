//! Decoding of raw regression outputs into oriented boxes.
//!
//! Offsets are scaled by `k·stride` and may be negative, sizes go through
//! `(elu(x·k) + 1)·stride` so they stay positive, and the angle is reduced
//! modulo π/2.

use crate::geometry::{Obb, Point, HALF_PI};

/// Direct outputs of the regression branch at one location.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RawRegression {
    pub reg_x: f64,
    pub reg_y: f64,
    pub reg_w: f64,
    pub reg_h: f64,
    pub reg_theta: f64,
}

impl RawRegression {
    pub fn new(reg_x: f64, reg_y: f64, reg_w: f64, reg_h: f64, reg_theta: f64) -> Self {
        Self { reg_x, reg_y, reg_w, reg_h, reg_theta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeParams {
    /// Per-level scale factor.
    pub k: f64,
    pub stride: f64,
}

impl DecodeParams {
    pub fn new(k: f64, stride: f64) -> Self {
        debug_assert!(k > 0.0 && stride > 0.0);
        Self { k, stride }
    }

    pub fn with_stride(stride: f64) -> Self {
        Self::new(1.0, stride)
    }
}

pub fn elu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        x.exp_m1()
    }
}

/// `elu(x) + 1`, evaluated as `exp(x)` on the negative branch so it stays
/// positive where `exp(x) - 1` would round to -1.
pub fn elu_plus_one(x: f64) -> f64 {
    if x > 0.0 {
        x + 1.0
    } else {
        x.exp()
    }
}

/// Inverse of [`elu`] on `(-1, ∞)`.
pub fn elu_inverse(y: f64) -> f64 {
    if y > 0.0 {
        y
    } else {
        y.ln_1p()
    }
}

/// `x mod π/2` in `[0, π/2)`, also for negative `x`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(HALF_PI);
    if r >= HALF_PI {
        0.0
    } else {
        r
    }
}

pub fn decode_regression(raw: &RawRegression, point: Point, params: &DecodeParams) -> Obb {
    let DecodeParams { k, stride } = *params;
    let cx = point.x + raw.reg_x * k * stride;
    let cy = point.y + raw.reg_y * k * stride;
    let w = elu_plus_one(raw.reg_w * k) * stride;
    let h = elu_plus_one(raw.reg_h * k) * stride;
    // exp underflows below about -745.
    let w = w.max(f64::MIN_POSITIVE);
    let h = h.max(f64::MIN_POSITIVE);
    Obb { cx, cy, w, h, theta: wrap_angle(raw.reg_theta) }
}

/// Raw outputs that decode back to `target` from `point`.
///
/// Exact up to rounding for `θ` in `[0, π/2)`, which every [`Obb`] satisfies.
pub fn encode_target(target: &Obb, point: Point, params: &DecodeParams) -> RawRegression {
    let DecodeParams { k, stride } = *params;
    RawRegression {
        reg_x: (target.cx - point.x) / (k * stride),
        reg_y: (target.cy - point.y) / (k * stride),
        reg_w: elu_inverse(target.w / stride - 1.0) / k,
        reg_h: elu_inverse(target.h / stride - 1.0) / k,
        reg_theta: target.theta,
    }
}
