//! Classification and regression losses.
//!
//! Classification uses the quality focal loss, whose soft target at a positive
//! location is the ProbIoU between the decoded box and its ground truth.
//! Regression uses the ProbIoU loss: the Hellinger distance between the two
//! boxes' Gaussians.

use thiserror::Error;

use crate::assignment::{AssignmentMap, Cell};
use crate::geometry::{Obb, Sym2};

/// Guard for logs, square roots and determinants in the ProbIoU terms.
pub const PROBIOU_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    /// Focusing exponent of the quality focal loss.
    pub beta: f64,
    /// Scores are clamped into `[eps, 1 - eps]` before taking logs.
    pub eps: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self { beta: 2.0, eps: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub cls_loss: f64,
    pub reg_loss: f64,
    pub total: f64,
    pub n_pos: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LossError {
    #[error("expected {expected_levels} prediction levels, got {got}")]
    LevelCount { expected_levels: usize, got: usize },
    #[error("level {level}: expected {expected} {what}, got {got}")]
    Shape { level: usize, what: &'static str, expected: usize, got: usize },
    #[error("class index {index} out of range for {num_classes} classes")]
    ClassOutOfRange { index: usize, num_classes: usize },
}

/// Quality focal loss `-|y-σ|^β · ((1-y)·ln(1-σ) + y·ln σ)`.
///
/// Only the logs see the clamped score, so `qfl(σ, σ)` is exactly zero.
pub fn qfl(sigma: f64, y: f64, cfg: &LossConfig) -> f64 {
    let s = sigma.clamp(cfg.eps, 1.0 - cfg.eps);
    let modulator = (y - sigma).abs().powf(cfg.beta);
    if modulator == 0.0 {
        return 0.0;
    }
    -modulator * ((1.0 - y) * (1.0 - s).ln() + y * s.ln())
}

/// Derivative of [`qfl`] with respect to `sigma`, inside the clamp range.
pub fn qfl_grad(sigma: f64, y: f64, cfg: &LossConfig) -> f64 {
    let s = sigma.clamp(cfg.eps, 1.0 - cfg.eps);
    let diff = sigma - y;
    let ce = -((1.0 - y) * (1.0 - s).ln() + y * s.ln());
    let dce = (1.0 - y) / (1.0 - s) - y / s;
    let m = diff.abs().powf(cfg.beta);
    let dm = if diff == 0.0 {
        0.0
    } else {
        cfg.beta * diff.abs().powf(cfg.beta - 1.0) * diff.signum()
    };
    dm * ce + m * dce
}

struct Bhattacharyya {
    distance: f64,
    mean_inv: Sym2,
    pred_inv: Sym2,
    offset: crate::geometry::Point,
}

fn bhattacharyya(pred: &Obb, gt: &Obb) -> Bhattacharyya {
    let floor = PROBIOU_EPS * PROBIOU_EPS;
    let g1 = pred.to_gaussian(false);
    let g2 = gt.to_gaussian(false);
    let mean = (g1.sigma + g2.sigma) * 0.5;
    let mean_inv = mean.inverse_floored(floor);
    let offset = g1.mu - g2.mu;
    let det1 = g1.sigma.det().max(floor);
    let det2 = g2.sigma.det().max(floor);
    let det_mean = mean.det().max(floor);
    let distance = 0.125 * mean_inv.quad_form(offset)
        + 0.5 * (det_mean.ln() - 0.5 * (det1.ln() + det2.ln()));
    Bhattacharyya {
        distance: distance.max(0.0),
        mean_inv,
        pred_inv: g1.sigma.inverse_floored(floor),
        offset,
    }
}

/// Bhattacharyya distance between the boxes' unshrunk Gaussians.
pub fn bhattacharyya_distance(a: &Obb, b: &Obb) -> f64 {
    bhattacharyya(a, b).distance
}

/// Gaussian overlap `1 - H`, where `H = sqrt(1 - exp(-B_D))` is the Hellinger
/// distance. Symmetric, 1 for identical boxes and tending to 0 with distance.
pub fn prob_iou(a: &Obb, b: &Obb) -> f64 {
    1.0 - hellinger(bhattacharyya_distance(a, b))
}

fn hellinger(distance: f64) -> f64 {
    (1.0 - (-distance).exp()).max(0.0).sqrt()
}

pub fn prob_iou_loss(pred: &Obb, gt: &Obb) -> f64 {
    hellinger(bhattacharyya_distance(pred, gt))
}

/// Gradient of [`prob_iou_loss`] with respect to `(cx, cy, w, h, θ)` of the
/// prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbIouGrad {
    pub grad: [f64; 5],
    /// Set when the loss is within `PROBIOU_EPS` of zero, where the square
    /// root is singular; `grad` is zero then.
    pub degenerate: bool,
}

pub fn prob_iou_grad(pred: &Obb, gt: &Obb) -> ProbIouGrad {
    let b = bhattacharyya(pred, gt);
    let bc = (-b.distance).exp();
    let h = (1.0 - bc).max(0.0).sqrt();
    if h < PROBIOU_EPS {
        return ProbIouGrad { grad: [0.0; 5], degenerate: true };
    }
    let outer = bc / (2.0 * h);

    // B_D = ⅛ dᵀS⁻¹d + ½ ln|S| - ¼ ln|Σ₁| - ¼ ln|Σ₂|,  S = (Σ₁ + Σ₂)/2
    // ∂B_D/∂μ₁ = ¼ S⁻¹d
    // ∂B_D/∂Σ₁ = -1/16 vvᵀ + ¼ S⁻¹ - ¼ Σ₁⁻¹,  v = S⁻¹d
    let v = b.mean_inv.apply(b.offset);
    let d_sigma = Sym2::outer(v) * (-1.0 / 16.0) + b.mean_inv * 0.25 + b.pred_inv * -0.25;

    let (a_var, b_var) = (pred.w * pred.w / 12.0, pred.h * pred.h / 12.0);
    let (s2, c2) = (2.0 * pred.theta).sin_cos();
    let dw = Sym2::rotated_diag(pred.w / 6.0, 0.0, pred.theta);
    let dh = Sym2::rotated_diag(0.0, pred.h / 6.0, pred.theta);
    let dtheta = Sym2::new(-(a_var - b_var) * s2, (a_var - b_var) * c2, (a_var - b_var) * s2);

    let grad = [
        outer * 0.25 * v.x,
        outer * 0.25 * v.y,
        outer * d_sigma.inner(&dw),
        outer * d_sigma.inner(&dh),
        outer * d_sigma.inner(&dtheta),
    ];
    ProbIouGrad { grad, degenerate: false }
}

/// Network outputs for one pyramid level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelPrediction {
    /// Sigmoid class scores, `cells × num_classes`, row-major by cell.
    pub scores: Vec<f64>,
    /// Decoded box per cell, row-major.
    pub boxes: Vec<Obb>,
}

/// Total training loss over all levels.
///
/// The classification term sums the quality focal loss over every cell and
/// class and divides by the positive count (at least 1). Its target is the
/// ProbIoU of the decoded box for the assigned class of a positive cell and 0
/// elsewhere. The regression term averages the ProbIoU loss over positive
/// cells, weighted by the same ProbIoU.
pub fn total_loss(
    predictions: &[LevelPrediction],
    map: &AssignmentMap,
    num_classes: usize,
    cfg: &LossConfig,
) -> Result<LossReport, LossError> {
    if predictions.len() != map.levels.len() {
        return Err(LossError::LevelCount { expected_levels: map.levels.len(), got: predictions.len() });
    }
    let mut cls_sum = 0.0;
    let mut reg_num = 0.0;
    let mut reg_den = 0.0;
    let mut n_pos = 0usize;
    for (li, (pred, level)) in predictions.iter().zip(&map.levels).enumerate() {
        let cells = level.cells.len();
        if pred.scores.len() != cells * num_classes {
            return Err(LossError::Shape {
                level: li,
                what: "scores",
                expected: cells * num_classes,
                got: pred.scores.len(),
            });
        }
        if pred.boxes.len() != cells {
            return Err(LossError::Shape { level: li, what: "boxes", expected: cells, got: pred.boxes.len() });
        }
        for (ci, cell) in level.cells.iter().enumerate() {
            let scores = &pred.scores[ci * num_classes..(ci + 1) * num_classes];
            let target = match cell {
                Cell::Negative => None,
                Cell::Positive(p) => {
                    if p.class_index >= num_classes {
                        return Err(LossError::ClassOutOfRange { index: p.class_index, num_classes });
                    }
                    let quality = prob_iou(&pred.boxes[ci], &p.target);
                    n_pos += 1;
                    reg_num += quality * (1.0 - quality);
                    reg_den += quality;
                    Some((p.class_index, quality))
                }
            };
            for (k, &s) in scores.iter().enumerate() {
                let y = match target {
                    Some((class, quality)) if class == k => quality,
                    _ => 0.0,
                };
                cls_sum += qfl(s, y, cfg);
            }
        }
    }
    let cls_loss = cls_sum / n_pos.max(1) as f64;
    let reg_loss = if n_pos == 0 { 0.0 } else { reg_num / reg_den.max(cfg.eps) };
    Ok(LossReport { cls_loss, reg_loss, total: cls_loss + reg_loss, n_pos })
}
