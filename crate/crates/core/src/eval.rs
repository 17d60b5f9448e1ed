//! VOC-style average precision for rotated detections.

use thiserror::Error;

use crate::geometry::{convex_hull, polygon_iou, Polygon};
use crate::postprocess::Detection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApMetric {
    /// 11-point interpolated AP.
    Voc07,
    /// Area under the monotone precision envelope.
    Voc12,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub iou_threshold: f64,
    pub metric: ApMetric,
    pub skip_difficult: bool,
    /// Leave classes without ground truth out of the mean.
    pub exclude_classes_without_gt: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { iou_threshold: 0.5, metric: ApMetric::Voc07, skip_difficult: true, exclude_classes_without_gt: true }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no classes to average")]
    NoClasses,
    #[error("iou threshold must lie in (0, 1), got {0}")]
    Threshold(f64),
    #[error("class index {index} out of range for {num_classes} classes")]
    ClassOutOfRange { index: usize, num_classes: usize },
}

/// Ground-truth outline for evaluation. Stored as its convex hull.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGroundTruth {
    pub polygon: Polygon,
    pub difficult: bool,
}

impl EvalGroundTruth {
    pub fn new(outline: &Polygon, difficult: bool) -> Self {
        let hull = convex_hull(outline.vertices());
        let polygon = Polygon::new(hull).unwrap_or_else(|_| outline.to_ccw());
        Self { polygon, difficult }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchLabel {
    TruePositive,
    FalsePositive,
    /// Matched a difficult instance; counts neither way.
    Ignored,
}

/// Greedy VOC matching for one class in one image.
///
/// Detections are taken by descending score (ties in input order). Each one
/// goes to the best-overlapping ground truth that is either difficult or still
/// unmatched; at or above the threshold that is a true positive (or ignored
/// for a difficult instance), otherwise a false positive. Returns
/// `(score, label)` in visiting order.
pub fn match_detections(
    dets: &[Detection],
    gts: &[EvalGroundTruth],
    cfg: &EvalConfig,
) -> Vec<(f64, MatchLabel)> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].score.total_cmp(&dets[a].score));
    let mut matched = vec![false; gts.len()];
    let mut out = Vec::with_capacity(dets.len());
    for i in order {
        let poly = dets[i].obb.corners();
        let mut best: Option<(usize, f64)> = None;
        for (g, gt) in gts.iter().enumerate() {
            let counts_as_difficult = cfg.skip_difficult && gt.difficult;
            if matched[g] && !counts_as_difficult {
                continue;
            }
            let iou = polygon_iou(&poly, &gt.polygon);
            if best.is_none_or(|(_, b)| iou > b) {
                best = Some((g, iou));
            }
        }
        let label = match best {
            Some((g, iou)) if iou >= cfg.iou_threshold => {
                if cfg.skip_difficult && gts[g].difficult {
                    MatchLabel::Ignored
                } else {
                    matched[g] = true;
                    MatchLabel::TruePositive
                }
            }
            _ => MatchLabel::FalsePositive,
        };
        out.push((dets[i].score, label));
    }
    out
}

/// Precision/recall after each ranked detection.
#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    /// `(recall, precision)` per rank.
    pub points: Vec<(f64, f64)>,
}

/// `ranked` holds true for a true positive, in descending score order.
pub fn pr_curve(ranked: &[bool], n_positives: usize) -> PrCurve {
    let mut tp = 0usize;
    let points = ranked
        .iter()
        .enumerate()
        .map(|(k, &hit)| {
            tp += usize::from(hit);
            let recall = if n_positives == 0 { 0.0 } else { tp as f64 / n_positives as f64 };
            (recall, tp as f64 / (k + 1) as f64)
        })
        .collect();
    PrCurve { points }
}

pub fn average_precision(ranked: &[bool], n_positives: usize, metric: ApMetric) -> f64 {
    if n_positives == 0 || ranked.is_empty() {
        return 0.0;
    }
    let curve = pr_curve(ranked, n_positives);
    match metric {
        ApMetric::Voc07 => {
            let mut sum = 0.0;
            for t in 0..=10 {
                let thr = t as f64 / 10.0;
                let p = curve
                    .points
                    .iter()
                    .filter(|(r, _)| *r >= thr)
                    .map(|&(_, p)| p)
                    .fold(0.0, f64::max);
                sum += p;
            }
            sum / 11.0
        }
        ApMetric::Voc12 => {
            let mut envelope: Vec<f64> = curve.points.iter().map(|&(_, p)| p).collect();
            for i in (0..envelope.len().saturating_sub(1)).rev() {
                envelope[i] = envelope[i].max(envelope[i + 1]);
            }
            // Recall rises by 1/n at each hit; summing hit precisions first
            // keeps a perfect ranking at exactly 1.
            let area: f64 = ranked.iter().zip(&envelope).filter(|(hit, _)| **hit).map(|(_, p)| p).sum();
            area / n_positives as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassAp {
    pub ap: f64,
    pub n_gt: usize,
    pub n_det: usize,
}

/// Mean of per-class APs. Classes with neither ground truth nor detections
/// are always skipped; with `exclude_without_gt` every class lacking ground
/// truth is.
pub fn mean_ap(per_class: &[ClassAp], exclude_without_gt: bool) -> Result<f64, EvalError> {
    let used: Vec<f64> = per_class
        .iter()
        .filter(|c| c.n_gt > 0 || (!exclude_without_gt && c.n_det > 0))
        .map(|c| c.ap)
        .collect();
    if used.is_empty() {
        return Err(EvalError::NoClasses);
    }
    Ok(used.iter().sum::<f64>() / used.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGroundTruth {
    pub class_index: usize,
    pub truth: EvalGroundTruth,
}

/// Detections and ground truth of one image.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImageRecord {
    pub detections: Vec<Detection>,
    pub ground_truth: Vec<LabeledGroundTruth>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_class: Vec<ClassAp>,
    pub map: f64,
}

/// Per-class AP over a set of images and their mean.
///
/// Matching runs per image; the labelled detections of all images are then
/// ranked together by score.
pub fn evaluate(images: &[ImageRecord], num_classes: usize, cfg: &EvalConfig) -> Result<EvalReport, EvalError> {
    if !(cfg.iou_threshold > 0.0 && cfg.iou_threshold < 1.0) {
        return Err(EvalError::Threshold(cfg.iou_threshold));
    }
    let check = |index: usize| {
        if index < num_classes {
            Ok(())
        } else {
            Err(EvalError::ClassOutOfRange { index, num_classes })
        }
    };
    for img in images {
        img.detections.iter().try_for_each(|d| check(d.class_index))?;
        img.ground_truth.iter().try_for_each(|g| check(g.class_index))?;
    }

    let mut per_class = Vec::with_capacity(num_classes);
    for class in 0..num_classes {
        let mut labelled: Vec<(f64, MatchLabel)> = Vec::new();
        let mut n_gt = 0;
        let mut n_det = 0;
        for img in images {
            let dets: Vec<Detection> =
                img.detections.iter().filter(|d| d.class_index == class).copied().collect();
            let gts: Vec<EvalGroundTruth> = img
                .ground_truth
                .iter()
                .filter(|g| g.class_index == class)
                .map(|g| g.truth.clone())
                .collect();
            n_gt += gts.iter().filter(|g| !(cfg.skip_difficult && g.difficult)).count();
            n_det += dets.len();
            labelled.extend(match_detections(&dets, &gts, cfg));
        }
        labelled.sort_by(|a, b| b.0.total_cmp(&a.0));
        let ranked: Vec<bool> = labelled
            .iter()
            .filter(|(_, l)| *l != MatchLabel::Ignored)
            .map(|(_, l)| *l == MatchLabel::TruePositive)
            .collect();
        per_class.push(ClassAp { ap: average_precision(&ranked, n_gt, cfg.metric), n_gt, n_det });
    }
    let map = mean_ap(&per_class, cfg.exclude_classes_without_gt)?;
    Ok(EvalReport { per_class, map })
}
