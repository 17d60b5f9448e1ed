//! Rotated non-maximum suppression and merging of per-patch detections.

use std::cmp::Ordering;

use crate::geometry::{polygon_iou, Obb, Point, Polygon};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub obb: Obb,
    pub class_index: usize,
    pub score: f64,
}

impl Detection {
    pub fn new(obb: Obb, class_index: usize, score: f64) -> Self {
        Self { obb, class_index, score }
    }
}

/// Top-left corner of a patch within its source image.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PatchOrigin {
    pub offset_x: f64,
    pub offset_y: f64,
}

impl PatchOrigin {
    pub fn new(offset_x: f64, offset_y: f64) -> Self {
        Self { offset_x, offset_y }
    }
}

struct Kept {
    polygon: Polygon,
    lo: Point,
    hi: Point,
}

/// Class-wise greedy suppression.
///
/// Detections are visited by descending score (ties by input order). One is
/// kept when its IoU with every kept detection of its class is strictly below
/// `iou_threshold`. Output is in visiting order.
pub fn rotated_nms(dets: &[Detection], iou_threshold: f64) -> Vec<Detection> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].score.total_cmp(&dets[a].score));

    let num_classes = dets.iter().map(|d| d.class_index + 1).max().unwrap_or(0);
    let mut kept_by_class: Vec<Vec<Kept>> = (0..num_classes).map(|_| Vec::new()).collect();
    let mut out = Vec::new();
    for i in order {
        let det = &dets[i];
        let polygon = det.obb.corners();
        let (lo, hi) = polygon.bounds();
        let kept = &mut kept_by_class[det.class_index];
        let suppressed = kept.iter().any(|k| {
            let overlaps = lo.x <= k.hi.x && k.lo.x <= hi.x && lo.y <= k.hi.y && k.lo.y <= hi.y;
            // Disjoint boxes have IoU 0, which only a zero threshold suppresses.
            if overlaps {
                polygon_iou(&polygon, &k.polygon) >= iou_threshold
            } else {
                iou_threshold <= 0.0
            }
        });
        if !suppressed {
            kept.push(Kept { polygon, lo, hi });
            out.push(*det);
        }
    }
    out
}

/// Shifts patch detections into image coordinates, drops those scoring below
/// `score_threshold`, and suppresses duplicates across patches.
///
/// The union is put into a canonical order before suppression, so the result
/// does not depend on the order of `per_patch`.
pub fn merge_patches(
    per_patch: &[(PatchOrigin, Vec<Detection>)],
    iou_threshold: f64,
    score_threshold: f64,
) -> Vec<Detection> {
    let mut all: Vec<Detection> = per_patch
        .iter()
        .flat_map(|(origin, dets)| {
            dets.iter().map(move |d| Detection {
                obb: d.obb.translated(origin.offset_x, origin.offset_y),
                ..*d
            })
        })
        .filter(|d| d.score >= score_threshold)
        .collect();
    all.sort_by(canonical_order);
    rotated_nms(&all, iou_threshold)
}

fn canonical_order(a: &Detection, b: &Detection) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.class_index.cmp(&b.class_index))
        .then(a.obb.cx.total_cmp(&b.obb.cx))
        .then(a.obb.cy.total_cmp(&b.obb.cy))
        .then(a.obb.w.total_cmp(&b.obb.w))
        .then(a.obb.h.total_cmp(&b.obb.h))
        .then(a.obb.theta.total_cmp(&b.obb.theta))
}
