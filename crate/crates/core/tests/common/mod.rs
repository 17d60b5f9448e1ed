//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls into the code path it is used to check: assignment is
//! recomputed per cell from raw box parameters, areas are sampled, the
//! Bhattacharyya coefficient is integrated on a grid, and suppression works
//! from a full IoU matrix.

#![allow(dead_code)]

use std::f64::consts::PI;

use obbassign::assignment::{AssignConfig, GroundTruth, LevelSpec};
use obbassign::geometry::{polygon_iou, Obb, Point, Polygon};
use obbassign::losses::prob_iou_loss;
use obbassign::postprocess::Detection;
use rand::Rng;

pub fn random_obb(rng: &mut impl Rng, extent: f64, min_side: f64, max_side: f64) -> Obb {
    Obb::new(
        rng.gen_range(0.0..extent),
        rng.gen_range(0.0..extent),
        rng.gen_range(min_side..max_side),
        rng.gen_range(min_side..max_side),
        rng.gen_range(-PI..PI),
    )
    .unwrap()
}

/// Covariance `R diag(w²/12, h²/12) Rᵀ` (or the shrunk variant) as a plain
/// 2×2 array, built from the raw box parameters.
pub fn raw_covariance(cx_w_h_t: (f64, f64, f64), shrink: bool) -> [[f64; 2]; 2] {
    let (w, h, t) = cx_w_h_t;
    let d = if shrink {
        let m = w.min(h) / 12.0;
        [m * w, m * h]
    } else {
        [w * w / 12.0, h * h / 12.0]
    };
    let r = [[t.cos(), -t.sin()], [t.sin(), t.cos()]];
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i][j] += r[i][k] * d[k] * r[j][k];
            }
        }
    }
    out
}

fn inv2(m: [[f64; 2]; 2]) -> ([[f64; 2]; 2], f64) {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    ([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]], det)
}

fn quad(mi: [[f64; 2]; 2], dx: f64, dy: f64) -> f64 {
    dx * (mi[0][0] * dx + mi[0][1] * dy) + dy * (mi[1][0] * dx + mi[1][1] * dy)
}

pub fn oracle_kernel(o: &Obb, x: Point, shrink: bool) -> f64 {
    let (mi, _) = inv2(raw_covariance((o.w, o.h, o.theta), shrink));
    (-0.5 * quad(mi, x.x - o.cx, x.y - o.cy)).exp()
}

pub fn oracle_pdf(o: &Obb, x: Point) -> f64 {
    let (mi, det) = inv2(raw_covariance((o.w, o.h, o.theta), false));
    (-0.5 * quad(mi, x.x - o.cx, x.y - o.cy)).exp() / (2.0 * PI * det.sqrt())
}

fn oracle_levels(o: &Obb, levels: &[LevelSpec], ratio: f64) -> Vec<usize> {
    let long = o.w.max(o.h);
    let short = o.w.min(o.h);
    let top = levels.len() - 1;
    let mut out = Vec::new();
    for (i, l) in levels.iter().enumerate() {
        let base = (long > l.range_min && long <= l.range_max) || (i == top && long > l.range_max);
        let mls = short / l.stride < ratio && long > l.range_max;
        if base || mls {
            out.push(i);
        }
    }
    out
}

/// Per-cell brute force: target index of each cell (row-major), per level.
pub fn oracle_assignment(
    targets: &[GroundTruth],
    levels: &[LevelSpec],
    cfg: &AssignConfig,
) -> Vec<Vec<Option<usize>>> {
    let sets: Vec<Vec<usize>> =
        targets.iter().map(|t| oracle_levels(&t.obb, levels, cfg.mls_short_ratio)).collect();
    levels
        .iter()
        .enumerate()
        .map(|(li, l)| {
            let mut cells = Vec::with_capacity(l.grid_h * l.grid_w);
            for r in 0..l.grid_h {
                for c in 0..l.grid_w {
                    let x = Point::new((c as f64 + 0.5) * l.stride, (r as f64 + 0.5) * l.stride);
                    let mut best: Option<(usize, f64)> = None;
                    for (ti, t) in targets.iter().enumerate() {
                        if !sets[ti].contains(&li) || oracle_kernel(&t.obb, x, cfg.use_shrink) < cfg.c_threshold {
                            continue;
                        }
                        let j = (t.obb.w * t.obb.h).sqrt() * oracle_pdf(&t.obb, x);
                        let better = match best {
                            None => true,
                            Some((bi, bj)) => {
                                j > bj || (j == bj && t.obb.w * t.obb.h < targets[bi].obb.w * targets[bi].obb.h)
                            }
                        };
                        if better {
                            best = Some((ti, j));
                        }
                    }
                    cells.push(best.map(|(i, _)| i));
                }
            }
            cells
        })
        .collect()
}

fn inside_convex(poly: &[Point], p: Point) -> bool {
    let n = poly.len();
    let area: f64 = (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum();
    let sign = area.signum();
    (0..n).all(|i| sign * (poly[(i + 1) % n] - poly[i]).cross(p - poly[i]) >= 0.0)
}

/// IoU estimated by jittered-grid sampling of the joint bounding box.
pub fn sampled_iou(a: &Polygon, b: &Polygon, n: usize, rng: &mut impl Rng) -> f64 {
    let (alo, ahi) = a.bounds();
    let (blo, bhi) = b.bounds();
    let lo = Point::new(alo.x.min(blo.x), alo.y.min(blo.y));
    let hi = Point::new(ahi.x.max(bhi.x), ahi.y.max(bhi.y));
    let (dx, dy) = ((hi.x - lo.x) / n as f64, (hi.y - lo.y) / n as f64);
    let (mut inter, mut union) = (0u64, 0u64);
    for i in 0..n {
        for j in 0..n {
            let p = Point::new(
                lo.x + (i as f64 + rng.gen::<f64>()) * dx,
                lo.y + (j as f64 + rng.gen::<f64>()) * dy,
            );
            let (ia, ib) = (inside_convex(a.vertices(), p), inside_convex(b.vertices(), p));
            inter += u64::from(ia && ib);
            union += u64::from(ia || ib);
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// `1 - sqrt(1 - BC)` with the Bhattacharyya coefficient `∫ sqrt(f₁ f₂)`
/// integrated by the trapezoid rule over a box covering both densities.
pub fn integrated_prob_iou(a: &Obb, b: &Obb, n: usize) -> f64 {
    let reach = |o: &Obb| 8.0 * (o.w.max(o.h) / 12f64.sqrt());
    let (ra, rb) = (reach(a), reach(b));
    let x0 = (a.cx - ra).min(b.cx - rb);
    let x1 = (a.cx + ra).max(b.cx + rb);
    let y0 = (a.cy - ra).min(b.cy - rb);
    let y1 = (a.cy + ra).max(b.cy + rb);
    let (hx, hy) = ((x1 - x0) / n as f64, (y1 - y0) / n as f64);
    let mut total = 0.0;
    for i in 0..=n {
        let wx = if i == 0 || i == n { 0.5 } else { 1.0 };
        let x = x0 + i as f64 * hx;
        for j in 0..=n {
            let wy = if j == 0 || j == n { 0.5 } else { 1.0 };
            let p = Point::new(x, y0 + j as f64 * hy);
            total += wx * wy * (oracle_pdf(a, p) * oracle_pdf(b, p)).sqrt();
        }
    }
    let bc = total * hx * hy;
    1.0 - (1.0 - bc).max(0.0).sqrt()
}

/// Greedy suppression from a precomputed IoU matrix.
pub fn oracle_nms(dets: &[Detection], threshold: f64) -> Vec<Detection> {
    let polys: Vec<Polygon> = dets.iter().map(|d| d.obb.corners()).collect();
    let n = dets.len();
    let mut iou = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            iou[i][j] = polygon_iou(&polys[i], &polys[j]);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dets[b].score.partial_cmp(&dets[a].score).unwrap());
    let mut keep = vec![false; n];
    for (rank, &i) in order.iter().enumerate() {
        keep[i] = order[..rank]
            .iter()
            .all(|&j| !keep[j] || dets[j].class_index != dets[i].class_index || iou[i][j] < threshold);
    }
    order.into_iter().filter(|&i| keep[i]).map(|i| dets[i]).collect()
}

/// Central finite differences of the ProbIoU loss in `(cx, cy, w, h, θ)`.
pub fn fd_prob_iou_grad(pred: &Obb, gt: &Obb, step: f64) -> [f64; 5] {
    let params = [pred.cx, pred.cy, pred.w, pred.h, pred.theta];
    let mut out = [0.0; 5];
    for k in 0..5 {
        let eval = |delta: f64| {
            let mut p = params;
            p[k] += delta;
            prob_iou_loss(&Obb::new(p[0], p[1], p[2], p[3], p[4]).unwrap(), gt)
        };
        out[k] = (eval(step) - eval(-step)) / (2.0 * step);
    }
    out
}

/// Relative gradient error with an absolute floor for components that vanish.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}
