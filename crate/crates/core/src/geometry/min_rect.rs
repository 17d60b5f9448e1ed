use super::{Obb, Point, Polygon};
use crate::error::GeometryError;

/// Convex hull (Andrew's monotone chain), counterclockwise, without
/// collinear vertices.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Minimum-area enclosing rectangle of a point set, by rotating calipers over
/// its convex hull.
///
/// Fails when the points are collinear or coincident.
pub fn min_area_obb(polygon: &Polygon) -> Result<Obb, GeometryError> {
    let hull = convex_hull(polygon.vertices());
    let n = hull.len();
    if n < 3 {
        return Err(GeometryError::Degenerate);
    }
    let (lo, hi) = polygon.bounds();
    let scale = (hi - lo).norm();
    if super::polygon::ring_signed_area(&hull) <= 1e-12 * scale * scale {
        return Err(GeometryError::Degenerate);
    }

    let along = |i: usize, u: Point, origin: Point| (hull[i % n] - origin).dot(u);
    let edge_frame = |i: usize| {
        let e = hull[(i + 1) % n] - hull[i];
        let u = e * (1.0 / e.norm());
        (u, Point::new(-u.y, u.x))
    };

    // Calipers: farthest along the edge, farthest from it, and farthest
    // against it. Each only ever moves forward around the hull.
    let (u0, n0) = edge_frame(0);
    let argmax = |f: &dyn Fn(usize) -> f64| (0..n).max_by(|&a, &b| f(a).total_cmp(&f(b))).unwrap();
    let mut right = argmax(&|j| along(j, u0, hull[0]));
    let mut top = argmax(&|j| along(j, n0, hull[0]));
    let mut left = argmax(&|j| -along(j, u0, hull[0]));

    let mut best: Option<(f64, Obb)> = None;
    for (i, &origin) in hull.iter().enumerate() {
        let (u, nrm) = edge_frame(i);
        for _ in 0..n {
            if along(right + 1, u, origin) > along(right, u, origin) {
                right = (right + 1) % n;
            } else {
                break;
            }
        }
        for _ in 0..n {
            if along(top + 1, nrm, origin) > along(top, nrm, origin) {
                top = (top + 1) % n;
            } else {
                break;
            }
        }
        for _ in 0..n {
            if along(left + 1, u, origin) < along(left, u, origin) {
                left = (left + 1) % n;
            } else {
                break;
            }
        }
        let max_u = along(right, u, origin);
        let min_u = along(left, u, origin);
        let height = along(top, nrm, origin);
        let width = max_u - min_u;
        let area = width * height;
        if best.as_ref().is_none_or(|(a, _)| area < *a) {
            let center = origin + u * (0.5 * (min_u + max_u)) + nrm * (0.5 * height);
            let angle = u.y.atan2(u.x);
            let obb = Obb::new(center.x, center.y, width, height, angle)?;
            best = Some((area, obb));
        }
    }
    Ok(best.expect("hull has at least three edges").1)
}
