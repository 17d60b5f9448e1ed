use super::Point;
use crate::error::GeometryError;

/// Simple polygon given by its vertex ring. Library-produced polygons are
/// counterclockwise (positive signed area); parsed ones keep file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if !vertices.iter().all(|p| p.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self { vertices })
    }

    pub(crate) fn new_unchecked(vertices: Vec<Point>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area; positive for counterclockwise rings.
    pub fn signed_area(&self) -> f64 {
        ring_signed_area(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len() as f64;
        let sum = self.vertices.iter().fold(Point::default(), |acc, &p| acc + p);
        sum * (1.0 / n)
    }

    /// Same ring, reversed if needed so it runs counterclockwise.
    pub fn to_ccw(&self) -> Polygon {
        let mut vertices = self.vertices.clone();
        if ring_signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Polygon { vertices }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Polygon {
        let d = Point::new(dx, dy);
        Polygon { vertices: self.vertices.iter().map(|&p| p + d).collect() }
    }

    /// Axis-aligned bounds as `(min, max)` corners.
    pub fn bounds(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    /// Clips this polygon against a convex, counterclockwise `clip` region
    /// (Sutherland–Hodgman). The result may be empty or degenerate.
    pub fn clip_convex(&self, clip: &Polygon) -> Vec<Point> {
        let mut output = self.vertices.clone();
        let n = clip.vertices.len();
        for i in 0..n {
            if output.is_empty() {
                break;
            }
            let a = clip.vertices[i];
            let b = clip.vertices[(i + 1) % n];
            let edge = b - a;
            let input = std::mem::take(&mut output);
            let side = |p: Point| edge.cross(p - a);
            let mut prev = *input.last().unwrap();
            let mut prev_side = side(prev);
            for &cur in &input {
                let cur_side = side(cur);
                if cur_side >= 0.0 {
                    if prev_side < 0.0 {
                        output.push(intersect(prev, cur, prev_side, cur_side));
                    }
                    output.push(cur);
                } else if prev_side >= 0.0 {
                    output.push(intersect(prev, cur, prev_side, cur_side));
                }
                prev = cur;
                prev_side = cur_side;
            }
        }
        output
    }

    /// True if both rings hold the same vertices in the same cyclic order.
    pub fn same_ring(&self, other: &Polygon) -> bool {
        let (a, b) = (&self.vertices, &other.vertices);
        if a.len() != b.len() {
            return false;
        }
        let n = a.len();
        (0..n).any(|shift| (0..n).all(|i| a[i] == b[(i + shift) % n]))
    }
}

fn intersect(p: Point, q: Point, sp: f64, sq: f64) -> Point {
    let t = sp / (sp - sq);
    p + (q - p) * t
}

/// Lexicographic order on vertex coordinates; clipping always runs in this
/// order so the result is exactly symmetric.
fn ring_order(a: &Polygon, b: &Polygon) -> std::cmp::Ordering {
    let key = |p: &Point| (p.x, p.y);
    a.vertices
        .iter()
        .map(key)
        .zip(b.vertices.iter().map(key))
        .map(|(p, q)| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.vertices.len().cmp(&b.vertices.len()))
}

pub(crate) fn ring_signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        acc += ring[i].cross(ring[(i + 1) % n]);
    }
    0.5 * acc
}

/// Intersection over union of two convex polygons.
///
/// Degenerate inputs (zero area) give 0. Polygons with the same vertex ring
/// give exactly 1; distinct polygons never round up to 1.
pub fn polygon_iou(a: &Polygon, b: &Polygon) -> f64 {
    let (a, b) = if ring_order(b, a).is_lt() { (b, a) } else { (a, b) };
    let a = a.to_ccw();
    let b = b.to_ccw();
    let area_a = a.area();
    let area_b = b.area();
    if !(area_a > 0.0 && area_b > 0.0) {
        return 0.0;
    }
    if a.same_ring(&b) {
        return 1.0;
    }
    let (alo, ahi) = a.bounds();
    let (blo, bhi) = b.bounds();
    if alo.x > bhi.x || blo.x > ahi.x || alo.y > bhi.y || blo.y > ahi.y {
        return 0.0;
    }
    let inter = ring_signed_area(&a.clip_convex(&b)).max(0.0);
    let union = area_a + area_b - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0 - f64::EPSILON)
}
