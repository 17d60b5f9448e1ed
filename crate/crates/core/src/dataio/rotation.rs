use rand::Rng;

use super::Annotation;
use crate::geometry::{Point, Polygon};

/// Quarter-turn part of a rotation plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoarseRotation {
    R0,
    R90,
    R180,
    R270,
}

impl CoarseRotation {
    pub const ALL: [CoarseRotation; 4] = [Self::R0, Self::R90, Self::R180, Self::R270];

    pub fn degrees(self) -> u32 {
        match self {
            Self::R0 => 0,
            Self::R90 => 90,
            Self::R180 => 180,
            Self::R270 => 270,
        }
    }

    /// Exact `(cos, sin)`.
    fn cos_sin(self) -> (f64, f64) {
        match self {
            Self::R0 => (1.0, 0.0),
            Self::R90 => (0.0, 1.0),
            Self::R180 => (-1.0, 0.0),
            Self::R270 => (0.0, -1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FineRotation {
    F0,
    F30,
    F60,
}

impl FineRotation {
    pub fn degrees(self) -> u32 {
        match self {
            Self::F0 => 0,
            Self::F30 => 30,
            Self::F60 => 60,
        }
    }
}

/// Two-step rotation: a quarter turn, then optionally 30° or 60° more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RotationPlan {
    pub coarse: CoarseRotation,
    pub fine: FineRotation,
}

impl RotationPlan {
    pub const IDENTITY: RotationPlan = RotationPlan { coarse: CoarseRotation::R0, fine: FineRotation::F0 };

    pub fn new(coarse: CoarseRotation, fine: FineRotation) -> Self {
        Self { coarse, fine }
    }

    pub fn total_degrees(&self) -> u32 {
        self.coarse.degrees() + self.fine.degrees()
    }
}

/// Quarter turn drawn uniformly; with probability ½ a fine step drawn
/// uniformly from {30°, 60°}, otherwise none.
pub fn sample_rotation<R: Rng + ?Sized>(rng: &mut R) -> RotationPlan {
    let coarse = CoarseRotation::ALL[rng.gen_range(0..4)];
    let fine = if rng.gen_bool(0.5) {
        if rng.gen_bool(0.5) {
            FineRotation::F30
        } else {
            FineRotation::F60
        }
    } else {
        FineRotation::F0
    };
    RotationPlan { coarse, fine }
}

/// Rotates about the image center by `(cos, sin)`, counterclockwise as seen on
/// screen (y pointing down), and re-frames into the rotated image's bounding
/// box.
fn rotate_frame(points: &mut [Point], w: f64, h: f64, cos: f64, sin: f64) -> (f64, f64) {
    let new_w = cos.abs() * w + sin.abs() * h;
    let new_h = sin.abs() * w + cos.abs() * h;
    for p in points.iter_mut() {
        let dx = p.x - 0.5 * w;
        let dy = p.y - 0.5 * h;
        *p = Point::new(cos * dx + sin * dy + 0.5 * new_w, -sin * dx + cos * dy + 0.5 * new_h);
    }
    (new_w, new_h)
}

/// Applies a rotation plan to annotation coordinates. Returns the moved
/// annotations and the new image size.
///
/// A quarter turn maps `(x, y)` to `(y, W - x)` on a `W × H` image, which
/// becomes `H × W`.
pub fn apply_rotation(
    annots: &[Annotation],
    image_w: f64,
    image_h: f64,
    plan: RotationPlan,
) -> (Vec<Annotation>, f64, f64) {
    let mut points: Vec<Point> = annots.iter().flat_map(|a| a.quad.vertices().to_vec()).collect();
    let (c, s) = plan.coarse.cos_sin();
    let (mut w, mut h) = rotate_frame(&mut points, image_w, image_h, c, s);
    if plan.fine != FineRotation::F0 {
        let (s, c) = (plan.fine.degrees() as f64).to_radians().sin_cos();
        (w, h) = rotate_frame(&mut points, w, h, c, s);
    }
    let mut it = points.chunks(4);
    let out = annots
        .iter()
        .map(|a| Annotation {
            quad: Polygon::new_unchecked(it.next().unwrap().to_vec()),
            category: a.category.clone(),
            difficult: a.difficult,
        })
        .collect();
    (out, w, h)
}
