use super::{Annotation, DataError};
use crate::geometry::{min_area_obb, Point, Polygon};

pub const DEFAULT_PATCH: u32 = 1024;
/// Overlap between neighbouring patches.
pub const DEFAULT_GAP: u32 = 512;
pub const DEFAULT_MIN_FRACTION: f64 = 0.5;

/// Square crop window; `x0, y0` is its top-left corner in the source image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TileWindow {
    pub x0: u32,
    pub y0: u32,
    pub width: u32,
    pub height: u32,
}

impl TileWindow {
    pub fn polygon(&self) -> Polygon {
        let (x0, y0) = (self.x0 as f64, self.y0 as f64);
        let (x1, y1) = (x0 + self.width as f64, y0 + self.height as f64);
        Polygon::new_unchecked(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    pub fn contains_pixel(&self, x: u32, y: u32) -> bool {
        x >= self.x0 && x < self.x0 + self.width && y >= self.y0 && y < self.y0 + self.height
    }
}

fn axis_offsets(dim: u32, patch: u32, stride: u32) -> Vec<u32> {
    let mut offsets = Vec::new();
    let mut o = 0u32;
    loop {
        if o + patch >= dim {
            offsets.push(dim.saturating_sub(patch));
            break;
        }
        offsets.push(o);
        o += stride;
    }
    offsets
}

/// Overlapping crop windows, row-major.
///
/// Windows step by `patch - gap`; the last one on each axis is pulled back to
/// end at the image border. Images smaller than a patch get a single window
/// that extends past them.
pub fn tile_plan(image_w: u32, image_h: u32, patch: u32, gap: u32) -> Result<Vec<TileWindow>, DataError> {
    if patch == 0 || gap >= patch {
        return Err(DataError::TileParams { patch, gap });
    }
    let stride = patch - gap;
    let xs = axis_offsets(image_w, patch, stride);
    let ys = axis_offsets(image_h, patch, stride);
    Ok(ys
        .iter()
        .flat_map(|&y0| xs.iter().map(move |&x0| TileWindow { x0, y0, width: patch, height: patch }))
        .collect())
}

/// Ground truth of one window, in window coordinates.
///
/// An annotation is kept when at least `min_fraction` of its area lies in the
/// window. Fully contained outlines are kept as they are; cut ones are
/// replaced by the minimum-area rectangle of the visible part.
pub fn clip_annotations(annots: &[Annotation], window: &TileWindow, min_fraction: f64) -> Vec<Annotation> {
    let clip = window.polygon();
    let (dx, dy) = (-(window.x0 as f64), -(window.y0 as f64));
    let mut out = Vec::new();
    for a in annots {
        let full = a.quad.area();
        if full <= 0.0 {
            continue;
        }
        let visible = Polygon::new_unchecked(a.quad.to_ccw().clip_convex(&clip));
        let part = if visible.len() >= 3 { visible.area() } else { 0.0 };
        let fraction = part / full;
        if part <= 0.0 || fraction < min_fraction {
            continue;
        }
        let quad = if fraction >= 1.0 - 1e-9 {
            a.quad.translated(dx, dy)
        } else {
            match min_area_obb(&visible) {
                Ok(obb) => obb.corners().translated(dx, dy),
                Err(_) => continue,
            }
        };
        out.push(Annotation { quad, category: a.category.clone(), difficult: a.difficult });
    }
    out
}
