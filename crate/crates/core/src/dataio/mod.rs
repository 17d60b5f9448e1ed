//! DOTA-style annotation and result files, image tiling, and rotation
//! augmentation of annotation coordinates.

mod dota;
mod rotation;
mod tiling;

pub use dota::{
    format_annotations, format_result_line, parse_dota, parse_results, write_results, ResultRecord,
};
pub use rotation::{apply_rotation, sample_rotation, CoarseRotation, FineRotation, RotationPlan};
pub use tiling::{clip_annotations, tile_plan, TileWindow, DEFAULT_GAP, DEFAULT_MIN_FRACTION, DEFAULT_PATCH};

use thiserror::Error;

use crate::error::GeometryError;
use crate::geometry::{min_area_obb, Obb, Polygon};

/// One labelled object: a four-point outline, its category and the
/// difficult flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub quad: Polygon,
    pub category: String,
    pub difficult: bool,
}

impl Annotation {
    pub fn new(quad: Polygon, category: impl Into<String>, difficult: bool) -> Result<Self, DataError> {
        if quad.len() != 4 {
            return Err(DataError::NotAQuad(quad.len()));
        }
        let category = category.into();
        if category.is_empty() {
            return Err(DataError::EmptyCategory);
        }
        Ok(Self { quad, category, difficult })
    }

    pub fn from_obb(obb: &Obb, category: impl Into<String>, difficult: bool) -> Result<Self, DataError> {
        Self::new(obb.corners(), category, difficult)
    }

    /// Minimum-area rectangle around the quad.
    pub fn to_obb(&self) -> Result<Obb, GeometryError> {
        min_area_obb(&self.quad)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("annotation outline must have 4 vertices, got {0}")]
    NotAQuad(usize),
    #[error("category must not be empty")]
    EmptyCategory,
    #[error("class index {index} out of range for {num_classes} classes")]
    ClassOutOfRange { index: usize, num_classes: usize },
    #[error("patch size {patch} must exceed gap {gap}")]
    TileParams { patch: u32, gap: u32 },
}
