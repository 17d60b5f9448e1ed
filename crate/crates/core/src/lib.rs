//! Label assignment and evaluation toolkit for anchor-free oriented object
//! detectors.
//!
//! The crate covers the deterministic parts of such a detector:
//!
//! * [`geometry`]: oriented boxes, their 2D Gaussian form, convex polygon IoU
//!   and minimum-area rectangles.
//! * [`assignment`]: ellipse center sampling, Gaussian-distance resolution of
//!   ambiguous samples and multi-level sampling over a feature pyramid.
//! * [`codec`]: decoding raw regression outputs into boxes.
//! * [`losses`]: quality focal loss, ProbIoU loss and its analytic gradient.
//! * [`postprocess`]: rotated NMS and merging of tiled detections.
//! * [`dataio`]: DOTA annotation/result text formats, tiling and rotation
//!   augmentation of annotations.
//! * [`eval`]: VOC07/VOC12 average precision for rotated boxes.

pub mod assignment;
pub mod codec;
pub mod dataio;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod losses;
pub mod postprocess;

pub use assignment::{AssignConfig, AssignmentMap, Cell, GroundTruth, LevelSpec};
pub use codec::{DecodeParams, RawRegression};
pub use dataio::{Annotation, RotationPlan, TileWindow};
pub use error::GeometryError;
pub use eval::{ApMetric, EvalConfig};
pub use geometry::{Gaussian2D, Obb, Point, Polygon};
pub use losses::{LossConfig, LossReport};
pub use postprocess::{Detection, PatchOrigin};
