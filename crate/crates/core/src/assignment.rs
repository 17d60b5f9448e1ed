//! Label assignment over a feature pyramid.
//!
//! A sampling point is a positive candidate for a target when it falls inside
//! the target's Gaussian ellipse (`g(x) >= C`) on one of the target's levels.
//! Points claimed by several targets go to the one with the largest
//! center distance `J(x) = sqrt(w·h)·f(x)`. Narrow targets are additionally
//! sampled on finer levels whose stride is comparable to their short edge.

use thiserror::Error;

use crate::geometry::{Gaussian2D, Obb, Point};

/// Kernel value at which the unshrunk ellipse is inscribed in its box.
pub fn inscribed_level() -> f64 {
    (-1.5f64).exp()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssignError {
    #[error("c_threshold {0} outside [exp(-1.5), 1]")]
    Threshold(f64),
    #[error("mls_short_ratio must be positive, got {0}")]
    ShortRatio(f64),
    #[error("invalid level {index}: {reason}")]
    Level { index: usize, reason: String },
}

/// One feature-pyramid level.
///
/// Targets whose long edge lies in `(range_min, range_max]` belong to this
/// level. Cell `(r, c)` samples the pixel `((c + 0.5)·stride, (r + 0.5)·stride)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSpec {
    pub stride: f64,
    pub grid_h: usize,
    pub grid_w: usize,
    pub range_min: f64,
    pub range_max: f64,
}

impl LevelSpec {
    pub fn new(stride: f64, grid_h: usize, grid_w: usize, range_min: f64, range_max: f64) -> Self {
        Self { stride, grid_h, grid_w, range_min, range_max }
    }

    /// Level sized to cover an image of the given dimensions.
    pub fn covering(stride: f64, image_w: f64, image_h: f64, range_min: f64, range_max: f64) -> Self {
        let cells = |d: f64| (d / stride).ceil().max(1.0) as usize;
        Self::new(stride, cells(image_h), cells(image_w), range_min, range_max)
    }

    pub fn sampling_point(&self, row: usize, col: usize) -> Point {
        Point::new((col as f64 + 0.5) * self.stride, (row as f64 + 0.5) * self.stride)
    }

    pub fn num_cells(&self) -> usize {
        self.grid_h * self.grid_w
    }

    /// `P<k>` for power-of-two strides `2^k`, otherwise `S<stride>`.
    pub fn name(&self) -> String {
        let k = self.stride.log2();
        if self.stride >= 1.0 && k.fract() == 0.0 {
            format!("P{}", k as i64)
        } else {
            format!("S{}", self.stride)
        }
    }
}

/// Strides and scale ranges of the default P3–P7 pyramid.
pub const DEFAULT_LEVELS: [(f64, f64, f64); 5] = [
    (8.0, 0.0, 64.0),
    (16.0, 64.0, 128.0),
    (32.0, 128.0, 256.0),
    (64.0, 256.0, 512.0),
    (128.0, 512.0, f64::INFINITY),
];

/// P3–P7 with the default ranges, gridded to cover `image_w × image_h`.
pub fn default_pyramid(image_w: f64, image_h: f64) -> Vec<LevelSpec> {
    DEFAULT_LEVELS
        .iter()
        .map(|&(s, lo, hi)| LevelSpec::covering(s, image_w, image_h, lo, hi))
        .collect()
}

pub fn validate_pyramid(levels: &[LevelSpec]) -> Result<(), AssignError> {
    let bad = |index: usize, reason: &str| Err(AssignError::Level { index, reason: reason.into() });
    for (i, l) in levels.iter().enumerate() {
        if !(l.stride > 0.0 && l.stride.is_finite()) {
            return bad(i, "stride must be positive");
        }
        if l.range_min.is_nan() || l.range_min >= l.range_max || l.range_max.is_nan() {
            return bad(i, "range_min must be below range_max");
        }
        if i > 0 && l.stride <= levels[i - 1].stride {
            return bad(i, "strides must be strictly increasing");
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssignConfig {
    /// Ellipse level `C`; the region is `g(x) >= C`.
    pub c_threshold: f64,
    /// A finer level is added when `short_edge / stride` is below this.
    pub mls_short_ratio: f64,
    /// Sample with the shrunk covariance (long axis pulled in to `sqrt(w·h)`).
    pub use_shrink: bool,
    /// Use the shrunk covariance in `J(x)` as well. Off by default.
    pub shrink_distance: bool,
}

impl Default for AssignConfig {
    fn default() -> Self {
        Self { c_threshold: 0.23, mls_short_ratio: 2.0, use_shrink: true, shrink_distance: false }
    }
}

impl AssignConfig {
    pub fn validate(&self) -> Result<(), AssignError> {
        if !(self.c_threshold >= inscribed_level() - 1e-12 && self.c_threshold <= 1.0) {
            return Err(AssignError::Threshold(self.c_threshold));
        }
        if self.mls_short_ratio.is_nan() || self.mls_short_ratio <= 0.0 {
            return Err(AssignError::ShortRatio(self.mls_short_ratio));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    pub obb: Obb,
    pub class_index: usize,
}

impl GroundTruth {
    pub fn new(obb: Obb, class_index: usize) -> Self {
        Self { obb, class_index }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Positive {
    pub class_index: usize,
    /// Index into the target list given to [`build_assignment`].
    pub target_index: usize,
    pub target: Obb,
    pub j_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Negative,
    Positive(Positive),
}

impl Cell {
    pub fn positive(&self) -> Option<&Positive> {
        match self {
            Cell::Positive(p) => Some(p),
            Cell::Negative => None,
        }
    }
}

/// Labels of one level, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelAssignment {
    pub spec: LevelSpec,
    pub cells: Vec<Cell>,
}

impl LevelAssignment {
    pub fn cell(&self, row: usize, col: usize) -> &Cell {
        &self.cells[row * self.spec.grid_w + col]
    }

    /// `(row, col, label)` for every positive cell, row-major.
    pub fn positives(&self) -> impl Iterator<Item = (usize, usize, &Positive)> + '_ {
        let w = self.spec.grid_w;
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(i, c)| c.positive().map(|p| (i / w, i % w, p)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentMap {
    pub levels: Vec<LevelAssignment>,
}

impl AssignmentMap {
    pub fn num_positive(&self) -> usize {
        self.levels.iter().map(|l| l.positives().count()).sum()
    }

    /// Positive cell count per target.
    pub fn positives_per_target(&self, num_targets: usize) -> Vec<usize> {
        let mut counts = vec![0; num_targets];
        for level in &self.levels {
            for (_, _, p) in level.positives() {
                counts[p.target_index] += 1;
            }
        }
        counts
    }

    /// Targets that received no positive cell on any level.
    pub fn unassigned_targets(&self, num_targets: usize) -> Vec<usize> {
        self.positives_per_target(num_targets)
            .iter()
            .enumerate()
            .filter(|(_, &n)| n == 0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Closed ellipse membership: `g(x) >= C` under the sampling covariance.
pub fn ellipse_region_test(obb: &Obb, x: Point, cfg: &AssignConfig) -> bool {
    obb.to_gaussian(cfg.use_shrink).kernel(x) >= cfg.c_threshold
}

/// Center distance `J(x) = sqrt(w·h)·f(x)` with the unshrunk Gaussian.
pub fn center_distance_j(obb: &Obb, x: Point) -> f64 {
    center_distance_j_with(obb, x, false)
}

pub fn center_distance_j_with(obb: &Obb, x: Point, shrink: bool) -> f64 {
    j_from(obb, &obb.to_gaussian(shrink), x)
}

fn j_from(obb: &Obb, g: &Gaussian2D, x: Point) -> f64 {
    obb.area().sqrt() * g.density(x)
}

/// Pyramid levels a target is trained on, ascending.
///
/// The base level is the first whose `range_max` admits the long edge (the
/// top level when none does). Every level whose `range_max` the long edge
/// exceeds and whose stride is within `mls_short_ratio` of the short edge is
/// added as well.
pub fn assign_levels(obb: &Obb, levels: &[LevelSpec], cfg: &AssignConfig) -> Vec<usize> {
    if levels.is_empty() {
        return Vec::new();
    }
    let long = obb.long_edge();
    let short = obb.short_edge();
    let base = levels.iter().position(|l| long <= l.range_max).unwrap_or(levels.len() - 1);
    let mut out: Vec<usize> = levels
        .iter()
        .enumerate()
        .filter(|(_, l)| short / l.stride < cfg.mls_short_ratio && long > l.range_max)
        .map(|(j, _)| j)
        .collect();
    out.push(base);
    out.sort_unstable();
    out.dedup();
    out
}

struct Candidate<'a> {
    index: usize,
    target: &'a GroundTruth,
    sampling: Gaussian2D,
    distance: Gaussian2D,
    /// Squared half-extents of the ellipse region along x and y.
    reach: (f64, f64),
}

/// Labels every cell of every level.
///
/// Cells outside all candidate ellipses are negative; the rest take the target
/// with the largest `J`, then the smaller area, then the lower index.
pub fn build_assignment(
    targets: &[GroundTruth],
    levels: &[LevelSpec],
    cfg: &AssignConfig,
) -> Result<AssignmentMap, AssignError> {
    cfg.validate()?;
    validate_pyramid(levels)?;

    // g(x) >= C  <=>  (x-μ)ᵀΣ⁻¹(x-μ) <= 2·ln(1/C)
    let radius_sq = 2.0 * (1.0 / cfg.c_threshold).ln();
    let candidates: Vec<Candidate> = targets
        .iter()
        .enumerate()
        .map(|(index, target)| {
            let sampling = target.obb.to_gaussian(cfg.use_shrink);
            Candidate {
                index,
                target,
                sampling,
                distance: target.obb.to_gaussian(cfg.shrink_distance),
                reach: (radius_sq * sampling.sigma.xx, radius_sq * sampling.sigma.yy),
            }
        })
        .collect();
    let level_sets: Vec<Vec<usize>> =
        targets.iter().map(|t| assign_levels(&t.obb, levels, cfg)).collect();

    let mut out = Vec::with_capacity(levels.len());
    for (li, spec) in levels.iter().enumerate() {
        let mut cells = vec![Cell::Negative; spec.num_cells()];
        for cand in candidates.iter().filter(|c| level_sets[c.index].contains(&li)) {
            let (rows, cols) = cell_window(spec, cand);
            for row in rows {
                for col in cols.clone() {
                    let x = spec.sampling_point(row, col);
                    if cand.sampling.kernel(x) < cfg.c_threshold {
                        continue;
                    }
                    let j = j_from(&cand.target.obb, &cand.distance, x);
                    let slot = &mut cells[row * spec.grid_w + col];
                    let wins = match slot {
                        Cell::Negative => true,
                        Cell::Positive(best) => {
                            j > best.j_value
                                || (j == best.j_value && cand.target.obb.area() < best.target.area())
                        }
                    };
                    if wins {
                        *slot = Cell::Positive(Positive {
                            class_index: cand.target.class_index,
                            target_index: cand.index,
                            target: cand.target.obb,
                            j_value: j,
                        });
                    }
                }
            }
        }
        out.push(LevelAssignment { spec: *spec, cells });
    }
    Ok(AssignmentMap { levels: out })
}

/// Cell ranges that can contain points of the candidate's ellipse, padded by
/// one cell on each side.
fn cell_window(spec: &LevelSpec, cand: &Candidate) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
    let mu = cand.sampling.mu;
    let span = |center: f64, reach_sq: f64, n: usize| {
        let half = reach_sq.sqrt();
        let lo = ((center - half) / spec.stride - 0.5).floor() - 1.0;
        let hi = ((center + half) / spec.stride - 0.5).ceil() + 1.0;
        let lo = lo.max(0.0).min(n as f64) as usize;
        let hi = (hi + 1.0).max(0.0).min(n as f64) as usize;
        lo..hi.max(lo)
    };
    (span(mu.y, cand.reach.1, spec.grid_h), span(mu.x, cand.reach.0, spec.grid_w))
}
