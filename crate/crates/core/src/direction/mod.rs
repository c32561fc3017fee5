//! Desired-direction learning.
//!
//! Every usable step contributes a sector of admissible pushing directions.
//! Sectors are rotated so that the mean motion sits at the pole, flattened to
//! the angle plane, voted on to reject outliers, intersected, and the deepest
//! point of the intersection is mapped back to a 3-D unit vector.

pub mod angle;
pub mod chebyshev;
pub mod polygon;
pub mod sector;
pub mod vote;

use nalgebra::{UnitQuaternion, Vector2, Vector3};
use serde::{Deserialize, Serialize};

pub use angle::{align_to_z, ang2vec, vec2ang};
pub use chebyshev::chebyshev_center;
pub use polygon::ConvexPolygon;
pub use sector::{sector_corners, sector_rectangle, AngleRectangle, Sector};
pub use vote::{select_inliers, vote_grid};

use crate::error::{Error, Result};
use crate::types::{Channel, LearnerConfig, MotionStep};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesiredDirectionResult {
    pub direction: Option<Vector3<f64>>,
    pub inlier_ratio: f64,
    /// Intersection of the inlier rectangles, in the aligned angle plane.
    pub intersection: ConvexPolygon,
    pub chebyshev_center: Vector2<f64>,
    pub chebyshev_radius: f64,
    pub n_rectangles: usize,
    pub n_inliers: usize,
    pub rectangles: Vec<AngleRectangle>,
    pub inliers: Vec<usize>,
    pub vote_cell: Vector2<f64>,
    pub vote_count: usize,
    /// Rotation taking the mean motion direction to +z.
    pub alignment: UnitQuaternion<f64>,
    /// Steps dropped because the wrench pointed along the motion.
    pub n_contrary: usize,
    /// Steps whose motion and reversed wrench were parallel.
    pub n_degenerate: usize,
    /// No step carried a wrench, so the sectors were built around the motion
    /// alone.
    pub free_space: bool,
}

/// Intersects the given rectangles by successive convex clipping. An empty
/// result (possible only through rounding) becomes a `grid_res` square
/// around `cell`.
pub fn intersect_rectangles(rects: &[&AngleRectangle], cell: &Vector2<f64>, grid_res: f64) -> ConvexPolygon {
    let fallback = || ConvexPolygon::square(*cell, 0.5 * grid_res);
    let Some(first) = rects.first() else {
        return fallback();
    };
    let mut phi = first.corners.clone();
    for r in &rects[1..] {
        phi = phi.intersect(&r.corners);
        if !phi.is_proper() {
            return fallback();
        }
    }
    if phi.is_proper() {
        phi
    } else {
        fallback()
    }
}

pub fn learn_desired_direction(
    demos: &[Vec<MotionStep>],
    channel: Channel,
    cfg: &LearnerConfig,
) -> Result<DesiredDirectionResult> {
    let steps: Vec<&MotionStep> = demos.iter().flatten().collect();
    let motions: Vec<Vector3<f64>> = steps.iter().filter_map(|s| s.motion_dir(channel)).collect();
    if motions.len() < 2 {
        return Err(Error::NoUsableSteps { channel });
    }
    let mean = motions.iter().sum::<Vector3<f64>>() / motions.len() as f64;
    let align = align_to_z(&mean);

    let free_space = !steps
        .iter()
        .any(|s| s.motion_dir(channel).is_some() && s.wrench_dir(channel).is_some());

    let mut rectangles = Vec::new();
    let mut n_contrary = 0;
    let mut n_degenerate = 0;
    for (i, s) in steps.iter().enumerate() {
        let Some(motion) = s.motion_dir(channel) else { continue };
        let neg_wrench = match s.wrench_dir(channel) {
            Some(w) => -w,
            None if free_space => motion,
            None => continue,
        };
        match sector::rectangle_from_dirs(&motion, &neg_wrench, i, cfg, &align)? {
            Sector::Rect { rect, degenerate } => {
                n_degenerate += degenerate as usize;
                rectangles.push(rect);
            }
            Sector::Contrary => n_contrary += 1,
        }
    }
    if rectangles.is_empty() {
        return Err(Error::NoUsableSteps { channel });
    }

    let (vote_cell, vote_count) = vote_grid(&rectangles, cfg.grid_res);
    let inliers = select_inliers(&rectangles, &vote_cell);
    let inlier_rects: Vec<&AngleRectangle> = inliers.iter().map(|&i| &rectangles[i]).collect();
    let intersection = intersect_rectangles(&inlier_rects, &vote_cell, cfg.grid_res);
    let (center, radius) = chebyshev_center(&intersection);

    let inlier_ratio = inliers.len() as f64 / rectangles.len() as f64;
    let direction = if inlier_ratio >= cfg.zeta {
        Some((align.inverse() * ang2vec(&center)?).normalize())
    } else {
        None
    };

    Ok(DesiredDirectionResult {
        direction,
        inlier_ratio,
        intersection,
        chebyshev_center: center,
        chebyshev_radius: radius,
        n_rectangles: rectangles.len(),
        n_inliers: inliers.len(),
        rectangles,
        inliers,
        vote_cell,
        vote_count,
        alignment: align,
        n_contrary,
        n_degenerate,
        free_space,
    })
}

/// Total path length `(d_x, d_beta)` over all demonstrations.
pub fn path_lengths(demos: &[Vec<MotionStep>]) -> (f64, f64) {
    demos.iter().flatten().fold((0.0, 0.0), |(x, b), s| {
        (x + s.dx.norm(), b + s.dbeta.norm())
    })
}

/// Meters of translation per radian of rotation.
pub fn compute_pitch(demos: &[Vec<MotionStep>], cfg: &LearnerConfig) -> Result<f64> {
    let (dx, dbeta) = path_lengths(demos);
    if !(dbeta >= cfg.motion_floor_rot) {
        return Err(Error::NoRotation);
    }
    Ok(dx / dbeta)
}
