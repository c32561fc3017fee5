//! Vote map over the angle plane for outlier rejection.

use nalgebra::Vector2;

use super::sector::AngleRectangle;

/// Boundary tolerance when testing whether a rectangle contains a point.
pub const CONTAIN_TOL: f64 = 1e-12;

/// Returns the center of the grid cell covered by the most rectangles, and
/// that count.
///
/// Cell centers sit on the fixed lattice `(i + 1/2)·grid_res`, so the answer
/// does not depend on how far the bounding box happens to extend. Ties go to
/// the center closest to the origin, then to the smaller `(x, y)`.
pub fn vote_grid(rects: &[AngleRectangle], grid_res: f64) -> (Vector2<f64>, usize) {
    let boxes: Vec<_> = rects.iter().filter_map(|r| r.corners.bbox()).collect();
    let Some((lo, hi)) = boxes
        .iter()
        .copied()
        .reduce(|(l1, h1), (l2, h2)| (l1.inf(&l2), h1.sup(&h2)))
    else {
        return (Vector2::zeros(), 0);
    };
    let index = |v: f64| (v / grid_res - 0.5).floor() as i64;
    let (ix0, iy0) = (index(lo.x), index(lo.y));
    let (ix1, iy1) = (index(hi.x) + 1, index(hi.y) + 1);
    let nx = (ix1 - ix0 + 1) as usize;
    let ny = (iy1 - iy0 + 1) as usize;
    let center = |ix: i64, iy: i64| Vector2::new((ix as f64 + 0.5) * grid_res, (iy as f64 + 0.5) * grid_res);

    let mut counts = vec![0usize; nx * ny];
    for (rect, (rlo, rhi)) in rects.iter().zip(&boxes) {
        for iy in index(rlo.y)..=index(rhi.y) + 1 {
            for ix in index(rlo.x)..=index(rhi.x) + 1 {
                if rect.contains(&center(ix, iy), CONTAIN_TOL) {
                    counts[(iy - iy0) as usize * nx + (ix - ix0) as usize] += 1;
                }
            }
        }
    }

    let mut best: Option<(usize, Vector2<f64>)> = None;
    for iy in 0..ny {
        for ix in 0..nx {
            let count = counts[iy * nx + ix];
            if count == 0 {
                continue;
            }
            let c = center(ix as i64 + ix0, iy as i64 + iy0);
            let better = match &best {
                None => true,
                Some((bc, bp)) => {
                    count > *bc
                        || (count == *bc
                            && (c.norm() < bp.norm()
                                || (c.norm() == bp.norm() && (c.x, c.y) < (bp.x, bp.y))))
                }
            };
            if better {
                best = Some((count, c));
            }
        }
    }
    match best {
        Some((count, c)) => (c, count),
        None => {
            // every rectangle is thinner than a cell: vote at the first centroid
            let c = rects[0].corners.centroid();
            let count = rects.iter().filter(|r| r.contains(&c, CONTAIN_TOL)).count();
            (c, count)
        }
    }
}

/// Indices of the rectangles containing `cell`, boundary included.
pub fn select_inliers(rects: &[AngleRectangle], cell: &Vector2<f64>) -> Vec<usize> {
    rects
        .iter()
        .enumerate()
        .filter(|(_, r)| r.contains(cell, CONTAIN_TOL))
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::polygon::ConvexPolygon;

    type P = Vector2<f64>;

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64, i: usize) -> AngleRectangle {
        AngleRectangle {
            corners: ConvexPolygon::hull(&[P::new(x0, y0), P::new(x1, y0), P::new(x1, y1), P::new(x0, y1)]),
            step_index: i,
        }
    }

    #[test]
    fn single_rectangle_cell_is_inside() {
        let r = [rect(0.1, 0.2, 0.3, 0.25, 0)];
        let (c, n) = vote_grid(&r, 0.01);
        assert_eq!(n, 1);
        assert!(r[0].contains(&c, 0.0));
    }

    #[test]
    fn tie_goes_to_rectangle_nearest_origin() {
        let r = [rect(0.5, 0.5, 0.7, 0.7, 0), rect(-0.2, -0.1, 0.0, 0.1, 1)];
        let (c, n) = vote_grid(&r, 0.01);
        assert_eq!(n, 1);
        assert!(r[1].contains(&c, 0.0));
        assert!((c.norm() - (0.005f64.powi(2) * 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn overlap_wins_over_outlier() {
        let r = [
            rect(0.0, 0.0, 0.4, 0.4, 0),
            rect(0.2, 0.2, 0.6, 0.6, 1),
            rect(0.1, 0.15, 0.5, 0.3, 2),
            rect(-0.9, -0.9, -0.5, -0.5, 3),
        ];
        let (c, n) = vote_grid(&r, 0.01);
        assert_eq!(n, 3);
        assert_eq!(select_inliers(&r, &c), vec![0, 1, 2]);
    }

    #[test]
    fn thin_rectangle_falls_back_to_centroid() {
        let r = [rect(0.101, 0.101, 0.102, 0.102, 0)];
        let (c, n) = vote_grid(&r, 0.01);
        assert_eq!(n, 1);
        assert!(r[0].contains(&c, 1e-12));
    }

    #[test]
    fn inliers_include_boundary() {
        let r = [rect(0.0, 0.0, 1.0, 1.0, 0), rect(1.0, 0.0, 2.0, 1.0, 1)];
        assert_eq!(select_inliers(&r, &P::new(1.0, 0.5)), vec![0, 1]);
        assert_eq!(select_inliers(&r, &P::new(0.5, 0.5)), vec![0]);
    }
}
