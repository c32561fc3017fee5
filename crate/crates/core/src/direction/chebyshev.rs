//! Chebyshev center of a convex polygon.
//!
//! The center maximizes `r` subject to `n_i·c + r <= c_i` for every edge
//! half-plane. The LP has three unknowns, so its optimum is attained at a
//! vertex where three constraints are active; all such vertices are
//! enumerated. When the optimal set is a segment (rectangles, strips) its
//! midpoint is returned, found as the mean of the lexicographically
//! smallest and largest optimal vertices.

use nalgebra::{Matrix3, Vector2, Vector3};

use super::polygon::ConvexPolygon;

pub fn chebyshev_center(poly: &ConvexPolygon) -> (Vector2<f64>, f64) {
    let planes = poly.half_planes();
    if planes.len() < 3 {
        return (poly.centroid(), 0.0);
    }
    let scale = poly
        .bbox()
        .map(|(lo, hi)| (hi - lo).amax())
        .unwrap_or(1.0)
        .max(f64::MIN_POSITIVE);
    let feas_tol = 1e-10 * scale;
    let tie_tol = 1e-12 * scale;

    let mut best_r = f64::NEG_INFINITY;
    let mut optimal: Vec<Vector2<f64>> = Vec::new();
    let n = planes.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let rows = [planes[i], planes[j], planes[k]];
                let a = Matrix3::from_fn(|r, c| match c {
                    0 => rows[r].0.x,
                    1 => rows[r].0.y,
                    _ => 1.0,
                });
                let b = Vector3::new(rows[0].1, rows[1].1, rows[2].1);
                let Some(sol) = a.lu().solve(&b) else { continue };
                if !sol.iter().all(|v| v.is_finite()) || sol.z < -feas_tol {
                    continue;
                }
                let c = Vector2::new(sol.x, sol.y);
                let r = sol.z;
                if planes.iter().any(|(nrm, off)| nrm.dot(&c) + r > off + feas_tol) {
                    continue;
                }
                if r > best_r + tie_tol {
                    best_r = r;
                    optimal.clear();
                    optimal.push(c);
                } else if r >= best_r - tie_tol {
                    best_r = best_r.max(r);
                    optimal.push(c);
                }
            }
        }
    }
    let lex = |a: &&Vector2<f64>, b: &&Vector2<f64>| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap();
    match (optimal.iter().min_by(lex), optimal.iter().max_by(lex)) {
        (Some(lo), Some(hi)) => ((lo + hi) / 2.0, best_r.max(0.0)),
        _ => (poly.centroid(), 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Vector2<f64>;

    #[test]
    fn unit_square() {
        let sq = ConvexPolygon::square(P::new(0.5, 0.5), 0.5);
        let (c, r) = chebyshev_center(&sq);
        assert!((c - P::new(0.5, 0.5)).norm() < 1e-12);
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn right_triangle_incenter() {
        let tri = ConvexPolygon::hull(&[P::new(0.0, 0.0), P::new(1.0, 0.0), P::new(0.0, 1.0)]);
        let (c, r) = chebyshev_center(&tri);
        let expect = (2.0 - 2f64.sqrt()) / 2.0;
        assert!((r - expect).abs() < 1e-12);
        assert!((c - P::new(expect, expect)).norm() < 1e-12);
    }

    #[test]
    fn wide_rectangle_takes_middle_of_ridge() {
        let rect = ConvexPolygon::hull(&[P::new(0.0, 0.0), P::new(2.0, 0.0), P::new(2.0, 1.0), P::new(0.0, 1.0)]);
        let (c, r) = chebyshev_center(&rect);
        assert!((r - 0.5).abs() < 1e-12);
        assert!((c - P::new(1.0, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn degenerate_polygon_falls_back_to_centroid() {
        let seg = ConvexPolygon::hull(&[P::new(0.0, 0.0), P::new(1.0, 0.0)]);
        let (c, r) = chebyshev_center(&seg);
        assert_eq!(r, 0.0);
        assert!((c - P::new(0.5, 0.0)).norm() < 1e-12);
    }
}
