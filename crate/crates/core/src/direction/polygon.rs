//! Convex polygons in the angle plane.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

type P = Vector2<f64>;

#[inline]
fn cross(o: &P, a: &P, b: &P) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Counter-clockwise convex polygon without repeated or collinear vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConvexPolygon {
    vertices: Vec<P>,
}

impl ConvexPolygon {
    /// Convex hull of arbitrary points (Andrew's monotone chain).
    pub fn hull(points: &[P]) -> ConvexPolygon {
        let mut pts: Vec<P> = points.iter().copied().filter(|p| p.x.is_finite() && p.y.is_finite()).collect();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() < 3 {
            return ConvexPolygon { vertices: pts };
        }
        let mut lower: Vec<P> = Vec::new();
        for p in &pts {
            while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(*p);
        }
        let mut upper: Vec<P> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(*p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        ConvexPolygon { vertices: lower }
    }

    /// Wraps vertices already known to be in convex CCW order.
    pub fn from_ccw(vertices: Vec<P>) -> ConvexPolygon {
        ConvexPolygon { vertices }
    }

    /// Axis-aligned square of half-width `half` around `center`.
    pub fn square(center: P, half: f64) -> ConvexPolygon {
        ConvexPolygon::from_ccw(vec![
            center + P::new(-half, -half),
            center + P::new(half, -half),
            center + P::new(half, half),
            center + P::new(-half, half),
        ])
    }

    pub fn vertices(&self) -> &[P] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True when the polygon encloses a positive area.
    pub fn is_proper(&self) -> bool {
        self.vertices.len() >= 3 && self.area() > 0.0
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let mut a = 0.0;
        for i in 0..n {
            let p = &self.vertices[i];
            let q = &self.vertices[(i + 1) % n];
            a += p.x * q.y - q.x * p.y;
        }
        0.5 * a
    }

    /// Directed edges `(start, end)` in CCW order; the interior lies to the left.
    pub fn edges(&self) -> impl Iterator<Item = (P, P)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Half-planes `n·p <= c` with unit outward normals, one per edge.
    pub fn half_planes(&self) -> Vec<(P, f64)> {
        self.edges()
            .filter_map(|(a, b)| {
                let e = b - a;
                let len = e.norm();
                (len > 0.0).then(|| {
                    let n = P::new(e.y, -e.x) / len;
                    (n, n.dot(&a))
                })
            })
            .collect()
    }

    /// Point containment; points within `tol` outside an edge count as inside.
    pub fn contains(&self, p: &P, tol: f64) -> bool {
        if self.vertices.len() < 3 {
            return false;
        }
        self.edges().all(|(a, b)| {
            let e = b - a;
            let len = e.norm();
            len == 0.0 || (e.x * (p.y - a.y) - e.y * (p.x - a.x)) / len >= -tol
        })
    }

    /// Smallest signed distance from `p` to the edge lines (positive inside).
    pub fn depth(&self, p: &P) -> f64 {
        self.half_planes()
            .iter()
            .map(|(n, c)| c - n.dot(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn bbox(&self) -> Option<(P, P)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), p| {
            (lo.inf(p), hi.sup(p))
        }))
    }

    pub fn centroid(&self) -> P {
        let n = self.vertices.len().max(1) as f64;
        self.vertices.iter().fold(P::zeros(), |acc, p| acc + p) / n
    }

    /// Keeps the part left of the directed line `a → b`.
    pub fn clip_half_plane(&self, a: &P, b: &P) -> ConvexPolygon {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let s = self.vertices[i];
            let e = self.vertices[(i + 1) % n];
            let sd = cross(a, b, &s);
            let ed = cross(a, b, &e);
            let s_in = sd >= 0.0;
            let e_in = ed >= 0.0;
            if s_in {
                out.push(s);
            }
            if s_in != e_in {
                let t = sd / (sd - ed);
                out.push(s + (e - s) * t);
            }
        }
        // clipping can leave duplicates and collinear points; the hull removes them
        ConvexPolygon::hull(&out)
    }

    /// Intersection with another convex polygon by successive half-plane clips.
    pub fn intersect(&self, other: &ConvexPolygon) -> ConvexPolygon {
        let mut result = self.clone();
        for (a, b) in other.edges() {
            if result.vertices.len() < 3 {
                break;
            }
            result = result.clip_half_plane(&a, &b);
        }
        result
    }
}
