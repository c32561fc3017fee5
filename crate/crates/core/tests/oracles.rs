//! Checks against independent brute-force or hand-computed references.

use compliant_core::compliance::{select_num_axes, stiffness_matrix};
use compliant_core::direction::{
    ang2vec, chebyshev_center, compute_pitch, intersect_rectangles, learn_desired_direction, sector_corners,
    select_inliers, vec2ang, vote_grid, AngleRectangle, ConvexPolygon,
};
use compliant_core::types::{Channel, LearnerConfig, MotionStep};
use compliant_core::{learn_primitive, Demonstration, Frame, Pose, WrenchSample};
use nalgebra::{UnitQuaternion, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

type P = Vector2<f64>;

fn unit(v: Vector3<f64>) -> Option<Vector3<f64>> {
    (v.norm() > 0.0).then(|| v.normalize())
}

fn trans_step(dx: Vector3<f64>, f: Vector3<f64>) -> MotionStep {
    MotionStep {
        dx,
        dbeta: Vector3::zeros(),
        v_hat: unit(dx),
        w_hat: None,
        f_hat: unit(f),
        t_hat: None,
        f_raw: f,
        t_raw: Vector3::zeros(),
    }
}

fn rot_step(db: Vector3<f64>, t: Vector3<f64>) -> MotionStep {
    MotionStep {
        dx: Vector3::zeros(),
        dbeta: db,
        v_hat: None,
        w_hat: unit(db),
        f_hat: None,
        t_hat: unit(t),
        f_raw: Vector3::zeros(),
        t_raw: t,
    }
}

fn random_convex(rng: &mut ChaCha8Rng, center: P, size: f64) -> ConvexPolygon {
    loop {
        let pts: Vec<P> = (0..rng.random_range(3..9))
            .map(|_| center + P::new(rng.random_range(-size..size), rng.random_range(-size..size)))
            .collect();
        let h = ConvexPolygon::hull(&pts);
        if h.is_proper() && h.area() > 0.05 * size * size {
            return h;
        }
    }
}

fn min_edge_distance(poly: &ConvexPolygon, p: &P) -> f64 {
    // distance to the boundary segments, negative outside
    let inside = poly.contains(p, 0.0);
    let d = poly
        .edges()
        .map(|(a, b)| {
            let e = b - a;
            let t = ((p - a).dot(&e) / e.norm_squared()).clamp(0.0, 1.0);
            (a + e * t - p).norm()
        })
        .fold(f64::INFINITY, f64::min);
    if inside {
        d
    } else {
        -d
    }
}

#[test]
fn chebyshev_matches_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let step = 2e-3;
    for _ in 0..15 {
        let poly = random_convex(&mut rng, P::zeros(), 0.2);
        let (c, r) = chebyshev_center(&poly);
        let (lo, hi) = poly.bbox().unwrap();
        let mut best = (P::zeros(), f64::NEG_INFINITY);
        let mut y = lo.y;
        while y <= hi.y {
            let mut x = lo.x;
            while x <= hi.x {
                let p = P::new(x, y);
                let d = min_edge_distance(&poly, &p);
                if d > best.1 {
                    best = (p, d);
                }
                x += step;
            }
            y += step;
        }
        assert!((r - best.1).abs() <= 2.0 * step, "radius {r} vs {}", best.1);
        // the optimum may be non-unique; compare depth at the returned center
        assert!((min_edge_distance(&poly, &c) - r).abs() < 1e-9);
    }
}

#[test]
fn chebyshev_right_triangle_against_grid() {
    let tri = ConvexPolygon::hull(&[P::new(0.0, 0.0), P::new(1.0, 0.0), P::new(0.0, 1.0)]);
    let (c, r) = chebyshev_center(&tri);
    let step = 1e-3;
    let mut best = (P::zeros(), f64::NEG_INFINITY);
    for i in 0..=1000 {
        for j in 0..=(1000 - i) {
            let p = P::new(i as f64 * step, j as f64 * step);
            let d = p.x.min(p.y).min((1.0 - p.x - p.y) / 2f64.sqrt());
            if d > best.1 {
                best = (p, d);
            }
        }
    }
    assert!((r - best.1).abs() < step);
    assert!((c - best.0).norm() < 2.0 * step);
}

#[test]
fn intersection_of_random_quads_is_contained() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let common = P::new(0.1, -0.05);
    let rects: Vec<AngleRectangle> = (0..50)
        .map(|i| {
            // four points around the common point so it stays inside
            let pts: Vec<P> = (0..4)
                .map(|k| {
                    let a = k as f64 * PI / 2.0 + rng.random_range(-0.6..0.6);
                    common + P::new(a.cos(), a.sin()) * rng.random_range(0.05..0.3)
                })
                .collect();
            AngleRectangle {
                corners: ConvexPolygon::hull(&pts),
                step_index: i,
            }
        })
        .collect();
    let refs: Vec<&AngleRectangle> = rects.iter().collect();
    let phi = intersect_rectangles(&refs, &common, 0.01);
    let min_area = rects.iter().map(|r| r.corners.area()).fold(f64::INFINITY, f64::min);
    assert!(phi.area() <= min_area + 1e-12);
    for v in phi.vertices() {
        assert!(rects.iter().all(|r| r.contains(v, 1e-9)));
    }
    let (lo, hi) = rects[0].corners.bbox().unwrap();
    for _ in 0..20000 {
        let p = P::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
        let in_all = rects.iter().all(|r| r.contains(&p, 0.0));
        let margin = rects.iter().map(|r| r.corners.depth(&p).abs()).fold(f64::INFINITY, f64::min);
        if margin > 1e-9 {
            assert_eq!(phi.contains(&p, 0.0), in_all);
        }
    }
}

fn valley_rects(cfg: &LearnerConfig) -> (Vec<AngleRectangle>, UnitQuaternion<f64>) {
    // sliding down either face of a 45 degree valley with friction
    let mu = 0.2;
    let mut steps = Vec::new();
    for k in 0..30 {
        let side = if k % 2 == 0 { 1.0 } else { -1.0 };
        let n = Vector3::new(side, 0.0, 1.0).normalize();
        let down = Vector3::new(side, 0.0, -1.0).normalize();
        let wiggle = 0.02 * (k as f64 - 15.0) / 15.0;
        let motion = (down + Vector3::new(0.0, wiggle, 0.0)).normalize();
        let f = n * 10.0 - motion * (mu * 10.0);
        steps.push(trans_step(motion * 1e-3, f));
    }
    let res = learn_desired_direction(&[steps], Channel::Translation, cfg).unwrap();
    (res.rectangles, res.alignment)
}

#[test]
fn vote_cell_lies_in_common_region_found_by_fine_scan() {
    let cfg = LearnerConfig::default();
    let (rects, _) = valley_rects(&cfg);
    let (cell, count) = vote_grid(&rects, cfg.grid_res);
    assert!(rects.iter().filter(|r| r.contains(&cell, 1e-12)).count() == count);

    let (mut lo, mut hi) = rects[0].corners.bbox().unwrap();
    for r in &rects {
        let (a, b) = r.corners.bbox().unwrap();
        lo = lo.inf(&a);
        hi = hi.sup(&b);
    }
    let fine = cfg.grid_res / 10.0;
    let mut best = 0;
    let mut y = lo.y;
    while y <= hi.y {
        let mut x = lo.x;
        while x <= hi.x {
            let c = rects.iter().filter(|r| r.contains(&P::new(x, y), 0.0)).count();
            best = best.max(c);
            x += fine;
        }
        y += fine;
    }
    assert_eq!(best, rects.len(), "the valley sectors share a common region");
    assert_eq!(count, best);
}

#[test]
fn inliers_with_known_outliers() {
    let p = P::new(0.2, 0.1);
    let mut rects: Vec<AngleRectangle> = (0..40)
        .map(|i| AngleRectangle {
            corners: ConvexPolygon::square(p + P::new(0.01 * (i % 7) as f64, -0.005 * (i % 5) as f64), 0.1),
            step_index: i,
        })
        .collect();
    rects.extend((0..10).map(|i| AngleRectangle {
        corners: ConvexPolygon::square(P::new(-1.0, -1.0 + 0.01 * i as f64), 0.1),
        step_index: 40 + i,
    }));
    let (cell, _) = vote_grid(&rects, 0.01);
    let inl = select_inliers(&rects, &cell);
    let ratio = inl.len() as f64 / rects.len() as f64;
    assert!((ratio - 0.8).abs() <= 1.0 / 50.0 + 1e-12, "ratio {ratio}");
    assert!(inl.iter().all(|&i| i < 40));
}

/// Membership of `d` in the convex cone spanned by the four sector corners.
fn in_cone(corners: &[Vector3<f64>; 4], d: &Vector3<f64>) -> bool {
    // corners come as pairs (a ± d2, m ± d2); cyclic order a+, a-, m-, m+
    let ring = [corners[0], corners[1], corners[3], corners[2]];
    let inner = ring.iter().sum::<Vector3<f64>>();
    (0..4).all(|i| {
        let n = ring[i].cross(&ring[(i + 1) % 4]);
        let s = n.dot(&inner).signum();
        n.dot(d) * s >= -1e-12
    })
}

#[test]
fn floor_slide_direction_matches_cone_brute_force() {
    // pushes forward and down on a floor with mu = 0.1, heading fanned by +-30 deg
    let cfg = LearnerConfig::default();
    let mu = 0.1;
    let mut demos = Vec::new();
    for j in 0..3 {
        let mut steps = Vec::new();
        for k in 0..10 {
            let h = (-30.0 + 60.0 * (j * 10 + k) as f64 / 29.0f64).to_radians();
            let motion = Vector3::new(h.cos(), h.sin(), 0.0);
            let f = Vector3::new(0.0, 0.0, 10.0) - motion * (mu * 10.0);
            steps.push(trans_step(motion * 1e-3, f));
        }
        demos.push(steps);
    }
    let res = learn_desired_direction(&demos, Channel::Translation, &cfg).unwrap();
    assert!(res.inlier_ratio >= 0.9);
    let dir = res.direction.unwrap();

    let (eta, xi) = (cfg.eta_deg.to_radians(), cfg.xi_deg.to_radians());
    let cones: Vec<[Vector3<f64>; 4]> = demos
        .iter()
        .flatten()
        .map(|s| sector_corners(&s.v_hat.unwrap(), &-s.f_hat.unwrap(), eta, xi).unwrap().0)
        .collect();
    // every direction on a 1 deg grid that lies inside all cones
    let mut feasible = Vec::new();
    for i in 0..180 {
        for j in 0..360 {
            let (th, ph) = ((i as f64 + 0.5).to_radians(), (j as f64).to_radians());
            let d = Vector3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos());
            if cones.iter().all(|c| in_cone(c, &d)) {
                feasible.push(d);
            }
        }
    }
    assert!(!feasible.is_empty());
    let nearest = feasible
        .iter()
        .map(|d| d.dot(&dir).clamp(-1.0, 1.0).acos())
        .fold(f64::INFINITY, f64::min);
    assert!(nearest.to_degrees() < 2.0, "{} deg from the feasible set", nearest.to_degrees());
    // the common region lies below the horizon, ahead of the fan
    assert!(dir.z < 0.0 && dir.x > 0.0);
}

#[test]
fn separated_rotation_families_give_no_direction() {
    let cfg = LearnerConfig::default();
    let family = |sign: f64| -> Vec<MotionStep> {
        (0..8)
            .map(|k| {
                let a = (40.0f64 + k as f64).to_radians();
                let axis = Vector3::new(a.cos(), sign * a.sin(), 0.0);
                // resisting torque slightly off the axis
                let t = -(axis + Vector3::new(0.0, 0.0, 0.1)).normalize() * 0.5;
                rot_step(axis * 0.01, t)
            })
            .collect()
    };
    let res = learn_desired_direction(&[family(1.0), family(-1.0)], Channel::Rotation, &cfg).unwrap();
    assert!(res.inlier_ratio < 0.6, "ratio {}", res.inlier_ratio);
    assert!(res.direction.is_none());
}

#[test]
fn consistent_single_demo_has_full_ratio() {
    let cfg = LearnerConfig::default();
    let steps: Vec<_> = (0..10)
        .map(|_| trans_step(Vector3::new(1e-3, 0.0, 0.0), Vector3::new(-1.0, 0.0, 3.0)))
        .collect();
    let res = learn_desired_direction(&[steps], Channel::Translation, &cfg).unwrap();
    assert_eq!(res.inlier_ratio, 1.0);
    assert!(res.direction.is_some());
}

#[test]
fn screw_pitch() {
    let lead = 0.02;
    let steps: Vec<_> = (0..100)
        .map(|_| {
            let db = 2.0 * PI / 100.0;
            MotionStep {
                dx: Vector3::new(0.0, 0.0, lead / 100.0),
                dbeta: Vector3::new(0.0, 0.0, db),
                ..rot_step(Vector3::z(), Vector3::z())
            }
        })
        .collect();
    let p = compute_pitch(&[steps], &LearnerConfig::default()).unwrap();
    let expect = lead / (2.0 * PI);
    assert!((p - expect).abs() / expect < 0.01);
}

/// Independent evaluation of the information criterion for a given rank.
fn hand_bic(means: &[Vector3<f64>], axes: &[Vector3<f64>], sigma: f64) -> f64 {
    let j = means.len() as f64;
    let mut log_l = 0.0;
    for m in means {
        let mut e = *m;
        for a in axes {
            e -= a * a.dot(m);
        }
        log_l += -1.5 * (2.0 * PI * sigma * sigma).ln() - e.norm_squared() / (2.0 * sigma * sigma);
    }
    j.ln() * axes.len() as f64 - 2.0 * log_l
}

#[test]
fn bic_small_means_choose_zero_axes() {
    let means = [
        Vector3::new(0.005, 0.0, 0.002),
        Vector3::new(-0.003, 0.006, 0.0),
        Vector3::new(0.0, -0.004, 0.007),
    ];
    let r = select_num_axes(&means, None, 0.1).unwrap();
    assert_eq!(r.n_axes, 0);
    let b0 = hand_bic(&means, &[], 0.1);
    assert!((r.bic[0].unwrap() - b0).abs() < 1e-9);
    let b1 = hand_bic(&means, &r.eigenvectors[..1], 0.1);
    assert!((r.bic[1].unwrap() - b1).abs() < 1e-9);
    assert!(b0 < b1);
}

#[test]
fn bic_line_picks_one_axis() {
    let means = [Vector3::new(0.3, 0.8, 0.01), Vector3::new(0.3, -0.8, -0.005)];
    let r = select_num_axes(&means, Some(&Vector3::x()), 0.1).unwrap();
    assert_eq!(r.n_axes, 1);
    assert!(r.axes[0].dot(&Vector3::y()).abs() > 2f64.to_radians().cos());
    let scores: Vec<f64> = (0..3).map(|d| hand_bic(&r.means, &r.eigenvectors[..d], 0.1)).collect();
    for d in 0..3 {
        assert!((r.bic[d].unwrap() - scores[d]).abs() < 1e-9);
    }
    assert!(r.bic[3].is_none());
}

#[test]
fn bic_plane_picks_two_axes() {
    let means = [
        Vector3::new(0.1, 0.8, 0.0),
        Vector3::new(-0.2, 0.0, 0.8),
        Vector3::new(0.05, -0.57, -0.57),
    ];
    let r = select_num_axes(&means, Some(&Vector3::x()), 0.1).unwrap();
    assert_eq!(r.n_axes, 2);
    for a in &r.axes {
        assert!(a.dot(&Vector3::x()).abs() < 1e-9);
    }
}

#[test]
fn free_space_push_pipeline() {
    let samples: Vec<WrenchSample> = (0..201)
        .map(|i| WrenchSample {
            t: i as f64 * 0.01,
            pose: Pose::new(Vector3::new(0.0, 5e-4 * i as f64, 0.0), UnitQuaternion::identity()),
            force: Vector3::zeros(),
            torque: Vector3::zeros(),
        })
        .collect();
    let demo = Demonstration {
        id: "push".into(),
        frame: Frame::World,
        samples,
    };
    let cfg = LearnerConfig::default();
    let report = learn_primitive(&[demo], &cfg).unwrap();
    let p = &report.primitive;
    assert!((p.v_d.unwrap() - Vector3::y()).norm() < 1e-9);
    assert_eq!(report.translation.compliance.as_ref().unwrap().n_axes, 0);
    assert_eq!(p.k_f, stiffness_matrix(&[], cfg.stiffness_trans).unwrap());
    assert!(p.w_d.is_none() && report.rotation.stationary);
    assert!(!p.trans_3dof_compliant);
}

#[test]
fn demos_without_motion_have_no_usable_steps() {
    let samples = (0..41)
        .map(|i| WrenchSample {
            t: i as f64 * 0.01,
            pose: Pose::identity(),
            force: Vector3::new(0.0, 0.0, 3.0),
            torque: Vector3::zeros(),
        })
        .collect();
    let demo = Demonstration { id: "still".into(), frame: Frame::World, samples };
    let err = learn_primitive(&[demo], &LearnerConfig::default()).unwrap_err();
    assert!(matches!(err.root(), compliant_core::Error::NoUsableSteps { .. }), "{err}");
    assert!(!err.is_input_error());
}

#[test]
fn projection_round_trip_grid() {
    for i in 0..90 {
        for j in 0..36 {
            let th = (i as f64 * 2.0 + 0.5).to_radians();
            let ph = (j as f64 * 10.0).to_radians();
            let p = Vector3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos());
            let q = ang2vec(&vec2ang(&p).unwrap()).unwrap();
            assert!((p - q).norm() < 1e-9);
        }
    }
}
