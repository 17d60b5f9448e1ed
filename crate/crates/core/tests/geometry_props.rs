mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use obbassign::geometry::{min_area_obb, polygon_iou, Obb, Point, HALF_PI};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn obb_strategy() -> impl Strategy<Value = Obb> {
    (-500.0..500.0, -500.0..500.0, 1.0..200.0, 1.0..200.0, -10.0..10.0f64)
        .prop_map(|(cx, cy, w, h, t)| Obb::new(cx, cy, w, h, t).unwrap())
}

/// Distance between two boxes' parameters, allowing for the (w, h, θ) and
/// (h, w, θ ± π/2) ambiguity at the wrap point.
fn param_distance(a: &Obb, b: &Obb) -> f64 {
    let direct = (a.w - b.w).abs().max((a.h - b.h).abs()).max((a.theta - b.theta).abs());
    let swapped = (a.w - b.h)
        .abs()
        .max((a.h - b.w).abs())
        .max(((a.theta - b.theta).abs() - HALF_PI).abs());
    (a.cx - b.cx).abs().max((a.cy - b.cy).abs()).max(direct.min(swapped))
}

proptest! {
    #[test]
    fn kernel_is_rigid_invariant(o in obb_strategy(), dx in -50.0..50.0f64, dy in -50.0..50.0f64,
                                 rot in -PI..PI, tx in -300.0..300.0f64, ty in -300.0..300.0f64,
                                 shrink in any::<bool>()) {
        let x = o.center() + Point::new(dx, dy);
        let before = o.to_gaussian(shrink).kernel(x);
        let t = Point::new(tx, ty);
        let moved = Obb::new(0.0, 0.0, o.w, o.h, o.theta + rot).unwrap();
        let c = o.center().rotate(rot) + t;
        let moved = moved.translated(c.x, c.y);
        let after = moved.to_gaussian(shrink).kernel(x.rotate(rot) + t);
        prop_assert!((before - after).abs() <= 1e-9, "{before} vs {after}");
    }

    #[test]
    fn kernel_is_scale_invariant(o in obb_strategy(), dx in -50.0..50.0f64, dy in -50.0..50.0f64,
                                 s in 0.1..10.0f64, shrink in any::<bool>()) {
        let before = o.to_gaussian(shrink).kernel(o.center() + Point::new(dx, dy));
        let scaled = Obb::new(o.cx, o.cy, o.w * s, o.h * s, o.theta).unwrap();
        let after = scaled.to_gaussian(shrink).kernel(o.center() + Point::new(dx * s, dy * s));
        prop_assert!((before - after).abs() <= 1e-9);
    }

    #[test]
    fn iou_is_symmetric_and_bounded(a in obb_strategy(), b in obb_strategy()) {
        let (pa, pb) = (a.corners(), b.corners());
        let ab = polygon_iou(&pa, &pb);
        prop_assert_eq!(ab, polygon_iou(&pb, &pa));
        prop_assert!((0.0..=1.0).contains(&ab));
        if pa != pb {
            prop_assert!(ab < 1.0);
        }
    }

    #[test]
    fn min_area_obb_round_trips(o in obb_strategy()) {
        let r = min_area_obb(&o.corners()).unwrap();
        prop_assert!(param_distance(&r, &o) <= 1e-9 * (1.0 + o.long_edge()), "{:?} vs {:?}", r, o);
    }

    #[test]
    fn corners_are_counterclockwise_and_contained(o in obb_strategy()) {
        let c = o.corners();
        prop_assert!(c.signed_area() > 0.0);
        prop_assert!((c.area() - o.area()).abs() <= 1e-9 * o.area());
        for p in c.vertices() {
            prop_assert!(o.contains(*p));
        }
    }
}

#[test]
fn inscribed_contour_touches_edge_midpoints() {
    let c0 = (-1.5f64).exp();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let o = common::random_obb(&mut rng, 100.0, 2.0, 80.0);
        let g = o.to_gaussian(false);
        for (lx, ly) in [(0.5, 0.0), (-0.5, 0.0), (0.0, 0.5), (0.0, -0.5)] {
            let mid = o.to_global(Point::new(lx * o.w, ly * o.h));
            assert!((g.kernel(mid) - c0).abs() < 1e-9);
        }
    }
}

#[test]
fn inscribed_region_lies_inside_box() {
    let c0 = (-1.5f64).exp();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let o = common::random_obb(&mut rng, 100.0, 4.0, 60.0);
        for shrink in [false, true] {
            let g = o.to_gaussian(shrink);
            let reach = o.long_edge();
            let n = 120;
            for i in 0..=n {
                for j in 0..=n {
                    let p = Point::new(
                        o.cx - reach + 2.0 * reach * i as f64 / n as f64,
                        o.cy - reach + 2.0 * reach * j as f64 / n as f64,
                    );
                    if g.kernel(p) >= c0 {
                        assert!(o.contains(p), "{p:?} outside {o:?} (shrink={shrink})");
                    }
                }
            }
        }
    }
}

#[test]
fn iou_matches_sampled_area() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    while checked < 25 {
        let a = common::random_obb(&mut rng, 60.0, 10.0, 80.0);
        let b = common::random_obb(&mut rng, 60.0, 10.0, 80.0);
        let (pa, pb) = (a.corners(), b.corners());
        let exact = polygon_iou(&pa, &pb);
        if exact == 0.0 {
            continue;
        }
        let sampled = common::sampled_iou(&pa, &pb, 1200, &mut rng);
        assert!((exact - sampled).abs() < 1e-3, "{exact} vs {sampled}");
        checked += 1;
    }
}

#[test]
fn quarter_turn_swaps_covariance_axes() {
    let base = Obb::new(0.0, 0.0, 30.0, 8.0, 0.0).unwrap().to_gaussian(false);
    let near = Obb::new(0.0, 0.0, 30.0, 8.0, FRAC_PI_2 - 1e-10).unwrap().to_gaussian(false);
    assert!((near.sigma.xx - base.sigma.yy).abs() < 1e-6);
    assert!((near.sigma.yy - base.sigma.xx).abs() < 1e-6);
}
