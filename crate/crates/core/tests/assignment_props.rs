mod common;

use obbassign::assignment::{
    build_assignment, default_pyramid, ellipse_region_test, inscribed_level, AssignConfig, AssignmentMap,
    GroundTruth, LevelSpec,
};
use obbassign::geometry::{Obb, Point, HALF_PI};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const IMAGE: f64 = 512.0;

fn random_scene(rng: &mut impl Rng, max_targets: usize) -> Vec<GroundTruth> {
    let n = rng.gen_range(0..=max_targets);
    (0..n)
        .map(|i| {
            // Log-uniform sides so every pyramid level and the narrow-target
            // rule get exercised.
            let side = |rng: &mut dyn rand::RngCore| 2f64.powf(rng.gen_range(2.0..9.5));
            let obb = Obb::new(
                rng.gen_range(0.0..IMAGE),
                rng.gen_range(0.0..IMAGE),
                side(rng),
                side(rng),
                rng.gen_range(0.0..std::f64::consts::PI),
            )
            .unwrap();
            GroundTruth::new(obb, i % 4)
        })
        .collect()
}

fn target_grid(map: &AssignmentMap) -> Vec<Vec<Option<usize>>> {
    map.levels
        .iter()
        .map(|l| l.cells.iter().map(|c| c.positive().map(|p| p.target_index)).collect())
        .collect()
}

#[test]
fn matches_brute_force_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let levels = default_pyramid(IMAGE, IMAGE);
    for shrink in [true, false] {
        let cfg = AssignConfig { use_shrink: shrink, ..Default::default() };
        for _ in 0..30 {
            let scene = random_scene(&mut rng, 20);
            let map = build_assignment(&scene, &levels, &cfg).unwrap();
            assert_eq!(target_grid(&map), common::oracle_assignment(&scene, &levels, &cfg));
        }
    }
}

#[test]
fn quarter_turn_permutes_cells() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let levels = default_pyramid(IMAGE, IMAGE);
    let cfg = AssignConfig::default();
    for _ in 0..20 {
        let scene = random_scene(&mut rng, 12);
        // (x, y) -> (y, W - x): a quarter turn of the square image.
        let turned: Vec<GroundTruth> = scene
            .iter()
            .map(|t| {
                let o = t.obb;
                GroundTruth::new(Obb::new(o.cy, IMAGE - o.cx, o.w, o.h, o.theta - HALF_PI).unwrap(), t.class_index)
            })
            .collect();
        let a = build_assignment(&scene, &levels, &cfg).unwrap();
        let b = build_assignment(&turned, &levels, &cfg).unwrap();
        for (la, lb) in a.levels.iter().zip(&b.levels) {
            let n = la.spec.grid_w;
            for r in 0..n {
                for c in 0..n {
                    let ta = la.cell(r, c).positive().map(|p| p.target_index);
                    let tb = lb.cell(n - 1 - c, r).positive().map(|p| p.target_index);
                    assert_eq!(ta, tb);
                }
            }
        }
    }
}

#[test]
fn whole_cell_translation_shifts_cells() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let levels = default_pyramid(IMAGE, IMAGE);
    let cfg = AssignConfig::default();
    let shift = 128.0;
    for _ in 0..20 {
        let scene = random_scene(&mut rng, 12);
        let moved: Vec<GroundTruth> =
            scene.iter().map(|t| GroundTruth::new(t.obb.translated(shift, -shift), t.class_index)).collect();
        let a = build_assignment(&scene, &levels, &cfg).unwrap();
        let b = build_assignment(&moved, &levels, &cfg).unwrap();
        for (la, lb) in a.levels.iter().zip(&b.levels) {
            let d = (shift / la.spec.stride) as isize;
            let n = la.spec.grid_w as isize;
            for r in 0..n {
                for c in 0..n {
                    let (r2, c2) = (r - d, c + d);
                    if r2 < 0 || r2 >= n || c2 < 0 || c2 >= n {
                        continue;
                    }
                    let ta = la.cell(r as usize, c as usize).positive().map(|p| p.target_index);
                    let tb = lb.cell(r2 as usize, c2 as usize).positive().map(|p| p.target_index);
                    assert_eq!(ta, tb);
                }
            }
        }
    }
}

#[test]
fn raising_threshold_never_adds_positives() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let levels = default_pyramid(IMAGE, IMAGE);
    for _ in 0..20 {
        let scene = random_scene(&mut rng, 15);
        let lo = rng.gen_range(inscribed_level()..0.6);
        let hi = rng.gen_range(lo..1.0);
        let a = build_assignment(&scene, &levels, &AssignConfig { c_threshold: lo, ..Default::default() }).unwrap();
        let b = build_assignment(&scene, &levels, &AssignConfig { c_threshold: hi, ..Default::default() }).unwrap();
        for (la, lb) in a.levels.iter().zip(&b.levels) {
            for (ca, cb) in la.cells.iter().zip(&lb.cells) {
                assert!(!(ca.positive().is_none() && cb.positive().is_some()));
            }
        }
    }
}

#[test]
fn positives_lie_inside_their_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let levels = default_pyramid(IMAGE, IMAGE);
    for shrink in [true, false] {
        for c in [inscribed_level(), 0.23, 0.7] {
            let cfg = AssignConfig { c_threshold: c, use_shrink: shrink, ..Default::default() };
            for _ in 0..10 {
                let scene = random_scene(&mut rng, 20);
                let map = build_assignment(&scene, &levels, &cfg).unwrap();
                for level in &map.levels {
                    for (r, col, p) in level.positives() {
                        let x = level.spec.sampling_point(r, col);
                        assert!(p.target.contains(x));
                        assert!(ellipse_region_test(&p.target, x, &cfg));
                    }
                }
            }
        }
    }
}

#[test]
fn shrunk_region_is_subset() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..200 {
        let o = common::random_obb(&mut rng, 100.0, 2.0, 120.0);
        if (o.w - o.h).abs() < 1e-6 {
            continue;
        }
        let c = rng.gen_range(inscribed_level()..1.0);
        let shrunk = AssignConfig { c_threshold: c, use_shrink: true, ..Default::default() };
        let full = AssignConfig { c_threshold: c, use_shrink: false, ..Default::default() };
        for _ in 0..200 {
            let x = o.center() + Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * o.long_edge();
            if ellipse_region_test(&o, x, &shrunk) {
                assert!(ellipse_region_test(&o, x, &full));
            }
        }
    }
}

#[test]
fn identical_across_runs_and_threads() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let scene = random_scene(&mut rng, 20);
    let levels = default_pyramid(IMAGE, IMAGE);
    let cfg = AssignConfig::default();
    let reference = build_assignment(&scene, &levels, &cfg).unwrap();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let scene = scene.clone();
            let levels = levels.clone();
            std::thread::spawn(move || build_assignment(&scene, &levels, &cfg).unwrap())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), reference);
    }
}

#[test]
fn two_box_scene_prefers_small_target() {
    // A court inside a track field, both competing on one level.
    let field = GroundTruth::new(Obb::new(128.0, 128.0, 200.0, 100.0, 0.1).unwrap(), 0);
    let court = GroundTruth::new(Obb::new(140.0, 120.0, 40.0, 20.0, 0.5).unwrap(), 1);
    let level = LevelSpec::new(4.0, 64, 64, 0.0, f64::INFINITY);
    let cfg = AssignConfig::default();
    let map = build_assignment(&[field, court], &[level], &cfg).unwrap();
    let mut inner = 0;
    let mut outer = 0;
    for r in 0..64 {
        for c in 0..64 {
            let x = level.sampling_point(r, c);
            let cell = map.levels[0].cell(r, c).positive().map(|p| p.target_index);
            if ellipse_region_test(&court.obb, x, &cfg) {
                assert_eq!(cell, Some(1));
                inner += 1;
            } else if ellipse_region_test(&field.obb, x, &cfg) {
                assert_eq!(cell, Some(0));
                outer += 1;
            } else {
                assert_eq!(cell, None);
            }
        }
    }
    assert!(inner > 0 && outer > inner);
}
