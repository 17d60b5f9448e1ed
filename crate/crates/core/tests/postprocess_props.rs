mod common;

use obbassign::geometry::{polygon_iou, Obb};
use obbassign::postprocess::{merge_patches, rotated_nms, Detection, PatchOrigin};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn detection() -> impl Strategy<Value = Detection> {
    (0.0..200.0f64, 0.0..200.0f64, 5.0..60.0f64, 5.0..60.0f64, 0.0..3.2f64, 0usize..3, 0.0..1.0f64).prop_map(
        |(cx, cy, w, h, t, c, s)| Detection::new(Obb::new(cx, cy, w, h, t).unwrap(), c, s),
    )
}

fn detections() -> impl Strategy<Value = Vec<Detection>> {
    prop::collection::vec(detection(), 0..60)
}

proptest! {
    #[test]
    fn matches_oracle(dets in detections(), thr in 0.05..0.95f64) {
        prop_assert_eq!(rotated_nms(&dets, thr), common::oracle_nms(&dets, thr));
    }

    #[test]
    fn output_is_subset_with_low_overlap(dets in detections(), thr in 0.05..0.95f64) {
        let out = rotated_nms(&dets, thr);
        for d in &out {
            prop_assert!(dets.contains(d));
        }
        for (i, a) in out.iter().enumerate() {
            for b in &out[i + 1..] {
                if a.class_index == b.class_index {
                    prop_assert!(polygon_iou(&a.obb.corners(), &b.obb.corners()) < thr);
                }
            }
        }
    }

    #[test]
    fn is_idempotent(dets in detections(), thr in 0.05..0.95f64) {
        let once = rotated_nms(&dets, thr);
        prop_assert_eq!(rotated_nms(&once, thr), once);
    }

    #[test]
    fn merge_ignores_patch_order(dets in detections(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut patches: Vec<(PatchOrigin, Vec<Detection>)> = dets
            .chunks(7)
            .map(|c| (PatchOrigin::new(rng.gen_range(0..4) as f64 * 100.0, rng.gen_range(0..4) as f64 * 100.0), c.to_vec()))
            .collect();
        let a = merge_patches(&patches, 0.3, 0.2);
        patches.shuffle(&mut rng);
        prop_assert_eq!(merge_patches(&patches, 0.3, 0.2), a);
    }
}

#[test]
fn merge_translates_and_filters() {
    let d = |s| Detection::new(Obb::new(10.0, 20.0, 8.0, 4.0, 0.2).unwrap(), 0, s);
    let out = merge_patches(&[(PatchOrigin::new(512.0, 0.0), vec![d(0.9), d(0.05)])], 0.5, 0.1);
    assert_eq!(out.len(), 1);
    assert_eq!((out[0].obb.cx, out[0].obb.cy), (522.0, 20.0));
}

#[test]
fn merge_removes_cross_patch_duplicates() {
    // The same object seen from two overlapping patches.
    let obb = Obb::new(600.0, 300.0, 40.0, 20.0, 0.7).unwrap();
    let local = |ox: f64, s| Detection::new(obb.translated(-ox, 0.0), 2, s);
    let out = merge_patches(
        &[(PatchOrigin::new(0.0, 0.0), vec![local(0.0, 0.8)]), (PatchOrigin::new(512.0, 0.0), vec![local(512.0, 0.9)])],
        0.5,
        0.0,
    );
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].score, 0.9);
}
