use proptest::prelude::*;

use glint::annotate::footprints;
use glint::eval::metrics::iou;
use glint::eval::{focal_loss, smooth_l1, FocalLossParams};
use glint::math::Vec3;
use glint::randomizer::plan::{place_models, placed_box, WallExtent, WallModel, MODEL_GAP};
use glint::randomizer::rng::rng_from_seed;
use glint::scene::environment::sphere_map_uv;
use glint::scene::geometry::{compute_world_aabb, reflect, Transform};
use glint::scene::primitives::teapot;
use glint::{BoundingBox, IdBuffer};

fn unit_vec() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("non-degenerate", |(x, y, z)| x * x + y * y + z * z > 1e-4)
        .prop_map(|(x, y, z)| Vec3::new(x, y, z).normalized())
}

fn bbox() -> impl Strategy<Value = BoundingBox> {
    (0.0..100.0f64, 0.0..100.0f64, 0.5..50.0f64, 0.5..50.0f64).prop_map(|(x, y, w, h)| BoundingBox {
        x_min: x,
        y_min: y,
        x_max: x + w,
        y_max: y + h,
    })
}

proptest! {
    #[test]
    fn reflection_is_an_involution(d in unit_vec(), n in unit_vec()) {
        let r = reflect(d, n);
        prop_assert!((r.length() - 1.0).abs() < 1e-9);
        prop_assert!((r.dot(n) + d.dot(n)).abs() < 1e-9);
        let back = reflect(r, n);
        prop_assert!((back - d).length() < 1e-9);
    }

    #[test]
    fn sphere_map_stays_in_unit_square(d in unit_vec()) {
        let (u, v) = sphere_map_uv(d);
        prop_assert!((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v));
    }

    #[test]
    fn world_box_contains_every_vertex(
        t in (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64),
        r in (0.0..360.0f64, 0.0..360.0f64, 0.0..360.0f64),
        s in (0.1..3.0f64, 0.1..3.0f64, 0.1..3.0f64),
    ) {
        let mesh = teapot();
        let transform = Transform {
            translation: Vec3::new(t.0, t.1, t.2),
            rotation_deg: Vec3::new(r.0, r.1, r.2),
            scale: Vec3::new(s.0, s.1, s.2),
        };
        let b = compute_world_aabb(&mesh, &transform);
        let p = transform.prepare();
        let eps = Vec3::splat(1e-9);
        for &v in &mesh.vertices {
            let w = p.point(v);
            prop_assert!(w.min(b.min - eps) == b.min - eps && w.max(b.max + eps) == b.max + eps);
        }
    }

    #[test]
    fn iou_is_symmetric_and_bounded(a in bbox(), b in bbox()) {
        let ab = iou(&a, &b);
        prop_assert_eq!(ab, iou(&b, &a));
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((iou(&a, &a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn focal_loss_falls_as_confidence_rises(p in 0.001..0.999f64, q in 0.001..0.999f64, gamma in 0.0..5.0f64, alpha in 0.0..1.0f64) {
        let params = FocalLossParams { gamma, alpha };
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let a = focal_loss(lo, true, params).unwrap();
        let b = focal_loss(hi, true, params).unwrap();
        prop_assert!(a >= 0.0 && b >= 0.0);
        prop_assert!(b <= a + 1e-15);
        // A negative at 1 - p sees the same p_t.
        let neg = focal_loss(1.0 - lo, false, FocalLossParams { gamma, alpha: 1.0 - alpha }).unwrap();
        prop_assert!((neg - a).abs() < 1e-9);
    }

    #[test]
    fn smooth_l1_is_bounded_by_l1(x in -10.0..10.0f64, y in -10.0..10.0f64, beta in 0.01..5.0f64) {
        let v = smooth_l1(x, y, beta).unwrap();
        let d = (x - y).abs();
        prop_assert!(v >= 0.0 && v <= d + 1e-12);
        prop_assert!(v >= d - 0.5 * beta - 1e-12);
        prop_assert_eq!(v, smooth_l1(y, x, beta).unwrap());
    }

    #[test]
    fn footprint_boxes_are_tight(seed in any::<u64>(), w in 4u32..24, h in 4u32..24) {
        let mut rng = rng_from_seed(seed);
        let mut ids = IdBuffer::new(w, h);
        for y in 0..h {
            for x in 0..w {
                use rand::Rng;
                ids.set(x, y, rng.random_range(0..4));
            }
        }
        for (id, f) in footprints(&ids) {
            let b = f.bbox();
            prop_assert!(b.within(w, h));
            let inside = |x: u32, y: u32| ids.get(x, y) == id;
            prop_assert!((f.x0..=f.x1).any(|x| inside(x, f.y0)) && (f.x0..=f.x1).any(|x| inside(x, f.y1)));
            prop_assert!((f.y0..=f.y1).any(|y| inside(f.x0, y)) && (f.y0..=f.y1).any(|y| inside(f.x1, y)));
            let count = (0..h).flat_map(|y| (0..w).map(move |x| (x, y))).filter(|&(x, y)| inside(x, y)).count();
            prop_assert_eq!(count as u64, f.pixels);
            for y in 0..h {
                for x in 0..w {
                    if inside(x, y) {
                        prop_assert!(x >= f.x0 && x <= f.x1 && y >= f.y0 && y <= f.y1);
                    }
                }
            }
        }
    }

    #[test]
    fn wall_layouts_fit_and_keep_their_gap(
        seed in any::<u64>(),
        widths in proptest::collection::vec((0.2..1.5f64, 0.2..1.2f64), 1..7),
    ) {
        let models: Vec<WallModel> = widths
            .iter()
            .map(|&(w, h)| WallModel { extent: Vec3::new(w, h, 0.5), mount_height: 0.6 })
            .collect();
        let wall = WallExtent { width: 6.0, height: 3.0 };
        let mut rng = rng_from_seed(seed);
        let Ok(layout) = place_models(&mut rng, &models, wall, 200) else {
            return Ok(());
        };
        let mut boxes: Vec<_> = layout.iter().map(|&(i, t)| placed_box(models[i].extent, t)).collect();
        boxes.sort_by(|a, b| a.min.x.total_cmp(&b.min.x));
        for b in &boxes {
            prop_assert!(b.min.x >= -3.0 && b.max.x <= 3.0 && b.min.y >= 0.0 && b.max.y <= 3.0);
            prop_assert!(b.min.z.abs() < 1e-12);
        }
        for pair in boxes.windows(2) {
            prop_assert!(pair[1].min.x - pair[0].max.x >= MODEL_GAP - 1e-9);
        }
    }
}
