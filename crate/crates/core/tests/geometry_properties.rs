use std::f64::consts::PI;

use collab_tamp::geom::{point_segment_distance, segment_segment_distance};
use collab_tamp::{collides, normalize_angle, swept_corridor, Aabb, Pose, Shape, Solid, Vec2};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![(0.01..0.5f64).prop_map(Shape::disc), (0.01..0.5f64, 0.01..0.5f64).prop_map(|(w, h)| Shape::rect(w, h))]
}

fn solid() -> impl Strategy<Value = Solid> {
    prop_oneof![
        (shape(), coord(), coord(), -PI..PI).prop_map(|(s, x, y, t)| Solid::placed(s, Pose::new(x, y, t))),
        (coord(), coord(), coord(), coord(), 0.01..0.3f64)
            .prop_map(|(ax, ay, bx, by, w)| Solid::Capsule(swept_corridor(Vec2::new(ax, ay), Vec2::new(bx, by), w))),
    ]
}

/// Interior depth that clears the contact tolerance.
const DEPTH: f64 = 1e-5;

/// Whether `p` lies at least `DEPTH` inside the solid.
fn inside(s: &Solid, p: Vec2) -> bool {
    match s {
        Solid::Placed { shape: Shape::Disc { radius }, pose } => p.distance(pose.position()) < *radius - DEPTH,
        Solid::Placed { shape: Shape::Rect { half_w, half_h }, pose } => {
            let l = pose.to_local(p);
            l.x.abs() < *half_w - DEPTH && l.y.abs() < *half_h - DEPTH
        }
        Solid::Capsule(c) => {
            let (a, b) = (c.a, c.b);
            let ab = Vec2::new(b.x - a.x, b.y - a.y);
            let len2 = ab.x * ab.x + ab.y * ab.y;
            let t = if len2 == 0.0 { 0.0 } else { (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0) };
            p.distance(Vec2::new(a.x + t * ab.x, a.y + t * ab.y)) < c.width / 2.0 - DEPTH
        }
    }
}

proptest! {
    #[test]
    fn collision_is_symmetric(a in solid(), b in solid()) {
        prop_assert_eq!(collides(&a, &b), collides(&b, &a));
    }

    #[test]
    fn a_shared_interior_point_means_collision(a in solid(), b in solid(), px in coord(), py in coord()) {
        let p = Vec2::new(px, py);
        if inside(&a, p) && inside(&b, p) {
            prop_assert!(collides(&a, &b));
        }
    }

    #[test]
    fn discs_collide_by_centre_distance(r1 in 0.01..0.5f64, r2 in 0.01..0.5f64, x in coord(), y in coord()) {
        let a = Solid::placed(Shape::disc(r1), Pose::new(0.0, 0.0, 0.0));
        let b = Solid::placed(Shape::disc(r2), Pose::new(x, y, 0.0));
        let gap = (x * x + y * y).sqrt() - r1 - r2;
        if gap.abs() > 1e-9 {
            prop_assert_eq!(collides(&a, &b), gap < 0.0);
        }
    }

    #[test]
    fn segment_distances_are_bounded(ax in coord(), ay in coord(), bx in coord(), by in coord(), px in coord(), py in coord()) {
        let (a, b, p) = (Vec2::new(ax, ay), Vec2::new(bx, by), Vec2::new(px, py));
        let d = point_segment_distance(p, a, b);
        prop_assert!(d >= 0.0);
        prop_assert!(d <= p.distance(a) + 1e-12 && d <= p.distance(b) + 1e-12);
        prop_assert!((segment_segment_distance(p, p, a, b) - d).abs() < 1e-9);
    }

    #[test]
    fn angles_normalize_into_one_turn(t in -50.0..50.0f64) {
        let n = normalize_angle(t);
        prop_assert!((0.0..2.0 * PI).contains(&n));
        prop_assert!(((t - n) / (2.0 * PI) - ((t - n) / (2.0 * PI)).round()).abs() < 1e-9);
    }

    #[test]
    fn contained_shapes_keep_their_extent_inside(s in shape(), x in coord(), y in coord(), t in -PI..PI) {
        let r = Aabb::new(Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0));
        if r.contains(&s, &Pose::new(x, y, t)) {
            let h = s.half_extents(t);
            prop_assert!(x - h.x >= -1.0 - 1e-9 && x + h.x <= 1.0 + 1e-9);
            prop_assert!(y - h.y >= -1.0 - 1e-9 && y + h.y <= 1.0 + 1e-9);
        }
    }
}
