//! Planar geometry kernel: poses, shapes, swept corridors and the collision
//! predicate every other module is built on.
//!
//! All solids are convex: discs, oriented rectangles and capsules (a segment
//! inflated by half its width). Two solids collide only when they overlap
//! with positive area; contact along a boundary is reported as free, with a
//! penetration tolerance given by [`Scalar::contact_tolerance`].

use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2<F> {
    pub x: F,
    pub y: F,
}

impl<F: Scalar> Vec2<F> {
    pub fn new(x: F, y: F) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(F::zero(), F::zero())
    }

    pub fn from_angle(theta: F) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Self) -> F {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Self) -> F {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_sq(self) -> F {
        self.dot(self)
    }

    pub fn norm(self) -> F {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, o: Self) -> F {
        (self - o).norm()
    }

    /// Rotates counter-clockwise by `theta`.
    pub fn rotate(self, theta: F) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn lerp(self, o: Self, t: F) -> Self {
        self + (o - self) * t
    }
}

impl<F: Scalar> Add for Vec2<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<F: Scalar> Sub for Vec2<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<F: Scalar> Mul<F> for Vec2<F> {
    type Output = Self;
    fn mul(self, k: F) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl<F: Scalar> Neg for Vec2<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Normalizes an angle into `[0, 2π)`.
pub fn normalize_angle<F: Scalar>(theta: F) -> F {
    let tau = F::two_pi();
    let mut t = theta % tau;
    if t < F::zero() {
        t = t + tau;
    }
    // `t + tau` can round up to exactly `tau` for tiny negative inputs.
    if t >= tau {
        t = F::zero();
    }
    t
}

/// Position and heading of a rigid body in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose<F> {
    pub x: F,
    pub y: F,
    pub theta: F,
}

impl<F: Scalar> Pose<F> {
    pub fn new(x: F, y: F, theta: F) -> Self {
        Self { x, y, theta: normalize_angle(theta) }
    }

    pub fn at(p: Vec2<F>) -> Self {
        Self::new(p.x, p.y, F::zero())
    }

    pub fn position(&self) -> Vec2<F> {
        Vec2::new(self.x, self.y)
    }

    /// Maps a point from world coordinates into this pose's local frame.
    pub fn to_local(&self, p: Vec2<F>) -> Vec2<F> {
        (p - self.position()).rotate(-self.theta)
    }

    pub fn to_world(&self, p: Vec2<F>) -> Vec2<F> {
        p.rotate(self.theta) + self.position()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape<F> {
    Disc { radius: F },
    Rect { half_w: F, half_h: F },
}

impl<F: Scalar> Shape<F> {
    pub fn disc(radius: F) -> Self {
        Shape::Disc { radius }
    }

    pub fn rect(half_w: F, half_h: F) -> Self {
        Shape::Rect { half_w, half_h }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            Shape::Disc { radius } => radius > F::zero() && radius.is_finite(),
            Shape::Rect { half_w, half_h } => {
                half_w > F::zero() && half_h > F::zero() && half_w.is_finite() && half_h.is_finite()
            }
        }
    }

    /// Radius of the smallest origin-centred disc enclosing the shape.
    pub fn bounding_radius(&self) -> F {
        match *self {
            Shape::Disc { radius } => radius,
            Shape::Rect { half_w, half_h } => (half_w * half_w + half_h * half_h).sqrt(),
        }
    }

    pub fn area(&self) -> F {
        match *self {
            Shape::Disc { radius } => F::PI() * radius * radius,
            Shape::Rect { half_w, half_h } => F::lit(4.0) * half_w * half_h,
        }
    }

    /// Half extents of the world-axis-aligned box around the shape at heading `theta`.
    pub fn half_extents(&self, theta: F) -> Vec2<F> {
        match *self {
            Shape::Disc { radius } => Vec2::new(radius, radius),
            Shape::Rect { half_w, half_h } => {
                let (s, c) = theta.sin_cos();
                let (s, c) = (s.abs(), c.abs());
                Vec2::new(c * half_w + s * half_h, s * half_w + c * half_h)
            }
        }
    }
}

/// Axis-aligned rectangle, used for regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb<F> {
    pub min: Vec2<F>,
    pub max: Vec2<F>,
}

impl<F: Scalar> Aabb<F> {
    pub fn new(min: Vec2<F>, max: Vec2<F>) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> F {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> F {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> F {
        self.width() * self.height()
    }

    pub fn center(&self) -> Vec2<F> {
        self.min.lerp(self.max, F::lit(0.5))
    }

    /// True when `shape` at `pose` lies entirely inside the box.
    pub fn contains(&self, shape: &Shape<F>, pose: &Pose<F>) -> bool {
        let eps = F::contact_tolerance();
        let inside = |p: Vec2<F>| {
            p.x >= self.min.x - eps && p.x <= self.max.x + eps && p.y >= self.min.y - eps && p.y <= self.max.y + eps
        };
        match *shape {
            Shape::Disc { radius } => {
                let c = pose.position();
                inside(Vec2::new(c.x - radius, c.y - radius)) && inside(Vec2::new(c.x + radius, c.y + radius))
            }
            Shape::Rect { half_w, half_h } => rect_corners(half_w, half_h, pose).into_iter().all(inside),
        }
    }

    /// Range of centre positions that keep a box of the given half extents inside.
    pub fn shrink(&self, half: Vec2<F>) -> Option<(Vec2<F>, Vec2<F>)> {
        let lo = Vec2::new(self.min.x + half.x, self.min.y + half.y);
        let hi = Vec2::new(self.max.x - half.x, self.max.y - half.y);
        (lo.x <= hi.x && lo.y <= hi.y).then_some((lo, hi))
    }
}

/// Straight swept volume: the segment from `a` to `b` inflated by `width / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corridor<F> {
    pub a: Vec2<F>,
    pub b: Vec2<F>,
    pub width: F,
}

impl<F: Scalar> Corridor<F> {
    pub fn radius(&self) -> F {
        self.width * F::lit(0.5)
    }

    pub fn length(&self) -> F {
        self.a.distance(self.b)
    }

    pub fn area(&self) -> F {
        let r = self.radius();
        self.length() * self.width + F::PI() * r * r
    }

    pub fn is_degenerate(&self) -> bool {
        self.length() == F::zero()
    }

    /// Drops the part of the corridor within `clearance` plus the corridor
    /// radius of its `b` end. Returns `None` when nothing is left.
    pub fn trimmed_at_end(&self, clearance: F) -> Option<Self> {
        let len = self.length();
        let cut = clearance + self.radius();
        if len <= cut {
            return None;
        }
        let b = self.a.lerp(self.b, (len - cut) / len);
        Some(Self { a: self.a, b, width: self.width })
    }
}

/// Capsule from `from` to `to`; a zero-length segment yields a disc of radius `width / 2`.
pub fn swept_corridor<F: Scalar>(from: Vec2<F>, to: Vec2<F>, width: F) -> Corridor<F> {
    debug_assert!(width > F::zero(), "corridor width must be positive");
    Corridor { a: from, b: to, width }
}

/// Anything the collision predicate accepts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solid<F> {
    Placed { shape: Shape<F>, pose: Pose<F> },
    Capsule(Corridor<F>),
}

impl<F: Scalar> Solid<F> {
    pub fn placed(shape: Shape<F>, pose: Pose<F>) -> Self {
        Solid::Placed { shape, pose }
    }
}

impl<F: Scalar> From<Corridor<F>> for Solid<F> {
    fn from(c: Corridor<F>) -> Self {
        Solid::Capsule(c)
    }
}

pub(crate) fn rect_corners<F: Scalar>(half_w: F, half_h: F, pose: &Pose<F>) -> [Vec2<F>; 4] {
    [Vec2::new(-half_w, -half_h), Vec2::new(half_w, -half_h), Vec2::new(half_w, half_h), Vec2::new(-half_w, half_h)]
        .map(|p| pose.to_world(p))
}

pub fn point_segment_distance<F: Scalar>(p: Vec2<F>, a: Vec2<F>, b: Vec2<F>) -> F {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == F::zero() {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len_sq).max(F::zero()).min(F::one());
    p.distance(a + ab * t)
}

fn segments_intersect<F: Scalar>(p1: Vec2<F>, p2: Vec2<F>, q1: Vec2<F>, q2: Vec2<F>) -> bool {
    let d1 = (p2 - p1).cross(q1 - p1);
    let d2 = (p2 - p1).cross(q2 - p1);
    let d3 = (q2 - q1).cross(p1 - q1);
    let d4 = (q2 - q1).cross(p2 - q1);
    let z = F::zero();
    ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z))
}

pub fn segment_segment_distance<F: Scalar>(p1: Vec2<F>, p2: Vec2<F>, q1: Vec2<F>, q2: Vec2<F>) -> F {
    if segments_intersect(p1, p2, q1, q2) {
        return F::zero();
    }
    point_segment_distance(p1, q1, q2)
        .min(point_segment_distance(p2, q1, q2))
        .min(point_segment_distance(q1, p1, p2))
        .min(point_segment_distance(q2, p1, p2))
}

/// Distance from a point to an origin-centred axis-aligned box (zero inside).
fn point_box_distance<F: Scalar>(p: Vec2<F>, half_w: F, half_h: F) -> F {
    let dx = (p.x.abs() - half_w).max(F::zero());
    let dy = (p.y.abs() - half_h).max(F::zero());
    (dx * dx + dy * dy).sqrt()
}

/// Distance from the segment `a`, `b` to an origin-centred axis-aligned box (zero on overlap).
fn segment_box_distance<F: Scalar>(a: Vec2<F>, b: Vec2<F>, half_w: F, half_h: F) -> F {
    // Slab clipping for the overlap test.
    let d = b - a;
    let mut t0 = F::zero();
    let mut t1 = F::one();
    let mut hits = true;
    for (start, delta, half) in [(a.x, d.x, half_w), (a.y, d.y, half_h)] {
        if delta == F::zero() {
            if start.abs() > half {
                hits = false;
            }
        } else {
            let ta = (-half - start) / delta;
            let tb = (half - start) / delta;
            let (lo, hi) = if ta < tb { (ta, tb) } else { (tb, ta) };
            t0 = t0.max(lo);
            t1 = t1.min(hi);
        }
    }
    if hits && t0 <= t1 {
        return F::zero();
    }
    let corners = [
        Vec2::new(-half_w, -half_h),
        Vec2::new(half_w, -half_h),
        Vec2::new(half_w, half_h),
        Vec2::new(-half_w, half_h),
    ];
    corners
        .iter()
        .map(|&c| point_segment_distance(c, a, b))
        .fold(point_box_distance(a, half_w, half_h).min(point_box_distance(b, half_w, half_h)), F::min)
}

fn rects_overlap<F: Scalar>(a: [Vec2<F>; 4], b: [Vec2<F>; 4], eps: F) -> bool {
    let project = |pts: &[Vec2<F>; 4], axis: Vec2<F>| {
        pts.iter().fold((F::infinity(), F::neg_infinity()), |(lo, hi), p| {
            let d = p.dot(axis);
            (lo.min(d), hi.max(d))
        })
    };
    for pts in [&a, &b] {
        for i in 0..2 {
            let e = pts[i + 1] - pts[i];
            let n = Vec2::new(-e.y, e.x);
            let axis = n * (F::one() / n.norm());
            let (min_a, max_a) = project(&a, axis);
            let (min_b, max_b) = project(&b, axis);
            if max_a - min_b <= eps || max_b - min_a <= eps {
                return false;
            }
        }
    }
    true
}

/// True iff the two solids overlap with positive area.
pub fn collides<F: Scalar>(a: &Solid<F>, b: &Solid<F>) -> bool {
    let eps = F::contact_tolerance();
    match (a, b) {
        (Solid::Placed { shape: sa, pose: pa }, Solid::Placed { shape: sb, pose: pb }) => match (sa, sb) {
            (Shape::Disc { radius: ra }, Shape::Disc { radius: rb }) => {
                pa.position().distance(pb.position()) < *ra + *rb - eps
            }
            (Shape::Disc { radius }, Shape::Rect { half_w, half_h }) => {
                point_box_distance(pb.to_local(pa.position()), *half_w, *half_h) < *radius - eps
            }
            (Shape::Rect { .. }, Shape::Disc { .. }) => collides(b, a),
            (Shape::Rect { half_w: wa, half_h: ha }, Shape::Rect { half_w: wb, half_h: hb }) => {
                rects_overlap(rect_corners(*wa, *ha, pa), rect_corners(*wb, *hb, pb), eps)
            }
        },
        (Solid::Capsule(c), Solid::Placed { shape, pose }) | (Solid::Placed { shape, pose }, Solid::Capsule(c)) => {
            match *shape {
                Shape::Disc { radius } => point_segment_distance(pose.position(), c.a, c.b) < radius + c.radius() - eps,
                Shape::Rect { half_w, half_h } => {
                    segment_box_distance(pose.to_local(c.a), pose.to_local(c.b), half_w, half_h) < c.radius() - eps
                }
            }
        }
        (Solid::Capsule(c), Solid::Capsule(d)) => {
            segment_segment_distance(c.a, c.b, d.a, d.b) < c.radius() + d.radius() - eps
        }
    }
}

/// Candidate headings for sampled placements: discs are rotation-invariant,
/// rectangles stay aligned with the region axes.
fn sample_heading<F: Scalar, R: Rng + ?Sized>(shape: &Shape<F>, rng: &mut R) -> F {
    match shape {
        Shape::Disc { .. } => F::zero(),
        Shape::Rect { .. } => F::FRAC_PI_2() * F::lit(rng.gen_range(0..4) as f64),
    }
}

/// Rejection-samples a pose for `shape` inside `region` that avoids every
/// forbidden solid. Returns `None` after `max_attempts` rejections.
pub fn sample_placement<F: Scalar, R: Rng + ?Sized>(
    region: &Aabb<F>,
    shape: &Shape<F>,
    forbidden: &[Solid<F>],
    rng: &mut R,
    max_attempts: usize,
) -> Option<Pose<F>> {
    sample_placement_where(region, shape, forbidden, rng, max_attempts, |_| true)
}

/// [`sample_placement`] with an extra acceptance test applied to each candidate.
pub fn sample_placement_where<F: Scalar, R: Rng + ?Sized>(
    region: &Aabb<F>,
    shape: &Shape<F>,
    forbidden: &[Solid<F>],
    rng: &mut R,
    max_attempts: usize,
    accept: impl Fn(&Pose<F>) -> bool,
) -> Option<Pose<F>> {
    for _ in 0..max_attempts {
        let theta = sample_heading(shape, rng);
        let Some((lo, hi)) = region.shrink(shape.half_extents(theta)) else {
            continue;
        };
        let u: f64 = rng.gen();
        let v: f64 = rng.gen();
        let pose = Pose::new(lo.x + (hi.x - lo.x) * F::lit(u), lo.y + (hi.y - lo.y) * F::lit(v), theta);
        if !region.contains(shape, &pose) {
            continue;
        }
        let solid = Solid::placed(*shape, pose);
        if forbidden.iter().any(|f| collides(&solid, f)) {
            continue;
        }
        if accept(&pose) {
            return Some(pose);
        }
    }
    None
}
