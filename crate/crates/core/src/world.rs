//! Scene model, robot kinematics and grounded plan types.
//!
//! A robot is a fixed base with a reach annulus. Every arm motion is a
//! straight corridor from the base: a pick corridor of the gripper width to
//! the grasp contact, and a transfer corridor widened by the carried
//! object's diameter. Handovers meet at a per-pair handover point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Aabb, Corridor, Pose, Shape, Solid, Vec2};

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub usize);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(ObjectId, "o");
id_type!(RobotId, "r");
id_type!(RegionId, "re");

/// Index into the `grasp_count` evenly spaced approach angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GraspId(pub u32);

impl fmt::Display for GraspId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

pub const DEFAULT_GRASP_COUNT: u32 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub name: String,
    pub rect: Aabb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedObstacle {
    pub name: Option<String>,
    pub shape: Shape,
    pub pose: Pose,
}

impl FixedObstacle {
    pub fn solid(&self) -> Solid {
        Solid::placed(self.shape, self.pose)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Movable {
    pub name: String,
    pub shape: Shape,
    pub pose: Pose,
    pub home: RegionId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Robot {
    pub name: String,
    pub base: Vec2,
    pub reach_min: f64,
    pub reach_max: f64,
    pub gripper_width: f64,
}

impl Robot {
    pub fn reaches(&self, p: Vec2) -> bool {
        let d = self.base.distance(p);
        d >= self.reach_min && d <= self.reach_max
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("{kind} `{name}`: {reason}")]
    BadEntity { kind: &'static str, name: String, reason: String },
    #[error("movable `{0}` is not inside its home region `{1}`")]
    OutsideHome(String, String),
    #[error("movables `{0}` and `{1}` overlap")]
    MovablesOverlap(String, String),
    #[error("movable `{0}` overlaps fixed obstacle `{1}`")]
    HitsFixed(String, String),
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("object `{0}` appears twice in the goal")]
    DuplicateGoal(String),
    #[error("grasp_count must be at least 1")]
    NoGrasps,
}

/// The planning problem: world geometry, robots and goal.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub regions: Vec<Region>,
    pub fixed: Vec<FixedObstacle>,
    pub movables: Vec<Movable>,
    pub robots: Vec<Robot>,
    /// Overrides keyed by `(lower id, higher id)`.
    pub handover_points: BTreeMap<(RobotId, RobotId), Vec2>,
    pub grasp_count: u32,
    pub goal: Vec<(ObjectId, RegionId)>,
}

fn pair(a: RobotId, b: RobotId) -> (RobotId, RobotId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Scene {
    pub fn object_ids(&self) -> impl Iterator<Item = ObjectId> + '_ {
        (0..self.movables.len()).map(ObjectId)
    }

    pub fn robot_ids(&self) -> impl Iterator<Item = RobotId> + '_ {
        (0..self.robots.len()).map(RobotId)
    }

    pub fn grasps(&self) -> impl Iterator<Item = GraspId> {
        (0..self.grasp_count).map(GraspId)
    }

    pub fn object(&self, id: ObjectId) -> &Movable {
        &self.movables[id.0]
    }

    pub fn robot(&self, id: RobotId) -> &Robot {
        &self.robots[id.0]
    }

    pub fn region(&self, id: RegionId) -> &Region {
        &self.regions[id.0]
    }

    pub fn object_by_name(&self, name: &str) -> Option<ObjectId> {
        self.movables.iter().position(|m| m.name == name).map(ObjectId)
    }

    pub fn robot_by_name(&self, name: &str) -> Option<RobotId> {
        self.robots.iter().position(|r| r.name == name).map(RobotId)
    }

    pub fn region_by_name(&self, name: &str) -> Option<RegionId> {
        self.regions.iter().position(|r| r.name == name).map(RegionId)
    }

    pub fn goal_region(&self, obj: ObjectId) -> Option<RegionId> {
        self.goal.iter().find(|(o, _)| *o == obj).map(|(_, r)| *r)
    }

    pub fn is_goal(&self, obj: ObjectId) -> bool {
        self.goal_region(obj).is_some()
    }

    pub fn goal_objects(&self) -> BTreeSet<ObjectId> {
        self.goal.iter().map(|(o, _)| *o).collect()
    }

    /// Where a move of `obj` must end: its goal region, else its home region.
    pub fn target_region(&self, obj: ObjectId) -> RegionId {
        self.goal_region(obj).unwrap_or(self.object(obj).home)
    }

    pub fn object_solid(&self, obj: ObjectId, pose: Pose) -> Solid {
        Solid::placed(self.object(obj).shape, pose)
    }

    pub fn initial_solid(&self, obj: ObjectId) -> Solid {
        let m = self.object(obj);
        Solid::placed(m.shape, m.pose)
    }

    pub fn fixed_solids(&self) -> Vec<Solid> {
        self.fixed.iter().map(FixedObstacle::solid).collect()
    }

    pub fn fixed_label(&self, i: usize) -> String {
        self.fixed[i].name.clone().unwrap_or_else(|| format!("fixed#{i}"))
    }

    /// True when `obj` at `pose` lies inside its goal region.
    pub fn satisfies_goal(&self, obj: ObjectId, pose: &Pose) -> bool {
        match self.goal_region(obj) {
            Some(re) => self.region(re).rect.contains(&self.object(obj).shape, pose),
            None => true,
        }
    }

    pub fn grasp_angle(&self, g: GraspId) -> f64 {
        std::f64::consts::TAU * f64::from(g.0) / f64::from(self.grasp_count)
    }

    /// Gripper contact on the object's bounding circle for grasp `g`.
    pub fn contact_point(&self, obj: ObjectId, pose: &Pose, g: GraspId) -> Vec2 {
        let rb = self.object(obj).shape.bounding_radius();
        pose.position() + Vec2::from_angle(pose.theta + self.grasp_angle(g)) * rb
    }

    pub fn object_diameter(&self, obj: ObjectId) -> f64 {
        2.0 * self.object(obj).shape.bounding_radius()
    }

    pub fn pick_corridor(&self, r: RobotId, obj: ObjectId, pose: &Pose, g: GraspId) -> Corridor {
        let robot = self.robot(r);
        crate::swept_corridor(robot.base, self.contact_point(obj, pose, g), robot.gripper_width)
    }

    pub fn transfer_width(&self, r: RobotId, obj: ObjectId) -> f64 {
        self.robot(r).gripper_width + self.object_diameter(obj)
    }

    /// Carry corridor from the base to a placement centre.
    pub fn transfer_corridor(&self, r: RobotId, obj: ObjectId, to: Vec2) -> Corridor {
        crate::swept_corridor(self.robot(r).base, to, self.transfer_width(r, obj))
    }

    pub fn handover_point(&self, a: RobotId, b: RobotId) -> Vec2 {
        self.handover_points
            .get(&pair(a, b))
            .copied()
            .unwrap_or_else(|| self.robot(a).base.lerp(self.robot(b).base, 0.5))
    }

    pub fn handover_radius(&self, a: RobotId, b: RobotId) -> f64 {
        self.robot(a).gripper_width.max(self.robot(b).gripper_width)
    }

    /// Pose of the object while it is held at the handover point.
    pub fn handover_pose(&self, obj: ObjectId, a: RobotId, b: RobotId) -> Pose {
        let h = self.handover_point(a, b);
        Pose::new(h.x, h.y, self.object(obj).pose.theta)
    }

    /// Kinematic feasibility of an action independent of any obstacle.
    pub fn action_reachable(&self, action: &Action, placement: &Pose) -> bool {
        let m = action.object;
        let init = self.object(m).pose;
        let pick_robot = self.robot(action.pick_robot);
        let place_robot = self.robot(action.place_robot);
        if !pick_robot.reaches(self.contact_point(m, &init, action.pick_grasp)) {
            return false;
        }
        if !place_robot.reaches(self.contact_point(m, placement, action.place_grasp)) {
            return false;
        }
        if action.is_handover() {
            let held = self.handover_pose(m, action.pick_robot, action.place_robot);
            return pick_robot.reaches(self.contact_point(m, &held, action.pick_grasp))
                && place_robot.reaches(self.contact_point(m, &held, action.place_grasp));
        }
        true
    }

    /// The arm motions that execute `action` with the given placement, one
    /// entry per participating robot, pick robot first.
    pub fn action_motions(&self, action: &Action, placement: &Pose) -> Vec<(RobotId, Trajectory, Trajectory)> {
        let m = action.object;
        let init = self.object(m).pose;
        let contact = self.contact_point(m, &init, action.pick_grasp);
        let r1 = action.pick_robot;
        let b1 = self.robot(r1).base;
        let pick = Trajectory::straight(b1, contact, self.robot(r1).gripper_width);
        if !action.is_handover() {
            let place = Trajectory::straight(b1, placement.position(), self.transfer_width(r1, m));
            return vec![(r1, pick, place)];
        }
        let r2 = action.place_robot;
        let b2 = self.robot(r2).base;
        let h = self.handover_point(r1, r2);
        let give = Trajectory::straight(b1, h, self.transfer_width(r1, m));
        let take = Trajectory::straight(b2, h, self.transfer_width(r2, m));
        let place = Trajectory::straight(b2, placement.position(), self.transfer_width(r2, m));
        vec![(r1, pick, give), (r2, take, place)]
    }

    /// Checks every load-time invariant.
    pub fn check(&self) -> Result<(), SceneError> {
        fn unique<'a>(kind: &'static str, names: impl Iterator<Item = &'a str>) -> Result<(), SceneError> {
            let mut seen = BTreeSet::new();
            for n in names {
                if !seen.insert(n) {
                    return Err(SceneError::DuplicateName { kind, name: n.to_string() });
                }
            }
            Ok(())
        }
        let bad = |kind, name: &str, reason: &str| SceneError::BadEntity {
            kind,
            name: name.to_string(),
            reason: reason.to_string(),
        };
        unique("region", self.regions.iter().map(|r| r.name.as_str()))?;
        unique("object", self.movables.iter().map(|m| m.name.as_str()))?;
        unique("robot", self.robots.iter().map(|r| r.name.as_str()))?;
        if self.grasp_count == 0 {
            return Err(SceneError::NoGrasps);
        }
        for r in &self.regions {
            let finite = [r.rect.min.x, r.rect.min.y, r.rect.max.x, r.rect.max.y].iter().all(|v| v.is_finite());
            if !finite || r.rect.width() <= 0.0 || r.rect.height() <= 0.0 {
                return Err(bad("region", &r.name, "area must be positive"));
            }
        }
        for (i, f) in self.fixed.iter().enumerate() {
            if !f.shape.is_valid() {
                return Err(bad("fixed obstacle", &self.fixed_label(i), "extents must be positive"));
            }
        }
        for r in &self.robots {
            if !(r.reach_min >= 0.0 && r.reach_min < r.reach_max && r.reach_max.is_finite()) {
                return Err(bad("robot", &r.name, "need 0 <= reach_min < reach_max"));
            }
            if !(r.gripper_width > 0.0 && r.gripper_width.is_finite()) {
                return Err(bad("robot", &r.name, "gripper_width must be positive"));
            }
        }
        for (a, b) in self.handover_points.keys() {
            if a.0 >= self.robots.len() || b.0 >= self.robots.len() || a == b {
                return Err(SceneError::UnknownName { kind: "robot pair", name: format!("{a}/{b}") });
            }
        }
        for m in &self.movables {
            if !m.shape.is_valid() {
                return Err(bad("object", &m.name, "extents must be positive"));
            }
            let Some(home) = self.regions.get(m.home.0) else {
                return Err(SceneError::UnknownName { kind: "region", name: m.home.to_string() });
            };
            if !home.rect.contains(&m.shape, &m.pose) {
                return Err(SceneError::OutsideHome(m.name.clone(), home.name.clone()));
            }
        }
        for (i, a) in self.movables.iter().enumerate() {
            let sa = Solid::placed(a.shape, a.pose);
            for b in &self.movables[i + 1..] {
                if crate::collides(&sa, &Solid::placed(b.shape, b.pose)) {
                    return Err(SceneError::MovablesOverlap(a.name.clone(), b.name.clone()));
                }
            }
            for (j, f) in self.fixed.iter().enumerate() {
                if crate::collides(&sa, &f.solid()) {
                    return Err(SceneError::HitsFixed(a.name.clone(), self.fixed_label(j)));
                }
            }
        }
        let mut goal_seen = BTreeSet::new();
        for (o, r) in &self.goal {
            if o.0 >= self.movables.len() {
                return Err(SceneError::UnknownName { kind: "object", name: o.to_string() });
            }
            if r.0 >= self.regions.len() {
                return Err(SceneError::UnknownName { kind: "region", name: r.to_string() });
            }
            if !goal_seen.insert(*o) {
                return Err(SceneError::DuplicateGoal(self.object(*o).name.clone()));
            }
        }
        Ok(())
    }

    /// Copy of the scene restricted to the given robots, in the given order.
    /// Handover overrides between kept robots survive.
    pub fn with_robots(&self, keep: &[RobotId]) -> Scene {
        let remap: BTreeMap<RobotId, RobotId> = keep.iter().enumerate().map(|(i, r)| (*r, RobotId(i))).collect();
        let handover_points = self
            .handover_points
            .iter()
            .filter_map(|((a, b), p)| Some((pair(*remap.get(a)?, *remap.get(b)?), *p)))
            .collect();
        Scene { robots: keep.iter().map(|r| self.robot(*r).clone()).collect(), handover_points, ..self.clone() }
    }
}

/// A pick-and-place action without placement or trajectories.
///
/// Field order gives the canonical ordering used for graph and model indexing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Action {
    pub object: ObjectId,
    pub region: RegionId,
    pub pick_robot: RobotId,
    pub place_robot: RobotId,
    pub pick_grasp: GraspId,
    pub place_grasp: GraspId,
}

impl Action {
    pub fn single(object: ObjectId, region: RegionId, robot: RobotId, grasp: GraspId) -> Self {
        Self { object, region, pick_robot: robot, place_robot: robot, pick_grasp: grasp, place_grasp: grasp }
    }

    pub fn is_handover(&self) -> bool {
        self.pick_robot != self.place_robot
    }

    pub fn uses(&self, r: RobotId) -> bool {
        self.pick_robot == r || self.place_robot == r
    }

    pub fn robots(&self) -> Vec<RobotId> {
        if self.is_handover() {
            vec![self.pick_robot, self.place_robot]
        } else {
            vec![self.pick_robot]
        }
    }
}

/// Straight-line arm motion with its swept volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<Pose>,
    pub swept: Vec<Corridor>,
}

impl Trajectory {
    pub fn straight(from: Vec2, to: Vec2, width: f64) -> Self {
        Self { waypoints: vec![Pose::at(from), Pose::at(to)], swept: vec![crate::swept_corridor(from, to, width)] }
    }

    pub fn start(&self) -> Vec2 {
        self.waypoints[0].position()
    }

    pub fn end(&self) -> Vec2 {
        self.waypoints[self.waypoints.len() - 1].position()
    }

    pub fn is_well_formed(&self) -> bool {
        self.waypoints.len() >= 2
            && self.swept.len() + 1 == self.waypoints.len()
            && self.swept.iter().zip(self.waypoints.windows(2)).all(|(c, w)| {
                c.width > 0.0 && c.a.distance(w[0].position()) < 1e-9 && c.b.distance(w[1].position()) < 1e-9
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RobotSlot {
    Wait,
    Act { action: Action, placement: Pose, pick_traj: Trajectory, place_traj: Trajectory },
}

impl RobotSlot {
    pub fn action(&self) -> Option<&Action> {
        match self {
            RobotSlot::Wait => None,
            RobotSlot::Act { action, .. } => Some(action),
        }
    }
}

/// One time step: a slot per robot, in robot order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundedJointAction {
    pub slots: Vec<RobotSlot>,
}

impl GroundedJointAction {
    /// Builds the step from grounded actions, filling idle robots with `Wait`.
    pub fn from_actions(scene: &Scene, acts: &[(Action, Pose)]) -> Self {
        let mut slots = vec![RobotSlot::Wait; scene.robots.len()];
        for (action, placement) in acts {
            for (r, pick_traj, place_traj) in scene.action_motions(action, placement) {
                slots[r.0] = RobotSlot::Act { action: *action, placement: *placement, pick_traj, place_traj };
            }
        }
        Self { slots }
    }

    /// Distinct actions of the step with their placements, in canonical order.
    pub fn actions(&self) -> Vec<(Action, Pose)> {
        let mut out: BTreeMap<Action, Pose> = BTreeMap::new();
        for s in &self.slots {
            if let RobotSlot::Act { action, placement, .. } = s {
                out.entry(*action).or_insert(*placement);
            }
        }
        out.into_iter().collect()
    }

    pub fn moved_objects(&self) -> BTreeSet<ObjectId> {
        self.slots.iter().filter_map(|s| s.action().map(|a| a.object)).collect()
    }

    /// Every corridor swept in this step, tagged with its robot.
    pub fn corridors(&self) -> Vec<(RobotId, Corridor)> {
        let mut out = Vec::new();
        for (i, s) in self.slots.iter().enumerate() {
            if let RobotSlot::Act { pick_traj, place_traj, .. } = s {
                for c in pick_traj.swept.iter().chain(&place_traj.swept) {
                    out.push((RobotId(i), *c));
                }
            }
        }
        out
    }

    /// Corridors plus placement footprints: the workspace this step occupies.
    pub fn occupied_volume(&self, scene: &Scene) -> Vec<Solid> {
        let mut out: Vec<Solid> = self.corridors().into_iter().map(|(_, c)| Solid::Capsule(c)).collect();
        for (a, p) in self.actions() {
            out.push(scene.object_solid(a.object, p));
        }
        out
    }
}

/// A grounded plan with its quality metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<GroundedJointAction>,
    pub makespan: usize,
    pub motion_cost: usize,
}

impl Plan {
    pub fn new(steps: Vec<GroundedJointAction>) -> Self {
        let moved: BTreeSet<ObjectId> = steps.iter().flat_map(|s| s.moved_objects()).collect();
        Self { makespan: steps.len(), motion_cost: moved.len(), steps }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }

    pub fn handover_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.actions().iter().any(|(a, _)| a.is_handover())).count()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn two_robot_scene() -> Scene {
        Scene {
            regions: vec![
                Region { name: "table".into(), rect: Aabb::new(Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0)) },
                Region { name: "bin".into(), rect: Aabb::new(Vec2::new(1.5, -0.3), Vec2::new(2.1, 0.3)) },
            ],
            fixed: vec![],
            movables: vec![Movable {
                name: "cup".into(),
                shape: Shape::disc(0.05),
                pose: Pose::new(0.3, 0.0, 0.0),
                home: RegionId(0),
            }],
            robots: vec![
                Robot {
                    name: "left".into(),
                    base: Vec2::new(0.0, -0.5),
                    reach_min: 0.1,
                    reach_max: 1.0,
                    gripper_width: 0.04,
                },
                Robot {
                    name: "right".into(),
                    base: Vec2::new(1.8, -0.5),
                    reach_min: 0.1,
                    reach_max: 1.0,
                    gripper_width: 0.06,
                },
            ],
            handover_points: BTreeMap::new(),
            grasp_count: 4,
            goal: vec![(ObjectId(0), RegionId(1))],
        }
    }

    #[test]
    fn default_handover_point_is_base_midpoint() {
        let s = two_robot_scene();
        assert_eq!(s.handover_point(RobotId(0), RobotId(1)), Vec2::new(0.9, -0.5));
        assert_eq!(s.handover_radius(RobotId(1), RobotId(0)), 0.06);
    }

    #[test]
    fn handover_override_is_symmetric() {
        let mut s = two_robot_scene();
        s.handover_points.insert((RobotId(0), RobotId(1)), Vec2::new(0.9, 0.0));
        assert_eq!(s.handover_point(RobotId(1), RobotId(0)), Vec2::new(0.9, 0.0));
    }

    #[test]
    fn contact_points_circle_the_object() {
        let s = two_robot_scene();
        let pose = s.object(ObjectId(0)).pose;
        let c = s.contact_point(ObjectId(0), &pose, GraspId(1));
        assert!((c.x - 0.3).abs() < 1e-12 && (c.y - 0.05).abs() < 1e-12);
    }

    #[test]
    fn handover_motions_meet_at_the_point() {
        let s = two_robot_scene();
        let a = Action {
            object: ObjectId(0),
            region: RegionId(1),
            pick_robot: RobotId(0),
            place_robot: RobotId(1),
            pick_grasp: GraspId(0),
            place_grasp: GraspId(2),
        };
        let motions = s.action_motions(&a, &Pose::new(1.8, 0.0, 0.0));
        assert_eq!(motions.len(), 2);
        let h = s.handover_point(RobotId(0), RobotId(1));
        assert_eq!(motions[0].2.end(), h);
        assert_eq!(motions[1].1.end(), h);
        assert!((motions[1].2.swept[0].width - 0.16).abs() < 1e-12);
        assert!(motions.iter().all(|(_, p, q)| p.is_well_formed() && q.is_well_formed()));
    }

    #[test]
    fn overlapping_movables_are_rejected_by_name() {
        let mut s = two_robot_scene();
        let mut other = s.movables[0].clone();
        other.name = "plate".into();
        other.pose = Pose::new(0.35, 0.0, 0.0);
        s.movables.push(other);
        assert_eq!(s.check(), Err(SceneError::MovablesOverlap("cup".into(), "plate".into())));
    }

    #[test]
    fn robot_restriction_remaps_handover_overrides() {
        let mut s = two_robot_scene();
        s.handover_points.insert((RobotId(0), RobotId(1)), Vec2::new(0.9, 0.0));
        let only = s.with_robots(&[RobotId(1)]);
        assert_eq!(only.robots.len(), 1);
        assert!(only.handover_points.is_empty());
        assert_eq!(only.robots[0].name, "right");
    }

    #[test]
    fn plan_metrics_count_steps_and_objects() {
        let s = two_robot_scene();
        let a = Action::single(ObjectId(0), RegionId(1), RobotId(1), GraspId(0));
        let step = GroundedJointAction::from_actions(&s, &[(a, Pose::new(1.8, 0.0, 0.0))]);
        assert_eq!(step.slots[0], RobotSlot::Wait);
        let plan = Plan::new(vec![step]);
        assert_eq!((plan.makespan, plan.motion_cost), (1, 1));
    }
}
