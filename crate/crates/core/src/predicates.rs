//! Reachability and occlusion facts for every object, grasp and robot.
//!
//! Pick and transfer motions are single straight corridors, so each
//! `(object, grasp, robot)` has exactly one candidate pick volume. A goal
//! placement is certified by probing the region centre and then a 5×5 grid;
//! the first probe whose corridor misses every movable wins, otherwise the
//! probe with the fewest movable occluders.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::world::{Action, GraspId, ObjectId, RegionId, RobotId, Scene};
use crate::{collides, Corridor, Pose, Solid};

pub type PickKey = (ObjectId, GraspId, RobotId);
pub type PlaceKey = (ObjectId, RegionId, GraspId, RobotId);
/// `(object, pick grasp, place grasp, pick robot, place robot)`.
pub type HandoverKey = (ObjectId, GraspId, GraspId, RobotId, RobotId);

/// Witness for a goal placement: the probed pose and its transfer corridor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaceWitness {
    pub pose: Pose,
    pub corridor: Corridor,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FactSet {
    pub reachable_pick: BTreeSet<PickKey>,
    pub reachable_place: BTreeSet<PlaceKey>,
    pub enable_goal_handover: BTreeSet<HandoverKey>,
    /// Movables blocking each reachable pick; present (possibly empty) for every reachable pick.
    pub pick_occluders: BTreeMap<PickKey, BTreeSet<ObjectId>>,
    /// Movables blocking each reachable goal placement.
    pub goal_place_occluders: BTreeMap<PlaceKey, BTreeSet<ObjectId>>,
    pub pick_volumes: BTreeMap<PickKey, Corridor>,
    pub goal_place_volumes: BTreeMap<PlaceKey, PlaceWitness>,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("no facts for action on object {object}")]
pub struct UnknownAction {
    pub object: ObjectId,
}

impl FactSet {
    /// `(occluder, object, grasp, robot)` tuples.
    pub fn occludes_pick(&self) -> impl Iterator<Item = (ObjectId, ObjectId, GraspId, RobotId)> + '_ {
        self.pick_occluders.iter().flat_map(|(&(m, g, r), occ)| occ.iter().map(move |&o| (o, m, g, r)))
    }

    /// `(occluder, object, region, grasp, robot)` tuples.
    pub fn occludes_goal_place(&self) -> impl Iterator<Item = (ObjectId, ObjectId, RegionId, GraspId, RobotId)> + '_ {
        self.goal_place_occluders.iter().flat_map(|(&(m, re, g, r), occ)| occ.iter().map(move |&o| (o, m, re, g, r)))
    }

    /// Pick and place blockers of an action, as read by graph construction.
    pub fn occluders_of(
        &self,
        scene: &Scene,
        action: &Action,
    ) -> Result<(BTreeSet<ObjectId>, BTreeSet<ObjectId>), UnknownAction> {
        let unknown = || UnknownAction { object: action.object };
        let pick = self
            .pick_occluders
            .get(&(action.object, action.pick_grasp, action.pick_robot))
            .ok_or_else(unknown)?
            .clone();
        let place_key = (action.object, action.region, action.place_grasp, action.place_robot);
        if !self.reachable_place.contains(&place_key) {
            return Err(unknown());
        }
        let place = if scene.goal_region(action.object) == Some(action.region) {
            self.goal_place_occluders.get(&place_key).cloned().unwrap_or_default()
        } else {
            BTreeSet::new()
        };
        Ok((pick, place))
    }

    /// Sorted, name-based listing of every fact.
    pub fn dump(&self, scene: &Scene) -> Vec<FactRecord> {
        let o = |id: ObjectId| scene.object(id).name.clone();
        let r = |id: RobotId| scene.robot(id).name.clone();
        let re = |id: RegionId| scene.region(id).name.clone();
        let g = |id: GraspId| id.0.to_string();
        let mut out = Vec::new();
        let mut push = |predicate: &'static str, args: Vec<String>| out.push(FactRecord { predicate, args });
        for &(m, gr, ro) in &self.reachable_pick {
            push("ReachablePick", vec![o(m), g(gr), r(ro)]);
        }
        for &(m, reg, gr, ro) in &self.reachable_place {
            push("ReachablePlace", vec![o(m), re(reg), g(gr), r(ro)]);
        }
        for &(m, g1, g2, r1, r2) in &self.enable_goal_handover {
            push("EnableGoalHandover", vec![o(m), g(g1), g(g2), r(r1), r(r2)]);
        }
        for (m1, m2, gr, ro) in self.occludes_pick() {
            push("OccludesPick", vec![o(m1), o(m2), g(gr), r(ro)]);
        }
        for (m1, m2, reg, gr, ro) in self.occludes_goal_place() {
            push("OccludesGoalPlace", vec![o(m1), o(m2), re(reg), g(gr), r(ro)]);
        }
        out.sort();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FactRecord {
    pub predicate: &'static str,
    pub args: Vec<String>,
}

/// Headings tried for a placement: discs need one, rectangles stay axis-aligned.
pub fn placement_headings(scene: &Scene, obj: ObjectId) -> Vec<f64> {
    match scene.object(obj).shape {
        crate::geom::Shape::Disc { .. } => vec![0.0],
        crate::geom::Shape::Rect { .. } => (0..4).map(|k| std::f64::consts::FRAC_PI_2 * f64::from(k)).collect(),
    }
}

/// Probe poses for placing `obj` in `region`: the centre, then a 5×5 grid
/// over the centres that keep the object inside, row-major, per heading.
pub fn placement_probes(scene: &Scene, obj: ObjectId, region: RegionId) -> Vec<Pose> {
    let rect = scene.region(region).rect;
    let shape = scene.object(obj).shape;
    let mut out = Vec::new();
    for theta in placement_headings(scene, obj) {
        let Some((lo, hi)) = rect.shrink(shape.half_extents(theta)) else { continue };
        let c = rect.center();
        let center = Pose::new(c.x, c.y, theta);
        if rect.contains(&shape, &center) {
            out.push(center);
        }
        for j in 0..5 {
            for i in 0..5 {
                let x = lo.x + (hi.x - lo.x) * f64::from(i) / 4.0;
                let y = lo.y + (hi.y - lo.y) * f64::from(j) / 4.0;
                let p = Pose::new(x, y, theta);
                if rect.contains(&shape, &p) {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn hits_fixed(fixed: &[Solid], s: &Solid) -> bool {
    fixed.iter().any(|f| collides(f, s))
}

fn movable_occluders(scene: &Scene, obj: ObjectId, s: &Solid) -> BTreeSet<ObjectId> {
    scene.object_ids().filter(|o| *o != obj && collides(&scene.initial_solid(*o), s)).collect()
}

/// Best goal-placement witness for `(obj, region, grasp, robot)` and its occluders,
/// or `None` when no probe is reachable and clear of fixed obstacles.
pub fn goal_place_witness(
    scene: &Scene,
    fixed: &[Solid],
    obj: ObjectId,
    region: RegionId,
    g: GraspId,
    r: RobotId,
) -> Option<(PlaceWitness, BTreeSet<ObjectId>)> {
    let mut best: Option<(PlaceWitness, BTreeSet<ObjectId>)> = None;
    for pose in placement_probes(scene, obj, region) {
        let Some(corridor) = place_probe(scene, fixed, obj, &pose, g, r) else { continue };
        let occ = movable_occluders(scene, obj, &Solid::Capsule(corridor));
        let better = best.as_ref().is_none_or(|(_, b)| occ.len() < b.len());
        if better {
            let done = occ.is_empty();
            best = Some((PlaceWitness { pose, corridor }, occ));
            if done {
                break;
            }
        }
    }
    best
}

/// Transfer corridor for placing at `pose`, if reachable and clear of fixed obstacles.
fn place_probe(scene: &Scene, fixed: &[Solid], obj: ObjectId, pose: &Pose, g: GraspId, r: RobotId) -> Option<Corridor> {
    if !scene.robot(r).reaches(scene.contact_point(obj, pose, g)) {
        return None;
    }
    if hits_fixed(fixed, &scene.object_solid(obj, *pose)) {
        return None;
    }
    let corridor = scene.transfer_corridor(r, obj, pose.position());
    (!hits_fixed(fixed, &Solid::Capsule(corridor))).then_some(corridor)
}

fn robot_facts(scene: &Scene, fixed: &[Solid], r: RobotId) -> FactSet {
    let mut f = FactSet::default();
    for m in scene.object_ids() {
        let init = scene.object(m).pose;
        for g in scene.grasps() {
            if scene.robot(r).reaches(scene.contact_point(m, &init, g)) {
                let c = scene.pick_corridor(r, m, &init, g);
                if !hits_fixed(fixed, &Solid::Capsule(c)) {
                    f.reachable_pick.insert((m, g, r));
                    f.pick_occluders.insert((m, g, r), movable_occluders(scene, m, &Solid::Capsule(c)));
                    f.pick_volumes.insert((m, g, r), c);
                }
            }
            for re in (0..scene.regions.len()).map(RegionId) {
                if scene.goal_region(m) == Some(re) {
                    if let Some((w, occ)) = goal_place_witness(scene, fixed, m, re, g, r) {
                        f.reachable_place.insert((m, re, g, r));
                        f.goal_place_occluders.insert((m, re, g, r), occ);
                        f.goal_place_volumes.insert((m, re, g, r), w);
                    }
                } else if placement_probes(scene, m, re).iter().any(|p| place_probe(scene, fixed, m, p, g, r).is_some())
                {
                    f.reachable_place.insert((m, re, g, r));
                }
            }
        }
    }
    f
}

/// Handover legs of both robots, trimmed near the handover point, if they
/// are reachable, clear of fixed obstacles and clear of each other.
fn handover_ok(
    scene: &Scene,
    fixed: &[Solid],
    m: ObjectId,
    g1: GraspId,
    g2: GraspId,
    r1: RobotId,
    r2: RobotId,
) -> bool {
    let held = scene.handover_pose(m, r1, r2);
    if !scene.robot(r1).reaches(scene.contact_point(m, &held, g1))
        || !scene.robot(r2).reaches(scene.contact_point(m, &held, g2))
    {
        return false;
    }
    let h = held.position();
    let leg1 = scene.transfer_corridor(r1, m, h);
    let leg2 = scene.transfer_corridor(r2, m, h);
    if hits_fixed(fixed, &Solid::Capsule(leg1)) || hits_fixed(fixed, &Solid::Capsule(leg2)) {
        return false;
    }
    let radius = scene.handover_radius(r1, r2);
    match (leg1.trimmed_at_end(radius), leg2.trimmed_at_end(radius)) {
        (Some(a), Some(b)) => !collides(&Solid::Capsule(a), &Solid::Capsule(b)),
        _ => true,
    }
}

/// Evaluates every predicate instance for the scene.
pub fn compute_facts(scene: &Scene) -> FactSet {
    let fixed = scene.fixed_solids();
    let parts: Vec<FactSet> =
        scene.robot_ids().collect::<Vec<_>>().into_par_iter().map(|r| robot_facts(scene, &fixed, r)).collect();
    let mut facts = FactSet::default();
    for p in parts {
        facts.reachable_pick.extend(p.reachable_pick);
        facts.reachable_place.extend(p.reachable_place);
        facts.pick_occluders.extend(p.pick_occluders);
        facts.goal_place_occluders.extend(p.goal_place_occluders);
        facts.pick_volumes.extend(p.pick_volumes);
        facts.goal_place_volumes.extend(p.goal_place_volumes);
    }
    for m in scene.goal_objects() {
        for r1 in scene.robot_ids() {
            for r2 in scene.robot_ids().filter(|r2| *r2 != r1) {
                for g1 in scene.grasps() {
                    for g2 in scene.grasps() {
                        if handover_ok(scene, &fixed, m, g1, g2, r1, r2) {
                            facts.enable_goal_handover.insert((m, g1, g2, r1, r2));
                        }
                    }
                }
            }
        }
    }
    facts
}
