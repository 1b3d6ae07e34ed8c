//! Independent plan checker.
//!
//! Replays a plan on a copy of the initial object poses and reports every
//! geometric or bookkeeping violation it finds. Only references to
//! entities that do not exist are hard errors; everything else becomes an
//! entry in the report.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::world::{Action, ObjectId, Plan, RobotId, RobotSlot, Scene, Trajectory};
use crate::{collides, Corridor, Pose, Solid};

const KINEMATIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Trajectories match the action and stay within reach.
    Kinematics,
    /// Corridors are collision-free.
    Motion,
    /// Placements are inside their region and collision-free.
    Placement,
    /// Handover corridors meet without mutual overlap away from the handover point.
    Handover,
    Monotonicity,
    Goal,
    Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Zero-based step index; `None` for whole-plan checks.
    pub step: Option<usize>,
    pub condition: Condition,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn fails(&self, c: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == c)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructuralError {
    #[error("step {step}: expected {expected} robot slots, found {found}")]
    SlotCount { step: usize, expected: usize, found: usize },
    #[error("step {step}: {what} index out of range")]
    Dangling { step: usize, what: &'static str },
    #[error("step {step}: slot of robot {robot} holds an action it does not take part in")]
    ForeignSlot { step: usize, robot: usize },
    #[error("step {step}: action on object {object} does not occupy all of its robots' slots")]
    MissingSlot { step: usize, object: usize },
}

fn check_structure(scene: &Scene, plan: &Plan) -> Result<(), StructuralError> {
    for (k, step) in plan.steps.iter().enumerate() {
        if step.slots.len() != scene.robots.len() {
            return Err(StructuralError::SlotCount { step: k, expected: scene.robots.len(), found: step.slots.len() });
        }
        for (i, slot) in step.slots.iter().enumerate() {
            let RobotSlot::Act { action, placement, .. } = slot else { continue };
            let dangling = |what| Err(StructuralError::Dangling { step: k, what });
            if action.object.0 >= scene.movables.len() {
                return dangling("object");
            }
            if action.region.0 >= scene.regions.len() {
                return dangling("region");
            }
            if action.pick_robot.0 >= scene.robots.len() || action.place_robot.0 >= scene.robots.len() {
                return dangling("robot");
            }
            if action.pick_grasp.0 >= scene.grasp_count || action.place_grasp.0 >= scene.grasp_count {
                return dangling("grasp");
            }
            if !action.uses(RobotId(i)) {
                return Err(StructuralError::ForeignSlot { step: k, robot: i });
            }
            for r in action.robots() {
                let same = match &step.slots[r.0] {
                    RobotSlot::Act { action: b, placement: p, .. } => b == action && p == placement,
                    RobotSlot::Wait => false,
                };
                if !same {
                    return Err(StructuralError::MissingSlot { step: k, object: action.object.0 });
                }
            }
        }
    }
    Ok(())
}

fn same_trajectory(a: &Trajectory, b: &Trajectory) -> bool {
    a.is_well_formed()
        && a.swept.len() == b.swept.len()
        && a.swept.iter().zip(&b.swept).all(|(x, y)| {
            x.a.distance(y.a) <= KINEMATIC_TOL
                && x.b.distance(y.b) <= KINEMATIC_TOL
                && (x.width - y.width).abs() <= KINEMATIC_TOL
        })
}

/// Corridors of `robot` as seen by its handover partner: legs ending at the
/// handover point lose the part inside the handover radius.
pub(crate) fn handover_view(scene: &Scene, action: &Action, corridors: &[Corridor]) -> Vec<Corridor> {
    let h = scene.handover_point(action.pick_robot, action.place_robot);
    let radius = scene.handover_radius(action.pick_robot, action.place_robot);
    corridors
        .iter()
        .filter_map(|c| if c.b.distance(h) <= KINEMATIC_TOL { c.trimmed_at_end(radius) } else { Some(*c) })
        .collect()
}

/// Object poses after executing every step of `plan` (no checks).
pub fn replay(scene: &Scene, plan: &Plan) -> Vec<Pose> {
    let mut poses: Vec<Pose> = scene.movables.iter().map(|m| m.pose).collect();
    for step in &plan.steps {
        for (a, p) in step.actions() {
            poses[a.object.0] = p;
        }
    }
    poses
}

pub fn validate_plan(scene: &Scene, plan: &Plan) -> Result<ValidationReport, StructuralError> {
    check_structure(scene, plan)?;
    let name = |o: ObjectId| scene.object(o).name.as_str();
    let robot_name = |r: RobotId| scene.robot(r).name.as_str();
    let mut out = Vec::new();
    let mut poses: Vec<Pose> = scene.movables.iter().map(|m| m.pose).collect();
    let mut moved: BTreeSet<ObjectId> = BTreeSet::new();
    let fixed = scene.fixed_solids();

    for (k, step) in plan.steps.iter().enumerate() {
        let mut flag = |condition, message: String| out.push(Violation { step: Some(k), condition, message });
        let actions = step.actions();
        let mut step_objects = BTreeSet::new();
        for (a, _) in &actions {
            if moved.contains(&a.object) || !step_objects.insert(a.object) {
                flag(Condition::Monotonicity, format!("object `{}` moved more than once", name(a.object)));
            }
        }
        if actions.is_empty() {
            flag(Condition::Metrics, "step has no action".into());
        }

        // Kinematics.
        for (a, p) in &actions {
            if !scene.action_reachable(a, p) {
                flag(Condition::Kinematics, format!("action on `{}` is out of reach", name(a.object)));
            }
            for (r, pick, place) in scene.action_motions(a, p) {
                if let RobotSlot::Act { pick_traj, place_traj, .. } = &step.slots[r.0] {
                    if !same_trajectory(pick_traj, &pick) || !same_trajectory(place_traj, &place) {
                        flag(
                            Condition::Kinematics,
                            format!(
                                "robot `{}` trajectories do not match its action on `{}`",
                                robot_name(r),
                                name(a.object)
                            ),
                        );
                    }
                }
            }
        }

        // Placements.
        for (i, (a, p)) in actions.iter().enumerate() {
            let solid = scene.object_solid(a.object, *p);
            if a.region != scene.target_region(a.object) {
                flag(Condition::Placement, format!("`{}` sent to a region it may not occupy", name(a.object)));
            }
            if !scene.region(a.region).rect.contains(&scene.object(a.object).shape, p) {
                flag(
                    Condition::Placement,
                    format!("`{}` placed outside region `{}`", name(a.object), scene.region(a.region).name),
                );
            }
            for (j, f) in fixed.iter().enumerate() {
                if collides(&solid, f) {
                    flag(Condition::Placement, format!("`{}` placed onto `{}`", name(a.object), scene.fixed_label(j)));
                }
            }
            for o in scene.object_ids().filter(|o| *o != a.object) {
                if collides(&solid, &scene.object_solid(o, poses[o.0])) {
                    flag(Condition::Placement, format!("`{}` placed onto `{}`", name(a.object), name(o)));
                }
            }
            for (b, q) in &actions[i + 1..] {
                if collides(&solid, &scene.object_solid(b.object, *q)) {
                    flag(
                        Condition::Placement,
                        format!("`{}` and `{}` placed on top of each other", name(a.object), name(b.object)),
                    );
                }
            }
        }

        // Motions against the world.
        let per_robot: Vec<Option<(Action, Vec<Corridor>)>> = step
            .slots
            .iter()
            .map(|s| match s {
                RobotSlot::Wait => None,
                RobotSlot::Act { action, pick_traj, place_traj, .. } => {
                    Some((*action, pick_traj.swept.iter().chain(&place_traj.swept).copied().collect()))
                }
            })
            .collect();
        for (i, entry) in per_robot.iter().enumerate() {
            let Some((a, corridors)) = entry else { continue };
            let r = RobotId(i);
            for c in corridors {
                let cs = Solid::Capsule(*c);
                for (j, f) in fixed.iter().enumerate() {
                    if collides(&cs, f) {
                        flag(
                            Condition::Motion,
                            format!("robot `{}` sweeps through `{}`", robot_name(r), scene.fixed_label(j)),
                        );
                    }
                }
                for o in scene.object_ids().filter(|o| *o != a.object) {
                    if collides(&cs, &scene.object_solid(o, poses[o.0])) {
                        flag(Condition::Motion, format!("robot `{}` sweeps through `{}`", robot_name(r), name(o)));
                    }
                }
                for (b, q) in actions.iter().filter(|(b, _)| b.object != a.object) {
                    if collides(&cs, &scene.object_solid(b.object, *q)) {
                        flag(
                            Condition::Motion,
                            format!(
                                "robot `{}` sweeps through the new placement of `{}`",
                                robot_name(r),
                                name(b.object)
                            ),
                        );
                    }
                }
            }
        }

        // Motions against each other.
        for i in 0..per_robot.len() {
            for j in i + 1..per_robot.len() {
                let (Some((a, ci)), Some((b, cj))) = (&per_robot[i], &per_robot[j]) else { continue };
                let partners = a == b;
                let (ci, cj) = if partners {
                    (handover_view(scene, a, ci), handover_view(scene, b, cj))
                } else {
                    (ci.clone(), cj.clone())
                };
                let hit = ci.iter().any(|x| cj.iter().any(|y| collides(&Solid::Capsule(*x), &Solid::Capsule(*y))));
                if hit {
                    let (ri, rj) = (robot_name(RobotId(i)), robot_name(RobotId(j)));
                    if partners {
                        flag(
                            Condition::Handover,
                            format!("robots `{ri}` and `{rj}` overlap away from the handover point"),
                        );
                    } else {
                        flag(Condition::Motion, format!("robots `{ri}` and `{rj}` collide"));
                    }
                }
            }
        }

        for (a, p) in actions {
            poses[a.object.0] = p;
            moved.insert(a.object);
        }
    }

    for (o, re) in &scene.goal {
        if !scene.satisfies_goal(*o, &poses[o.0]) {
            out.push(Violation {
                step: None,
                condition: Condition::Goal,
                message: format!("`{}` does not end inside `{}`", name(*o), scene.region(*re).name),
            });
        }
    }
    if plan.makespan != plan.steps.len() || plan.motion_cost != moved.len() {
        out.push(Violation {
            step: None,
            condition: Condition::Metrics,
            message: format!(
                "stated makespan {} / motion cost {} but plan has {} steps moving {} objects",
                plan.makespan,
                plan.motion_cost,
                plan.steps.len(),
                moved.len()
            ),
        });
    }
    Ok(ValidationReport { valid: out.is_empty(), violations: out })
}
