//! Reverse-order grounding of task skeletons.
//!
//! Steps are grounded from the last to the first against the actions that
//! already follow them. Placements must keep out of everything the future
//! steps sweep or occupy; motions only need the current world to be clear.
//! When the strict search fails, untouched movables are ignored and the
//! outcome becomes a partial plan naming the objects in the way.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::mip::TaskSkeleton;
use crate::validate::handover_view;
use crate::world::{Action, GroundedJointAction, ObjectId, RobotId, Scene, Trajectory};
use crate::{collides, sample_placement_where, Corridor, Pose, Solid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundingConfig {
    /// Rejection-sampling attempts per object placement.
    pub placement_attempts: usize,
    /// Full-step resamples before a pass gives up.
    pub step_restarts: usize,
}

impl Default for GroundingConfig {
    fn default() -> Self {
        Self { placement_attempts: 100, step_restarts: 10 }
    }
}

/// What is already fixed after the steps being grounded.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundingContext {
    pub s_fut: Vec<GroundedJointAction>,
    pub m_fut: BTreeSet<ObjectId>,
    pub v_fut: Vec<Solid>,
    pub m_out: BTreeSet<ObjectId>,
}

impl GroundingContext {
    /// Context for grounding `skeleton` in front of `s_fut`.
    pub fn from_suffix(scene: &Scene, s_fut: Vec<GroundedJointAction>, skeleton: &TaskSkeleton) -> Self {
        let m_fut: BTreeSet<ObjectId> = s_fut.iter().flat_map(|s| s.moved_objects()).collect();
        let v_fut = s_fut.iter().flat_map(|s| s.occupied_volume(scene)).collect();
        let m_out = scene.object_ids().filter(|o| !m_fut.contains(o) && !skeleton.moved_objects.contains(o)).collect();
        Self { s_fut, m_fut, v_fut, m_out }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroundingOutcome {
    /// Every skeleton step grounded; `steps` is the whole plan, the grounded
    /// skeleton followed by the context suffix.
    Full {
        steps: Vec<GroundedJointAction>,
    },
    /// Grounding stopped at a step that only succeeded with untouched
    /// movables ignored. `steps` is the grounded part followed by the suffix.
    Partial {
        steps: Vec<GroundedJointAction>,
        conflicts: BTreeSet<ObjectId>,
    },
    Failure,
}

impl GroundingOutcome {
    pub fn kind(&self) -> &'static str {
        match self {
            GroundingOutcome::Full { .. } => "full",
            GroundingOutcome::Partial { .. } => "partial",
            GroundingOutcome::Failure => "failure",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroundingError {
    #[error("skeleton refers to an unknown {0}")]
    Unknown(&'static str),
    #[error("object {0} is already moved by a later step")]
    AlreadyMoved(ObjectId),
}

fn check_skeleton(scene: &Scene, skeleton: &TaskSkeleton, ctx: &GroundingContext) -> Result<(), GroundingError> {
    for a in skeleton.steps.iter().flatten() {
        if a.object.0 >= scene.movables.len() {
            return Err(GroundingError::Unknown("object"));
        }
        if a.region.0 >= scene.regions.len() {
            return Err(GroundingError::Unknown("region"));
        }
        if a.pick_robot.0 >= scene.robots.len() || a.place_robot.0 >= scene.robots.len() {
            return Err(GroundingError::Unknown("robot"));
        }
        if a.pick_grasp.0 >= scene.grasp_count || a.place_grasp.0 >= scene.grasp_count {
            return Err(GroundingError::Unknown("grasp"));
        }
        if ctx.m_fut.contains(&a.object) {
            return Err(GroundingError::AlreadyMoved(a.object));
        }
    }
    Ok(())
}

/// Samples a pose for every action's object, in the given order. Each pose
/// lies in the action's region, keeps the place contact reachable, avoids
/// `forbidden` and the poses already chosen for this step.
pub fn find_placements<R: Rng + ?Sized>(
    actions: &[Action],
    forbidden: &[Solid],
    scene: &Scene,
    rng: &mut R,
    cfg: &GroundingConfig,
) -> Option<BTreeMap<ObjectId, Pose>> {
    find_placements_where(actions, forbidden, scene, rng, cfg, |_, _| true)
}

fn find_placements_where<R: Rng + ?Sized>(
    actions: &[Action],
    forbidden: &[Solid],
    scene: &Scene,
    rng: &mut R,
    cfg: &GroundingConfig,
    accept: impl Fn(&Action, &Pose) -> bool,
) -> Option<BTreeMap<ObjectId, Pose>> {
    let mut out = BTreeMap::new();
    let mut avoid = forbidden.to_vec();
    for a in actions {
        let m = scene.object(a.object);
        let pose =
            sample_placement_where(&scene.region(a.region).rect, &m.shape, &avoid, rng, cfg.placement_attempts, |p| {
                scene.action_reachable(a, p) && accept(a, p)
            })?;
        avoid.push(scene.object_solid(a.object, pose));
        out.insert(a.object, pose);
    }
    Some(out)
}

/// Straight motions for every action of a step. Each robot's corridors must
/// miss `obstacles`, the step's other objects and their new placements, and
/// the corridors of every other robot (handover partners may meet near
/// their handover point).
pub fn find_trajectories(
    actions: &[Action],
    placements: &BTreeMap<ObjectId, Pose>,
    obstacles: &[Solid],
    scene: &Scene,
) -> Option<BTreeMap<RobotId, (Trajectory, Trajectory)>> {
    let mut out = BTreeMap::new();
    let mut sweeps: Vec<(RobotId, Action, Vec<Corridor>)> = Vec::new();
    for a in actions {
        let others: Vec<Solid> = actions
            .iter()
            .filter(|b| b.object != a.object)
            .flat_map(|b| [scene.initial_solid(b.object), scene.object_solid(b.object, placements[&b.object])])
            .collect();
        for (r, pick, place) in scene.action_motions(a, &placements[&a.object]) {
            let corridors: Vec<Corridor> = pick.swept.iter().chain(&place.swept).copied().collect();
            let blocked = corridors.iter().any(|c| {
                let cs = Solid::Capsule(*c);
                obstacles.iter().chain(&others).any(|o| collides(&cs, o))
            });
            if blocked {
                return None;
            }
            sweeps.push((r, *a, corridors));
            out.insert(r, (pick, place));
        }
    }
    for (i, (_, a, ci)) in sweeps.iter().enumerate() {
        for (_, b, cj) in &sweeps[i + 1..] {
            let (ci, cj) = if a == b {
                (handover_view(scene, a, ci), handover_view(scene, b, cj))
            } else {
                (ci.clone(), cj.clone())
            };
            if ci.iter().any(|x| cj.iter().any(|y| collides(&Solid::Capsule(*x), &Solid::Capsule(*y)))) {
                return None;
            }
        }
    }
    Some(out)
}

/// Goal objects that still need moving: outside their goal and not in `steps`.
pub fn have_not_been_moved(scene: &Scene, steps: &[GroundedJointAction]) -> BTreeSet<ObjectId> {
    let moved: BTreeSet<ObjectId> = steps.iter().flat_map(|s| s.moved_objects()).collect();
    scene
        .goal_objects()
        .into_iter()
        .filter(|o| !moved.contains(o) && !scene.satisfies_goal(*o, &scene.object(*o).pose))
        .collect()
}

/// Movables not moved in `steps` whose initial pose intersects a corridor
/// or placement footprint of `steps`.
pub fn movables_occlude(scene: &Scene, steps: &[GroundedJointAction]) -> BTreeSet<ObjectId> {
    let moved: BTreeSet<ObjectId> = steps.iter().flat_map(|s| s.moved_objects()).collect();
    let volume: Vec<Solid> = steps.iter().flat_map(|s| s.occupied_volume(scene)).collect();
    scene
        .object_ids()
        .filter(|o| !moved.contains(o))
        .filter(|o| {
            let solid = scene.initial_solid(*o);
            volume.iter().any(|v| collides(&solid, v))
        })
        .collect()
}

struct StepResult {
    step: GroundedJointAction,
    relaxed: bool,
}

/// One pass over a step: placements then motions, restarted as a whole.
fn ground_step<R: Rng + ?Sized>(
    actions: &[Action],
    ctx: &GroundingContext,
    scene: &Scene,
    rng: &mut R,
    cfg: &GroundingConfig,
    relaxed: bool,
) -> Option<GroundedJointAction> {
    let step_objects: BTreeSet<ObjectId> = actions.iter().map(|a| a.object).collect();
    let fixed = scene.fixed_solids();
    let mut world: Vec<Solid> = fixed.clone();
    world.extend(ctx.m_fut.iter().map(|o| scene.initial_solid(*o)));
    if !relaxed {
        world.extend(ctx.m_out.iter().map(|o| scene.initial_solid(*o)));
    }
    // Placements also stay out of the step's objects and the future volume.
    let mut forbidden = world.clone();
    forbidden.extend(step_objects.iter().map(|o| scene.initial_solid(*o)));
    forbidden.extend(ctx.v_fut.iter().copied());

    // Cheap filter: the place robot's own carry corridor must miss the world.
    let carry_clear = |a: &Action, p: &Pose| {
        let c = Solid::Capsule(scene.transfer_corridor(a.place_robot, a.object, p.position()));
        !world.iter().any(|o| collides(&c, o))
    };
    for _ in 0..cfg.step_restarts.max(1) {
        let Some(placements) = find_placements_where(actions, &forbidden, scene, rng, cfg, carry_clear) else {
            continue;
        };
        if find_trajectories(actions, &placements, &world, scene).is_some() {
            let acts: Vec<(Action, Pose)> = actions.iter().map(|a| (*a, placements[&a.object])).collect();
            return Some(GroundedJointAction::from_actions(scene, &acts));
        }
    }
    None
}

fn touches(scene: &Scene, step: &GroundedJointAction, objects: &BTreeSet<ObjectId>) -> bool {
    let volume = step.occupied_volume(scene);
    objects.iter().any(|o| {
        let solid = scene.initial_solid(*o);
        volume.iter().any(|v| collides(&solid, v))
    })
}

fn ground_one<R: Rng + ?Sized>(
    actions: &[Action],
    ctx: &GroundingContext,
    scene: &Scene,
    rng: &mut R,
    cfg: &GroundingConfig,
) -> Option<StepResult> {
    if let Some(step) = ground_step(actions, ctx, scene, rng, cfg, false) {
        return Some(StepResult { step, relaxed: false });
    }
    let step = ground_step(actions, ctx, scene, rng, cfg, true)?;
    // A relaxed sample that happens to miss every untouched movable is a strict one.
    let relaxed = touches(scene, &step, &ctx.m_out);
    Some(StepResult { step, relaxed })
}

/// Grounds `skeleton` in front of the context suffix, last step first.
pub fn ground<R: Rng + ?Sized>(
    skeleton: &TaskSkeleton,
    ctx: &GroundingContext,
    scene: &Scene,
    rng: &mut R,
    cfg: &GroundingConfig,
) -> Result<GroundingOutcome, GroundingError> {
    check_skeleton(scene, skeleton, ctx)?;
    let mut ctx = ctx.clone();
    for actions in skeleton.steps.iter().rev() {
        let mut actions = actions.clone();
        actions.sort();
        let Some(StepResult { step, relaxed }) = ground_one(&actions, &ctx, scene, rng, cfg) else {
            return Ok(GroundingOutcome::Failure);
        };
        ctx.m_fut.extend(step.moved_objects());
        ctx.v_fut.extend(step.occupied_volume(scene));
        ctx.s_fut.insert(0, step);
        if relaxed {
            let mut conflicts = have_not_been_moved(scene, &ctx.s_fut);
            conflicts.extend(movables_occlude(scene, &ctx.s_fut));
            return Ok(GroundingOutcome::Partial { steps: ctx.s_fut, conflicts });
        }
    }
    Ok(GroundingOutcome::Full { steps: ctx.s_fut })
}
