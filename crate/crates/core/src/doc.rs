//! JSON scene and plan documents.
//!
//! Documents refer to entities by name; the in-memory types use indices.
//! The field layout is frozen by the schema files under `schema/`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::world::{
    Action, FixedObstacle, GraspId, GroundedJointAction, Movable, ObjectId, Plan, Region, RegionId, Robot, RobotId,
    RobotSlot, Scene, SceneError, Trajectory, DEFAULT_GRASP_COUNT,
};
use crate::{Aabb, Corridor, Pose, Shape, Vec2};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error(transparent)]
    Invariant(#[from] SceneError),
    #[error("unknown {kind} `{name}`")]
    Reference { kind: &'static str, name: String },
}

impl From<serde_json::Error> for DocError {
    fn from(e: serde_json::Error) -> Self {
        DocError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseDoc {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub theta: f64,
}

impl From<PoseDoc> for Pose {
    fn from(p: PoseDoc) -> Self {
        Pose::new(p.x, p.y, p.theta)
    }
}

impl From<Pose> for PoseDoc {
    fn from(p: Pose) -> Self {
        PoseDoc { x: p.x, y: p.y, theta: p.theta }
    }
}

fn pt(p: [f64; 2]) -> Vec2 {
    Vec2::new(p[0], p[1])
}

fn arr(p: Vec2) -> [f64; 2] {
    [p.x, p.y]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionDoc {
    pub name: String,
    pub min: [f64; 2],
    pub max: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub shape: Shape,
    pub pose: PoseDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovableDoc {
    pub name: String,
    pub shape: Shape,
    pub pose: PoseDoc,
    pub home: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotDoc {
    pub name: String,
    pub base: [f64; 2],
    pub reach_min: f64,
    pub reach_max: f64,
    pub gripper_width: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HandoverDoc {
    pub robots: [String; 2],
    pub point: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalDoc {
    pub object: String,
    pub region: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDoc {
    pub regions: Vec<RegionDoc>,
    #[serde(default)]
    pub fixed: Vec<FixedDoc>,
    pub movables: Vec<MovableDoc>,
    pub robots: Vec<RobotDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub handover_points: Vec<HandoverDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grasp_count: Option<u32>,
    pub goal: Vec<GoalDoc>,
}

fn lookup<T>(kind: &'static str, name: &str, f: impl Fn(&str) -> Option<T>) -> Result<T, DocError> {
    f(name).ok_or_else(|| DocError::Reference { kind, name: name.to_string() })
}

impl SceneDoc {
    pub fn into_scene(self) -> Result<Scene, DocError> {
        let regions: Vec<Region> =
            self.regions.into_iter().map(|r| Region { name: r.name, rect: Aabb::new(pt(r.min), pt(r.max)) }).collect();
        let region_id = |n: &str| regions.iter().position(|r| r.name == n).map(RegionId);
        let mut movables = Vec::with_capacity(self.movables.len());
        for m in self.movables {
            let home = lookup("region", &m.home, region_id)?;
            movables.push(Movable { name: m.name, shape: m.shape, pose: m.pose.into(), home });
        }
        let robots: Vec<Robot> = self
            .robots
            .into_iter()
            .map(|r| Robot {
                name: r.name,
                base: pt(r.base),
                reach_min: r.reach_min,
                reach_max: r.reach_max,
                gripper_width: r.gripper_width,
            })
            .collect();
        let robot_id = |n: &str| robots.iter().position(|r| r.name == n).map(RobotId);
        let mut handover_points = BTreeMap::new();
        for h in &self.handover_points {
            let a = lookup("robot", &h.robots[0], robot_id)?;
            let b = lookup("robot", &h.robots[1], robot_id)?;
            handover_points.insert((a.min(b), a.max(b)), pt(h.point));
        }
        let object_id = |n: &str| movables.iter().position(|m| m.name == n).map(ObjectId);
        let mut goal = Vec::with_capacity(self.goal.len());
        for g in &self.goal {
            goal.push((lookup("object", &g.object, object_id)?, lookup("region", &g.region, region_id)?));
        }
        let scene = Scene {
            fixed: self
                .fixed
                .into_iter()
                .map(|f| FixedObstacle { name: f.name, shape: f.shape, pose: f.pose.into() })
                .collect(),
            regions,
            movables,
            robots,
            handover_points,
            grasp_count: self.grasp_count.unwrap_or(DEFAULT_GRASP_COUNT),
            goal,
        };
        scene.check()?;
        Ok(scene)
    }

    pub fn from_scene(scene: &Scene) -> Self {
        SceneDoc {
            regions: scene
                .regions
                .iter()
                .map(|r| RegionDoc { name: r.name.clone(), min: arr(r.rect.min), max: arr(r.rect.max) })
                .collect(),
            fixed: scene
                .fixed
                .iter()
                .map(|f| FixedDoc { name: f.name.clone(), shape: f.shape, pose: f.pose.into() })
                .collect(),
            movables: scene
                .movables
                .iter()
                .map(|m| MovableDoc {
                    name: m.name.clone(),
                    shape: m.shape,
                    pose: m.pose.into(),
                    home: scene.region(m.home).name.clone(),
                })
                .collect(),
            robots: scene
                .robots
                .iter()
                .map(|r| RobotDoc {
                    name: r.name.clone(),
                    base: arr(r.base),
                    reach_min: r.reach_min,
                    reach_max: r.reach_max,
                    gripper_width: r.gripper_width,
                })
                .collect(),
            handover_points: scene
                .handover_points
                .iter()
                .map(|((a, b), p)| HandoverDoc {
                    robots: [scene.robot(*a).name.clone(), scene.robot(*b).name.clone()],
                    point: arr(*p),
                })
                .collect(),
            grasp_count: Some(scene.grasp_count),
            goal: scene
                .goal
                .iter()
                .map(|(o, r)| GoalDoc { object: scene.object(*o).name.clone(), region: scene.region(*r).name.clone() })
                .collect(),
        }
    }
}

/// Parses and validates a scene document.
pub fn load_scene(text: &str) -> Result<Scene, DocError> {
    serde_json::from_str::<SceneDoc>(text)?.into_scene()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorridorDoc {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryDoc {
    pub waypoints: Vec<PoseDoc>,
    pub swept: Vec<CorridorDoc>,
}

impl From<&Trajectory> for TrajectoryDoc {
    fn from(t: &Trajectory) -> Self {
        TrajectoryDoc {
            waypoints: t.waypoints.iter().map(|p| (*p).into()).collect(),
            swept: t.swept.iter().map(|c| CorridorDoc { a: arr(c.a), b: arr(c.b), width: c.width }).collect(),
        }
    }
}

impl From<&TrajectoryDoc> for Trajectory {
    fn from(t: &TrajectoryDoc) -> Self {
        Trajectory {
            waypoints: t.waypoints.iter().map(|p| (*p).into()).collect(),
            swept: t.swept.iter().map(|c| Corridor { a: pt(c.a), b: pt(c.b), width: c.width }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActDoc {
    pub object: String,
    pub region: String,
    pub pick_robot: String,
    pub place_robot: String,
    pub pick_grasp: u32,
    pub place_grasp: u32,
    pub placement: PoseDoc,
    pub pick_traj: TrajectoryDoc,
    pub place_traj: TrajectoryDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotDoc {
    pub robot: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub act: Option<ActDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDoc {
    pub steps: Vec<Vec<SlotDoc>>,
    pub makespan: usize,
    pub motion_cost: usize,
}

impl PlanDoc {
    pub fn from_plan(scene: &Scene, plan: &Plan) -> Self {
        let steps = plan
            .steps
            .iter()
            .map(|step| {
                step.slots
                    .iter()
                    .enumerate()
                    .map(|(i, slot)| SlotDoc {
                        robot: scene.robot(RobotId(i)).name.clone(),
                        act: match slot {
                            RobotSlot::Wait => None,
                            RobotSlot::Act { action, placement, pick_traj, place_traj } => Some(ActDoc {
                                object: scene.object(action.object).name.clone(),
                                region: scene.region(action.region).name.clone(),
                                pick_robot: scene.robot(action.pick_robot).name.clone(),
                                place_robot: scene.robot(action.place_robot).name.clone(),
                                pick_grasp: action.pick_grasp.0,
                                place_grasp: action.place_grasp.0,
                                placement: (*placement).into(),
                                pick_traj: pick_traj.into(),
                                place_traj: place_traj.into(),
                            }),
                        },
                    })
                    .collect()
            })
            .collect();
        PlanDoc { steps, makespan: plan.makespan, motion_cost: plan.motion_cost }
    }

    /// Resolves names against `scene`. Slot order follows the robot order of
    /// the scene; a slot naming the wrong robot is a reference error.
    /// The stated metrics are kept as written so the validator can check them.
    pub fn into_plan(self, scene: &Scene) -> Result<Plan, DocError> {
        let mut steps = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let mut slots = Vec::with_capacity(step.len());
            for (i, s) in step.iter().enumerate() {
                let r = lookup("robot", &s.robot, |n| scene.robot_by_name(n))?;
                if r.0 != i {
                    return Err(DocError::Reference { kind: "robot slot", name: s.robot.clone() });
                }
                slots.push(match &s.act {
                    None => RobotSlot::Wait,
                    Some(a) => {
                        let action = Action {
                            object: lookup("object", &a.object, |n| scene.object_by_name(n))?,
                            region: lookup("region", &a.region, |n| scene.region_by_name(n))?,
                            pick_robot: lookup("robot", &a.pick_robot, |n| scene.robot_by_name(n))?,
                            place_robot: lookup("robot", &a.place_robot, |n| scene.robot_by_name(n))?,
                            pick_grasp: GraspId(a.pick_grasp),
                            place_grasp: GraspId(a.place_grasp),
                        };
                        RobotSlot::Act {
                            action,
                            placement: a.placement.into(),
                            pick_traj: (&a.pick_traj).into(),
                            place_traj: (&a.place_traj).into(),
                        }
                    }
                });
            }
            steps.push(GroundedJointAction { slots });
        }
        Ok(Plan { steps, makespan: self.makespan, motion_cost: self.motion_cost })
    }
}

pub fn plan_to_json(scene: &Scene, plan: &Plan) -> String {
    let mut s = serde_json::to_string_pretty(&PlanDoc::from_plan(scene, plan)).expect("plan serializes");
    s.push('\n');
    s
}

pub fn parse_plan(scene: &Scene, text: &str) -> Result<Plan, DocError> {
    serde_json::from_str::<PlanDoc>(text)?.into_plan(scene)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "regions": [{"name": "table", "min": [0, 0], "max": [1, 1]}],
        "movables": [{"name": "cup", "shape": {"type": "disc", "radius": 0.1}, "pose": {"x": 0.5, "y": 0.5}, "home": "table"}],
        "robots": [{"name": "arm", "base": [0.5, -0.3], "reach_min": 0.1, "reach_max": 1.2, "gripper_width": 0.05}],
        "goal": []
    }"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let s = load_scene(MINIMAL).unwrap();
        assert_eq!(s.grasp_count, 8);
        assert!(s.fixed.is_empty() && s.goal.is_empty() && s.handover_points.is_empty());
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = load_scene("{\n  \"regions\": [,]\n}").unwrap_err();
        match err {
            DocError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MINIMAL.replace("\"goal\": []", "\"goal\": [], \"extra\": 1");
        assert!(matches!(load_scene(&text), Err(DocError::Parse { .. })));
    }

    #[test]
    fn dangling_goal_names_the_object() {
        let text = MINIMAL.replace("\"goal\": []", r#""goal": [{"object": "mug", "region": "table"}]"#);
        match load_scene(&text).unwrap_err() {
            DocError::Reference { kind, name } => assert_eq!((kind, name.as_str()), ("object", "mug")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scene_round_trips() {
        let s = load_scene(MINIMAL).unwrap();
        let text = serde_json::to_string(&SceneDoc::from_scene(&s)).unwrap();
        assert_eq!(load_scene(&text).unwrap(), s);
    }

    #[test]
    fn plan_round_trips() {
        let s = load_scene(MINIMAL).unwrap();
        let a = Action::single(ObjectId(0), RegionId(0), RobotId(0), GraspId(3));
        let plan = Plan::new(vec![GroundedJointAction::from_actions(&s, &[(a, Pose::new(0.3, 0.6, 0.0))])]);
        let back = parse_plan(&s, &plan_to_json(&s, &plan)).unwrap();
        assert_eq!(back, plan);
    }
}
