//! Multi-robot task-and-motion planning among movable obstacles on a 2D
//! desk-scale world.
//!
//! The pipeline: [`predicates::compute_facts`] evaluates reachability and
//! occlusion for every object, robot and grasp; [`cmtg::build_cmtg`] turns
//! those facts into a precedence graph; [`mip`] compiles the graph to a 0-1
//! program and enumerates minimum-motion task skeletons; [`grounding`]
//! samples placements and corridors backwards in time; and [`search`] runs a
//! tree search over skeletons until one grounds into a full plan, which
//! [`validate`] re-checks independently.
//!
//! The geometry kernel in [`geom`] is generic over the float type; everything
//! above it works in `f64` through the aliases below.

pub mod cmtg;
pub mod doc;
pub mod geom;
pub mod grounding;
pub mod mip;
pub mod predicates;
pub mod scalar;
pub mod search;
pub mod validate;
pub mod world;

pub use geom::{collides, normalize_angle, sample_placement, sample_placement_where, swept_corridor};
pub use scalar::Scalar;

pub type Vec2 = geom::Vec2<f64>;
pub type Pose = geom::Pose<f64>;
pub type Shape = geom::Shape<f64>;
pub type Aabb = geom::Aabb<f64>;
pub type Corridor = geom::Corridor<f64>;
pub type Solid = geom::Solid<f64>;

pub use cmtg::{build_cmtg, Cmtg};
pub use doc::{load_scene, DocError};
pub use grounding::{ground, GroundingConfig, GroundingContext, GroundingOutcome};
pub use predicates::{compute_facts, FactSet};
pub use search::{plan, NoPlan, NoPlanReason, PlanError, PlannerConfig, PlannerOutcome};
pub use validate::{validate_plan, ValidationReport};
pub use world::{
    Action, GraspId, GroundedJointAction, ObjectId, Plan, RegionId, RobotId, RobotSlot, Scene, Trajectory,
};
