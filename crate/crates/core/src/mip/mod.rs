//! The 0-1 program over a task graph: compilation, exact solving and
//! skeleton enumeration.

pub mod lp;
pub mod model;
pub mod skeleton;
pub mod solver;

pub use lp::write_lp;
pub use model::{compile_model, Family, LinearConstraint, MipModel, Sense};
pub use skeleton::{enumerate_skeletons, extract_skeleton, EnumerateConfig, SkeletonError, TaskSkeleton};
pub use solver::{solve, BudgetExceeded, MipSolution, SolveStatus};
