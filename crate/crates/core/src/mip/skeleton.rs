//! Task skeletons: decoding solutions and enumerating diverse ones.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use super::model::{compile_model, MipModel};
use super::solver::{solve, BudgetExceeded, MipSolution, SolveStatus};
use crate::cmtg::Cmtg;
use crate::world::{Action, ObjectId, RobotId};

/// Actions by step; a step's actions are in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TaskSkeleton {
    pub steps: Vec<Vec<Action>>,
    pub moved_objects: BTreeSet<ObjectId>,
}

impl TaskSkeleton {
    pub fn new(steps: Vec<Vec<Action>>) -> Self {
        let moved_objects = steps.iter().flatten().map(|a| a.object).collect();
        Self { steps, moved_objects }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of objects moved.
    pub fn size(&self) -> usize {
        self.moved_objects.len()
    }

    /// Per-robot view of step `k`: the action each robot takes part in, if any.
    pub fn robot_view(&self, k: usize, robot_count: usize) -> Vec<Option<Action>> {
        let mut out = vec![None; robot_count];
        for a in &self.steps[k] {
            for r in a.robots() {
                out[r.0] = Some(*a);
            }
        }
        out
    }

    /// Structural checks: each object once, no robot twice in a step, no empty step.
    pub fn check(&self, robot_count: usize) -> Result<(), SkeletonError> {
        let mut seen = BTreeSet::new();
        for (k, step) in self.steps.iter().enumerate() {
            if step.is_empty() {
                return Err(SkeletonError::EmptyStep(k + 1));
            }
            let mut busy = BTreeSet::new();
            for a in step {
                if !seen.insert(a.object) {
                    return Err(SkeletonError::MovedTwice(a.object));
                }
                for r in a.robots() {
                    if r.0 >= robot_count || !busy.insert(r) {
                        return Err(SkeletonError::RobotOverbooked(k + 1, r));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkeletonError {
    #[error("action {0} has a non-monotone time profile")]
    NonMonotone(usize),
    #[error("block variable {0} disagrees with its action")]
    BlockMismatch(usize),
    #[error("step {0} has no action")]
    EmptyStep(usize),
    #[error("object {0} moved twice")]
    MovedTwice(ObjectId),
    #[error("robot {1} used twice in step {0}")]
    RobotOverbooked(usize, RobotId),
}

/// Decodes a solution: an action with `Σ_t X[t, a] = k > 0` runs at step `k`.
/// Empty steps are kept; feasible solutions never have them.
pub fn extract_skeleton(solution: &MipSolution, model: &MipModel) -> Result<TaskSkeleton, SkeletonError> {
    let x = &solution.assignment;
    let mut by_step: BTreeMap<usize, Vec<Action>> = BTreeMap::new();
    for (i, a) in model.actions.iter().enumerate() {
        let profile: Vec<bool> = (1..=model.horizon).map(|t| x[model.action_var(t, i)]).collect();
        let k = profile.iter().filter(|b| **b).count();
        if profile.windows(2).any(|w| !w[0] && w[1]) {
            return Err(SkeletonError::NonMonotone(i));
        }
        if k > 0 {
            by_step.entry(k).or_default().push(*a);
        }
    }
    for (j, (a, _)) in model.blocks.iter().enumerate() {
        let i = model.actions.binary_search(a).expect("block edge action is a node");
        if (1..=model.horizon).any(|t| x[model.block_var(t, j)] != x[model.action_var(t, i)]) {
            return Err(SkeletonError::BlockMismatch(j));
        }
    }
    let last = by_step.keys().next_back().copied().unwrap_or(0);
    let steps: Vec<Vec<Action>> = (1..=last).map(|k| by_step.remove(&k).unwrap_or_default()).collect();
    let sk = TaskSkeleton::new(steps);
    match sk.check(model.robot_count) {
        Ok(()) | Err(SkeletonError::EmptyStep(_)) => Ok(sk),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateConfig {
    pub t_max: usize,
    pub k_max: usize,
    pub node_limit: u64,
}

impl Default for EnumerateConfig {
    fn default() -> Self {
        Self { t_max: 4, k_max: 10, node_limit: 1_000_000 }
    }
}

/// Minimum-motion skeletons for horizons `1..=t_max`, at most `k_max` overall.
///
/// After each solution a no-good cut on its action selection is added, and
/// the cuts carry over to longer horizons, so every returned skeleton runs
/// a different set of actions.
pub fn enumerate_skeletons(graph: &Cmtg, cfg: &EnumerateConfig) -> Result<Vec<TaskSkeleton>, BudgetExceeded> {
    let mut out: Vec<TaskSkeleton> = Vec::new();
    let mut cuts: Vec<BTreeSet<usize>> = Vec::new();
    if cfg.k_max == 0 || graph.targets.is_empty() {
        return Ok(out);
    }
    for horizon in 1..=cfg.t_max {
        let mut model = compile_model(graph, horizon);
        for c in &cuts {
            model.add_exclusion(c);
        }
        while let SolveStatus::Optimal(sol) = solve(&model, cfg.node_limit)? {
            let sk = extract_skeleton(&sol, &model).expect("solver returns feasible assignments");
            debug_assert!(sk.check(graph.robot_count).is_ok());
            let sel = model.selection(&sol.assignment);
            model.add_exclusion(&sel);
            cuts.push(sel);
            if !out.contains(&sk) {
                out.push(sk);
            }
            if out.len() >= cfg.k_max {
                return Ok(out);
            }
        }
    }
    Ok(out)
}
