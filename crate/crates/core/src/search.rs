//! Tree search over task skeletons.
//!
//! Each edge carries a skeleton; each node stores the grounded steps that
//! its incoming edge produced. Selecting an unevaluated edge grounds its
//! skeleton in front of the tail node's steps. A partial grounding spawns
//! new skeletons for the conflicting objects, a failed one prunes the edge,
//! and a full one is a plan.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cmtg::build_cmtg;
use crate::grounding::{ground, GroundingConfig, GroundingContext, GroundingOutcome};
use crate::mip::{enumerate_skeletons, EnumerateConfig, TaskSkeleton};
use crate::predicates::{compute_facts, FactSet};
use crate::validate::validate_plan;
use crate::world::{GroundedJointAction, ObjectId, Plan, Scene};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Exploration constant.
    pub c: f64,
    /// Weight of the motion-cost term in rewards.
    pub alpha: f64,
    pub t_max: usize,
    pub k_max: usize,
    /// Branch-and-bound node budget per solve.
    pub node_limit: u64,
    pub max_iterations: usize,
    pub time_budget: Duration,
    pub seed: u64,
    /// Keep searching after the first plan and return the best one.
    pub exhaust: bool,
    pub grounding: GroundingConfig,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            alpha: 1.0,
            t_max: 4,
            k_max: 10,
            node_limit: 1_000_000,
            max_iterations: 200,
            time_budget: Duration::from_secs(60),
            seed: 0,
            exhaust: false,
            grounding: GroundingConfig::default(),
        }
    }
}

impl PlannerConfig {
    fn enumerate(&self) -> EnumerateConfig {
        EnumerateConfig { t_max: self.t_max, k_max: self.k_max, node_limit: self.node_limit }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchNode {
    /// Grounded steps this node commits to, first step first.
    pub stored: Vec<GroundedJointAction>,
    pub visits: u64,
    pub terminal: bool,
    pub children: Vec<usize>,
}

impl SearchNode {
    fn new(stored: Vec<GroundedJointAction>) -> Self {
        Self { stored, visits: 0, terminal: false, children: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchEdge {
    pub skeleton: TaskSkeleton,
    pub value: f64,
    pub visits: u64,
    pub prior: f64,
    pub evaluated: bool,
    pub pruned: bool,
    pub tail: usize,
    pub head: Option<usize>,
}

impl SearchEdge {
    pub fn new(skeleton: TaskSkeleton, tail: usize) -> Self {
        let prior = 1.0 / skeleton.size().max(1) as f64;
        Self { skeleton, value: 0.0, visits: 0, prior, evaluated: false, pruned: false, tail, head: None }
    }

    pub fn mean(&self) -> f64 {
        self.value / (self.visits + 1) as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SearchTree {
    pub nodes: Vec<SearchNode>,
    pub edges: Vec<SearchEdge>,
}

impl SearchTree {
    /// A tree with an empty root holding one edge per skeleton.
    pub fn with_root(skeletons: Vec<TaskSkeleton>) -> Self {
        let mut t = Self { nodes: vec![SearchNode::new(Vec::new())], edges: Vec::new() };
        t.attach(0, skeletons);
        t
    }

    pub fn attach(&mut self, node: usize, skeletons: Vec<TaskSkeleton>) {
        for sk in skeletons {
            self.nodes[node].children.push(self.edges.len());
            self.edges.push(SearchEdge::new(sk, node));
        }
    }

    /// Whether `e` or something below it can still be evaluated.
    pub fn is_open(&self, e: usize) -> bool {
        let edge = &self.edges[e];
        if edge.pruned {
            return false;
        }
        match edge.head {
            None => !edge.evaluated,
            Some(n) => self.node_open(n),
        }
    }

    pub fn node_open(&self, n: usize) -> bool {
        !self.nodes[n].terminal && self.nodes[n].children.iter().any(|&e| self.is_open(e))
    }

    /// Descends by maximum score from the root to the first unevaluated
    /// edge; ties go to the earliest edge. Returns the edges on the path.
    pub fn select(&self, c: f64) -> Option<Vec<usize>> {
        let mut path = Vec::new();
        let mut n = 0;
        loop {
            let node = &self.nodes[n];
            let mut best: Option<(usize, f64)> = None;
            for &e in node.children.iter().filter(|&&e| self.is_open(e)) {
                let q = ucb(node, &self.edges[e], c);
                if best.is_none_or(|(_, b)| q > b) {
                    best = Some((e, q));
                }
            }
            let (e, _) = best?;
            path.push(e);
            match self.edges[e].head {
                Some(h) if self.edges[e].evaluated => n = h,
                _ => return Some(path),
            }
        }
    }

    /// Adds `r` to every edge on `path` and counts a visit on each edge and
    /// on each node the path leaves from.
    pub fn backpropagate(&mut self, path: &[usize], r: f64) {
        for &e in path {
            let tail = self.edges[e].tail;
            self.nodes[tail].visits += 1;
            let edge = &mut self.edges[e];
            edge.value += r;
            edge.visits += 1;
        }
    }
}

/// Selection score of `edge` below `node`.
pub fn ucb(node: &SearchNode, edge: &SearchEdge, c: f64) -> f64 {
    let n = (edge.visits + 1) as f64;
    edge.value / n + c * edge.prior * (node.visits as f64).sqrt() / n
}

fn moved_count(steps: &[GroundedJointAction]) -> usize {
    steps.iter().flat_map(|s| s.moved_objects()).collect::<BTreeSet<_>>().len()
}

/// The new skeleton a partial outcome is scored against: fewest steps, then
/// fewest moved objects, then canonical order.
pub fn best_skeleton(skeletons: &[TaskSkeleton]) -> Option<&TaskSkeleton> {
    skeletons.iter().min_by(|a, b| (a.len(), a.size(), *a).cmp(&(b.len(), b.size(), *b)))
}

/// Reward of an evaluation. `new_skeletons` is only read for partial outcomes.
pub fn reward(outcome: &GroundingOutcome, new_skeletons: &[TaskSkeleton], alpha: f64) -> f64 {
    match outcome {
        GroundingOutcome::Failure => 0.0,
        GroundingOutcome::Full { steps } => 1.0 + alpha / moved_count(steps).max(1) as f64,
        GroundingOutcome::Partial { steps, .. } => match best_skeleton(new_skeletons) {
            None => 0.0,
            Some(best) => {
                let (len, size) = (steps.len() as f64, moved_count(steps) as f64);
                len / (len + best.len() as f64) + alpha / (size + best.size() as f64)
            }
        },
    }
}

/// One line of the search log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceLine {
    pub iteration: usize,
    pub edge: usize,
    pub depth: usize,
    pub outcome: &'static str,
    pub reward: f64,
    pub new_edges: usize,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iter {} edge {} depth {} outcome {} reward {} new_edges {}",
            self.iteration, self.edge, self.depth, self.outcome, self.reward, self.new_edges
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoPlanReason {
    NoInitialSkeletons,
    AllBranchesPruned,
    BudgetExhausted,
}

impl fmt::Display for NoPlanReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoPlanReason::NoInitialSkeletons => "no initial skeletons",
            NoPlanReason::AllBranchesPruned => "all branches pruned",
            NoPlanReason::BudgetExhausted => "budget exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoPlan {
    pub reason: NoPlanReason,
    pub iterations: usize,
    pub tree_nodes: usize,
    pub tree_edges: usize,
    pub pruned_edges: usize,
    pub terminal_nodes: usize,
}

impl fmt::Display for NoPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no plan: {} after {} iterations ({} nodes, {} edges, {} pruned, {} terminal)",
            self.reason, self.iterations, self.tree_nodes, self.tree_edges, self.pruned_edges, self.terminal_nodes
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerOutcome {
    pub result: Result<Plan, NoPlan>,
    pub iterations: usize,
    pub trace: Vec<TraceLine>,
    pub tree: SearchTree,
}

impl PlannerOutcome {
    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|l| format!("{l}\n")).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("scene has no goal")]
    EmptyGoal,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// Goal objects not yet inside their goal region.
pub fn open_goals(scene: &Scene) -> BTreeSet<ObjectId> {
    scene.goal_objects().into_iter().filter(|o| !scene.satisfies_goal(*o, &scene.object(*o).pose)).collect()
}

/// Skeletons moving `targets` without touching `excluded`; an exceeded
/// solver budget counts as no skeletons.
pub fn skeletons_for(
    targets: &BTreeSet<ObjectId>,
    excluded: &BTreeSet<ObjectId>,
    facts: &FactSet,
    scene: &Scene,
    cfg: &PlannerConfig,
) -> Vec<TaskSkeleton> {
    let graph = build_cmtg(targets, facts, scene, excluded);
    if graph.targets.len() < targets.len() {
        return Vec::new();
    }
    enumerate_skeletons(&graph, &cfg.enumerate()).unwrap_or_default()
}

fn checked(scene: &Scene, steps: Vec<GroundedJointAction>) -> Result<Plan, PlanError> {
    let plan = Plan::new(steps);
    let report = validate_plan(scene, &plan).map_err(|e| PlanError::Inconsistent(e.to_string()))?;
    if !report.valid {
        let first = report.violations.first().map(|v| v.message.clone()).unwrap_or_default();
        return Err(PlanError::Inconsistent(format!("grounded plan fails validation: {first}")));
    }
    Ok(plan)
}

fn no_plan(reason: NoPlanReason, iterations: usize, tree: &SearchTree) -> NoPlan {
    NoPlan {
        reason,
        iterations,
        tree_nodes: tree.nodes.len(),
        tree_edges: tree.edges.len(),
        pruned_edges: tree.edges.iter().filter(|e| e.pruned).count(),
        terminal_nodes: tree.nodes.iter().filter(|n| n.terminal).count(),
    }
}

/// Plans for `scene`. Returns the first valid plan, or with `exhaust` the
/// best one by motion cost then makespan once the budget runs out.
pub fn plan(scene: &Scene, cfg: &PlannerConfig) -> Result<PlannerOutcome, PlanError> {
    let facts = compute_facts(scene);
    plan_with_facts(scene, &facts, cfg)
}

pub fn plan_with_facts(scene: &Scene, facts: &FactSet, cfg: &PlannerConfig) -> Result<PlannerOutcome, PlanError> {
    if scene.goal.is_empty() {
        return Err(PlanError::EmptyGoal);
    }
    let targets = open_goals(scene);
    if targets.is_empty() {
        let plan = checked(scene, Vec::new())?;
        return Ok(PlannerOutcome { result: Ok(plan), iterations: 0, trace: Vec::new(), tree: SearchTree::default() });
    }
    let started = Instant::now();
    let mut tree = SearchTree::with_root(skeletons_for(&targets, &BTreeSet::new(), facts, scene, cfg));
    let mut trace = Vec::new();
    let mut best: Option<Plan> = None;
    if tree.edges.is_empty() {
        tree.nodes[0].terminal = true;
        let np = no_plan(NoPlanReason::NoInitialSkeletons, 0, &tree);
        return Ok(PlannerOutcome { result: Err(np), iterations: 0, trace, tree });
    }

    let mut iterations = 0;
    let mut reason = NoPlanReason::BudgetExhausted;
    while iterations < cfg.max_iterations && started.elapsed() < cfg.time_budget {
        let Some(path) = tree.select(cfg.c) else {
            reason = NoPlanReason::AllBranchesPruned;
            break;
        };
        iterations += 1;
        let e = *path.last().expect("selection returns a nonempty path");
        let tail = tree.edges[e].tail;
        let skeleton = tree.edges[e].skeleton.clone();
        let ctx = GroundingContext::from_suffix(scene, tree.nodes[tail].stored.clone(), &skeleton);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(e as u64);
        let outcome = ground(&skeleton, &ctx, scene, &mut rng, &cfg.grounding)
            .map_err(|err| PlanError::Inconsistent(err.to_string()))?;

        tree.edges[e].evaluated = true;
        let mut new_edges = 0;
        let r = match &outcome {
            GroundingOutcome::Failure => {
                tree.edges[e].pruned = true;
                0.0
            }
            GroundingOutcome::Full { steps } => {
                let plan = checked(scene, steps.clone())?;
                let mut head = SearchNode::new(steps.clone());
                head.terminal = true;
                tree.edges[e].head = Some(tree.nodes.len());
                tree.nodes.push(head);
                let better =
                    best.as_ref().is_none_or(|b| (plan.motion_cost, plan.makespan) < (b.motion_cost, b.makespan));
                if better {
                    best = Some(plan);
                }
                reward(&outcome, &[], cfg.alpha)
            }
            GroundingOutcome::Partial { steps, conflicts } => {
                let excluded: BTreeSet<ObjectId> = steps.iter().flat_map(|s| s.moved_objects()).collect();
                let skeletons = skeletons_for(conflicts, &excluded, facts, scene, cfg);
                let r = reward(&outcome, &skeletons, cfg.alpha);
                let h = tree.nodes.len();
                let mut head = SearchNode::new(steps.clone());
                head.terminal = skeletons.is_empty();
                tree.nodes.push(head);
                tree.edges[e].head = Some(h);
                new_edges = skeletons.len();
                tree.attach(h, skeletons);
                r
            }
        };
        tree.backpropagate(&path, r);
        trace.push(TraceLine {
            iteration: iterations,
            edge: e,
            depth: path.len(),
            outcome: outcome.kind(),
            reward: r,
            new_edges,
        });
        if best.is_some() && !cfg.exhaust {
            break;
        }
    }
    if best.is_none() && !tree.node_open(0) {
        reason = NoPlanReason::AllBranchesPruned;
    }
    let result = best.ok_or_else(|| no_plan(reason, iterations, &tree));
    Ok(PlannerOutcome { result, iterations, trace, tree })
}
