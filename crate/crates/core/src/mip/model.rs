//! Compilation of a task graph into the 0-1 program.
//!
//! Variables are `X[t, e]` for `t` in `1..=T` and `e` ranging over the
//! action edges followed by the block edges, stored at
//! `(t - 1) * (n_actions + n_blocks) + e`. `X[t, (M, a)] = 1` means action
//! `a` runs at step `t` or later, so the step of a selected action is
//! `Σ_t X[t, (M, a)]`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cmtg::Cmtg;
use crate::world::{Action, ObjectId};

/// Which constraint family a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    /// `X[t] ≥ X[t+1]` per action edge.
    Monotone,
    /// Block variables copy their action's variable.
    BlockLink,
    /// Non-target objects move only when blocking a selected action.
    OnlyBlockers,
    /// Per-robot capacity at the last step.
    LastCapacity,
    /// Something happens at the last step.
    LastProgress,
    /// Per-robot capacity at earlier steps.
    Capacity,
    /// Something happens at every earlier step.
    Progress,
    /// Every target is moved.
    TargetMoved,
    /// Blockers of selected actions are moved.
    BlockersMoved,
    /// No object is moved twice.
    MoveOnce,
    /// Pick blockers move strictly earlier.
    PickPrecedence,
    /// Place blockers move no later.
    PlacePrecedence,
    /// Forbids a previously found action selection.
    Exclusion,
}

impl Family {
    /// Short row-name prefix used in LP output.
    pub fn tag(self) -> &'static str {
        match self {
            Family::Monotone => "mono",
            Family::BlockLink => "link",
            Family::OnlyBlockers => "only_blockers",
            Family::LastCapacity => "last_cap",
            Family::LastProgress => "last_progress",
            Family::Capacity => "cap",
            Family::Progress => "progress",
            Family::TargetMoved => "target",
            Family::BlockersMoved => "blockers_moved",
            Family::MoveOnce => "once",
            Family::PickPrecedence => "pick_prec",
            Family::PlacePrecedence => "place_prec",
            Family::Exclusion => "cut",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearConstraint {
    pub family: Family,
    /// `(variable, coefficient)`, variables distinct and in increasing order.
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl LinearConstraint {
    fn new(family: Family, terms: BTreeMap<usize, i64>, sense: Sense, rhs: i64) -> Self {
        Self { family, terms: terms.into_iter().filter(|(_, c)| *c != 0).collect(), sense, rhs }
    }

    pub fn activity(&self, x: &[bool]) -> i64 {
        self.terms.iter().filter(|(v, _)| x[*v]).map(|(_, c)| c).sum()
    }

    pub fn holds(&self, x: &[bool]) -> bool {
        let lhs = self.activity(x);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }

    /// True for a row with no terms that holds anyway (so it can be dropped).
    /// Rows with terms are kept even when the binary bounds already imply them.
    fn trivially_true(&self) -> bool {
        self.terms.is_empty() && self.holds(&[])
    }
}

/// Identity of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKey {
    Action { t: usize, action: usize },
    Block { t: usize, block: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipModel {
    pub horizon: usize,
    pub actions: Vec<Action>,
    /// Union of block-pick and block-place edges.
    pub blocks: Vec<(Action, ObjectId)>,
    pub targets: BTreeSet<ObjectId>,
    pub robot_count: usize,
    pub constraints: Vec<LinearConstraint>,
    /// Minimized; every coefficient is 1.
    pub objective: Vec<(usize, i64)>,
}

impl MipModel {
    pub fn width(&self) -> usize {
        self.actions.len() + self.blocks.len()
    }

    pub fn num_vars(&self) -> usize {
        self.horizon * self.width()
    }

    pub fn action_var(&self, t: usize, i: usize) -> usize {
        debug_assert!(t >= 1 && t <= self.horizon && i < self.actions.len());
        (t - 1) * self.width() + i
    }

    pub fn block_var(&self, t: usize, j: usize) -> usize {
        debug_assert!(t >= 1 && t <= self.horizon && j < self.blocks.len());
        (t - 1) * self.width() + self.actions.len() + j
    }

    pub fn key(&self, var: usize) -> VarKey {
        let t = var / self.width() + 1;
        let e = var % self.width();
        if e < self.actions.len() {
            VarKey::Action { t, action: e }
        } else {
            VarKey::Block { t, block: e - self.actions.len() }
        }
    }

    pub fn var_name(&self, var: usize) -> String {
        match self.key(var) {
            VarKey::Action { t, action } => format!("xa_{t}_{action}"),
            VarKey::Block { t, block } => format!("xb_{t}_{block}"),
        }
    }

    pub fn objective_value(&self, x: &[bool]) -> i64 {
        self.objective.iter().filter(|(v, _)| x[*v]).map(|(_, c)| c).sum()
    }

    /// Indices of violated rows.
    pub fn violated(&self, x: &[bool]) -> Vec<usize> {
        assert_eq!(x.len(), self.num_vars(), "assignment length");
        self.constraints.iter().enumerate().filter(|(_, c)| !c.holds(x)).map(|(i, _)| i).collect()
    }

    pub fn is_feasible(&self, x: &[bool]) -> bool {
        self.violated(x).is_empty()
    }

    /// Actions selected by an assignment (`X[1, a] = 1`).
    pub fn selection(&self, x: &[bool]) -> BTreeSet<usize> {
        (0..self.actions.len()).filter(|&i| x[self.action_var(1, i)]).collect()
    }

    /// Adds the no-good cut that forbids exactly this action selection.
    pub fn add_exclusion(&mut self, selected: &BTreeSet<usize>) {
        let terms: BTreeMap<usize, i64> = (0..self.actions.len())
            .map(|i| (self.action_var(1, i), if selected.contains(&i) { -1 } else { 1 }))
            .collect();
        let rhs = 1 - selected.len() as i64;
        self.constraints.push(LinearConstraint::new(Family::Exclusion, terms, Sense::Ge, rhs));
    }
}

/// Compiles `graph` with horizon `horizon` (big-M = horizon + 1).
pub fn compile_model(graph: &Cmtg, horizon: usize) -> MipModel {
    assert!(horizon >= 1, "horizon must be at least 1");
    let actions: Vec<Action> = graph.actions.iter().copied().collect();
    let blocks: Vec<(Action, ObjectId)> = graph.block_edges().into_iter().collect();
    let mut m = MipModel {
        horizon,
        actions,
        blocks,
        targets: graph.targets.clone(),
        robot_count: graph.robot_count,
        constraints: Vec::new(),
        objective: Vec::new(),
    };
    let t_max = horizon;
    let big_m = horizon as i64 + 1;
    let action_index: BTreeMap<Action, usize> = m.actions.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let actions_of =
        |o: ObjectId| -> Vec<usize> { (0..m.actions.len()).filter(|&i| m.actions[i].object == o).collect() };
    let blocks_on = |o: ObjectId| -> Vec<usize> { (0..m.blocks.len()).filter(|&j| m.blocks[j].1 == o).collect() };
    let uses = |i: usize, r: usize| m.actions[i].uses(crate::world::RobotId(r));

    let mut rows: Vec<LinearConstraint> = Vec::new();
    let mut emit = |family, terms: Vec<(usize, i64)>, sense, rhs| {
        let mut map = BTreeMap::new();
        for (v, c) in terms {
            *map.entry(v).or_insert(0) += c;
        }
        let row = LinearConstraint::new(family, map, sense, rhs);
        if !row.trivially_true() {
            rows.push(row);
        }
    };

    // Profiles only switch off.
    for i in 0..m.actions.len() {
        for t in 1..t_max {
            emit(Family::Monotone, vec![(m.action_var(t, i), 1), (m.action_var(t + 1, i), -1)], Sense::Ge, 0);
        }
    }
    for (j, (a, _)) in m.blocks.iter().enumerate() {
        let i = action_index[a];
        for t in 1..=t_max {
            emit(Family::BlockLink, vec![(m.action_var(t, i), 1), (m.block_var(t, j), -1)], Sense::Eq, 0);
        }
    }
    for &o in graph.objects.iter().filter(|o| !graph.targets.contains(o)) {
        let incoming = blocks_on(o);
        for i in actions_of(o) {
            for t in 1..=t_max {
                let mut terms = vec![(m.action_var(t, i), 1)];
                terms.extend(incoming.iter().map(|&j| (m.block_var(t, j), -1)));
                emit(Family::OnlyBlockers, terms, Sense::Le, 0);
            }
        }
    }
    // The last step: capacity and progress.
    for r in 0..m.robot_count {
        let terms = (0..m.actions.len()).filter(|&i| uses(i, r)).map(|i| (m.action_var(t_max, i), 1)).collect();
        emit(Family::LastCapacity, terms, Sense::Le, 1);
    }
    emit(Family::LastProgress, (0..m.actions.len()).map(|i| (m.action_var(t_max, i), 1)).collect(), Sense::Ge, 1);
    // Earlier steps: actions running exactly at t are X[t] - X[t+1].
    for t in 1..t_max {
        for r in 0..m.robot_count {
            let mut terms = Vec::new();
            for i in (0..m.actions.len()).filter(|&i| uses(i, r)) {
                terms.push((m.action_var(t, i), 1));
                terms.push((m.action_var(t + 1, i), -1));
            }
            emit(Family::Capacity, terms, Sense::Le, 1);
        }
        let mut terms = Vec::new();
        for i in 0..m.actions.len() {
            terms.push((m.action_var(t, i), 1));
            terms.push((m.action_var(t + 1, i), -1));
        }
        emit(Family::Progress, terms, Sense::Ge, 1);
    }
    for &o in &graph.targets {
        emit(Family::TargetMoved, actions_of(o).into_iter().map(|i| (m.action_var(1, i), 1)).collect(), Sense::Eq, 1);
    }
    for (j, (_, o)) in m.blocks.iter().enumerate() {
        let mut terms: Vec<(usize, i64)> = actions_of(*o).into_iter().map(|i| (m.action_var(1, i), 1)).collect();
        terms.push((m.block_var(1, j), -1));
        emit(Family::BlockersMoved, terms, Sense::Ge, 0);
    }
    for &o in &graph.objects {
        emit(Family::MoveOnce, actions_of(o).into_iter().map(|i| (m.action_var(1, i), 1)).collect(), Sense::Le, 1);
    }
    // Precedence: X[1,(a,M)] = 1 ⟹ Σ_t X[t,(a,M)] - Σ_t Σ_a' X[t,(M,a')] ≥ gap,
    // i.e. Σ_t X[t,(a,M)] - ΣΣ X[t,(M,a')] - big_m·X[1,(a,M)] ≥ gap - big_m.
    for (j, edge) in m.blocks.iter().enumerate() {
        let o = edge.1;
        for (family, set, gap) in
            [(Family::PickPrecedence, &graph.block_pick, 1), (Family::PlacePrecedence, &graph.block_place, 0)]
        {
            if !set.contains(edge) {
                continue;
            }
            let mut terms: Vec<(usize, i64)> = (1..=t_max).map(|t| (m.block_var(t, j), 1)).collect();
            for i in actions_of(o) {
                terms.extend((1..=t_max).map(|t| (m.action_var(t, i), -1)));
            }
            terms.push((m.block_var(1, j), -big_m));
            emit(family, terms, Sense::Ge, gap - big_m);
        }
    }
    m.constraints = rows;
    m.objective = (0..m.actions.len()).map(|i| (m.action_var(1, i), 1)).collect();
    m
}
