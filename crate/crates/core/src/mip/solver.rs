//! Depth-first branch-and-bound for the 0-1 program.
//!
//! Rows are normalized to `Σ c·x ≥ b` and propagated with a bounds rule:
//! a row whose best achievable activity falls below `b` is a conflict, and
//! any free variable whose unfavourable value alone would cause that is
//! fixed. The lower bound counts objects that every completion must move:
//! targets, objects of selected actions, and (transitively) blockers shared
//! by all remaining actions of a required object.

use std::collections::BTreeSet;

use thiserror::Error;

use super::model::{MipModel, Sense};
use crate::world::ObjectId;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("branch-and-bound node budget of {0} exhausted")]
pub struct BudgetExceeded(pub u64);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MipSolution {
    pub assignment: Vec<bool>,
    pub objective: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal(MipSolution),
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
}

const FREE: i8 = -1;

struct Row {
    terms: Vec<(u32, i64)>,
    rhs: i64,
}

struct Solver<'m> {
    model: &'m MipModel,
    rows: Vec<Row>,
    watch: Vec<Vec<u32>>,
    vals: Vec<i8>,
    trail: Vec<u32>,
    queue: Vec<u32>,
    queued: Vec<bool>,
    cutoff_row: usize,
    incumbent: Option<(i64, Vec<bool>)>,
    nodes: u64,
    node_limit: u64,
    /// Per action: object and blocker objects.
    action_object: Vec<ObjectId>,
    action_blockers: Vec<Vec<ObjectId>>,
    objects: Vec<ObjectId>,
}

impl<'m> Solver<'m> {
    fn new(model: &'m MipModel, node_limit: u64) -> Self {
        let mut rows = Vec::new();
        let ge = |terms: &[(usize, i64)], rhs: i64, sign: i64| Row {
            terms: terms.iter().map(|&(v, c)| (v as u32, c * sign)).collect(),
            rhs: rhs * sign,
        };
        for c in &model.constraints {
            match c.sense {
                Sense::Ge => rows.push(ge(&c.terms, c.rhs, 1)),
                Sense::Le => rows.push(ge(&c.terms, c.rhs, -1)),
                Sense::Eq => {
                    rows.push(ge(&c.terms, c.rhs, 1));
                    rows.push(ge(&c.terms, c.rhs, -1));
                }
            }
        }
        // Objective cutoff, tightened whenever the incumbent improves.
        let cutoff_row = rows.len();
        rows.push(Row { terms: model.objective.iter().map(|&(v, c)| (v as u32, -c)).collect(), rhs: i64::MIN / 4 });
        let n = model.num_vars();
        let mut watch = vec![Vec::new(); n];
        for (ri, r) in rows.iter().enumerate() {
            for &(v, _) in &r.terms {
                watch[v as usize].push(ri as u32);
            }
        }
        let action_object: Vec<ObjectId> = model.actions.iter().map(|a| a.object).collect();
        let mut action_blockers = vec![Vec::new(); model.actions.len()];
        for (a, o) in &model.blocks {
            let i = model.actions.binary_search(a).expect("block edge action is a node");
            action_blockers[i].push(*o);
        }
        let objects: BTreeSet<ObjectId> = action_object
            .iter()
            .copied()
            .chain(model.targets.iter().copied())
            .chain(model.blocks.iter().map(|b| b.1))
            .collect();
        let nrows = rows.len();
        Solver {
            model,
            rows,
            watch,
            vals: vec![FREE; n],
            trail: Vec::new(),
            queue: Vec::new(),
            queued: vec![false; nrows],
            cutoff_row,
            incumbent: None,
            nodes: 0,
            node_limit,
            action_object,
            action_blockers,
            objects: objects.into_iter().collect(),
        }
    }

    fn assign(&mut self, v: usize, val: bool) {
        debug_assert_eq!(self.vals[v], FREE);
        self.vals[v] = val as i8;
        self.trail.push(v as u32);
        for &r in &self.watch[v] {
            if !self.queued[r as usize] {
                self.queued[r as usize] = true;
                self.queue.push(r);
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail above mark");
            self.vals[v as usize] = FREE;
        }
    }

    fn clear_queue(&mut self) {
        for r in self.queue.drain(..) {
            self.queued[r as usize] = false;
        }
    }

    /// Runs propagation to a fixpoint; false on conflict.
    fn propagate(&mut self) -> bool {
        while let Some(r) = self.queue.pop() {
            self.queued[r as usize] = false;
            let row = &self.rows[r as usize];
            let mut max_act = 0i64;
            for &(v, c) in &row.terms {
                match self.vals[v as usize] {
                    FREE => max_act += c.max(0),
                    1 => max_act += c,
                    _ => {}
                }
            }
            if max_act < row.rhs {
                self.clear_queue();
                return false;
            }
            let slack = max_act - row.rhs;
            let mut forced = Vec::new();
            for &(v, c) in &row.terms {
                if self.vals[v as usize] == FREE && c.abs() > slack {
                    forced.push((v as usize, c > 0));
                }
            }
            for (v, val) in forced {
                if self.vals[v] == FREE {
                    self.assign(v, val);
                }
            }
        }
        true
    }

    fn x1(&self, i: usize) -> i8 {
        self.vals[self.model.action_var(1, i)]
    }

    /// Lower bound on the objective of any completion; `None` if some required
    /// object has no action left.
    fn bound(&self) -> Option<(i64, BTreeSet<ObjectId>)> {
        let mut required: BTreeSet<ObjectId> = self.model.targets.clone();
        let mut has_action: BTreeSet<ObjectId> = BTreeSet::new();
        for i in 0..self.action_object.len() {
            if self.x1(i) == 1 {
                required.insert(self.action_object[i]);
                has_action.insert(self.action_object[i]);
                required.extend(self.action_blockers[i].iter().copied());
            }
        }
        loop {
            let mut grew = false;
            for &o in &self.objects {
                if !required.contains(&o) || has_action.contains(&o) {
                    continue;
                }
                let mut common: Option<BTreeSet<ObjectId>> = None;
                for i in (0..self.action_object.len()).filter(|&i| self.action_object[i] == o && self.x1(i) != 0) {
                    let b: BTreeSet<ObjectId> = self.action_blockers[i].iter().copied().collect();
                    common = Some(match common {
                        None => b,
                        Some(c) => c.intersection(&b).copied().collect(),
                    });
                }
                let common = common?;
                for b in common {
                    grew |= required.insert(b);
                }
            }
            if !grew {
                break;
            }
        }
        Some((required.len() as i64, required))
    }

    fn pick_branch(&self, required: &BTreeSet<ObjectId>) -> Option<(usize, bool)> {
        for i in 0..self.action_object.len() {
            let v = self.model.action_var(1, i);
            if self.vals[v] == FREE {
                return Some((v, required.contains(&self.action_object[i])));
            }
        }
        self.vals.iter().position(|&x| x == FREE).map(|v| (v, false))
    }

    fn record(&mut self) {
        let x: Vec<bool> = self.vals.iter().map(|&v| v == 1).collect();
        let obj = self.model.objective_value(&x);
        debug_assert!(self.model.is_feasible(&x), "propagation admitted an infeasible leaf");
        if self.incumbent.as_ref().is_none_or(|(best, _)| obj < *best) {
            self.incumbent = Some((obj, x));
            self.rows[self.cutoff_row].rhs = 1 - obj;
        }
    }

    /// Evaluates the current node after propagation: returns a branching
    /// decision or `None` when the node is closed.
    fn expand(&mut self, consistent: bool) -> Result<Option<(usize, bool)>, BudgetExceeded> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(BudgetExceeded(self.node_limit));
        }
        if !consistent {
            return Ok(None);
        }
        let Some((lb, required)) = self.bound() else { return Ok(None) };
        if let Some((best, _)) = &self.incumbent {
            if lb >= *best {
                return Ok(None);
            }
        }
        match self.pick_branch(&required) {
            Some(b) => Ok(Some(b)),
            None => {
                self.record();
                Ok(None)
            }
        }
    }

    fn enqueue_all(&mut self) {
        for r in 0..self.rows.len() {
            self.queued[r] = true;
            self.queue.push(r as u32);
        }
    }

    fn run(&mut self) -> Result<(), BudgetExceeded> {
        struct Frame {
            var: usize,
            second: Option<bool>,
            mark: usize,
        }
        self.enqueue_all();
        let ok = self.propagate();
        let mut stack: Vec<Frame> = Vec::new();
        let mut next = self.expand(ok)?;
        loop {
            if let Some((var, first)) = next {
                stack.push(Frame { var, second: Some(!first), mark: self.trail.len() });
                self.assign(var, first);
                let ok = self.propagate();
                next = self.expand(ok)?;
                continue;
            }
            // Backtrack to the deepest frame with an untried value.
            loop {
                let Some(frame) = stack.last_mut() else { return Ok(()) };
                let mark = frame.mark;
                let var = frame.var;
                let second = frame.second.take();
                self.undo_to(mark);
                match second {
                    Some(val) => {
                        // Re-propagate the cutoff: the incumbent may have improved.
                        self.queued[self.cutoff_row] = true;
                        self.queue.push(self.cutoff_row as u32);
                        self.assign(var, val);
                        let ok = self.propagate();
                        next = self.expand(ok)?;
                        break;
                    }
                    None => {
                        stack.pop();
                    }
                }
            }
        }
    }
}

/// Solves to proven optimality within `node_limit` search nodes.
pub fn solve(model: &MipModel, node_limit: u64) -> Result<SolveStatus, BudgetExceeded> {
    solve_with_stats(model, node_limit).map(|(s, _)| s)
}

pub fn solve_with_stats(model: &MipModel, node_limit: u64) -> Result<(SolveStatus, SolveStats), BudgetExceeded> {
    let mut s = Solver::new(model, node_limit);
    s.run()?;
    let stats = SolveStats { nodes: s.nodes };
    Ok(match s.incumbent {
        Some((objective, assignment)) => (SolveStatus::Optimal(MipSolution { assignment, objective }), stats),
        None => (SolveStatus::Infeasible, stats),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmtg::Cmtg;
    use crate::mip::model::compile_model;
    use crate::world::{Action, GraspId, RegionId, RobotId};

    fn act(o: usize, r: usize) -> Action {
        Action::single(ObjectId(o), RegionId(0), RobotId(r), GraspId(0))
    }

    fn graph(robots: usize, actions: &[(usize, usize)], targets: &[usize], picks: &[((usize, usize), usize)]) -> Cmtg {
        let mut g = Cmtg::new(robots);
        for &(o, r) in actions {
            g.objects.insert(ObjectId(o));
            g.actions.insert(act(o, r));
        }
        g.targets = targets.iter().map(|&o| ObjectId(o)).collect();
        g.objects.extend(g.targets.clone());
        for &((o, r), b) in picks {
            g.block_pick.insert((act(o, r), ObjectId(b)));
        }
        g
    }

    fn optimum(g: &Cmtg, t: usize) -> Option<MipSolution> {
        match solve(&compile_model(g, t), 1_000_000).unwrap() {
            SolveStatus::Optimal(s) => Some(s),
            SolveStatus::Infeasible => None,
        }
    }

    #[test]
    fn single_action_is_selected() {
        let s = optimum(&graph(1, &[(0, 0)], &[0], &[]), 1).unwrap();
        assert_eq!((s.objective, s.assignment.clone()), (1, vec![true]));
    }

    #[test]
    fn chain_needs_two_steps() {
        let g = graph(1, &[(0, 0), (1, 0)], &[0], &[((0, 0), 1)]);
        assert!(optimum(&g, 1).is_none());
        let s = optimum(&g, 2).unwrap();
        assert_eq!(s.objective, 2);
        let m = compile_model(&g, 2);
        // M1 at step 1, M0 at step 2.
        assert!(s.assignment[m.action_var(2, 0)] && !s.assignment[m.action_var(2, 1)]);
    }

    #[test]
    fn two_robots_move_two_targets_at_once() {
        let g = graph(2, &[(0, 0), (1, 1)], &[0, 1], &[]);
        let s = optimum(&g, 1).unwrap();
        assert_eq!(s.objective, 2);
    }

    #[test]
    fn unused_blocker_alternative_is_avoided() {
        // M0 can be moved by r0 (blocked by M1) or r1 (free).
        let g = graph(2, &[(0, 0), (0, 1), (1, 0)], &[0], &[((0, 0), 1)]);
        assert_eq!(optimum(&g, 1).unwrap().objective, 1);
    }

    #[test]
    fn budget_is_reported_distinctly() {
        let g = graph(2, &[(0, 0), (0, 1), (1, 0)], &[0], &[((0, 0), 1)]);
        assert_eq!(solve(&compile_model(&g, 2), 0), Err(BudgetExceeded(0)));
    }
}
