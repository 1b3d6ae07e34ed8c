//! Collaborative manipulation task graph.
//!
//! Object nodes, action nodes, and three edge kinds: an action edge from
//! an object to each action that moves it, and block-pick / block-place
//! edges from an action to the objects that obstruct it. All sets are
//! ordered, so iteration order is canonical and model indexing is stable.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::predicates::FactSet;
use crate::world::{Action, ObjectId, Scene};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cmtg {
    pub objects: BTreeSet<ObjectId>,
    pub actions: BTreeSet<Action>,
    pub block_pick: BTreeSet<(Action, ObjectId)>,
    pub block_place: BTreeSet<(Action, ObjectId)>,
    pub targets: BTreeSet<ObjectId>,
    pub robot_count: usize,
}

impl Cmtg {
    pub fn new(robot_count: usize) -> Self {
        Self { robot_count, ..Self::default() }
    }

    /// Action edges `(object, action)`; each action has exactly one.
    pub fn action_edges(&self) -> impl Iterator<Item = (ObjectId, Action)> + '_ {
        self.actions.iter().map(|a| (a.object, *a))
    }

    /// Union of block-pick and block-place edges, in canonical order.
    pub fn block_edges(&self) -> BTreeSet<(Action, ObjectId)> {
        self.block_pick.union(&self.block_place).copied().collect()
    }

    pub fn actions_of(&self, obj: ObjectId) -> impl Iterator<Item = &Action> + '_ {
        self.actions.iter().filter(move |a| a.object == obj)
    }

    /// Structural invariants; returns a description of the first breach.
    pub fn check(&self) -> Result<(), String> {
        for a in &self.actions {
            if !self.objects.contains(&a.object) {
                return Err(format!("action on {} without its object node", a.object));
            }
        }
        for (kind, edges) in [("block-pick", &self.block_pick), ("block-place", &self.block_place)] {
            for (a, m) in edges {
                if !self.actions.contains(a) || !self.objects.contains(m) {
                    return Err(format!("{kind} edge to {m} has a missing endpoint"));
                }
                if a.object == *m {
                    return Err(format!("{kind} edge from an action on {m} to itself"));
                }
            }
        }
        if !self.targets.is_subset(&self.objects) {
            return Err("targets missing from object nodes".into());
        }
        Ok(())
    }

    /// One node or edge per line, canonical order.
    pub fn dump(&self, scene: &Scene) -> String {
        let mut out = String::new();
        for m in &self.objects {
            let tag = if self.targets.contains(m) { "target" } else { "object" };
            let _ = writeln!(out, "{tag} {}", scene.object(*m).name);
        }
        for a in &self.actions {
            let _ = writeln!(out, "action {} {}", scene.object(a.object).name, action_label(scene, a));
        }
        for (a, m) in &self.block_pick {
            let _ = writeln!(out, "block_pick {} {}", action_label(scene, a), scene.object(*m).name);
        }
        for (a, m) in &self.block_place {
            let _ = writeln!(out, "block_place {} {}", action_label(scene, a), scene.object(*m).name);
        }
        out
    }

    /// Graph description for external renderers.
    pub fn to_dot(&self, scene: &Scene) -> String {
        let mut out = String::from("digraph cmtg {\n");
        for m in &self.objects {
            let name = &scene.object(*m).name;
            let color = if self.targets.contains(m) { "red" } else { "black" };
            let _ = writeln!(out, "  \"{name}\" [shape=circle, color={color}];");
        }
        for a in &self.actions {
            let label = action_label(scene, a);
            let _ = writeln!(out, "  \"{label}\" [shape=box, style=rounded];");
            let _ = writeln!(out, "  \"{}\" -> \"{label}\" [color=gold];", scene.object(a.object).name);
        }
        for (edges, color) in [(&self.block_pick, "blue"), (&self.block_place, "purple")] {
            for (a, m) in edges {
                let _ =
                    writeln!(out, "  \"{}\" -> \"{}\" [color={color}];", action_label(scene, a), scene.object(*m).name);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// `object@region[pick_robot:grasp>place_robot:grasp]`.
pub fn action_label(scene: &Scene, a: &Action) -> String {
    format!(
        "{}@{}[{}:{}>{}:{}]",
        scene.object(a.object).name,
        scene.region(a.region).name,
        scene.robot(a.pick_robot).name,
        a.pick_grasp.0,
        scene.robot(a.place_robot).name,
        a.place_grasp.0
    )
}

/// Candidate actions for moving `m` to its target region, before blocker filtering.
fn candidate_actions(m: ObjectId, facts: &FactSet, scene: &Scene) -> Vec<Action> {
    let re = scene.target_region(m);
    let goal = scene.is_goal(m);
    let mut out = Vec::new();
    for r1 in scene.robot_ids() {
        for g1 in scene.grasps() {
            if !facts.reachable_pick.contains(&(m, g1, r1)) {
                continue;
            }
            if facts.reachable_place.contains(&(m, re, g1, r1)) {
                out.push(Action::single(m, re, r1, g1));
            }
            if !goal {
                continue;
            }
            for r2 in scene.robot_ids().filter(|r2| *r2 != r1) {
                for g2 in scene.grasps() {
                    if facts.enable_goal_handover.contains(&(m, g1, g2, r1, r2))
                        && facts.reachable_place.contains(&(m, re, g2, r2))
                    {
                        out.push(Action {
                            object: m,
                            region: re,
                            pick_robot: r1,
                            place_robot: r2,
                            pick_grasp: g1,
                            place_grasp: g2,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Adds `m`, its actions and, recursively, everything blocking them.
/// Actions blocked by an excluded object are left out.
pub fn add_object(m: ObjectId, graph: &mut Cmtg, facts: &FactSet, scene: &Scene, excluded: &BTreeSet<ObjectId>) {
    if graph.objects.contains(&m) || excluded.contains(&m) {
        return;
    }
    graph.objects.insert(m);
    for a in candidate_actions(m, facts, scene) {
        let (pick, place) = facts.occluders_of(scene, &a).expect("candidate actions come from the fact set");
        if pick.iter().chain(&place).any(|o| excluded.contains(o)) {
            continue;
        }
        graph.actions.insert(a);
        for o in pick {
            add_object(o, graph, facts, scene, excluded);
            graph.block_pick.insert((a, o));
        }
        for o in place {
            add_object(o, graph, facts, scene, excluded);
            graph.block_place.insert((a, o));
        }
    }
}

/// Builds the graph for moving `targets` when `excluded` objects may not move.
pub fn build_cmtg(targets: &BTreeSet<ObjectId>, facts: &FactSet, scene: &Scene, excluded: &BTreeSet<ObjectId>) -> Cmtg {
    let mut g = Cmtg::new(scene.robots.len());
    for &m in targets {
        add_object(m, &mut g, facts, scene, excluded);
    }
    g.targets = targets.iter().filter(|m| !excluded.contains(m)).copied().collect();
    g
}
