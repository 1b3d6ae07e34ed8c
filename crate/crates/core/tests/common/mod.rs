//! Oracles shared by the integration tests. Nothing here calls the solver or
//! reads model rows: feasibility is judged from the plain meaning of a
//! schedule (which action runs at which step).

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use collab_tamp::mip::MipModel;
use collab_tamp::{
    collides, load_scene, Action, Cmtg, GraspId, GroundedJointAction, ObjectId, RegionId, RobotId, Scene, Solid,
};
use rand::Rng;

pub const SUITE: [&str; 8] = [
    "unobstructed",
    "pick_chain",
    "place_occlusion",
    "handover",
    "parallel",
    "constrained_relocation",
    "unsat_fixed_blocked",
    "satisfied",
];

pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn fixture(rel: &str) -> Scene {
    let path = fixture_path(rel);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    load_scene(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn suite(name: &str) -> Scene {
    fixture(&format!("suite/{name}.json"))
}

pub fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// A schedule: the step (1-based) of every selected action.
pub type Schedule = BTreeMap<Action, usize>;

/// Random task graph and horizon: at most 6 objects, 8 actions, 2 robots
/// and horizon 3. Actions differ by grasp index, so they are all distinct.
pub fn random_cmtg<R: Rng>(rng: &mut R) -> (Cmtg, usize) {
    let robots = rng.gen_range(1..=2);
    let n_obj = rng.gen_range(1..=6);
    let n_act = rng.gen_range(1..=8);
    let mut g = Cmtg::new(robots);
    g.objects.extend((0..n_obj).map(ObjectId));
    let n_targets = rng.gen_range(1..=n_obj.min(2));
    g.targets.extend((0..n_targets).map(ObjectId));
    for k in 0..n_act {
        // Targets get the first actions so most graphs are feasible.
        let o = if k < n_targets { k } else { rng.gen_range(0..n_obj) };
        let pick = rng.gen_range(0..robots);
        let place = if rng.gen_bool(0.3) { rng.gen_range(0..robots) } else { pick };
        g.actions.insert(Action {
            object: ObjectId(o),
            region: RegionId(0),
            pick_robot: RobotId(pick),
            place_robot: RobotId(place),
            pick_grasp: GraspId(k as u32),
            place_grasp: GraspId(k as u32),
        });
    }
    let actions: Vec<Action> = g.actions.iter().copied().collect();
    for a in actions {
        for o in 0..n_obj {
            if o == a.object.0 {
                continue;
            }
            if rng.gen_bool(0.12) {
                g.block_pick.insert((a, ObjectId(o)));
            }
            if rng.gen_bool(0.08) {
                g.block_place.insert((a, ObjectId(o)));
            }
        }
    }
    g.check().expect("generator builds consistent graphs");
    (g, rng.gen_range(1..=3))
}

/// Like [`random_cmtg`], but three times in four the horizon is redrawn
/// among those that admit a schedule, so both outcomes are well covered.
pub fn random_instance<R: Rng>(rng: &mut R) -> (Cmtg, usize) {
    let (g, horizon) = random_cmtg(rng);
    let feasible: Vec<usize> = (1..=3).filter(|&t| brute_force_min(&g, t).is_some()).collect();
    if !feasible.is_empty() && rng.gen_bool(0.75) {
        let t = feasible[rng.gen_range(0..feasible.len())];
        return (g, t);
    }
    (g, horizon)
}

/// Whether a schedule is a legal plan for `g` with exactly `horizon` steps.
pub fn schedule_ok(g: &Cmtg, horizon: usize, s: &Schedule) -> bool {
    if s.values().any(|&k| k == 0 || k > horizon) {
        return false;
    }
    let step_of = |o: ObjectId| -> Vec<usize> { s.iter().filter(|(a, _)| a.object == o).map(|(_, k)| *k).collect() };
    for &o in &g.objects {
        let n = step_of(o).len();
        if n > 1 || (g.targets.contains(&o) && n != 1) {
            return false;
        }
    }
    for (a, &k) in s {
        // A non-target only moves to clear some selected action at or after it.
        if !g.targets.contains(&a.object) {
            let justified = g.block_edges().iter().any(|(b, m)| *m == a.object && s.get(b).is_some_and(|&kb| kb >= k));
            if !justified {
                return false;
            }
        }
        for (b, m) in &g.block_pick {
            if b == a && !step_of(*m).first().is_some_and(|&km| km < k) {
                return false;
            }
        }
        for (b, m) in &g.block_place {
            if b == a && !step_of(*m).first().is_some_and(|&km| km <= k) {
                return false;
            }
        }
    }
    for t in 1..=horizon {
        let at: Vec<&Action> = s.iter().filter(|(_, &k)| k == t).map(|(a, _)| a).collect();
        if at.is_empty() {
            return false;
        }
        for r in 0..g.robot_count {
            if at.iter().filter(|a| a.uses(RobotId(r))).count() > 1 {
                return false;
            }
        }
    }
    true
}

/// Every legal schedule, by exhaustive enumeration of per-object choices.
pub fn all_schedules(g: &Cmtg, horizon: usize) -> Vec<Schedule> {
    let objects: Vec<ObjectId> = g.objects.iter().copied().collect();
    let mut out = Vec::new();
    let mut cur = Schedule::new();
    fn rec(g: &Cmtg, h: usize, objs: &[ObjectId], cur: &mut Schedule, out: &mut Vec<Schedule>) {
        let Some((&o, rest)) = objs.split_first() else {
            if schedule_ok(g, h, cur) {
                out.push(cur.clone());
            }
            return;
        };
        rec(g, h, rest, cur, out);
        for a in g.actions_of(o).copied().collect::<Vec<_>>() {
            for k in 1..=h {
                cur.insert(a, k);
                rec(g, h, rest, cur, out);
                cur.remove(&a);
            }
        }
    }
    rec(g, horizon, &objects, &mut cur, &mut out);
    out
}

/// Minimum number of moved objects over all legal schedules.
pub fn brute_force_min(g: &Cmtg, horizon: usize) -> Option<usize> {
    all_schedules(g, horizon).iter().map(|s| s.len()).min()
}

/// The assignment vector of a schedule: `X[t, a] = 1` iff `t ≤ step(a)`,
/// and every block variable copies its action.
pub fn encode(model: &MipModel, s: &Schedule) -> Vec<bool> {
    let mut x = vec![false; model.num_vars()];
    for (i, a) in model.actions.iter().enumerate() {
        let k = s.get(a).copied().unwrap_or(0);
        for t in 1..=k.min(model.horizon) {
            x[model.action_var(t, i)] = true;
        }
    }
    for (j, (a, _)) in model.blocks.iter().enumerate() {
        let k = s.get(a).copied().unwrap_or(0);
        for t in 1..=k.min(model.horizon) {
            x[model.block_var(t, j)] = true;
        }
    }
    x
}

/// Reads an arbitrary assignment back as a schedule. `None` when the
/// vector is not of the shape `encode` produces.
pub fn decode(model: &MipModel, x: &[bool]) -> Option<Schedule> {
    let mut s = Schedule::new();
    for (i, a) in model.actions.iter().enumerate() {
        let profile: Vec<bool> = (1..=model.horizon).map(|t| x[model.action_var(t, i)]).collect();
        let k = profile.iter().take_while(|b| **b).count();
        if profile[k..].iter().any(|b| *b) {
            return None;
        }
        if k > 0 {
            s.insert(*a, k);
        }
    }
    for (j, (a, _)) in model.blocks.iter().enumerate() {
        let i = model.actions.iter().position(|b| b == a)?;
        if (1..=model.horizon).any(|t| x[model.block_var(t, j)] != x[model.action_var(t, i)]) {
            return None;
        }
    }
    Some(s)
}

pub fn oracle_accepts(g: &Cmtg, model: &MipModel, x: &[bool]) -> bool {
    decode(model, x).is_some_and(|s| schedule_ok(g, model.horizon, &s))
}

/// Movables left in place by `steps` whose initial footprint touches a
/// corridor or placement of `steps`, recomputed straight from the geometry.
pub fn occluders(scene: &Scene, steps: &[GroundedJointAction]) -> BTreeSet<ObjectId> {
    let mut moved = BTreeSet::new();
    let mut volume: Vec<Solid> = Vec::new();
    for s in steps {
        for (a, p) in s.actions() {
            moved.insert(a.object);
            volume.push(scene.object_solid(a.object, p));
        }
        volume.extend(s.corridors().into_iter().map(|(_, c)| Solid::Capsule(c)));
    }
    (0..scene.movables.len())
        .map(ObjectId)
        .filter(|o| !moved.contains(o))
        .filter(|o| volume.iter().any(|v| collides(&scene.initial_solid(*o), v)))
        .collect()
}

/// Goal objects neither moved by `steps` nor already in their goal.
pub fn unfinished_goals(scene: &Scene, steps: &[GroundedJointAction]) -> BTreeSet<ObjectId> {
    let moved: BTreeSet<ObjectId> = steps.iter().flat_map(|s| s.moved_objects()).collect();
    scene
        .goal
        .iter()
        .map(|(o, _)| *o)
        .filter(|o| !moved.contains(o))
        .filter(|o| !scene.satisfies_goal(*o, &scene.object(*o).pose))
        .collect()
}
