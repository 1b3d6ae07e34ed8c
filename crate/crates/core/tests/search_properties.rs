mod common;

use std::collections::BTreeSet;

use collab_tamp::mip::TaskSkeleton;
use collab_tamp::search::{open_goals, skeletons_for, ucb, SearchTree};
use collab_tamp::{
    compute_facts, ground, plan, validate_plan, Action, GraspId, GroundedJointAction, GroundingContext,
    GroundingOutcome, ObjectId, Plan, PlannerConfig, RegionId, RobotId,
};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sk(i: usize) -> TaskSkeleton {
    TaskSkeleton::new(vec![vec![Action::single(ObjectId(i % 3), RegionId(0), RobotId(0), GraspId(0))]])
}

/// A random tree: edges get evaluated, expanded, pruned or left fresh.
fn random_tree(seed: u64) -> SearchTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = SearchTree::with_root((0..rng.gen_range(0..4)).map(sk).collect());
    for _ in 0..rng.gen_range(0..12) {
        if t.edges.is_empty() {
            break;
        }
        let e = rng.gen_range(0..t.edges.len());
        if t.edges[e].evaluated {
            continue;
        }
        t.edges[e].evaluated = true;
        t.edges[e].visits = rng.gen_range(1..5);
        t.edges[e].value = rng.gen_range(0.0..2.0);
        match rng.gen_range(0..3) {
            0 => t.edges[e].pruned = true,
            _ => {
                let h = t.nodes.len();
                t.nodes.push(t.nodes[0].clone());
                t.nodes[h].children.clear();
                t.nodes[h].visits = rng.gen_range(0..5);
                t.nodes[h].terminal = rng.gen_bool(0.2);
                t.edges[e].head = Some(h);
                let k = rng.gen_range(0..3);
                t.attach(h, (0..k).map(sk).collect());
            }
        }
    }
    t.nodes[0].visits = rng.gen_range(0..20);
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn selection_follows_open_maximal_edges(seed in any::<u64>(), c in 0.0..3.0f64) {
        let t = random_tree(seed);
        let Some(path) = t.select(c) else {
            prop_assert!(!t.node_open(0));
            return Ok(());
        };
        let mut node = 0;
        for (i, &e) in path.iter().enumerate() {
            prop_assert_eq!(t.edges[e].tail, node);
            prop_assert!(t.is_open(e));
            let best = t.nodes[node]
                .children
                .iter()
                .filter(|&&s| t.is_open(s))
                .map(|&s| ucb(&t.nodes[node], &t.edges[s], c))
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(ucb(&t.nodes[node], &t.edges[e], c), best);
            if i + 1 < path.len() {
                node = t.edges[e].head.expect("inner path edges are expanded");
            } else {
                prop_assert!(!t.edges[e].evaluated);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grounding_keeps_the_suffix(seed in 0u64..1000) {
        let scene = suite("pick_chain");
        let facts = compute_facts(&scene);
        let cfg = PlannerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut suffix: Vec<GroundedJointAction> = Vec::new();
        let mut targets = open_goals(&scene);
        for _ in 0..4 {
            let excluded: BTreeSet<ObjectId> = suffix.iter().flat_map(GroundedJointAction::moved_objects).collect();
            let Some(sk) = skeletons_for(&targets, &excluded, &facts, &scene, &cfg).into_iter().next() else { break };
            let ctx = GroundingContext::from_suffix(&scene, suffix.clone(), &sk);
            match ground(&sk, &ctx, &scene, &mut rng, &cfg.grounding).unwrap() {
                GroundingOutcome::Failure => break,
                GroundingOutcome::Full { steps } => {
                    prop_assert_eq!(&steps[steps.len() - suffix.len()..], &suffix[..]);
                    prop_assert_eq!(steps.len(), suffix.len() + sk.len());
                    prop_assert!(validate_plan(&scene, &Plan::new(steps)).unwrap().valid);
                    break;
                }
                GroundingOutcome::Partial { steps, conflicts } => {
                    prop_assert_eq!(&steps[steps.len() - suffix.len()..], &suffix[..]);
                    let mut oracle = occluders(&scene, &steps);
                    oracle.extend(unfinished_goals(&scene, &steps));
                    prop_assert_eq!(&conflicts, &oracle);
                    suffix = steps;
                    targets = conflicts;
                }
            }
        }
    }

    #[test]
    fn planning_is_reproducible(seed in any::<u64>(), which in 0usize..SUITE.len()) {
        let scene = suite(SUITE[which]);
        let cfg = PlannerConfig { seed, ..PlannerConfig::default() };
        let a = plan(&scene, &cfg).unwrap();
        let b = plan(&scene, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        if let Ok(p) = &a.result {
            prop_assert_eq!(p.makespan, p.steps.len());
            let moved: BTreeSet<ObjectId> = p.steps.iter().flat_map(|s| s.moved_objects()).collect();
            prop_assert_eq!(p.motion_cost, moved.len());
            prop_assert!(validate_plan(&scene, p).unwrap().valid);
        }
    }
}

#[test]
fn small_handover_fixture_plans_across_seeds() {
    let scene = fixture("test/pa_small.json");
    for seed in 0..20 {
        let out = plan(&scene, &PlannerConfig { seed, ..PlannerConfig::default() }).unwrap();
        let p = out.result.expect("pa_small is solvable");
        assert!(validate_plan(&scene, &p).unwrap().valid);
        assert!(p.handover_steps() >= 1);
    }
}
