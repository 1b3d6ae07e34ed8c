mod common;

use std::collections::BTreeSet;

use collab_tamp::mip::{
    compile_model, enumerate_skeletons, extract_skeleton, solve, EnumerateConfig, SolveStatus, TaskSkeleton,
};
use collab_tamp::{Action, Cmtg};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> (Cmtg, usize) {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn as_schedule(sk: &TaskSkeleton) -> Schedule {
    sk.steps.iter().enumerate().flat_map(|(k, acts)| acts.iter().map(move |a| (*a, k + 1))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_matches_brute_force(seed in any::<u64>()) {
        let (g, horizon) = instance(seed);
        let model = compile_model(&g, horizon);
        let got = match solve(&model, 1_000_000).unwrap() {
            SolveStatus::Optimal(sol) => {
                prop_assert!(model.is_feasible(&sol.assignment));
                prop_assert_eq!(model.objective_value(&sol.assignment), sol.objective);
                Some(sol.objective as usize)
            }
            SolveStatus::Infeasible => None,
        };
        prop_assert_eq!(got, brute_force_min(&g, horizon));
    }

    #[test]
    fn optimal_skeletons_respect_precedence(seed in any::<u64>()) {
        let (g, horizon) = instance(seed);
        let model = compile_model(&g, horizon);
        if let SolveStatus::Optimal(sol) = solve(&model, 1_000_000).unwrap() {
            let sk = extract_skeleton(&sol, &model).unwrap();
            prop_assert_eq!(sk.len(), horizon);
            prop_assert!(schedule_ok(&g, horizon, &as_schedule(&sk)));
            for (a, m) in &g.block_pick {
                if let Some(k) = sk.steps.iter().position(|s| s.contains(a)) {
                    prop_assert!(sk.steps[..k].iter().flatten().any(|b| b.object == *m));
                }
            }
        }
    }

    #[test]
    fn enumerated_skeletons_are_distinct_and_legal(seed in any::<u64>()) {
        let (g, _) = instance(seed);
        let cfg = EnumerateConfig { t_max: 3, k_max: 6, node_limit: 1_000_000 };
        let sks = enumerate_skeletons(&g, &cfg).unwrap();
        let mut selections: BTreeSet<BTreeSet<Action>> = BTreeSet::new();
        for sk in &sks {
            prop_assert!(schedule_ok(&g, sk.len(), &as_schedule(sk)));
            prop_assert!(selections.insert(sk.steps.iter().flatten().copied().collect()));
        }
        let first_feasible = (1..=3).find_map(|t| brute_force_min(&g, t));
        prop_assert_eq!(sks.first().map(|s| s.size()), first_feasible);
    }
}

/// Every assignment of a small model, not just perturbations of good ones.
#[test]
fn rows_agree_with_oracle_on_every_assignment_of_small_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 40 {
        let (g, horizon) = random_cmtg(&mut rng);
        let model = compile_model(&g, horizon);
        let n = model.num_vars();
        if n > 14 {
            continue;
        }
        for bits in 0u32..(1 << n) {
            let x: Vec<bool> = (0..n).map(|v| bits >> v & 1 == 1).collect();
            assert_eq!(model.is_feasible(&x), oracle_accepts(&g, &model, &x), "graph {g:?} horizon {horizon} x {x:?}");
        }
        checked += 1;
    }
}
