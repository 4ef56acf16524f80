mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use teamdecomp::decomposition::{build_decomposition, verify_decomposition};
use teamdecomp::feasible::{enumerate_feasible, reachability_stats, DEFAULT_CAP};
use teamdecomp::game::{build_team_view, validate, Team};
use teamdecomp::generators::{parse_efg, random_game, to_efg_string, RandomGameConfig};
use teamdecomp::lp::{point_of_plan, polytope_description, satisfies};
use teamdecomp::pipeline::{run, Options};
use teamdecomp::solver::{brute_force_value, class_plan, pure_strategies, Mode, Number, OracleError};

fn small_config() -> RandomGameConfig {
    RandomGameConfig { max_depth: 5, max_branch: 3, max_nodes: 80, players_per_team: 2 }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn random_games_are_valid_and_round_trip(seed in any::<u64>()) {
        let g = random_game(seed, &RandomGameConfig::default());
        prop_assert!(validate(&g).is_valid());
        let text = to_efg_string(&g);
        let back = parse_efg(&text).unwrap();
        prop_assert_eq!(to_efg_string(&back), text);
        prop_assert_eq!(back.nodes(), g.nodes());
    }

    #[test]
    fn decompositions_verify(seed in any::<u64>()) {
        let g = random_game(seed, &RandomGameConfig::default());
        for team in Team::BOTH {
            let view = build_team_view(&g, team).unwrap();
            let dec = build_decomposition(&view).unwrap();
            prop_assert!(verify_decomposition(&dec, &view));
            let sets = enumerate_feasible(&dec, &view, &g, DEFAULT_CAP).unwrap();
            let reach = reachability_stats(&sets, &dec, &view);
            prop_assert!(reach.bounds_hold());
            prop_assert_eq!(reach.sum_xc, sets.total());
        }
    }

    #[test]
    fn pure_plans_are_polytope_vertices(seed in any::<u64>()) {
        let g = random_game(seed, &small_config());
        for team in Team::BOTH {
            let Ok(strategies) = pure_strategies(&g, team, 2_000) else { continue };
            let view = build_team_view(&g, team).unwrap();
            let dec = build_decomposition(&view).unwrap();
            let sets = enumerate_feasible(&dec, &view, &g, DEFAULT_CAP).unwrap();
            let all: Vec<usize> = (0..view.len()).collect();
            let desc = polytope_description(team, &dec, &sets, &all).unwrap();
            for s in strategies.iter().take(50) {
                let plan = class_plan(&view, s);
                let mu = point_of_plan(&desc, &dec, &sets, &plan).expect("pure plan restricts into every X_C");
                prop_assert!(satisfies(&desc, &mu));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn pipeline_matches_oracle(seed in any::<u64>()) {
        let g = random_game(seed, &small_config());
        let oracle = match brute_force_value(&g, 5_000) {
            Ok(o) => o,
            Err(OracleError::CapExceeded { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let r = run(&g, &Options { mode: Some(Mode::Exact), ..Options::default() }).unwrap();
        prop_assert_eq!(r.value, Number::Exact(oracle.value));
        prop_assert!(r.gap.unwrap().is_zero());
    }
}

#[test]
fn fixed_random_games_have_matching_feasible_sets() {
    for (seed, g) in common::small_random_games(5, 10_000) {
        for team in Team::BOTH {
            let view = build_team_view(&g, team).unwrap();
            let dec = build_decomposition(&view).unwrap();
            let sets = enumerate_feasible(&dec, &view, &g, DEFAULT_CAP).unwrap();
            let brute = teamdecomp::solver::brute_force_feasible(&g, &view, &dec, 10_000).unwrap();
            for (b, set) in sets.sets.iter().enumerate() {
                let ours: BTreeSet<_> = set.assignments.iter().cloned().collect();
                assert_eq!(ours, brute[b], "seed {seed}, {team}, bag {b}");
            }
        }
    }
}
