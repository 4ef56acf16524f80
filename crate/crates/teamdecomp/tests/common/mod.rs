#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use teamdecomp::generators::{parse_efg, random_game, Cnf, RandomGameConfig};
use teamdecomp::game::{GameTree, Team};
use teamdecomp::solver::{pure_strategies, OracleError};

/// Small random games whose teams each have at most `cap` reduced pure
/// strategies, taken in seed order.
pub fn small_random_games(count: usize, cap: usize) -> Vec<(u64, GameTree)> {
    let cfg = RandomGameConfig::default();
    let mut out = Vec::new();
    for seed in 0.. {
        if out.len() == count {
            break;
        }
        let g = random_game(seed, &cfg);
        let fits = Team::BOTH.iter().all(|&t| !matches!(pure_strategies(&g, t, cap), Err(OracleError::CapExceeded { .. })));
        if fits && g.len() <= cfg.max_nodes {
            out.push((seed, g));
        }
    }
    out
}

/// Random 3-CNFs over at most 4 variables with at most 5 clauses, split into
/// `per_kind` satisfiable and `per_kind` unsatisfiable formulas.
pub fn random_cnfs(per_kind: usize, seed: u64) -> (Vec<Cnf>, Vec<Cnf>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut sat, mut unsat) = (Vec::new(), Vec::new());
    while sat.len() < per_kind || unsat.len() < per_kind {
        let vars = rng.gen_range(1..=4usize);
        let m = rng.gen_range(1..=5usize);
        let clauses: Vec<[i32; 3]> = (0..m)
            .map(|_| {
                let mut lit = || {
                    let v = rng.gen_range(1..=vars as i32);
                    if rng.gen_bool(0.5) { v } else { -v }
                };
                [lit(), lit(), lit()]
            })
            .collect();
        let cnf = Cnf { vars, clauses };
        if cnf.is_satisfiable() {
            if sat.len() < per_kind {
                sat.push(cnf);
            }
        } else if unsat.len() < per_kind {
            unsat.push(cnf);
        }
    }
    (sat, unsat)
}

/// The single-team example game with a chance root (node 1), two player
/// nodes (2, 3) and two infosets {4, 5} and {6, 7} of a second player.
/// Returns the game and, per game node index, its label in the example.
pub fn example_game() -> (GameTree, Vec<u32>) {
    let text = r#"{"nodes":[
{"parent":null,"action":"","kind":"chance","probs":["1/2","1/2"]},
{"parent":0,"action":"a","kind":"decision","team":"plus","player":0,"infoset":0},
{"parent":0,"action":"b","kind":"decision","team":"plus","player":0,"infoset":1},
{"parent":1,"action":"l","kind":"decision","team":"plus","player":1,"infoset":2},
{"parent":1,"action":"r","kind":"decision","team":"plus","player":1,"infoset":3},
{"parent":2,"action":"l","kind":"decision","team":"plus","player":1,"infoset":2},
{"parent":2,"action":"r","kind":"decision","team":"plus","player":1,"infoset":3},
{"parent":3,"action":"x","kind":"terminal","payoff":"0"},
{"parent":3,"action":"y","kind":"terminal","payoff":"0"},
{"parent":5,"action":"x","kind":"terminal","payoff":"0"},
{"parent":5,"action":"y","kind":"terminal","payoff":"0"},
{"parent":4,"action":"u","kind":"terminal","payoff":"0"},
{"parent":4,"action":"v","kind":"terminal","payoff":"0"},
{"parent":6,"action":"u","kind":"terminal","payoff":"0"},
{"parent":6,"action":"v","kind":"terminal","payoff":"0"}
]}"#;
    let labels = vec![1, 2, 3, 4, 6, 5, 7, 8, 9, 10, 11, 12, 13, 14, 15];
    (parse_efg(text).expect("example game parses"), labels)
}
