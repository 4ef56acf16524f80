//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use statrs::distribution::{ChiSquared, ContinuousCDF};

use teamdecomp::decomposition::{build_decomposition, sample_joint, verify_decomposition};
use teamdecomp::feasible::{enumerate_feasible, Assignment, DEFAULT_CAP};
use teamdecomp::game::{build_team_view, build_team_view_with, ClassKind, GameTree, Team, ViewKind};
use teamdecomp::generators::{generate, make_sat_game, make_width_gap_game, GameSpec};
use teamdecomp::lp::lp_size;
use teamdecomp::pipeline::{prepare, run, Options, TeamModel};
use teamdecomp::rational::{q, qi};
use teamdecomp::solver::{brute_force_feasible, brute_force_value, class_plan, pure_strategies, Mode, Number};

type Outcome = Result<String, String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn named(name: &str) -> GameTree {
    generate(&GameSpec::from_name(name).expect("known name")).expect("generates")
}

const STAGE_LIMIT: Duration = Duration::from_secs(30);
const SOLVE_LIMIT: Duration = Duration::from_secs(15 * 60);

fn kuhn_stats() -> Outcome {
    let expected = [("21K3", 91, 351, 25, 25), ("21K4", 177, 1749, 33, 33), ("21K6", 433, 52669, 49, 49)];
    let mut slowest = Duration::ZERO;
    for (name, seq_p, sum_p, seq_m, sum_m) in expected {
        let t = Instant::now();
        let game = named(name);
        let gen = t.elapsed();
        let p = prepare(&game, DEFAULT_CAP).map_err(|e| format!("{name}: {e}"))?;
        let (plus, minus) = (p.plus.stats(&game), p.minus.stats(&game));
        let got = (plus.seq_count, plus.sum_xc, minus.seq_count, minus.sum_xc);
        ensure(got == (seq_p, sum_p, seq_m, sum_m), || format!("{name}: got {got:?}"))?;
        let t = Instant::now();
        p.saddle().map_err(|e| e.to_string())?;
        let assemble = t.elapsed();
        let stages = [gen, assemble]
            .into_iter()
            .chain(p.timings.iter().map(|(_, ms)| Duration::from_millis(*ms as u64)));
        let worst = stages.max().unwrap_or_default();
        ensure(worst < STAGE_LIMIT, || format!("{name}: a stage took {worst:?}"))?;
        slowest = slowest.max(worst);
    }
    Ok(format!("all six counts match; slowest stage {slowest:.1?}"))
}

fn game_values() -> Outcome {
    let cases = [
        ("21K3", 0.0, Some(Mode::Exact)),
        ("21K4", -0.0417, Some(Mode::Exact)),
        ("21K6", -0.0236, None),
        ("21GL", 0.2524, None),
        ("21G", 0.2534, None),
        ("21D3", 0.2840, None),
    ];
    let mut lines = Vec::new();
    for (name, target, mode) in cases {
        let t = Instant::now();
        let game = named(name);
        let r = run(&game, &Options { mode, ..Options::default() }).map_err(|e| format!("{name}: {e}"))?;
        let took = t.elapsed();
        let v = r.value.to_f64();
        ensure((v - target).abs() <= 5e-4, || format!("{name}: value {v:.5}, expected {target}"))?;
        ensure(took <= SOLVE_LIMIT, || format!("{name}: took {took:?}"))?;
        if mode == Some(Mode::Exact) {
            ensure(matches!(r.value, Number::Exact(_)), || format!("{name}: not solved exactly"))?;
            ensure(r.gap.as_ref().is_some_and(|g| matches!(g, Number::Exact(_)) && g.is_zero()), || {
                format!("{name}: gap {:?}", r.gap)
            })?;
        }
        lines.push(format!("{name}={} in {:.1?}", r.value, took));
    }
    Ok(lines.join(", "))
}

fn width_gap() -> Outcome {
    let t = Instant::now();
    for k in 1..=6 {
        let game = make_width_gap_game(k).map_err(|e| e.to_string())?;
        let view = build_team_view(&game, Team::Plus).map_err(|e| e.to_string())?;
        let model = TeamModel::build(&game, view, DEFAULT_CAP).map_err(|e| e.to_string())?;
        ensure(model.widths.treewidth == 6 * k - 1, || format!("k={k}: treewidth {}", model.widths.treewidth))?;
        let mut p2_bags = 0;
        for (b, bag) in model.dec.bags.iter().enumerate() {
            let p2 = bag.c_minus.iter().any(|&c| match model.view.class_kind[c] {
                ClassKind::TeamDecision(i) => game.infoset(i).player == 1,
                ClassKind::PassThrough => false,
            });
            if p2 {
                p2_bags += 1;
                let w = model.reach.per_bag[b].w;
                ensure(w == 2, || format!("k={k}: P2 bag {b} has w = {w}"))?;
            }
        }
        ensure(p2_bags > 0, || format!("k={k}: no P2 decision bag"))?;
    }
    let took = t.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("k = 1..6 in {took:.1?}"))
}

fn sat_games() -> Outcome {
    let t = Instant::now();
    let (sat, unsat) = common::random_cnfs(10, 7);
    for (cnf, satisfiable) in sat.iter().map(|c| (c, true)).chain(unsat.iter().map(|c| (c, false))) {
        let m = cnf.clauses.len() as i64;
        let game = make_sat_game(cnf).map_err(|e| e.to_string())?;
        let r = run(&game, &Options { mode: Some(Mode::Exact), equilibrium: false, ..Options::default() })
            .map_err(|e| format!("{cnf:?}: {e}"))?;
        let v = r.value.as_exact().cloned().ok_or("value is not exact")?;
        if satisfiable {
            ensure(v == qi(1), || format!("{cnf:?}: satisfiable but value {v}"))?;
        } else {
            ensure(v <= qi(1) - q(1, m), || format!("{cnf:?}: unsatisfiable but value {v}"))?;
        }
        ensure((v >= qi(1) - q(1, 2 * m)) == cnf.is_satisfiable(), || format!("{cnf:?}: threshold test disagrees"))?;
    }
    let took = t.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("10 satisfiable, 10 unsatisfiable in {took:.1?}"))
}

fn oracle_equivalence(games: &[(u64, GameTree)]) -> Outcome {
    for (seed, game) in games {
        let r = run(game, &Options { mode: Some(Mode::Exact), equilibrium: false, ..Options::default() })
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let oracle = brute_force_value(game, 10_000).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(r.value == Number::Exact(oracle.value.clone()), || {
            format!("seed {seed}: pipeline {} vs oracle {}", r.value, oracle.value)
        })?;
    }
    Ok(format!("{} random games agree exactly", games.len()))
}

fn feasible_equivalence(games: &[(u64, GameTree)]) -> Outcome {
    let mut bags = 0;
    for (seed, game) in games {
        for team in Team::BOTH {
            let view = build_team_view(game, team).map_err(|e| e.to_string())?;
            let dec = build_decomposition(&view).map_err(|e| e.to_string())?;
            let sets = enumerate_feasible(&dec, &view, game, DEFAULT_CAP).map_err(|e| e.to_string())?;
            let brute = brute_force_feasible(game, &view, &dec, 10_000).map_err(|e| e.to_string())?;
            for (b, set) in sets.sets.iter().enumerate() {
                let ours: BTreeSet<Assignment> = set.assignments.iter().cloned().collect();
                ensure(ours.len() == set.assignments.len(), || format!("seed {seed} {team} bag {b}: duplicates"))?;
                ensure(ours == brute[b], || format!("seed {seed} {team} bag {b}: {} vs {} assignments", ours.len(), brute[b].len()))?;
                bags += 1;
            }
        }
    }
    Ok(format!("{bags} bags equal as sets"))
}

fn benchmark_games() -> Vec<(String, GameTree)> {
    let mut out: Vec<(String, GameTree)> =
        ["21K3", "21K4", "21K6", "21GL", "21G", "21D3", "21L133"].iter().map(|n| (n.to_string(), named(n))).collect();
    for k in 1..=6 {
        out.push((format!("width-gap k={k}"), make_width_gap_game(k).expect("width gap")));
    }
    out
}

fn decomposition_validity(benchmarks: &[(String, GameTree)], games: &[(u64, GameTree)]) -> Outcome {
    let all = benchmarks.iter().map(|(n, g)| (n.clone(), g)).chain(games.iter().map(|(s, g)| (format!("seed {s}"), g)));
    let mut count = 0;
    for (name, game) in all {
        for team in Team::BOTH {
            let view = build_team_view(game, team).map_err(|e| e.to_string())?;
            let dec = build_decomposition(&view).map_err(|e| format!("{name}: {e}"))?;
            ensure(verify_decomposition(&dec, &view), || format!("{name} {team}: verify_decomposition failed"))?;
            let home = dec.minus_bag();
            for (i, classes) in view.infoset_classes() {
                let bags: BTreeSet<Option<usize>> = classes.iter().map(|&c| home[c]).collect();
                ensure(bags.len() == 1 && !bags.contains(&None), || format!("{name} {team}: infoset {i} spans {bags:?}"))?;
            }
            count += 1;
        }
    }
    Ok(format!("{count} decompositions valid"))
}

fn bound_audits(benchmarks: &[(String, GameTree)]) -> Outcome {
    let mut checked = 0;
    for (name, game) in benchmarks {
        for team in Team::BOTH {
            let view = build_team_view(game, team).map_err(|e| e.to_string())?;
            let model = TeamModel::build(game, view, DEFAULT_CAP).map_err(|e| e.to_string())?;
            for b in &model.reach.per_bag {
                ensure(b.within_bounds(), || format!("{name} {team} bag {}: |X_C| = {} above {}", b.bag, b.size, b.binomial_bound))?;
                checked += 1;
            }
            let goofspiel = name.contains('G');
            let single = game.players(team).len() == 1;
            if goofspiel || single {
                ensure(model.reach.reachable_width == 1, || {
                    format!("{name} {team}: reachable width {}", model.reach.reachable_width)
                })?;
            }
        }
    }
    Ok(format!("{checked} bags within the binomial bound"))
}

fn sampling(games: &[(u64, GameTree)]) -> Outcome {
    const DRAWS: usize = 10_000;
    let weights = [0.5, 0.3, 0.2];
    let mut tests = 0;
    let mut min_p: f64 = 1.0;
    let mut used = 0;
    for (seed, game) in games {
        if used == 5 {
            break;
        }
        let view = build_team_view(game, Team::Plus).map_err(|e| e.to_string())?;
        let dec = build_decomposition(&view).map_err(|e| e.to_string())?;
        let sets = enumerate_feasible(&dec, &view, game, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let mut plans: Vec<Vec<bool>> = Vec::new();
        for s in pure_strategies(game, Team::Plus, 10_000).map_err(|e| e.to_string())? {
            let p = class_plan(&view, &s);
            if !plans.contains(&p) {
                plans.push(p);
            }
        }
        if plans.len() < 3 {
            continue;
        }
        let picks = [&plans[0], &plans[plans.len() / 2], &plans[plans.len() - 1]];
        let index: Vec<HashMap<&Assignment, usize>> =
            sets.sets.iter().map(|s| s.assignments.iter().enumerate().map(|(j, a)| (a, j)).collect()).collect();
        let mut dists: Vec<Vec<f64>> = sets.sets.iter().map(|s| vec![0.0; s.len()]).collect();
        for (plan, w) in picks.iter().zip(weights) {
            for (b, bag) in dec.bags.iter().enumerate() {
                let a: Assignment = bag.c_minus.iter().chain(&bag.c_plus).map(|&c| plan[c]).collect();
                dists[b][index[b][&a]] += w;
            }
        }
        let mut sampler = sample_joint(&dec, &sets, &dists, *seed).map_err(|e| e.to_string())?;
        let mut counts: Vec<Vec<usize>> = dists.iter().map(|d| vec![0; d.len()]).collect();
        for _ in 0..DRAWS {
            let d = sampler.draw();
            for (b, &j) in d.per_bag.iter().enumerate() {
                counts[b][j] += 1;
            }
        }
        for (b, (d, c)) in dists.iter().zip(&counts).enumerate() {
            let support: Vec<usize> = (0..d.len()).filter(|&j| d[j] > 0.0).collect();
            ensure((0..d.len()).all(|j| d[j] > 0.0 || c[j] == 0), || format!("seed {seed} bag {b}: drew a zero-mass assignment"))?;
            if support.len() < 2 {
                continue;
            }
            let stat: f64 = support
                .iter()
                .map(|&j| {
                    let e = d[j] * DRAWS as f64;
                    (c[j] as f64 - e).powi(2) / e
                })
                .sum();
            let chi = ChiSquared::new((support.len() - 1) as f64).map_err(|e| e.to_string())?;
            let p = 1.0 - chi.cdf(stat);
            ensure(p > 0.001, || format!("seed {seed} bag {b}: chi-square p = {p:.2e}"))?;
            min_p = min_p.min(p);
            tests += 1;
        }
        used += 1;
    }
    ensure(used == 5, || format!("only {used} games had three distinct plans"))?;
    Ok(format!("{tests} bag marginals over 5 games, smallest p = {min_p:.3}"))
}

fn lp_sizes() -> Outcome {
    let mut parts = Vec::new();
    for (name, lo, hi) in [("21K3", 1193, 4772), ("21K4", 9405, 37620)] {
        let p = prepare(&named(name), DEFAULT_CAP).map_err(|e| e.to_string())?;
        let nnz = lp_size(&p.saddle().map_err(|e| e.to_string())?);
        ensure((lo..=hi).contains(&nnz), || format!("{name}: nnz {nnz} outside [{lo}, {hi}]"))?;
        parts.push(format!("{name} nnz {nnz}"));
    }
    Ok(parts.join(", "))
}

fn example_decomposition() -> Outcome {
    let (game, labels) = common::example_game();
    let view = build_team_view_with(&game, Team::Plus, ViewKind::Depth).map_err(|e| e.to_string())?;
    let dec = build_decomposition(&view).map_err(|e| e.to_string())?;
    let label_set = |classes: &[usize]| -> BTreeSet<u32> { classes.iter().flat_map(|&c| view.members[c].iter().map(|&h| labels[h])).collect() };
    let got: BTreeSet<(BTreeSet<u32>, BTreeSet<u32>)> =
        dec.bags.iter().map(|b| (label_set(&b.c_minus), label_set(&b.c_plus))).collect();
    let set = |v: &[u32]| v.iter().copied().collect::<BTreeSet<u32>>();
    let expected: BTreeSet<_> = [
        (set(&[1]), set(&[2, 3])),
        (set(&[2, 3]), set(&[4, 5, 6, 7])),
        (set(&[4, 5]), set(&[8, 9, 10, 11])),
        (set(&[6, 7]), set(&[12, 13, 14, 15])),
    ]
    .into_iter()
    .collect();
    ensure(got == expected, || format!("bags {got:?}"))?;
    ensure(verify_decomposition(&dec, &view), || "verify_decomposition failed".into())?;
    Ok("4 bags as in the worked example".into())
}

fn main() {
    let games = common::small_random_games(20, 10_000);
    let benchmarks = benchmark_games();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 Kuhn structural statistics", Box::new(kuhn_stats)),
        ("2 game values", Box::new(game_values)),
        ("3 width-gap family", Box::new(width_gap)),
        ("4 SAT-game classification", Box::new(sat_games)),
        ("5 oracle equivalence", Box::new(|| oracle_equivalence(&games))),
        ("6 feasible sets vs brute force", Box::new(|| feasible_equivalence(&games))),
        ("7 decomposition validity", Box::new(|| decomposition_validity(&benchmarks, &games))),
        ("8 bound audits", Box::new(|| bound_audits(&benchmarks))),
        ("9 junction-tree sampling", Box::new(|| sampling(&games))),
        ("10 LP size", Box::new(lp_sizes)),
        ("worked example decomposition", Box::new(example_decomposition)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail})");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
