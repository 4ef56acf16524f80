use teamdecomp::generators::{make_kuhn, parse_efg};
use teamdecomp::lp::{export_lp, ExportFormat};
use teamdecomp::pipeline::{prepare, run, solve_prepared, Options};
use teamdecomp::rational::{q, qi, Q};
use teamdecomp::solver::{
    best_response_value, brute_force_value, equilibrium_gap, evaluate, extract_plan, solve_model_file, Mode, Number,
    RealizationPlan,
};
use teamdecomp::feasible::DEFAULT_CAP;
use teamdecomp::game::{GameTree, Team};

fn matching_pennies() -> GameTree {
    parse_efg(
        r#"{"nodes":[
{"parent":null,"action":"","kind":"decision","team":"plus","player":0,"infoset":0},
{"parent":0,"action":"H","kind":"decision","team":"minus","player":0,"infoset":1},
{"parent":0,"action":"T","kind":"decision","team":"minus","player":0,"infoset":1},
{"parent":1,"action":"H","kind":"terminal","payoff":"1"},
{"parent":1,"action":"T","kind":"terminal","payoff":"-1"},
{"parent":2,"action":"H","kind":"terminal","payoff":"-1"},
{"parent":2,"action":"T","kind":"terminal","payoff":"1"}
]}"#,
    )
    .unwrap()
}

fn exact(values: &[Q]) -> Vec<Number> {
    values.iter().cloned().map(Number::Exact).collect()
}

#[test]
fn matching_pennies_solves_to_zero_both_ways() {
    let g = matching_pennies();
    let r = run(&g, &Options { mode: Some(Mode::Exact), ..Options::default() }).unwrap();
    assert_eq!(r.value, Number::Exact(qi(0)));
    assert!(r.gap.unwrap().is_zero());
    assert_eq!(brute_force_value(&g, 100).unwrap().value, qi(0));
}

#[test]
fn uniform_plan_in_matching_pennies_concedes_nothing() {
    let g = matching_pennies();
    let p = prepare(&g, DEFAULT_CAP).unwrap();
    let half = q(1, 2);
    let uniform: Vec<Q> =
        (0..p.plus.view.len()).map(|c| if p.plus.view.parent[c].is_none() { qi(1) } else { half.clone() }).collect();
    let x = RealizationPlan { team: Team::Plus, values: exact(&uniform) };
    let v = best_response_value(&p.desc_minus, &p.payoff, &x, Mode::Exact).unwrap();
    assert_eq!(v, Number::Exact(qi(0)));
}

#[test]
fn point_mass_lambda_gives_the_pure_plan_back() {
    let g = make_kuhn(2, 1, 3).unwrap();
    let p = prepare(&g, DEFAULT_CAP).unwrap();
    let d = &p.desc_plus;
    let mut lambda = vec![qi(0); d.columns()];
    let strategy = teamdecomp::solver::pure_strategies(&g, Team::Plus, 1_000_000).unwrap().swap_remove(0);
    let plan = teamdecomp::solver::class_plan(&p.plus.view, &strategy);
    let mu = teamdecomp::lp::point_of_plan(d, &p.plus.dec, &p.plus.sets, &plan).unwrap();
    lambda[..mu.len()].clone_from_slice(&mu);
    let extracted = extract_plan(d, &p.plus.dec, &p.plus.sets, &exact(&lambda)).unwrap();
    let got: Vec<bool> = extracted.plan.values.iter().map(|v| !v.is_zero()).collect();
    assert_eq!(got, plan);
    assert_eq!(extracted.max_clamp, 0.0);
}

#[test]
fn kuhn_equilibrium_is_tight_and_an_always_bet_plan_is_exploitable() {
    let g = make_kuhn(2, 1, 3).unwrap();
    let p = prepare(&g, DEFAULT_CAP).unwrap();
    let (s, _) = solve_prepared(&p, &Options { mode: Some(Mode::Exact), ..Options::default() }).unwrap();
    let y = s.plan_minus.clone().unwrap();
    let x = s.plan_plus.clone();
    assert_eq!(evaluate(&p.payoff, &x, &y), s.value);
    assert_eq!(best_response_value(&p.desc_minus, &p.payoff, &x, Mode::Exact).unwrap(), s.value);
    assert_eq!(best_response_value(&p.desc_plus, &p.payoff, &y, Mode::Exact).unwrap(), s.value);
    assert_eq!(equilibrium_gap(&x, &y, &p.desc_plus, &p.desc_minus, &p.payoff, Mode::Exact).unwrap(), Number::Exact(qi(0)));
    assert_eq!(x.values[0], Number::Exact(qi(1)));

    // Plus bets whenever it can.
    let view = &p.plus.view;
    let strategy: Vec<usize> = (0..g.infosets().len())
        .map(|i| {
            let info = g.infoset(i);
            if info.team != Team::Plus {
                return 0;
            }
            let pick = |label: &str| info.actions.iter().position(|a| a == label);
            pick("b").or_else(|| pick("c")).unwrap_or(0)
        })
        .collect();
    let plan = teamdecomp::solver::class_plan(view, &strategy);
    let always_bet = RealizationPlan {
        team: Team::Plus,
        values: plan.iter().map(|&b| Number::Exact(qi(b as i64))).collect(),
    };
    let exploited = best_response_value(&p.desc_minus, &p.payoff, &always_bet, Mode::Exact).unwrap();
    assert!(exploited.as_exact().unwrap() < s.value.as_exact().unwrap(), "{exploited} vs {}", s.value);
}

#[test]
fn float_and_exact_agree_on_kuhn() {
    let g = make_kuhn(2, 1, 4).unwrap();
    let p = prepare(&g, DEFAULT_CAP).unwrap();
    let (f, _) = solve_prepared(&p, &Options { mode: Some(Mode::Float), ..Options::default() }).unwrap();
    let (e, _) = solve_prepared(&p, &Options { mode: Some(Mode::Exact), equilibrium: false, ..Options::default() }).unwrap();
    assert_eq!(e.value, Number::Exact(q(-1, 24)));
    assert!((f.value.to_f64() + 1.0 / 24.0).abs() < 1e-6);
    assert!(f.gap.unwrap().to_f64() < 1e-6);
}

#[test]
fn exported_models_solve_to_the_game_value() {
    let g = make_kuhn(2, 1, 4).unwrap();
    let p = prepare(&g, DEFAULT_CAP).unwrap();
    let lp = p.saddle().unwrap();
    let dir = tempfile::tempdir().unwrap();
    for (format, file) in [(ExportFormat::LpText, "k4.lp"), (ExportFormat::Mps, "k4.mps")] {
        let e = export_lp(&lp, format);
        let path = dir.path().join(file);
        std::fs::write(&path, &e.text).unwrap();
        let v = solve_model_file(&path).unwrap();
        assert!((v + 0.0417).abs() < 1e-4, "{file}: {v}");
        assert_eq!(e.names.is_some(), format == ExportFormat::Mps);
        if let Some(names) = e.names {
            let map: serde_json::Value = serde_json::from_str(&names).unwrap();
            assert_eq!(map["columns"].as_object().unwrap().len(), lp.cols());
            assert_eq!(map["rows"].as_object().unwrap().len(), lp.rows());
        }
    }
}
