//! The full pipeline from a game tree to a solved equilibrium, with a
//! machine-readable report.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::decomposition::{build_decomposition, width_stats, DecompositionError, PublicTreeDecomposition, WidthStats};
use crate::feasible::{enumerate_feasible, reachability_stats, FeasibleError, FeasibleSets, ReachabilityStats, DEFAULT_CAP};
use crate::game::{build_team_view, payoff_form, validate, GameTree, PayoffError, PayoffForm, Team, TeamView, ValidationReport, ViewError};
use crate::lp::{lp_size, polytope_description, saddle_lp, LpError, PolytopeDescription, SparseLP};
use crate::solver::{equilibrium_gap, extract_plan, solve, Mode, Number, RealizationPlan, SolveError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid game: {}", .0.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(ValidationReport),
    #[error(transparent)]
    View(#[from] ViewError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Feasible(#[from] FeasibleError),
    #[error(transparent)]
    Payoff(#[from] PayoffError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Everything built for one team before the LP is assembled.
#[derive(Clone, Debug)]
pub struct TeamModel {
    pub team: Team,
    pub view: TeamView,
    pub dec: PublicTreeDecomposition,
    pub sets: FeasibleSets,
    pub widths: WidthStats,
    pub reach: ReachabilityStats,
}

impl TeamModel {
    pub fn build(game: &GameTree, view: TeamView, cap: usize) -> Result<TeamModel, PipelineError> {
        let dec = build_decomposition(&view)?;
        let sets = enumerate_feasible(&dec, &view, game, cap)?;
        let widths = width_stats(&dec);
        let reach = reachability_stats(&sets, &dec, &view);
        Ok(TeamModel { team: view.team, view, dec, sets, widths, reach })
    }

    pub fn describe(&self, linked: &[usize]) -> Result<PolytopeDescription, LpError> {
        polytope_description(self.team, &self.dec, &self.sets, linked)
    }

    pub fn stats(&self, game: &GameTree) -> TeamStats {
        let seq_count = self.view.seq_count(game);
        TeamStats {
            team: self.team,
            seq_count,
            sum_xc: self.reach.sum_xc,
            ratio: self.reach.sum_xc as f64 / seq_count as f64,
            reachable_width: self.reach.reachable_width,
            treewidth: self.widths.treewidth,
            max_degree: self.widths.max_degree,
            bags: self.widths.bags,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeamStats {
    pub team: Team,
    pub seq_count: usize,
    pub sum_xc: usize,
    pub ratio: f64,
    pub reachable_width: usize,
    pub treewidth: usize,
    pub max_degree: usize,
    pub bags: usize,
}

/// Both teams' models, the payoff and both polytope descriptions.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub plus: TeamModel,
    pub minus: TeamModel,
    pub payoff: PayoffForm,
    pub desc_plus: PolytopeDescription,
    pub desc_minus: PolytopeDescription,
    pub timings: Vec<(String, u128)>,
}

impl Prepared {
    pub fn saddle(&self) -> Result<SparseLP, LpError> {
        saddle_lp(&self.desc_plus, &self.desc_minus, &self.payoff)
    }

    pub fn saddle_minus(&self) -> Result<SparseLP, LpError> {
        saddle_lp(&self.desc_minus, &self.desc_plus, &self.payoff.swapped())
    }
}

/// Validates the game and builds views, decompositions, feasible sets and
/// polytope descriptions for both teams.
pub fn prepare(game: &GameTree, cap: usize) -> Result<Prepared, PipelineError> {
    let report = validate(game);
    if !report.is_valid() {
        return Err(PipelineError::Invalid(report));
    }
    let mut timings = Vec::new();
    let t = Instant::now();
    let vp = build_team_view(game, Team::Plus)?;
    let vm = build_team_view(game, Team::Minus)?;
    let payoff = payoff_form(game, &vp, &vm)?;
    timings.push(("views".to_string(), t.elapsed().as_millis()));
    let t = Instant::now();
    let plus = TeamModel::build(game, vp, cap)?;
    let minus = TeamModel::build(game, vm, cap)?;
    timings.push(("decomposition".to_string(), t.elapsed().as_millis()));
    let t = Instant::now();
    let desc_plus = plus.describe(&payoff.row_classes())?;
    let desc_minus = minus.describe(&payoff.col_classes())?;
    timings.push(("polytopes".to_string(), t.elapsed().as_millis()));
    Ok(Prepared { plus, minus, payoff, desc_plus, desc_minus, timings })
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Arithmetic; `None` picks by LP size.
    pub mode: Option<Mode>,
    pub cap: usize,
    /// Whether to compute Minus's plan and the equilibrium gap.
    pub equilibrium: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { mode: None, cap: DEFAULT_CAP, equilibrium: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub mode: Mode,
    pub value: Number,
    pub gap: Option<Number>,
    pub plan_plus: RealizationPlan,
    pub plan_minus: Option<RealizationPlan>,
    pub iterations: usize,
    pub wall_ms: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub plus: TeamStats,
    pub minus: TeamStats,
    pub lp_nnz: usize,
    pub mode: Mode,
    pub value: Number,
    pub gap: Option<Number>,
    pub plan_plus: RealizationPlan,
    pub plan_minus: Option<RealizationPlan>,
    pub iterations: usize,
    pub timings: Vec<(String, u128)>,
}

/// Solves the prepared game: Plus's maximin LP for the value and Plus's
/// plan, the role-swapped LP for Minus's plan, then the gap.
pub fn solve_prepared(p: &Prepared, options: &Options) -> Result<(SolveResult, usize), PipelineError> {
    let start = Instant::now();
    let lp = p.saddle()?;
    let nnz = lp_size(&lp);
    let mode = options.mode.unwrap_or_else(|| Mode::for_size(nnz));
    let sol = solve(&lp, mode)?;
    let plan_plus = extract_plan(&p.desc_plus, &p.plus.dec, &p.plus.sets, &sol.values)?.plan;
    let mut iterations = sol.iterations;
    let (plan_minus, gap) = if options.equilibrium {
        let swapped = p.saddle_minus()?;
        let sm = solve(&swapped, mode)?;
        iterations += sm.iterations;
        let plan_minus = extract_plan(&p.desc_minus, &p.minus.dec, &p.minus.sets, &sm.values)?.plan;
        let gap = equilibrium_gap(&plan_plus, &plan_minus, &p.desc_plus, &p.desc_minus, &p.payoff, mode)?;
        (Some(plan_minus), Some(gap))
    } else {
        (None, None)
    };
    Ok((
        SolveResult {
            mode,
            value: sol.objective,
            gap,
            plan_plus,
            plan_minus,
            iterations,
            wall_ms: start.elapsed().as_millis(),
        },
        nnz,
    ))
}

/// Runs every stage on `game`.
pub fn run(game: &GameTree, options: &Options) -> Result<RunReport, PipelineError> {
    let p = prepare(game, options.cap)?;
    let (s, nnz) = solve_prepared(&p, options)?;
    let mut timings = p.timings.clone();
    timings.push(("solve".to_string(), s.wall_ms));
    Ok(RunReport {
        plus: p.plus.stats(game),
        minus: p.minus.stats(game),
        lp_nnz: nnz,
        mode: s.mode,
        value: s.value,
        gap: s.gap,
        plan_plus: s.plan_plus,
        plan_minus: s.plan_minus,
        iterations: s.iterations,
        timings,
    })
}

impl RunReport {
    /// JSON with `"schema": 1`. Wall times are left out when `timing` is
    /// false so that reports compare byte for byte.
    pub fn to_json(&self, spec: serde_json::Value, timing: bool) -> serde_json::Value {
        let plan = |p: &RealizationPlan| serde_json::to_value(p.to_map()).expect("plan serializes");
        let mut v = serde_json::json!({
            "schema": 1,
            "game": spec,
            "plus": self.plus,
            "minus": self.minus,
            "lp_nnz": self.lp_nnz,
            "mode": self.mode,
            "value": self.value,
            "value_f64": self.value.to_f64(),
            "gap": self.gap,
            "iterations": self.iterations,
            "plan_plus": plan(&self.plan_plus),
            "plan_minus": self.plan_minus.as_ref().map(plan),
        });
        if timing {
            v["wall_ms"] = serde_json::json!(self.timings.iter().map(|(k, t)| (k.clone(), serde_json::json!(t))).collect::<serde_json::Map<_, _>>());
        }
        v
    }
}
