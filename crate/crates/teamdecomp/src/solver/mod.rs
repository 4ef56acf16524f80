//! Solving the saddle LP, reading off plans, best responses, the equilibrium
//! gap, and a brute-force oracle for tiny games.
//!
//! Float mode hands the LP to HiGHS. Exact mode starts from HiGHS's optimal
//! basis, refactors it over the rationals and pivots with an exact simplex
//! until the basis is provably optimal; when HiGHS fails or its basis is not
//! usable, the exact simplex starts cold.

mod exact;
mod highs;
mod lu;
mod oracle;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::decomposition::PublicTreeDecomposition;
use crate::feasible::FeasibleSets;
use crate::game::{PayoffForm, Team};
use crate::lp::{response_lp, PolytopeDescription, SparseLP};
use crate::rational::{format_q, q_to_f64, Q};

pub use highs::solve_model_file;
pub use oracle::{
    brute_force_feasible, brute_force_value, class_plan, pure_strategies, OracleError, OracleResult, DEFAULT_ORACLE_CAP, UNREACHED,
};

/// Problems with at least this many nonzeros default to float mode.
pub const EXACT_NNZ_LIMIT: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }

    pub fn for_size(nnz: usize) -> Mode {
        if nnz < EXACT_NNZ_LIMIT {
            Mode::Exact
        } else {
            Mode::Float
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(format!("unknown mode `{other}` (expected exact or float)")),
        }
    }
}

/// A rational or double-precision number, depending on the solve mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Q),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(q) => q_to_f64(q),
            Number::Float(f) => *f,
        }
    }

    pub fn as_exact(&self) -> Option<&Q> {
        match self {
            Number::Exact(q) => Some(q),
            Number::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Number::Exact(q) => q.is_zero(),
            Number::Float(f) => *f == 0.0,
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(q) => f.write_str(&format_q(q)),
            Number::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Number::Exact(q) => s.serialize_str(&format_q(q)),
            Number::Float(x) => s.serialize_f64(*x),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("LP is infeasible")]
    Infeasible,
    #[error("LP is unbounded")]
    Unbounded,
    #[error("numerical breakdown: {0}; try exact mode or export the LP")]
    NumericalBreakdown(String),
    #[error("λ violates the polytope rows by {violation:e}")]
    InfeasibleLambda { violation: f64 },
    #[error("plan or payoff does not match the polytope description")]
    Mismatch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub mode: Mode,
    pub objective: Number,
    pub values: Vec<Number>,
    pub iterations: usize,
}

/// Solves a maximization LP.
///
/// ```
/// use teamdecomp::lp::{RowSense, SparseLP, VarBound};
/// use teamdecomp::rational::qi;
/// use teamdecomp::solver::{solve, Mode, Number};
///
/// // max x + y s.t. 2x + y <= 3, x + 3y <= 4.
/// let lp = SparseLP {
///     col_names: vec!["x".into(), "y".into()],
///     row_names: vec!["a".into(), "b".into()],
///     objective: vec![qi(1), qi(1)],
///     bounds: vec![VarBound::NonNegative; 2],
///     senses: vec![RowSense::Le; 2],
///     rhs: vec![qi(3), qi(4)],
///     triplets: vec![(0, 0, qi(2)), (0, 1, qi(1)), (1, 0, qi(1)), (1, 1, qi(3))],
/// };
/// let s = solve(&lp, Mode::Exact).unwrap();
/// assert_eq!(s.objective, Number::Exact(qi(2)));
/// assert_eq!(s.values, vec![Number::Exact(qi(1)), Number::Exact(qi(1))]);
/// ```
pub fn solve(lp: &SparseLP, mode: Mode) -> Result<LpSolution, SolveError> {
    let float = highs::solve_float(lp);
    match mode {
        Mode::Float => {
            let f = float?;
            Ok(LpSolution {
                mode,
                objective: Number::Float(f.objective),
                values: f.col_values.into_iter().map(Number::Float).collect(),
                iterations: f.iterations,
            })
        }
        Mode::Exact => {
            let (warm, pre) = match &float {
                Ok(f) => (Some((f.col_basic.as_slice(), f.row_basic.as_slice())), f.iterations),
                Err(_) => (None, 0),
            };
            let e = exact::solve_exact(lp, warm)?;
            Ok(LpSolution {
                mode,
                objective: Number::Exact(e.objective),
                values: e.values.into_iter().map(Number::Exact).collect(),
                iterations: pre + e.iterations,
            })
        }
    }
}

/// Exact simplex without a float warm start.
pub fn solve_exact_cold(lp: &SparseLP) -> Result<LpSolution, SolveError> {
    let e = exact::solve_exact(lp, None)?;
    Ok(LpSolution {
        mode: Mode::Exact,
        objective: Number::Exact(e.objective),
        values: e.values.into_iter().map(Number::Exact).collect(),
        iterations: e.iterations,
    })
}

/// A team's realization plan on its team view: `values[c]` is the
/// probability that the team plays to reach class `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationPlan {
    pub team: Team,
    pub values: Vec<Number>,
}

impl RealizationPlan {
    pub fn to_map(&self) -> BTreeMap<usize, Number> {
        self.values.iter().cloned().enumerate().collect()
    }
}

/// Plan extraction result with the largest clamp applied in float mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractedPlan {
    pub plan: RealizationPlan,
    pub max_clamp: f64,
}

const LAMBDA_ZERO: f64 = 1e-12;
const LAMBDA_TOLERANCE: f64 = 1e-7;

/// Reads `x(h)` for every class from `λ` values (the first
/// `desc.lambda_count()` entries of `lambda`).
pub fn extract_plan(
    desc: &PolytopeDescription,
    dec: &PublicTreeDecomposition,
    sets: &FeasibleSets,
    lambda: &[Number],
) -> Result<ExtractedPlan, SolveError> {
    if lambda.len() < desc.lambda_count() {
        return Err(SolveError::Mismatch);
    }
    let lambda = &lambda[..desc.lambda_count()];
    let home = dec.home();
    let exact: Option<Vec<Q>> = lambda.iter().map(|v| v.as_exact().cloned()).collect();
    if let Some(lam) = exact {
        let mut values = Vec::with_capacity(dec.classes);
        for &(b, i) in &home {
            let s = desc.lambda_start[b];
            let v: Q = sets.sets[b]
                .assignments
                .iter()
                .enumerate()
                .filter(|(_, x)| x[i])
                .map(|(j, _)| lam[s + j].clone())
                .sum();
            values.push(Number::Exact(v));
        }
        return Ok(ExtractedPlan { plan: RealizationPlan { team: desc.team, values }, max_clamp: 0.0 });
    }

    let lam: Vec<f64> = lambda.iter().map(|v| {
        let f = v.to_f64();
        if f.abs() < LAMBDA_ZERO { 0.0 } else { f }
    }).collect();
    let mut violation = lam.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
    for r in desc.rows.iter().filter(|r| !matches!(r.kind, crate::lp::RowKind::Link { .. })) {
        let lhs: f64 = r.entries.iter().map(|&(c, v)| lam[c] * v as f64).sum();
        violation = violation.max((lhs - r.rhs as f64).abs());
    }
    if violation > LAMBDA_TOLERANCE {
        return Err(SolveError::InfeasibleLambda { violation });
    }
    let mut max_clamp: f64 = 0.0;
    let mut values = Vec::with_capacity(dec.classes);
    for &(b, i) in &home {
        let s = desc.lambda_start[b];
        let v: f64 = sets.sets[b].assignments.iter().enumerate().filter(|(_, x)| x[i]).map(|(j, _)| lam[s + j]).sum();
        let c = v.clamp(0.0, 1.0);
        max_clamp = max_clamp.max((c - v).abs());
        values.push(Number::Float(c));
    }
    Ok(ExtractedPlan { plan: RealizationPlan { team: desc.team, values }, max_clamp })
}

/// Best-response value of `responder` (the team of `responder_desc`) to
/// the other team's fixed plan, in the payoff's row-team terms: the row
/// team maximizes, the column team minimizes.
pub fn best_response_value(
    responder_desc: &PolytopeDescription,
    payoff: &PayoffForm,
    fixed: &RealizationPlan,
    mode: Mode,
) -> Result<Number, SolveError> {
    let responder = responder_desc.team;
    if fixed.team == responder {
        return Err(SolveError::Mismatch);
    }
    let as_row = responder == payoff.row_team;
    let exact_plan: Option<Vec<Q>> = fixed.values.iter().map(|v| v.as_exact().cloned()).collect();
    let mut costs: BTreeMap<usize, Q> = BTreeMap::new();
    let mut float_costs: BTreeMap<usize, f64> = BTreeMap::new();
    for (a, b, c) in &payoff.triples {
        let (mine, theirs) = if as_row { (*a, *b) } else { (*b, *a) };
        let Some(v) = fixed.values.get(theirs) else { return Err(SolveError::Mismatch) };
        match &exact_plan {
            Some(p) => *costs.entry(mine).or_insert_with(Q::zero) += c * &p[theirs],
            None => *float_costs.entry(mine).or_insert(0.0) += q_to_f64(c) * v.to_f64(),
        }
    }
    if exact_plan.is_none() {
        costs = float_costs
            .into_iter()
            .map(|(k, v)| (k, Q::from_float(v).unwrap_or_else(Q::zero)))
            .collect();
    }
    let lp = response_lp(responder_desc, &costs, as_row);
    let mode = if exact_plan.is_some() { mode } else { Mode::Float };
    let s = solve(&lp, mode)?;
    Ok(match s.objective {
        Number::Exact(q) if !as_row => Number::Exact(-q),
        Number::Float(f) if !as_row => Number::Float(-f),
        other => other,
    })
}

/// `max_{x'} u(x', y) − min_{y'} u(x, y')` for plans `x` (row team) and
/// `y` (column team).
pub fn equilibrium_gap(
    x: &RealizationPlan,
    y: &RealizationPlan,
    row_desc: &PolytopeDescription,
    col_desc: &PolytopeDescription,
    payoff: &PayoffForm,
    mode: Mode,
) -> Result<Number, SolveError> {
    let best_row = best_response_value(row_desc, payoff, y, mode)?;
    let best_col = best_response_value(col_desc, payoff, x, mode)?;
    Ok(match (best_row, best_col) {
        (Number::Exact(a), Number::Exact(b)) => Number::Exact(a - b),
        (a, b) => Number::Float((a.to_f64() - b.to_f64()).max(0.0)),
    })
}

/// Exact evaluation of `u(x, y)` for exact plans.
pub fn evaluate(payoff: &PayoffForm, x: &RealizationPlan, y: &RealizationPlan) -> Number {
    let ex: Option<Vec<Q>> = x.values.iter().map(|v| v.as_exact().cloned()).collect();
    let ey: Option<Vec<Q>> = y.values.iter().map(|v| v.as_exact().cloned()).collect();
    match (ex, ey) {
        (Some(a), Some(b)) => Number::Exact(payoff.evaluate(&a, &b)),
        _ => Number::Float(
            payoff.triples.iter().map(|(a, b, c)| q_to_f64(c) * x.values[*a].to_f64() * y.values[*b].to_f64()).sum(),
        ),
    }
}

/// Whether a number is nonnegative.
pub fn is_nonnegative(n: &Number) -> bool {
    match n {
        Number::Exact(q) => !q.is_negative(),
        Number::Float(f) => *f >= 0.0,
    }
}
