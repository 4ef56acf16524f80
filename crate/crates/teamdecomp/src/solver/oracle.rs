//! Brute-force solving by pure-strategy enumeration, for small games.

use std::collections::{BTreeSet, HashSet};

use bitvec::prelude::*;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{solve, Mode, SolveError};
use crate::decomposition::PublicTreeDecomposition;
use crate::feasible::Assignment;
use crate::game::{ClassKind, GameTree, NodeKind, Team, TeamView};
use crate::lp::{RowSense, SparseLP, VarBound};
use crate::rational::{qi, Q};

pub const DEFAULT_ORACLE_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("team {team} has more than {cap} reduced pure strategies")]
    CapExceeded { team: Team, cap: usize },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub value: Q,
    /// Pure strategies per team after merging those with equal terminal
    /// reach: `[plus, minus]`.
    pub pure_counts: [usize; 2],
    /// Best responses the mixing team's LP needed.
    pub responses: usize,
}

/// Marks an infoset that a reduced strategy never reaches.
pub const UNREACHED: usize = usize::MAX;

/// All reduced pure strategies of `team`: one action index per infoset of
/// the game, [`UNREACHED`] for infosets the player's own earlier actions
/// cut off and for other teams' infosets. Each player's reduced strategies
/// are enumerated separately and then combined.
pub fn pure_strategies(game: &GameTree, team: Team, cap: usize) -> Result<Vec<Vec<usize>>, OracleError> {
    let too_many = || OracleError::CapExceeded { team, cap };
    let mut combined = vec![vec![UNREACHED; game.infosets().len()]];
    for player in game.players(team) {
        let mut mine: Vec<usize> =
            (0..game.infosets().len()).filter(|&i| game.infoset(i).team == team && game.infoset(i).player == player).collect();
        mine.sort_by_key(|&i| game.node(game.infoset(i).nodes[0]).depth);
        let own = player_strategies(game, &mine, cap).ok_or_else(too_many)?;
        if combined.len().saturating_mul(own.len()) > cap {
            return Err(too_many());
        }
        let mine = &mine;
        combined = combined
            .iter()
            .flat_map(|base| {
                own.iter().map(move |s| {
                    let mut t = base.clone();
                    for &i in mine {
                        t[i] = s[i];
                    }
                    t
                })
            })
            .collect();
    }
    Ok(combined)
}

/// Reduced strategies of one player whose infosets `mine` are sorted by
/// depth, or `None` past `cap`.
fn player_strategies(game: &GameTree, mine: &[usize], cap: usize) -> Option<Vec<Vec<usize>>> {
    let owner: Vec<Option<usize>> = {
        let mut o = vec![None; game.len()];
        for &i in mine {
            for &h in &game.infoset(i).nodes {
                o[h] = Some(i);
            }
        }
        o
    };
    // A node is reachable by the player's own choices when every ancestor
    // the player owns chose the branch towards it.
    let reachable = |h: usize, strategy: &[usize]| -> bool {
        let mut c = h;
        while let Some(p) = game.node(c).parent {
            if let Some(i) = owner[p] {
                if strategy[i] != game.child_index(c) {
                    return false;
                }
            }
            c = p;
        }
        true
    };
    fn walk(
        k: usize,
        mine: &[usize],
        game: &GameTree,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
        reachable: &dyn Fn(usize, &[usize]) -> bool,
    ) -> bool {
        if k == mine.len() {
            out.push(current.clone());
            return out.len() <= cap;
        }
        let i = mine[k];
        if !game.infoset(i).nodes.iter().any(|&h| reachable(h, current)) {
            return walk(k + 1, mine, game, current, out, cap, reachable);
        }
        for a in 0..game.infoset(i).actions.len() {
            current[i] = a;
            if !walk(k + 1, mine, game, current, out, cap, reachable) {
                return false;
            }
        }
        current[i] = UNREACHED;
        true
    }
    let mut current = vec![UNREACHED; game.infosets().len()];
    let mut out = Vec::new();
    walk(0, mine, game, &mut current, &mut out, cap, &reachable).then_some(out)
}

/// Which nodes a pure strategy does not cut off, looking only at the
/// infosets selected by `owns`.
fn node_reach(game: &GameTree, owns: impl Fn(usize) -> bool, strategy: &[usize]) -> Vec<bool> {
    let mut reach = vec![false; game.len()];
    reach[0] = true;
    for h in 1..game.len() {
        let p = game.node(h).parent.expect("non-root");
        reach[h] = reach[p]
            && match game.node(p).decision() {
                Some((_, _, i)) if owns(i) => strategy[i] == game.child_index(h),
                _ => true,
            };
    }
    reach
}

/// The 0/1 realization plan of a pure strategy on the team view.
pub fn class_plan(view: &TeamView, strategy: &[usize]) -> Vec<bool> {
    let mut x = vec![false; view.len()];
    x[0] = true;
    for c in 1..view.len() {
        let p = view.parent[c].expect("classes are level-ordered");
        x[c] = x[p]
            && match view.class_kind[p] {
                ClassKind::TeamDecision(i) => view.action[c] == Some(strategy[i]),
                ClassKind::PassThrough => true,
            };
    }
    x
}

/// Per bag, the restrictions of all pure plans of the view's team.
pub fn brute_force_feasible(
    game: &GameTree,
    view: &TeamView,
    dec: &PublicTreeDecomposition,
    cap: usize,
) -> Result<Vec<BTreeSet<Assignment>>, OracleError> {
    let strategies = pure_strategies(game, view.team, cap)?;
    let mut out = vec![BTreeSet::new(); dec.bags.len()];
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    for s in strategies {
        let plan = class_plan(view, &s);
        if !seen.insert(plan.clone()) {
            continue;
        }
        for (b, bag) in dec.bags.iter().enumerate() {
            out[b].insert(bag.c_minus.iter().chain(&bag.c_plus).map(|&c| plan[c]).collect::<Assignment>());
        }
    }
    Ok(out)
}

/// Terminal-reach bitsets of all reduced pure strategies of `team`,
/// with strategies of equal reach merged. Each player's strategies are
/// enumerated on their own and combined by intersecting reach.
fn team_reach_sets(game: &GameTree, team: Team, terminals: &[usize], cap: usize) -> Result<Vec<BitVec>, OracleError> {
    let too_many = || OracleError::CapExceeded { team, cap };
    let mut combined: Vec<BitVec> = vec![BitVec::repeat(true, terminals.len())];
    for player in game.players(team) {
        let mut mine: Vec<usize> =
            (0..game.infosets().len()).filter(|&i| game.infoset(i).team == team && game.infoset(i).player == player).collect();
        mine.sort_by_key(|&i| game.node(game.infoset(i).nodes[0]).depth);
        let own: HashSet<BitVec> = player_strategies(game, &mine, cap)
            .ok_or_else(too_many)?
            .iter()
            .map(|s| {
                let r = node_reach(game, |i| game.infoset(i).team == team && game.infoset(i).player == player, s);
                terminals.iter().map(|&z| r[z]).collect()
            })
            .collect();
        let mut next: HashSet<BitVec> = HashSet::new();
        for base in &combined {
            for o in &own {
                next.insert(base.clone() & o);
                if next.len() > cap {
                    return Err(too_many());
                }
            }
        }
        combined = next.into_iter().collect();
        combined.sort();
    }
    Ok(combined)
}

/// Value of the game between the two teams' pure strategies, solved
/// exactly.
///
/// The team with fewer distinct pure strategies mixes over all of them in
/// an LP; the other team's strategies enter the LP one at a time as exact
/// best responses until none improves on the LP value.
///
/// ```
/// use teamdecomp::generators::make_kuhn;
/// use teamdecomp::solver::{brute_force_value, DEFAULT_ORACLE_CAP};
///
/// let v = brute_force_value(&make_kuhn(1, 1, 3).unwrap(), DEFAULT_ORACLE_CAP).unwrap();
/// assert_eq!(v.value.to_string(), "-1/18");
/// ```
pub fn brute_force_value(game: &GameTree, cap: usize) -> Result<OracleResult, OracleError> {
    let reach = game.chance_reach();
    let terminals: Vec<usize> = game.terminals().collect();
    let weight: Vec<Q> = terminals
        .iter()
        .map(|&z| match &game.node(z).kind {
            NodeKind::Terminal { payoff } => payoff * &reach[z],
            _ => unreachable!(),
        })
        .collect();

    let plus = team_reach_sets(game, Team::Plus, &terminals, cap)?;
    let minus = team_reach_sets(game, Team::Minus, &terminals, cap)?;
    let counts = [plus.len(), minus.len()];
    // `mixed` randomizes in the LP, `responder` maximizes `sign * u`.
    let (mixed, responder, sign) = if plus.len() <= minus.len() { (&plus, &minus, -1) } else { (&minus, &plus, 1) };
    let weight: Vec<Q> = weight.into_iter().map(|w| w * qi(sign)).collect();
    let score = |g: &BitVec, col: &BitVec| -> Q { g.iter_ones().filter(|&z| col[z]).map(|z| weight[z].clone()).sum() };

    let k = mixed.len();
    let mut generated: Vec<usize> = Vec::new();
    let mut payoff_rows: Vec<Vec<(usize, Q)>> = Vec::new();
    let mut sigma = vec![Q::new(1.into(), (k as i64).into()); k];
    let mut value = None;
    loop {
        // Probability weight of every terminal under the current mixture.
        let mut q = vec![Q::zero(); terminals.len()];
        for (j, col) in mixed.iter().enumerate() {
            if sigma[j].is_zero() {
                continue;
            }
            for z in col.iter_ones() {
                q[z] += &sigma[j] * &weight[z];
            }
        }
        let q_f: Vec<f64> = q.iter().map(crate::rational::q_to_f64).collect();
        let scores: Vec<f64> = responder.iter().map(|g| g.iter_ones().map(|z| q_f[z]).sum()).collect();
        let best_f = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let slack = 1e-9 * (1.0 + best_f.abs());
        let (best, best_value) = scores
            .iter()
            .enumerate()
            .filter(|(_, &s)| s >= best_f - slack)
            .map(|(i, _)| (i, responder[i].iter_ones().map(|z| q[z].clone()).sum::<Q>()))
            .max_by(|a, b| a.1.cmp(&b.1))
            .expect("responder has a strategy");
        if let Some(v) = &value {
            if best_value <= *v {
                break;
            }
        }
        generated.push(best);
        payoff_rows.push(
            mixed.iter().enumerate().map(|(j, col)| (j, score(&responder[best], col))).filter(|(_, m)| !m.is_zero()).collect::<Vec<_>>(),
        );

        // min v s.t. v >= Σ_j σ_j M[g][j] for generated g, Σ σ = 1, σ >= 0,
        // written as max −v.
        let rows = generated.len();
        let mut triplets = Vec::new();
        for (r, row) in payoff_rows.iter().enumerate() {
            triplets.extend(row.iter().map(|(j, m)| (r, *j, -m.clone())));
            triplets.push((r, k, Q::one()));
        }
        for j in 0..k {
            triplets.push((rows, j, Q::one()));
        }
        let mut objective = vec![Q::zero(); k];
        objective.push(-Q::one());
        let mut bounds = vec![VarBound::NonNegative; k];
        bounds.push(VarBound::Free);
        let mut senses = vec![RowSense::Ge; rows];
        senses.push(RowSense::Eq);
        let mut rhs = vec![Q::zero(); rows];
        rhs.push(qi(1));
        let lp = SparseLP {
            col_names: (0..=k).map(|j| if j < k { format!("s_{j}") } else { "v".into() }).collect(),
            row_names: (0..=rows).map(|r| if r < rows { format!("br_{r}") } else { "sum".into() }).collect(),
            objective,
            bounds,
            senses,
            rhs,
            triplets,
        };
        let s = solve(&lp, Mode::Exact)?;
        let exact: Vec<Q> = s.values.iter().map(|v| v.as_exact().cloned().expect("exact mode")).collect();
        sigma = exact[..k].to_vec();
        value = Some(exact[k].clone());
    }
    let value = value.expect("at least one round") * qi(sign);
    Ok(OracleResult { value, pure_counts: counts, responses: generated.len() })
}
