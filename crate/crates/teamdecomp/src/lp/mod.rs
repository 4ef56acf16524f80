//! Polytope descriptions of each team's realization plans and the
//! saddle-point LP that couples them.
//!
//! A team's polytope uses one variable `λ_{C,x̃}` per bag and locally feasible
//! assignment, constrained by
//!
//! * normalization: `Σ_x̃ λ_{C,x̃} = 1` for every bag,
//! * marginal consistency: for every bag `C` with parent `B` and every
//!   pattern `π` on `C⁻`, the mass `B` puts on `π` equals the mass `C` puts
//!   on `π`,
//! * linking: `x(h) = Σ_{x̃(h)=1} λ_{C(h),x̃}` for each class `h` that carries
//!   payoff, where `C(h)` is the bag holding `h` in `C⁺` (the root bag for the
//!   root class).
//!
//! The saddle LP maximizes over Plus's polytope while the inner minimization
//! over Minus's polytope `{F μ = f, μ ≥ 0}` is replaced by its dual.

mod export;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::decomposition::PublicTreeDecomposition;
use crate::feasible::{Assignment, FeasibleSets};
use crate::game::{PayoffForm, Team};
use crate::rational::{qi, Q};

pub use export::{export_lp, Export, ExportFormat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Normalization { bag: usize },
    Marginal { bag: usize, pattern: usize },
    Link { class: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRow {
    pub kind: RowKind,
    /// `(column, coefficient)` with coefficients `±1`, sorted by column.
    pub entries: Vec<(usize, i8)>,
    pub rhs: i8,
}

/// `{F μ = f, μ ≥ 0}` over `λ` columns followed by link columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeDescription {
    pub team: Team,
    /// First `λ` column of every bag; `lambda_start[b]..lambda_start[b + 1]`.
    pub lambda_start: Vec<usize>,
    /// Linked classes (sorted) and their columns.
    pub links: Vec<(usize, usize)>,
    pub rows: Vec<PolyRow>,
}

impl PolytopeDescription {
    pub fn lambda_count(&self) -> usize {
        *self.lambda_start.last().unwrap_or(&0)
    }

    pub fn columns(&self) -> usize {
        self.lambda_count() + self.links.len()
    }

    pub fn link_column(&self, class: usize) -> Option<usize> {
        self.links.binary_search_by_key(&class, |&(c, _)| c).ok().map(|i| self.links[i].1)
    }

    /// The bag owning `λ` column `col`, with the assignment index inside it.
    pub fn lambda_owner(&self, col: usize) -> Option<(usize, usize)> {
        if col >= self.lambda_count() {
            return None;
        }
        let b = self.lambda_start.partition_point(|&s| s <= col) - 1;
        Some((b, col - self.lambda_start[b]))
    }

    pub fn column_name(&self, col: usize) -> String {
        match self.lambda_owner(col) {
            Some((b, j)) => format!("lp_{}_{}_{}", self.team.as_str(), b, j),
            None => format!("x_{}_{}", self.team.as_str(), self.links[col - self.lambda_count()].0),
        }
    }

    pub fn row_name(&self, row: usize) -> String {
        let t = self.team.as_str();
        match self.rows[row].kind {
            RowKind::Normalization { bag } => format!("norm_{t}_{bag}"),
            RowKind::Marginal { bag, pattern } => format!("marg_{t}_{bag}_{pattern}"),
            RowKind::Link { class } => format!("link_{t}_{class}"),
        }
    }

    /// Dense right-hand side `f`.
    pub fn rhs(&self) -> Vec<i8> {
        self.rows.iter().map(|r| r.rhs).collect()
    }

    /// Column-major copy of `F`.
    pub fn columns_major(&self) -> Vec<Vec<(usize, i8)>> {
        let mut cols = vec![Vec::new(); self.columns()];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in &r.entries {
                cols[j].push((i, v));
            }
        }
        cols
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("bag {bag} has no feasible assignment")]
    EmptyBag { bag: usize },
    #[error("class {class} is not a class of the view")]
    UnknownClass { class: usize },
    #[error("payoff class {class} of team {team} has no linked column")]
    DimensionMismatch { team: Team, class: usize },
}

/// Emits the polytope rows for one team.
///
/// ```
/// use teamdecomp::decomposition::build_decomposition;
/// use teamdecomp::feasible::{enumerate_feasible, DEFAULT_CAP};
/// use teamdecomp::game::{build_team_view, Team};
/// use teamdecomp::generators::make_kuhn;
/// use teamdecomp::lp::polytope_description;
///
/// let game = make_kuhn(2, 1, 3).unwrap();
/// let view = build_team_view(&game, Team::Minus).unwrap();
/// let dec = build_decomposition(&view).unwrap();
/// let sets = enumerate_feasible(&dec, &view, &game, DEFAULT_CAP).unwrap();
/// let desc = polytope_description(Team::Minus, &dec, &sets, &[]).unwrap();
/// assert_eq!(desc.lambda_count(), 25);
/// ```
pub fn polytope_description(
    team: Team,
    dec: &PublicTreeDecomposition,
    sets: &FeasibleSets,
    linked_classes: &[usize],
) -> Result<PolytopeDescription, LpError> {
    let mut lambda_start = Vec::with_capacity(dec.bags.len() + 1);
    let mut next = 0;
    for (b, set) in sets.sets.iter().enumerate() {
        if set.is_empty() {
            return Err(LpError::EmptyBag { bag: b });
        }
        lambda_start.push(next);
        next += set.len();
    }
    lambda_start.push(next);

    let mut classes: Vec<usize> = linked_classes.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if let Some(&c) = classes.iter().find(|&&c| c >= dec.classes) {
        return Err(LpError::UnknownClass { class: c });
    }
    let links: Vec<(usize, usize)> = classes.iter().enumerate().map(|(i, &c)| (c, next + i)).collect();

    let mut rows = Vec::new();
    for (b, set) in sets.sets.iter().enumerate() {
        let s = lambda_start[b];
        rows.push(PolyRow {
            kind: RowKind::Normalization { bag: b },
            entries: (0..set.len()).map(|j| (s + j, 1)).collect(),
            rhs: 1,
        });
    }
    for (b, bag) in dec.bags.iter().enumerate() {
        let Some(p) = bag.parent else { continue };
        let pos: Vec<usize> = bag.c_minus.iter().map(|&c| dec.bags[p].position(c).expect("C⁻ ⊆ parent C⁺")).collect();
        let mut by_pattern: BTreeMap<Assignment, Vec<(usize, i8)>> = BTreeMap::new();
        for (j, x) in sets.sets[p].assignments.iter().enumerate() {
            let key: Assignment = pos.iter().map(|&i| x[i]).collect();
            by_pattern.entry(key).or_default().push((lambda_start[p] + j, 1));
        }
        for j in 0..sets.sets[b].len() {
            by_pattern.entry(sets.sets[b].pattern(j).to_bitvec()).or_default().push((lambda_start[b] + j, -1));
        }
        for (k, mut entries) in by_pattern.into_values().enumerate() {
            entries.sort_unstable();
            rows.push(PolyRow { kind: RowKind::Marginal { bag: b, pattern: k }, entries, rhs: 0 });
        }
    }
    let home = dec.home();
    for &(c, col) in &links {
        let (b, i) = home[c];
        let mut entries: Vec<(usize, i8)> = sets.sets[b]
            .assignments
            .iter()
            .enumerate()
            .filter(|(_, x)| x[i])
            .map(|(j, _)| (lambda_start[b] + j, -1))
            .collect();
        entries.push((col, 1));
        rows.push(PolyRow { kind: RowKind::Link { class: c }, entries, rhs: 0 });
    }
    Ok(PolytopeDescription { team, lambda_start, links, rows })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarBound {
    NonNegative,
    Free,
}

/// A maximization LP `max cᵀx` subject to `Ax (≤|=|≥) b` and per-variable
/// bounds, stored as row-major triplets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseLP {
    pub col_names: Vec<String>,
    pub row_names: Vec<String>,
    pub objective: Vec<Q>,
    pub bounds: Vec<VarBound>,
    pub senses: Vec<RowSense>,
    pub rhs: Vec<Q>,
    /// `(row, col, coefficient)`, sorted by row then column, no zeros.
    pub triplets: Vec<(usize, usize, Q)>,
}

impl SparseLP {
    pub fn cols(&self) -> usize {
        self.col_names.len()
    }

    pub fn rows(&self) -> usize {
        self.row_names.len()
    }

    /// Column-major view: per column, `(row, coefficient)` sorted by row.
    pub fn columns(&self) -> Vec<Vec<(usize, Q)>> {
        let mut cols = vec![Vec::new(); self.cols()];
        for (r, c, v) in &self.triplets {
            cols[*c].push((*r, v.clone()));
        }
        cols
    }
}

/// Number of stored nonzeros in the constraint matrix.
pub fn lp_size(lp: &SparseLP) -> usize {
    lp.triplets.len()
}

/// The outer team's maximin LP. Columns: the outer team's polytope columns,
/// then one free `v_i` per row of the inner team's polytope. Rows: the outer
/// polytope's rows, then one dual row per inner column `j`:
/// `Σ_i F[i,j] v_i − Σ_h A[h, class(j)] x(h) ≤ 0`.
/// The objective is `Σ_i f_i v_i`.
pub fn saddle_lp(outer: &PolytopeDescription, inner: &PolytopeDescription, payoff: &PayoffForm) -> Result<SparseLP, LpError> {
    for (team, classes, desc) in [
        (outer.team, payoff.row_classes(), outer),
        (inner.team, payoff.col_classes(), inner),
    ] {
        if let Some(&class) = classes.iter().find(|&&c| desc.link_column(c).is_none()) {
            return Err(LpError::DimensionMismatch { team, class });
        }
    }
    if payoff.row_team != outer.team || inner.team == outer.team {
        return Err(LpError::DimensionMismatch { team: outer.team, class: 0 });
    }
    let n_outer = outer.columns();
    let n_v = inner.rows.len();
    let mut col_names: Vec<String> = (0..n_outer).map(|j| outer.column_name(j)).collect();
    col_names.extend((0..n_v).map(|i| format!("v_{i}")));
    let mut bounds = vec![VarBound::NonNegative; n_outer];
    bounds.extend(std::iter::repeat(VarBound::Free).take(n_v));
    let mut objective = vec![Q::zero(); n_outer];
    objective.extend(inner.rows.iter().map(|r| qi(r.rhs as i64)));

    let mut row_names: Vec<String> = (0..outer.rows.len()).map(|i| outer.row_name(i)).collect();
    let mut senses = vec![RowSense::Eq; outer.rows.len()];
    let mut rhs: Vec<Q> = outer.rows.iter().map(|r| qi(r.rhs as i64)).collect();
    let mut triplets: Vec<(usize, usize, Q)> = Vec::new();
    for (i, r) in outer.rows.iter().enumerate() {
        triplets.extend(r.entries.iter().map(|&(c, v)| (i, c, qi(v as i64))));
    }

    // Payoff coefficients grouped by the inner team's class.
    let mut by_inner: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
    for (a, b, c) in &payoff.triples {
        by_inner.entry(*b).or_default().push((outer.link_column(*a).expect("checked above"), -c));
    }
    let inner_cols = inner.columns_major();
    for (j, col) in inner_cols.iter().enumerate() {
        let row = row_names.len();
        let mut entries: Vec<(usize, Q)> = col.iter().map(|&(i, v)| (n_outer + i, qi(v as i64))).collect();
        if j >= inner.lambda_count() {
            let class = inner.links[j - inner.lambda_count()].0;
            if let Some(terms) = by_inner.get(&class) {
                entries.extend(terms.iter().cloned());
            }
        }
        entries.sort_by_key(|e| e.0);
        row_names.push(format!("dual_{j}"));
        senses.push(RowSense::Le);
        rhs.push(Q::zero());
        triplets.extend(entries.into_iter().filter(|e| !e.1.is_zero()).map(|(c, v)| (row, c, v)));
    }
    Ok(SparseLP { col_names, row_names, objective, bounds, senses, rhs, triplets })
}

/// The LP `max/min Σ_j c_j μ_j` over `{F μ = f, μ ≥ 0}` with `c` supported on
/// link columns: the value of the best response of `desc.team` to a fixed
/// plan of the other team. `link_costs` gives `c` per linked class.
pub fn response_lp(desc: &PolytopeDescription, link_costs: &BTreeMap<usize, Q>, maximize: bool) -> SparseLP {
    let n = desc.columns();
    let col_names: Vec<String> = (0..n).map(|j| desc.column_name(j)).collect();
    let mut objective = vec![Q::zero(); n];
    for (&class, cost) in link_costs {
        if let Some(col) = desc.link_column(class) {
            objective[col] = if maximize { cost.clone() } else { -cost };
        }
    }
    let mut triplets = Vec::new();
    for (i, r) in desc.rows.iter().enumerate() {
        triplets.extend(r.entries.iter().map(|&(c, v)| (i, c, qi(v as i64))));
    }
    SparseLP {
        col_names,
        row_names: (0..desc.rows.len()).map(|i| desc.row_name(i)).collect(),
        objective,
        bounds: vec![VarBound::NonNegative; n],
        senses: vec![RowSense::Eq; desc.rows.len()],
        rhs: desc.rows.iter().map(|r| qi(r.rhs as i64)).collect(),
        triplets,
    }
}

/// Checks `F μ = f` and `μ ≥ 0` exactly.
pub fn satisfies(desc: &PolytopeDescription, mu: &[Q]) -> bool {
    mu.len() == desc.columns()
        && mu.iter().all(|v| *v >= Q::zero())
        && desc.rows.iter().all(|r| {
            let lhs: Q = r.entries.iter().map(|&(c, v)| &mu[c] * qi(v as i64)).sum();
            lhs == qi(r.rhs as i64)
        })
}

/// The polytope point of a pure plan: point mass on each bag's restriction
/// of `plan` (0/1 per class), with link columns set to the plan's values.
pub fn point_of_plan(desc: &PolytopeDescription, dec: &PublicTreeDecomposition, sets: &FeasibleSets, plan: &[bool]) -> Option<Vec<Q>> {
    let mut mu = vec![Q::zero(); desc.columns()];
    for (b, bag) in dec.bags.iter().enumerate() {
        let x: Assignment = bag.c_minus.iter().chain(&bag.c_plus).map(|&c| plan[c]).collect();
        let j = sets.sets[b].assignments.binary_search(&x).ok()?;
        mu[desc.lambda_start[b] + j] = Q::one();
    }
    for &(c, col) in &desc.links {
        mu[col] = if plan[c] { Q::one() } else { Q::zero() };
    }
    Some(mu)
}
