//! Revised primal simplex over the rationals.
//!
//! Rows become equalities with one slack per inequality and one artificial
//! per row. Every variable is free, nonnegative, or artificial; nonbasic
//! variables sit at 0. Artificials are nonnegative with unit cost in phase
//! one and fixed at 0 afterwards; once nonbasic they never re-enter.
//!
//! Pricing is Dantzig's rule until a run of degenerate pivots, then Bland's
//! rule until the objective moves again, which rules out cycling.

use num_traits::{One, Signed, Zero};

use super::lu::{Factor, Singular};
use super::SolveError;
use crate::lp::{RowSense, SparseLP, VarBound};
use crate::rational::Q;

const REFACTOR_EVERY: usize = 64;
const DEGENERATE_RUN: usize = 20;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Free,
    NonNeg,
    Artificial,
}

pub(crate) struct ExactSolution {
    pub objective: Q,
    pub values: Vec<Q>,
    pub iterations: usize,
}

struct Simplex {
    m: usize,
    n: usize,
    /// Structural columns, then slacks, then artificials.
    columns: Vec<Vec<(usize, Q)>>,
    kind: Vec<Kind>,
    /// Maximization objective of the structural columns.
    objective: Vec<Q>,
    rhs: Vec<Q>,
    /// Slack variable of each row, if it has one.
    slack_of: Vec<Option<usize>>,
    art_start: usize,
    basis: Vec<usize>,
    position: Vec<Option<usize>>,
    factor: Option<Factor>,
    x_basic: Vec<Q>,
    iterations: usize,
}

enum Phase {
    One,
    Two,
}

impl Simplex {
    fn new(lp: &SparseLP) -> Simplex {
        let (n, m) = (lp.cols(), lp.rows());
        let mut columns = lp.columns();
        let mut kind: Vec<Kind> =
            lp.bounds.iter().map(|b| if *b == VarBound::Free { Kind::Free } else { Kind::NonNeg }).collect();
        let mut slack_of = vec![None; m];
        for (r, s) in lp.senses.iter().enumerate() {
            let coef = match s {
                RowSense::Le => Q::one(),
                RowSense::Ge => -Q::one(),
                RowSense::Eq => continue,
            };
            slack_of[r] = Some(columns.len());
            columns.push(vec![(r, coef)]);
            kind.push(Kind::NonNeg);
        }
        let art_start = columns.len();
        for r in 0..m {
            columns.push(vec![(r, Q::one())]);
            kind.push(Kind::Artificial);
        }
        let total = columns.len();
        Simplex {
            m,
            n,
            columns,
            kind,
            objective: lp.objective.clone(),
            rhs: lp.rhs.clone(),
            slack_of,
            art_start,
            basis: Vec::new(),
            position: vec![None; total],
            factor: None,
            x_basic: Vec::new(),
            iterations: 0,
        }
    }

    fn set_basis(&mut self, basis: Vec<usize>) {
        self.position.iter_mut().for_each(|p| *p = None);
        for (i, &v) in basis.iter().enumerate() {
            self.position[v] = Some(i);
        }
        self.basis = basis;
    }

    /// Factors the current basis, swapping in artificials for dependent
    /// columns until it is nonsingular.
    fn refactor(&mut self) {
        loop {
            let cols: Vec<Vec<(usize, Q)>> = self.basis.iter().map(|&v| self.columns[v].clone()).collect();
            match Factor::new(self.m, &cols) {
                Ok(f) => {
                    self.factor = Some(f);
                    break;
                }
                Err(Singular { positions, rows }) => {
                    let mut basis = self.basis.clone();
                    for (p, r) in positions.into_iter().zip(rows) {
                        basis[p] = self.art_start + r;
                    }
                    self.set_basis(basis);
                }
            }
        }
        self.x_basic = self.factor.as_ref().expect("factored").ftran(&self.rhs_sparse());
    }

    fn rhs_sparse(&self) -> Vec<(usize, Q)> {
        self.rhs.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(r, v)| (r, v.clone())).collect()
    }

    /// Flips artificial columns so that basic artificials are nonnegative.
    fn orient_artificials(&mut self) -> bool {
        let mut flipped = false;
        for i in 0..self.m {
            let v = self.basis[i];
            if self.kind[v] == Kind::Artificial && self.x_basic[i].is_negative() {
                let (r, c) = self.columns[v][0].clone();
                self.columns[v] = vec![(r, -c)];
                flipped = true;
            }
        }
        if flipped {
            self.refactor();
        }
        flipped
    }

    fn cold_basis(&mut self) {
        let mut basis = Vec::with_capacity(self.m);
        for r in 0..self.m {
            let slack_ok = self.slack_of[r].filter(|&s| {
                let coef = &self.columns[s][0].1;
                (coef * &self.rhs[r]) >= Q::zero()
            });
            let v = match slack_ok {
                Some(s) => s,
                None => {
                    let a = self.art_start + r;
                    let sign = if self.rhs[r].is_negative() { -Q::one() } else { Q::one() };
                    self.columns[a] = vec![(r, sign)];
                    a
                }
            };
            basis.push(v);
        }
        self.set_basis(basis);
        self.refactor();
    }

    /// Minimization cost of variable `v` in the given phase.
    fn cost(&self, v: usize, phase: &Phase) -> Q {
        match phase {
            Phase::One => {
                if self.kind[v] == Kind::Artificial {
                    Q::one()
                } else {
                    Q::zero()
                }
            }
            Phase::Two => {
                if v < self.n {
                    -self.objective[v].clone()
                } else {
                    Q::zero()
                }
            }
        }
    }

    fn run(&mut self, phase: Phase) -> Result<(), SolveError> {
        let mut degenerate = 0usize;
        loop {
            if self.factor.as_ref().map_or(true, |f| f.updates() >= REFACTOR_EVERY) {
                self.refactor();
            }
            let factor = self.factor.as_ref().expect("factored");
            let cb: Vec<Q> = self.basis.iter().map(|&v| self.cost(v, &phase)).collect();
            let y = factor.btran(cb);
            let bland = degenerate >= DEGENERATE_RUN;

            // Pricing.
            let mut entering: Option<(usize, Q)> = None;
            for j in 0..self.columns.len() {
                if self.position[j].is_some() || self.kind[j] == Kind::Artificial {
                    continue;
                }
                let mut d = self.cost(j, &phase);
                for (r, a) in &self.columns[j] {
                    if !y[*r].is_zero() {
                        d -= a * &y[*r];
                    }
                }
                let improving = match self.kind[j] {
                    Kind::Free => !d.is_zero(),
                    _ => d.is_negative(),
                };
                if !improving {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.as_ref().map_or(true, |(_, best)| d.abs() > best.abs()) {
                    entering = Some((j, d));
                }
            }
            let Some((j, d)) = entering else { return Ok(()) };
            let increase = d.is_negative();

            // Ratio test along the direction: x_B changes by -dir * alpha.
            let alpha = factor.ftran(&self.columns[j]);
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.m {
                if alpha[i].is_zero() {
                    continue;
                }
                let v = self.basis[i];
                let rate = if increase { -alpha[i].clone() } else { alpha[i].clone() };
                let ratio = match (self.kind[v], &phase) {
                    (Kind::Free, _) => continue,
                    (Kind::Artificial, Phase::Two) => Q::zero(),
                    _ => {
                        if !rate.is_negative() {
                            continue;
                        }
                        &self.x_basic[i] / -&rate
                    }
                };
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr
                            || (ratio == *lr && {
                                let lv = self.basis[*li];
                                let (a, b) = (self.kind[v] == Kind::Artificial, self.kind[lv] == Kind::Artificial);
                                if bland {
                                    v < lv
                                } else {
                                    (a && !b) || (a == b && v < lv)
                                }
                            })
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, t)) = leave else { return Err(SolveError::Unbounded) };

            self.iterations += 1;
            degenerate = if t.is_zero() { degenerate + 1 } else { 0 };
            if !t.is_zero() {
                for i in 0..self.m {
                    if !alpha[i].is_zero() {
                        let delta = &t * &alpha[i];
                        if increase {
                            self.x_basic[i] -= delta;
                        } else {
                            self.x_basic[i] += delta;
                        }
                    }
                }
            }
            self.x_basic[r] = if increase { t } else { -t };
            let old = self.basis[r];
            self.position[old] = None;
            self.position[j] = Some(r);
            self.basis[r] = j;
            self.factor.as_mut().expect("factored").update(r, &alpha);
        }
    }

    fn values(&self) -> Vec<Q> {
        let mut x = vec![Q::zero(); self.n];
        for (i, &v) in self.basis.iter().enumerate() {
            if v < self.n {
                x[v] = self.x_basic[i].clone();
            }
        }
        x
    }

    fn infeasibility(&self) -> Q {
        self.basis
            .iter()
            .zip(&self.x_basic)
            .filter(|(&v, _)| self.kind[v] == Kind::Artificial)
            .map(|(_, x)| x.clone())
            .sum()
    }
}

/// Solves `lp` exactly. `warm` optionally supplies a starting basis as
/// flags over structural columns and rows (a basic row means its slack, or
/// its artificial for an equality row).
pub(crate) fn solve_exact(lp: &SparseLP, warm: Option<(&[bool], &[bool])>) -> Result<ExactSolution, SolveError> {
    let mut s = Simplex::new(lp);
    let mut started = false;
    if let Some((cols, rows)) = warm {
        let mut basis: Vec<usize> = (0..s.n).filter(|&j| cols[j]).collect();
        basis.extend((0..s.m).filter(|&r| rows[r]).map(|r| s.slack_of[r].unwrap_or(s.art_start + r)));
        if basis.len() == s.m {
            s.set_basis(basis);
            s.refactor();
            s.orient_artificials();
            let feasible = s.basis.iter().zip(&s.x_basic).all(|(&v, x)| s.kind[v] != Kind::NonNeg || !x.is_negative());
            started = feasible;
        }
    }
    if !started {
        s.cold_basis();
    }
    if s.infeasibility().is_positive() {
        s.run(Phase::One)?;
        if s.infeasibility().is_positive() {
            return Err(SolveError::Infeasible);
        }
    }
    s.run(Phase::Two)?;
    let values = s.values();
    let objective = values.iter().zip(&s.objective).map(|(x, c)| x * c).sum();
    Ok(ExactSolution { objective, values, iterations: s.iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn lp(objective: Vec<Q>, rows: Vec<(Vec<Q>, RowSense, Q)>, bounds: Vec<VarBound>) -> SparseLP {
        let n = objective.len();
        let mut triplets = Vec::new();
        for (r, (coefs, _, _)) in rows.iter().enumerate() {
            for (c, v) in coefs.iter().enumerate() {
                if !v.is_zero() {
                    triplets.push((r, c, v.clone()));
                }
            }
        }
        SparseLP {
            col_names: (0..n).map(|j| format!("c{j}")).collect(),
            row_names: (0..rows.len()).map(|r| format!("r{r}")).collect(),
            objective,
            bounds,
            senses: rows.iter().map(|r| r.1).collect(),
            rhs: rows.iter().map(|r| r.2.clone()).collect(),
            triplets,
        }
    }

    #[test]
    fn small_maximization() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3.
        let p = lp(
            vec![qi(3), qi(2)],
            vec![
                (vec![qi(1), qi(1)], RowSense::Le, qi(4)),
                (vec![qi(1), qi(3)], RowSense::Le, qi(6)),
                (vec![qi(1), qi(0)], RowSense::Le, qi(3)),
            ],
            vec![VarBound::NonNegative; 2],
        );
        let s = solve_exact(&p, None).unwrap();
        assert_eq!(s.objective, qi(11));
        assert_eq!(s.values, vec![qi(3), qi(1)]);
    }

    #[test]
    fn matching_pennies_value() {
        // max v s.t. p - (1-p) >= v, -(p) + (1-p) >= v, p + q = 1.
        let p = lp(
            vec![qi(0), qi(0), qi(1)],
            vec![
                (vec![qi(1), qi(-1), qi(-1)], RowSense::Ge, qi(0)),
                (vec![qi(-1), qi(1), qi(-1)], RowSense::Ge, qi(0)),
                (vec![qi(1), qi(1), qi(0)], RowSense::Eq, qi(1)),
            ],
            vec![VarBound::NonNegative, VarBound::NonNegative, VarBound::Free],
        );
        let s = solve_exact(&p, None).unwrap();
        assert_eq!(s.objective, qi(0));
        assert_eq!(s.values[0], q(1, 2));
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let infeasible = lp(
            vec![qi(1)],
            vec![(vec![qi(1)], RowSense::Le, qi(-1))],
            vec![VarBound::NonNegative],
        );
        assert_eq!(solve_exact(&infeasible, None).err(), Some(SolveError::Infeasible));
        let unbounded = lp(vec![qi(1)], vec![(vec![qi(1)], RowSense::Ge, qi(1))], vec![VarBound::NonNegative]);
        assert_eq!(solve_exact(&unbounded, None).err(), Some(SolveError::Unbounded));
    }
}
