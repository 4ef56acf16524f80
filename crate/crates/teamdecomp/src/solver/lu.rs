//! Exact sparse LU factorization of a simplex basis, with product-form
//! updates between refactorizations.
//!
//! The basis `B` has one row per constraint and one column per basis
//! position. Factorization is right-looking Gaussian elimination with a
//! Markowitz-style pivot choice (shortest column, then shortest row); in
//! exact arithmetic any nonzero pivot is stable, so the choice only serves
//! sparsity.

use std::collections::{HashMap, HashSet};

use num_traits::Zero;

use crate::rational::Q;

struct Step {
    row: usize,
    pos: usize,
    pivot: Q,
    /// Remaining entries of the pivot row: `(position, value)`.
    upper: Vec<(usize, Q)>,
    /// Row operations `row_k -= f * row_pivot`: `(k, f)`.
    lower: Vec<(usize, Q)>,
}

struct Eta {
    pos: usize,
    pivot: Q,
    /// Off-pivot entries of the entering column's representation.
    others: Vec<(usize, Q)>,
}

pub(crate) struct Factor {
    m: usize,
    steps: Vec<Step>,
    etas: Vec<Eta>,
}

/// Positions and rows left without a pivot when the basis is singular.
pub(crate) struct Singular {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
}

impl Factor {
    /// Factors the `m × m` matrix whose column `p` is `columns[p]`, given as
    /// `(row, value)` pairs.
    pub fn new(m: usize, columns: &[Vec<(usize, Q)>]) -> Result<Factor, Singular> {
        let mut rows: Vec<HashMap<usize, Q>> = vec![HashMap::new(); m];
        let mut cols: Vec<HashSet<usize>> = vec![HashSet::new(); m];
        for (p, col) in columns.iter().enumerate() {
            for (r, v) in col {
                if !v.is_zero() {
                    rows[*r].insert(p, v.clone());
                    cols[p].insert(*r);
                }
            }
        }
        let mut row_done = vec![false; m];
        let mut pos_done = vec![false; m];
        let mut steps = Vec::with_capacity(m);

        loop {
            // Shortest remaining nonempty column.
            let mut best: Option<(usize, usize)> = None;
            for p in 0..m {
                if pos_done[p] || cols[p].is_empty() {
                    continue;
                }
                let n = cols[p].len();
                if best.map_or(true, |(_, bn)| n < bn) {
                    best = Some((p, n));
                    if n == 1 {
                        break;
                    }
                }
            }
            let Some((p, _)) = best else { break };
            let r = *cols[p].iter().min_by_key(|&&r| (rows[r].len(), r)).expect("nonempty column");

            let pivot_row = std::mem::take(&mut rows[r]);
            let pivot = pivot_row[&p].clone();
            for q in pivot_row.keys() {
                cols[*q].remove(&r);
            }
            let mut lower = Vec::new();
            let others: Vec<usize> = cols[p].iter().copied().collect();
            for k in others {
                let f = &rows[k][&p] / &pivot;
                rows[k].remove(&p);
                for (q, v) in &pivot_row {
                    if *q == p {
                        continue;
                    }
                    let entry = rows[k].entry(*q).or_insert_with(Q::zero);
                    *entry -= &f * v;
                    if entry.is_zero() {
                        rows[k].remove(q);
                        cols[*q].remove(&k);
                    } else {
                        cols[*q].insert(k);
                    }
                }
                lower.push((k, f));
            }
            cols[p].clear();
            let mut upper: Vec<(usize, Q)> = pivot_row.into_iter().filter(|(q, _)| *q != p).collect();
            upper.sort_unstable_by_key(|e| e.0);
            lower.sort_unstable_by_key(|e| e.0);
            row_done[r] = true;
            pos_done[p] = true;
            steps.push(Step { row: r, pos: p, pivot, upper, lower });
        }
        if steps.len() < m {
            return Err(Singular {
                positions: (0..m).filter(|&p| !pos_done[p]).collect(),
                rows: (0..m).filter(|&r| !row_done[r]).collect(),
            });
        }
        Ok(Factor { m, steps, etas: Vec::new() })
    }

    pub fn updates(&self) -> usize {
        self.etas.len()
    }

    /// Solves `B x = a` for a right-hand side given per row.
    pub fn ftran(&self, a: &[(usize, Q)]) -> Vec<Q> {
        let mut b = vec![Q::zero(); self.m];
        for (r, v) in a {
            b[*r] += v;
        }
        self.ftran_dense(b)
    }

    pub fn ftran_dense(&self, mut b: Vec<Q>) -> Vec<Q> {
        for s in &self.steps {
            if b[s.row].is_zero() {
                continue;
            }
            let br = b[s.row].clone();
            for (k, f) in &s.lower {
                b[*k] -= f * &br;
            }
        }
        let mut x = vec![Q::zero(); self.m];
        for s in self.steps.iter().rev() {
            let mut acc = std::mem::take(&mut b[s.row]);
            for (q, u) in &s.upper {
                if !x[*q].is_zero() {
                    acc -= u * &x[*q];
                }
            }
            if !acc.is_zero() {
                x[s.pos] = acc / &s.pivot;
            }
        }
        for e in &self.etas {
            if x[e.pos].is_zero() {
                continue;
            }
            let xr = &x[e.pos] / &e.pivot;
            for (i, a) in &e.others {
                x[*i] -= a * &xr;
            }
            x[e.pos] = xr;
        }
        x
    }

    /// Solves `Bᵀ y = c` for `c` given per basis position; `y` is per row.
    pub fn btran(&self, mut c: Vec<Q>) -> Vec<Q> {
        for e in self.etas.iter().rev() {
            let mut acc = std::mem::take(&mut c[e.pos]);
            for (i, a) in &e.others {
                if !c[*i].is_zero() {
                    acc -= a * &c[*i];
                }
            }
            c[e.pos] = acc / &e.pivot;
        }
        let mut w = vec![Q::zero(); self.m];
        for s in &self.steps {
            let v = std::mem::take(&mut c[s.pos]);
            if v.is_zero() {
                continue;
            }
            let wr = v / &s.pivot;
            for (q, u) in &s.upper {
                c[*q] -= u * &wr;
            }
            w[s.row] = wr;
        }
        for s in self.steps.iter().rev() {
            let mut acc = std::mem::take(&mut w[s.row]);
            for (k, f) in &s.lower {
                if !w[*k].is_zero() {
                    acc -= f * &w[*k];
                }
            }
            w[s.row] = acc;
        }
        w
    }

    /// Records that basis position `pos` now holds a column whose
    /// representation in the old basis is `alpha` (an `ftran` result).
    pub fn update(&mut self, pos: usize, alpha: &[Q]) {
        let others = alpha
            .iter()
            .enumerate()
            .filter(|(i, a)| *i != pos && !a.is_zero())
            .map(|(i, a)| (i, a.clone()))
            .collect();
        self.etas.push(Eta { pos, pivot: alpha[pos].clone(), others });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn mat() -> Vec<Vec<(usize, Q)>> {
        // Columns of [[2, 1, 0], [0, 3, 1], [1, 0, 4]].
        vec![
            vec![(0, qi(2)), (2, qi(1))],
            vec![(0, qi(1)), (1, qi(3))],
            vec![(1, qi(1)), (2, qi(4))],
        ]
    }

    fn mul(cols: &[Vec<(usize, Q)>], x: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); 3];
        for (p, col) in cols.iter().enumerate() {
            for (r, v) in col {
                out[*r] += v * &x[p];
            }
        }
        out
    }

    #[test]
    fn solves_and_transposes() {
        let cols = mat();
        let f = Factor::new(3, &cols).ok().unwrap();
        let b = vec![(0, qi(1)), (1, qi(2)), (2, q(1, 2))];
        let x = f.ftran(&b);
        assert_eq!(mul(&cols, &x), vec![qi(1), qi(2), q(1, 2)]);
        let y = f.btran(vec![qi(1), qi(0), qi(5)]);
        let yt: Vec<Q> = cols.iter().map(|c| c.iter().map(|(r, v)| v * &y[*r]).sum()).collect();
        assert_eq!(yt, vec![qi(1), qi(0), qi(5)]);
    }

    #[test]
    fn eta_update_matches_refactor() {
        let mut cols = mat();
        let mut f = Factor::new(3, &cols).ok().unwrap();
        let entering = vec![(0, qi(1)), (1, qi(1)), (2, qi(1))];
        let alpha = f.ftran(&entering);
        f.update(1, &alpha);
        cols[1] = entering;
        let g = Factor::new(3, &cols).ok().unwrap();
        let b = vec![(0, qi(3)), (2, qi(-1))];
        assert_eq!(f.ftran(&b), g.ftran(&b));
        let c = vec![qi(1), qi(2), qi(3)];
        assert_eq!(f.btran(c.clone()), g.btran(c));
    }

    #[test]
    fn reports_singularity() {
        let cols = vec![vec![(0, qi(1)), (1, qi(1))], vec![(0, qi(2)), (1, qi(2))]];
        let s = Factor::new(2, &cols).err().unwrap();
        assert_eq!(s.positions.len(), 1);
        assert_eq!(s.rows.len(), 1);
    }
}
