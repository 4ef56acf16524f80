use serde::{Deserialize, Serialize};

use super::builder::{build, Expand};
use super::GenError;
use crate::game::{GameTree, Team};
use crate::rational::{q, qi};

/// A 3-CNF formula. Literals are 1-based signed variable indices: `3` is
/// `x3`, `-3` is `¬x3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl Cnf {
    pub fn check(&self) -> Result<(), GenError> {
        if self.clauses.is_empty() {
            return Err(GenError::Invalid("cnf needs at least one clause".into()));
        }
        for c in &self.clauses {
            for &lit in c {
                if lit == 0 || lit.unsigned_abs() as usize > self.vars {
                    return Err(GenError::Invalid(format!("literal {lit} out of range 1..={}", self.vars)));
                }
            }
        }
        Ok(())
    }

    /// Whether `assignment[v]` (0-based) satisfies every clause.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&lit| literal_true(lit, assignment[lit.unsigned_abs() as usize - 1])))
    }

    /// Exhaustive satisfiability check.
    pub fn is_satisfiable(&self) -> bool {
        (0u64..1 << self.vars).any(|bits| {
            let a: Vec<bool> = (0..self.vars).map(|v| bits >> v & 1 == 1).collect();
            self.satisfied_by(&a)
        })
    }
}

fn literal_true(lit: i32, value: bool) -> bool {
    (lit > 0) == value
}

/// The single-team game used to show hardness of team correlated equilibria.
///
/// Nature picks a clause uniformly. P1 sees the clause and names one of its
/// three literal positions. P2 sees only the named variable and assigns it
/// true (`T`) or false (`F`). The team scores 1 when the assignment satisfies
/// the clause, 0 otherwise. Team Minus is empty.
pub fn make_sat_game(cnf: &Cnf) -> Result<GameTree, GenError> {
    cnf.check()?;
    let m = cnf.clauses.len() as i64;

    #[derive(Clone)]
    enum S {
        Root,
        Clause(usize),
        Pick(usize, usize),
        Done(usize, usize, bool),
    }

    Ok(build(S::Root, |s: &S| match *s {
        S::Root => Expand::Chance((0..cnf.clauses.len()).map(|c| (format!("c{c}"), q(1, m), S::Clause(c))).collect()),
        S::Clause(c) => Expand::Decision {
            team: Team::Plus,
            player: 0,
            key: (0, c),
            children: (0..3).map(|k| (format!("l{k}"), S::Pick(c, k))).collect(),
        },
        S::Pick(c, k) => {
            let var = cnf.clauses[c][k].unsigned_abs() as usize;
            Expand::Decision {
                team: Team::Plus,
                player: 1,
                key: (1, var),
                children: vec![("T".into(), S::Done(c, var, true)), ("F".into(), S::Done(c, var, false))],
            }
        }
        S::Done(c, var, value) => {
            let wins = cnf.clauses[c]
                .iter()
                .any(|&lit| lit.unsigned_abs() as usize == var && literal_true(lit, value));
            Expand::Terminal(qi(wins as i64))
        }
    }))
}
