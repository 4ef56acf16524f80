//! Locally feasible sets: for every bag `C`, the distinct restrictions to `C`
//! of the team's pure realization plans.
//!
//! Bags are processed top-down. A bag's candidate patterns on `C⁻` are the
//! projections of its parent's assignments (the all-ones pattern at the root).
//! Each pattern is expanded over the joint choices of the infosets active in
//! it: a pass-through class that is reached reaches all its children, a team
//! decision class reaches only the child of the chosen action.

use std::collections::{BTreeSet, HashSet};

use bitvec::prelude::*;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::decomposition::{has_team_decision, PublicTreeDecomposition};
use crate::game::{ClassKind, GameTree, TeamView};

/// Packed 0/1 assignment over a bag, `C⁻` positions first.
pub type Assignment = BitVec<u64, Lsb0>;

/// Default limit on `Σ_C |X_C|`.
pub const DEFAULT_CAP: usize = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFeasibleSet {
    pub bag: usize,
    /// `|C⁻|`: assignments store `C⁻` in positions `0..split`.
    pub split: usize,
    /// Sorted, duplicate-free.
    pub assignments: Vec<Assignment>,
}

impl LocalFeasibleSet {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Restriction of assignment `j` to `C⁻`.
    pub fn pattern(&self, j: usize) -> &BitSlice<u64, Lsb0> {
        &self.assignments[j][..self.split]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibleSets {
    pub sets: Vec<LocalFeasibleSet>,
    /// How often the "`C⁻` equals the parent's `C⁻`" shortcut fired.
    pub shortcut_hits: usize,
}

impl FeasibleSets {
    pub fn total(&self) -> usize {
        self.sets.iter().map(LocalFeasibleSet::len).sum()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeasibleError {
    #[error("feasible-set explosion at bag {bag}: Σ|X_C| reached {partial_sum}, cap is {cap}")]
    FeasibleSetExplosion { bag: usize, partial_sum: usize, cap: usize },
}

/// Runs the top-down enumeration over all bags.
pub fn enumerate_feasible(
    dec: &PublicTreeDecomposition,
    view: &TeamView,
    game: &GameTree,
    cap: usize,
) -> Result<FeasibleSets, FeasibleError> {
    let mut sets: Vec<LocalFeasibleSet> = Vec::with_capacity(dec.bags.len());
    let mut shortcut_hits = 0;
    let mut total = 0usize;

    for (b, bag) in dec.bags.iter().enumerate() {
        let split = bag.c_minus.len();
        let width = bag.size();

        let patterns: Vec<Assignment> = match bag.parent {
            None => vec![bitvec![u64, Lsb0; 1; split]],
            Some(p) => {
                let parent = &dec.bags[p];
                if parent.c_minus == bag.c_minus {
                    shortcut_hits += 1;
                    let copy = LocalFeasibleSet { bag: b, ..sets[p].clone() };
                    total += copy.len();
                    if total > cap {
                        return Err(FeasibleError::FeasibleSetExplosion { bag: b, partial_sum: total, cap });
                    }
                    sets.push(copy);
                    continue;
                }
                let pos: Vec<usize> = bag.c_minus.iter().map(|&c| parent.position(c).expect("C⁻ ⊆ parent C⁺")).collect();
                let unique: BTreeSet<Assignment> = sets[p]
                    .assignments
                    .iter()
                    .map(|x| pos.iter().map(|&i| x[i]).collect::<Assignment>())
                    .collect();
                unique.into_iter().collect()
            }
        };

        // Per C⁻ member: its infoset (if a team decision class) and the
        // positions of its children with their action indices.
        let mut infosets: Vec<usize> = Vec::new();
        let members: Vec<(Option<usize>, Vec<(usize, Option<usize>)>)> = bag
            .c_minus
            .iter()
            .map(|&c| {
                let info = match view.class_kind[c] {
                    ClassKind::TeamDecision(i) => {
                        infosets.push(i);
                        Some(i)
                    }
                    ClassKind::PassThrough => None,
                };
                let kids = view.children[c].iter().map(|&k| (bag.position(k).expect("children in C⁺"), view.action[k])).collect();
                (info, kids)
            })
            .collect();
        infosets.sort_unstable();
        infosets.dedup();
        let slot = |i: usize| infosets.binary_search(&i).expect("listed infoset");
        let arity: Vec<usize> = infosets.iter().map(|&i| game.infoset(i).actions.len()).collect();

        let mut out: HashSet<Assignment> = HashSet::new();
        let mut choice = vec![0usize; infosets.len()];
        for pattern in &patterns {
            let mut active: Vec<usize> = members
                .iter()
                .zip(pattern.iter().by_vals())
                .filter_map(|((info, _), on)| if on { info.map(slot) } else { None })
                .collect();
            active.sort_unstable();
            active.dedup();
            for &s in &active {
                choice[s] = 0;
            }
            loop {
                let mut x: Assignment = bitvec![u64, Lsb0; 0; width];
                for (k, (info, kids)) in members.iter().enumerate() {
                    if !pattern[k] {
                        continue;
                    }
                    x.set(k, true);
                    for &(pos, action) in kids {
                        let on = match info {
                            None => true,
                            Some(i) => action == Some(choice[slot(*i)]),
                        };
                        if on {
                            x.set(pos, true);
                        }
                    }
                }
                out.insert(x);
                if total + out.len() > cap {
                    return Err(FeasibleError::FeasibleSetExplosion { bag: b, partial_sum: total + out.len(), cap });
                }
                // Odometer over the active infosets' actions.
                let mut advanced = false;
                for &s in active.iter().rev() {
                    choice[s] += 1;
                    if choice[s] < arity[s] {
                        advanced = true;
                        break;
                    }
                    choice[s] = 0;
                }
                if !advanced {
                    break;
                }
            }
        }
        let mut assignments: Vec<Assignment> = out.into_iter().collect();
        assignments.sort_unstable();
        total += assignments.len();
        sets.push(LocalFeasibleSet { bag: b, split, assignments });
    }
    Ok(FeasibleSets { sets, shortcut_hits })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BagReach {
    pub bag: usize,
    /// `|X_C|`.
    pub size: usize,
    /// `w(C)`.
    pub w: usize,
    #[serde(skip)]
    pub c_plus: usize,
    /// `Σ_{i ≤ w(C)} binom(|C⁺|, i)`.
    #[serde(skip)]
    pub binomial_bound: BigUint,
    /// `|C|^{w(C)}`.
    #[serde(skip)]
    pub power_bound: BigUint,
}

impl BagReach {
    pub fn within_bounds(&self) -> bool {
        let size = BigUint::from(self.size);
        size <= self.binomial_bound && self.binomial_bound <= self.power_bound.clone().max(BigUint::one())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReachabilityStats {
    pub sum_xc: usize,
    pub per_bag: Vec<BagReach>,
    pub reachable_width: usize,
}

impl ReachabilityStats {
    pub fn bounds_hold(&self) -> bool {
        self.per_bag.iter().all(BagReach::within_bounds)
    }
}

/// Reachable width per bag: the largest number of `C⁺` classes one pure plan
/// reaches. Bags whose public node has no team decision class inherit their
/// parent's value; such a root bag gets 0.
pub fn reachability_stats(sets: &FeasibleSets, dec: &PublicTreeDecomposition, view: &TeamView) -> ReachabilityStats {
    let mut w = vec![0usize; dec.bags.len()];
    let mut per_bag = Vec::with_capacity(dec.bags.len());
    for (b, bag) in dec.bags.iter().enumerate() {
        let set = &sets.sets[b];
        w[b] = if has_team_decision(bag, view) {
            set.assignments.iter().map(|x| x[set.split..].count_ones()).max().unwrap_or(0)
        } else {
            bag.parent.map_or(0, |p| w[p])
        };
        per_bag.push(BagReach {
            bag: b,
            size: set.len(),
            w: w[b],
            c_plus: bag.c_plus.len(),
            binomial_bound: binomial_prefix(bag.c_plus.len(), w[b]),
            power_bound: num_traits::pow(BigUint::from(bag.size()), w[b]),
        });
    }
    ReachabilityStats { sum_xc: sets.total(), per_bag, reachable_width: w.iter().copied().max().unwrap_or(0) }
}

/// `Σ_{i=0}^{k} binom(n, i)`.
pub fn binomial_prefix(n: usize, k: usize) -> BigUint {
    let mut term = BigUint::one();
    let mut sum = BigUint::zero();
    for i in 0..=k.min(n) {
        sum += &term;
        term = term * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    sum
}

/// `3^t · 2^{t(n-1)}`, the bound on `|X_C|` for public-action games with `t`
/// types per player and `n` team members. `None` when `t` or `n` is 0.
pub fn public_action_bound(t: u32, n: u32) -> Option<BigUint> {
    if t == 0 || n == 0 {
        return None;
    }
    Some(BigUint::from(3u32).pow(t) << (t as u64 * (n as u64 - 1)))
}
