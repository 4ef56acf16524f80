use std::collections::HashMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use super::PublicTreeDecomposition;
use crate::feasible::{Assignment, FeasibleSets};

const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("bag {bag}: expected {expected} probabilities, got {got}")]
    Shape { bag: usize, expected: usize, got: usize },
    #[error("bag {bag}: probabilities must be nonnegative and sum to 1")]
    NotADistribution { bag: usize },
    #[error("marginals of bag {bag} and its parent disagree by {difference} on a shared pattern")]
    MarginalMismatch { bag: usize, difference: f64 },
}

/// Draws full assignments from per-bag distributions over `X_C`: the root bag
/// is sampled from its own distribution, every other bag from its
/// distribution conditioned on the parent's draw restricted to `C⁻`.
pub struct JointSampler<'a> {
    dec: &'a PublicTreeDecomposition,
    sets: &'a FeasibleSets,
    root: WeightedIndex<f64>,
    /// Per bag, per `C⁻` pattern: candidate assignment indices and a sampler
    /// over them (`None` when all candidates have zero mass).
    conditionals: Vec<HashMap<Assignment, (Vec<usize>, Option<WeightedIndex<f64>>)>>,
    /// Per bag, the parent positions of its `C⁻`.
    projections: Vec<Vec<usize>>,
    rng: StdRng,
}

/// One draw: the chosen assignment index per bag and the resulting 0/1 value
/// of every class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Draw {
    pub per_bag: Vec<usize>,
    pub plan: Vec<bool>,
}

/// Checks that `dists` (one probability vector per bag, aligned with
/// `sets`) agree on every parent-child marginal and prepares a seeded sampler.
pub fn sample_joint<'a>(
    dec: &'a PublicTreeDecomposition,
    sets: &'a FeasibleSets,
    dists: &[Vec<f64>],
    seed: u64,
) -> Result<JointSampler<'a>, SampleError> {
    for (b, set) in sets.sets.iter().enumerate() {
        let d = dists.get(b).ok_or(SampleError::Shape { bag: b, expected: set.len(), got: 0 })?;
        if d.len() != set.len() {
            return Err(SampleError::Shape { bag: b, expected: set.len(), got: d.len() });
        }
        let sum: f64 = d.iter().sum();
        if d.iter().any(|&p| p < -TOLERANCE || !p.is_finite()) || (sum - 1.0).abs() > TOLERANCE {
            return Err(SampleError::NotADistribution { bag: b });
        }
    }
    let clean = |w: &[f64]| w.iter().map(|&p| p.max(0.0)).collect::<Vec<f64>>();

    let mut conditionals = Vec::with_capacity(dec.bags.len());
    let mut projections = Vec::with_capacity(dec.bags.len());
    for (b, bag) in dec.bags.iter().enumerate() {
        let set = &sets.sets[b];
        let mut groups: HashMap<Assignment, (Vec<usize>, Vec<f64>)> = HashMap::new();
        for j in 0..set.len() {
            let e = groups.entry(set.pattern(j).to_bitvec()).or_default();
            e.0.push(j);
            e.1.push(dists[b][j]);
        }
        let proj: Vec<usize> = match bag.parent {
            None => Vec::new(),
            Some(p) => bag.c_minus.iter().map(|&c| dec.bags[p].position(c).expect("C⁻ ⊆ parent C⁺")).collect(),
        };
        if let Some(p) = bag.parent {
            let mut parent_mass: HashMap<Assignment, f64> = HashMap::new();
            for (j, x) in sets.sets[p].assignments.iter().enumerate() {
                let key: Assignment = proj.iter().map(|&i| x[i]).collect();
                *parent_mass.entry(key).or_default() += dists[p][j];
            }
            let mut keys: Vec<&Assignment> = parent_mass.keys().chain(groups.keys()).collect();
            keys.sort();
            keys.dedup();
            for key in keys {
                let a = parent_mass.get(key).copied().unwrap_or(0.0);
                let c: f64 = groups.get(key).map_or(0.0, |g| g.1.iter().sum());
                let difference = (a - c).abs();
                if difference > TOLERANCE {
                    return Err(SampleError::MarginalMismatch { bag: b, difference });
                }
                if a > 0.0 && !groups.contains_key(key) {
                    return Err(SampleError::MarginalMismatch { bag: b, difference: a });
                }
            }
        }
        conditionals.push(
            groups
                .into_iter()
                .map(|(k, (idx, w))| {
                    let sampler = WeightedIndex::new(clean(&w)).ok();
                    (k, (idx, sampler))
                })
                .collect(),
        );
        projections.push(proj);
    }
    let root = WeightedIndex::new(clean(&dists[0])).map_err(|_| SampleError::NotADistribution { bag: 0 })?;
    Ok(JointSampler { dec, sets, root, conditionals, projections, rng: StdRng::seed_from_u64(seed) })
}

impl JointSampler<'_> {
    pub fn draw(&mut self) -> Draw {
        let n = self.dec.bags.len();
        let mut per_bag = vec![0usize; n];
        per_bag[0] = self.root.sample(&mut self.rng);
        // Parents precede children in bag order.
        for b in 1..n {
            let p = self.dec.bags[b].parent.expect("non-root bag has a parent");
            let x = &self.sets.sets[p].assignments[per_bag[p]];
            let key: Assignment = self.projections[b].iter().map(|&i| x[i]).collect();
            let (idx, sampler) = &self.conditionals[b][&key];
            per_bag[b] = match sampler {
                Some(s) => idx[s.sample(&mut self.rng)],
                None => idx[self.rng.gen_range(0..idx.len())],
            };
        }
        let mut plan = vec![false; self.dec.classes];
        for (b, bag) in self.dec.bags.iter().enumerate() {
            let x = &self.sets.sets[b].assignments[per_bag[b]];
            for (i, &c) in bag.c_minus.iter().chain(&bag.c_plus).enumerate() {
                plan[c] = x[i];
            }
        }
        Draw { per_bag, plan }
    }
}
