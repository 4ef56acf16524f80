//! Public-node tree decompositions of a team view.
//!
//! Two classes at the same level are linked when some team infoset has nodes
//! below both. The transitive closure of that relation partitions the
//! classes into public nodes `C⁻`. Every public node with children becomes a
//! bag `C = C⁻ ∪ C⁺`, where `C⁺` holds all children of `C⁻`; the bag's parent
//! is the bag whose `C⁺` contains `C⁻`.
//!
//! Public nodes without children (terminal-only classes) are not given bags
//! of their own. They are still covered, as members of their parent bag's
//! `C⁺`. The root public node always gets a bag.

mod sample;

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::game::{ClassKind, TeamView};

pub use sample::{sample_joint, JointSampler, SampleError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bag {
    /// Sorted classes of the public node.
    pub c_minus: Vec<usize>,
    /// Sorted children of all `c_minus` members.
    pub c_plus: Vec<usize>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

impl Bag {
    pub fn size(&self) -> usize {
        self.c_minus.len() + self.c_plus.len()
    }

    /// Position of `class` in the bag's assignment layout (`C⁻` first, then
    /// `C⁺`), if present.
    pub fn position(&self, class: usize) -> Option<usize> {
        if let Ok(i) = self.c_minus.binary_search(&class) {
            return Some(i);
        }
        self.c_plus.binary_search(&class).ok().map(|i| self.c_minus.len() + i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicTreeDecomposition {
    pub bags: Vec<Bag>,
    /// Number of classes in the underlying view.
    pub classes: usize,
}

impl PublicTreeDecomposition {
    pub fn root(&self) -> usize {
        0
    }

    /// For every class, the bag holding it in `C⁻` (none for classes in
    /// childless public nodes).
    pub fn minus_bag(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.classes];
        for (b, bag) in self.bags.iter().enumerate() {
            for &c in &bag.c_minus {
                out[c] = Some(b);
            }
        }
        out
    }

    /// For every class, the bag holding it in `C⁺` (none for the root).
    pub fn plus_bag(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.classes];
        for (b, bag) in self.bags.iter().enumerate() {
            for &c in &bag.c_plus {
                out[c] = Some(b);
            }
        }
        out
    }

    /// The bag and position used to read off `x(class)`: the parent bag's
    /// `C⁺` for non-root classes, the root bag's `C⁻` for the root.
    pub fn home(&self) -> Vec<(usize, usize)> {
        let mut out = vec![(usize::MAX, usize::MAX); self.classes];
        let root = &self.bags[0];
        for (i, &c) in root.c_minus.iter().enumerate() {
            out[c] = (0, i);
        }
        for (b, bag) in self.bags.iter().enumerate() {
            for (i, &c) in bag.c_plus.iter().enumerate() {
                out[c] = (b, bag.c_minus.len() + i);
            }
        }
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("internal error: public node of bag {bag} has parents in several bags")]
    NonUniqueParent { bag: usize },
    #[error("internal error: public node {public} mixes levels")]
    MixedLevels { public: usize },
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Partitions the classes of `view` into public nodes, ordered by level and
/// then by smallest member. Members are sorted.
pub fn public_partition(view: &TeamView) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(view.len());
    let mut frontier: Vec<usize>;
    for classes in infoset_groups(view) {
        frontier = classes;
        loop {
            for &c in &frontier[1..] {
                uf.union(frontier[0], c);
            }
            let parents: BTreeSet<usize> = frontier.iter().filter_map(|&c| view.parent[c]).collect();
            if parents.is_empty() {
                break;
            }
            frontier = parents.into_iter().collect();
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for c in 0..view.len() {
        groups.entry(uf.find(c)).or_default().push(c);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|g| (view.level[g[0]], g[0]));
    out
}

fn infoset_groups(view: &TeamView) -> Vec<Vec<usize>> {
    let mut by: Vec<(usize, Vec<usize>)> = view.infoset_classes().into_iter().collect();
    by.sort_unstable_by_key(|(i, _)| *i);
    by.into_iter().map(|(_, cs)| cs).collect()
}

/// Builds the public-node decomposition.
///
/// ```
/// use teamdecomp::decomposition::build_decomposition;
/// use teamdecomp::game::{build_team_view, Team};
/// use teamdecomp::generators::make_width_gap_game;
///
/// let game = make_width_gap_game(3).unwrap();
/// let dec = build_decomposition(&build_team_view(&game, Team::Plus).unwrap()).unwrap();
/// assert_eq!(dec.bags.iter().map(|b| b.size()).max(), Some(18));
/// ```
pub fn build_decomposition(view: &TeamView) -> Result<PublicTreeDecomposition, DecompositionError> {
    let publics: Vec<Vec<usize>> = public_partition(view)
        .into_iter()
        .filter(|g| view.parent[g[0]].is_none() || g.iter().any(|&c| !view.children[c].is_empty()))
        .collect();
    let mut bag_of = vec![usize::MAX; view.len()];
    for (b, g) in publics.iter().enumerate() {
        if g.iter().any(|&c| view.level[c] != view.level[g[0]]) {
            return Err(DecompositionError::MixedLevels { public: b });
        }
        for &c in g {
            bag_of[c] = b;
        }
    }
    let mut bags: Vec<Bag> = Vec::with_capacity(publics.len());
    for (b, g) in publics.iter().enumerate() {
        let mut c_plus: Vec<usize> = g.iter().flat_map(|&c| view.children[c].iter().copied()).collect();
        c_plus.sort_unstable();
        let parents: BTreeSet<usize> = g.iter().filter_map(|&c| view.parent[c]).map(|p| bag_of[p]).collect();
        let parent = match parents.len() {
            0 => None,
            1 => parents.into_iter().next(),
            _ => return Err(DecompositionError::NonUniqueParent { bag: b }),
        };
        if parent == Some(usize::MAX) {
            return Err(DecompositionError::NonUniqueParent { bag: b });
        }
        bags.push(Bag { c_minus: g.clone(), c_plus, parent, children: Vec::new() });
    }
    for b in 0..bags.len() {
        if let Some(p) = bags[b].parent {
            bags[p].children.push(b);
        }
    }
    Ok(PublicTreeDecomposition { bags, classes: view.len() })
}

/// Checks that `dec` is a tree decomposition of the dependency hypergraph of
/// the team's realization-plan constraints on `view`.
///
/// Hyperedges are the flow sets `{h} ∪ children(h)` and, for every pair of
/// classes `h, h'` of one infoset and every action `a`, the set
/// `{h, h', ha, h'a}`. Every hyperedge must fit in one bag, every class must
/// appear in some bag, the bags holding a class must form a connected subtree,
/// and the parent links must form a single tree.
pub fn verify_decomposition(dec: &PublicTreeDecomposition, view: &TeamView) -> bool {
    let n = dec.bags.len();
    if n == 0 || dec.classes != view.len() {
        return false;
    }
    // Tree shape: one root, acyclic parent links, children lists consistent.
    if dec.bags.iter().filter(|b| b.parent.is_none()).count() != 1 {
        return false;
    }
    for (b, bag) in dec.bags.iter().enumerate() {
        if let Some(p) = bag.parent {
            if p >= n || !dec.bags[p].children.contains(&b) {
                return false;
            }
        }
        let mut seen = 0;
        let mut cur = b;
        while let Some(p) = dec.bags[cur].parent {
            cur = p;
            seen += 1;
            if seen > n {
                return false;
            }
        }
    }

    let sets: Vec<BTreeSet<usize>> = dec
        .bags
        .iter()
        .map(|b| b.c_minus.iter().chain(&b.c_plus).copied().collect())
        .collect();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); view.len()];
    for (b, s) in sets.iter().enumerate() {
        for &c in s {
            if c >= view.len() {
                return false;
            }
            holders[c].push(b);
        }
    }
    // Running intersection: exactly one holder of each class lacks the class
    // in its parent.
    for (c, hs) in holders.iter().enumerate() {
        let tops = hs
            .iter()
            .filter(|&&b| dec.bags[b].parent.map_or(true, |p| !sets[p].contains(&c)))
            .count();
        if tops != 1 {
            return false;
        }
    }
    let covered = |edge: &[usize]| holders[edge[0]].iter().any(|&b| edge.iter().all(|c| sets[b].contains(c)));

    for h in 0..view.len() {
        if view.children[h].is_empty() {
            continue;
        }
        let mut edge = vec![h];
        edge.extend(&view.children[h]);
        if !covered(&edge) {
            return false;
        }
    }
    for classes in infoset_groups(view) {
        let by_action = |h: usize| -> HashMap<usize, usize> {
            view.children[h].iter().filter_map(|&c| view.action[c].map(|a| (a, c))).collect()
        };
        for (i, &h) in classes.iter().enumerate() {
            let ah = by_action(h);
            for &g in &classes[i + 1..] {
                let ag = by_action(g);
                for (a, &ch) in &ah {
                    let Some(&cg) = ag.get(a) else { continue };
                    if !covered(&[h, g, ch, cg]) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BagWidth {
    pub bag: usize,
    pub c_minus: usize,
    pub c_plus: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WidthStats {
    pub bags: usize,
    /// Largest bag size minus one.
    pub treewidth: usize,
    /// Largest number of tree neighbours of any bag.
    pub max_degree: usize,
    /// `treewidth + max_degree`, the combined width used in size estimates.
    #[serde(skip)]
    pub combined: usize,
    pub per_bag: Vec<BagWidth>,
}

pub fn width_stats(dec: &PublicTreeDecomposition) -> WidthStats {
    let treewidth = dec.bags.iter().map(Bag::size).max().unwrap_or(1).saturating_sub(1);
    let max_degree = dec
        .bags
        .iter()
        .map(|b| b.children.len() + usize::from(b.parent.is_some()))
        .max()
        .unwrap_or(0);
    WidthStats {
        bags: dec.bags.len(),
        treewidth,
        max_degree,
        combined: treewidth + max_degree,
        per_bag: dec
            .bags
            .iter()
            .enumerate()
            .map(|(bag, b)| BagWidth { bag, c_minus: b.c_minus.len(), c_plus: b.c_plus.len() })
            .collect(),
    }
}

/// Whether any class of the bag's public node is a team decision class.
pub fn has_team_decision(bag: &Bag, view: &TeamView) -> bool {
    bag.c_minus.iter().any(|&c| matches!(view.class_kind[c], ClassKind::TeamDecision(_)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_team_view, Team};
    use crate::generators::{make_kuhn, make_width_gap_game};

    #[test]
    fn width_gap_public_nodes() {
        let game = make_width_gap_game(3).unwrap();
        let view = build_team_view(&game, Team::Plus).unwrap();
        let parts = public_partition(&view);
        let p2: Vec<&Vec<usize>> = parts
            .iter()
            .filter(|g| g.iter().all(|&c| view.infoset_of(c).is_some_and(|i| game.infoset(i).player == 1)))
            .collect();
        assert_eq!(p2.len(), 2);
        assert!(p2.iter().all(|g| g.len() == 6));
    }

    #[test]
    fn kuhn_decompositions_verify() {
        let game = make_kuhn(2, 1, 3).unwrap();
        for team in Team::BOTH {
            let view = build_team_view(&game, team).unwrap();
            let dec = build_decomposition(&view).unwrap();
            assert!(verify_decomposition(&dec, &view));
        }
    }

    #[test]
    fn dropping_a_child_breaks_verification() {
        let game = make_kuhn(2, 1, 3).unwrap();
        let view = build_team_view(&game, Team::Plus).unwrap();
        let mut dec = build_decomposition(&view).unwrap();
        dec.bags[1].c_plus.pop();
        assert!(!verify_decomposition(&dec, &view));
    }

    #[test]
    fn duplicate_bag_breaks_verification() {
        let game = make_kuhn(2, 1, 3).unwrap();
        let view = build_team_view(&game, Team::Plus).unwrap();
        let mut dec = build_decomposition(&view).unwrap();
        let mut extra = dec.bags[2].clone();
        extra.parent = None;
        extra.children.clear();
        dec.bags.push(extra);
        assert!(!verify_decomposition(&dec, &view));
    }
}
