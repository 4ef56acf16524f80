use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GameTree, Team};

/// How nodes with equal team sequences are merged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewKind {
    /// One pass-through class per team sequence, holding every non-team node
    /// with that sequence regardless of depth, and one decision class per
    /// (sequence, infoset). Requires each team infoset's nodes to have team
    /// sequences of equal length.
    Compact,
    /// Classes are nodes with equal depth and equal team sequence. The
    /// team's decision nodes are further split by infoset, so a class never
    /// mixes two decisions.
    Depth,
}

/// Role of a class in the team view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassKind {
    /// Decision nodes of one team infoset.
    TeamDecision(usize),
    /// Anything the team does not control: chance, opponents, terminals.
    PassThrough,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ViewError {
    #[error("class {class} mixes team decision nodes with other nodes or infosets (nodes {a} and {b})")]
    HeterogeneousClass { class: usize, a: usize, b: usize },
    #[error("merged classes do not form a tree (node {node} has a parent in another class)")]
    NotATree { node: usize },
    #[error("infoset {infoset} has nodes with team sequences of different lengths")]
    UnevenSequences { infoset: usize },
}

/// A team's quotient of the game tree.
///
/// Class 0 is the root class. Classes are ordered by level and, within a
/// level, by first appearance in the node order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TeamView {
    pub team: Team,
    pub kind: ViewKind,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    /// For children of a team decision class, the index of the action leading
    /// to them in the parent's infoset.
    pub action: Vec<Option<usize>>,
    pub class_kind: Vec<ClassKind>,
    /// Depth in the quotient tree.
    pub level: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// Class of every game node.
    pub nu: Vec<usize>,
}

impl TeamView {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn infoset_of(&self, c: usize) -> Option<usize> {
        match self.class_kind[c] {
            ClassKind::TeamDecision(i) => Some(i),
            ClassKind::PassThrough => None,
        }
    }

    /// Number of team sequences: one for the empty sequence plus one per
    /// action of every team decision class.
    pub fn seq_count(&self, game: &GameTree) -> usize {
        1 + (0..self.len())
            .filter_map(|c| self.infoset_of(c))
            .map(|i| game.infoset(i).actions.len())
            .sum::<usize>()
    }

    /// Classes belonging to each team infoset, keyed by infoset id.
    pub fn infoset_classes(&self) -> HashMap<usize, Vec<usize>> {
        let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
        for c in 0..self.len() {
            if let Some(i) = self.infoset_of(c) {
                map.entry(i).or_default().push(c);
            }
        }
        map
    }

    /// Classes that contain at least one terminal.
    pub fn terminal_classes(&self, game: &GameTree) -> Vec<usize> {
        let mut cs: Vec<usize> = game.terminals().map(|z| self.nu[z]).collect();
        cs.sort_unstable();
        cs.dedup();
        cs
    }
}

/// Builds the compact view, falling back to the depth view when some team
/// infoset has nodes with team sequences of unequal length.
pub fn build_team_view(game: &GameTree, team: Team) -> Result<TeamView, ViewError> {
    match build_compact(game, team) {
        Ok(v) => Ok(v),
        Err(ViewError::UnevenSequences { .. }) => build_depth(game, team),
        Err(e) => Err(e),
    }
}

/// Builds the requested view without fallback.
pub fn build_team_view_with(game: &GameTree, team: Team, kind: ViewKind) -> Result<TeamView, ViewError> {
    match kind {
        ViewKind::Compact => build_compact(game, team),
        ViewKind::Depth => build_depth(game, team),
    }
}

struct Draft {
    parent: Vec<Option<usize>>,
    action: Vec<Option<usize>>,
    kind: Vec<ClassKind>,
    level: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl Draft {
    fn new() -> Draft {
        Draft { parent: vec![], action: vec![], kind: vec![], level: vec![], members: vec![] }
    }

    fn push(&mut self, parent: Option<usize>, action: Option<usize>, kind: ClassKind, level: usize) -> usize {
        self.parent.push(parent);
        self.action.push(action);
        self.kind.push(kind);
        self.level.push(level);
        self.members.push(Vec::new());
        self.parent.len() - 1
    }

    /// Reorders classes by (level, creation order) and assembles the view.
    fn finish(self, team: Team, kind: ViewKind, nu: Vec<usize>) -> TeamView {
        let n = self.parent.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&c| (self.level[c], c));
        let mut rank = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new;
        }
        let parent: Vec<Option<usize>> = order.iter().map(|&c| self.parent[c].map(|p| rank[p])).collect();
        let mut children = vec![Vec::new(); n];
        for (c, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(c);
            }
        }
        TeamView {
            team,
            kind,
            parent,
            children,
            action: order.iter().map(|&c| self.action[c]).collect(),
            class_kind: order.iter().map(|&c| self.kind[c]).collect(),
            level: order.iter().map(|&c| self.level[c]).collect(),
            members: order.iter().map(|&c| self.members[c].clone()).collect(),
            nu: nu.into_iter().map(|c| rank[c]).collect(),
        }
    }
}

fn child_indices(game: &GameTree) -> Vec<usize> {
    let mut idx = vec![0; game.len()];
    for node in game.nodes() {
        for (k, &c) in node.children.iter().enumerate() {
            idx[c] = k;
        }
    }
    idx
}

fn team_decision(game: &GameTree, h: usize, team: Team) -> Option<usize> {
    match game.node(h).decision() {
        Some((t, _, i)) if t == team => Some(i),
        _ => None,
    }
}

fn build_compact(game: &GameTree, team: Team) -> Result<TeamView, ViewError> {
    let idx = child_indices(game);
    let mut seq_ids: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut seq_len = vec![0usize];
    let mut node_seq = vec![0usize; game.len()];
    let mut s_class: HashMap<usize, usize> = HashMap::new();
    let mut d_class: HashMap<(usize, usize), usize> = HashMap::new();
    let mut draft = Draft::new();
    let mut nu = vec![0; game.len()];
    s_class.insert(0, draft.push(None, None, ClassKind::PassThrough, 0));

    for h in 0..game.len() {
        let seq = match game.node(h).parent {
            None => 0,
            Some(p) => match team_decision(game, p, team) {
                None => node_seq[p],
                Some(infoset) => {
                    let key = (node_seq[p], infoset, idx[h]);
                    let next = seq_len.len();
                    let s = *seq_ids.entry(key).or_insert(next);
                    if s == next {
                        seq_len.push(seq_len[node_seq[p]] + 1);
                        let d = d_class[&(node_seq[p], infoset)];
                        let c = draft.push(Some(d), Some(idx[h]), ClassKind::PassThrough, 2 * seq_len[s]);
                        s_class.insert(s, c);
                    }
                    s
                }
            },
        };
        node_seq[h] = seq;
        let c = match team_decision(game, h, team) {
            Some(infoset) => *d_class.entry((seq, infoset)).or_insert_with(|| {
                draft.push(Some(s_class[&seq]), None, ClassKind::TeamDecision(infoset), 2 * seq_len[seq] + 1)
            }),
            None => s_class[&seq],
        };
        nu[h] = c;
        draft.members[c].push(h);
    }

    for (id, info) in game.infosets().iter().enumerate() {
        if info.team != team {
            continue;
        }
        let len0 = seq_len[node_seq[info.nodes[0]]];
        if info.nodes.iter().any(|&h| seq_len[node_seq[h]] != len0) {
            return Err(ViewError::UnevenSequences { infoset: id });
        }
    }
    Ok(draft.finish(team, ViewKind::Compact, nu))
}

fn build_depth(game: &GameTree, team: Team) -> Result<TeamView, ViewError> {
    let idx = child_indices(game);
    let mut seq_ids: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut node_seq = vec![0usize; game.len()];
    let mut classes: HashMap<(usize, usize, Option<usize>), usize> = HashMap::new();
    let mut draft = Draft::new();
    let mut nu = vec![0; game.len()];

    for h in 0..game.len() {
        let node = game.node(h);
        let (seq, action) = match node.parent {
            None => (0, None),
            Some(p) => match team_decision(game, p, team) {
                None => (node_seq[p], None),
                Some(infoset) => {
                    let next = seq_ids.len() + 1;
                    (*seq_ids.entry((node_seq[p], infoset, idx[h])).or_insert(next), Some(idx[h]))
                }
            },
        };
        node_seq[h] = seq;
        let infoset = team_decision(game, h, team);
        let kind = match infoset {
            Some(i) => ClassKind::TeamDecision(i),
            None => ClassKind::PassThrough,
        };
        let parent_class = node.parent.map(|p| nu[p]);
        let c = *classes
            .entry((node.depth, seq, infoset))
            .or_insert_with(|| draft.push(parent_class, action, kind, node.depth));
        if draft.parent[c] != parent_class {
            return Err(ViewError::NotATree { node: h });
        }
        if draft.kind[c] != kind {
            let a = draft.members[c][0];
            return Err(ViewError::HeterogeneousClass { class: c, a, b: h });
        }
        nu[h] = c;
        draft.members[c].push(h);
    }
    Ok(draft.finish(team, ViewKind::Depth, nu))
}
