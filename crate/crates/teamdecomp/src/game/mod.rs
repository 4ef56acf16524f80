//! Extensive-form team games: the tree, its information sets, validation and
//! team sequences.
//!
//! A [`GameTree`] is an indexed node list with node 0 as the root. Payoffs are
//! always stated from Team Plus's point of view; Team Minus receives the
//! negation.

mod payoff;
mod view;

pub use payoff::{payoff_form, PayoffError, PayoffForm};
pub use view::{build_team_view, build_team_view_with, ClassKind, TeamView, ViewError, ViewKind};

use std::collections::HashMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_q, Q};

/// One of the two competing teams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Team {
    Plus,
    Minus,
}

impl Team {
    pub fn other(self) -> Team {
        match self {
            Team::Plus => Team::Minus,
            Team::Minus => Team::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Team::Plus => "plus",
            Team::Minus => "minus",
        }
    }

    /// Both teams, Plus first.
    pub const BOTH: [Team; 2] = [Team::Plus, Team::Minus];
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Team {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plus" => Ok(Team::Plus),
            "minus" => Ok(Team::Minus),
            other => Err(format!("unknown team `{other}` (expected plus or minus)")),
        }
    }
}

/// What happens at a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Nature moves; `probs[k]` is the probability of the k-th child.
    Chance { probs: Vec<Q> },
    /// A team member moves at information set `infoset`.
    Decision { team: Team, player: u32, infoset: usize },
    /// The game ends with `payoff` to Team Plus.
    Terminal { payoff: Q },
}

/// A node as stored in the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub parent: Option<usize>,
    /// Label of the edge from the parent (empty for the root).
    pub action: String,
    pub kind: NodeKind,
    pub depth: usize,
    pub children: Vec<usize>,
}

impl Node {
    pub fn is_terminal(&self) -> bool {
        matches!(self.kind, NodeKind::Terminal { .. })
    }

    /// Owning team and infoset if this is a decision node.
    pub fn decision(&self) -> Option<(Team, u32, usize)> {
        match self.kind {
            NodeKind::Decision { team, player, infoset } => Some((team, player, infoset)),
            _ => None,
        }
    }
}

/// An information set: nodes its owner cannot tell apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infoset {
    pub team: Team,
    pub player: u32,
    pub nodes: Vec<usize>,
    /// Action labels, taken from the children of the first node.
    pub actions: Vec<String>,
}

/// Input record for [`GameTree::from_nodes`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSpec {
    pub parent: Option<usize>,
    pub action: String,
    pub kind: NodeKind,
}

/// Structural errors that prevent a tree from being built at all.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("game has no nodes")]
    Empty,
    #[error("node 0 must be the root (no parent)")]
    RootHasParent,
    #[error("node {node}: parent {parent} must precede it")]
    BadParent { node: usize, parent: usize },
    #[error("node {node} has no parent but is not node 0")]
    SecondRoot { node: usize },
    #[error("infoset ids must be contiguous from 0; id {0} is unused")]
    SparseInfosetIds(usize),
    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),
}

/// An extensive-form game with two teams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameTree {
    nodes: Vec<Node>,
    infosets: Vec<Infoset>,
}

impl GameTree {
    /// Builds the tree from parent-linked records; every parent must precede
    /// its children. Semantic checks are left to [`validate`].
    pub fn from_nodes(specs: Vec<NodeSpec>) -> Result<GameTree, GameError> {
        if specs.is_empty() {
            return Err(GameError::Empty);
        }
        if specs[0].parent.is_some() {
            return Err(GameError::RootHasParent);
        }
        let mut nodes: Vec<Node> = Vec::with_capacity(specs.len());
        let mut infoset_nodes: Vec<Vec<usize>> = Vec::new();
        let mut owners: Vec<Option<(Team, u32)>> = Vec::new();
        for (i, spec) in specs.into_iter().enumerate() {
            let depth = match spec.parent {
                None if i == 0 => 0,
                None => return Err(GameError::SecondRoot { node: i }),
                Some(p) if p >= i => return Err(GameError::BadParent { node: i, parent: p }),
                Some(p) => {
                    nodes[p].children.push(i);
                    nodes[p].depth + 1
                }
            };
            if let NodeKind::Decision { team, player, infoset } = spec.kind {
                if infoset >= infoset_nodes.len() {
                    infoset_nodes.resize(infoset + 1, Vec::new());
                    owners.resize(infoset + 1, None);
                }
                infoset_nodes[infoset].push(i);
                owners[infoset].get_or_insert((team, player));
            }
            nodes.push(Node {
                parent: spec.parent,
                action: spec.action,
                kind: spec.kind,
                depth,
                children: Vec::new(),
            });
        }
        let mut infosets = Vec::with_capacity(infoset_nodes.len());
        for (id, members) in infoset_nodes.into_iter().enumerate() {
            let Some((team, player)) = owners[id] else {
                return Err(GameError::SparseInfosetIds(id));
            };
            let actions = nodes[members[0]]
                .children
                .iter()
                .map(|&c| nodes[c].action.clone())
                .collect();
            infosets.push(Infoset { team, player, nodes: members, actions });
        }
        Ok(GameTree { nodes, infosets })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, h: usize) -> &Node {
        &self.nodes[h]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn infoset(&self, id: usize) -> &Infoset {
        &self.infosets[id]
    }

    pub fn terminals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&h| self.nodes[h].is_terminal())
    }

    pub fn terminal_count(&self) -> usize {
        self.terminals().count()
    }

    /// Position of child `c` among its parent's children; this is the action
    /// index at the parent's infoset.
    pub fn child_index(&self, c: usize) -> usize {
        let p = self.nodes[c].parent.expect("root has no parent");
        self.nodes[p].children.iter().position(|&x| x == c).expect("child listed under parent")
    }

    /// Probability that chance plays every chance action on the path to `h`.
    pub fn chance_reach(&self) -> Vec<Q> {
        let mut reach = vec![Q::zero(); self.nodes.len()];
        reach[0] = Q::from_integer(1.into());
        for h in 0..self.nodes.len() {
            if let NodeKind::Chance { probs } = &self.nodes[h].kind {
                for (k, &c) in self.nodes[h].children.iter().enumerate() {
                    reach[c] = &reach[h] * probs.get(k).cloned().unwrap_or_else(Q::zero);
                }
            } else {
                for &c in &self.nodes[h].children {
                    reach[c] = reach[h].clone();
                }
            }
        }
        reach
    }

    /// Sorted ids of the players of `team` that own at least one infoset.
    pub fn players(&self, team: Team) -> Vec<u32> {
        let mut ps: Vec<u32> =
            self.infosets.iter().filter(|i| i.team == team).map(|i| i.player).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }
}

/// A team's history on a path: `(infoset, action label)` pairs in depth order.
pub type Sequence = Vec<(usize, String)>;

/// The team's infoset-action pairs from the root to `node`.
pub fn team_sequence(game: &GameTree, team: Team, node: usize) -> Result<Sequence, GameError> {
    if node >= game.len() {
        return Err(GameError::NodeOutOfRange(node));
    }
    let mut seq = Vec::new();
    let mut h = node;
    while let Some(p) = game.nodes[h].parent {
        if let Some((t, _, infoset)) = game.nodes[p].decision() {
            if t == team {
                seq.push((infoset, game.nodes[h].action.clone()));
            }
        }
        h = p;
    }
    seq.reverse();
    Ok(seq)
}

/// One violated invariant found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ThinInfoset { infoset: usize, depths: Vec<usize> },
    ActionMismatch { infoset: usize, node: usize },
    DuplicateAction { node: usize, action: String },
    MixedOwner { infoset: usize, node: usize },
    ChanceArity { node: usize, probs: usize, children: usize },
    ChanceNegative { node: usize },
    ChanceSum { node: usize, sum: String },
    PerfectRecall { infoset: usize, node: usize },
    Childless { node: usize },
    TerminalWithChildren { node: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ThinInfoset { infoset, depths } => {
                write!(f, "thin infoset: infoset {infoset} spans depths {depths:?}")
            }
            Violation::ActionMismatch { infoset, node } => {
                write!(f, "infoset {infoset}: node {node} has a different action list")
            }
            Violation::DuplicateAction { node, action } => {
                write!(f, "node {node}: action `{action}` appears twice")
            }
            Violation::MixedOwner { infoset, node } => {
                write!(f, "infoset {infoset}: node {node} has a different owner")
            }
            Violation::ChanceArity { node, probs, children } => {
                write!(f, "chance node {node}: {probs} probabilities for {children} children")
            }
            Violation::ChanceNegative { node } => {
                write!(f, "chance node {node}: negative probability")
            }
            Violation::ChanceSum { node, sum } => {
                write!(f, "chance node {node}: probabilities sum to {sum}")
            }
            Violation::PerfectRecall { infoset, node } => {
                write!(f, "perfect recall: infoset {infoset}, node {node} has a different own sequence")
            }
            Violation::Childless { node } => write!(f, "non-terminal node {node} has no children"),
            Violation::TerminalWithChildren { node } => {
                write!(f, "terminal node {node} has children")
            }
        }
    }
}

/// Report of every violated invariant; empty means the game is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks thinness, action consistency, chance distributions and per-player
/// perfect recall.
pub fn validate(game: &GameTree) -> ValidationReport {
    let mut out = Vec::new();
    let one = Q::from_integer(1.into());
    for (h, node) in game.nodes.iter().enumerate() {
        let mut seen = HashMap::new();
        for &c in &node.children {
            if seen.insert(game.nodes[c].action.as_str(), c).is_some() {
                out.push(Violation::DuplicateAction { node: h, action: game.nodes[c].action.clone() });
            }
        }
        match &node.kind {
            NodeKind::Terminal { .. } => {
                if !node.children.is_empty() {
                    out.push(Violation::TerminalWithChildren { node: h });
                }
            }
            NodeKind::Chance { probs } => {
                if node.children.is_empty() {
                    out.push(Violation::Childless { node: h });
                }
                if probs.len() != node.children.len() {
                    out.push(Violation::ChanceArity {
                        node: h,
                        probs: probs.len(),
                        children: node.children.len(),
                    });
                }
                if probs.iter().any(|p| p.is_negative()) {
                    out.push(Violation::ChanceNegative { node: h });
                }
                let sum: Q = probs.iter().sum();
                if sum != one {
                    out.push(Violation::ChanceSum { node: h, sum: format_q(&sum) });
                }
            }
            NodeKind::Decision { .. } => {
                if node.children.is_empty() {
                    out.push(Violation::Childless { node: h });
                }
            }
        }
    }

    let own_seq = own_sequences(game);
    for (id, info) in game.infosets.iter().enumerate() {
        let depths: Vec<usize> = {
            let mut d: Vec<usize> = info.nodes.iter().map(|&h| game.nodes[h].depth).collect();
            d.sort_unstable();
            d.dedup();
            d
        };
        if depths.len() > 1 {
            out.push(Violation::ThinInfoset { infoset: id, depths });
        }
        let first = info.nodes[0];
        for &h in &info.nodes {
            let (team, player, _) = game.nodes[h].decision().expect("infoset member is a decision");
            if team != info.team || player != info.player {
                out.push(Violation::MixedOwner { infoset: id, node: h });
            }
            let labels = game.nodes[h].children.iter().map(|&c| &game.nodes[c].action);
            if !labels.eq(info.actions.iter()) {
                out.push(Violation::ActionMismatch { infoset: id, node: h });
            }
            if own_seq[h] != own_seq[first] {
                out.push(Violation::PerfectRecall { infoset: id, node: h });
            }
        }
    }
    ValidationReport { violations: out }
}

/// For every decision node, an interned id of its owner's own sequence.
fn own_sequences(game: &GameTree) -> Vec<usize> {
    // Per node, for each (team, player) seen so far, the id of that player's
    // sequence. Computed lazily per decision node by walking up the path.
    let mut intern: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut ids = vec![usize::MAX; game.len()];
    for (h, node) in game.nodes.iter().enumerate() {
        let Some((team, player, _)) = node.decision() else { continue };
        let mut seq = Vec::new();
        let mut x = h;
        while let Some(p) = game.nodes[x].parent {
            if let Some((t, pl, infoset)) = game.nodes[p].decision() {
                if t == team && pl == player {
                    seq.push((infoset, game.child_index(x)));
                }
            }
            x = p;
        }
        let next = intern.len();
        ids[h] = *intern.entry(seq).or_insert(next);
    }
    ids
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn chance(parent: Option<usize>, action: &str, probs: Vec<Q>) -> NodeSpec {
        NodeSpec { parent, action: action.into(), kind: NodeKind::Chance { probs } }
    }
    fn dec(parent: usize, action: &str, team: Team, player: u32, infoset: usize) -> NodeSpec {
        NodeSpec {
            parent: Some(parent),
            action: action.into(),
            kind: NodeKind::Decision { team, player, infoset },
        }
    }
    fn term(parent: usize, action: &str, u: i64) -> NodeSpec {
        NodeSpec { parent: Some(parent), action: action.into(), kind: NodeKind::Terminal { payoff: q(u, 1) } }
    }

    #[test]
    fn thin_violation_is_reported() {
        // root chance -> (A: Plus infoset 0) and (B: chance -> Plus infoset 0)
        let g = GameTree::from_nodes(vec![
            chance(None, "", vec![q(1, 2), q(1, 2)]),
            dec(0, "a", Team::Plus, 0, 0),
            chance(Some(0), "b", vec![q(1, 1)]),
            term(1, "x", 1),
            term(1, "y", 0),
            dec(2, "c", Team::Plus, 0, 0),
            term(5, "x", 0),
            term(5, "y", 1),
        ])
        .unwrap();
        let report = validate(&g);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ThinInfoset { infoset: 0, .. })));
    }

    #[test]
    fn sequences_follow_the_path() {
        let g = GameTree::from_nodes(vec![
            NodeSpec { parent: None, action: String::new(), kind: NodeKind::Decision { team: Team::Plus, player: 0, infoset: 0 } },
            dec(0, "l", Team::Plus, 1, 1),
            term(0, "r", 0),
            term(1, "a", 1),
            term(1, "b", 2),
        ])
        .unwrap();
        assert!(team_sequence(&g, Team::Plus, 0).unwrap().is_empty());
        assert_eq!(
            team_sequence(&g, Team::Plus, 4).unwrap(),
            vec![(0, "l".to_string()), (1, "b".to_string())]
        );
        assert!(team_sequence(&g, Team::Minus, 4).unwrap().is_empty());
        assert_eq!(team_sequence(&g, Team::Plus, 9), Err(GameError::NodeOutOfRange(9)));
    }

    #[test]
    fn chance_sum_checked_exactly() {
        let g = GameTree::from_nodes(vec![
            chance(None, "", vec![q(1, 3), q(1, 3)]),
            term(0, "a", 0),
            term(0, "b", 0),
        ])
        .unwrap();
        assert_eq!(validate(&g).violations, vec![Violation::ChanceSum { node: 0, sum: "2/3".into() }]);
    }
}
