use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::game::{GameTree, NodeKind, NodeSpec, Team};
use crate::rational::Q;

/// What a generator's state expands into.
pub(crate) enum Expand<S, K> {
    Chance(Vec<(String, Q, S)>),
    /// `key` identifies the infoset together with the owning team and player.
    Decision { team: Team, player: u32, key: K, children: Vec<(String, S)> },
    Terminal(Q),
}

/// Expands `root` breadth-first, numbering nodes in visit order and infosets
/// in order of first appearance.
pub(crate) fn build<S, K, F>(root: S, mut expand: F) -> GameTree
where
    K: Hash + Eq,
    F: FnMut(&S) -> Expand<S, K>,
{
    let mut specs = Vec::new();
    let mut infosets: HashMap<(Team, u32, K), usize> = HashMap::new();
    let mut queue = VecDeque::from([(root, None::<usize>, String::new())]);
    while let Some((state, parent, action)) = queue.pop_front() {
        let id = specs.len();
        let kind = match expand(&state) {
            Expand::Chance(outcomes) => {
                let mut probs = Vec::with_capacity(outcomes.len());
                for (label, p, next) in outcomes {
                    probs.push(p);
                    queue.push_back((next, Some(id), label));
                }
                NodeKind::Chance { probs }
            }
            Expand::Decision { team, player, key, children } => {
                let next_id = infosets.len();
                let infoset = *infosets.entry((team, player, key)).or_insert(next_id);
                for (label, next) in children {
                    queue.push_back((next, Some(id), label));
                }
                NodeKind::Decision { team, player, infoset }
            }
            Expand::Terminal(payoff) => NodeKind::Terminal { payoff },
        };
        specs.push(NodeSpec { parent, action, kind });
    }
    GameTree::from_nodes(specs).expect("builder emits parents before children")
}
