use std::collections::{BTreeMap, HashMap};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::game::{GameTree, NodeKind, NodeSpec, Team};
use crate::rational::{q, qi, Q};

/// Shape limits for [`random_game`].
#[derive(Clone, Debug)]
pub struct RandomGameConfig {
    pub max_depth: usize,
    pub max_branch: usize,
    pub max_nodes: usize,
    pub players_per_team: usize,
}

impl Default for RandomGameConfig {
    fn default() -> Self {
        RandomGameConfig { max_depth: 6, max_branch: 3, max_nodes: 200, players_per_team: 2 }
    }
}

struct Pending {
    parent: Option<usize>,
    action: String,
    /// Interned own-sequence id for every seat.
    seqs: Vec<usize>,
}

enum Plan {
    Terminal,
    Chance,
    Decision { seat: usize, block: usize },
}

/// A random two-team game with thin infosets and perfect recall for every
/// player, built level by level.
///
/// Decision nodes of one player at one depth with the same own sequence are
/// randomly grouped into infosets. Payoffs are integers in `-3..=3`; chance
/// probabilities are small-denominator rationals.
pub fn random_game(seed: u64, cfg: &RandomGameConfig) -> GameTree {
    let mut rng = StdRng::seed_from_u64(seed);
    let seats: Vec<(Team, u32)> = Team::BOTH
        .iter()
        .flat_map(|&t| (0..cfg.players_per_team as u32).map(move |p| (t, p)))
        .collect();
    let mut specs: Vec<NodeSpec> = Vec::new();
    let mut seq_ids: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut block_infoset: HashMap<usize, usize> = HashMap::new();
    let mut next_block = 0usize;
    let mut level = vec![Pending { parent: None, action: String::new(), seqs: vec![0; seats.len()] }];
    let mut depth = 0;

    while !level.is_empty() {
        let mut plans: Vec<Plan> = level
            .iter()
            .map(|p| {
                let r: f64 = rng.gen();
                if depth >= cfg.max_depth || (p.parent.is_some() && r < 0.2) {
                    Plan::Terminal
                } else if r < 0.4 {
                    Plan::Chance
                } else {
                    Plan::Decision { seat: rng.gen_range(0..seats.len()), block: 0 }
                }
            })
            .collect();

        // Group decision nodes by (seat, own sequence), then split each group
        // into infosets with a common action count.
        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, plan) in plans.iter().enumerate() {
            if let Plan::Decision { seat, .. } = plan {
                groups.entry((*seat, level[i].seqs[*seat])).or_default().push(i);
            }
        }
        let mut block_actions: HashMap<usize, usize> = HashMap::new();
        for members in groups.values() {
            let mut members = members.clone();
            members.shuffle(&mut rng);
            let mut blocks: Vec<usize> = Vec::new();
            for i in members {
                let block = if !blocks.is_empty() && rng.gen_bool(0.6) {
                    *blocks.choose(&mut rng).unwrap()
                } else {
                    let b = next_block;
                    next_block += 1;
                    let actions = if rng.gen_bool(0.1) { 1 } else { rng.gen_range(2..=cfg.max_branch.max(2)) };
                    block_actions.insert(b, actions);
                    blocks.push(b);
                    b
                };
                if let Plan::Decision { block: slot, .. } = &mut plans[i] {
                    *slot = block;
                }
            }
        }

        let mut next_level = Vec::new();
        let level_len = level.len();
        for (i, (pending, plan)) in level.into_iter().zip(plans).enumerate() {
            let id = specs.len();
            let unplaced = level_len - i - 1;
            let fits = |k: usize| id + 1 + unplaced + next_level.len() + k <= cfg.max_nodes;
            let kind = match plan {
                Plan::Chance => {
                    let k = rng.gen_range(2..=cfg.max_branch.max(2));
                    if fits(k) {
                        let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=3)).collect();
                        let total: i64 = weights.iter().sum();
                        for c in 0..k {
                            next_level.push(Pending { parent: Some(id), action: format!("n{c}"), seqs: pending.seqs.clone() });
                        }
                        Some(NodeKind::Chance { probs: weights.iter().map(|&w| q(w, total)).collect() })
                    } else {
                        None
                    }
                }
                Plan::Decision { seat, block } => {
                    let k = block_actions[&block];
                    if fits(k) {
                        let next_id = block_infoset.len();
                        let infoset = *block_infoset.entry(block).or_insert(next_id);
                        for a in 0..k {
                            let mut seqs = pending.seqs.clone();
                            let key = (seqs[seat], infoset, a);
                            let next_seq = seq_ids.len() + 1;
                            seqs[seat] = *seq_ids.entry(key).or_insert(next_seq);
                            next_level.push(Pending { parent: Some(id), action: format!("a{a}"), seqs });
                        }
                        let (team, player) = seats[seat];
                        Some(NodeKind::Decision { team, player, infoset })
                    } else {
                        None
                    }
                }
                Plan::Terminal => None,
            };
            let kind = kind.unwrap_or_else(|| NodeKind::Terminal { payoff: random_payoff(&mut rng) });
            specs.push(NodeSpec { parent: pending.parent, action: pending.action, kind });
        }
        level = next_level;
        depth += 1;
    }
    GameTree::from_nodes(specs).expect("levels are emitted in order")
}

fn random_payoff(rng: &mut StdRng) -> Q {
    qi(rng.gen_range(-3..=3))
}
