//! EFG-JSON: `{"nodes": [...]}` with one object per node in canonical order.
//!
//! Every node carries `"parent"` (index or `null`), `"action"` and `"kind"`.
//! Chance nodes add `"probs"`, decision nodes add `"team"`, `"player"` and
//! `"infoset"`, terminals add `"payoff"`. Rationals are strings `"n/d"`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{validate, GameError, GameTree, NodeKind, NodeSpec, Team, ValidationReport};
use crate::rational::{format_q, parse_q};

#[derive(Debug, Error)]
pub enum EfgError {
    #[error("cannot read or write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed EFG-JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("node {node}: {message}")]
    Field { node: usize, message: String },
    #[error("{0}")]
    Structure(#[from] GameError),
    #[error("invalid game: {}", .0.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(ValidationReport),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    nodes: Vec<Record>,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Chance,
    Decision,
    Terminal,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    parent: Option<usize>,
    action: String,
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    team: Option<Team>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    player: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    infoset: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    payoff: Option<String>,
}

/// Serializes a game, one node per line.
pub fn to_efg_string(game: &GameTree) -> String {
    let mut out = String::from("{\"nodes\":[\n");
    for (i, node) in game.nodes().iter().enumerate() {
        let mut r = Record {
            parent: node.parent,
            action: node.action.clone(),
            kind: Kind::Terminal,
            team: None,
            player: None,
            infoset: None,
            probs: None,
            payoff: None,
        };
        match &node.kind {
            NodeKind::Chance { probs } => {
                r.kind = Kind::Chance;
                r.probs = Some(probs.iter().map(format_q).collect());
            }
            NodeKind::Decision { team, player, infoset } => {
                r.kind = Kind::Decision;
                r.team = Some(*team);
                r.player = Some(*player);
                r.infoset = Some(*infoset);
            }
            NodeKind::Terminal { payoff } => r.payoff = Some(format_q(payoff)),
        }
        out.push_str(&serde_json::to_string(&r).expect("records serialize"));
        out.push_str(if i + 1 == game.len() { "\n" } else { ",\n" });
    }
    out.push_str("]}\n");
    out
}

/// Parses EFG-JSON and rejects games that fail [`validate`].
pub fn parse_efg(text: &str) -> Result<GameTree, EfgError> {
    let file: File = serde_json::from_str(text)?;
    if file.nodes.is_empty() {
        return Err(EfgError::Structure(GameError::Empty));
    }
    let mut specs = Vec::with_capacity(file.nodes.len());
    for (i, r) in file.nodes.into_iter().enumerate() {
        let missing = |field: &str| EfgError::Field { node: i, message: format!("missing \"{field}\"") };
        let kind = match r.kind {
            Kind::Chance => {
                let raw = r.probs.ok_or_else(|| missing("probs"))?;
                let probs = raw
                    .iter()
                    .map(|s| parse_q(s).ok_or_else(|| EfgError::Field { node: i, message: format!("bad rational `{s}`") }))
                    .collect::<Result<Vec<_>, _>>()?;
                NodeKind::Chance { probs }
            }
            Kind::Decision => NodeKind::Decision {
                team: r.team.ok_or_else(|| missing("team"))?,
                player: r.player.ok_or_else(|| missing("player"))?,
                infoset: r.infoset.ok_or_else(|| missing("infoset"))?,
            },
            Kind::Terminal => {
                let s = r.payoff.ok_or_else(|| missing("payoff"))?;
                let payoff = parse_q(&s).ok_or_else(|| EfgError::Field { node: i, message: format!("bad rational `{s}`") })?;
                NodeKind::Terminal { payoff }
            }
        };
        specs.push(NodeSpec { parent: r.parent, action: r.action, kind });
    }
    let game = GameTree::from_nodes(specs)?;
    let report = validate(&game);
    if !report.is_valid() {
        return Err(EfgError::Invalid(report));
    }
    Ok(game)
}

pub fn load_efg(path: impl AsRef<Path>) -> Result<GameTree, EfgError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| EfgError::Io { path: path.display().to_string(), source })?;
    parse_efg(&text)
}

pub fn save_efg(game: &GameTree, path: impl AsRef<Path>) -> Result<(), EfgError> {
    let path = path.as_ref();
    std::fs::write(path, to_efg_string(game)).map_err(|source| EfgError::Io { path: path.display().to_string(), source })
}
