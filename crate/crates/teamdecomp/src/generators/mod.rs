//! Benchmark game families and the EFG-JSON format.
//!
//! Benchmark names follow the `mnXp` scheme: `m` and `n` are the team sizes,
//! `X` the family letter and `p` its parameters, e.g. `21K3` (Kuhn, three
//! ranks), `21L133` (Leduc: one bet, three ranks, three suits), `31L'132`
//! (Leduc where Plus never bets or raises), `21D3` (Liar's Dice, three faces),
//! `21G` and `21GL` (Goofspiel with three ranks, full and limited
//! information).

mod builder;
mod efg;
mod goofspiel;
mod kuhn;
mod leduc;
mod liars_dice;
mod random;
mod sat;
mod width_gap;

pub use efg::{load_efg, parse_efg, save_efg, to_efg_string, EfgError};
pub use goofspiel::make_goofspiel;
pub use kuhn::make_kuhn;
pub use leduc::make_leduc;
pub use liars_dice::make_liars_dice;
pub use random::{random_game, RandomGameConfig};
pub use sat::{make_sat_game, Cnf};
pub use width_gap::make_width_gap_game;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameTree, Team};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Kuhn,
    Leduc,
    LiarsDice,
    Goofspiel,
    Sat,
    WidthGap,
}

/// Parameters for one generated game. Fields a family does not use are
/// ignored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub family: Family,
    pub m: usize,
    pub n: usize,
    pub ranks: usize,
    pub bets: usize,
    pub suits: usize,
    pub no_raise: bool,
    pub faces: usize,
    pub limited: bool,
    pub k: usize,
    pub cnf: Option<Cnf>,
}

impl GameSpec {
    pub fn new(family: Family, m: usize, n: usize) -> GameSpec {
        GameSpec {
            family,
            m,
            n,
            ranks: 3,
            bets: 1,
            suits: 3,
            no_raise: false,
            faces: 3,
            limited: false,
            k: 3,
            cnf: None,
        }
    }

    /// Parses a benchmark name such as `21K4`, `21L223`, `31L'132`, `21D3`,
    /// `21G` or `21GL`.
    ///
    /// ```
    /// use teamdecomp::generators::{Family, GameSpec};
    /// let s = GameSpec::from_name("21L'133").unwrap();
    /// assert_eq!((s.family, s.m, s.n, s.bets, s.ranks, s.suits, s.no_raise), (Family::Leduc, 2, 1, 1, 3, 3, true));
    /// ```
    pub fn from_name(name: &str) -> Option<GameSpec> {
        let bytes = name.as_bytes();
        if bytes.len() < 3 || !bytes[0].is_ascii_digit() || !bytes[1].is_ascii_digit() {
            return None;
        }
        let m = (bytes[0] - b'0') as usize;
        let n = (bytes[1] - b'0') as usize;
        let rest = &name[2..];
        let digits = |s: &str| -> Option<Vec<usize>> {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            Some(s.bytes().map(|b| (b - b'0') as usize).collect())
        };
        let mut spec;
        if let Some(p) = rest.strip_prefix('K') {
            spec = GameSpec::new(Family::Kuhn, m, n);
            spec.ranks = p.parse().ok()?;
        } else if let Some(p) = rest.strip_prefix('L') {
            spec = GameSpec::new(Family::Leduc, m, n);
            let p = match p.strip_prefix('\'') {
                Some(p) => {
                    spec.no_raise = true;
                    p
                }
                None => p,
            };
            let d = digits(p)?;
            if d.len() != 3 {
                return None;
            }
            (spec.bets, spec.ranks, spec.suits) = (d[0], d[1], d[2]);
        } else if let Some(p) = rest.strip_prefix('D') {
            spec = GameSpec::new(Family::LiarsDice, m, n);
            spec.faces = p.parse().ok()?;
        } else if rest == "G" || rest == "GL" {
            spec = GameSpec::new(Family::Goofspiel, m, n);
            spec.limited = rest == "GL";
        } else {
            return None;
        }
        Some(spec)
    }
}

/// Builds the game described by `spec`.
pub fn generate(spec: &GameSpec) -> Result<GameTree, GenError> {
    match spec.family {
        Family::Kuhn => make_kuhn(spec.m, spec.n, spec.ranks),
        Family::Leduc => make_leduc(spec.m, spec.n, spec.bets, spec.ranks, spec.suits, spec.no_raise),
        Family::LiarsDice => make_liars_dice(spec.m, spec.n, spec.faces),
        Family::Goofspiel => make_goofspiel(spec.m, spec.n, spec.ranks, spec.limited),
        Family::Sat => make_sat_game(spec.cnf.as_ref().ok_or_else(|| GenError::Invalid("sat family needs a cnf".into()))?),
        Family::WidthGap => make_width_gap_game(spec.k),
    }
}

/// Team of every seat. Without alternation the first `m` seats are Plus.
/// With alternation the first `m - n` seats are Plus and the remaining `2n`
/// alternate Plus, Minus.
pub(crate) fn seat_teams(m: usize, n: usize, alternate: bool) -> Vec<Team> {
    if !alternate || m < n {
        return (0..m + n).map(|i| if i < m { Team::Plus } else { Team::Minus }).collect();
    }
    let lead = m - n;
    (0..m + n)
        .map(|i| if i < lead || (i - lead) % 2 == 0 { Team::Plus } else { Team::Minus })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seating_alternates_the_tail() {
        use Team::*;
        assert_eq!(seat_teams(4, 2, true), vec![Plus, Plus, Plus, Minus, Plus, Minus]);
        assert_eq!(seat_teams(2, 1, true), vec![Plus, Plus, Minus]);
        assert_eq!(seat_teams(3, 3, true), vec![Plus, Minus, Plus, Minus, Plus, Minus]);
    }

    #[test]
    fn names_parse() {
        assert_eq!(GameSpec::from_name("21K3").unwrap().ranks, 3);
        assert!(GameSpec::from_name("21GL").unwrap().limited);
        assert_eq!(GameSpec::from_name("33D2").unwrap().faces, 2);
        assert!(GameSpec::from_name("2K3").is_none());
        assert!(GameSpec::from_name("21X3").is_none());
    }
}
