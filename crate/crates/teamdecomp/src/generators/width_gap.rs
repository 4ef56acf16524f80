use super::builder::{build, Expand};
use super::GenError;
use crate::game::{GameTree, Team};
use crate::rational::{q, qi};

/// A two-player team game whose public-node decomposition has treewidth
/// `6k - 1` while its reachable width stays 2.
///
/// Nature draws P1's type `t1 ∈ {0, 1}`; P1 sees it and plays one of `k`
/// actions. Nature then draws P2's type `t2 ∈ {0, 1}`; P2 sees only `t2` and
/// plays `L` or `R`. All payoffs are 0 and Team Minus is empty.
pub fn make_width_gap_game(k: usize) -> Result<GameTree, GenError> {
    if k == 0 {
        return Err(GenError::Invalid("width-gap game needs k >= 1".into()));
    }
    let half = q(1, 2);

    #[derive(Clone, Copy)]
    enum S {
        Root,
        P1(u8),
        Type2,
        P2(u8),
        End,
    }

    Ok(build(S::Root, |s: &S| match *s {
        S::Root => Expand::Chance(vec![("t0".into(), half.clone(), S::P1(0)), ("t1".into(), half.clone(), S::P1(1))]),
        S::P1(t) => Expand::Decision {
            team: Team::Plus,
            player: 0,
            key: t,
            children: (1..=k).map(|a| (format!("a{a}"), S::Type2)).collect(),
        },
        S::Type2 => Expand::Chance(vec![("u0".into(), half.clone(), S::P2(0)), ("u1".into(), half.clone(), S::P2(1))]),
        S::P2(t) => Expand::Decision {
            team: Team::Plus,
            player: 1,
            key: t,
            children: vec![("L".into(), S::End), ("R".into(), S::End)],
        },
        S::End => Expand::Terminal(qi(0)),
    }))
}
