use super::builder::{build, Expand};
use super::{seat_teams, GenError};
use crate::game::{GameTree, Team};
use crate::rational::{q, Q};

#[derive(Clone)]
struct State {
    prizes: Vec<u32>,
    rounds: Vec<Vec<u32>>,
    current: Vec<u32>,
}

/// Goofspiel with `r` prize cards and bid cards `1..=r` per player.
///
/// Each round nature reveals a random remaining prize, then every player
/// secretly bids one unused card (players move in seat order without seeing
/// this round's earlier bids). The highest bid wins the prize; a tie splits
/// it evenly among the tied players. A player's utility is their points minus
/// the mean points of all players.
///
/// After a round, players see all bids (`limited = false`) or only their own
/// bid and which players tied for the highest bid (`limited = true`).
pub fn make_goofspiel(m: usize, n: usize, r: usize, limited: bool) -> Result<GameTree, GenError> {
    if r < 2 {
        return Err(GenError::Invalid("goofspiel needs at least 2 ranks".into()));
    }
    let players = m + n;
    if players < 2 {
        return Err(GenError::Invalid("goofspiel needs at least two players".into()));
    }
    let teams = seat_teams(m, n, false);
    let r32 = r as u32;
    let start = State { prizes: vec![], rounds: vec![], current: vec![] };

    Ok(build(start, |s: &State| {
        let round = s.rounds.len();
        if round == r {
            return Expand::Terminal(payoff(&s.prizes, &s.rounds, &teams));
        }
        if s.prizes.len() == round {
            let left: Vec<u32> = (1..=r32).filter(|c| !s.prizes.contains(c)).collect();
            let p = q(1, left.len() as i64);
            return Expand::Chance(
                left.iter()
                    .map(|&c| {
                        let mut next = s.clone();
                        next.prizes.push(c);
                        (c.to_string(), p.clone(), next)
                    })
                    .collect(),
            );
        }
        let p = s.current.len();
        let hand: Vec<u32> = (1..=r32).filter(|c| !s.rounds.iter().any(|b| b[p] == *c)).collect();
        let seen: Vec<Vec<u32>> = if limited {
            s.rounds.iter().map(|b| vec![b[p], tie_mask(b)]).collect()
        } else {
            s.rounds.clone()
        };
        let children = hand
            .iter()
            .map(|&c| {
                let mut next = s.clone();
                next.current.push(c);
                if next.current.len() == players {
                    let done = std::mem::take(&mut next.current);
                    next.rounds.push(done);
                }
                (c.to_string(), next)
            })
            .collect();
        Expand::Decision { team: teams[p], player: p as u32, key: (s.prizes.clone(), seen), children }
    }))
}

/// Bit mask of the players holding the highest bid.
fn tie_mask(bids: &[u32]) -> u32 {
    let top = *bids.iter().max().unwrap();
    bids.iter().enumerate().filter(|(_, &b)| b == top).map(|(i, _)| 1u32 << i).sum()
}

fn payoff(prizes: &[u32], rounds: &[Vec<u32>], teams: &[Team]) -> Q {
    let players = teams.len();
    let mut points = vec![q(0, 1); players];
    for (prize, bids) in prizes.iter().zip(rounds) {
        let mask = tie_mask(bids);
        let winners = mask.count_ones() as i64;
        for (i, pt) in points.iter_mut().enumerate() {
            if mask & (1 << i) != 0 {
                *pt += q(*prize as i64, winners);
            }
        }
    }
    let mean: Q = points.iter().sum::<Q>() / q(players as i64, 1);
    (0..players).filter(|&i| teams[i] == Team::Plus).map(|i| &points[i] - &mean).sum()
}
