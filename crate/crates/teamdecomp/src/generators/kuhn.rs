use super::builder::{build, Expand};
use super::{seat_teams, GenError};
use crate::game::{GameTree, Team};
use crate::rational::{q, qi, Q};

#[derive(Clone)]
struct State {
    cards: Option<Vec<u32>>,
    history: Vec<char>,
}

/// Multiplayer Kuhn poker with `r` ranks.
///
/// Every player antes 1 and is dealt a distinct rank. Players act in seat
/// order, checking (`c`) or betting 1 (`b`). After the first bet each other
/// player, continuing around the table, folds (`f`) or calls (`c`). The
/// highest card among players still in wins the pot.
pub fn make_kuhn(m: usize, n: usize, r: usize) -> Result<GameTree, GenError> {
    let players = m + n;
    if players < 2 {
        return Err(GenError::Invalid("kuhn needs at least two players".into()));
    }
    if r < players {
        return Err(GenError::Invalid(format!("kuhn with {players} players needs at least {players} ranks, got {r}")));
    }
    let teams = seat_teams(m, n, false);
    let deals = permutations(r as u32, players);
    let deal_p = q(1, deals.len() as i64);

    Ok(build(State { cards: None, history: vec![] }, |s: &State| {
        let Some(cards) = &s.cards else {
            return Expand::Chance(
                deals
                    .iter()
                    .map(|d| {
                        let label = d.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
                        (label, deal_p.clone(), State { cards: Some(d.clone()), history: vec![] })
                    })
                    .collect(),
            );
        };
        let h = &s.history;
        let child = |a: char| {
            let mut history = h.clone();
            history.push(a);
            State { cards: s.cards.clone(), history }
        };
        match h.iter().position(|&a| a == 'b') {
            None if h.len() == players => Expand::Terminal(payoff(cards, h, &teams)),
            None => {
                let p = h.len();
                Expand::Decision {
                    team: teams[p],
                    player: p as u32,
                    key: (cards[p], h.clone()),
                    children: vec![("c".into(), child('c')), ("b".into(), child('b'))],
                }
            }
            Some(bet) => {
                let responses = h.len() - bet - 1;
                if responses == players - 1 {
                    return Expand::Terminal(payoff(cards, h, &teams));
                }
                let p = (bet + 1 + responses) % players;
                Expand::Decision {
                    team: teams[p],
                    player: p as u32,
                    key: (cards[p], h.clone()),
                    children: vec![("f".into(), child('f')), ("c".into(), child('c'))],
                }
            }
        }
    }))
}

fn payoff(cards: &[u32], h: &[char], teams: &[Team]) -> Q {
    let players = cards.len();
    let mut contrib = vec![1i64; players];
    let mut alive = vec![true; players];
    if let Some(bet) = h.iter().position(|&a| a == 'b') {
        contrib[bet] += 1;
        for (k, &a) in h.iter().enumerate().skip(bet + 1) {
            let p = k % players;
            if a == 'c' {
                contrib[p] += 1;
            } else {
                alive[p] = false;
            }
        }
    }
    let winner = (0..players).filter(|&p| alive[p]).max_by_key(|&p| cards[p]).expect("someone is still in");
    let pot: i64 = contrib.iter().sum();
    let total: i64 = (0..players)
        .filter(|&p| teams[p] == Team::Plus)
        .map(|p| if p == winner { pot - contrib[p] } else { -contrib[p] })
        .sum();
    qi(total)
}

/// All ordered selections of `k` distinct values from `0..r`, lexicographic.
pub(crate) fn permutations(r: u32, k: usize) -> Vec<Vec<u32>> {
    fn rec(r: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in 0..r {
            if !cur.contains(&c) {
                cur.push(c);
                rec(r, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(r, k, &mut Vec::new(), &mut out);
    out
}
