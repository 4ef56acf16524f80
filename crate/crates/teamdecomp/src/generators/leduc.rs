use super::builder::{build, Expand};
use super::{seat_teams, GenError};
use crate::game::{GameTree, Team};
use crate::rational::{q, Q};

#[derive(Clone)]
struct State {
    cards: Option<Vec<u32>>,
    board: Option<u32>,
    round: u8,
    history: Vec<(u8, usize, char)>,
    folded: Vec<bool>,
    contrib: Vec<i64>,
}

const ANTE: i64 = 1;
const BET_SIZES: [i64; 2] = [2, 4];

/// Leduc hold'em generalized to `m + n` players, `r` ranks, `c` suits and at
/// most `b` bets per round.
///
/// Suits are indistinguishable, so deals are rank tuples weighted by the
/// number of matching cards left in the deck. Each player antes 1; bets are
/// 2 in the first round and 4 in the second. The board card is dealt after
/// the first round. At showdown a player pairing the board wins, otherwise
/// the highest rank; ties split the pot. With `no_raise`, Team Plus may only
/// check, call or fold.
pub fn make_leduc(m: usize, n: usize, b: usize, r: usize, c: usize, no_raise: bool) -> Result<GameTree, GenError> {
    let players = m + n;
    if players < 2 || r == 0 || c == 0 || b == 0 {
        return Err(GenError::Invalid("leduc needs two players and positive r, c, b".into()));
    }
    if r * c < players + 1 {
        return Err(GenError::Invalid(format!("a {r}x{c} deck cannot deal {players} hands plus a board card")));
    }
    let teams = seat_teams(m, n, false);
    let start = State {
        cards: None,
        board: None,
        round: 0,
        history: vec![],
        folded: vec![false; players],
        contrib: vec![ANTE; players],
    };
    let full_deck = vec![c as u32; r];

    Ok(build(start, |s: &State| {
        let Some(cards) = &s.cards else {
            return Expand::Chance(
                deals(&full_deck, players)
                    .into_iter()
                    .map(|(d, p)| {
                        let label = d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                        (label, p, State { cards: Some(d), ..s.clone() })
                    })
                    .collect(),
            );
        };
        let active: Vec<usize> = (0..players).filter(|&i| !s.folded[i]).collect();
        if active.len() == 1 {
            return Expand::Terminal(showdown(s, cards, &teams));
        }
        let this_round: Vec<&(u8, usize, char)> = s.history.iter().filter(|e| e.0 == s.round).collect();
        let bets = this_round.iter().filter(|e| matches!(e.2, 'b' | 'r')).count();
        let top = active.iter().map(|&i| s.contrib[i]).max().unwrap();
        let acted: Vec<usize> = this_round.iter().map(|e| e.1).collect();
        let waiting: Vec<usize> =
            active.iter().copied().filter(|&i| s.contrib[i] < top || !acted.contains(&i)).collect();
        if waiting.is_empty() {
            if s.round == 1 {
                return Expand::Terminal(showdown(s, cards, &teams));
            }
            let mut deck = full_deck.clone();
            for &x in cards {
                deck[x as usize] -= 1;
            }
            return Expand::Chance(
                deals(&deck, 1)
                    .into_iter()
                    .map(|(d, p)| (d[0].to_string(), p, State { board: Some(d[0]), round: 1, ..s.clone() }))
                    .collect(),
            );
        }
        let last = this_round.last().map(|e| e.1 as isize).unwrap_or(-1);
        let mut p = ((last + 1) as usize) % players;
        while !waiting.contains(&p) {
            p = (p + 1) % players;
        }
        let bet = BET_SIZES[s.round as usize];
        let may_raise = bets < b && !(no_raise && teams[p] == Team::Plus);
        let step = |a: char, folded: bool, contrib: i64| {
            let mut next = s.clone();
            next.history.push((s.round, p, a));
            next.folded[p] |= folded;
            next.contrib[p] = contrib;
            next
        };
        let mut children = Vec::new();
        if s.contrib[p] < top {
            children.push(("f".to_string(), step('f', true, s.contrib[p])));
            children.push(("c".to_string(), step('c', false, top)));
            if may_raise {
                children.push(("r".to_string(), step('r', false, top + bet)));
            }
        } else {
            children.push(("k".to_string(), step('k', false, s.contrib[p])));
            if may_raise {
                children.push(("b".to_string(), step('b', false, top + bet)));
            }
        }
        Expand::Decision { team: teams[p], player: p as u32, key: (cards[p], s.board, s.history.clone()), children }
    }))
}

/// Ordered rank tuples of length `k` drawn without replacement from a deck
/// holding `deck[rank]` cards of each rank, with their probabilities.
fn deals(deck: &[u32], k: usize) -> Vec<(Vec<u32>, Q)> {
    fn rec(deck: &mut Vec<u32>, k: usize, prefix: &mut Vec<u32>, p: Q, out: &mut Vec<(Vec<u32>, Q)>) {
        if prefix.len() == k {
            out.push((prefix.clone(), p));
            return;
        }
        let left: u32 = deck.iter().sum();
        for rank in 0..deck.len() {
            if deck[rank] == 0 {
                continue;
            }
            let pr = &p * q(deck[rank] as i64, left as i64);
            deck[rank] -= 1;
            prefix.push(rank as u32);
            rec(deck, k, prefix, pr, out);
            prefix.pop();
            deck[rank] += 1;
        }
    }
    let mut out = Vec::new();
    rec(&mut deck.to_vec(), k, &mut Vec::new(), q(1, 1), &mut out);
    out
}

fn showdown(s: &State, cards: &[u32], teams: &[Team]) -> Q {
    let players = cards.len();
    let active: Vec<usize> = (0..players).filter(|&i| !s.folded[i]).collect();
    let strength = |i: usize| (s.board == Some(cards[i]), cards[i]);
    let best = active.iter().map(|&i| strength(i)).max().unwrap();
    let winners: Vec<usize> = active.iter().copied().filter(|&i| strength(i) == best).collect();
    let pot: i64 = s.contrib.iter().sum();
    let share = q(pot, winners.len() as i64);
    (0..players)
        .filter(|&i| teams[i] == Team::Plus)
        .map(|i| {
            let won = if winners.contains(&i) { share.clone() } else { q(0, 1) };
            won - q(s.contrib[i], 1)
        })
        .sum()
}
