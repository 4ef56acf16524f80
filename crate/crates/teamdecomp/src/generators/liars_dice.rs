use super::builder::{build, Expand};
use super::{seat_teams, GenError};
use crate::game::{GameTree, Team};
use crate::rational::{q, qi};

const CALL: usize = usize::MAX;

/// Liar's Dice with one `f`-sided die per player.
///
/// Every player rolls privately, then players take turns in seat order. The
/// first player must bid; later players either raise the bid or call. Bids
/// `(quantity, face)` are ordered face-major: every quantity of face 1, then
/// every quantity of face 2, and so on. A call ends the game: if at least
/// `quantity` dice show `face` the caller loses 1 to the bidder, otherwise
/// the bidder loses 1 to the caller.
///
/// Seating: the first `m - n` seats are Plus, the last `2n` alternate Plus,
/// Minus, Plus, ...
pub fn make_liars_dice(m: usize, n: usize, f: usize) -> Result<GameTree, GenError> {
    if f < 2 || n < 1 || m < n {
        return Err(GenError::Invalid("liar's dice needs f >= 2 and m >= n >= 1".into()));
    }
    let players = m + n;
    let teams = seat_teams(m, n, true);
    let bids: Vec<(usize, u32)> =
        (1..=f as u32).flat_map(|v| (1..=players).map(move |q| (q, v))).collect();
    let rolls = (f as i64).pow(players as u32);
    let mut all_rolls = vec![vec![]];
    for _ in 0..players {
        all_rolls = all_rolls
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                (1..=f as u32).map(move |d| {
                    let mut r = prefix.clone();
                    r.push(d);
                    r
                })
            })
            .collect();
    }

    Ok(build((Vec::<u32>::new(), Vec::<usize>::new()), |(dice, hist)| {
        if dice.is_empty() {
            return Expand::Chance(
                all_rolls
                    .iter()
                    .map(|roll| {
                        let label = roll.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
                        (label, q(1, rolls), (roll.clone(), vec![]))
                    })
                    .collect(),
            );
        }
        if hist.last() == Some(&CALL) {
            let bidder = (hist.len() - 2) % players;
            let caller = (hist.len() - 1) % players;
            let (quantity, face) = bids[hist[hist.len() - 2]];
            let count = dice.iter().filter(|&&d| d == face).count();
            let (winner, loser) = if count >= quantity { (bidder, caller) } else { (caller, bidder) };
            let mut total = 0i64;
            if teams[winner] == Team::Plus {
                total += 1;
            }
            if teams[loser] == Team::Plus {
                total -= 1;
            }
            return Expand::Terminal(qi(total));
        }
        let p = hist.len() % players;
        let first = hist.last().map_or(0, |&b| b + 1);
        let mut children: Vec<(String, (Vec<u32>, Vec<usize>))> = (first..bids.len())
            .map(|b| {
                let mut h = hist.clone();
                h.push(b);
                (format!("{}x{}", bids[b].0, bids[b].1), (dice.clone(), h))
            })
            .collect();
        if !hist.is_empty() {
            let mut h = hist.clone();
            h.push(CALL);
            children.push(("call".into(), (dice.clone(), h)));
        }
        Expand::Decision { team: teams[p], player: p as u32, key: (dice[p], hist.clone()), children }
    }))
}
