use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use super::{GameTree, NodeKind, Team, TeamView};
use crate::rational::Q;

/// The bilinear payoff `u(x, y) = Σ coef · x(first) · y(second)` over team-view
/// classes.
///
/// `first` indexes the view of [`PayoffForm::row_team`]. Coefficients are
/// aggregated per class pair; pairs that cancel to zero are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PayoffForm {
    pub row_team: Team,
    pub triples: Vec<(usize, usize, Q)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PayoffError {
    #[error("views must be built for Plus and Minus over the same game")]
    Mismatch,
}

/// Aggregates `u(z) p(z)` by the pair of classes holding each terminal.
pub fn payoff_form(game: &GameTree, vp: &TeamView, vm: &TeamView) -> Result<PayoffForm, PayoffError> {
    if vp.team != Team::Plus || vm.team != Team::Minus || vp.nu.len() != game.len() || vm.nu.len() != game.len() {
        return Err(PayoffError::Mismatch);
    }
    let reach = game.chance_reach();
    let mut acc: BTreeMap<(usize, usize), Q> = BTreeMap::new();
    for z in game.terminals() {
        let NodeKind::Terminal { payoff } = &game.node(z).kind else { unreachable!() };
        let coef = payoff * &reach[z];
        *acc.entry((vp.nu[z], vm.nu[z])).or_insert_with(Q::zero) += coef;
    }
    let triples = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|((a, b), c)| (a, b, c)).collect();
    Ok(PayoffForm { row_team: Team::Plus, triples })
}

impl PayoffForm {
    /// The same game seen from the other team: classes swapped, payoff negated.
    pub fn swapped(&self) -> PayoffForm {
        let mut triples: Vec<(usize, usize, Q)> = self.triples.iter().map(|(a, b, c)| (*b, *a, -c)).collect();
        triples.sort_by_key(|t| (t.0, t.1));
        PayoffForm { row_team: self.row_team.other(), triples }
    }

    /// Sum of all coefficients, i.e. `Σ_z u(z) p(z)`.
    pub fn total(&self) -> Q {
        self.triples.iter().map(|t| &t.2).sum()
    }

    /// Sorted classes of the row team that carry payoff.
    pub fn row_classes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.triples.iter().map(|t| t.0).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Sorted classes of the column team that carry payoff.
    pub fn col_classes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.triples.iter().map(|t| t.1).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Expected payoff to the row team under the given class-indexed plans.
    pub fn evaluate(&self, x: &[Q], y: &[Q]) -> Q {
        self.triples.iter().map(|(a, b, c)| c * &x[*a] * &y[*b]).sum()
    }
}
