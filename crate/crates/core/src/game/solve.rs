use std::collections::BTreeMap;

use super::{checks::nash_check, piece_game, Game, ValueFunction};
use crate::error::{Error, Result};
use crate::form::Label;
use crate::partition::piece_partition;
use crate::strategy::{outcome, Choices, Strategy};

/// Largest number of piece strategy profiles an exhaustive search accepts.
pub const DEFAULT_PROFILE_CAP: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Equilibrium {
        strategy: Strategy,
        values: ValueFunction,
    },
    /// The piece game at this subroot has no pure Nash equilibrium.
    NoPureEquilibrium(Label),
}

/// The lexicographically first pure Nash profile of a finite game, scanning
/// situations in sorted order with the first situation most significant.
pub fn first_nash_profile(g: &Game, cap: u128) -> Result<Option<Strategy>> {
    let p = g.form();
    let situations: Vec<&Label> = p.situations().iter().collect();
    let actions: Vec<Vec<&Label>> = situations
        .iter()
        .map(|j| p.action_set(j).map(|a| a.iter().collect()))
        .collect::<Result<_>>()?;
    let needed = actions
        .iter()
        .try_fold(1u128, |n, a| n.checked_mul(a.len() as u128))
        .unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::ResourceCap {
            what: format!("piece at {:?}", p.root()),
            needed,
            cap,
        });
    }
    let mut digits = vec![0usize; situations.len()];
    loop {
        let choices: Choices = situations
            .iter()
            .zip(&digits)
            .zip(&actions)
            .map(|((j, &d), a)| ((*j).clone(), a[d].clone()))
            .collect();
        let s = Strategy::from_trusted(choices);
        if nash_check(g, &s)?.holds {
            return Ok(Some(s));
        }
        // odometer step, last situation fastest
        let mut k = digits.len();
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < actions[k].len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

pub fn solve_backward(g: &Game) -> Result<Solution> {
    solve_backward_with_cap(g, DEFAULT_PROFILE_CAP)
}

/// Backward induction over pieces, deepest subroot first.
pub fn solve_backward_with_cap(g: &Game, cap: u128) -> Result<Solution> {
    let part = piece_partition(g.form());
    let mut values = BTreeMap::new();
    let mut choices = Choices::new();
    for t in part.deepest_first() {
        let v = ValueFunction::from_trusted(values.clone());
        let pg = piece_game(g, &v, t)?;
        let Some(st) = first_nash_profile(&pg, cap)? else {
            return Ok(Solution::NoPureEquilibrium(t.clone()));
        };
        let z = outcome(pg.form(), &st);
        values.insert(t.clone(), pg.utility_at(z.last())?.clone());
        choices.extend(st.into_choices());
    }
    Ok(Solution::Equilibrium {
        strategy: Strategy::from_trusted(choices),
        values: ValueFunction::from_trusted(values),
    })
}
