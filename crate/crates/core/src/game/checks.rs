use std::collections::{BTreeMap, BTreeSet};

use super::deviation::best_response;
use super::{piece_game, Game, Profile, ValueFunction, Verdict, Witness, XReal};
use crate::error::Result;
use crate::form::Label;
use crate::partition::{piece_partition, subroots};
use crate::strategy::{
    outcome, piece_outcome, piece_situations, player_situations, subform_outcome,
    subform_situations, Choices, Strategy,
};

fn restricted(choices: &Choices, dom: &BTreeSet<Label>) -> Choices {
    choices
        .iter()
        .filter(|(j, _)| dom.contains(*j))
        .map(|(j, a)| (j.clone(), a.clone()))
        .collect()
}

fn ordered_subroots(g: &Game) -> Vec<Label> {
    piece_partition(g.form()).subroots().to_vec()
}

/// No player gains by a unilateral deviation. Ties are not improvements.
pub fn nash_check(g: &Game, s: &Strategy) -> Result<Verdict> {
    let p = g.form();
    let z = outcome(p, s);
    let current = g.utility_at(z.last())?;
    for i in p.players() {
        let free = player_situations(p, i)?;
        let br = best_response(p, g.utilities(), p.root(), s.choices(), &free, i)?;
        let now = current.at(i);
        if br.value > *now {
            return Ok(Verdict::fails(Witness::Deviation {
                at: p.root().clone(),
                player: i.clone(),
                deviation: br.choices,
                current: now.clone(),
                improved: br.value,
            }));
        }
    }
    Ok(Verdict::holds())
}

/// Nash in the subgame at every subroot.
pub fn spe_check_direct(g: &Game, s: &Strategy) -> Result<Verdict> {
    for t in ordered_subroots(g) {
        let sub = g.subgame(&t)?;
        let st = Strategy::from_trusted(restricted(s.choices(), sub.form().situations()));
        let v = nash_check(&sub, &st)?;
        if !v.holds {
            return Ok(v);
        }
    }
    Ok(Verdict::holds())
}

/// `inf ≤ v_k(t) ≤ sup` over utilities of runs through `t`.
pub fn admissible(g: &Game, v: &ValueFunction) -> Result<Verdict> {
    let p = g.form();
    for t in ordered_subroots(g) {
        let below = p.endnodes_below(&t);
        for k in g.stakeholders() {
            let us: Vec<&XReal> = below.iter().map(|y| g.utilities()[y].at(k)).collect();
            let inf = us.iter().min().expect("endnode below subroot");
            let sup = us.iter().max().expect("endnode below subroot");
            let value = value_at(v, &t)?.at(k);
            if value < *inf || value > *sup {
                return Ok(Verdict::fails(Witness::Inadmissible {
                    at: t.clone(),
                    stakeholder: k.clone(),
                    value: value.clone(),
                    inf: (*inf).clone(),
                    sup: (*sup).clone(),
                }));
            }
        }
    }
    Ok(Verdict::holds())
}

fn value_at<'a>(v: &'a ValueFunction, t: &str) -> Result<&'a Profile> {
    v.get(t)
        .ok_or_else(|| crate::Error::Domain(format!("value function misses subroot {t:?}")))
}

fn mismatch(at: &str, value: &Profile, expected: &Profile) -> Verdict {
    Verdict::fails(Witness::ValueMismatch {
        at: at.to_string(),
        value: value.clone(),
        expected: expected.clone(),
    })
}

/// `v(t)` equals the value at the next on-path subroot, or the utility of
/// the completed run when the piece ends at a final endnode.
pub fn persistent(g: &Game, s: &Strategy, v: &ValueFunction) -> Result<Verdict> {
    let p = g.form();
    let t_set = subroots(p);
    for t in ordered_subroots(g) {
        let end = piece_outcome(p, &t, s.choices())?.last().clone();
        let expected = if t_set.contains(&end) {
            value_at(v, &end)?
        } else {
            g.utility_at(&end)?
        };
        let value = value_at(v, &t)?;
        if value != expected {
            return Ok(mismatch(&t, value, expected));
        }
    }
    Ok(Verdict::holds())
}

/// `v(t) = u(R(ᵗO(ᵗs)))` at every subroot.
pub fn authentic_value(g: &Game, s: &Strategy) -> Result<ValueFunction> {
    let p = g.form();
    let mut values = BTreeMap::new();
    for t in subroots(p) {
        let z = subform_outcome(p, t, s.choices())?;
        values.insert(t.clone(), g.utility_at(z.last())?.clone());
    }
    Ok(ValueFunction::from_trusted(values))
}

pub fn authentic(g: &Game, s: &Strategy, v: &ValueFunction) -> Result<Verdict> {
    let truth = authentic_value(g, s)?;
    for t in ordered_subroots(g) {
        let value = value_at(v, &t)?;
        let expected = &truth.values()[&t];
        if value != expected {
            return Ok(mismatch(&t, value, expected));
        }
    }
    Ok(Verdict::holds())
}

/// Each piece restriction is a Nash equilibrium of its piece game.
pub fn piecewise_nash(g: &Game, s: &Strategy, v: &ValueFunction) -> Result<Verdict> {
    for t in ordered_subroots(g) {
        let pg = piece_game(g, v, &t)?;
        let st = Strategy::from_trusted(restricted(s.choices(), pg.form().situations()));
        let verdict = nash_check(&pg, &st)?;
        if !verdict.holds {
            return Ok(verdict);
        }
    }
    Ok(Verdict::holds())
}

/// No player gains by deviating inside a single piece and obeying `s`
/// everywhere else.
pub fn one_piece_unimprovable(g: &Game, s: &Strategy) -> Result<Verdict> {
    let p = g.form();
    for t in ordered_subroots(g) {
        let z = subform_outcome(p, &t, s.choices())?;
        let current = g.utility_at(z.last())?;
        let local = piece_situations(p, &t)?;
        let scope = subform_situations(p, &t)?;
        for i in p.players() {
            let free: BTreeSet<Label> = player_situations(p, i)?
                .intersection(&local)
                .cloned()
                .collect();
            if free.is_empty() {
                continue;
            }
            let base = restricted(s.choices(), &scope);
            let br = best_response(p, g.utilities(), &t, &base, &free, i)?;
            if br.value > *current.at(i) {
                return Ok(Verdict::fails(Witness::Deviation {
                    at: t.clone(),
                    player: i.clone(),
                    deviation: br.choices,
                    current: current.at(i).clone(),
                    improved: br.value,
                }));
            }
        }
    }
    Ok(Verdict::holds())
}
