use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Game, Profile, ValueFunction, XReal};
use crate::form::{Label, Pentaform, Quintuple, QuintupleSet};
use crate::partition::subroots;
use crate::strategy::{Choices, Strategy};

fn half_integer(rng: &mut impl Rng) -> XReal {
    XReal::Finite(BigRational::new(rng.gen_range(-20..=20).into(), 2.into()))
}

/// A random finite game.
///
/// Decision nodes with equal out-degree are sometimes merged into one
/// situation (at most `max_info_set` nodes each). Utilities are multiples of
/// 1/2 in [−10, 10]; a bystander appears now and then.
pub fn random_game(seed: u64, max_nodes: usize, max_players: usize, max_info_set: usize) -> Game {
    assert!(max_nodes >= 2 && max_players >= 1 && max_info_set >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_nodes);
    let label = |k: usize| format!("n{k:02}");

    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
    for k in 1..n {
        // bias toward recent nodes so trees get some depth
        let lo = k.saturating_sub(4);
        let parent = if rng.gen_bool(0.5) {
            rng.gen_range(lo..k)
        } else {
            rng.gen_range(0..k)
        };
        kids[parent].push(k);
    }

    let deciders: Vec<usize> = (0..n).filter(|&k| !kids[k].is_empty()).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &w in &deciders {
        let fits: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| g.len() < max_info_set && kids[g[0]].len() == kids[w].len())
            .map(|(i, _)| i)
            .collect();
        match fits.choose(&mut rng) {
            Some(&i) if rng.gen_bool(0.4) => groups[i].push(w),
            _ => groups.push(vec![w]),
        }
    }

    let n_players = rng.gen_range(1..=max_players);
    let players: Vec<String> = (0..n_players).map(|i| format!("P{i}")).collect();
    let mut q = QuintupleSet::new();
    for group in &groups {
        let mut names: Vec<String> = group.iter().map(|&w| label(w)).collect();
        names.sort();
        let j = format!("{{{}}}", names.join("+"));
        let i = players.choose(&mut rng).expect("at least one player");
        for &w in group {
            for (a, &y) in kids[w].iter().enumerate() {
                q.insert(Quintuple::new(
                    i.clone(),
                    j.clone(),
                    label(w),
                    format!("a{a}"),
                    label(y),
                ));
            }
        }
    }
    let form = crate::form::validate(q).expect("generator builds pentaforms");

    let mut stakeholders: BTreeSet<Label> = players.into_iter().collect();
    if rng.gen_bool(0.2) {
        stakeholders.insert("B".into());
    }
    let utilities = form
        .endnodes()
        .into_iter()
        .map(|y| {
            let p: Profile = stakeholders
                .iter()
                .map(|k| (k.clone(), half_integer(&mut rng)))
                .collect();
            (y, p)
        })
        .collect();
    Game::new(form, stakeholders, utilities).expect("generator builds games")
}

/// A uniformly random pure strategy.
pub fn random_strategy(p: &Pentaform, rng: &mut impl Rng) -> Strategy {
    let choices: Choices = p
        .situations()
        .iter()
        .map(|j| {
            let a: Vec<&Label> = p.action_set(j).expect("situation").iter().collect();
            (
                j.clone(),
                (*a.choose(rng).expect("nonempty action set")).clone(),
            )
        })
        .collect();
    Strategy::from_trusted(choices)
}

/// A random value function. Entries are mostly utilities found below the
/// subroot, so that persistence and admissibility hold with fair odds.
pub fn random_value(g: &Game, rng: &mut impl Rng) -> ValueFunction {
    let p = g.form();
    let mut values = BTreeMap::new();
    for t in subroots(p) {
        let below = p.endnodes_below(t);
        let y = below.choose(rng).expect("endnode below subroot");
        let mut prof = g.utilities()[y].clone();
        if rng.gen_bool(0.25) {
            let k = g.stakeholders().iter().collect::<Vec<_>>();
            let k = (*k.choose(rng).expect("stakeholder")).clone();
            let x = match rng.gen_range(0..10) {
                0 => XReal::PosInf,
                1 => XReal::NegInf,
                _ => half_integer(rng),
            };
            let mut m = prof.as_map().clone();
            m.insert(k, x);
            prof = Profile::new(m);
        }
        values.insert(t.clone(), prof);
    }
    ValueFunction::from_trusted(values)
}
