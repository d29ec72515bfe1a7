use std::collections::{BTreeMap, BTreeSet};

use super::{Profile, XReal};
use crate::error::{Error, Result};
use crate::form::{Label, Pentaform};
use crate::strategy::Choices;

/// The best outcome a single player can force by reassigning some
/// situations while everyone else follows a fixed choice map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestResponse {
    pub value: XReal,
    /// The reassigned situations met along the best path.
    pub choices: Choices,
}

struct Search<'a> {
    form: &'a Pentaform,
    utilities: &'a BTreeMap<Label, Profile>,
    base: &'a Choices,
    free: &'a BTreeSet<Label>,
    player: &'a str,
    assign: Choices,
    best: Option<BestResponse>,
}

impl Search<'_> {
    fn visit(&mut self, x: &str) -> Result<()> {
        if !self.form.is_decision_node(x) {
            let u = self
                .utilities
                .get(x)
                .ok_or_else(|| Error::Domain(format!("endnode {x:?} has no utility")))?;
            let value = u
                .get(self.player)
                .ok_or_else(|| Error::Domain(format!("{} is not a stakeholder", self.player)))?;
            if self.best.as_ref().is_none_or(|b| *value > b.value) {
                self.best = Some(BestResponse {
                    value: value.clone(),
                    choices: self.assign.clone(),
                });
            }
            return Ok(());
        }
        let j = self.form.situation_of(x)?.clone();
        if !self.free.contains(&j) {
            let a = self
                .base
                .get(&j)
                .ok_or_else(|| Error::Domain(format!("no action given for situation {j:?}")))?;
            let y = self.form.next_node(x, a)?.clone();
            return self.visit(&y);
        }
        if let Some(a) = self.assign.get(&j) {
            let y = self.form.next_node(x, a)?.clone();
            return self.visit(&y);
        }
        for (a, y) in self.form.children(x).to_vec() {
            self.assign.insert(j.clone(), a);
            self.visit(&y)?;
            self.assign.remove(&j);
        }
        Ok(())
    }
}

/// Maximizes `player`'s utility from `start` over every reassignment of the
/// situations in `free`; other situations follow `base`.
///
/// Ties keep the first maximum in sorted action order.
pub fn best_response(
    form: &Pentaform,
    utilities: &BTreeMap<Label, Profile>,
    start: &str,
    base: &Choices,
    free: &BTreeSet<Label>,
    player: &str,
) -> Result<BestResponse> {
    let mut search = Search {
        form,
        utilities,
        base,
        free,
        player,
        assign: Choices::new(),
        best: None,
    };
    search.visit(start)?;
    Ok(search.best.expect("every node has an endnode below it"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::strategy::player_situations;

    #[test]
    fn entrant_best_response() {
        let g = fixtures::entry_deterrence_game();
        let base: Choices = [("jE", "e"), ("jI", "f")]
            .iter()
            .map(|(j, a)| (j.to_string(), a.to_string()))
            .collect();
        let free = player_situations(g.form(), "Ent").unwrap();
        let br = best_response(g.form(), g.utilities(), "5", &base, &free, "Ent").unwrap();
        assert_eq!(br.value, XReal::int(0));
        assert_eq!(br.choices["jE"], "~e");
    }

    #[test]
    fn absentminded_player_cannot_split_choices() {
        // one situation at both decision nodes: the far endnodes are
        // reachable only by repeating the same action
        let one = fixtures::single_information_set_form();
        let mut u = BTreeMap::new();
        for (y, x) in [("r1", 0), ("r00", 0), ("r01", 9)] {
            u.insert(y.to_string(), Profile::from_pairs([("Joe", XReal::int(x))]));
        }
        let free = one.situations().clone();
        let br = best_response(&one, &u, "r", &Choices::new(), &free, "Joe").unwrap();
        assert_eq!(br.value, XReal::int(0));
    }
}
