//! Quintuple sets and pentaforms.
//!
//! A pentaform is a set of `⟨player, situation, decision node, action,
//! successor⟩` quintuples satisfying eight axioms. Everything about the game
//! tree (root, predecessor function, precedence, runs) is derived from the set.

mod axioms;
mod tree;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use axioms::{validate, Axiom, AxiomReport, Violation};
pub use tree::{Path, Pentaform, Run, RunClosure};

/// Labels are opaque strings ordered lexicographically.
pub type Label = String;

/// One edge of an extensive form, with its player and situation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Quintuple {
    pub player: Label,
    pub situation: Label,
    pub decision_node: Label,
    pub action: Label,
    pub successor: Label,
}

impl Quintuple {
    pub fn new(
        player: impl Into<Label>,
        situation: impl Into<Label>,
        decision_node: impl Into<Label>,
        action: impl Into<Label>,
        successor: impl Into<Label>,
    ) -> Self {
        Self {
            player: player.into(),
            situation: situation.into(),
            decision_node: decision_node.into(),
            action: action.into(),
            successor: successor.into(),
        }
    }

    pub fn coord(&self, c: Coord) -> &Label {
        match c {
            Coord::I => &self.player,
            Coord::J => &self.situation,
            Coord::W => &self.decision_node,
            Coord::A => &self.action,
            Coord::Y => &self.successor,
        }
    }

    /// Canonical file order: (situation, decision node, action), then the rest.
    pub(crate) fn canonical_key(&self) -> (&str, &str, &str, &str, &str) {
        (
            &self.situation,
            &self.decision_node,
            &self.action,
            &self.player,
            &self.successor,
        )
    }
}

impl fmt::Display for Quintuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "⟨{}, {}, {:?}, {}, {:?}⟩",
            self.player, self.situation, self.decision_node, self.action, self.successor
        )
    }
}

/// The five quintuple coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    I,
    J,
    W,
    A,
    Y,
}

impl Coord {
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Coord::I),
            'J' => Ok(Coord::J),
            'W' => Ok(Coord::W),
            'A' => Ok(Coord::A),
            'Y' => Ok(Coord::Y),
            other => Err(Error::Usage(format!(
                "invalid coordinate {other:?}; expected one of I, J, W, A, Y"
            ))),
        }
    }

    /// Parses a coordinate sequence such as `"JI"` or `"WAY"`.
    pub fn parse_sequence(s: &str) -> Result<Vec<Coord>> {
        let coords = s
            .chars()
            .map(Coord::from_char)
            .collect::<Result<Vec<_>>>()?;
        check_coords(&coords)?;
        Ok(coords)
    }
}

fn check_coords(coords: &[Coord]) -> Result<()> {
    if coords.is_empty() {
        return Err(Error::Usage("empty coordinate sequence".into()));
    }
    let distinct: BTreeSet<_> = coords.iter().collect();
    if distinct.len() != coords.len() {
        return Err(Error::Usage(format!("repeated coordinate in {coords:?}")));
    }
    Ok(())
}

/// A finite set of quintuples, iterated in sorted order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QuintupleSet {
    quintuples: BTreeSet<Quintuple>,
}

impl QuintupleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, q: Quintuple) -> bool {
        self.quintuples.insert(q)
    }

    pub fn len(&self) -> usize {
        self.quintuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quintuples.is_empty()
    }

    pub fn contains(&self, q: &Quintuple) -> bool {
        self.quintuples.contains(q)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Quintuple> {
        self.quintuples.iter()
    }

    pub fn as_set(&self) -> &BTreeSet<Quintuple> {
        &self.quintuples
    }

    /// Quintuples in canonical file order.
    pub fn canonical_order(&self) -> Vec<&Quintuple> {
        let mut v: Vec<_> = self.quintuples.iter().collect();
        v.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
        v
    }

    /// Projection onto a coordinate sequence.
    pub fn project(&self, coords: &[Coord]) -> Result<BTreeSet<Vec<Label>>> {
        check_coords(coords)?;
        Ok(self
            .quintuples
            .iter()
            .map(|q| coords.iter().map(|&c| q.coord(c).clone()).collect())
            .collect())
    }

    /// Single-coordinate projection.
    pub fn project1(&self, c: Coord) -> BTreeSet<Label> {
        self.quintuples.iter().map(|q| q.coord(c).clone()).collect()
    }

    /// The slice for situation `j`: every quintuple listing `j`.
    pub fn slice(&self, j: &str) -> QuintupleSet {
        self.filter(|q| q.situation == j)
    }

    pub fn filter(&self, mut keep: impl FnMut(&Quintuple) -> bool) -> QuintupleSet {
        self.quintuples
            .iter()
            .filter(|q| keep(q))
            .cloned()
            .collect()
    }

    pub fn union(&self, other: &QuintupleSet) -> QuintupleSet {
        self.quintuples.union(&other.quintuples).cloned().collect()
    }

    pub fn difference(&self, other: &QuintupleSet) -> QuintupleSet {
        self.quintuples
            .difference(&other.quintuples)
            .cloned()
            .collect()
    }

    pub fn is_subset(&self, other: &QuintupleSet) -> bool {
        self.quintuples.is_subset(&other.quintuples)
    }
}

impl FromIterator<Quintuple> for QuintupleSet {
    fn from_iter<T: IntoIterator<Item = Quintuple>>(iter: T) -> Self {
        Self {
            quintuples: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a QuintupleSet {
    type Item = &'a Quintuple;
    type IntoIter = std::collections::btree_set::Iter<'a, Quintuple>;

    fn into_iter(self) -> Self::IntoIter {
        self.quintuples.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn project_decision_nodes_of_entry_game() {
        let q = fixtures::entry_deterrence_quintuples();
        let w = q.project(&[Coord::W]).unwrap();
        let expected: BTreeSet<Vec<Label>> = [vec!["5".to_string()], vec!["6".to_string()]].into();
        assert_eq!(w, expected);
    }

    #[test]
    fn project_empty_set_is_empty() {
        let q = QuintupleSet::new();
        assert!(q.project(&[Coord::J, Coord::I]).unwrap().is_empty());
    }

    #[test]
    fn project_reorders_coordinates() {
        let q = fixtures::entry_deterrence_quintuples();
        let ji = q.project(&Coord::parse_sequence("JI").unwrap()).unwrap();
        assert!(ji.contains(&vec!["jE".to_string(), "Ent".to_string()]));
        assert_eq!(ji.len(), 2);
    }

    #[test]
    fn bad_coordinates_are_usage_errors() {
        assert!(matches!(Coord::parse_sequence("JX"), Err(Error::Usage(_))));
        assert!(matches!(Coord::parse_sequence("JJ"), Err(Error::Usage(_))));
        assert!(matches!(Coord::parse_sequence(""), Err(Error::Usage(_))));
        let q = QuintupleSet::new();
        assert!(matches!(q.project(&[]), Err(Error::Usage(_))));
    }

    #[test]
    fn slices_partition_the_set() {
        let q = fixtures::cry_wolf_form(1).quintuples().clone();
        let mut total = 0;
        let mut union = QuintupleSet::new();
        for j in q.project1(Coord::J) {
            let s = q.slice(&j);
            assert!(!s.is_empty());
            total += s.len();
            union = union.union(&s);
        }
        assert_eq!(total, q.len());
        assert_eq!(union, q);
    }

    #[test]
    fn slice_for_unknown_situation_is_empty() {
        let q = fixtures::entry_deterrence_quintuples();
        assert!(q.slice("nowhere").is_empty());
        assert_eq!(q.slice("jE").len(), 2);
    }
}
