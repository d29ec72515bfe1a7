//! Games, value functions and the equilibrium checks.

mod checks;
mod deviation;
mod random;
mod solve;
mod xreal;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{domain, Error, Result};
use crate::form::{Label, Pentaform, Run};
use crate::partition::{piece_form, subroots};
use crate::strategy::{write_choices, Choices};

pub use checks::{
    admissible, authentic, authentic_value, nash_check, one_piece_unimprovable, persistent,
    piecewise_nash, spe_check_direct,
};
pub use deviation::{best_response, BestResponse};
pub use random::{random_game, random_strategy, random_value};
pub use solve::{
    first_nash_profile, solve_backward, solve_backward_with_cap, Solution, DEFAULT_PROFILE_CAP,
};
pub use xreal::{Profile, XReal};

/// A pentaform with stakeholders and utilities on its final endnodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    form: Pentaform,
    stakeholders: BTreeSet<Label>,
    utilities: BTreeMap<Label, Profile>,
}

impl Game {
    /// Checks `I ⊆ K` and that every final endnode has a `K`-total profile.
    pub fn new(
        form: Pentaform,
        stakeholders: BTreeSet<Label>,
        utilities: BTreeMap<Label, Profile>,
    ) -> Result<Self> {
        if let Some(i) = form.players().difference(&stakeholders).next() {
            return Err(Error::InvalidGame(format!(
                "player {i:?} is not a stakeholder"
            )));
        }
        let ends = form.endnodes();
        for y in &ends {
            let Some(u) = utilities.get(y) else {
                return Err(Error::InvalidGame(format!("endnode {y:?} has no utility")));
            };
            if u.stakeholders() != stakeholders {
                return Err(Error::InvalidGame(format!(
                    "utility at {y:?} is not indexed by exactly the stakeholders"
                )));
            }
        }
        if let Some(y) = utilities.keys().find(|y| !ends.contains(*y)) {
            return Err(Error::InvalidGame(format!("{y:?} is not a final endnode")));
        }
        Ok(Self {
            form,
            stakeholders,
            utilities,
        })
    }

    pub fn form(&self) -> &Pentaform {
        &self.form
    }

    pub fn stakeholders(&self) -> &BTreeSet<Label> {
        &self.stakeholders
    }

    /// `K \ I`.
    pub fn bystanders(&self) -> BTreeSet<Label> {
        self.stakeholders
            .difference(self.form.players())
            .cloned()
            .collect()
    }

    pub fn utilities(&self) -> &BTreeMap<Label, Profile> {
        &self.utilities
    }

    /// Utility attached to a final endnode.
    pub fn utility_at(&self, y: &str) -> Result<&Profile> {
        match self.utilities.get(y) {
            Some(u) => Ok(u),
            None => domain(format!("{y:?} is not a final endnode")),
        }
    }

    /// `u(Z)` for a run `Z`.
    pub fn utility_of_run(&self, z: &Run) -> Result<&Profile> {
        if z.is_empty() || z.first() != self.form.root() || self.form.run_to(z.last())? != *z {
            return domain(format!("{z} is not a run"));
        }
        self.utility_at(z.last())
    }

    /// The subgame at subroot `t`, with utilities inherited by run completion.
    pub fn subgame(&self, t: &str) -> Result<Game> {
        let form = crate::partition::subform(&self.form, t)?;
        let utilities = form
            .endnodes()
            .into_iter()
            .map(|y| {
                let u = self.utilities[&y].clone();
                (y, u)
            })
            .collect();
        Ok(Game {
            form,
            stakeholders: self.stakeholders.clone(),
            utilities,
        })
    }
}

/// A profile for every subroot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueFunction {
    values: BTreeMap<Label, Profile>,
}

impl ValueFunction {
    /// Checks that the domain is exactly `T` and profiles are `K`-total.
    pub fn new(g: &Game, values: BTreeMap<Label, Profile>) -> Result<Self> {
        let t_set = subroots(g.form());
        if values.keys().ne(t_set.iter()) {
            let missing = t_set.iter().find(|t| !values.contains_key(*t));
            return Err(match missing {
                Some(t) => Error::Domain(format!("value function misses subroot {t:?}")),
                None => Error::Domain(format!(
                    "value function lists {:?}, which is not a subroot",
                    values
                        .keys()
                        .find(|t| !t_set.contains(*t))
                        .expect("extra key")
                )),
            });
        }
        if let Some((t, _)) = values
            .iter()
            .find(|(_, p)| p.stakeholders() != *g.stakeholders())
        {
            return Err(Error::Domain(format!(
                "value at {t:?} is not indexed by exactly the stakeholders"
            )));
        }
        Ok(Self { values })
    }

    /// `v ≡ x` at every subroot, for every stakeholder.
    pub fn constant(g: &Game, x: XReal) -> Self {
        let p = Profile::constant(g.stakeholders(), x);
        Self {
            values: subroots(g.form())
                .iter()
                .map(|t| (t.clone(), p.clone()))
                .collect(),
        }
    }

    pub(crate) fn from_trusted(values: BTreeMap<Label, Profile>) -> Self {
        Self { values }
    }

    pub fn get(&self, t: &str) -> Option<&Profile> {
        self.values.get(t)
    }

    pub fn values(&self) -> &BTreeMap<Label, Profile> {
        &self.values
    }
}

/// The piece game at `t`: exits to later subroots are priced by `v`, final
/// endnodes keep their utilities.
pub fn piece_game(g: &Game, v: &ValueFunction, t: &str) -> Result<Game> {
    let form = piece_form(g.form(), t)?;
    let t_set = subroots(g.form());
    let mut utilities = BTreeMap::new();
    for y in form.endnodes() {
        let u = if t_set.contains(&y) {
            match v.get(&y) {
                Some(p) => p.clone(),
                None => return domain(format!("value function misses exit subroot {y:?}")),
            }
        } else {
            g.utilities[&y].clone()
        };
        utilities.insert(y, u);
    }
    Ok(Game {
        form,
        stakeholders: g.stakeholders.clone(),
        utilities,
    })
}

/// Outcome of a property check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn holds() -> Self {
        Verdict {
            holds: true,
            witness: None,
        }
    }

    pub fn fails(w: Witness) -> Self {
        Verdict {
            holds: false,
            witness: Some(w),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None if self.holds => f.write_str("holds"),
            None => f.write_str("fails"),
            Some(w) => write!(f, "fails: {w}"),
        }
    }
}

/// Counterexample attached to a failing verdict. `at` names the subroot (or,
/// for stationary systems, the piece class) where the failure occurs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `player` gains by switching to `deviation` at the listed situations.
    Deviation {
        at: Label,
        player: Label,
        deviation: Choices,
        current: XReal,
        improved: XReal,
    },
    Inadmissible {
        at: Label,
        stakeholder: Label,
        value: XReal,
        inf: XReal,
        sup: XReal,
    },
    /// `value` differs from the profile the property demands.
    ValueMismatch {
        at: Label,
        value: Profile,
        expected: Profile,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Deviation {
                at,
                player,
                deviation,
                current,
                improved,
            } => {
                write!(f, "at {at:?}, {player} deviates to ")?;
                write_choices(f, deviation)?;
                write!(
                    f,
                    " and gets {} instead of {}",
                    improved.describe(),
                    current.describe()
                )
            }
            Witness::Inadmissible {
                at,
                stakeholder,
                value,
                inf,
                sup,
            } => write!(
                f,
                "at {at:?}, {stakeholder}'s value {} lies outside [{}, {}]",
                value.describe(),
                inf.describe(),
                sup.describe()
            ),
            Witness::ValueMismatch {
                at,
                value,
                expected,
            } => write!(
                f,
                "at {at:?}, value {} but expected {}",
                value.describe(),
                expected.describe()
            ),
        }
    }
}
