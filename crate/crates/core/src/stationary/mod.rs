//! Infinite games generated by finitely many piece-class templates.
//!
//! Every subroot of a generated game is labelled by the concatenation of the
//! exit labels leading to it; the piece below it is a copy of its class
//! template with every node label prefixed by the subroot label.

mod certify;
mod instantiate;
mod values;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::form::{Label, Pentaform};
use crate::game::{Profile, XReal};
use crate::partition::subroots;
use crate::strategy::{Choices, Strategy};

pub use certify::{
    admissible, authentic, certify_spe, persistent, piecewise_nash, quotient_game,
    solve_stationary, Certificate, CertificateKind, DeviationScan, StationarySolution,
};
pub use instantiate::{instantiate, BoundaryEntry, Instantiation, Mode, SubrootInfo};
pub use values::{
    class_bounds, class_cycles, conceivable_bounds, continuation_values, parse_subroot, value_at,
    ParsedSubroot,
};

pub type ClassId = Label;

/// What happens at a template endnode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exit {
    /// The run ends here.
    Terminal(Profile),
    /// A fresh piece of `class` starts here.
    Continue { class: ClassId, reward: Profile },
}

impl Exit {
    pub fn reward(&self) -> &Profile {
        match self {
            Exit::Terminal(r) => r,
            Exit::Continue { reward, .. } => reward,
        }
    }

    pub fn next_class(&self) -> Option<&ClassId> {
        match self {
            Exit::Terminal(_) => None,
            Exit::Continue { class, .. } => Some(class),
        }
    }
}

/// One piece shape with its exit rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceClass {
    pub template: Pentaform,
    pub exits: BTreeMap<Label, Exit>,
}

/// Utility of an infinite run declared for one simple cycle of classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleUtility {
    pub cycle: Vec<ClassId>,
    pub utility: Profile,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UtilityModel {
    /// Run utility `Σ β^m r_m` over the rewards of its exits.
    Discounted(BigRational),
    /// Terminal rewards are the run utility; continuation rewards are
    /// ignored; each infinite run gets its cycle's declared utility.
    AbsoluteTerminal(Vec<CycleUtility>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationarySystem {
    stakeholders: BTreeSet<Label>,
    classes: BTreeMap<ClassId, PieceClass>,
    initial: ClassId,
    model: UtilityModel,
}

/// Rotates a cycle so that its smallest class comes first.
pub(crate) fn normalize_cycle(cycle: &[ClassId]) -> Vec<ClassId> {
    let start = (0..cycle.len()).min_by_key(|&i| &cycle[i]).unwrap_or(0);
    cycle[start..]
        .iter()
        .chain(&cycle[..start])
        .cloned()
        .collect()
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidGame(msg.into())
}

impl StationarySystem {
    pub fn new(
        stakeholders: BTreeSet<Label>,
        classes: BTreeMap<ClassId, PieceClass>,
        initial: ClassId,
        model: UtilityModel,
    ) -> Result<Self> {
        if !classes.contains_key(&initial) {
            return Err(invalid(format!("initial class {initial:?} is not defined")));
        }
        let discounted = matches!(model, UtilityModel::Discounted(_));
        if let UtilityModel::Discounted(beta) = &model {
            if beta.is_negative() || *beta >= BigRational::one() {
                return Err(invalid(format!("discount factor {beta} is not in [0, 1)")));
            }
        }
        let check_profile = |what: &str, p: &Profile| -> Result<()> {
            if p.stakeholders() != stakeholders {
                return Err(invalid(format!(
                    "{what} is not indexed by exactly the stakeholders"
                )));
            }
            if discounted && p.iter().any(|(_, x)| !x.is_finite()) {
                return Err(invalid(format!(
                    "{what} is infinite; discounted rewards must be finite"
                )));
            }
            Ok(())
        };
        for (c, class) in &classes {
            let t = &class.template;
            if !t.root().is_empty() {
                return Err(invalid(format!(
                    "template of class {c:?} must have the empty label as its root"
                )));
            }
            if subroots(t).len() != 1 {
                return Err(invalid(format!(
                    "template of class {c:?} contains a subroot besides its root"
                )));
            }
            if let Some(i) = t.players().difference(&stakeholders).next() {
                return Err(invalid(format!("player {i:?} is not a stakeholder")));
            }
            let ends = t.endnodes();
            if class.exits.keys().ne(ends.iter()) {
                return Err(invalid(format!(
                    "exits of class {c:?} must list exactly the template endnodes"
                )));
            }
            for (y, exit) in &class.exits {
                check_profile(
                    &format!("reward at exit {y:?} of class {c:?}"),
                    exit.reward(),
                )?;
                if let Some(next) = exit.next_class() {
                    if !classes.contains_key(next) {
                        return Err(invalid(format!(
                            "exit {y:?} of class {c:?} continues to unknown class {next:?}"
                        )));
                    }
                }
            }
        }

        let mut reached = BTreeSet::from([initial.clone()]);
        let mut queue = VecDeque::from([initial.clone()]);
        while let Some(c) = queue.pop_front() {
            for exit in classes[&c].exits.values() {
                if let Some(n) = exit.next_class() {
                    if reached.insert(n.clone()) {
                        queue.push_back(n.clone());
                    }
                }
            }
        }
        if let Some(c) = classes.keys().find(|c| !reached.contains(*c)) {
            return Err(invalid(format!(
                "class {c:?} is unreachable from the initial class"
            )));
        }

        let model = match model {
            UtilityModel::AbsoluteTerminal(cycles) => {
                let mut seen = BTreeSet::new();
                let mut out = Vec::new();
                for cu in cycles {
                    if cu.cycle.is_empty() {
                        return Err(invalid("declared cycle is empty"));
                    }
                    for (k, c) in cu.cycle.iter().enumerate() {
                        let next = &cu.cycle[(k + 1) % cu.cycle.len()];
                        let linked = classes.get(c).is_some_and(|cl| {
                            cl.exits.values().any(|e| e.next_class() == Some(next))
                        });
                        if !linked {
                            return Err(invalid(format!(
                                "declared cycle {:?} has no exit from {c:?} to {next:?}",
                                cu.cycle
                            )));
                        }
                    }
                    let cycle = normalize_cycle(&cu.cycle);
                    check_profile(&format!("utility of cycle {cycle:?}"), &cu.utility)?;
                    if !seen.insert(cycle.clone()) {
                        return Err(invalid(format!("cycle {cycle:?} is declared twice")));
                    }
                    out.push(CycleUtility {
                        cycle,
                        utility: cu.utility,
                    });
                }
                out.sort_by(|a, b| a.cycle.cmp(&b.cycle));
                UtilityModel::AbsoluteTerminal(out)
            }
            m => m,
        };

        Ok(Self {
            stakeholders,
            classes,
            initial,
            model,
        })
    }

    pub fn stakeholders(&self) -> &BTreeSet<Label> {
        &self.stakeholders
    }

    pub fn classes(&self) -> &BTreeMap<ClassId, PieceClass> {
        &self.classes
    }

    pub fn class(&self, c: &str) -> Result<&PieceClass> {
        self.classes
            .get(c)
            .ok_or_else(|| Error::Domain(format!("{c:?} is not a class")))
    }

    pub fn initial(&self) -> &ClassId {
        &self.initial
    }

    pub fn model(&self) -> &UtilityModel {
        &self.model
    }

    pub fn discount(&self) -> Option<&BigRational> {
        match &self.model {
            UtilityModel::Discounted(b) => Some(b),
            UtilityModel::AbsoluteTerminal(_) => None,
        }
    }

    /// Declared utility of a cycle, in any rotation.
    pub fn cycle_utility(&self, cycle: &[ClassId]) -> Option<&Profile> {
        let UtilityModel::AbsoluteTerminal(cycles) = &self.model else {
            return None;
        };
        let key = normalize_cycle(cycle);
        cycles.iter().find(|c| c.cycle == key).map(|c| &c.utility)
    }

    /// Players across all templates.
    pub fn players(&self) -> BTreeSet<Label> {
        self.classes
            .values()
            .flat_map(|c| c.template.players().iter().cloned())
            .collect()
    }

    /// Shortest class path from the initial class to `c`, inclusive.
    pub(crate) fn path_to(&self, c: &str) -> Vec<ClassId> {
        let mut prev: BTreeMap<ClassId, ClassId> = BTreeMap::new();
        let mut queue = VecDeque::from([self.initial.clone()]);
        let mut seen = BTreeSet::from([self.initial.clone()]);
        while let Some(x) = queue.pop_front() {
            if x == c {
                break;
            }
            for exit in self.classes[&x].exits.values() {
                if let Some(n) = exit.next_class() {
                    if seen.insert(n.clone()) {
                        prev.insert(n.clone(), x.clone());
                        queue.push_back(n.clone());
                    }
                }
            }
        }
        let mut path = vec![c.to_string()];
        while let Some(p) = prev.get(path.last().expect("nonempty")) {
            path.push(p.clone());
        }
        path.reverse();
        path
    }

    /// `β^m`, or 1 for absolute-terminal systems.
    pub(crate) fn weight(&self, m: usize) -> BigRational {
        match self.discount() {
            Some(b) => num_traits::pow(b.clone(), m),
            None => BigRational::one(),
        }
    }
}

/// One choice rule per class, replicated at every subroot of that class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationaryStrategy {
    choices: BTreeMap<ClassId, Choices>,
}

impl StationaryStrategy {
    /// Checks totality and feasibility against every class template.
    pub fn new(sys: &StationarySystem, choices: BTreeMap<ClassId, Choices>) -> Result<Self> {
        for (c, class) in sys.classes() {
            let Some(ch) = choices.get(c) else {
                return Err(Error::InvalidStrategy(format!(
                    "class {c:?} has no choices"
                )));
            };
            Strategy::new(&class.template, ch.clone()).map_err(|e| match e {
                Error::InvalidStrategy(m) => Error::InvalidStrategy(format!("class {c:?}: {m}")),
                other => other,
            })?;
        }
        if let Some(c) = choices.keys().find(|c| !sys.classes().contains_key(*c)) {
            return Err(Error::InvalidStrategy(format!("{c:?} is not a class")));
        }
        Ok(Self { choices })
    }

    pub(crate) fn from_trusted(choices: BTreeMap<ClassId, Choices>) -> Self {
        Self { choices }
    }

    pub fn choices(&self) -> &BTreeMap<ClassId, Choices> {
        &self.choices
    }

    pub fn for_class(&self, c: &str) -> &Choices {
        &self.choices[c]
    }

    /// The same action at every situation owned by `player`, where feasible.
    pub fn uniform(sys: &StationarySystem, by_player: &BTreeMap<Label, Label>) -> Result<Self> {
        let mut choices = BTreeMap::new();
        for (c, class) in sys.classes() {
            let t = &class.template;
            let mut ch = Choices::new();
            for j in t.situations() {
                let i = t.player_of(j)?;
                let a = by_player.get(i).ok_or_else(|| {
                    Error::InvalidStrategy(format!("no action given for player {i:?}"))
                })?;
                ch.insert(j.clone(), a.clone());
            }
            choices.insert(c.clone(), ch);
        }
        Self::new(sys, choices)
    }
}

/// The exit reached in class `c` when its template is played by `choices`.
pub(crate) fn chosen_exit<'a>(
    sys: &'a StationarySystem,
    c: &str,
    choices: &Choices,
) -> Result<(&'a Label, &'a Exit)> {
    let class = sys.class(c)?;
    let t = &class.template;
    let mut x = t.root().clone();
    while t.is_decision_node(&x) {
        let j = t.situation_of(&x)?;
        let a = choices
            .get(j)
            .ok_or_else(|| Error::Domain(format!("class {c:?}: no action for {j:?}")))?;
        x = t.next_node(&x, a)?.clone();
    }
    Ok(class.exits.get_key_value(&x).expect("exits cover endnodes"))
}

pub(crate) fn rational(x: &XReal) -> &BigRational {
    x.as_finite().expect("finite by validation")
}

pub(crate) fn zero_profile(k: &BTreeSet<Label>) -> Profile {
    Profile::constant(k, XReal::Finite(BigRational::zero()))
}
