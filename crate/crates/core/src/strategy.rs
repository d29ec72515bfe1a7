//! Pure strategies, their restrictions, and outcome functions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{domain, Error, Result};
use crate::form::{Label, Path, Pentaform, Run};
use crate::partition::{is_subroot, piece_of_node, subroots};

/// Situation to action.
pub type Choices = BTreeMap<Label, Label>;

/// A total, feasible choice of action at every situation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Strategy {
    choices: Choices,
}

impl Strategy {
    /// Accepts `choices` iff it is total on `J` and feasible everywhere.
    pub fn new(p: &Pentaform, choices: Choices) -> Result<Self> {
        check_choices(p, p.situations(), &choices)?;
        Ok(Self { choices })
    }

    pub fn from_pairs<'a>(
        p: &Pentaform,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self> {
        Self::new(
            p,
            pairs
                .into_iter()
                .map(|(j, a)| (j.to_string(), a.to_string()))
                .collect(),
        )
    }

    /// Skips validation; callers build choices from `A_j` directly.
    pub(crate) fn from_trusted(choices: Choices) -> Self {
        Self { choices }
    }

    pub fn choices(&self) -> &Choices {
        &self.choices
    }

    pub fn into_choices(self) -> Choices {
        self.choices
    }

    pub fn choice(&self, j: &str) -> Option<&Label> {
        self.choices.get(j)
    }

    pub fn restrict(&self, p: &Pentaform, scope: &Scope) -> Result<Restriction> {
        let dom = scope.situations(p)?;
        Ok(Restriction {
            scope: scope.clone(),
            choices: self
                .choices
                .iter()
                .filter(|(j, _)| dom.contains(*j))
                .map(|(j, a)| (j.clone(), a.clone()))
                .collect(),
        })
    }

    /// The strategy that follows `over` where defined and `self` elsewhere.
    pub fn overridden(&self, over: &Choices) -> Strategy {
        let mut choices = self.choices.clone();
        for (j, a) in over {
            choices.insert(j.clone(), a.clone());
        }
        Strategy { choices }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_choices(f, &self.choices)
    }
}

pub(crate) fn write_choices(f: &mut fmt::Formatter<'_>, c: &Choices) -> fmt::Result {
    f.write_str("{")?;
    for (n, (j, a)) in c.iter().enumerate() {
        if n > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{j}→{a}")?;
    }
    f.write_str("}")
}

fn check_choices(p: &Pentaform, dom: &BTreeSet<Label>, choices: &Choices) -> Result<()> {
    for j in dom {
        match choices.get(j) {
            None => {
                return Err(Error::InvalidStrategy(format!(
                    "situation {j:?} has no action"
                )))
            }
            Some(a) if !p.action_set(j)?.contains(a) => {
                return Err(Error::InvalidStrategy(format!(
                    "action {a:?} is not feasible at situation {j:?}"
                )))
            }
            Some(_) => {}
        }
    }
    if let Some(j) = choices.keys().find(|j| !dom.contains(*j)) {
        return Err(Error::InvalidStrategy(format!(
            "{j:?} is not a situation here"
        )));
    }
    Ok(())
}

/// `J_i`.
pub fn player_situations(p: &Pentaform, i: &str) -> Result<BTreeSet<Label>> {
    if !p.players().contains(i) {
        return domain(format!("{i:?} is not a player"));
    }
    Ok(p.situations()
        .iter()
        .filter(|j| p.player_of(j).map(|x| x == i).unwrap_or(false))
        .cloned()
        .collect())
}

/// `ᵗJ`.
pub fn subform_situations(p: &Pentaform, t: &str) -> Result<BTreeSet<Label>> {
    if !is_subroot(p, t) {
        return domain(format!("{t:?} is not a subroot"));
    }
    Ok(p.decision_nodes_below(t)
        .iter()
        .map(|w| p.situation_of(w).expect("decision node").clone())
        .collect())
}

/// `Jᵗ`.
pub fn piece_situations(p: &Pentaform, t: &str) -> Result<BTreeSet<Label>> {
    if !is_subroot(p, t) {
        return domain(format!("{t:?} is not a subroot"));
    }
    Ok(piece_of_node(p)
        .iter()
        .filter(|(_, owner)| *owner == t)
        .map(|(w, _)| p.situation_of(w).expect("decision node").clone())
        .collect())
}

/// Which part of `J` a restriction keeps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scope {
    Player(Label),
    Opponents(Label),
    Subform(Label),
    SubformPlayer(Label, Label),
    SubformOpponents(Label, Label),
    Piece(Label),
    PiecePlayer(Label, Label),
    PieceOpponents(Label, Label),
}

impl Scope {
    pub fn situations(&self, p: &Pentaform) -> Result<BTreeSet<Label>> {
        let mine = |i: &str| player_situations(p, i);
        Ok(match self {
            Scope::Player(i) => mine(i)?,
            Scope::Opponents(i) => p.situations().difference(&mine(i)?).cloned().collect(),
            Scope::Subform(t) => subform_situations(p, t)?,
            Scope::SubformPlayer(t, i) => subform_situations(p, t)?
                .intersection(&mine(i)?)
                .cloned()
                .collect(),
            Scope::SubformOpponents(t, i) => subform_situations(p, t)?
                .difference(&mine(i)?)
                .cloned()
                .collect(),
            Scope::Piece(t) => piece_situations(p, t)?,
            Scope::PiecePlayer(t, i) => piece_situations(p, t)?
                .intersection(&mine(i)?)
                .cloned()
                .collect(),
            Scope::PieceOpponents(t, i) => piece_situations(p, t)?
                .difference(&mine(i)?)
                .cloned()
                .collect(),
        })
    }
}

/// A strategy restricted to part of `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub scope: Scope,
    pub choices: Choices,
}

impl Restriction {
    /// Union with another restriction; `self` wins on overlap.
    pub fn union(&self, other: &Restriction) -> Choices {
        let mut out = other.choices.clone();
        out.extend(self.choices.iter().map(|(j, a)| (j.clone(), a.clone())));
        out
    }
}

/// Follows `choices` from `start` until `stop` holds at a later node or an
/// endnode is reached.
fn trace(
    p: &Pentaform,
    start: &str,
    choices: &Choices,
    stop: impl Fn(&str) -> bool,
) -> Result<Path> {
    let mut nodes = vec![start.to_string()];
    let mut x = start.to_string();
    while p.is_decision_node(&x) && (x == start || !stop(&x)) {
        let j = p.situation_of(&x)?;
        let a = choices
            .get(j)
            .ok_or_else(|| Error::Domain(format!("no action given for situation {j:?}")))?;
        x = p.next_node(&x, a)?.clone();
        nodes.push(x.clone());
    }
    Ok(Path(nodes))
}

/// The outcome `O(s)`.
pub fn outcome(p: &Pentaform, s: &Strategy) -> Run {
    trace(p, p.root(), &s.choices, |_| false).expect("total feasible strategy")
}

/// `ᵗO(ᵗs)` for a restriction total on `ᵗJ`; the run of the subform from `t`.
pub fn subform_outcome(p: &Pentaform, t: &str, choices: &Choices) -> Result<Run> {
    check_choices(
        p,
        &subform_situations(p, t)?,
        &only(choices, &subform_situations(p, t)?),
    )?;
    trace(p, t, choices, |_| false)
}

/// `Oᵗ(sᵗ)` for a restriction total on `Jᵗ`; a run of the piece form.
pub fn piece_outcome(p: &Pentaform, t: &str, choices: &Choices) -> Result<Run> {
    let dom = piece_situations(p, t)?;
    check_choices(p, &dom, &only(choices, &dom))?;
    let t_set = subroots(p);
    trace(p, t, choices, |x| t_set.contains(x))
}

fn only(choices: &Choices, dom: &BTreeSet<Label>) -> Choices {
    choices
        .iter()
        .filter(|(j, _)| dom.contains(*j))
        .map(|(j, a)| (j.clone(), a.clone()))
        .collect()
}

/// How a subroot sequence ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Termination {
    /// The last listed subroot's piece run does not exit to a subroot.
    Terminated,
    /// Symbolic sequences only: from `cycle_start` on the listed entries
    /// repeat forever.
    InfiniteDetected { cycle_start: usize },
}

/// `⟨t_m⟩` with `t_{m+1} = max Oᵗᵐ(sᵗᵐ)` while that node is a subroot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubrootSequence {
    pub subroots: Vec<Label>,
    pub termination: Termination,
}

pub fn subroot_sequence(p: &Pentaform, s: &Strategy, t0: &str) -> Result<SubrootSequence> {
    if !is_subroot(p, t0) {
        return domain(format!("{t0:?} is not a subroot"));
    }
    let t_set = subroots(p);
    let mut seq = vec![t0.to_string()];
    loop {
        let t = seq.last().expect("nonempty");
        let run = piece_outcome(p, t, s.choices())?;
        let end = run.last();
        if t_set.contains(end) {
            seq.push(end.clone());
        } else {
            return Ok(SubrootSequence {
                subroots: seq,
                termination: Termination::Terminated,
            });
        }
    }
}
