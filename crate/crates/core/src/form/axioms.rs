use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Label, Pentaform, QuintupleSet};

/// The eight pentaform axioms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// Each situation has exactly one player.
    PlayerOfSituation,
    /// Each decision node lies in exactly one situation.
    SituationOfNode,
    /// Within a situation, every node pairs with every feasible action.
    CartesianActions,
    /// Node and action determine the successor.
    SuccessorDetermined,
    /// Each successor has one predecessor.
    PredecessorOfSuccessor,
    /// Each successor is reached by one action.
    ActionOfSuccessor,
    /// No successor precedes itself.
    NoCycles,
    /// Exactly one decision node is not a successor.
    UniqueRoot,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::PlayerOfSituation,
        Axiom::SituationOfNode,
        Axiom::CartesianActions,
        Axiom::SuccessorDetermined,
        Axiom::PredecessorOfSuccessor,
        Axiom::ActionOfSuccessor,
        Axiom::NoCycles,
        Axiom::UniqueRoot,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Axiom::PlayerOfSituation => "[Pi←j]",
            Axiom::SituationOfNode => "[Pj←w]",
            Axiom::CartesianActions => "[Pwa]",
            Axiom::SuccessorDetermined => "[Pwa→y]",
            Axiom::PredecessorOfSuccessor => "[Pw←y]",
            Axiom::ActionOfSuccessor => "[Pa←y]",
            Axiom::NoCycles => "[Py]",
            Axiom::UniqueRoot => "[Pr]",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One violated axiom with a concrete witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    SituationWithSeveralPlayers {
        situation: Label,
        players: Vec<Label>,
    },
    NodeInSeveralSituations {
        node: Label,
        situations: Vec<Label>,
    },
    NotCartesian {
        situation: Label,
        node: Label,
        missing_action: Label,
    },
    SuccessorNotDetermined {
        node: Label,
        action: Label,
        successors: Vec<Label>,
    },
    SeveralPredecessors {
        successor: Label,
        predecessors: Vec<Label>,
    },
    SeveralActions {
        successor: Label,
        actions: Vec<Label>,
    },
    PredecessorCycle {
        successor: Label,
    },
    RootNotUnique {
        candidates: Vec<Label>,
    },
}

impl Violation {
    pub fn axiom(&self) -> Axiom {
        match self {
            Violation::SituationWithSeveralPlayers { .. } => Axiom::PlayerOfSituation,
            Violation::NodeInSeveralSituations { .. } => Axiom::SituationOfNode,
            Violation::NotCartesian { .. } => Axiom::CartesianActions,
            Violation::SuccessorNotDetermined { .. } => Axiom::SuccessorDetermined,
            Violation::SeveralPredecessors { .. } => Axiom::PredecessorOfSuccessor,
            Violation::SeveralActions { .. } => Axiom::ActionOfSuccessor,
            Violation::PredecessorCycle { .. } => Axiom::NoCycles,
            Violation::RootNotUnique { .. } => Axiom::UniqueRoot,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.axiom())?;
        match self {
            Violation::SituationWithSeveralPlayers { situation, players } => {
                write!(f, "situation {situation:?} has players {players:?}")
            }
            Violation::NodeInSeveralSituations { node, situations } => {
                write!(f, "node {node:?} lies in situations {situations:?}")
            }
            Violation::NotCartesian {
                situation,
                node,
                missing_action,
            } => write!(
                f,
                "in situation {situation:?}, node {node:?} lacks action {missing_action:?}"
            ),
            Violation::SuccessorNotDetermined {
                node,
                action,
                successors,
            } => write!(
                f,
                "node {node:?} with action {action:?} leads to {successors:?}"
            ),
            Violation::SeveralPredecessors {
                successor,
                predecessors,
            } => write!(
                f,
                "successor {successor:?} has predecessors {predecessors:?}"
            ),
            Violation::SeveralActions { successor, actions } => {
                write!(
                    f,
                    "successor {successor:?} is reached by actions {actions:?}"
                )
            }
            Violation::PredecessorCycle { successor } => write!(
                f,
                "walking predecessors from {successor:?} never leaves the successor set"
            ),
            Violation::RootNotUnique { candidates } => {
                write!(f, "W \\ Y = {candidates:?} is not a singleton")
            }
        }
    }
}

/// Every violated axiom, with witnesses, in axiom order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self) -> BTreeSet<Axiom> {
        self.violations.iter().map(Violation::axiom).collect()
    }

    pub fn holds(&self, axiom: Axiom) -> bool {
        !self.violations.iter().any(|v| v.axiom() == axiom)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

fn multimap<'a>(
    pairs: impl Iterator<Item = (&'a Label, &'a Label)>,
) -> BTreeMap<&'a Label, BTreeSet<&'a Label>> {
    let mut m: BTreeMap<&Label, BTreeSet<&Label>> = BTreeMap::new();
    for (k, v) in pairs {
        m.entry(k).or_default().insert(v);
    }
    m
}

fn several<'a>(
    m: &'a BTreeMap<&'a Label, BTreeSet<&'a Label>>,
) -> impl Iterator<Item = (&'a Label, Vec<Label>)> + 'a {
    m.iter()
        .filter(|(_, vs)| vs.len() > 1)
        .map(|(k, vs)| (*k, vs.iter().map(|v| (*v).clone()).collect()))
}

/// Checks every axiom and collects all violations.
pub(crate) fn check(q: &QuintupleSet) -> AxiomReport {
    let mut out = Vec::new();

    let players = multimap(q.iter().map(|x| (&x.situation, &x.player)));
    for (j, ps) in several(&players) {
        out.push(Violation::SituationWithSeveralPlayers {
            situation: j.clone(),
            players: ps,
        });
    }

    let situations = multimap(q.iter().map(|x| (&x.decision_node, &x.situation)));
    for (w, js) in several(&situations) {
        out.push(Violation::NodeInSeveralSituations {
            node: w.clone(),
            situations: js,
        });
    }

    // π_WA(Q_j) = W_j × A_j for every j.
    let mut pairs_by_situation: BTreeMap<&Label, BTreeSet<(&Label, &Label)>> = BTreeMap::new();
    for x in q {
        pairs_by_situation
            .entry(&x.situation)
            .or_default()
            .insert((&x.decision_node, &x.action));
    }
    for (j, pairs) in &pairs_by_situation {
        let nodes: BTreeSet<&Label> = pairs.iter().map(|(w, _)| *w).collect();
        let actions: BTreeSet<&Label> = pairs.iter().map(|(_, a)| *a).collect();
        'outer: for w in &nodes {
            for a in &actions {
                if !pairs.contains(&(*w, *a)) {
                    out.push(Violation::NotCartesian {
                        situation: (*j).clone(),
                        node: (*w).clone(),
                        missing_action: (*a).clone(),
                    });
                    break 'outer;
                }
            }
        }
    }

    let mut successors: BTreeMap<(&Label, &Label), BTreeSet<&Label>> = BTreeMap::new();
    for x in q {
        successors
            .entry((&x.decision_node, &x.action))
            .or_default()
            .insert(&x.successor);
    }
    for ((w, a), ys) in &successors {
        if ys.len() > 1 {
            out.push(Violation::SuccessorNotDetermined {
                node: (*w).clone(),
                action: (*a).clone(),
                successors: ys.iter().map(|y| (*y).clone()).collect(),
            });
        }
    }

    let preds = multimap(q.iter().map(|x| (&x.successor, &x.decision_node)));
    for (y, ws) in several(&preds) {
        out.push(Violation::SeveralPredecessors {
            successor: y.clone(),
            predecessors: ws,
        });
    }

    let acts = multimap(q.iter().map(|x| (&x.successor, &x.action)));
    for (y, as_) in several(&acts) {
        out.push(Violation::SeveralActions {
            successor: y.clone(),
            actions: as_,
        });
    }

    // No successor may precede itself, whichever predecessor is followed.
    for &y in preds.keys() {
        let mut seen: BTreeSet<&Label> = BTreeSet::new();
        let mut stack: Vec<&Label> = preds[y].iter().copied().collect();
        let mut cyclic = false;
        while let Some(x) = stack.pop() {
            if x == y {
                cyclic = true;
                break;
            }
            if seen.insert(x) {
                if let Some(ws) = preds.get(x) {
                    stack.extend(ws.iter().copied());
                }
            }
        }
        if cyclic {
            out.push(Violation::PredecessorCycle {
                successor: y.clone(),
            });
        }
    }

    let roots: Vec<Label> = situations
        .keys()
        .filter(|w| !preds.contains_key(*w))
        .map(|w| (*w).clone())
        .collect();
    if roots.len() != 1 {
        out.push(Violation::RootNotUnique { candidates: roots });
    }

    AxiomReport { violations: out }
}

/// Validates a quintuple set, returning the pentaform with its derivatives.
pub fn validate(q: QuintupleSet) -> Result<Pentaform, AxiomReport> {
    let report = check(&q);
    if report.is_empty() {
        Ok(Pentaform::build(q))
    } else {
        Err(report)
    }
}
