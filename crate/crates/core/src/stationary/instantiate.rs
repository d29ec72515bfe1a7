use std::collections::{BTreeMap, VecDeque};

use super::{class_bounds, ClassId, Exit, StationaryStrategy, StationarySystem};
use crate::error::{Error, Result};
use crate::form::{Label, Pentaform, Quintuple, QuintupleSet};
use crate::game::{Game, Profile, ValueFunction};
use crate::strategy::{Choices, Strategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Form only; boundary utilities are supplied later.
    Structural,
    /// Also bracket each boundary endnode by the conceivable bounds of the
    /// class that would start there.
    Bounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubrootInfo {
    pub class: ClassId,
    /// Exit labels from the root, one per piece passed.
    pub path: Vec<Label>,
    pub accrued: Profile,
}

/// An endnode of the truncation where the generated game would go on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryEntry {
    pub class: ClassId,
    /// Number of pieces before the one that would start here.
    pub depth: usize,
    /// Rewards collected up to and including this exit.
    pub accrued: Profile,
}

/// The explicit truncation of a stationary system.
#[derive(Clone, Debug)]
pub struct Instantiation {
    pub form: Pentaform,
    pub depth: usize,
    pub subroots: BTreeMap<Label, SubrootInfo>,
    /// Utilities of endnodes where the generated game ends.
    pub finals: BTreeMap<Label, Profile>,
    pub boundary: BTreeMap<Label, BoundaryEntry>,
    /// Instantiated situation to (subroot, template situation).
    pub situations: BTreeMap<Label, (Label, Label)>,
    /// Bounded mode only: `[lo, hi]` per boundary endnode.
    pub intervals: Option<BTreeMap<Label, (Profile, Profile)>>,
    system: StationarySystem,
}

/// Translates a template situation into the piece at `t`. Brace-set labels
/// such as `{2+3}` are translated member by member.
fn translate_situation(t: &str, j: &str) -> Label {
    if let Some(inner) = j.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
        let members: Vec<String> = if inner.is_empty() {
            vec![t.to_string()]
        } else {
            inner.split('+').map(|m| format!("{t}{m}")).collect()
        };
        format!("{{{}}}", members.join("+"))
    } else if t.is_empty() {
        j.to_string()
    } else {
        format!("{t}:{j}")
    }
}

/// All pieces whose subroot lies at most `d` exits below the root.
pub fn instantiate(sys: &StationarySystem, d: usize, mode: Mode) -> Result<Instantiation> {
    if d < 1 {
        return Err(Error::Domain("truncation depth must be at least 1".into()));
    }
    if mode == Mode::Bounded && sys.discount().is_none() {
        return Err(Error::Unsupported(
            "bounded instantiation needs a discounted utility model".into(),
        ));
    }
    let mut q = QuintupleSet::new();
    let mut node_origin: BTreeMap<Label, (Label, Label)> = BTreeMap::new();
    let mut situations: BTreeMap<Label, (Label, Label)> = BTreeMap::new();
    let mut subroots = BTreeMap::new();
    let mut finals = BTreeMap::new();
    let mut boundary = BTreeMap::new();

    let mut claim = |label: &Label, t: &str, local: &str| -> Result<()> {
        let origin = (t.to_string(), local.to_string());
        match node_origin.get(label) {
            Some(o) if *o != origin => Err(Error::Unsupported(format!(
                "node label {label:?} arises twice, from ({:?}, {:?}) and ({t:?}, {local:?})",
                o.0, o.1
            ))),
            _ => {
                node_origin.insert(label.clone(), origin);
                Ok(())
            }
        }
    };

    let start = SubrootInfo {
        class: sys.initial().clone(),
        path: Vec::new(),
        accrued: super::zero_profile(sys.stakeholders()),
    };
    let mut queue = VecDeque::from([(String::new(), start)]);
    while let Some((t, info)) = queue.pop_front() {
        let class = &sys.classes()[&info.class];
        let m = info.path.len();
        for x in class.template.quintuples() {
            let j = translate_situation(&t, &x.situation);
            match situations.get(&j) {
                Some((t0, j0))
                    if (t0.as_str(), j0.as_str()) != (t.as_str(), x.situation.as_str()) =>
                {
                    return Err(Error::Unsupported(format!(
                        "situation label {j:?} arises in two pieces"
                    )))
                }
                _ => {
                    situations.insert(j.clone(), (t.clone(), x.situation.clone()));
                }
            }
            let w = format!("{t}{}", x.decision_node);
            let y = format!("{t}{}", x.successor);
            if !x.decision_node.is_empty() {
                claim(&w, &t, &x.decision_node)?;
            }
            claim(&y, &t, &x.successor)?;
            q.insert(Quintuple::new(x.player.clone(), j, w, x.action.clone(), y));
        }
        let weight = sys.weight(m);
        for (y, exit) in &class.exits {
            let label = format!("{t}{y}");
            match exit {
                Exit::Terminal(r) => {
                    let u = match sys.discount() {
                        Some(_) => info.accrued.plus_scaled(&weight, r).expect("finite"),
                        None => r.clone(),
                    };
                    finals.insert(label, u);
                }
                Exit::Continue {
                    class: next,
                    reward,
                } => {
                    let accrued = match sys.discount() {
                        Some(_) => info.accrued.plus_scaled(&weight, reward).expect("finite"),
                        None => info.accrued.clone(),
                    };
                    let mut path = info.path.clone();
                    path.push(y.clone());
                    if m < d {
                        queue.push_back((
                            label,
                            SubrootInfo {
                                class: next.clone(),
                                path,
                                accrued,
                            },
                        ));
                    } else {
                        boundary.insert(
                            label,
                            BoundaryEntry {
                                class: next.clone(),
                                depth: m + 1,
                                accrued,
                            },
                        );
                    }
                }
            }
        }
        subroots.insert(t, info);
    }

    let form = crate::form::validate(q).map_err(Error::NotAPentaform)?;
    let intervals = match mode {
        Mode::Structural => None,
        Mode::Bounded => {
            let mut bounds = BTreeMap::new();
            for k in sys.stakeholders() {
                bounds.insert(k.clone(), class_bounds(sys, k)?);
            }
            let mut out = BTreeMap::new();
            for (y, b) in &boundary {
                let weight = sys.weight(b.depth);
                let side = |hi: bool| -> Profile {
                    sys.stakeholders()
                        .iter()
                        .map(|k| {
                            let (lo_c, hi_c) = &bounds[k][&b.class];
                            let x = if hi { hi_c } else { lo_c };
                            let v = b
                                .accrued
                                .at(k)
                                .checked_add(&x.scale(&weight))
                                .expect("finite");
                            (k.clone(), v)
                        })
                        .collect()
                };
                out.insert(y.clone(), (side(false), side(true)));
            }
            Some(out)
        }
    };

    Ok(Instantiation {
        form,
        depth: d,
        subroots,
        finals,
        boundary,
        situations,
        intervals,
        system: sys.clone(),
    })
}

impl Instantiation {
    /// The value an authentic-style continuation `h` assigns at a subroot or
    /// boundary endnode: `accrued + β^depth · h_class`.
    fn priced(&self, accrued: &Profile, depth: usize, h: &Profile) -> Profile {
        match self.system.discount() {
            Some(_) => accrued
                .plus_scaled(&self.system.weight(depth), h)
                .expect("finite"),
            None => h.clone(),
        }
    }

    fn lookup<'a>(h: &'a BTreeMap<ClassId, Profile>, c: &str) -> Result<&'a Profile> {
        h.get(c)
            .ok_or_else(|| Error::Domain(format!("no continuation profile for class {c:?}")))
    }

    /// The finite game whose boundary endnodes pay `accrued + β^depth · h_c`
    /// (or `h_c` for absolute-terminal systems).
    pub fn game_with_continuation(&self, h: &BTreeMap<ClassId, Profile>) -> Result<Game> {
        let mut utilities = self.finals.clone();
        for (y, b) in &self.boundary {
            let u = self.priced(&b.accrued, b.depth, Self::lookup(h, &b.class)?);
            utilities.insert(y.clone(), u);
        }
        Game::new(
            self.form.clone(),
            self.system.stakeholders().clone(),
            utilities,
        )
    }

    /// The value function `t ↦ accrued(t) + β^{|t|} · h_{class(t)}`.
    pub fn value_function(&self, h: &BTreeMap<ClassId, Profile>) -> Result<ValueFunction> {
        let mut values = BTreeMap::new();
        for (t, info) in &self.subroots {
            let v = self.priced(
                &info.accrued,
                info.path.len(),
                Self::lookup(h, &info.class)?,
            );
            values.insert(t.clone(), v);
        }
        Ok(ValueFunction::from_trusted(values))
    }

    /// The strategy that plays `σ_{class(t)}` in every piece `t`.
    pub fn induce(&self, sigma: &StationaryStrategy) -> Strategy {
        let choices: Choices = self
            .situations
            .iter()
            .map(|(j, (t, local))| {
                let c = &self.subroots[t].class;
                (j.clone(), sigma.for_class(c)[local].clone())
            })
            .collect();
        Strategy::from_trusted(choices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::partition::{piece_partition, subroots};
    use std::collections::BTreeSet;

    #[test]
    fn situation_translation() {
        assert_eq!(translate_situation("6", "{2+3}"), "{62+63}");
        assert_eq!(translate_situation("6", "{}"), "{6}");
        assert_eq!(translate_situation("", "{}"), "{}");
        assert_eq!(translate_situation("", "jE"), "jE");
        assert_eq!(translate_situation("ii", "jE"), "ii:jE");
    }

    #[test]
    fn cry_wolf_depth_one() {
        let inst = fixtures::cry_wolf_instantiation(1);
        assert_eq!(inst.form.quintuples().len(), 32);
        let t: BTreeSet<Label> = ["", "6", "7", "8"].iter().map(|s| s.to_string()).collect();
        assert_eq!(*subroots(&inst.form), t);
        assert_eq!(inst.subroots.keys().cloned().collect::<BTreeSet<_>>(), t);
    }

    #[test]
    fn cry_wolf_depth_two() {
        let inst = fixtures::cry_wolf_instantiation(2);
        assert_eq!(subroots(&inst.form).len(), 13);
        assert_eq!(inst.form.quintuples().len(), 13 * 8);
        assert_eq!(piece_partition(&inst.form).len(), 13);
    }

    #[test]
    fn zero_depth_is_rejected() {
        assert!(instantiate(&fixtures::cry_wolf_system(), 0, Mode::Structural).is_err());
    }

    #[test]
    fn bounded_mode() {
        let sys = fixtures::cry_wolf_system();
        let inst = instantiate(&sys, 1, Mode::Bounded).unwrap();
        let iv = inst.intervals.as_ref().unwrap();
        assert_eq!(iv.len(), inst.boundary.len());
        let (lo, hi) = &iv["66"];
        assert!(lo.at("Kid") <= hi.at("Kid"));
        assert!(instantiate(&fixtures::ann_system(), 1, Mode::Bounded).is_err());
    }

    #[test]
    fn colliding_labels_are_rejected() {
        assert!(matches!(
            instantiate(&fixtures::colliding_system(), 2, Mode::Structural),
            Err(Error::Unsupported(_))
        ));
    }
}
