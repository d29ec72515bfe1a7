//! Brute-force reimplementations used as oracles. They read only the raw
//! quintuples and utilities, never the library's derived structure.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use pentaform::game::{Game, Profile, XReal};

pub struct Naive {
    kids: BTreeMap<String, Vec<(String, String)>>,
    situation: BTreeMap<String, String>,
    owner: BTreeMap<String, String>,
    actions: BTreeMap<String, BTreeSet<String>>,
    root: String,
    utilities: BTreeMap<String, Profile>,
}

impl Naive {
    pub fn new(g: &Game) -> Self {
        let mut kids: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
        let mut situation = BTreeMap::new();
        let mut owner = BTreeMap::new();
        let mut actions: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let mut succ = BTreeSet::new();
        for q in g.form().quintuples().iter() {
            kids.entry(q.decision_node.clone())
                .or_default()
                .push((q.action.clone(), q.successor.clone()));
            situation.insert(q.decision_node.clone(), q.situation.clone());
            owner.insert(q.situation.clone(), q.player.clone());
            actions
                .entry(q.situation.clone())
                .or_default()
                .insert(q.action.clone());
            succ.insert(q.successor.clone());
        }
        let roots: Vec<&String> = kids.keys().filter(|w| !succ.contains(*w)).collect();
        assert_eq!(roots.len(), 1, "a tree has one root");
        Naive {
            root: roots[0].clone(),
            kids,
            situation,
            owner,
            actions,
            utilities: g.utilities().clone(),
        }
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    /// The endnode reached from `x` when every situation plays `choices`.
    pub fn play(&self, x: &str, choices: &BTreeMap<String, String>) -> String {
        let mut x = x.to_string();
        while let Some(ks) = self.kids.get(&x) {
            let a = &choices[&self.situation[&x]];
            x = ks
                .iter()
                .find(|(b, _)| b == a)
                .expect("feasible action")
                .1
                .clone();
        }
        x
    }

    pub fn below(&self, x: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::from([x.to_string()]);
        let mut stack = vec![x.to_string()];
        while let Some(y) = stack.pop() {
            for (_, z) in self.kids.get(&y).into_iter().flatten() {
                out.insert(z.clone());
                stack.push(z.clone());
            }
        }
        out
    }

    /// Decision nodes whose followers share no situation with the rest.
    pub fn subroots(&self) -> BTreeSet<String> {
        self.kids
            .keys()
            .filter(|t| {
                let d = self.below(t);
                let inside: BTreeSet<&String> = self
                    .situation
                    .iter()
                    .filter(|(w, _)| d.contains(*w))
                    .map(|(_, j)| j)
                    .collect();
                self.situation
                    .iter()
                    .filter(|(w, _)| !d.contains(*w))
                    .all(|(_, j)| !inside.contains(j))
            })
            .cloned()
            .collect()
    }

    fn utility(&self, y: &str, k: &str) -> XReal {
        self.utilities[y].at(k).clone()
    }

    /// Every unilateral deviation of every player within the subgame at `t`.
    fn unimprovable_at(&self, t: &str, choices: &BTreeMap<String, String>) -> bool {
        let d = self.below(t);
        let here = self.play(t, choices);
        let owners: BTreeSet<&String> = self.owner.values().collect();
        for i in owners {
            let mine: Vec<&String> = self
                .situation
                .iter()
                .filter(|(w, j)| d.contains(*w) && self.owner[*j] == *i)
                .map(|(_, j)| j)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let now = self.utility(&here, i);
            let mut all = vec![choices.clone()];
            for j in mine {
                let mut next = Vec::new();
                for c in &all {
                    for a in &self.actions[j] {
                        let mut c = c.clone();
                        c.insert(j.clone(), a.clone());
                        next.push(c);
                    }
                }
                all = next;
            }
            if all.iter().any(|c| self.utility(&self.play(t, c), i) > now) {
                return false;
            }
        }
        true
    }

    pub fn is_nash(&self, choices: &BTreeMap<String, String>) -> bool {
        self.unimprovable_at(&self.root, choices)
    }

    pub fn is_spe(&self, choices: &BTreeMap<String, String>) -> bool {
        self.subroots()
            .iter()
            .all(|t| self.unimprovable_at(t, choices))
    }
}
