use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use super::{Coord, Label, QuintupleSet};
use crate::error::{domain, Result};

/// A finite path in the out-tree, listed from its first node.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<Label>);

impl Path {
    pub fn nodes(&self) -> &[Label] {
        &self.0
    }

    pub fn first(&self) -> &Label {
        &self.0[0]
    }

    pub fn last(&self) -> &Label {
        self.0.last().expect("paths are nonempty")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &str) -> bool {
        self.0.iter().any(|n| n == x)
    }

    pub fn to_set(&self) -> BTreeSet<Label> {
        self.0.iter().cloned().collect()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if n.is_empty() {
                f.write_str("{}")?;
            } else {
                f.write_str(n)?;
            }
        }
        f.write_str("⟩")
    }
}

/// A finite run: a path from the root of some form to one of its endnodes.
///
/// The same type serves subform and piece runs, whose first node is a subroot.
pub type Run = Path;

/// Result of closing a node set under weak predecessors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunClosure {
    Run(Run),
    /// The closure is not a run; `closure` lists `R(N)` in tree order.
    NotARun {
        closure: Vec<Label>,
    },
}

/// A validated quintuple set together with its derived tree structure.
#[derive(Clone, Debug)]
pub struct Pentaform {
    q: QuintupleSet,
    players: BTreeSet<Label>,
    situations: BTreeSet<Label>,
    decision_nodes: BTreeSet<Label>,
    actions: BTreeSet<Label>,
    successors: BTreeSet<Label>,
    nodes: BTreeSet<Label>,
    root: Label,
    predecessor: BTreeMap<Label, Label>,
    incoming_action: BTreeMap<Label, Label>,
    situation_of: BTreeMap<Label, Label>,
    player_of: BTreeMap<Label, Label>,
    children: BTreeMap<Label, Vec<(Label, Label)>>,
    information_sets: BTreeMap<Label, BTreeSet<Label>>,
    action_sets: BTreeMap<Label, BTreeSet<Label>>,
    depth: BTreeMap<Label, usize>,
    pub(crate) subroot_cache: OnceLock<BTreeSet<Label>>,
    /// Decision node to the subroot of its piece.
    pub(crate) piece_cache: OnceLock<BTreeMap<Label, Label>>,
}

impl PartialEq for Pentaform {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for Pentaform {}

impl Pentaform {
    /// Builds the derived caches. The caller guarantees the axioms hold.
    pub(crate) fn build(q: QuintupleSet) -> Self {
        let players = q.project1(Coord::I);
        let situations = q.project1(Coord::J);
        let decision_nodes = q.project1(Coord::W);
        let actions = q.project1(Coord::A);
        let successors = q.project1(Coord::Y);
        let nodes: BTreeSet<Label> = decision_nodes.union(&successors).cloned().collect();
        let root = decision_nodes
            .difference(&successors)
            .next()
            .cloned()
            .expect("validated pentaform has a root");

        let mut predecessor = BTreeMap::new();
        let mut incoming_action = BTreeMap::new();
        let mut situation_of = BTreeMap::new();
        let mut player_of = BTreeMap::new();
        let mut children: BTreeMap<Label, Vec<(Label, Label)>> = BTreeMap::new();
        let mut information_sets: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
        let mut action_sets: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
        for x in &q {
            predecessor.insert(x.successor.clone(), x.decision_node.clone());
            incoming_action.insert(x.successor.clone(), x.action.clone());
            situation_of.insert(x.decision_node.clone(), x.situation.clone());
            player_of.insert(x.situation.clone(), x.player.clone());
            children
                .entry(x.decision_node.clone())
                .or_default()
                .push((x.action.clone(), x.successor.clone()));
            information_sets
                .entry(x.situation.clone())
                .or_default()
                .insert(x.decision_node.clone());
            action_sets
                .entry(x.situation.clone())
                .or_default()
                .insert(x.action.clone());
        }
        for kids in children.values_mut() {
            kids.sort();
        }

        let mut depth = BTreeMap::new();
        let mut queue = VecDeque::from([(root.clone(), 0usize)]);
        while let Some((x, d)) = queue.pop_front() {
            if let Some(kids) = children.get(&x) {
                for (_, y) in kids {
                    queue.push_back((y.clone(), d + 1));
                }
            }
            depth.insert(x, d);
        }

        Self {
            q,
            players,
            situations,
            decision_nodes,
            actions,
            successors,
            nodes,
            root,
            predecessor,
            incoming_action,
            situation_of,
            player_of,
            children,
            information_sets,
            action_sets,
            depth,
            subroot_cache: OnceLock::new(),
            piece_cache: OnceLock::new(),
        }
    }

    /// Builds a pentaform already known to be valid (a subform, say); revalidated
    /// in debug builds.
    pub(crate) fn from_trusted(q: QuintupleSet) -> Self {
        debug_assert!(
            super::axioms::check(&q).is_empty(),
            "trusted quintuple set violates axioms:\n{}",
            super::axioms::check(&q)
        );
        Self::build(q)
    }

    pub fn quintuples(&self) -> &QuintupleSet {
        &self.q
    }

    pub fn into_quintuples(self) -> QuintupleSet {
        self.q
    }

    pub fn players(&self) -> &BTreeSet<Label> {
        &self.players
    }

    pub fn situations(&self) -> &BTreeSet<Label> {
        &self.situations
    }

    pub fn decision_nodes(&self) -> &BTreeSet<Label> {
        &self.decision_nodes
    }

    pub fn actions(&self) -> &BTreeSet<Label> {
        &self.actions
    }

    pub fn successors(&self) -> &BTreeSet<Label> {
        &self.successors
    }

    pub fn nodes(&self) -> &BTreeSet<Label> {
        &self.nodes
    }

    /// Endnodes `Y \ W`.
    pub fn endnodes(&self) -> BTreeSet<Label> {
        self.successors
            .difference(&self.decision_nodes)
            .cloned()
            .collect()
    }

    pub fn root(&self) -> &Label {
        &self.root
    }

    pub fn is_node(&self, x: &str) -> bool {
        self.nodes.contains(x)
    }

    pub fn is_decision_node(&self, x: &str) -> bool {
        self.decision_nodes.contains(x)
    }

    pub fn is_endnode(&self, x: &str) -> bool {
        self.successors.contains(x) && !self.decision_nodes.contains(x)
    }

    pub fn predecessor(&self, y: &str) -> Result<&Label> {
        match self.predecessor.get(y) {
            Some(w) => Ok(w),
            None => domain(format!("{y:?} is not a successor node")),
        }
    }

    /// The action labelling the edge into `y`.
    pub fn incoming_action(&self, y: &str) -> Result<&Label> {
        match self.incoming_action.get(y) {
            Some(a) => Ok(a),
            None => domain(format!("{y:?} is not a successor node")),
        }
    }

    pub fn situation_of(&self, w: &str) -> Result<&Label> {
        match self.situation_of.get(w) {
            Some(j) => Ok(j),
            None => domain(format!("{w:?} is not a decision node")),
        }
    }

    pub fn player_of(&self, j: &str) -> Result<&Label> {
        match self.player_of.get(j) {
            Some(i) => Ok(i),
            None => domain(format!("{j:?} is not a situation")),
        }
    }

    /// `W_j`.
    pub fn information_set(&self, j: &str) -> Result<&BTreeSet<Label>> {
        match self.information_sets.get(j) {
            Some(ws) => Ok(ws),
            None => domain(format!("{j:?} is not a situation")),
        }
    }

    /// `A_j`.
    pub fn action_set(&self, j: &str) -> Result<&BTreeSet<Label>> {
        match self.action_sets.get(j) {
            Some(a) => Ok(a),
            None => domain(format!("{j:?} is not a situation")),
        }
    }

    /// Outgoing `(action, successor)` pairs of a node, sorted by action.
    /// Empty for endnodes.
    pub fn children(&self, x: &str) -> &[(Label, Label)] {
        self.children.get(x).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The next-node function `n(w, a)`.
    pub fn next_node(&self, w: &str, a: &str) -> Result<&Label> {
        self.children(w)
            .iter()
            .find(|(b, _)| b == a)
            .map(|(_, y)| y)
            .ok_or_else(|| crate::Error::Domain(format!("⟨{w:?}, {a:?}⟩ is not a feasible pair")))
    }

    /// Number of edges from the root.
    pub fn depth(&self, x: &str) -> Result<usize> {
        match self.depth.get(x) {
            Some(d) => Ok(*d),
            None => domain(format!("{x:?} is not a node")),
        }
    }

    fn require_node(&self, x: &str) -> Result<()> {
        if self.is_node(x) {
            Ok(())
        } else {
            domain(format!("{x:?} is not a node"))
        }
    }

    /// `R(x)`: the weak predecessors of `x`, root first.
    pub fn weak_predecessors(&self, x: &str) -> Result<Path> {
        self.require_node(x)?;
        let mut out = vec![x.to_string()];
        let mut cur = x;
        while let Some(w) = self.predecessor.get(cur) {
            out.push(w.clone());
            cur = w;
        }
        out.reverse();
        Ok(Path(out))
    }

    /// Weak (`x1 ⪯ x2`) or strict (`x1 ≺ x2`) precedence.
    pub fn precedes(&self, x1: &str, x2: &str, strict: bool) -> Result<bool> {
        self.require_node(x1)?;
        self.require_node(x2)?;
        if strict && x1 == x2 {
            return Ok(false);
        }
        let mut cur = x2;
        loop {
            if cur == x1 {
                return Ok(true);
            }
            match self.predecessor.get(cur) {
                Some(w) => cur = w,
                None => return Ok(false),
            }
        }
    }

    /// The path from `x0` to `x1`, if `x0 ⪯ x1`.
    pub fn path(&self, x0: &str, x1: &str) -> Result<Option<Path>> {
        let full = self.weak_predecessors(x1)?;
        self.require_node(x0)?;
        Ok(full
            .0
            .iter()
            .position(|n| n == x0)
            .map(|i| Path(full.0[i..].to_vec())))
    }

    /// `R(N) = ∪ R(x)`, classified as a finite run iff `max N` exists and is
    /// an endnode.
    pub fn run_closure<'a, I>(&self, n: I) -> Result<RunClosure>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let n: BTreeSet<&str> = n.into_iter().collect();
        if n.is_empty() {
            return domain("run closure of an empty node set");
        }
        for x in &n {
            self.require_node(x)?;
        }
        let max = n.iter().find(|&&m| {
            n.iter()
                .all(|x| self.precedes(x, m, false).expect("checked nodes"))
        });
        if let Some(m) = max {
            if self.is_endnode(m) {
                return Ok(RunClosure::Run(self.weak_predecessors(m)?));
            }
        }
        let mut closure: BTreeSet<Label> = BTreeSet::new();
        for x in &n {
            closure.extend(self.weak_predecessors(x)?.0);
        }
        let mut ordered: Vec<Label> = closure.into_iter().collect();
        ordered.sort_by_key(|x| (self.depth[x], x.clone()));
        Ok(RunClosure::NotARun { closure: ordered })
    }

    /// The run ending at endnode `y`.
    pub fn run_to(&self, y: &str) -> Result<Run> {
        if !self.is_endnode(y) {
            return domain(format!("{y:?} is not an endnode"));
        }
        self.weak_predecessors(y)
    }

    /// All runs, one per endnode, ordered by endnode label.
    pub fn runs(&self) -> Vec<Run> {
        self.endnodes()
            .iter()
            .map(|y| self.weak_predecessors(y).expect("endnode is a node"))
            .collect()
    }

    /// Endnodes weakly after `x`, in depth-first order.
    pub fn endnodes_below(&self, x: &str) -> Vec<Label> {
        let mut out = Vec::new();
        let mut stack = vec![x.to_string()];
        while let Some(n) = stack.pop() {
            let kids = self.children(&n);
            if kids.is_empty() {
                out.push(n);
            } else {
                stack.extend(kids.iter().rev().map(|(_, y)| y.clone()));
            }
        }
        out
    }

    /// Decision nodes weakly after `x`.
    pub fn decision_nodes_below(&self, x: &str) -> Vec<Label> {
        let mut out = Vec::new();
        let mut stack = vec![x.to_string()];
        while let Some(n) = stack.pop() {
            let kids = self.children(&n);
            if !kids.is_empty() {
                out.push(n);
                stack.extend(kids.iter().rev().map(|(_, y)| y.clone()));
            }
        }
        out
    }
}
