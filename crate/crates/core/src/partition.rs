//! Selten subroots, subforms and piece forms.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{domain, Error, Result};
use crate::form::{Label, Path, Pentaform, Run};

/// The subroot set `T`, always containing the root.
pub fn subroots(p: &Pentaform) -> &BTreeSet<Label> {
    p.subroot_cache.get_or_init(|| compute_subroots(p))
}

fn compute_subroots(p: &Pentaform) -> BTreeSet<Label> {
    let mut out = BTreeSet::new();
    for w in p.decision_nodes() {
        let below: BTreeSet<Label> = p.decision_nodes_below(w).into_iter().collect();
        // every situation met below w must have its whole information set below w
        let situations: BTreeSet<&Label> = below
            .iter()
            .map(|x| p.situation_of(x).expect("decision node"))
            .collect();
        let enclosed = situations.iter().all(|j| {
            p.information_set(j)
                .expect("situation")
                .iter()
                .all(|x| below.contains(x))
        });
        if enclosed {
            out.insert(w.clone());
        }
    }
    out
}

pub fn is_subroot(p: &Pentaform, t: &str) -> bool {
    subroots(p).contains(t)
}

fn require_subroot(p: &Pentaform, t: &str) -> Result<()> {
    if is_subroot(p, t) {
        Ok(())
    } else {
        domain(format!("{t:?} is not a subroot"))
    }
}

/// Maps each decision node to the subroot of the piece containing it.
pub fn piece_of_node(p: &Pentaform) -> &BTreeMap<Label, Label> {
    p.piece_cache.get_or_init(|| {
        let t_set = subroots(p);
        let mut out = BTreeMap::new();
        let mut stack = vec![(p.root().clone(), p.root().clone())];
        while let Some((x, current)) = stack.pop() {
            if !p.is_decision_node(&x) {
                continue;
            }
            let t = if t_set.contains(&x) {
                x.clone()
            } else {
                current
            };
            for (_, y) in p.children(&x) {
                stack.push((y.clone(), t.clone()));
            }
            out.insert(x, t);
        }
        out
    })
}

/// The subform `ᵗQ` of quintuples weakly after subroot `t`.
pub fn subform(p: &Pentaform, t: &str) -> Result<Pentaform> {
    require_subroot(p, t)?;
    let below: BTreeSet<Label> = p.decision_nodes_below(t).into_iter().collect();
    let q = p.quintuples().filter(|x| below.contains(&x.decision_node));
    Ok(Pentaform::from_trusted(q))
}

/// The piece form `Qᵗ`.
pub fn piece_form(p: &Pentaform, t: &str) -> Result<Pentaform> {
    require_subroot(p, t)?;
    let owner = piece_of_node(p);
    let q = p.quintuples().filter(|x| owner[&x.decision_node] == t);
    Ok(Pentaform::from_trusted(q))
}

/// The pieces of a pentaform, keyed by subroot.
#[derive(Clone, Debug)]
pub struct PiecePartition {
    order: Vec<Label>,
    pieces: BTreeMap<Label, Pentaform>,
}

impl PiecePartition {
    /// Subroots sorted by (depth, label).
    pub fn subroots(&self) -> &[Label] {
        &self.order
    }

    /// Subroots deepest first, the order backward induction needs.
    pub fn deepest_first(&self) -> impl Iterator<Item = &Label> {
        self.order.iter().rev()
    }

    pub fn piece(&self, t: &str) -> Option<&Pentaform> {
        self.pieces.get(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Pentaform)> {
        self.order.iter().map(|t| (t, &self.pieces[t]))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

pub fn piece_partition(p: &Pentaform) -> PiecePartition {
    let mut order: Vec<Label> = subroots(p).iter().cloned().collect();
    order.sort_by_key(|t| (p.depth(t).expect("node"), t.clone()));
    let pieces = order
        .iter()
        .map(|t| (t.clone(), piece_form(p, t).expect("subroot")))
        .collect();
    PiecePartition { order, pieces }
}

/// Piece endnodes `Yᵗ \ Wᵗ` of one piece, split by kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceEndnodes {
    pub subroot_exits: BTreeSet<Label>,
    pub final_endnodes: BTreeSet<Label>,
}

impl PieceEndnodes {
    pub fn all(&self) -> BTreeSet<Label> {
        self.subroot_exits
            .union(&self.final_endnodes)
            .cloned()
            .collect()
    }
}

/// The partition `{{r}} ∪ {Yᵗ \ Wᵗ ≠ ∅}` of `T ∪ (Y \ W)`.
#[derive(Clone, Debug)]
pub struct EndnodeReport {
    pub root: Label,
    pub pieces: BTreeMap<Label, PieceEndnodes>,
}

impl EndnodeReport {
    /// The nonempty blocks, root block first.
    pub fn blocks(&self) -> Vec<BTreeSet<Label>> {
        let mut out = vec![BTreeSet::from([self.root.clone()])];
        out.extend(
            self.pieces
                .values()
                .map(PieceEndnodes::all)
                .filter(|b| !b.is_empty()),
        );
        out
    }
}

pub fn classify_piece_endnodes(p: &Pentaform) -> Result<EndnodeReport> {
    let t_set = subroots(p);
    let mut pieces = BTreeMap::new();
    for (t, piece) in piece_partition(p).iter() {
        let mut e = PieceEndnodes {
            subroot_exits: BTreeSet::new(),
            final_endnodes: BTreeSet::new(),
        };
        for y in piece.endnodes() {
            if t_set.contains(&y) {
                e.subroot_exits.insert(y);
            } else if p.is_endnode(&y) {
                e.final_endnodes.insert(y);
            } else {
                return Err(Error::Internal(format!(
                    "piece {t:?} ends at {y:?}, neither a subroot nor a final endnode"
                )));
            }
        }
        pieces.insert(t.clone(), e);
    }
    let report = EndnodeReport {
        root: p.root().clone(),
        pieces,
    };

    let target: BTreeSet<Label> = t_set.iter().cloned().chain(p.endnodes()).collect();
    let mut seen = BTreeSet::new();
    for block in report.blocks() {
        for x in block {
            if !seen.insert(x.clone()) {
                return Err(Error::Internal(format!("{x:?} lies in two endnode blocks")));
            }
        }
    }
    if seen != target {
        return Err(Error::Internal(
            "endnode blocks do not cover subroots and final endnodes".into(),
        ));
    }
    Ok(report)
}

/// How a run of a piece form ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PieceRunClass {
    /// Ends at a later subroot; `closure` is the incomplete full path `R(N)`.
    ExitToSubroot { subroot: Label, closure: Path },
    /// Ends at a final endnode; carries the completed full run.
    FinalEndnode(Run),
    /// Only arises in generated infinite games.
    InfinitePiece,
}

pub fn classify_piece_run(p: &Pentaform, t: &str, n: &Run) -> Result<PieceRunClass> {
    let piece = piece_form(p, t)?;
    let is_run = !n.is_empty()
        && n.first() == t
        && n.nodes().windows(2).all(|e| {
            piece
                .predecessor(&e[1])
                .map(|w| w == &e[0])
                .unwrap_or(false)
        })
        && piece.is_endnode(n.last());
    if !is_run {
        return domain(format!("{n} is not a run of the piece at {t:?}"));
    }
    let last = n.last();
    if is_subroot(p, last) {
        Ok(PieceRunClass::ExitToSubroot {
            subroot: last.clone(),
            closure: p.weak_predecessors(last)?,
        })
    } else {
        Ok(PieceRunClass::FinalEndnode(p.run_to(last)?))
    }
}
