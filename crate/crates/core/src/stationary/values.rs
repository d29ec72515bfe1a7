use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_rational::BigRational;
use num_traits::One;

use super::{chosen_exit, rational, ClassId, Exit, StationaryStrategy, StationarySystem};
use crate::error::{Error, Result};
use crate::form::Label;
use crate::game::{Profile, XReal};

enum Tail<'a> {
    Terminal(&'a Profile),
    Known(Profile),
    Cycle(usize),
}

/// Values of the stationary plan that takes `pick[c]` in every class `c`.
pub(crate) fn evaluate(
    sys: &StationarySystem,
    pick: &BTreeMap<ClassId, &Exit>,
) -> Result<BTreeMap<ClassId, Profile>> {
    let mut out: BTreeMap<ClassId, Profile> = BTreeMap::new();
    for start in sys.classes().keys() {
        if out.contains_key(start) {
            continue;
        }
        let mut chain: Vec<ClassId> = Vec::new();
        let mut pos: BTreeMap<ClassId, usize> = BTreeMap::new();
        let mut cur = start.clone();
        let tail = loop {
            if let Some(v) = out.get(&cur) {
                break Tail::Known(v.clone());
            }
            if let Some(&p) = pos.get(&cur) {
                break Tail::Cycle(p);
            }
            pos.insert(cur.clone(), chain.len());
            chain.push(cur.clone());
            match pick[&cur] {
                Exit::Terminal(r) => break Tail::Terminal(r),
                Exit::Continue { class, .. } => cur = class.clone(),
            }
        };

        match sys.discount() {
            None => {
                let u = match tail {
                    Tail::Terminal(r) => r.clone(),
                    Tail::Known(v) => v,
                    Tail::Cycle(p) => sys
                        .cycle_utility(&chain[p..])
                        .ok_or_else(|| {
                            Error::MissingModel(format!(
                                "no infinite-run utility declared for cycle {:?}",
                                &chain[p..]
                            ))
                        })?
                        .clone(),
                };
                for c in chain {
                    out.insert(c, u.clone());
                }
            }
            Some(beta) => {
                let reward = |c: &ClassId| pick[c].reward();
                // value just after the last chain element's exit
                let (mut next, stop) = match tail {
                    Tail::Terminal(r) => {
                        let last = chain.last().expect("nonempty").clone();
                        out.insert(last, r.clone());
                        (r.clone(), chain.len() - 1)
                    }
                    Tail::Known(v) => {
                        let last = chain.last().expect("nonempty");
                        let w = reward(last).plus_scaled(beta, &v).expect("finite");
                        out.insert(last.clone(), w.clone());
                        (w, chain.len() - 1)
                    }
                    Tail::Cycle(p) => {
                        let cyc = &chain[p..];
                        let mut sum = super::zero_profile(sys.stakeholders());
                        let mut weight = BigRational::one();
                        for c in cyc {
                            sum = sum.plus_scaled(&weight, reward(c)).expect("finite");
                            weight *= beta;
                        }
                        let entry =
                            sum.scaled(&(BigRational::one() / (BigRational::one() - weight)));
                        out.insert(cyc[0].clone(), entry.clone());
                        // walk the cycle backwards from its entry
                        let mut w = entry.clone();
                        for c in cyc[1..].iter().rev() {
                            w = reward(c).plus_scaled(beta, &w).expect("finite");
                            out.insert(c.clone(), w.clone());
                        }
                        (entry, p)
                    }
                };
                for c in chain[..stop].iter().rev() {
                    next = reward(c).plus_scaled(beta, &next).expect("finite");
                    out.insert(c.clone(), next.clone());
                }
            }
        }
    }
    Ok(out)
}

/// `w_c`: the utility of obeying `σ` from a fresh piece of class `c`, net
/// of everything accrued before it and undiscounted by its depth.
pub fn continuation_values(
    sys: &StationarySystem,
    sigma: &StationaryStrategy,
) -> Result<BTreeMap<ClassId, Profile>> {
    let mut pick = BTreeMap::new();
    for c in sys.classes().keys() {
        pick.insert(c.clone(), chosen_exit(sys, c, sigma.for_class(c))?.1);
    }
    evaluate(sys, &pick)
}

/// A subroot label split into the exits that lead to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedSubroot {
    /// `(class left, exit label)` per step.
    pub steps: Vec<(ClassId, Label)>,
    pub class: ClassId,
}

impl ParsedSubroot {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    /// Discounted sum of the rewards collected on the way in; zero for
    /// absolute-terminal systems.
    pub fn accrued(&self, sys: &StationarySystem) -> Profile {
        let mut acc = super::zero_profile(sys.stakeholders());
        if let Some(beta) = sys.discount() {
            let mut weight = BigRational::one();
            for (c, y) in &self.steps {
                let r = sys.classes()[c].exits[y].reward();
                acc = acc.plus_scaled(&weight, r).expect("finite");
                weight *= beta;
            }
        }
        acc
    }
}

/// Splits `t` into continuation exits; fails unless exactly one split works.
pub fn parse_subroot(sys: &StationarySystem, t: &str) -> Result<ParsedSubroot> {
    fn go(
        sys: &StationarySystem,
        c: &ClassId,
        rest: &str,
        steps: &mut Vec<(ClassId, Label)>,
        found: &mut Vec<ParsedSubroot>,
    ) {
        if found.len() > 1 {
            return;
        }
        if rest.is_empty() {
            found.push(ParsedSubroot {
                steps: steps.clone(),
                class: c.clone(),
            });
            return;
        }
        for (y, exit) in &sys.classes()[c].exits {
            if let (Some(next), Some(tail)) = (exit.next_class(), rest.strip_prefix(y.as_str())) {
                steps.push((c.clone(), y.clone()));
                go(sys, next, tail, steps, found);
                steps.pop();
            }
        }
    }
    let mut found = Vec::new();
    go(sys, sys.initial(), t, &mut Vec::new(), &mut found);
    match found.len() {
        1 => Ok(found.pop().expect("one parse")),
        0 => Err(Error::Domain(format!("{t:?} is not a subroot label"))),
        _ => Err(Error::Domain(format!(
            "{t:?} splits into exits in more than one way"
        ))),
    }
}

/// The authentic value at subroot `t`: `accrued(t) + β^{|t|}·w_{class(t)}`.
pub fn value_at(sys: &StationarySystem, sigma: &StationaryStrategy, t: &str) -> Result<Profile> {
    let parsed = parse_subroot(sys, t)?;
    let w = continuation_values(sys, sigma)?;
    Ok(parsed
        .accrued(sys)
        .plus_scaled(&sys.weight(parsed.depth()), &w[&parsed.class])
        .expect("finite"))
}

fn successors(sys: &StationarySystem, c: &str) -> BTreeSet<ClassId> {
    sys.classes()[c]
        .exits
        .values()
        .filter_map(|e| e.next_class().cloned())
        .collect()
}

/// Classes reachable from `c` in one or more steps.
fn reach(sys: &StationarySystem, c: &str) -> BTreeSet<ClassId> {
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<ClassId> = successors(sys, c).into_iter().collect();
    while let Some(x) = queue.pop_front() {
        if seen.insert(x.clone()) {
            queue.extend(successors(sys, &x));
        }
    }
    seen
}

/// The simple cycles of the class graph, rotated to start at their smallest
/// class. Unsupported when some strongly connected component is not a single
/// cycle, since then infinite runs need not settle into one cycle.
pub fn class_cycles(sys: &StationarySystem) -> Result<Vec<Vec<ClassId>>> {
    let reach: BTreeMap<&ClassId, BTreeSet<ClassId>> =
        sys.classes().keys().map(|c| (c, reach(sys, c))).collect();
    let mut done = BTreeSet::new();
    let mut out = Vec::new();
    for c in sys.classes().keys() {
        if done.contains(c) || !reach[c].contains(c) {
            continue;
        }
        let scc: BTreeSet<ClassId> = reach[c]
            .iter()
            .filter(|x| reach[*x].contains(c))
            .cloned()
            .collect();
        let mut cycle = vec![c.clone()];
        for x in &scc {
            let inside: Vec<ClassId> = successors(sys, x)
                .into_iter()
                .filter(|y| scc.contains(y))
                .collect();
            if inside.len() != 1 {
                return Err(Error::Unsupported(format!(
                    "classes {scc:?} form a component that is not a single cycle"
                )));
            }
        }
        loop {
            let last = cycle.last().expect("nonempty");
            let next = successors(sys, last)
                .into_iter()
                .find(|y| scc.contains(y))
                .expect("checked above");
            if &next == c {
                break;
            }
            cycle.push(next);
        }
        done.extend(scc);
        out.push(cycle);
    }
    Ok(out)
}

fn optimize(sys: &StationarySystem, k: &str, maximize: bool) -> Result<BTreeMap<ClassId, XReal>> {
    let beta = sys.discount().expect("discounted");
    let mut pick: BTreeMap<ClassId, &Exit> = sys
        .classes()
        .iter()
        .map(|(c, cl)| {
            (
                c.clone(),
                cl.exits.values().next().expect("template has endnodes"),
            )
        })
        .collect();
    loop {
        let vals = evaluate(sys, &pick)?;
        let q = |e: &Exit| -> BigRational {
            match e {
                Exit::Terminal(r) => rational(r.at(k)).clone(),
                Exit::Continue { class, reward } => {
                    rational(reward.at(k)) + beta * rational(vals[class].at(k))
                }
            }
        };
        let better = |a: &BigRational, b: &BigRational| if maximize { a > b } else { a < b };
        let mut changed = false;
        for (c, cl) in sys.classes() {
            let mut best = q(pick[c]);
            for e in cl.exits.values() {
                let v = q(e);
                if better(&v, &best) {
                    best = v;
                    pick.insert(c.clone(), e);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(vals
                .into_iter()
                .map(|(c, p)| (c, p.at(k).clone()))
                .collect());
        }
    }
}

/// `[inf, sup]` of stakeholder `k`'s continuation utility over all runs
/// from a fresh piece, for every class.
pub fn class_bounds(sys: &StationarySystem, k: &str) -> Result<BTreeMap<ClassId, (XReal, XReal)>> {
    if !sys.stakeholders().contains(k) {
        return Err(Error::Domain(format!("{k:?} is not a stakeholder")));
    }
    if sys.discount().is_some() {
        let lo = optimize(sys, k, false)?;
        let hi = optimize(sys, k, true)?;
        return Ok(lo
            .into_iter()
            .map(|(c, l)| {
                let h = hi[&c].clone();
                (c, (l, h))
            })
            .collect());
    }
    let cycles = class_cycles(sys)?;
    let mut out = BTreeMap::new();
    for c in sys.classes().keys() {
        let mut within = reach(sys, c);
        within.insert(c.clone());
        let mut values: Vec<XReal> = Vec::new();
        for x in &within {
            for e in sys.classes()[x].exits.values() {
                if let Exit::Terminal(r) = e {
                    values.push(r.at(k).clone());
                }
            }
        }
        for cyc in cycles.iter().filter(|cyc| within.contains(&cyc[0])) {
            let u = sys.cycle_utility(cyc).ok_or_else(|| {
                Error::MissingModel(format!(
                    "no infinite-run utility declared for cycle {cyc:?}"
                ))
            })?;
            values.push(u.at(k).clone());
        }
        let lo = values.iter().min().expect("some run exists").clone();
        let hi = values.iter().max().expect("some run exists").clone();
        out.insert(c.clone(), (lo, hi));
    }
    Ok(out)
}

pub fn conceivable_bounds(sys: &StationarySystem, c: &str, k: &str) -> Result<(XReal, XReal)> {
    sys.class(c)?;
    Ok(class_bounds(sys, k)?.remove(c).expect("class exists"))
}
