//! Conceivable utilities and the upper-/lower-convergence checks.
//!
//! Finite games converge trivially. Discounted stationary systems converge
//! because the conceivable spread left after `d` pieces shrinks like `β^d`.
//! Absolute-terminal systems are decided exactly on the class graph: an
//! infinite run eventually loops through one simple cycle of classes, and the
//! conceivable bounds are the same at every subroot of that cycle, so the
//! limit gap is a constant that can be read off directly.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::form::Label;
use crate::game::{Game, XReal};
use crate::stationary::{class_bounds, class_cycles, ClassId, StationarySystem, UtilityModel};

pub const DEFAULT_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug)]
pub enum Subject<'a> {
    Game(&'a Game),
    System(&'a StationarySystem),
}

/// An infinite run over classes: `prefix` once, then `cycle` forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<ClassId>,
    pub cycle: Vec<ClassId>,
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.prefix {
            write!(f, "{c} ")?;
        }
        write!(f, "({})^ω", self.cycle.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConvergenceCertificate {
    /// Every run is finite.
    FiniteHorizon,
    /// After `depth` pieces at most `tail_bound` remains conceivable.
    Discounted {
        beta: BigRational,
        span: BigRational,
        depth: usize,
        tail_bound: BigRational,
    },
    /// No stakeholder has a gap on any of these cycles.
    NoGap { cycles: Vec<Vec<ClassId>> },
}

impl fmt::Display for ConvergenceCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FiniteHorizon => f.write_str("finite horizon"),
            Self::Discounted {
                beta,
                span,
                depth,
                tail_bound,
            } => write!(
                f,
                "discount {beta}, reward span {span}: increments after depth {depth} are at most {:.3e}",
                XReal::Finite(tail_bound.clone()).to_f64()
            ),
            Self::NoGap { cycles } => {
                write!(f, "no gap on ")?;
                if cycles.is_empty() {
                    return f.write_str("any cycle (there are none)");
                }
                let names: Vec<String> = cycles.iter().map(|c| format!("({})", c.join(" "))).collect();
                f.write_str(&names.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceWitness {
    pub lasso: Lasso,
    pub stakeholder: Label,
    /// Conceivable increment (or decrement) that never vanishes.
    pub gap: XReal,
}

impl fmt::Display for ConvergenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "run {}: {} keeps a gap of {}",
            self.lasso,
            self.stakeholder,
            self.gap.describe()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConvergenceVerdict {
    Holds(ConvergenceCertificate),
    Fails(ConvergenceWitness),
    Unknown(String),
}

impl ConvergenceVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, Self::Holds(_))
    }
}

impl fmt::Display for ConvergenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Holds(c) => write!(f, "HOLDS ({c})"),
            Self::Fails(w) => write!(f, "FAILS ({w})"),
            Self::Unknown(why) => write!(f, "UNKNOWN ({why})"),
        }
    }
}

fn conceivable(g: &Game, x: &str, k: &str, max: bool) -> Result<XReal> {
    let p = g.form();
    if !p.is_node(x) {
        return Err(Error::Domain(format!("{x:?} is not a node")));
    }
    if !g.stakeholders().contains(k) {
        return Err(Error::Domain(format!("{k:?} is not a stakeholder")));
    }
    let values = p
        .endnodes_below(x)
        .into_iter()
        .map(|y| g.utilities()[&y].at(k).clone());
    Ok(if max { values.max() } else { values.min() }.expect("an endnode lies below every node"))
}

/// Highest utility for `k` among runs through `x`.
pub fn sup_conceivable(g: &Game, x: &str, k: &str) -> Result<XReal> {
    conceivable(g, x, k, true)
}

/// Lowest utility for `k` among runs through `x`.
pub fn inf_conceivable(g: &Game, x: &str, k: &str) -> Result<XReal> {
    conceivable(g, x, k, false)
}

pub fn upper_convergent(subject: Subject<'_>, depth: usize) -> ConvergenceVerdict {
    check(subject, depth, true)
}

pub fn lower_convergent(subject: Subject<'_>, depth: usize) -> ConvergenceVerdict {
    check(subject, depth, false)
}

fn check(subject: Subject<'_>, depth: usize, upper: bool) -> ConvergenceVerdict {
    let sys = match subject {
        Subject::Game(_) => {
            return ConvergenceVerdict::Holds(ConvergenceCertificate::FiniteHorizon)
        }
        Subject::System(sys) => sys,
    };
    match sys.model() {
        UtilityModel::Discounted(beta) => discounted(sys, beta, depth),
        UtilityModel::AbsoluteTerminal(_) => match absolute(sys, upper) {
            Ok(v) => v,
            Err(e) => ConvergenceVerdict::Unknown(e.to_string()),
        },
    }
}

fn discounted(sys: &StationarySystem, beta: &BigRational, depth: usize) -> ConvergenceVerdict {
    let mut span = BigRational::zero();
    for k in sys.stakeholders() {
        let rewards: Vec<&BigRational> = sys
            .classes()
            .values()
            .flat_map(|c| c.exits.values())
            .map(|e| {
                e.reward()
                    .at(k)
                    .as_finite()
                    .expect("discounted rewards are finite")
            })
            .collect();
        let hi = rewards.iter().max().expect("templates have endnodes");
        let lo = rewards.iter().min().expect("templates have endnodes");
        let s = *hi - *lo;
        if s > span {
            span = s;
        }
    }
    let tail_bound = num_traits::pow(beta.clone(), depth) * &span / (BigRational::one() - beta);
    ConvergenceVerdict::Holds(ConvergenceCertificate::Discounted {
        beta: beta.clone(),
        span,
        depth,
        tail_bound,
    })
}

fn absolute(sys: &StationarySystem, upper: bool) -> Result<ConvergenceVerdict> {
    let cycles = class_cycles(sys)?;
    for k in sys.stakeholders() {
        let bounds = class_bounds(sys, k)?;
        for cycle in &cycles {
            let u = sys
                .cycle_utility(cycle)
                .ok_or_else(|| Error::MissingModel(format!("cycle {cycle:?} has no utility")))?
                .at(k);
            let (lo, hi) = &bounds[&cycle[0]];
            let gap = if upper {
                hi.checked_add(&u.neg())
            } else {
                u.checked_add(&lo.neg())
            };
            // an infinite bound facing an equal infinity leaves no gap
            let gap = gap.unwrap_or(XReal::zero());
            if gap > XReal::zero() {
                let mut prefix = sys.path_to(&cycle[0]);
                prefix.pop();
                return Ok(ConvergenceVerdict::Fails(ConvergenceWitness {
                    lasso: Lasso {
                        prefix,
                        cycle: cycle.clone(),
                    },
                    stakeholder: k.clone(),
                    gap,
                }));
            }
        }
    }
    Ok(ConvergenceVerdict::Holds(ConvergenceCertificate::NoGap {
        cycles,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn gap(v: &ConvergenceVerdict) -> XReal {
        match v {
            ConvergenceVerdict::Fails(w) => w.gap.clone(),
            other => panic!("expected failure, got {other}"),
        }
    }

    #[test]
    fn chain_verdicts() {
        let ann = fixtures::ann_system();
        assert_eq!(
            gap(&upper_convergent(Subject::System(&ann), DEFAULT_DEPTH)),
            XReal::int(1)
        );
        assert!(lower_convergent(Subject::System(&ann), DEFAULT_DEPTH).holds());
        let bob = fixtures::bob_system();
        assert!(upper_convergent(Subject::System(&bob), DEFAULT_DEPTH).holds());
        assert_eq!(
            gap(&lower_convergent(Subject::System(&bob), DEFAULT_DEPTH)),
            XReal::int(1)
        );
        let eda = fixtures::eda_system();
        assert_eq!(
            gap(&upper_convergent(Subject::System(&eda), DEFAULT_DEPTH)),
            XReal::int(1)
        );
        assert_eq!(
            gap(&lower_convergent(Subject::System(&eda), DEFAULT_DEPTH)),
            XReal::int(1)
        );
    }

    #[test]
    fn cry_wolf_holds_by_discount() {
        let sys = fixtures::cry_wolf_system();
        for v in [
            upper_convergent(Subject::System(&sys), 10),
            lower_convergent(Subject::System(&sys), 10),
        ] {
            let ConvergenceVerdict::Holds(ConvergenceCertificate::Discounted {
                tail_bound, ..
            }) = v
            else {
                panic!("expected a discount certificate");
            };
            assert!(tail_bound < BigRational::new(1.into(), 1_000_000_000.into()));
        }
    }

    #[test]
    fn conceivable_in_entry_deterrence() {
        let g = fixtures::entry_deterrence_game();
        assert_eq!(sup_conceivable(&g, "5", "Ent").unwrap(), XReal::int(0));
        assert_eq!(inf_conceivable(&g, "5", "Ent").unwrap(), XReal::int(-1));
        assert_eq!(sup_conceivable(&g, "8", "Inc").unwrap(), XReal::int(3));
        assert_eq!(inf_conceivable(&g, "8", "Inc").unwrap(), XReal::int(3));
        assert!(sup_conceivable(&g, "99", "Inc").is_err());
        assert!(upper_convergent(Subject::Game(&g), 1).holds());
    }

    #[test]
    fn lasso_prefix_for_eda() {
        let eda = fixtures::eda_system();
        let ConvergenceVerdict::Fails(w) = upper_convergent(Subject::System(&eda), DEFAULT_DEPTH)
        else {
            unreachable!()
        };
        assert_eq!(w.lasso.cycle, vec!["even".to_string(), "odd".to_string()]);
        assert_eq!(w.lasso.prefix, vec!["odd".to_string()]);
        assert_eq!(w.stakeholder, "Eda");
    }
}
