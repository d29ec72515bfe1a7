use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;

use super::{
    chosen_exit, class_bounds, continuation_values, values::evaluate, ClassId, Exit,
    StationaryStrategy, StationarySystem,
};
use crate::convergence::{
    lower_convergent, upper_convergent, ConvergenceVerdict, Subject, DEFAULT_DEPTH,
};
use crate::error::{Error, Result};
use crate::form::Label;
use crate::game::{
    first_nash_profile, nash_check, Game, Profile, Verdict, Witness, DEFAULT_PROFILE_CAP,
};
use crate::strategy::{outcome, Choices};

type ClassProfiles = BTreeMap<ClassId, Profile>;

fn profile_for<'a>(h: &'a ClassProfiles, c: &str) -> Result<&'a Profile> {
    h.get(c)
        .ok_or_else(|| Error::Domain(format!("no profile given for class {c:?}")))
}

/// The piece game of class `c` whose continuation exits pay `r + β·h_next`
/// (or `h_next` for absolute-terminal systems).
pub fn quotient_game(sys: &StationarySystem, c: &str, h: &ClassProfiles) -> Result<Game> {
    let class = sys.class(c)?;
    let mut utilities = BTreeMap::new();
    for (y, exit) in &class.exits {
        let u = exit_value(sys, exit, h)?;
        utilities.insert(y.clone(), u);
    }
    Game::new(
        class.template.clone(),
        sys.stakeholders().clone(),
        utilities,
    )
}

fn exit_value(sys: &StationarySystem, exit: &Exit, h: &ClassProfiles) -> Result<Profile> {
    Ok(match exit {
        Exit::Terminal(r) => r.clone(),
        Exit::Continue { class, reward } => {
            let next = profile_for(h, class)?;
            match sys.discount() {
                Some(beta) => reward.plus_scaled(beta, next).expect("finite"),
                None => next.clone(),
            }
        }
    })
}

fn relabel(w: Witness, c: &str) -> Witness {
    match w {
        Witness::Deviation {
            player,
            deviation,
            current,
            improved,
            ..
        } => Witness::Deviation {
            at: c.to_string(),
            player,
            deviation,
            current,
            improved,
        },
        other => other,
    }
}

/// The value function `t ↦ accrued(t) + β^{|t|}·h_{class(t)}` lies between
/// the conceivable bounds at every subroot.
pub fn admissible(sys: &StationarySystem, h: &ClassProfiles) -> Result<Verdict> {
    for k in sys.stakeholders() {
        let bounds = class_bounds(sys, k)?;
        for (c, (lo, hi)) in &bounds {
            let x = profile_for(h, c)?.at(k);
            if x < lo || x > hi {
                return Ok(Verdict::fails(Witness::Inadmissible {
                    at: c.clone(),
                    stakeholder: k.clone(),
                    value: x.clone(),
                    inf: lo.clone(),
                    sup: hi.clone(),
                }));
            }
        }
    }
    Ok(Verdict::holds())
}

/// Each class value equals what its `σ`-exit leads to.
pub fn persistent(
    sys: &StationarySystem,
    sigma: &StationaryStrategy,
    h: &ClassProfiles,
) -> Result<Verdict> {
    for c in sys.classes().keys() {
        let (_, exit) = chosen_exit(sys, c, sigma.for_class(c))?;
        let expected = exit_value(sys, exit, h)?;
        let value = profile_for(h, c)?;
        if *value != expected {
            return Ok(Verdict::fails(Witness::ValueMismatch {
                at: c.clone(),
                value: value.clone(),
                expected,
            }));
        }
    }
    Ok(Verdict::holds())
}

/// Each class value equals the utility of obeying `σ` from a fresh piece.
pub fn authentic(
    sys: &StationarySystem,
    sigma: &StationaryStrategy,
    h: &ClassProfiles,
) -> Result<Verdict> {
    let truth = continuation_values(sys, sigma)?;
    for (c, expected) in &truth {
        let value = profile_for(h, c)?;
        if value != expected {
            return Ok(Verdict::fails(Witness::ValueMismatch {
                at: c.clone(),
                value: value.clone(),
                expected: expected.clone(),
            }));
        }
    }
    Ok(Verdict::holds())
}

/// `σ_c` is a Nash equilibrium of every quotient piece game.
pub fn piecewise_nash(
    sys: &StationarySystem,
    sigma: &StationaryStrategy,
    h: &ClassProfiles,
) -> Result<Verdict> {
    for c in sys.classes().keys() {
        let g = quotient_game(sys, c, h)?;
        let s = crate::strategy::Strategy::from_trusted(sigma.for_class(c).clone());
        let v = nash_check(&g, &s)?;
        if !v.holds {
            return Ok(Verdict::fails(relabel(
                v.witness.expect("failing verdict"),
                c,
            )));
        }
    }
    Ok(Verdict::holds())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeviationScan {
    /// Every stationary unilateral deviation was evaluated; none gains.
    Clean {
        deviations: u128,
    },
    Found(Witness),
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    SPECertified,
    Refuted { property: String, witness: Witness },
    Inconclusive(String),
}

impl fmt::Display for DeviationScan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Clean { deviations } => {
                write!(f, "clean ({deviations} stationary deviations tried)")
            }
            Self::Found(w) => write!(f, "profitable deviation: {w}"),
            Self::Skipped(why) => write!(f, "skipped: {why}"),
        }
    }
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SPECertified => f.write_str("SPECertified"),
            Self::Refuted { property, witness } => write!(f, "Refuted ({property}): {witness}"),
            Self::Inconclusive(why) => write!(f, "Inconclusive: {why}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub upper: ConvergenceVerdict,
    pub lower: ConvergenceVerdict,
    /// Continuation values of the strategy, per class.
    pub values: ClassProfiles,
    pub deviation_scan: DeviationScan,
}

/// Odometer step over `slots`, last slot fastest. False once it wraps.
fn advance(digits: &mut [usize], slots: &[(ClassId, Label, Vec<Label>)]) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < slots[k].2.len() {
            return true;
        }
        digits[k] = 0;
    }
    false
}

/// Tries every stationary strategy of each single player against `σ`.
fn scan_deviations(
    sys: &StationarySystem,
    sigma: &StationaryStrategy,
    w: &ClassProfiles,
    cap: u128,
) -> Result<DeviationScan> {
    let mut total = 0u128;
    for i in sys.players() {
        // (class, situation, actions) owned by i
        let mut slots: Vec<(ClassId, Label, Vec<Label>)> = Vec::new();
        for (c, class) in sys.classes() {
            let t = &class.template;
            for j in t.situations() {
                if t.player_of(j)? == &i {
                    slots.push((
                        c.clone(),
                        j.clone(),
                        t.action_set(j)?.iter().cloned().collect(),
                    ));
                }
            }
        }
        let needed = slots
            .iter()
            .try_fold(1u128, |n, s| n.checked_mul(s.2.len() as u128))
            .unwrap_or(u128::MAX);
        if needed > cap {
            return Ok(DeviationScan::Skipped(format!(
                "{i} has {needed} stationary strategies, more than {cap}"
            )));
        }
        total += needed;
        let mut digits = vec![0usize; slots.len()];
        loop {
            let mut choices = sigma.choices().clone();
            for ((c, j, acts), &d) in slots.iter().zip(&digits) {
                choices
                    .get_mut(c)
                    .expect("class")
                    .insert(j.clone(), acts[d].clone());
            }
            let mut pick = BTreeMap::new();
            for c in sys.classes().keys() {
                pick.insert(c.clone(), chosen_exit(sys, c, &choices[c])?.1);
            }
            match evaluate(sys, &pick) {
                Ok(dev) => {
                    for (c, v) in &dev {
                        let now = w[c].at(&i);
                        if v.at(&i) > now {
                            let deviation: Choices = slots
                                .iter()
                                .zip(&digits)
                                .map(|((c, j, acts), &d)| (format!("{c}:{j}"), acts[d].clone()))
                                .collect();
                            return Ok(DeviationScan::Found(Witness::Deviation {
                                at: c.clone(),
                                player: i.clone(),
                                deviation,
                                current: now.clone(),
                                improved: v.at(&i).clone(),
                            }));
                        }
                    }
                }
                // runs without a declared utility are not comparable
                Err(Error::MissingModel(_)) => {}
                Err(e) => return Err(e),
            }
            if !advance(&mut digits, &slots) {
                break;
            }
        }
    }
    Ok(DeviationScan::Clean { deviations: total })
}

/// Certifies subgame perfection of a stationary strategy.
///
/// The authentic stationary value is persistent and admissible by
/// construction. With piecewise-Nash on every quotient piece game and
/// lower-convergence, the strategy is a subgame-perfect equilibrium. A
/// profitable stationary deviation refutes it outright.
pub fn certify_spe(sys: &StationarySystem, sigma: &StationaryStrategy) -> Result<Certificate> {
    let values = continuation_values(sys, sigma)?;
    let upper = upper_convergent(Subject::System(sys), DEFAULT_DEPTH);
    let lower = lower_convergent(Subject::System(sys), DEFAULT_DEPTH);
    let deviation_scan = scan_deviations(sys, sigma, &values, DEFAULT_PROFILE_CAP)?;
    let pn = piecewise_nash(sys, sigma, &values)?;

    let kind = if !pn.holds {
        CertificateKind::Refuted {
            property: "piecewise-Nash".into(),
            witness: pn.witness.expect("failing verdict"),
        }
    } else if let DeviationScan::Found(w) = &deviation_scan {
        if matches!(lower, ConvergenceVerdict::Holds(_)) {
            return Err(Error::Internal(format!(
                "certified strategy admits a profitable deviation: {w}"
            )));
        }
        CertificateKind::Refuted {
            property: "subgame perfection".into(),
            witness: w.clone(),
        }
    } else {
        match &lower {
            ConvergenceVerdict::Holds(_) => CertificateKind::SPECertified,
            ConvergenceVerdict::Fails(w) => CertificateKind::Inconclusive(format!(
                "lower-convergence fails ({w}); no profitable stationary deviation found"
            )),
            ConvergenceVerdict::Unknown(why) => {
                CertificateKind::Inconclusive(format!("lower-convergence unknown: {why}"))
            }
        }
    };
    Ok(Certificate {
        kind,
        upper,
        lower,
        values,
        deviation_scan,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StationarySolution {
    Solved {
        strategy: StationaryStrategy,
        values: ClassProfiles,
    },
    /// The quotient piece game of this class has no pure equilibrium.
    Failure(ClassId),
    NoConvergence {
        iterations: usize,
    },
}

const MAX_ITERATIONS: usize = 200;

fn sup_distance(a: &ClassProfiles, b: &ClassProfiles) -> BigRational {
    let mut d = BigRational::from_integer(0.into());
    for (c, p) in a {
        for (k, x) in p.iter() {
            let diff = (super::rational(x) - super::rational(b[c].at(k))).abs();
            if diff > d {
                d = diff;
            }
        }
    }
    d
}

/// Per-class choices and their payoffs, or the class with no pure equilibrium.
type Sweep = std::result::Result<(BTreeMap<ClassId, Choices>, ClassProfiles), ClassId>;

/// One value-iteration sweep: the first pure equilibrium of each quotient
/// piece game under `h`, and its payoff.
fn sweep(sys: &StationarySystem, h: &ClassProfiles) -> Result<Sweep> {
    let mut choices = BTreeMap::new();
    let mut next = BTreeMap::new();
    for c in sys.classes().keys() {
        let g = quotient_game(sys, c, h)?;
        let Some(s) = first_nash_profile(&g, DEFAULT_PROFILE_CAP)? else {
            return Ok(Err(c.clone()));
        };
        let z = outcome(g.form(), &s);
        next.insert(c.clone(), g.utility_at(z.last())?.clone());
        choices.insert(c.clone(), s.into_choices());
    }
    Ok(Ok((choices, next)))
}

/// Value iteration over class profiles starting from zero.
pub fn solve_stationary(sys: &StationarySystem) -> Result<StationarySolution> {
    if sys.discount().is_none() {
        return Err(Error::Unsupported(
            "stationary solving needs a discounted utility model".into(),
        ));
    }
    let tol = BigRational::new(1.into(), num_bigint::BigInt::from(10u8).pow(12));
    let mut h: ClassProfiles = sys
        .classes()
        .keys()
        .map(|c| (c.clone(), super::zero_profile(sys.stakeholders())))
        .collect();
    let mut previous: Option<BTreeMap<ClassId, Choices>> = None;
    for _ in 0..MAX_ITERATIONS {
        let (choices, next) = match sweep(sys, &h)? {
            Ok(x) => x,
            Err(c) => return Ok(StationarySolution::Failure(c)),
        };
        let settled = previous.as_ref() == Some(&choices) && sup_distance(&next, &h) < tol;
        previous = Some(choices.clone());
        h = next;
        if !settled {
            continue;
        }
        // polish: exact values of the settled strategy, then confirm
        let sigma = StationaryStrategy::from_trusted(choices.clone());
        let exact = continuation_values(sys, &sigma)?;
        match sweep(sys, &exact)? {
            Err(c) => return Ok(StationarySolution::Failure(c)),
            Ok((again, _)) if again == choices => {
                if !piecewise_nash(sys, &sigma, &exact)?.holds {
                    return Err(Error::Internal(
                        "solved strategy is not piecewise-Nash".into(),
                    ));
                }
                return Ok(StationarySolution::Solved {
                    strategy: sigma,
                    values: exact,
                });
            }
            Ok((again, _)) => {
                previous = Some(again);
                h = exact;
            }
        }
    }
    Ok(StationarySolution::NoConvergence {
        iterations: MAX_ITERATIONS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::XReal;

    fn constant(sys: &StationarySystem, x: XReal) -> ClassProfiles {
        sys.classes()
            .keys()
            .map(|c| (c.clone(), Profile::constant(sys.stakeholders(), x.clone())))
            .collect()
    }

    #[test]
    fn cry_wolf_is_certified() {
        let sys = fixtures::cry_wolf_system();
        let sigma = fixtures::cry_wolf_quiet(&sys);
        let cert = certify_spe(&sys, &sigma).unwrap();
        assert_eq!(cert.kind, CertificateKind::SPECertified);
        assert_eq!(cert.values["day"], fixtures::wkt((5, 9), (2, 9), (4, 9)));
        assert!(matches!(cert.upper, ConvergenceVerdict::Holds(_)));
        assert!(matches!(cert.deviation_scan, DeviationScan::Clean { .. }));
    }

    #[test]
    fn bob_always_out_is_refuted() {
        let sys = fixtures::bob_system();
        let sigma = fixtures::always(&sys, "out");
        let cert = certify_spe(&sys, &sigma).unwrap();
        let CertificateKind::Refuted { property, witness } = cert.kind else {
            panic!("expected a refutation, got {:?}", cert.kind);
        };
        assert_eq!(property, "subgame perfection");
        let Witness::Deviation {
            current, improved, ..
        } = witness
        else {
            panic!("deviation witness expected");
        };
        assert_eq!(current, XReal::int(-1));
        assert_eq!(improved, XReal::int(0));
        assert!(matches!(cert.lower, ConvergenceVerdict::Fails(_)));
        // piecewise-Nash holds with the authentic value
        assert!(piecewise_nash(&sys, &sigma, &cert.values).unwrap().holds);
    }

    #[test]
    fn single_action_system_is_certified() {
        let sys = fixtures::single_action_system();
        let sigma = fixtures::always(&sys, "go");
        assert_eq!(
            certify_spe(&sys, &sigma).unwrap().kind,
            CertificateKind::SPECertified
        );
    }

    #[test]
    fn ann_value_checks() {
        let sys = fixtures::ann_system();
        let sigma = fixtures::always(&sys, "in");
        for alpha in [XReal::ratio(3, 10), XReal::int(1)] {
            let h = constant(&sys, alpha);
            assert!(admissible(&sys, &h).unwrap().holds);
            assert!(persistent(&sys, &sigma, &h).unwrap().holds);
            let v = authentic(&sys, &sigma, &h).unwrap();
            let Some(Witness::ValueMismatch { expected, .. }) = v.witness else {
                panic!("authenticity must fail");
            };
            assert_eq!(expected, fixtures::solo("Ann", 0));
        }
        let h = constant(&sys, XReal::int(2));
        assert!(!admissible(&sys, &h).unwrap().holds);
    }

    #[test]
    fn quotient_prices_exits() {
        let sys = fixtures::cry_wolf_system();
        let h = BTreeMap::from([("day".to_string(), fixtures::wkt((5, 9), (2, 9), (4, 9)))]);
        let g = quotient_game(&sys, "day", &h).unwrap();
        assert_eq!(
            g.utility_at("6").unwrap(),
            &fixtures::wkt((5, 9), (19, 45), (11, 45))
        );
        assert_eq!(
            g.utility_at("5").unwrap(),
            &fixtures::wkt((5, 9), (0, 1), (0, 1))
        );
    }

    #[test]
    fn solver_on_cry_wolf() {
        let sys = fixtures::cry_wolf_system();
        let StationarySolution::Solved { strategy, values } = solve_stationary(&sys).unwrap()
        else {
            panic!("cry-wolf is solvable");
        };
        assert_eq!(strategy.for_class("day")["{2+3}"], "~r");
        assert_eq!(values, continuation_values(&sys, &strategy).unwrap());
        assert_eq!(
            certify_spe(&sys, &strategy).unwrap().kind,
            CertificateKind::SPECertified
        );
    }

    #[test]
    fn solver_reports_matching_pennies() {
        let sys = fixtures::pennies_system();
        assert_eq!(
            solve_stationary(&sys).unwrap(),
            StationarySolution::Failure("mp".to_string())
        );
        assert!(solve_stationary(&fixtures::ann_system()).is_err());
    }
}
