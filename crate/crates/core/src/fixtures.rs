//! Bundled example games, used by the tests, the CLI goldens and the docs.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;

use crate::form::{validate, Label, Pentaform, Quintuple, QuintupleSet};
use crate::game::{Game, Profile, XReal};
use crate::stationary::{
    continuation_values, instantiate, CycleUtility, Exit, Instantiation, Mode, PieceClass,
    StationaryStrategy, StationarySystem, UtilityModel,
};
use crate::strategy::Choices;

fn quintuples(rows: &[(&str, &str, &str, &str, &str)]) -> QuintupleSet {
    let mut q = QuintupleSet::new();
    for &(i, j, w, a, y) in rows {
        q.insert(Quintuple::new(i, j, w, a, y));
    }
    q
}

fn form(rows: &[(&str, &str, &str, &str, &str)]) -> Pentaform {
    validate(quintuples(rows)).expect("fixture is a pentaform")
}

fn set(names: &[&str]) -> BTreeSet<Label> {
    names.iter().map(|s| s.to_string()).collect()
}

fn rat(n: i64, d: i64) -> XReal {
    XReal::ratio(n, d)
}

/// Profile over the entrant and the incumbent.
pub fn ent_inc(ent: i64, inc: i64) -> Profile {
    Profile::from_pairs([("Ent", XReal::int(ent)), ("Inc", XReal::int(inc))])
}

/// Profile over the wolf, the kid and the town, from `(numerator, denominator)` pairs.
pub fn wkt(wolf: (i64, i64), kid: (i64, i64), town: (i64, i64)) -> Profile {
    Profile::from_pairs([
        ("Wolf", rat(wolf.0, wolf.1)),
        ("Kid", rat(kid.0, kid.1)),
        ("Town", rat(town.0, town.1)),
    ])
}

pub fn solo(player: &str, x: i64) -> Profile {
    Profile::from_pairs([(player, XReal::int(x))])
}

pub fn entry_deterrence_quintuples() -> QuintupleSet {
    quintuples(&[
        ("Ent", "jE", "5", "e", "6"),
        ("Ent", "jE", "5", "~e", "7"),
        ("Inc", "jI", "6", "f", "8"),
        ("Inc", "jI", "6", "~f", "9"),
    ])
}

pub fn entry_deterrence_form() -> Pentaform {
    validate(entry_deterrence_quintuples()).expect("fixture is a pentaform")
}

/// The entrant stays out (0) or enters; the incumbent then fights (−1, 3)
/// or accommodates. The incumbent's payoff after staying out and the
/// entrant's after accommodation are set to 0.
pub fn entry_deterrence_game() -> Game {
    let utilities = BTreeMap::from([
        ("7".to_string(), ent_inc(0, 0)),
        ("8".to_string(), ent_inc(-1, 3)),
        ("9".to_string(), ent_inc(0, 2)),
    ]);
    Game::new(entry_deterrence_form(), set(&["Ent", "Inc"]), utilities).expect("valid game")
}

/// One situation holding both the root and its child, so the root is the
/// only subroot.
pub fn single_information_set_form() -> Pentaform {
    form(&[
        ("Joe", "B", "r", "0", "r0"),
        ("Joe", "B", "r", "1", "r1"),
        ("Joe", "B", "r0", "0", "r00"),
        ("Joe", "B", "r0", "1", "r01"),
    ])
}

/// A perfect-information tree with a single player.
pub fn one_player_game() -> Game {
    let p = form(&[
        ("P", "j0", "o", "L", "l"),
        ("P", "j0", "o", "R", "r"),
        ("P", "jl", "l", "a", "la"),
        ("P", "jl", "l", "b", "lb"),
        ("P", "jr", "r", "a", "ra"),
        ("P", "jr", "r", "b", "rb"),
    ]);
    let utilities = [("la", 3), ("lb", 1), ("ra", 2), ("rb", 5)]
        .into_iter()
        .map(|(y, u)| (y.to_string(), solo("P", u)))
        .collect();
    Game::new(p, set(&["P"]), utilities).expect("valid game")
}

fn pennies(row_wins: bool) -> Profile {
    let x = if row_wins { 1 } else { -1 };
    Profile::from_pairs([("Row", XReal::int(x)), ("Col", XReal::int(-x))])
}

/// Row may stay out at `s` or enter a matching-pennies piece rooted at `m`.
pub fn embedded_matching_pennies() -> Game {
    let p = form(&[
        ("Row", "S", "s", "out", "o"),
        ("Row", "S", "s", "in", "m"),
        ("Row", "R", "m", "H", "mH"),
        ("Row", "R", "m", "T", "mT"),
        ("Col", "C", "mH", "h", "mHh"),
        ("Col", "C", "mH", "t", "mHt"),
        ("Col", "C", "mT", "h", "mTh"),
        ("Col", "C", "mT", "t", "mTt"),
    ]);
    let utilities = BTreeMap::from([
        (
            "o".to_string(),
            Profile::from_pairs([("Row", XReal::zero()), ("Col", XReal::zero())]),
        ),
        ("mHh".to_string(), pennies(true)),
        ("mHt".to_string(), pennies(false)),
        ("mTh".to_string(), pennies(false)),
        ("mTt".to_string(), pennies(true)),
    ]);
    Game::new(p, set(&["Row", "Col"]), utilities).expect("valid game")
}

fn cry_wolf_template() -> Pentaform {
    form(&[
        ("Wolf", "{}", "", "~a", "1"),
        ("Wolf", "{}", "", "a", "2"),
        ("Kid", "{1}", "1", "c", "3"),
        ("Kid", "{1}", "1", "~c", "8"),
        ("Town", "{2+3}", "2", "r", "4"),
        ("Town", "{2+3}", "2", "~r", "5"),
        ("Town", "{2+3}", "3", "r", "6"),
        ("Town", "{2+3}", "3", "~r", "7"),
    ])
}

/// The wolf attacks or not, the kid cries or not, the town responds or not.
/// Every day without a final outcome starts a fresh day, discounted by `beta`.
pub fn cry_wolf_system_with_discount(beta: BigRational) -> StationarySystem {
    let day = "day".to_string();
    let cont = |r: Profile| Exit::Continue {
        class: day.clone(),
        reward: r,
    };
    let exits = BTreeMap::from([
        (
            "4".to_string(),
            Exit::Terminal(wkt((-5, 9), (5, 9), (0, 1))),
        ),
        ("5".to_string(), Exit::Terminal(wkt((5, 9), (0, 1), (0, 1)))),
        ("6".to_string(), cont(wkt((1, 2), (2, 5), (1, 5)))),
        ("7".to_string(), cont(wkt((1, 2), (1, 5), (2, 5)))),
        ("8".to_string(), cont(wkt((1, 2), (1, 5), (2, 5)))),
    ]);
    let classes = BTreeMap::from([(
        day.clone(),
        PieceClass {
            template: cry_wolf_template(),
            exits,
        },
    )]);
    StationarySystem::new(
        set(&["Wolf", "Kid", "Town"]),
        classes,
        day,
        UtilityModel::Discounted(beta),
    )
    .expect("valid system")
}

pub fn cry_wolf_system() -> StationarySystem {
    cry_wolf_system_with_discount(BigRational::new(1.into(), 10.into()))
}

fn cry_wolf_choice(player: &str) -> &'static str {
    match player {
        "Wolf" => "~a",
        "Kid" => "c",
        _ => "~r",
    }
}

/// The wolf never attacks, the kid always cries, the town never responds.
pub fn cry_wolf_quiet(sys: &StationarySystem) -> StationaryStrategy {
    let by_player = ["Wolf", "Kid", "Town"]
        .into_iter()
        .map(|i| (i.to_string(), cry_wolf_choice(i).to_string()))
        .collect();
    StationaryStrategy::uniform(sys, &by_player).expect("feasible")
}

/// The same strategy on an explicit truncation.
pub fn cry_wolf_quiet_choices(p: &Pentaform) -> Choices {
    p.situations()
        .iter()
        .map(|j| {
            let i = p.player_of(j).expect("situation");
            (j.clone(), cry_wolf_choice(i).to_string())
        })
        .collect()
}

pub fn cry_wolf_instantiation(d: usize) -> Instantiation {
    instantiate(&cry_wolf_system(), d, Mode::Structural).expect("cry-wolf instantiates")
}

pub fn cry_wolf_form(d: usize) -> Pentaform {
    cry_wolf_instantiation(d).form
}

/// Continuation values of the cry-wolf strategy above.
pub fn cry_wolf_continuation() -> BTreeMap<Label, Profile> {
    let sys = cry_wolf_system();
    continuation_values(&sys, &cry_wolf_quiet(&sys)).expect("evaluates")
}

fn in_out_template(player: &str) -> Pentaform {
    form(&[
        (player, "{}", "", "in", "i"),
        (player, "{}", "", "out", "o"),
    ])
}

/// A chain where `player` keeps choosing between `in` (continue) and `out`,
/// paid `out` on leaving and 0 on staying forever.
fn chain_system(player: &str, class: &str, out: i64) -> StationarySystem {
    let exits = BTreeMap::from([
        (
            "i".to_string(),
            Exit::Continue {
                class: class.to_string(),
                reward: solo(player, 0),
            },
        ),
        ("o".to_string(), Exit::Terminal(solo(player, out))),
    ]);
    let classes = BTreeMap::from([(
        class.to_string(),
        PieceClass {
            template: in_out_template(player),
            exits,
        },
    )]);
    StationarySystem::new(
        set(&[player]),
        classes,
        class.to_string(),
        UtilityModel::AbsoluteTerminal(vec![CycleUtility {
            cycle: vec![class.to_string()],
            utility: solo(player, 0),
        }]),
    )
    .expect("valid system")
}

pub fn ann_system() -> StationarySystem {
    chain_system("Ann", "ann", 1)
}

pub fn bob_system() -> StationarySystem {
    chain_system("Bob", "bob", -1)
}

/// Eda's chain alternates: leaving at an odd step pays −1, at an even
/// step +1.
pub fn eda_system() -> StationarySystem {
    let class = |out: i64, next: &str| PieceClass {
        template: in_out_template("Eda"),
        exits: BTreeMap::from([
            (
                "i".to_string(),
                Exit::Continue {
                    class: next.to_string(),
                    reward: solo("Eda", 0),
                },
            ),
            ("o".to_string(), Exit::Terminal(solo("Eda", out))),
        ]),
    };
    let classes = BTreeMap::from([
        ("odd".to_string(), class(-1, "even")),
        ("even".to_string(), class(1, "odd")),
    ]);
    StationarySystem::new(
        set(&["Eda"]),
        classes,
        "odd".to_string(),
        UtilityModel::AbsoluteTerminal(vec![CycleUtility {
            cycle: vec!["odd".to_string(), "even".to_string()],
            utility: solo("Eda", 0),
        }]),
    )
    .expect("valid system")
}

/// Every player takes `action` everywhere.
pub fn always(sys: &StationarySystem, action: &str) -> StationaryStrategy {
    let by_player = sys
        .players()
        .into_iter()
        .map(|i| (i, action.to_string()))
        .collect();
    StationaryStrategy::uniform(sys, &by_player).expect("feasible")
}

/// One player with one action, rewarded 1 per step at discount 1/2.
pub fn single_action_system() -> StationarySystem {
    let classes = BTreeMap::from([(
        "one".to_string(),
        PieceClass {
            template: form(&[("Solo", "{}", "", "go", "g")]),
            exits: BTreeMap::from([(
                "g".to_string(),
                Exit::Continue {
                    class: "one".to_string(),
                    reward: solo("Solo", 1),
                },
            )]),
        },
    )]);
    StationarySystem::new(
        set(&["Solo"]),
        classes,
        "one".to_string(),
        UtilityModel::Discounted(BigRational::new(1.into(), 2.into())),
    )
    .expect("valid system")
}

/// A class whose only piece is matching pennies.
pub fn pennies_system() -> StationarySystem {
    let template = form(&[
        ("Row", "{}", "", "H", "1"),
        ("Row", "{}", "", "T", "2"),
        ("Col", "{1+2}", "1", "h", "3"),
        ("Col", "{1+2}", "1", "t", "4"),
        ("Col", "{1+2}", "2", "h", "5"),
        ("Col", "{1+2}", "2", "t", "6"),
    ]);
    let exits = BTreeMap::from([
        ("3".to_string(), Exit::Terminal(pennies(true))),
        ("4".to_string(), Exit::Terminal(pennies(false))),
        ("5".to_string(), Exit::Terminal(pennies(false))),
        ("6".to_string(), Exit::Terminal(pennies(true))),
    ]);
    StationarySystem::new(
        set(&["Row", "Col"]),
        BTreeMap::from([("mp".to_string(), PieceClass { template, exits })]),
        "mp".to_string(),
        UtilityModel::Discounted(BigRational::new(1.into(), 2.into())),
    )
    .expect("valid system")
}

/// Exit labels `1` and `11` make the second generation reuse a label.
pub fn colliding_system() -> StationarySystem {
    let exits = BTreeMap::from([
        (
            "1".to_string(),
            Exit::Continue {
                class: "c".to_string(),
                reward: solo("P", 0),
            },
        ),
        ("11".to_string(), Exit::Terminal(solo("P", 1))),
    ]);
    let template = form(&[("P", "{}", "", "a", "1"), ("P", "{}", "", "b", "11")]);
    StationarySystem::new(
        set(&["P"]),
        BTreeMap::from([("c".to_string(), PieceClass { template, exits })]),
        "c".to_string(),
        UtilityModel::Discounted(BigRational::new(1.into(), 2.into())),
    )
    .expect("valid system")
}
