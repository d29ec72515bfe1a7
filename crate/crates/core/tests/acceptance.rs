//! The acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use common::Naive;
use pentaform::convergence::{
    inf_conceivable, lower_convergent, sup_conceivable, upper_convergent, ConvergenceCertificate,
    ConvergenceVerdict, Subject, DEFAULT_DEPTH,
};
use pentaform::fixtures;
use pentaform::form::{validate, Label, QuintupleSet, RunClosure};
use pentaform::game::{
    admissible, authentic, authentic_value, one_piece_unimprovable, persistent, piece_game,
    piecewise_nash, random_game, random_strategy, random_value, solve_backward, spe_check_direct,
    Game, Profile, Solution, ValueFunction, Witness, XReal,
};
use pentaform::partition::{
    classify_piece_endnodes, classify_piece_run, piece_partition, subroots, PieceRunClass,
};
use pentaform::stationary::{
    self, certify_spe, continuation_values, instantiate, value_at, CertificateKind, ClassId, Mode,
    StationaryStrategy, StationarySystem,
};
use pentaform::strategy::{piece_outcome, piece_situations, subform_outcome, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure!(took < limit, "{what} took {took:?}, limit {limit:?}");
    Ok(took)
}

fn strategy(pairs: &[(&str, &str)]) -> BTreeMap<Label, Label> {
    pairs
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

fn ac1() -> Check {
    let g = fixtures::entry_deterrence_game();
    let start = Instant::now();
    let sol = ok(solve_backward(&g))?;
    let took = within(start, Duration::from_millis(10), "solving")?;
    let Solution::Equilibrium {
        strategy: s,
        values,
    } = sol
    else {
        return Err("no equilibrium found".into());
    };
    ensure!(
        *s.choices() == strategy(&[("jE", "~e"), ("jI", "f")]),
        "strategy {s}"
    );
    ensure!(
        values.get("6") == Some(&fixtures::ent_inc(-1, 3)),
        "v(6) wrong"
    );
    ensure!(
        values.get("5").map(|v| v.at("Ent")) == Some(&XReal::zero()),
        "v(5) wrong"
    );
    Ok(format!(
        "{{jE→~e, jI→f}}, v(6) = (-1, 3), solved in {took:?}"
    ))
}

fn ac2() -> Check {
    let sys = fixtures::cry_wolf_system();
    let d1 = ok(instantiate(&sys, 1, Mode::Structural))?;
    ensure!(
        d1.form.quintuples().len() == 32,
        "depth 1 has {} quintuples",
        d1.form.quintuples().len()
    );
    let want: BTreeSet<Label> = ["", "6", "7", "8"].iter().map(|s| s.to_string()).collect();
    ensure!(
        *subroots(&d1.form) == want,
        "subroots {:?}",
        subroots(&d1.form)
    );
    let part = piece_partition(&d1.form);
    ensure!(part.len() == 4, "{} pieces", part.len());
    ensure!(
        part.iter().all(|(_, p)| p.quintuples().len() == 8),
        "pieces are not 8 quintuples each"
    );
    let start = Instant::now();
    for d in 2..=3 {
        let inst = ok(instantiate(&sys, d, Mode::Structural))?;
        let q = inst.form.quintuples().clone();
        ensure!(validate(q).is_ok(), "depth {d} fails an axiom");
    }
    let took = within(start, Duration::from_secs(1), "depths 2 and 3")?;
    Ok(format!(
        "32 quintuples, 4 pieces of 8; depths 2-3 valid in {took:?}"
    ))
}

fn ac3() -> Check {
    let sys = fixtures::cry_wolf_system();
    let sigma = fixtures::cry_wolf_quiet(&sys);
    let start = Instant::now();
    let cert = ok(certify_spe(&sys, &sigma))?;
    let at6 = ok(value_at(&sys, &sigma, "6"))?;
    let took = within(start, Duration::from_secs(1), "certification")?;
    ensure!(
        cert.kind == CertificateKind::SPECertified,
        "got {}",
        cert.kind
    );
    let w = fixtures::wkt((5, 9), (2, 9), (4, 9));
    ensure!(
        cert.values["day"] == w,
        "w = {}",
        cert.values["day"].describe()
    );
    let six = fixtures::wkt((5, 9), (19, 45), (11, 45));
    ensure!(at6 == six, "value at 6 = {}", at6.describe());
    Ok(format!(
        "SPECertified, w = {}, v(6) = {} in {took:?}",
        w.describe(),
        six.describe()
    ))
}

fn gap_is(v: &ConvergenceVerdict, g: i64) -> bool {
    matches!(v, ConvergenceVerdict::Fails(w) if w.gap == XReal::int(g))
}

fn ac4() -> Check {
    let d = DEFAULT_DEPTH;
    let up = |s: &StationarySystem| upper_convergent(Subject::System(s), d);
    let lo = |s: &StationarySystem| lower_convergent(Subject::System(s), d);
    let eda = fixtures::eda_system();
    ensure!(
        matches!(up(&eda), ConvergenceVerdict::Fails(_)),
        "Eda upper: {}",
        up(&eda)
    );
    ensure!(
        matches!(lo(&eda), ConvergenceVerdict::Fails(_)),
        "Eda lower: {}",
        lo(&eda)
    );
    let ann = fixtures::ann_system();
    ensure!(gap_is(&up(&ann), 1), "Ann upper: {}", up(&ann));
    ensure!(lo(&ann).holds(), "Ann lower: {}", lo(&ann));
    let bob = fixtures::bob_system();
    ensure!(up(&bob).holds(), "Bob upper: {}", up(&bob));
    ensure!(gap_is(&lo(&bob), 1), "Bob lower: {}", lo(&bob));
    let cw = fixtures::cry_wolf_system();
    for v in [up(&cw), lo(&cw)] {
        ensure!(
            matches!(
                v,
                ConvergenceVerdict::Holds(ConvergenceCertificate::Discounted { .. })
            ),
            "cry-wolf: {v}"
        );
    }
    ensure!(
        up(&ann) == up(&ann) && lo(&bob) == lo(&bob),
        "witnesses are not deterministic"
    );
    Ok("Eda FAIL/FAIL, Ann FAIL/HOLD, Bob HOLD/FAIL (gaps 1), cry-wolf discounted".into())
}

fn constant(class: &str, k: &str, x: XReal) -> BTreeMap<ClassId, Profile> {
    BTreeMap::from([(class.to_string(), Profile::from_pairs([(k, x)]))])
}

/// Admissible, persistent, not authentic: on the system and on its depth-8
/// truncation, whose boundary pays the strategy's own value. The final
/// boundary is not a subroot, so persistence is checked between subroots.
fn wrong_but_persistent(
    sys: &StationarySystem,
    sigma: &StationaryStrategy,
    class: &str,
    k: &str,
    x: XReal,
) -> Result<(), String> {
    let h = constant(class, k, x.clone());
    ensure!(
        ok(stationary::admissible(sys, &h))?.holds,
        "{k} {}: not admissible",
        x.describe()
    );
    ensure!(
        ok(stationary::persistent(sys, sigma, &h))?.holds,
        "{k} {}: not persistent",
        x.describe()
    );
    let a = ok(stationary::authentic(sys, sigma, &h))?;
    let truth = Profile::from_pairs([(k, XReal::zero())]);
    ensure!(
        matches!(&a.witness, Some(Witness::ValueMismatch { expected, .. }) if *expected == truth),
        "{k} {}: authenticity should fail against 0, got {a}",
        x.describe()
    );

    let inst = ok(instantiate(sys, 8, Mode::Structural))?;
    let w = ok(continuation_values(sys, sigma))?;
    let g = ok(inst.game_with_continuation(&w))?;
    let s = inst.induce(sigma);
    let v = ok(inst.value_function(&h))?;
    ensure!(
        ok(admissible(&g, &v))?.holds,
        "truncated {k} {}: not admissible",
        x.describe()
    );
    let t_set = subroots(g.form());
    for t in t_set {
        let next = ok(piece_outcome(g.form(), t, s.choices()))?;
        if t_set.contains(next.last()) {
            ensure!(
                v.get(t) == v.get(next.last()),
                "truncated {k}: persistence breaks at {t:?}"
            );
        }
    }
    ensure!(
        !ok(authentic(&g, &s, &v))?.holds,
        "truncated {k} {}: authentic",
        x.describe()
    );
    let truth = ok(authentic_value(&g, &s))?;
    ensure!(
        truth.values().values().all(|p| p.at(k) == &XReal::zero()),
        "true value is not 0"
    );
    Ok(())
}

fn ac5() -> Check {
    let ann = fixtures::ann_system();
    let ann_in = fixtures::always(&ann, "in");
    for x in [XReal::ratio(3, 10), XReal::int(1)] {
        wrong_but_persistent(&ann, &ann_in, "ann", "Ann", x)?;
    }
    let bob = fixtures::bob_system();
    let bob_in = fixtures::always(&bob, "in");
    for x in [XReal::int(-1), XReal::ratio(-2, 5)] {
        wrong_but_persistent(&bob, &bob_in, "bob", "Bob", x)?;
    }

    let bob_out = fixtures::always(&bob, "out");
    let h = constant("bob", "Bob", XReal::int(-1));
    ensure!(
        ok(stationary::authentic(&bob, &bob_out, &h))?.holds,
        "Bob out: not authentic"
    );
    ensure!(
        ok(stationary::piecewise_nash(&bob, &bob_out, &h))?.holds,
        "Bob out: not piecewise-Nash"
    );
    let cert = ok(certify_spe(&bob, &bob_out))?;
    match &cert.kind {
        CertificateKind::Refuted {
            witness:
                Witness::Deviation {
                    deviation,
                    current,
                    improved,
                    ..
                },
            ..
        } => {
            ensure!(
                *current == XReal::int(-1) && *improved == XReal::zero(),
                "deviation worth {improved}"
            );
            ensure!(
                deviation.values().all(|a| a == "in"),
                "deviation is not always-in"
            );
        }
        other => return Err(format!("Bob out: {other}")),
    }

    let inst = ok(instantiate(&bob, 8, Mode::Structural))?;
    let w = ok(continuation_values(&bob, &bob_out))?;
    let g = ok(inst.game_with_continuation(&w))?;
    let s = inst.induce(&bob_out);
    let v = ok(inst.value_function(&h))?;
    ensure!(
        ok(authentic(&g, &s, &v))?.holds,
        "truncated Bob out: not authentic"
    );
    ensure!(
        ok(piecewise_nash(&g, &s, &v))?.holds,
        "truncated Bob out: not piecewise-Nash"
    );
    Ok("Ann α∈{0.3,1}, Bob in β∈{-1,-0.4}: adm/pers ✓ auth ✗; Bob out: refuted by always-in, 0 > -1".into())
}

fn corpus() -> Vec<Game> {
    (0..500).map(|seed| random_game(seed, 12, 3, 3)).collect()
}

/// Strategies worth testing: random ones and, when it exists, the
/// backward-induction one.
fn strategies(g: &Game, rng: &mut ChaCha8Rng) -> Vec<Strategy> {
    let mut out: Vec<Strategy> = (0..3).map(|_| random_strategy(g.form(), rng)).collect();
    if let Ok(Solution::Equilibrium { strategy, .. }) = solve_backward(g) {
        out.push(strategy);
    }
    out
}

fn equivalences(g: &Game, s: &Strategy, v: &ValueFunction) -> Result<(), String> {
    let pers = ok(persistent(g, s, v))?.holds;
    let auth = ok(authentic(g, s, v))?.holds;
    let adm = ok(admissible(g, v))?.holds;
    let pn = ok(piecewise_nash(g, s, v))?.holds;
    let spe = ok(spe_check_direct(g, s))?.holds;
    ensure!(pers == auth, "persistent {pers} but authentic {auth}");
    ensure!(!pers || adm, "persistent but not admissible");
    if pers && pn {
        ensure!(spe, "persistent and piecewise-Nash but not subgame perfect");
    }
    Ok(())
}

fn ac6() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut cases, mut perfect) = (0usize, 0usize);
    for (seed, g) in corpus().iter().enumerate() {
        let naive = Naive::new(g);
        for s in strategies(g, &mut rng) {
            let at = |e: String| format!("seed {seed}, {s}: {e}");
            let av = ok(authentic_value(g, &s))?;
            let rv = random_value(g, &mut rng);
            equivalences(g, &s, &av).map_err(at)?;
            equivalences(g, &s, &rv).map_err(at)?;

            let spe = ok(spe_check_direct(g, &s))?.holds;
            ensure!(
                spe == naive.is_spe(s.choices()),
                "{}",
                at("disagrees with brute force".into())
            );
            let pn = ok(piecewise_nash(g, &s, &av))?.holds;
            ensure!(
                spe == pn,
                "{}",
                at("authentic piecewise-Nash differs from subgame perfection".into())
            );
            let opu = ok(one_piece_unimprovable(g, &s))?.holds;
            ensure!(
                spe == opu,
                "{}",
                at("one-piece unimprovability differs".into())
            );
            ensure!(
                ok(admissible(g, &av))?.holds,
                "{}",
                at("authentic value inadmissible".into())
            );
            ensure!(
                ok(persistent(g, &s, &av))?.holds,
                "{}",
                at("authentic value not persistent".into())
            );

            // a piece deviation priced by the authentic value pays what the
            // same deviation pays when s is obeyed afterwards
            for t in subroots(g.form()) {
                let pg = ok(piece_game(g, &av, t))?;
                let dom = ok(piece_situations(g.form(), t))?;
                let dev: BTreeMap<Label, Label> = random_strategy(g.form(), &mut rng)
                    .into_choices()
                    .into_iter()
                    .filter(|(j, _)| dom.contains(j))
                    .collect();
                let mixed = s.overridden(&dev);
                let piece_end = ok(piece_outcome(g.form(), t, mixed.choices()))?;
                let full_end = ok(subform_outcome(g.form(), t, mixed.choices()))?;
                ensure!(
                    pg.utilities()[piece_end.last()] == g.utilities()[full_end.last()],
                    "{}",
                    at(format!("bridging fails at {t:?}"))
                );
            }
            cases += 1;
            perfect += spe as usize;
        }
    }
    let took = within(start, Duration::from_secs(60), "equivalence suite")?;
    ensure!(
        perfect > 0 && perfect < cases,
        "degenerate sample: {perfect} of {cases} perfect"
    );
    Ok(format!(
        "500 games, {cases} strategies ({perfect} subgame perfect), 0 counterexamples in {took:?}"
    ))
}

fn disjoint_union(parts: &[BTreeSet<Label>], whole: &BTreeSet<Label>) -> bool {
    let mut seen = BTreeSet::new();
    parts
        .iter()
        .all(|p| p.iter().all(|x| seen.insert(x.clone())))
        && seen == *whole
}

fn structure(g: &Game, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let p = g.form();
    let t_set = subroots(p);
    let part = piece_partition(p);

    let mut union = QuintupleSet::new();
    let mut total = 0;
    for (_, piece) in part.iter() {
        union = union.union(piece.quintuples());
        total += piece.quintuples().len();
    }
    ensure!(
        union == *p.quintuples() && total == p.quintuples().len(),
        "pieces do not partition Q"
    );
    let field = |f: &dyn Fn(&pentaform::form::Pentaform) -> BTreeSet<Label>| {
        part.iter().map(|(_, piece)| f(piece)).collect::<Vec<_>>()
    };
    ensure!(
        disjoint_union(&field(&|x| x.situations().clone()), p.situations()),
        "situations"
    );
    ensure!(
        disjoint_union(&field(&|x| x.decision_nodes().clone()), p.decision_nodes()),
        "decision nodes"
    );
    ensure!(
        disjoint_union(&field(&|x| x.successors().clone()), p.successors()),
        "successors"
    );

    let report = ok(classify_piece_endnodes(p))?;
    let ends: BTreeSet<Label> = t_set.iter().cloned().chain(p.endnodes()).collect();
    ensure!(disjoint_union(&report.blocks(), &ends), "endnode blocks");

    for (t, piece) in part.iter() {
        let ts: BTreeSet<Label> = piece
            .decision_nodes()
            .intersection(t_set)
            .cloned()
            .collect();
        ensure!(
            ts == BTreeSet::from([t.clone()]),
            "piece {t:?} holds other subroots"
        );
        ensure!(
            !piece.successors().contains(t),
            "subroot {t:?} is a successor in its piece"
        );
        let mut slices = QuintupleSet::new();
        for j in piece.situations() {
            slices = slices.union(&p.quintuples().slice(j));
        }
        ensure!(
            slices == *piece.quintuples(),
            "piece {t:?} is not a union of slices"
        );
        for n in piece.runs() {
            match ok(classify_piece_run(p, t, &n))? {
                PieceRunClass::ExitToSubroot { subroot, .. } => {
                    ensure!(t_set.contains(&subroot), "exit to non-subroot")
                }
                PieceRunClass::FinalEndnode(z) => {
                    ensure!(
                        p.is_endnode(z.last()) && !t_set.contains(n.last()),
                        "bad final run"
                    )
                }
                PieceRunClass::InfinitePiece => {
                    return Err("infinite piece run in a finite game".into())
                }
            }
        }
    }

    let runs = p.runs();
    ensure!(
        !runs.is_empty() && runs.len() == p.endnodes().len(),
        "run count"
    );
    for z in &runs {
        ensure!(z.len() >= 2, "short run");
        let closure = ok(p.run_closure(z.nodes().iter().map(String::as_str)))?;
        ensure!(
            closure == RunClosure::Run(z.clone()),
            "run is not its own closure"
        );
        if z.len() >= 3 {
            let head = &z.nodes()[..z.len() - 1];
            let closure = ok(p.run_closure(head.iter().map(String::as_str)))?;
            ensure!(
                matches!(closure, RunClosure::NotARun { .. }),
                "prefix closes to a run"
            );
        }
    }
    for x in p.nodes() {
        let path = ok(p.weak_predecessors(x))?;
        ensure!(
            path.first() == p.root() && path.last() == x,
            "weak predecessors of {x:?}"
        );
        for e in path.nodes().windows(2) {
            ensure!(
                ok(p.predecessor(&e[1]))? == &e[0],
                "path of {x:?} is broken"
            );
        }
    }

    let s = random_strategy(p, rng);
    for t in t_set {
        let piece_end = ok(piece_outcome(p, t, s.choices()))?;
        let full_end = ok(subform_outcome(p, t, s.choices()))?;
        let m = piece_end.last();
        let expected = if t_set.contains(m) {
            ok(subform_outcome(p, m, s.choices()))?.last().clone()
        } else {
            m.clone()
        };
        ensure!(
            *full_end.last() == expected,
            "outcome decomposition at {t:?}"
        );
    }

    for k in g.stakeholders() {
        for x in p.nodes() {
            let (hi, lo) = (ok(sup_conceivable(g, x, k))?, ok(inf_conceivable(g, x, k))?);
            if p.is_endnode(x) {
                let u = g.utilities()[x].at(k);
                ensure!(hi == *u && lo == *u, "conceivable bounds at endnode {x:?}");
            }
            for (_, y) in p.children(x) {
                ensure!(ok(sup_conceivable(g, y, k))? <= hi, "sup rises at {y:?}");
                ensure!(ok(inf_conceivable(g, y, k))? >= lo, "inf falls at {y:?}");
            }
        }
    }
    ensure!(
        upper_convergent(Subject::Game(g), 1).holds(),
        "finite game not upper-convergent"
    );
    ensure!(
        lower_convergent(Subject::Game(g), 1).holds(),
        "finite game not lower-convergent"
    );
    Ok(())
}

fn ac7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for (seed, g) in corpus().iter().enumerate() {
        structure(g, &mut rng).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok("500 games, 0 violations".into())
}

fn ac8() -> Check {
    let sys = fixtures::cry_wolf_system();
    let sigma = fixtures::cry_wolf_quiet(&sys);
    let h = fixtures::cry_wolf_continuation();
    let start = Instant::now();
    for d in 1..=3 {
        let inst = ok(instantiate(&sys, d, Mode::Bounded))?;
        let g = ok(inst.game_with_continuation(&h))?;
        let intervals = inst
            .intervals
            .as_ref()
            .ok_or("bounded mode without intervals")?;
        for (y, (lo, hi)) in intervals {
            let u = &g.utilities()[y];
            ensure!(
                sys.stakeholders()
                    .iter()
                    .all(|k| lo.at(k) <= u.at(k) && u.at(k) <= hi.at(k)),
                "boundary {y:?} priced outside its bounds"
            );
        }
        let s = inst.induce(&sigma);
        let v = ok(spe_check_direct(&g, &s))?;
        ensure!(v.holds, "depth {d}: {v}");
    }
    let took = within(start, Duration::from_secs(5), "truncations")?;
    Ok(format!("depths 1-3 subgame perfect in {took:?}"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("entry deterrence solved backward", ac1),
        ("cry-wolf truncation structure", ac2),
        ("cry-wolf certification", ac3),
        ("convergence verdicts", ac4),
        ("value-function pathologies", ac5),
        ("finite-game equivalence suite", ac6),
        ("structural invariants", ac7),
        ("truncation consistency", ac8),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("AC{} PASS  {name}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("AC{} FAIL  {name}: {why}", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
}
