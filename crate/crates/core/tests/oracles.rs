mod common;

use common::Naive;
use pentaform::fixtures;
use pentaform::game::{
    nash_check, random_game, random_strategy, solve_backward, spe_check_direct, Solution,
};
use pentaform::partition::subroots;
use pentaform::stationary::{certify_spe, continuation_values, value_at};
use pentaform::strategy::outcome;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn subroots_match_brute_force() {
    for seed in 0..300 {
        let g = random_game(seed, 12, 3, 3);
        assert_eq!(
            *subroots(g.form()),
            Naive::new(&g).subroots(),
            "seed {seed}"
        );
    }
    let f1 = fixtures::entry_deterrence_game();
    assert_eq!(*subroots(f1.form()), Naive::new(&f1).subroots());
}

#[test]
fn outcomes_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..300 {
        let g = random_game(seed, 12, 3, 3);
        let naive = Naive::new(&g);
        for _ in 0..4 {
            let s = random_strategy(g.form(), &mut rng);
            assert_eq!(
                outcome(g.form(), &s).last(),
                &naive.play(naive.root(), s.choices())
            );
        }
    }
}

#[test]
fn nash_and_spe_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut nash, mut spe) = (0, 0);
    for seed in 0..300 {
        let g = random_game(seed, 12, 3, 3);
        let naive = Naive::new(&g);
        for _ in 0..4 {
            let s = random_strategy(g.form(), &mut rng);
            let n = nash_check(&g, &s).unwrap().holds;
            assert_eq!(n, naive.is_nash(s.choices()), "seed {seed}: {s}");
            let e = spe_check_direct(&g, &s).unwrap().holds;
            assert_eq!(e, naive.is_spe(s.choices()), "seed {seed}: {s}");
            nash += n as usize;
            spe += e as usize;
        }
    }
    // the sample must exercise both outcomes
    assert!(nash > 0 && spe > 0 && spe < 1200);
}

#[test]
fn backward_solutions_are_subgame_perfect() {
    let mut solved = 0;
    for seed in 0..300 {
        let g = random_game(seed, 12, 3, 3);
        match solve_backward(&g).unwrap() {
            Solution::Equilibrium { strategy, values } => {
                solved += 1;
                let naive = Naive::new(&g);
                assert!(naive.is_spe(strategy.choices()), "seed {seed}");
                let z = naive.play(naive.root(), strategy.choices());
                assert_eq!(values.get(g.form().root()).unwrap(), &g.utilities()[&z]);
            }
            Solution::NoPureEquilibrium(t) => {
                assert!(subroots(g.form()).contains(&t));
            }
        }
    }
    assert!(solved > 200);
}

#[test]
fn entry_deterrence_against_brute_force() {
    let g = fixtures::entry_deterrence_game();
    let Solution::Equilibrium { strategy, .. } = solve_backward(&g).unwrap() else {
        panic!("solvable");
    };
    let naive = Naive::new(&g);
    assert!(naive.is_spe(strategy.choices()));
    let accommodate = [("jE", "e"), ("jI", "~f")]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    // the incumbent prefers fighting once the entrant is in
    assert!(!naive.is_nash(&accommodate));
    assert!(!naive.is_spe(&accommodate));
}

/// Plain floating-point value iteration of the cry-wolf day under the
/// never-attack, always-cry, never-respond strategy.
#[test]
fn cry_wolf_values_against_float_iteration() {
    let beta = 0.1;
    // on path the day ends at node 7
    let r7 = [0.5, 0.2, 0.4];
    let mut w = [0.0f64; 3];
    for _ in 0..200 {
        for k in 0..3 {
            w[k] = r7[k] + beta * w[k];
        }
    }
    let sys = fixtures::cry_wolf_system();
    let sigma = fixtures::cry_wolf_quiet(&sys);
    let exact = &continuation_values(&sys, &sigma).unwrap()["day"];
    for (k, name) in ["Wolf", "Kid", "Town"].iter().enumerate() {
        assert!((exact.at(name).to_f64() - w[k]).abs() < 1e-12);
    }
    // subroot 6 was reached by the wolf attacking and the town responding
    let r6 = [0.5, 0.4, 0.2];
    let at6 = value_at(&sys, &sigma, "6").unwrap();
    for (k, name) in ["Wolf", "Kid", "Town"].iter().enumerate() {
        assert!((at6.at(name).to_f64() - (r6[k] + beta * w[k])).abs() < 1e-12);
    }
    assert!(matches!(
        certify_spe(&sys, &sigma).unwrap().kind,
        pentaform::stationary::CertificateKind::SPECertified
    ));
}

/// Truncations of cry-wolf priced with the exact continuation values: the
/// induced strategy is subgame perfect by brute force too.
#[test]
fn cry_wolf_truncation_against_brute_force() {
    let sys = fixtures::cry_wolf_system();
    let sigma = fixtures::cry_wolf_quiet(&sys);
    for d in 1..=2 {
        let inst = fixtures::cry_wolf_instantiation(d);
        let g = inst
            .game_with_continuation(&fixtures::cry_wolf_continuation())
            .unwrap();
        let s = inst.induce(&sigma);
        assert!(Naive::new(&g).is_spe(s.choices()), "depth {d}");
    }
}
