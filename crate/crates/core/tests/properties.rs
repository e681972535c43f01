mod common;

use cheaptalk::generate::{random_game, Profile};
use cheaptalk::implementability::{
    check_implementable, check_sender_implementable, entrywise_feasibility, pairwise_violation,
    project_to_implementable, Tolerances,
};
use cheaptalk::io::{parse_game, serialize_game};
use cheaptalk::mediator::{audit_equilibrium, build_tau};
use cheaptalk::oracle::{brute_force_receiver, grid_oracle_common, grid_oracle_general};
use cheaptalk::receiver_opt::{solve_receiver, ClassVector};
use cheaptalk::sender1_opt::{boundary_candidates, solve_sender1, GeneralSweep};
use cheaptalk::sender_opt::{solve_common, CommonSweep};
use cheaptalk::Policy;
use common::{mixed_game, random_values, rng};
use proptest::prelude::*;

const ORDER: f64 = 1e-12;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn order_check_matches_entrywise_feasibility(seed: u64, n in 1usize..9, coarse: bool) {
        let g = mixed_game(seed, n);
        let p = Policy::new(random_values(&mut rng(seed), n, coarse)).unwrap();
        let (ok, _) = check_sender_implementable(&g, &p, ORDER).unwrap();
        prop_assert_eq!(ok, entrywise_feasibility(&g, &p, ORDER).unwrap());
    }

    #[test]
    fn fast_path_matches_pairwise(seed: u64, n in 1usize..9, coarse: bool) {
        let g = random_game(seed, n, Profile::Strict);
        let p = Policy::new(random_values(&mut rng(seed), n, coarse)).unwrap();
        let (fast, _) = check_sender_implementable(&g, &p, ORDER).unwrap();
        prop_assert_eq!(fast, pairwise_violation(&g, &p, ORDER).unwrap().is_none());
    }

    #[test]
    fn witness_is_a_real_violation(seed: u64, n in 2usize..9) {
        let g = mixed_game(seed, n);
        let p = Policy::new(random_values(&mut rng(seed), n, false)).unwrap();
        if let (false, Some(w)) = check_sender_implementable(&g, &p, ORDER).unwrap() {
            prop_assert!(g.precedes(w.earlier, w.later));
            prop_assert!(p[w.earlier] > p[w.later] + ORDER);
        }
    }

    #[test]
    fn verdict_ignores_sender_labels(seed: u64, n in 1usize..9) {
        let g = mixed_game(seed, n);
        let p = Policy::new(random_values(&mut rng(seed), n, true)).unwrap();
        let a = check_sender_implementable(&g, &p, ORDER).unwrap().0;
        let b = check_sender_implementable(&g.swap_senders(), &p, ORDER).unwrap().0;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn projection_lands_in_the_implementable_set(seed: u64, n in 1usize..11) {
        let g = mixed_game(seed, n);
        let x = random_values(&mut rng(seed), n, false);
        let p = project_to_implementable(&g, &x).unwrap();
        prop_assert!(check_sender_implementable(&g, &p, ORDER).unwrap().0);
        // already implementable points are fixed
        let again = project_to_implementable(&g, p.values()).unwrap();
        prop_assert!(again.max_abs_diff(&p) <= 1e-15);
    }

    #[test]
    fn mediator_is_an_equilibrium(seed: u64, n in 1usize..11) {
        let g = mixed_game(seed, n);
        let p = project_to_implementable(&g, &random_values(&mut rng(seed), n, false)).unwrap();
        let tau = build_tau(&g, &p).unwrap();
        prop_assert_eq!(tau.diagonal(), p.clone());
        let audit = audit_equilibrium(&g, &tau, Tolerances::default()).unwrap();
        prop_assert!(audit.senders_certified(ORDER), "{:?}", audit);
        let ev = g.expected_utilities(&p).unwrap().v;
        if ev >= g.beta() {
            prop_assert!(audit.receiver_obedience_slacks.iter().all(|&s| s >= -1e-9));
        }
    }

    #[test]
    fn round_trip_is_bit_exact(seed: u64, n in 1usize..20) {
        let g = mixed_game(seed, n);
        let bytes = serialize_game(&g);
        let back = parse_game(&bytes).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serialize_game(&back), bytes);
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn common_solution_is_certified_and_tight(seed: u64, n in 1usize..11, ties: bool) {
        let g = if ties { common::tie_game(seed, n, true) } else { random_game(seed, n, Profile::CommonInterest) };
        let r = solve_common(&g).unwrap();
        prop_assert!(r.certified);
        let favorite = CommonSweep::new(&g).unwrap().favorite();
        prop_assert!((r.ev - r.beta).abs() <= 1e-9 || r.policy == favorite);
    }

    #[test]
    fn common_solution_beats_coarse_grid(seed: u64, n in 1usize..9) {
        let g = random_game(seed, n, Profile::CommonInterest);
        let r = solve_common(&g).unwrap();
        let o = grid_oracle_common(&g, 200).unwrap();
        prop_assert!(r.eu1 >= o.utility - 1e-9, "solver {} oracle {}", r.eu1, o.utility);
    }

    #[test]
    fn p_alpha_reaches_beta_and_follows_resistance(seed: u64, n in 1usize..11, alpha in 0.0f64..=1.0) {
        let g = random_game(seed, n, Profile::CommonInterest);
        let sweep = CommonSweep::new(&g).unwrap();
        let Some(p) = sweep.p_alpha(alpha).unwrap() else { return Ok(()) };
        prop_assert!(g.expected_utilities(&p).unwrap().v >= g.beta() - 1e-9);
        let favorite = sweep.favorite();
        // fully moved states, then at most one partial state, then untouched ones
        let mut closed = false;
        for &i in sweep.order() {
            let (moved, untouched) = (p[i] == alpha, p[i] == favorite[i]);
            if moved && untouched {
                continue;
            }
            if closed {
                prop_assert!(untouched, "state {} moved after the sweep stopped", i);
            } else if !moved {
                closed = true;
            }
        }
    }

    #[test]
    fn receiver_optimum_matches_brute_force(seed: u64, n in 1usize..11) {
        let g = random_game(seed, n, Profile::Strict);
        let r = solve_receiver(&g).unwrap();
        prop_assert!(r.certified);
        prop_assert_eq!(r.ev, brute_force_receiver(&g).unwrap().utility);
    }

    #[test]
    fn dominated_class_vectors_lose(seed: u64, n in 1usize..13) {
        let g = random_game(seed, n, Profile::Strict);
        let ev = |v: ClassVector| g.expected_utilities(&v.policy(&g).unwrap()).unwrap().v;
        prop_assert!(ev(ClassVector::new(1, 1, 1, 1)) >= ev(ClassVector::new(1, 1, 1, 0)));
        prop_assert!(ev(ClassVector::new(0, 0, 0, 0)) >= ev(ClassVector::new(1, 0, 0, 0)));
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn sender1_solution_beats_grid(seed: u64, n in 1usize..7) {
        let g = random_game(seed, n, Profile::Strict);
        let r = solve_sender1(&g).unwrap();
        prop_assert!(r.certified);
        let o = grid_oracle_general(&g, 16).unwrap();
        prop_assert!(r.eu1 >= o.utility - 1e-7, "solver {} oracle {}", r.eu1, o.utility);
    }

    #[test]
    fn general_sweep_reaches_beta(seed: u64, n in 1usize..9, alpha in 0.0f64..=1.0, gamma in 0.0f64..=1.0) {
        let g = random_game(seed, n, Profile::Strict);
        if let Some(p) = GeneralSweep::new(&g).unwrap().p_alpha_gamma(alpha, gamma).unwrap() {
            let verdict = check_implementable(&g, &p, Tolerances::default()).unwrap();
            prop_assert!(verdict.implementable, "{:?}", verdict);
        }
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn pooled_states_take_at_most_one_interior_value(seed: u64, n in 1usize..11) {
        let g = random_game(seed, n, Profile::CommonInterest);
        let r = solve_common(&g).unwrap();
        let Some(alpha) = r.alpha else { return Ok(()) };
        let sweep = CommonSweep::new(&g).unwrap();
        let odd = sweep
            .order()
            .iter()
            .filter(|&&i| ![0.0, alpha, 1.0].contains(&r.policy[i]))
            .count();
        // breakpoint winners sit exactly on {0, alpha, 1}; endpoint winners may
        // stop one state part way
        prop_assert!(odd <= usize::from(alpha == 0.0 || alpha == 1.0), "{} odd values", odd);
    }

    #[test]
    fn general_sweep_matches_common_sweep_on_the_diagonal(seed: u64, n in 1usize..11, alpha in 0.0f64..=1.0) {
        let g = random_game(seed, n, Profile::CommonInterest);
        let a = CommonSweep::new(&g).unwrap().p_alpha(alpha).unwrap();
        let b = GeneralSweep::new(&g).unwrap().p_alpha_gamma(alpha, alpha).unwrap();
        match (a, b) {
            (Some(a), Some(b)) => prop_assert!(a.max_abs_diff(&b) <= 1e-15),
            (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
        }
    }

    #[test]
    fn sender1_agrees_with_common_solver(seed: u64, n in 1usize..11) {
        let g = random_game(seed, n, Profile::CommonInterest);
        let a = solve_common(&g).unwrap().eu1;
        let b = solve_sender1(&g).unwrap().eu1;
        prop_assert!((a - b).abs() <= 1e-9, "common {} general {}", a, b);
    }

    #[test]
    fn closed_form_candidates_are_consistent(seed: u64, n in 1usize..9) {
        let g = random_game(seed, n, Profile::Strict);
        let sweep = GeneralSweep::new(&g).unwrap();
        for c in boundary_candidates(&g).unwrap().iter().filter(|c| c.valid && c.score.is_some()) {
            let k = c.coefficients.unwrap();
            prop_assert!((k.a * c.alpha + k.c * c.gamma - k.b).abs() <= 1e-9);
            let u = g.expected_utilities(&sweep.prefix_policy(c.j, c.alpha, c.gamma)).unwrap();
            prop_assert!((u.u1 - c.score.unwrap()).abs() <= 1e-9, "{:?}: realized {}", c, u.u1);
            prop_assert!((u.v - g.beta()).abs() <= 1e-9, "{:?}: ev {}", c, u.v);
        }
    }

    #[test]
    fn sender1_output_is_tight_unless_favorite(seed: u64, n in 1usize..9) {
        let g = random_game(seed, n, Profile::Strict);
        let r = solve_sender1(&g).unwrap();
        prop_assert!(r.certified);
        let favorite = (r.alpha, r.gamma) == (Some(0.0), Some(1.0)) && r.breakpoints_examined == 0;
        prop_assert!(favorite || (r.ev - r.beta).abs() <= 1e-9, "ev {} beta {}", r.ev, r.beta);
    }
}
