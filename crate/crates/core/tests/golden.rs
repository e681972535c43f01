mod common;

use cheaptalk::implementability::{check_implementable, Tolerances};
use cheaptalk::mediator::build_tau;
use cheaptalk::oracle::{brute_force_receiver, grid_oracle_common, grid_oracle_general};
use cheaptalk::receiver_opt::{enumerate_pstar, solve_receiver};
use cheaptalk::sender1_opt::solve_sender1;
use cheaptalk::sender_opt::{alpha_breakpoints, compute_p_alpha, solve_common, CommonSweep};
use cheaptalk::{Agent, Policy};
use common::g1;

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b}");
}

fn policy(v: &[f64]) -> Policy {
    Policy::new(v.to_vec()).unwrap()
}

#[test]
fn beta_and_favorite() {
    let g = g1();
    close(g.beta(), 1.0, 1e-12);
    close(g.prior_expectation(Agent::Receiver, 0), 2.0 / 3.0, 1e-12);
    let favorite = CommonSweep::new(&g).unwrap().favorite();
    assert_eq!(favorite.values(), &[0.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
    close(g.expected_utilities(&favorite).unwrap().v, 0.5, 1e-12);
}

#[test]
fn resistances_and_sweep_order() {
    let g = g1();
    let r: Vec<Option<f64>> = g.classify().iter().map(|c| c.resistance).collect();
    let want = [None, None, Some(1.9), Some(2.1), Some(1.0), Some(2.0)];
    for (got, want) in r.iter().zip(want) {
        match (got, want) {
            (Some(a), Some(b)) => close(*a, b, 1e-12),
            (a, b) => assert_eq!(*a, b),
        }
    }
    assert_eq!(CommonSweep::new(&g).unwrap().order(), &[3, 5, 2, 4]);
}

#[test]
fn breakpoints() {
    let b = alpha_breakpoints(&g1()).unwrap();
    let want = [-3.0 / 7.0, -9.0, 0.5, 1.0];
    for (got, want) in b.iter().zip(want) {
        close(got.alpha.unwrap(), want, 1e-9);
    }
}

#[test]
fn pooled_policies() {
    let g = g1();
    for (alpha, want, utility) in [
        (0.0, [0.0, 1.0, 10.0 / 19.0, 0.0, 0.0, 0.0], 43.0 / 57.0),
        (0.5, [0.0, 1.0, 0.5, 0.5, 0.0, 0.5], 0.75),
        (1.0, [0.0, 1.0, 1.0, 1.0, 1.0, 1.0], 2.0 / 3.0),
    ] {
        let p = compute_p_alpha(&g, alpha).unwrap().unwrap();
        assert!(p.max_abs_diff(&policy(&want)) <= 1e-12, "alpha {alpha}: {:?}", p.values());
        close(g.expected_utilities(&p).unwrap().u1, utility, 1e-12);
    }
}

#[test]
fn senders_optimum() {
    let g = g1();
    let r = solve_common(&g).unwrap();
    assert!(r.policy.max_abs_diff(&policy(&[0.0, 1.0, 10.0 / 19.0, 0.0, 0.0, 0.0])) <= 1e-9);
    close(r.eu1, 43.0 / 57.0, 1e-9);
    close(r.eu2, 43.0 / 57.0, 1e-9);
    close(r.ev, 1.0, 1e-9);
    close(solve_sender1(&g).unwrap().eu1, 43.0 / 57.0, 1e-9);
    close(grid_oracle_common(&g, 2000).unwrap().utility, 43.0 / 57.0, 1e-6);
    close(grid_oracle_general(&g, 64).unwrap().utility, 43.0 / 57.0, 1e-4);
}

#[test]
fn mediator_entries() {
    let g = g1();
    let tau = build_tau(&g, &solve_common(&g).unwrap().policy).unwrap();
    close(tau.get(4, 2), 5.0 / 19.0, 1e-12);
    close(tau.get(1, 2), 0.0, 0.0);
    close(tau.get(4, 5), 1.0, 0.0);
}

#[test]
fn persuasion_policy_is_rejected() {
    let g = g1();
    let v = check_implementable(&g, &policy(&[0.0, 1.0, 1.0, 0.0, 0.0, 0.45]), Tolerances::default()).unwrap();
    assert!(!v.sender_ok);
    let w = v.witness.unwrap();
    assert_eq!((w.earlier, w.later), (5, 3));
    let x = v.extrema.unwrap();
    assert_eq!(x.min_omega00, Some(0.0));
    assert_eq!(x.max_omega11, Some(0.45));
}

#[test]
fn receiver_optimum() {
    let g = g1();
    let ps = enumerate_pstar(&g).unwrap();
    assert_eq!(ps[1].values(), &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let r = solve_receiver(&g).unwrap();
    assert_eq!(r.policy, ps[1]);
    close(r.ev, 7.0 / 6.0, 1e-12);
    let brute = brute_force_receiver(&g).unwrap();
    assert_eq!(brute.utility, r.ev);
}

#[test]
fn diagonal_candidates_reproduce_breakpoints() {
    use cheaptalk::sender1_opt::{boundary_candidates, BoundaryCase};
    let g = g1();
    let common = alpha_breakpoints(&g).unwrap();
    let diagonal: Vec<_> = boundary_candidates(&g)
        .unwrap()
        .into_iter()
        .filter(|c| c.case == BoundaryCase::Diagonal && c.j > 0)
        .collect();
    assert_eq!(diagonal.len(), common.len());
    for (d, b) in diagonal.iter().zip(&common) {
        assert_eq!(d.j, b.j);
        close(d.alpha, b.alpha.unwrap(), 1e-9);
        assert_eq!(d.valid, b.valid);
    }
}
