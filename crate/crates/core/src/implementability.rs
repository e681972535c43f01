//! Deciding whether a policy can be induced by a truthful equilibrium of the
//! mediated game.
//!
//! The sender side is a set of order constraints: whenever `a ≺ b`, the policy
//! must satisfy `p(a) <= p(b)`. With strict sender preferences these collapse
//! to four class conditions that can be checked in linear time. The receiver
//! side is obedience to both recommendations, which for a binary action is
//! equivalent to the receiver's expected utility reaching `beta`.

use serde::Serialize;

use crate::error::{Result, Witness};
use crate::game::{mix, Agent, GameInstance, Policy, Preference, SenderClass};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Slack allowed on `p(a) <= p(b)` comparisons.
    pub order: f64,
    /// Slack allowed on receiver obedience.
    pub ic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            order: 1e-12,
            ic: 1e-9,
        }
    }
}

/// Per-class extrema of a policy, reported as diagnostics. `None` for empty
/// classes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ClassExtrema {
    pub min_omega00: Option<f64>,
    pub max_outside_omega00: Option<f64>,
    pub max_omega11: Option<f64>,
    pub min_outside_omega11: Option<f64>,
    pub spread_omega10: Option<f64>,
    pub spread_omega01: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImplementabilityVerdict {
    pub implementable: bool,
    pub sender_ok: bool,
    pub receiver_ok: bool,
    pub witness: Option<Witness>,
    /// Unnormalized obedience slack for recommendations `0` and `1`.
    pub ic_slack: [f64; 2],
    pub ev: f64,
    pub beta: f64,
    pub ev_minus_beta: f64,
    /// Only filled when every sender preference is strict.
    pub extrema: Option<ClassExtrema>,
}

fn fold_extreme(acc: &mut Option<(usize, f64)>, i: usize, x: f64, better: fn(f64, f64) -> bool) {
    match acc {
        Some((_, y)) if !better(x, *y) => {}
        _ => *acc = Some((i, x)),
    }
}

fn lt(a: f64, b: f64) -> bool {
    a < b
}

fn gt(a: f64, b: f64) -> bool {
    a > b
}

#[derive(Default)]
struct Scan {
    min00: Option<(usize, f64)>,
    max_not00: Option<(usize, f64)>,
    max11: Option<(usize, f64)>,
    min_not11: Option<(usize, f64)>,
    min10: Option<(usize, f64)>,
    max10: Option<(usize, f64)>,
    min01: Option<(usize, f64)>,
    max01: Option<(usize, f64)>,
}

/// One pass over a strict-preference game collecting the class extrema.
fn scan(game: &GameInstance, p: &Policy) -> Scan {
    let mut s = Scan::default();
    for i in 0..game.len() {
        let x = p[i];
        let class = SenderClass::from_actions(
            game.prefers(Agent::Sender1, i).resolved(),
            game.prefers(Agent::Sender2, i).resolved(),
        );
        if class == SenderClass::Omega00 {
            fold_extreme(&mut s.min00, i, x, lt);
        } else {
            fold_extreme(&mut s.max_not00, i, x, gt);
        }
        if class == SenderClass::Omega11 {
            fold_extreme(&mut s.max11, i, x, gt);
        } else {
            fold_extreme(&mut s.min_not11, i, x, lt);
        }
        match class {
            SenderClass::Omega10 => {
                fold_extreme(&mut s.min10, i, x, lt);
                fold_extreme(&mut s.max10, i, x, gt);
            }
            SenderClass::Omega01 => {
                fold_extreme(&mut s.min01, i, x, lt);
                fold_extreme(&mut s.max01, i, x, gt);
            }
            _ => {}
        }
    }
    s
}

/// Class extrema, or `None` when some sender is indifferent somewhere.
pub fn class_extrema(game: &GameInstance, p: &Policy) -> Result<Option<ClassExtrema>> {
    game.check_len(p.len())?;
    if game.has_indifferent_sender() {
        return Ok(None);
    }
    let s = scan(game, p);
    let val = |x: Option<(usize, f64)>| x.map(|(_, v)| v);
    let spread = |lo: Option<(usize, f64)>, hi: Option<(usize, f64)>| match (lo, hi) {
        (Some((_, a)), Some((_, b))) => Some(b - a),
        _ => None,
    };
    Ok(Some(ClassExtrema {
        min_omega00: val(s.min00),
        max_outside_omega00: val(s.max_not00),
        max_omega11: val(s.max11),
        min_outside_omega11: val(s.min_not11),
        spread_omega10: spread(s.min10, s.max10),
        spread_omega01: spread(s.min01, s.max01),
    }))
}

/// Linear-time check through the four class conditions. Requires strict
/// sender preferences.
fn class_condition_violation(game: &GameInstance, p: &Policy, tol: f64) -> Option<Witness> {
    let s = scan(game, p);
    let pairs = [
        // everything outside Omega00 sits weakly below Omega00
        (s.max_not00, s.min00),
        // Omega11 sits weakly below everything else
        (s.max11, s.min_not11),
        // constant on Omega10 and on Omega01
        (s.max10, s.min10),
        (s.max01, s.min01),
    ];
    pairs.into_iter().find_map(|(hi, lo)| match (hi, lo) {
        (Some((earlier, a)), Some((later, b))) if a > b + tol => Some(Witness { earlier, later }),
        _ => None,
    })
}

/// The order constraints checked pair by pair, O(n²). Works with indifferent
/// senders.
pub fn pairwise_violation(game: &GameInstance, p: &Policy, tol: f64) -> Result<Option<Witness>> {
    game.check_len(p.len())?;
    let prefs: Vec<(Preference, Preference)> = (0..game.len())
        .map(|i| (game.prefers(Agent::Sender1, i), game.prefers(Agent::Sender2, i)))
        .collect();
    let zero = |i: usize| {
        (prefs[i].0 == Preference::PrefersZero, prefs[i].1 == Preference::PrefersZero)
    };
    let one = |i: usize| {
        (prefs[i].0 == Preference::PrefersOne, prefs[i].1 == Preference::PrefersOne)
    };
    for later in 0..game.len() {
        let (z1, z2) = zero(later);
        if !z1 && !z2 {
            continue;
        }
        for earlier in 0..game.len() {
            let (o1, o2) = one(earlier);
            let related = (z1 && o2) || (z2 && o1);
            if related && p[earlier] > p[later] + tol {
                return Ok(Some(Witness { earlier, later }));
            }
        }
    }
    Ok(None)
}

/// Sender-side implementability. Uses the class conditions when all sender
/// preferences are strict and the pairwise definition otherwise.
pub fn check_sender_implementable(
    game: &GameInstance,
    p: &Policy,
    tol: f64,
) -> Result<(bool, Option<Witness>)> {
    game.check_len(p.len())?;
    let witness = if game.has_indifferent_sender() {
        pairwise_violation(game, p, tol)?
    } else {
        class_condition_violation(game, p, tol)
    };
    Ok((witness.is_none(), witness))
}

/// Receiver obedience. Slacks are unnormalized:
/// `sum_w mu(w) P(a | w) [v(a, w) - v(1 - a, w)]`.
pub fn check_receiver_ic(game: &GameInstance, p: &Policy, tol: f64) -> Result<(bool, [f64; 2])> {
    game.check_len(p.len())?;
    let (slack, _) = receiver_pass(game, p);
    Ok((slack.iter().all(|&s| s >= -tol), slack))
}

/// Obedience slacks and the receiver's expected utility in one pass.
fn receiver_pass(game: &GameInstance, p: &Policy) -> ([f64; 2], f64) {
    let (mut slack, mut ev) = ([0.0; 2], 0.0);
    for (s, &x) in game.states().iter().zip(p.values()) {
        let d = s.v[0] - s.v[1];
        slack[0] += s.prior * x * d;
        slack[1] -= s.prior * (1.0 - x) * d;
        ev += s.prior * mix(s.v, x);
    }
    (slack, ev)
}

pub fn check_implementable(
    game: &GameInstance,
    p: &Policy,
    tol: Tolerances,
) -> Result<ImplementabilityVerdict> {
    let (sender_ok, witness) = check_sender_implementable(game, p, tol.order)?;
    let (ic_slack, ev) = receiver_pass(game, p);
    let receiver_ok = ic_slack.iter().all(|&s| s >= -tol.ic);
    let beta = game.beta();
    Ok(ImplementabilityVerdict {
        implementable: sender_ok && receiver_ok,
        sender_ok,
        receiver_ok,
        witness,
        ic_slack,
        ev,
        beta,
        ev_minus_beta: ev - beta,
        extrema: class_extrema(game, p)?,
    })
}

/// Bounds on the mediator entry for reports `(m1, m2)` imposed by truthful
/// reporting: sender 1 at true state `m2`, sender 2 at true state `m1`.
pub(crate) fn entry_bounds(game: &GameInstance, p: &Policy, m1: usize, m2: usize) -> (f64, f64) {
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 1.0;
    match game.prefers(Agent::Sender1, m2) {
        Preference::PrefersZero => hi = hi.min(p[m2]),
        Preference::PrefersOne => lo = lo.max(p[m2]),
        Preference::Indifferent => {}
    }
    match game.prefers(Agent::Sender2, m1) {
        Preference::PrefersZero => hi = hi.min(p[m1]),
        Preference::PrefersOne => lo = lo.max(p[m1]),
        Preference::Indifferent => {}
    }
    (lo, hi)
}

/// Independent route to sender-side implementability: a mediator exists iff
/// every off-diagonal entry has a nonempty feasible interval.
pub fn entrywise_feasibility(game: &GameInstance, p: &Policy, tol: f64) -> Result<bool> {
    game.check_len(p.len())?;
    let n = game.len();
    for m1 in 0..n {
        for m2 in (0..n).filter(|&m2| m2 != m1) {
            let (lo, hi) = entry_bounds(game, p, m1, m2);
            if lo > hi + tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Transitive closure of `≺` including the diagonal; `reach[a][b]` means a
/// chain of constraints forces `p(a) <= p(b)`.
fn order_closure(game: &GameInstance) -> Vec<Vec<bool>> {
    let n = game.len();
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|a| (0..n).map(|b| a == b || game.precedes(a, b)).collect())
        .collect();
    for k in 0..n {
        for a in 0..n {
            if a != k && reach[a][k] {
                let (row_a, row_k) = if a < k {
                    let (lo, hi) = reach.split_at_mut(k);
                    (&mut lo[a], &hi[0])
                } else {
                    let (lo, hi) = reach.split_at_mut(a);
                    (&mut hi[0], &lo[k])
                };
                for (x, &y) in row_a.iter_mut().zip(row_k.iter()) {
                    *x |= y;
                }
            }
        }
    }
    reach
}

/// Sup-norm projection of `x` onto the sender order constraints: the
/// midpoint of the upper envelope (max over predecessors) and the lower
/// envelope (min over successors). O(n³).
pub fn project_to_implementable(game: &GameInstance, x: &[f64]) -> Result<Policy> {
    game.check_len(x.len())?;
    let n = game.len();
    let reach = order_closure(game);
    let values = (0..n)
        .map(|b| {
            let upper = (0..n).filter(|&a| reach[a][b]).map(|a| x[a]).fold(f64::MIN, f64::max);
            let lower = (0..n).filter(|&c| reach[b][c]).map(|c| x[c]).fold(f64::MAX, f64::min);
            0.5 * (upper + lower)
        })
        .collect();
    Ok(Policy::from_clamped(values))
}
