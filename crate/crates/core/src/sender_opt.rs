//! Best implementable policy for two senders with identical utilities.
//!
//! For a pooling level `alpha`, `p_alpha` is the best policy with
//! `p >= alpha` on states both senders want `0` and `p <= alpha` on states
//! they want `1`. Starting from the senders' favorite policy, disagreement
//! states are pulled toward `alpha` in decreasing order of resistance (the
//! receiver's gain per unit of sender loss) until the receiver's expected
//! utility reaches `beta`. The senders' utility is piecewise linear in
//! `alpha` with kinks only where a prefix of the resistance order sits
//! exactly at `alpha`, so it suffices to check `alpha in {0, 1}` and those
//! prefix solutions. Everything after the sort is linear time.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{mix, Agent, GameInstance, Payoff, Policy, Preference};
use crate::report::{reach_tolerance, DesignReport};

/// Ties closer than this are broken by the smallest `alpha`.
const TIE_TOLERANCE: f64 = 1e-12;

/// Precomputed state for repeated `p_alpha` evaluations on one game.
#[derive(Clone, Debug)]
pub struct CommonSweep<'a> {
    game: &'a GameInstance,
    beta: f64,
    favorite: Vec<f64>,
    favorite_ev: f64,
    favorite_u: f64,
    entries: Vec<Entry>,
    order: Vec<usize>,
    tol: f64,
}

/// A disagreement state's data, stored contiguously in sweep order.
#[derive(Clone, Copy, Debug)]
struct Entry {
    index: usize,
    prior: f64,
    v: Payoff,
    u: Payoff,
    start: f64,
}

/// Descending by resistance; ties keep their original order.
pub(crate) fn sort_by_resistance(keyed: &mut [(f64, usize)]) {
    keyed.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
}

impl<'a> CommonSweep<'a> {
    pub fn new(game: &'a GameInstance) -> Result<Self> {
        game.require_common_interest()?;
        let mut favorite = Vec::with_capacity(game.len());
        let (mut favorite_ev, mut favorite_u) = (0.0, 0.0);
        let mut keyed = Vec::new();
        let mut unsorted = Vec::new();
        for (i, s) in game.states().iter().enumerate() {
            let receiver = game.prefers(Agent::Receiver, i);
            // senders indifferent: unconstrained, follow the receiver
            let value = match game.prefers(Agent::Sender1, i) {
                Preference::PrefersZero => 1.0,
                Preference::PrefersOne => 0.0,
                Preference::Indifferent => f64::from(receiver == Preference::PrefersZero),
            };
            favorite.push(value);
            favorite_ev += s.prior * mix(s.v, value);
            favorite_u += s.prior * mix(s.u1, value);
            if let Some(resistance) = game.classify_state(i).resistance {
                keyed.push((resistance, unsorted.len()));
                unsorted.push(Entry {
                    index: i,
                    prior: s.prior,
                    v: s.v,
                    u: s.u1,
                    start: value,
                });
            }
        }
        sort_by_resistance(&mut keyed);
        let entries: Vec<Entry> = keyed.iter().map(|&(_, k)| unsorted[k]).collect();
        let order = entries.iter().map(|e| e.index).collect();
        Ok(CommonSweep {
            game,
            beta: game.beta(),
            favorite,
            favorite_ev,
            favorite_u,
            entries,
            order,
            tol: reach_tolerance(game),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The senders' favorite policy: 1 where they prefer 0, 0 where they
    /// prefer 1.
    pub fn favorite(&self) -> Policy {
        Policy::from_clamped(self.favorite.clone())
    }

    pub fn favorite_is_feasible(&self) -> bool {
        self.favorite_ev >= self.beta - self.tol
    }

    /// Disagreement states in sweep order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `p_alpha`, or `None` when `beta` is out of reach at this `alpha`.
    pub fn p_alpha(&self, alpha: f64) -> Result<Option<Policy>> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        let mut p = self.favorite.clone();
        if self.favorite_is_feasible() {
            return Ok(Some(Policy::from_clamped(p)));
        }
        let mut ev = self.favorite_ev;
        for e in &self.entries {
            let full = e.prior * (alpha - e.start) * (e.v[0] - e.v[1]);
            if full <= 0.0 {
                continue;
            }
            let need = self.beta - ev;
            if full >= need {
                p[e.index] = e.start + (alpha - e.start) * (need / full);
                return Ok(Some(Policy::from_clamped(p)));
            }
            p[e.index] = alpha;
            ev += full;
            if ev >= self.beta - self.tol {
                return Ok(Some(Policy::from_clamped(p)));
            }
        }
        Ok((ev >= self.beta - self.tol).then(|| Policy::from_clamped(p)))
    }

    /// Favorite policy with the first `j` disagreement states set to `alpha`.
    pub fn prefix_policy(&self, j: usize, alpha: f64) -> Policy {
        let mut p = self.favorite.clone();
        for e in &self.entries[..j] {
            p[e.index] = alpha;
        }
        Policy::from_clamped(p)
    }
}

pub fn compute_p_alpha(game: &GameInstance, alpha: f64) -> Result<Option<Policy>> {
    CommonSweep::new(game)?.p_alpha(alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaBreakpoint {
    /// Prefix length, starting at 1.
    pub j: usize,
    /// The state added at this prefix.
    pub state: usize,
    /// `None` when the defining equation is degenerate.
    pub alpha: Option<f64>,
    pub valid: bool,
    /// Senders' utility with the prefix pooled at `alpha`.
    pub utility: Option<f64>,
}

fn breakpoints_for(sweep: &CommonSweep<'_>) -> Vec<AlphaBreakpoint> {
    let game = sweep.game;
    let scale = game.v_scale();
    let (mut rest_v, mut rest_u) = (sweep.favorite_ev, sweep.favorite_u);
    let (mut dv, mut v1, mut du, mut u1) = (0.0, 0.0, 0.0, 0.0);
    let mut out = Vec::with_capacity(sweep.entries.len());
    for (k, e) in sweep.entries.iter().enumerate() {
        rest_v -= e.prior * mix(e.v, e.start);
        rest_u -= e.prior * mix(e.u, e.start);
        dv += e.prior * (e.v[0] - e.v[1]);
        v1 += e.prior * e.v[1];
        du += e.prior * (e.u[0] - e.u[1]);
        u1 += e.prior * e.u[1];
        let alpha = (dv.abs() > 1e-15 * scale).then(|| (sweep.beta - rest_v - v1) / dv);
        let alpha = alpha.map(|a| snap_unit(a, 1e-12));
        let valid = alpha.is_some_and(|a| (0.0..=1.0).contains(&a));
        out.push(AlphaBreakpoint {
            j: k + 1,
            state: e.index,
            alpha,
            valid,
            utility: alpha.map(|a| rest_u + u1 + a * du),
        });
    }
    out
}

/// Rounds values within `tol` of 0 or 1 onto the endpoint.
pub(crate) fn snap_unit(x: f64, tol: f64) -> f64 {
    if (x - 0.0).abs() <= tol {
        0.0
    } else if (x - 1.0).abs() <= tol {
        1.0
    } else {
        x
    }
}

/// The pooling levels at which exactly a resistance prefix sits at `alpha`
/// and the receiver gets `beta`. O(n) after the sort.
pub fn alpha_breakpoints(game: &GameInstance) -> Result<Vec<AlphaBreakpoint>> {
    Ok(breakpoints_for(&CommonSweep::new(game)?))
}

enum Candidate {
    Swept(Policy),
    Prefix(usize),
}

/// Best implementable policy for common-interest senders.
pub fn solve_common(game: &GameInstance) -> Result<DesignReport> {
    let sweep = CommonSweep::new(game)?;
    if sweep.favorite_is_feasible() {
        return DesignReport::evaluate(game, sweep.favorite(), None, None, 0);
    }
    let breakpoints = breakpoints_for(&sweep);
    let mut candidates: Vec<(f64, f64, Candidate)> = Vec::new();
    for alpha in [0.0, 1.0] {
        if let Some(p) = sweep.p_alpha(alpha)? {
            let u = game.expected_utilities(&p)?.u1;
            candidates.push((u, alpha, Candidate::Swept(p)));
        }
    }
    for b in breakpoints.iter().filter(|b| b.valid) {
        let (Some(alpha), Some(u)) = (b.alpha, b.utility) else {
            continue;
        };
        candidates.push((u, alpha, Candidate::Prefix(b.j)));
    }
    let best = candidates
        .iter()
        .map(|c| c.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let (_, alpha, winner) = candidates
        .into_iter()
        .filter(|c| c.0 >= best - TIE_TOLERANCE)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Internal("no feasible pooling level; a constant policy always is".into()))?;
    let policy = match winner {
        Candidate::Swept(p) => p,
        Candidate::Prefix(j) => sweep.prefix_policy(j, alpha),
    };
    DesignReport::evaluate(game, policy, Some(alpha), None, breakpoints.len())
}
