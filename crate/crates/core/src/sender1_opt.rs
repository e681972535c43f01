//! Sender 1's best implementable policy when the senders' interests differ.
//!
//! Policies are parametrized by two pooling levels: `alpha` on states where
//! sender 1 wants `1` and sender 2 wants `0`, `gamma` on the opposite split.
//! States where both senders want the action the receiver opposes are pulled
//! toward the nearer pooling level in decreasing order of resistance. The
//! sender-1 utility of `p_{alpha,gamma}` is linear on bands bounded by the
//! lines "receiver gets exactly beta after moving the first `j` states", so
//! its maximum sits where one of those lines meets the square's edges or the
//! diagonal, or at a corner.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{mix, GameInstance, Policy, SenderClass};
use crate::report::{reach_tolerance, DesignReport};
use crate::sender_opt::{snap_unit, sort_by_resistance};

const TIE_TOLERANCE: f64 = 1e-12;
const REVALIDATION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct GeneralSweep<'a> {
    game: &'a GameInstance,
    beta: f64,
    class: Vec<SenderClass>,
    order: Vec<usize>,
    tol: f64,
}

impl<'a> GeneralSweep<'a> {
    pub fn new(game: &'a GameInstance) -> Result<Self> {
        game.require_strict_senders()?;
        let mut class = Vec::with_capacity(game.len());
        let mut keyed = Vec::new();
        for i in 0..game.len() {
            let c = game.classify_state(i);
            class.push(c.resolved_class());
            if c.is_disagreement_zero() || c.is_disagreement_one() {
                keyed.push((c.resistance.unwrap_or(0.0), i));
            }
        }
        sort_by_resistance(&mut keyed);
        let order = keyed.into_iter().map(|(_, i)| i).collect();
        Ok(GeneralSweep {
            game,
            beta: game.beta(),
            class,
            order,
            tol: reach_tolerance(game),
        })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn class(&self, i: usize) -> SenderClass {
        self.class[i]
    }

    fn initial(&self, alpha: f64, gamma: f64) -> Vec<f64> {
        self.class
            .iter()
            .map(|c| match c {
                SenderClass::Omega00 => 1.0,
                SenderClass::Omega11 => 0.0,
                SenderClass::Omega10 => alpha,
                SenderClass::Omega01 => gamma,
            })
            .collect()
    }

    fn target(&self, i: usize, alpha: f64, gamma: f64) -> f64 {
        if self.class[i] == SenderClass::Omega00 {
            alpha.max(gamma)
        } else {
            alpha.min(gamma)
        }
    }

    fn ev(&self, p: &[f64]) -> f64 {
        self.game
            .states()
            .iter()
            .zip(p)
            .map(|(s, &x)| s.prior * mix(s.v, x))
            .sum()
    }

    pub fn p_alpha_gamma(&self, alpha: f64, gamma: f64) -> Result<Option<Policy>> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::GammaOutOfRange(gamma));
        }
        let mut p = self.initial(alpha, gamma);
        let mut ev = self.ev(&p);
        if ev >= self.beta - self.tol {
            return Ok(Some(Policy::from_clamped(p)));
        }
        for &i in &self.order {
            let s = self.game.state(i);
            let (start, target) = (p[i], self.target(i, alpha, gamma));
            let full = s.prior * (target - start) * (s.v[0] - s.v[1]);
            if full <= 0.0 {
                continue;
            }
            let need = self.beta - ev;
            if full >= need {
                p[i] = start + (target - start) * (need / full);
                return Ok(Some(Policy::from_clamped(p)));
            }
            p[i] = target;
            ev += full;
            if ev >= self.beta - self.tol {
                return Ok(Some(Policy::from_clamped(p)));
            }
        }
        Ok((ev >= self.beta - self.tol).then(|| Policy::from_clamped(p)))
    }

    /// Initial policy with the first `j` sweep states fully moved.
    pub fn prefix_policy(&self, j: usize, alpha: f64, gamma: f64) -> Policy {
        let mut p = self.initial(alpha, gamma);
        for &i in &self.order[..j] {
            p[i] = self.target(i, alpha, gamma);
        }
        Policy::from_clamped(p)
    }
}

pub fn compute_p_alpha_gamma(game: &GameInstance, alpha: f64, gamma: f64) -> Result<Option<Policy>> {
    GeneralSweep::new(game)?.p_alpha_gamma(alpha, gamma)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundaryCase {
    AlphaZero,
    AlphaOne,
    GammaZero,
    GammaOne,
    Diagonal,
    Corner,
}

/// The line `a*alpha + c*gamma = b` on which the receiver gets exactly beta,
/// and sender 1's utility `a_u*alpha + c_u*gamma + b_u` along it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineCoefficients {
    pub a: f64,
    pub c: f64,
    pub b: f64,
    pub a_u: f64,
    pub c_u: f64,
    pub b_u: f64,
}

impl LineCoefficients {
    fn utility(&self, alpha: f64, gamma: f64) -> f64 {
        self.a_u * alpha + self.c_u * gamma + self.b_u
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryCandidate {
    /// Number of sweep states fully moved.
    pub j: usize,
    pub case: BoundaryCase,
    pub alpha: f64,
    pub gamma: f64,
    pub valid: bool,
    /// Closed-form utility; corners carry `None` and are scored by sweeping.
    pub score: Option<f64>,
    pub coefficients: Option<LineCoefficients>,
}

#[derive(Default, Clone, Copy)]
struct Sums {
    dv: f64,
    v1: f64,
    du: f64,
    u1: f64,
}

impl Sums {
    fn add(&mut self, prior: f64, v: [f64; 2], u: [f64; 2]) {
        self.dv += prior * (v[0] - v[1]);
        self.v1 += prior * v[1];
        self.du += prior * (u[0] - u[1]);
        self.u1 += prior * u[1];
    }
}

fn candidates_for(sweep: &GeneralSweep<'_>) -> Vec<BoundaryCandidate> {
    let game = sweep.game;
    let scale = game.v_scale();
    let degenerate = |d: f64| d.abs() <= 1e-15 * scale;

    let (mut s10, mut s01, mut m00, mut m11) = (Sums::default(), Sums::default(), Sums::default(), Sums::default());
    let (mut fixed_v, mut fixed_u) = (0.0, 0.0);
    for (i, s) in game.states().iter().enumerate() {
        match sweep.class[i] {
            SenderClass::Omega00 => {
                fixed_v += s.prior * s.v[0];
                fixed_u += s.prior * s.u1[0];
            }
            SenderClass::Omega11 => {
                fixed_v += s.prior * s.v[1];
                fixed_u += s.prior * s.u1[1];
            }
            SenderClass::Omega10 => s10.add(s.prior, s.v, s.u1),
            SenderClass::Omega01 => s01.add(s.prior, s.v, s.u1),
        }
    }

    let mut out = Vec::new();
    let mut push = |j, case, alpha: f64, gamma: f64, coef: LineCoefficients| {
        let (alpha, gamma) = (snap_unit(alpha, 1e-12), snap_unit(gamma, 1e-12));
        let valid = (0.0..=1.0).contains(&alpha) && (0.0..=1.0).contains(&gamma);
        out.push(BoundaryCandidate {
            j,
            case,
            alpha,
            gamma,
            valid,
            score: Some(coef.utility(alpha, gamma)),
            coefficients: Some(coef),
        });
    };
    for j in 0..=sweep.order.len() {
        if j > 0 {
            let i = sweep.order[j - 1];
            let s = game.state(i);
            if sweep.class[i] == SenderClass::Omega00 {
                fixed_v -= s.prior * s.v[0];
                fixed_u -= s.prior * s.u1[0];
                m00.add(s.prior, s.v, s.u1);
            } else {
                fixed_v -= s.prior * s.v[1];
                fixed_u -= s.prior * s.u1[1];
                m11.add(s.prior, s.v, s.u1);
            }
        }
        let b = sweep.beta - fixed_v - (s10.v1 + s01.v1 + m00.v1 + m11.v1);
        let b_u = fixed_u + s10.u1 + s01.u1 + m00.u1 + m11.u1;
        // alpha >= gamma: moved 00 states sit at alpha, moved 11 states at gamma
        let ge = LineCoefficients {
            a: s10.dv + m00.dv,
            c: s01.dv + m11.dv,
            b,
            a_u: s10.du + m00.du,
            c_u: s01.du + m11.du,
            b_u,
        };
        // alpha <= gamma: the roles swap
        let le = LineCoefficients {
            a: s10.dv + m11.dv,
            c: s01.dv + m00.dv,
            b,
            a_u: s10.du + m11.du,
            c_u: s01.du + m00.du,
            b_u,
        };
        if !degenerate(ge.c) {
            push(j, BoundaryCase::AlphaOne, 1.0, (ge.b - ge.a) / ge.c, ge);
        }
        if !degenerate(ge.a) {
            push(j, BoundaryCase::GammaZero, ge.b / ge.a, 0.0, ge);
        }
        if !degenerate(ge.a + ge.c) {
            let t = ge.b / (ge.a + ge.c);
            push(j, BoundaryCase::Diagonal, t, t, ge);
        }
        if !degenerate(le.c) {
            push(j, BoundaryCase::AlphaZero, 0.0, le.b / le.c, le);
        }
        if !degenerate(le.a) {
            push(j, BoundaryCase::GammaOne, (le.b - le.c) / le.a, 1.0, le);
        }
    }
    for (alpha, gamma) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
        out.push(BoundaryCandidate {
            j: 0,
            case: BoundaryCase::Corner,
            alpha,
            gamma,
            valid: true,
            score: None,
            coefficients: None,
        });
    }
    out
}

/// All boundary and corner candidates. Validity only reflects membership in
/// the unit square; feasibility is settled by the sweep.
pub fn boundary_candidates(game: &GameInstance) -> Result<Vec<BoundaryCandidate>> {
    Ok(candidates_for(&GeneralSweep::new(game)?))
}

pub fn solve_sender1(game: &GameInstance) -> Result<DesignReport> {
    let sweep = GeneralSweep::new(game)?;
    let favorite = sweep.initial(0.0, 1.0);
    if sweep.ev(&favorite) >= sweep.beta - sweep.tol {
        return DesignReport::evaluate(game, Policy::from_clamped(favorite), Some(0.0), Some(1.0), 0);
    }
    let candidates = candidates_for(&sweep);
    let examined = candidates.len();

    struct Pending {
        score: f64,
        alpha: f64,
        gamma: f64,
        policy: Option<Policy>,
        j: usize,
    }
    let mut pending = Vec::new();
    for c in candidates.iter().filter(|c| c.valid) {
        match c.score {
            Some(score) => pending.push(Pending {
                score,
                alpha: c.alpha,
                gamma: c.gamma,
                policy: None,
                j: c.j,
            }),
            None => {
                if let Some(p) = sweep.p_alpha_gamma(c.alpha, c.gamma)? {
                    pending.push(Pending {
                        score: game.expected_utilities(&p)?.u1,
                        alpha: c.alpha,
                        gamma: c.gamma,
                        policy: Some(p),
                        j: c.j,
                    });
                }
            }
        }
    }

    while !pending.is_empty() {
        let best = pending.iter().map(|c| c.score).fold(f64::NEG_INFINITY, f64::max);
        let (idx, _) = pending
            .iter()
            .enumerate()
            .filter(|(_, c)| c.score >= best - TIE_TOLERANCE)
            .min_by(|(_, a), (_, b)| a.alpha.total_cmp(&b.alpha).then(a.gamma.total_cmp(&b.gamma)))
            .expect("non-empty");
        let c = pending.swap_remove(idx);
        if let Some(p) = c.policy {
            return DesignReport::evaluate(game, p, Some(c.alpha), Some(c.gamma), examined);
        }
        // closed form must agree with what the sweep actually produces
        let Some(swept) = sweep.p_alpha_gamma(c.alpha, c.gamma)? else {
            continue;
        };
        let realized = game.expected_utilities(&swept)?.u1;
        if (realized - c.score).abs() <= REVALIDATION_TOLERANCE {
            let p = sweep.prefix_policy(c.j, c.alpha, c.gamma);
            return DesignReport::evaluate(game, p, Some(c.alpha), Some(c.gamma), examined);
        }
    }
    Err(Error::Internal(
        "no feasible pooling pair; a constant policy always is".into(),
    ))
}
