//! Brute-force reference solvers. They only use the sweeps and the
//! implementability checker, never the breakpoint or boundary enumeration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{GameInstance, Policy};
use crate::implementability::{check_sender_implementable, Tolerances};
use crate::sender1_opt::GeneralSweep;
use crate::sender_opt::CommonSweep;

pub const DEFAULT_RESOLUTION_COMMON: usize = 2000;
pub const DEFAULT_RESOLUTION_GENERAL: usize = 64;
pub const BRUTE_FORCE_MAX_STATES: usize = 20;

const GOLDEN_ITERATIONS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub utility: f64,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub policy: Policy,
}

struct Best {
    utility: f64,
    alpha: f64,
    gamma: f64,
    policy: Option<Policy>,
}

impl Best {
    fn new() -> Self {
        Best {
            utility: f64::NEG_INFINITY,
            alpha: 0.0,
            gamma: 0.0,
            policy: None,
        }
    }

    fn offer(&mut self, utility: f64, alpha: f64, gamma: f64, policy: Policy) -> bool {
        if utility > self.utility {
            *self = Best {
                utility,
                alpha,
                gamma,
                policy: Some(policy),
            };
            return true;
        }
        false
    }
}

/// 1-D grid over the pooling level followed by golden-section search around
/// the best cell.
pub fn grid_oracle_common(game: &GameInstance, resolution: usize) -> Result<OracleResult> {
    let sweep = CommonSweep::new(game)?;
    let r = resolution.max(1);
    let eval = |alpha: f64| -> Result<Option<(f64, Policy)>> {
        match sweep.p_alpha(alpha)? {
            Some(p) => Ok(Some((game.expected_utilities(&p)?.u1, p))),
            None => Ok(None),
        }
    };
    let mut best = Best::new();
    for i in 0..=r {
        let alpha = i as f64 / r as f64;
        if let Some((u, p)) = eval(alpha)? {
            best.offer(u, alpha, 0.0, p);
        }
    }
    if best.policy.is_none() {
        return Err(Error::Internal("no feasible grid point".into()));
    }

    let step = 1.0 / r as f64;
    let (mut lo, mut hi) = ((best.alpha - step).max(0.0), (best.alpha + step).min(1.0));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let value = |alpha: f64, best: &mut Best| -> Result<f64> {
        Ok(match eval(alpha)? {
            Some((u, p)) => {
                best.offer(u, alpha, 0.0, p);
                u
            }
            None => f64::NEG_INFINITY,
        })
    };
    let (mut x1, mut x2) = (hi - ratio * (hi - lo), lo + ratio * (hi - lo));
    let (mut f1, mut f2) = (value(x1, &mut best)?, value(x2, &mut best)?);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 >= f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - ratio * (hi - lo);
            f1 = value(x1, &mut best)?;
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + ratio * (hi - lo);
            f2 = value(x2, &mut best)?;
        }
    }
    Ok(OracleResult {
        utility: best.utility,
        alpha: Some(best.alpha),
        gamma: None,
        policy: best.policy.expect("checked above"),
    })
}

/// 2-D grid over both pooling levels followed by coordinate descent with a
/// shrinking step.
pub fn grid_oracle_general(game: &GameInstance, resolution: usize) -> Result<OracleResult> {
    let sweep = GeneralSweep::new(game)?;
    let r = resolution.max(1);
    let eval = |alpha: f64, gamma: f64| -> Result<Option<(f64, Policy)>> {
        match sweep.p_alpha_gamma(alpha, gamma)? {
            Some(p) => Ok(Some((game.expected_utilities(&p)?.u1, p))),
            None => Ok(None),
        }
    };
    let mut best = Best::new();
    for i in 0..=r {
        for k in 0..=r {
            let (alpha, gamma) = (i as f64 / r as f64, k as f64 / r as f64);
            if let Some((u, p)) = eval(alpha, gamma)? {
                best.offer(u, alpha, gamma, p);
            }
        }
    }
    if best.policy.is_none() {
        return Err(Error::Internal("no feasible grid point".into()));
    }

    let mut h = 1.0 / r as f64;
    while h > 1e-10 {
        let mut moved = false;
        for (da, dg) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let alpha = (best.alpha + da).clamp(0.0, 1.0);
            let gamma = (best.gamma + dg).clamp(0.0, 1.0);
            if let Some((u, p)) = eval(alpha, gamma)? {
                moved |= best.offer(u, alpha, gamma, p);
            }
        }
        if !moved {
            h /= 2.0;
        }
    }
    Ok(OracleResult {
        utility: best.utility,
        alpha: Some(best.alpha),
        gamma: Some(best.gamma),
        policy: best.policy.expect("checked above"),
    })
}

/// Best receiver utility over all pure sender-implementable policies.
pub fn brute_force_receiver(game: &GameInstance) -> Result<OracleResult> {
    let n = game.len();
    if n > BRUTE_FORCE_MAX_STATES {
        return Err(Error::TooManyStates {
            n,
            max: BRUTE_FORCE_MAX_STATES,
        });
    }
    let tol = Tolerances::default().order;
    let mut best = Best::new();
    let mut values = vec![0.0; n];
    for mask in 0u32..(1 << n) {
        for (i, x) in values.iter_mut().enumerate() {
            *x = f64::from((mask >> i) & 1);
        }
        let p = Policy::from_clamped(values.clone());
        if !check_sender_implementable(game, &p, tol)?.0 {
            continue;
        }
        let v = game.expected_utilities(&p)?.v;
        best.offer(v, 0.0, 0.0, p);
    }
    Ok(OracleResult {
        utility: best.utility,
        alpha: None,
        gamma: None,
        policy: best
            .policy
            .ok_or_else(|| Error::Internal("constant policies are always implementable".into()))?,
    })
}
