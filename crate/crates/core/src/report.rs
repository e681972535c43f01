use serde::Serialize;

use crate::error::Result;
use crate::game::{GameInstance, Policy};
use crate::implementability::{check_implementable, Tolerances};

/// A solved policy with its expected utilities and a certification flag from
/// an independent implementability check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DesignReport {
    pub policy: Policy,
    pub eu1: f64,
    pub eu2: f64,
    pub ev: f64,
    pub beta: f64,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub breakpoints_examined: usize,
    pub certified: bool,
}

impl DesignReport {
    pub(crate) fn evaluate(
        game: &GameInstance,
        policy: Policy,
        alpha: Option<f64>,
        gamma: Option<f64>,
        breakpoints_examined: usize,
    ) -> Result<Self> {
        let utilities = game.expected_utilities(&policy)?;
        let certified = check_implementable(game, &policy, Tolerances::default())?.implementable;
        Ok(DesignReport {
            policy,
            eu1: utilities.u1,
            eu2: utilities.u2,
            ev: utilities.v,
            beta: game.beta(),
            alpha,
            gamma,
            breakpoints_examined,
            certified,
        })
    }
}

/// Absolute tolerance for "receiver utility reached beta", scaled by the
/// receiver's payoff magnitude.
pub(crate) fn reach_tolerance(game: &GameInstance) -> f64 {
    1e-12 * game.v_scale()
}
