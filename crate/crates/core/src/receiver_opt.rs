//! Receiver-optimal implementable policy.
//!
//! Some receiver-optimal policy is pure and constant on each sender class,
//! with consensus states set to the action everybody wants. Feasibility and
//! two dominance arguments leave four class vectors to compare.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{GameInstance, Policy, SenderClass};
use crate::implementability::{check_implementable, Tolerances};
use crate::report::DesignReport;

/// Policy values on the non-consensus part of `Omega00`, on `Omega10`, on
/// `Omega01` and on the non-consensus part of `Omega11`, in that order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassVector {
    pub b00: u8,
    pub b10: u8,
    pub b01: u8,
    pub b11: u8,
}

impl ClassVector {
    pub const fn new(b00: u8, b10: u8, b01: u8, b11: u8) -> Self {
        ClassVector { b00, b10, b01, b11 }
    }

    /// `b00` is the largest entry and `b11` the smallest.
    pub fn is_feasible(&self) -> bool {
        let all = [self.b00, self.b10, self.b01, self.b11];
        all.iter().all(|&b| b <= self.b00 && b >= self.b11)
    }

    fn value(&self, class: SenderClass) -> u8 {
        match class {
            SenderClass::Omega00 => self.b00,
            SenderClass::Omega10 => self.b10,
            SenderClass::Omega01 => self.b01,
            SenderClass::Omega11 => self.b11,
        }
    }

    /// The pure policy this vector describes on `game`.
    pub fn policy(&self, game: &GameInstance) -> Result<Policy> {
        game.require_strict_senders()?;
        let values = (0..game.len())
            .map(|i| {
                let c = game.classify_state(i);
                let class = c.resolved_class();
                let action = if c.in_consensus {
                    // consensus action 0 means p = 1
                    u8::from(class == SenderClass::Omega00)
                } else {
                    self.value(class)
                };
                f64::from(action)
            })
            .collect();
        Ok(Policy::from_clamped(values))
    }
}

/// The four surviving class vectors, in tie-breaking order.
pub const PSTAR: [ClassVector; 4] = [
    ClassVector::new(1, 1, 1, 1),
    ClassVector::new(0, 0, 0, 0),
    ClassVector::new(1, 1, 0, 0),
    ClassVector::new(1, 0, 1, 0),
];

pub fn enumerate_pstar(game: &GameInstance) -> Result<Vec<Policy>> {
    PSTAR.iter().map(|v| v.policy(game)).collect()
}

pub fn solve_receiver(game: &GameInstance) -> Result<DesignReport> {
    let mut best: Option<(f64, Policy)> = None;
    for p in enumerate_pstar(game)? {
        let v = game.expected_utilities(&p)?.v;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, p));
        }
    }
    let (_, policy) = best.ok_or_else(|| Error::Internal("empty candidate list".into()))?;
    if !check_implementable(game, &policy, Tolerances::default())?.implementable {
        return Err(Error::Internal("receiver-optimal candidate is not implementable".into()));
    }
    DesignReport::evaluate(game, policy, None, None, PSTAR.len())
}
