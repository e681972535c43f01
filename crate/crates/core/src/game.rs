//! Game instances, preferences, state classification and expected utilities.
//!
//! A game has a finite list of states with a common prior. At every state each
//! of the two senders and the receiver has a payoff for action `0` and for
//! action `1`. A [`Policy`] gives, per state, the probability that action `0`
//! is recommended.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Witness};

/// Priors must sum to one within this tolerance.
pub const PRIOR_SUM_TOLERANCE: f64 = 1e-9;

/// Payoffs indexed by action: `[payoff(0), payoff(1)]`.
pub type Payoff = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub label: String,
    pub prior: f64,
    pub u1: Payoff,
    pub u2: Payoff,
    pub v: Payoff,
}

impl State {
    pub fn new(label: impl Into<String>, prior: f64, u1: Payoff, u2: Payoff, v: Payoff) -> Self {
        State {
            label: label.into(),
            prior,
            u1,
            u2,
            v,
        }
    }

    pub fn payoff(&self, agent: Agent) -> Payoff {
        match agent {
            Agent::Sender1 => self.u1,
            Agent::Sender2 => self.u2,
            Agent::Receiver => self.v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agent {
    Sender1,
    Sender2,
    Receiver,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    PrefersZero,
    PrefersOne,
    Indifferent,
}

impl Preference {
    /// Strict preference under tolerance `eps`.
    pub fn of(payoff: Payoff, eps: f64) -> Self {
        if payoff[0] > payoff[1] + eps {
            Preference::PrefersZero
        } else if payoff[1] > payoff[0] + eps {
            Preference::PrefersOne
        } else {
            Preference::Indifferent
        }
    }

    pub fn is_strict(self) -> bool {
        self != Preference::Indifferent
    }

    /// The strictly preferred action, if any.
    pub fn action(self) -> Option<u8> {
        match self {
            Preference::PrefersZero => Some(0),
            Preference::PrefersOne => Some(1),
            Preference::Indifferent => None,
        }
    }

    /// Indifference counts as preferring action `0`.
    pub fn resolved(self) -> u8 {
        self.action().unwrap_or(0)
    }
}

/// Which action each sender strictly prefers: `Omega{a}{b}` means sender 1
/// prefers `a` and sender 2 prefers `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SenderClass {
    #[serde(rename = "00")]
    Omega00,
    #[serde(rename = "01")]
    Omega01,
    #[serde(rename = "10")]
    Omega10,
    #[serde(rename = "11")]
    Omega11,
}

impl SenderClass {
    pub fn from_actions(a: u8, b: u8) -> Self {
        match (a, b) {
            (0, 0) => SenderClass::Omega00,
            (0, _) => SenderClass::Omega01,
            (_, 0) => SenderClass::Omega10,
            _ => SenderClass::Omega11,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateClassification {
    /// Strict class; `None` when either sender is indifferent.
    pub class: Option<SenderClass>,
    pub sender1: Preference,
    pub sender2: Preference,
    pub receiver: Preference,
    /// Sender 1 and the receiver do not strictly oppose each other.
    pub in_agreement: bool,
    /// Both senders strictly share a preference and the receiver shares it or
    /// is indifferent.
    pub in_consensus: bool,
    /// Receiver gain per unit of sender-1 loss; present exactly on
    /// disagreement states.
    pub resistance: Option<f64>,
}

impl StateClassification {
    /// Class with indifferent senders counted as preferring `0`.
    pub fn resolved_class(&self) -> SenderClass {
        SenderClass::from_actions(self.sender1.resolved(), self.sender2.resolved())
    }

    pub fn has_indifferent_sender(&self) -> bool {
        self.class.is_none()
    }

    /// Disagreement state inside `Omega00` (the receiver prefers 1).
    pub fn is_disagreement_zero(&self) -> bool {
        !self.in_agreement && self.class == Some(SenderClass::Omega00)
    }

    /// Disagreement state inside `Omega11` (the receiver prefers 0).
    pub fn is_disagreement_one(&self) -> bool {
        !self.in_agreement && self.class == Some(SenderClass::Omega11)
    }

    pub fn is_agreement_zero(&self) -> bool {
        self.in_agreement && self.class == Some(SenderClass::Omega00)
    }

    pub fn is_agreement_one(&self) -> bool {
        self.in_agreement && self.class == Some(SenderClass::Omega11)
    }
}

/// A validated game. Construct with [`GameInstance::new`].
#[derive(Clone, Debug, PartialEq)]
pub struct GameInstance {
    states: Vec<State>,
    epsilon: f64,
    derived: Derived,
}

/// Per-game facts recomputed whenever states or epsilon change, so solvers
/// can scan them without touching the payoff records.
#[derive(Clone, Debug, PartialEq)]
struct Derived {
    prefs: Vec<[Preference; 3]>,
    first_indifferent_sender: Option<usize>,
    first_divergent: Option<usize>,
    receiver_constant: [f64; 2],
    v_scale: f64,
}

impl Derived {
    fn new(states: &[State], eps: f64) -> Self {
        let mut d = Derived {
            prefs: Vec::with_capacity(states.len()),
            first_indifferent_sender: None,
            first_divergent: None,
            receiver_constant: [0.0; 2],
            v_scale: 1.0,
        };
        for (i, s) in states.iter().enumerate() {
            let prefs = [Preference::of(s.u1, eps), Preference::of(s.u2, eps), Preference::of(s.v, eps)];
            if d.first_indifferent_sender.is_none() && !(prefs[0].is_strict() && prefs[1].is_strict()) {
                d.first_indifferent_sender = Some(i);
            }
            let close = (0..2).all(|a| (s.u1[a] - s.u2[a]).abs() <= eps);
            if d.first_divergent.is_none() && (!close || prefs[0] != prefs[1]) {
                d.first_divergent = Some(i);
            }
            d.prefs.push(prefs);
            d.receiver_constant[0] += s.prior * s.v[0];
            d.receiver_constant[1] += s.prior * s.v[1];
            d.v_scale = d.v_scale.max(s.v[0].abs()).max(s.v[1].abs());
        }
        d
    }
}

impl GameInstance {
    /// Validates raw states. Payoffs are kept verbatim.
    pub fn new(states: Vec<State>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyStateList);
        }
        let mut labels = HashSet::with_capacity(states.len());
        for s in &states {
            if !labels.insert(s.label.as_str()) {
                return Err(Error::DuplicateLabel(s.label.clone()));
            }
            let fields: [(&'static str, &[f64]); 4] = [
                ("prior", std::slice::from_ref(&s.prior)),
                ("u1", &s.u1),
                ("u2", &s.u2),
                ("v", &s.v),
            ];
            for (field, values) in fields {
                if values.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFiniteValue {
                        label: s.label.clone(),
                        field,
                    });
                }
            }
            if s.prior <= 0.0 {
                return Err(Error::NonPositivePrior {
                    label: s.label.clone(),
                    prior: s.prior,
                });
            }
        }
        let sum: f64 = states.iter().map(|s| s.prior).sum();
        let deviation = sum - 1.0;
        if deviation.abs() > PRIOR_SUM_TOLERANCE {
            return Err(Error::PriorSumMismatch { sum, deviation });
        }
        Ok(GameInstance::assemble(states, 0.0))
    }

    fn assemble(states: Vec<State>, epsilon: f64) -> Self {
        let derived = Derived::new(&states, epsilon);
        GameInstance {
            states,
            epsilon,
            derived,
        }
    }

    /// Sets the strict-preference tolerance (default 0).
    pub fn with_epsilon(self, epsilon: f64) -> Self {
        GameInstance::assemble(self.states, epsilon.max(0.0))
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &State {
        &self.states[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s.label == label)
    }

    pub fn priors(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.prior)
    }

    pub fn prefers(&self, agent: Agent, state: usize) -> Preference {
        self.derived.prefs[state][agent as usize]
    }

    /// `earlier ≺ later`: one sender strictly prefers 0 at `later` while the
    /// other strictly prefers 1 at `earlier`.
    pub fn precedes(&self, earlier: usize, later: usize) -> bool {
        use Preference::*;
        let p = |agent, s| self.prefers(agent, s);
        (p(Agent::Sender1, later) == PrefersZero && p(Agent::Sender2, earlier) == PrefersOne)
            || (p(Agent::Sender2, later) == PrefersZero && p(Agent::Sender1, earlier) == PrefersOne)
    }

    pub fn classify_state(&self, i: usize) -> StateClassification {
        let s = &self.states[i];
        let sender1 = self.prefers(Agent::Sender1, i);
        let sender2 = self.prefers(Agent::Sender2, i);
        let receiver = self.prefers(Agent::Receiver, i);
        let class = match (sender1.action(), sender2.action()) {
            (Some(a), Some(b)) => Some(SenderClass::from_actions(a, b)),
            _ => None,
        };
        let in_agreement = match (sender1.action(), receiver.action()) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        };
        let in_consensus = match (sender1.action(), sender2.action()) {
            (Some(a), Some(b)) if a == b => receiver.action().is_none_or(|c| c == a),
            _ => false,
        };
        let resistance = if in_agreement {
            None
        } else {
            Some((s.v[1] - s.v[0]) / (s.u1[0] - s.u1[1]))
        };
        StateClassification {
            class,
            sender1,
            sender2,
            receiver,
            in_agreement,
            in_consensus,
            resistance,
        }
    }

    pub fn classify(&self) -> Vec<StateClassification> {
        (0..self.len()).map(|i| self.classify_state(i)).collect()
    }

    pub fn has_indifferent_sender(&self) -> bool {
        self.derived.first_indifferent_sender.is_some()
    }

    /// First state where a sender is indifferent, as an error.
    pub fn require_strict_senders(&self) -> Result<()> {
        match self.derived.first_indifferent_sender {
            Some(i) => Err(Error::IndifferentSenderState(self.states[i].label.clone())),
            None => Ok(()),
        }
    }

    /// Senders share utilities: payoffs equal within epsilon and identical
    /// preference at every state.
    pub fn require_common_interest(&self) -> Result<()> {
        match self.derived.first_divergent {
            Some(i) => Err(Error::NotCommonInterest(self.states[i].label.clone())),
            None => Ok(()),
        }
    }

    pub fn is_common_interest(&self) -> bool {
        self.derived.first_divergent.is_none()
    }

    /// Prior expectation of `agent`'s payoff under a constant action.
    pub fn prior_expectation(&self, agent: Agent, action: usize) -> f64 {
        self.states.iter().map(|s| s.prior * s.payoff(agent)[action]).sum()
    }

    /// The receiver's no-information guarantee.
    pub fn beta(&self) -> f64 {
        let [v0, v1] = self.derived.receiver_constant;
        v0.max(v1)
    }

    /// Action attaining [`beta`](Self::beta); ties go to action 1.
    pub fn beta_action(&self) -> u8 {
        let [v0, v1] = self.derived.receiver_constant;
        u8::from(v0 <= v1)
    }

    pub fn expected_utilities(&self, policy: &Policy) -> Result<Utilities> {
        self.check_len(policy.len())?;
        let mut out = Utilities::default();
        for (s, &p) in self.states.iter().zip(policy.values()) {
            out.u1 += s.prior * mix(s.u1, p);
            out.u2 += s.prior * mix(s.u2, p);
            out.v += s.prior * mix(s.v, p);
        }
        Ok(out)
    }

    /// Swaps the two senders, so sender-1 tools optimize for sender 2.
    pub fn swap_senders(&self) -> GameInstance {
        let states = self
            .states
            .iter()
            .map(|s| State {
                u1: s.u2,
                u2: s.u1,
                ..s.clone()
            })
            .collect();
        GameInstance::assemble(states, self.epsilon)
    }

    /// Largest receiver payoff magnitude, at least 1.
    pub(crate) fn v_scale(&self) -> f64 {
        self.derived.v_scale
    }

    pub(crate) fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }

    pub fn witness_labels(&self, w: Witness) -> (String, String) {
        (self.states[w.earlier].label.clone(), self.states[w.later].label.clone())
    }
}

/// Expected payoff when action 0 is played with probability `p`.
#[inline]
pub fn mix(payoff: Payoff, p: f64) -> f64 {
    p * payoff[0] + (1.0 - p) * payoff[1]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Utilities {
    pub u1: f64,
    pub u2: f64,
    pub v: f64,
}

/// Per-state probability of recommending action 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Policy(Vec<f64>);

impl Policy {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, x)| !(0.0..=1.0).contains(*x))
        {
            return Err(Error::InvalidProbability { index, value });
        }
        Ok(Policy(values))
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Policy::new(vec![value; n])
    }

    /// Clamps into `[0, 1]`; for values produced by arithmetic that may
    /// overshoot by rounding.
    pub(crate) fn from_clamped(values: Vec<f64>) -> Self {
        Policy(values.into_iter().map(|x| x.clamp(0.0, 1.0)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_abs_diff(&self, other: &Policy) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for Policy {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn g1() -> GameInstance {
        let mu = 1.0 / 6.0;
        GameInstance::new(vec![
            State::new("w1", mu, [0.0, 1.0], [0.0, 1.0], [0.0, 2.0]),
            State::new("w2", mu, [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]),
            State::new("w3", mu, [1.0, 0.0], [1.0, 0.0], [0.0, 1.9]),
            State::new("w4", mu, [1.0, 0.0], [1.0, 0.0], [0.0, 2.1]),
            State::new("w5", mu, [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]),
            State::new("w6", mu, [0.0, 1.0], [0.0, 1.0], [2.0, 0.0]),
        ])
        .unwrap()
    }

    pub fn policy(values: &[f64]) -> Policy {
        Policy::new(values.to_vec()).unwrap()
    }
}
