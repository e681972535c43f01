//! The mediator mechanism realizing a policy under truthful reporting.
//!
//! Both senders report a state; the mediator recommends action `0` with
//! probability `tau[m1][m2]`, where `m1` is sender 1's report and `m2` is
//! sender 2's. The diagonal reproduces the target policy. An off-diagonal
//! entry `(m1, m2)` is only reached when one sender lies, so it is pinned by
//! sender 1's preference at `m2` and sender 2's preference at `m1`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{mix, Agent, GameInstance, Policy};
use crate::implementability::{check_receiver_ic, check_sender_implementable, Tolerances};

/// Row-major recommendation probabilities; row = sender-1 report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TauMatrix(Vec<Vec<f64>>);

impl TauMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = entries.len();
        for row in &entries {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    rows: n,
                    cols: row.len(),
                    expected: n,
                });
            }
            if let Some((index, &value)) = row.iter().enumerate().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
                return Err(Error::InvalidProbability { index, value });
            }
        }
        Ok(TauMatrix(entries))
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        TauMatrix::new(vec![vec![value; n]; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, m1: usize, m2: usize) -> f64 {
        self.0[m1][m2]
    }

    pub fn set(&mut self, m1: usize, m2: usize, value: f64) {
        self.0[m1][m2] = value.clamp(0.0, 1.0);
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.0
    }

    pub fn diagonal(&self) -> Policy {
        Policy::from_clamped((0..self.len()).map(|i| self.0[i][i]).collect())
    }

    fn check_dims(&self, game: &GameInstance) -> Result<()> {
        if self.len() != game.len() {
            let cols = self.0.first().map_or(0, Vec::len);
            return Err(Error::DimensionMismatch {
                rows: self.len(),
                cols,
                expected: game.len(),
            });
        }
        Ok(())
    }
}

/// Builds a mechanism whose diagonal is `p` and under which truthful
/// reporting is an equilibrium for both senders.
///
/// Entry `(m1, m2)` with strict, opposite preferences (sender 1 at `m2`,
/// sender 2 at `m1`) gets the midpoint of `p(m1)` and `p(m2)`; shared
/// preference for 0 gives 0, for 1 gives 1. An indifferent sender places no
/// constraint on the entry, so it follows the other sender's preference.
pub fn build_tau(game: &GameInstance, p: &Policy) -> Result<TauMatrix> {
    game.check_len(p.len())?;
    let (ok, witness) = check_sender_implementable(game, p, Tolerances::default().order)?;
    if !ok {
        return Err(Error::NotSenderImplementable(witness.expect("violation has a witness")));
    }
    let n = game.len();
    let s1: Vec<Option<u8>> = (0..n).map(|i| game.prefers(Agent::Sender1, i).action()).collect();
    let s2: Vec<Option<u8>> = (0..n).map(|i| game.prefers(Agent::Sender2, i).action()).collect();
    let mut rows = vec![vec![0.0; n]; n];
    for (m1, row) in rows.iter_mut().enumerate() {
        for (m2, entry) in row.iter_mut().enumerate() {
            *entry = if m1 == m2 {
                p[m1]
            } else {
                match (s1[m2], s2[m1]) {
                    (Some(a), Some(b)) if a != b => 0.5 * (p[m1] + p[m2]),
                    (Some(1), _) | (None, Some(1)) => 1.0,
                    _ => 0.0,
                }
            };
        }
    }
    Ok(TauMatrix(rows))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Deviation {
    pub sender: u8,
    pub true_state: usize,
    pub report: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    /// Largest prior-weighted gain from a unilateral misreport, per sender.
    pub sender1_max_gain: f64,
    pub sender2_max_gain: f64,
    pub receiver_obedience_slacks: [f64; 2],
    pub worst_deviation: Option<Deviation>,
    pub certified: bool,
}

impl AuditReport {
    pub fn senders_certified(&self, tol: f64) -> bool {
        self.sender1_max_gain <= tol && self.sender2_max_gain <= tol
    }
}

/// Exhaustive O(n²) equilibrium audit of `tau` under truthful reporting.
/// Gains are evaluated state by state in the deviator's own utility.
pub fn audit_equilibrium(game: &GameInstance, tau: &TauMatrix, tol: Tolerances) -> Result<AuditReport> {
    tau.check_dims(game)?;
    let n = game.len();
    let mut worst: [Option<(f64, Deviation)>; 2] = [None, None];
    for truth in 0..n {
        let s = game.state(truth);
        let honest = tau.get(truth, truth);
        for report in (0..n).filter(|&r| r != truth) {
            let deviations = [
                (tau.get(report, truth), s.u1),
                (tau.get(truth, report), s.u2),
            ];
            for (k, (outcome, u)) in deviations.into_iter().enumerate() {
                let gain = s.prior * (mix(u, outcome) - mix(u, honest));
                let dev = Deviation {
                    sender: k as u8 + 1,
                    true_state: truth,
                    report,
                };
                if worst[k].is_none_or(|(g, _)| gain > g) {
                    worst[k] = Some((gain, dev));
                }
            }
        }
    }
    let max_gain = worst.map(|w| w.map_or(0.0, |(g, _)| g));
    let worst_deviation = match worst {
        [Some(a), Some(b)] => Some(if b.0 > a.0 { b.1 } else { a.1 }),
        _ => None,
    };
    let (obedient, slacks) = check_receiver_ic(game, &tau.diagonal(), tol.ic)?;
    let certified = max_gain.iter().all(|&g| g <= tol.order) && obedient;
    Ok(AuditReport {
        sender1_max_gain: max_gain[0],
        sender2_max_gain: max_gain[1],
        receiver_obedience_slacks: slacks,
        worst_deviation,
        certified,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub rounds: u64,
    pub state_counts: Vec<u64>,
    pub action0_counts: Vec<u64>,
    /// Empirical `P(action 0 | state)`; `None` for states never drawn.
    pub action0_frequency: Vec<Option<f64>>,
    pub avg_u1: f64,
    pub avg_u2: f64,
    pub avg_v: f64,
    /// Standard errors of the three averages.
    pub se_u1: f64,
    pub se_u2: f64,
    pub se_v: f64,
}

/// Monte Carlo run of the mediated game. States are drawn from the prior,
/// each sender reports `strategy[state]`, and the receiver follows the
/// recommendation. Fully determined by `seed`.
pub fn simulate(
    game: &GameInstance,
    tau: &TauMatrix,
    rounds: u64,
    seed: u64,
    strategy1: &[usize],
    strategy2: &[usize],
) -> Result<SimulationReport> {
    tau.check_dims(game)?;
    let n = game.len();
    for strategy in [strategy1, strategy2] {
        game.check_len(strategy.len())?;
        if let Some((state, &report)) = strategy.iter().enumerate().find(|(_, &r)| r >= n) {
            return Err(Error::InvalidStrategy { state, report });
        }
    }
    if rounds == 0 {
        return Err(Error::Internal("simulation needs at least one round".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = WeightedIndex::new(game.priors()).map_err(|e| Error::Internal(e.to_string()))?;
    let mut state_counts = vec![0u64; n];
    let mut action0_counts = vec![0u64; n];
    let mut sums = [0.0f64; 3];
    let mut squares = [0.0f64; 3];
    for _ in 0..rounds {
        let w = states.sample(&mut rng);
        let recommend_zero = rng.random::<f64>() < tau.get(strategy1[w], strategy2[w]);
        state_counts[w] += 1;
        let action = if recommend_zero {
            action0_counts[w] += 1;
            0
        } else {
            1
        };
        let s = game.state(w);
        for (k, u) in [s.u1, s.u2, s.v].into_iter().enumerate() {
            sums[k] += u[action];
            squares[k] += u[action] * u[action];
        }
    }
    let r = rounds as f64;
    let mean = sums.map(|s| s / r);
    let se: Vec<f64> = (0..3)
        .map(|k| {
            let var = (squares[k] / r - mean[k] * mean[k]).max(0.0);
            (var / r).sqrt()
        })
        .collect();
    let action0_frequency = state_counts
        .iter()
        .zip(&action0_counts)
        .map(|(&c, &a)| (c > 0).then(|| a as f64 / c as f64))
        .collect();
    Ok(SimulationReport {
        seed,
        rounds,
        state_counts,
        action0_counts,
        action0_frequency,
        avg_u1: mean[0],
        avg_u2: mean[1],
        avg_v: mean[2],
        se_u1: se[0],
        se_u2: se[1],
        se_v: se[2],
    })
}

/// Identity reporting strategy.
pub fn truthful(n: usize) -> Vec<usize> {
    (0..n).collect()
}
