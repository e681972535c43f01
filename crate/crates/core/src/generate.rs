//! Seeded random games.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::game::{GameInstance, Payoff, Preference, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// Both senders share one payoff vector.
    CommonInterest,
    /// Independent payoffs.
    General,
    /// Independent payoffs with no agent ever indifferent.
    Strict,
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "common-interest" | "common" => Ok(Profile::CommonInterest),
            "general" => Ok(Profile::General),
            "strict" => Ok(Profile::Strict),
            _ => Err(format!("unknown profile `{s}` (common-interest, general, strict)")),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::CommonInterest => "common-interest",
            Profile::General => "general",
            Profile::Strict => "strict",
        })
    }
}

fn payoff(rng: &mut impl Rng) -> Payoff {
    [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)]
}

/// Normalized exponential draws, i.e. a flat Dirichlet sample.
pub fn dirichlet_prior(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n)
        .map(|_| loop {
            let x: f64 = rng.sample(Exp1);
            if x > 0.0 {
                break x;
            }
        })
        .collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

/// Deterministic in `(seed, n, profile)`. Panics if `n == 0`.
pub fn random_game(seed: u64, n: usize, profile: Profile) -> GameInstance {
    assert!(n > 0, "a game needs at least one state");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let priors = dirichlet_prior(&mut rng, n);
    let states = priors
        .into_iter()
        .enumerate()
        .map(|(i, prior)| {
            let (u1, u2, v) = loop {
                let u1 = payoff(&mut rng);
                let u2 = match profile {
                    Profile::CommonInterest => u1,
                    _ => payoff(&mut rng),
                };
                let v = payoff(&mut rng);
                let strict = [u1, u2, v].iter().all(|&x| Preference::of(x, 0.0).is_strict());
                if profile != Profile::Strict || strict {
                    break (u1, u2, v);
                }
            };
            State::new(format!("s{i}"), prior, u1, u2, v)
        })
        .collect();
    GameInstance::new(states).expect("generated games are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Agent;

    #[test]
    fn deterministic() {
        assert_eq!(random_game(7, 5, Profile::Strict), random_game(7, 5, Profile::Strict));
        assert_ne!(random_game(7, 5, Profile::Strict), random_game(8, 5, Profile::Strict));
    }

    #[test]
    fn profiles() {
        let g = random_game(3, 50, Profile::CommonInterest);
        assert!(g.states().iter().all(|s| s.u1 == s.u2));
        assert!(g.is_common_interest());
        let g = random_game(3, 50, Profile::Strict);
        for agent in [Agent::Sender1, Agent::Sender2, Agent::Receiver] {
            assert!((0..50).all(|i| g.prefers(agent, i).is_strict()));
        }
        let total: f64 = g.priors().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parses_profile_names() {
        for p in [Profile::CommonInterest, Profile::General, Profile::Strict] {
            assert_eq!(p.to_string().parse::<Profile>().unwrap(), p);
        }
        assert!("x".parse::<Profile>().is_err());
    }
}
