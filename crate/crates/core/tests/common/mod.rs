#![allow(dead_code)]

use cheaptalk::generate::{dirichlet_prior, random_game, Profile};
use cheaptalk::io::parse_game;
use cheaptalk::{GameInstance, SenderClass, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const G1_JSON: &[u8] = include_bytes!("../../fixtures/g1.json");

pub fn g1() -> GameInstance {
    parse_game(G1_JSON).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Payoffs drawn from {-1, 0, 1}, so indifference and exact ties are common.
pub fn tie_game(seed: u64, n: usize, common: bool) -> GameInstance {
    let mut rng = rng(seed ^ 0x7469_6573);
    let priors = dirichlet_prior(&mut rng, n);
    let draw = |rng: &mut ChaCha8Rng| [rng.random_range(-1..=1) as f64, rng.random_range(-1..=1) as f64];
    let states = priors
        .into_iter()
        .enumerate()
        .map(|(i, prior)| {
            let u1 = draw(&mut rng);
            let u2 = if common { u1 } else { draw(&mut rng) };
            let v = draw(&mut rng);
            State::new(format!("t{i}"), prior, u1, u2, v)
        })
        .collect();
    GameInstance::new(states).unwrap()
}

/// Cycles through common-interest, general, tie-heavy and tie-heavy common
/// games.
pub fn mixed_game(seed: u64, n: usize) -> GameInstance {
    match seed % 4 {
        0 => random_game(seed, n, Profile::CommonInterest),
        1 => random_game(seed, n, Profile::General),
        2 => tie_game(seed, n, false),
        _ => tie_game(seed, n, true),
    }
}

/// Uniform values, or values from {0, 1/2, 1} to provoke exact equalities.
pub fn random_values(rng: &mut impl Rng, n: usize, coarse: bool) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if coarse {
                rng.random_range(0..=2) as f64 / 2.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect()
}

pub fn has_split_class(game: &GameInstance) -> bool {
    game.classify()
        .iter()
        .any(|c| matches!(c.class, Some(SenderClass::Omega10 | SenderClass::Omega01)))
}
