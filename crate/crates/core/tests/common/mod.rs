//! Seeded random transparent games shared by the integration suites.

#![allow(dead_code)]

use cheaptalk::game::Game;
use cheaptalk::rational::{int, rat, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Transparent game with 2..=6 actions, integer payoffs in [-9, 9] and a
/// prior with denominator at most 12.
pub fn random_game(rng: &mut ChaCha8Rng) -> Game {
    let n = rng.gen_range(2..=6);
    let values: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-9..=9))).collect();
    let receiver = (0..n)
        .map(|_| [int(rng.gen_range(-9..=9)), int(rng.gen_range(-9..=9))])
        .collect();
    let q = rng.gen_range(2..=12);
    let p = rng.gen_range(1..q);
    Game::transparent(rat(p, q), &values, receiver).expect("random game is valid")
}

pub fn random_games(seed: u64, count: usize) -> Vec<Game> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_game(&mut rng)).collect()
}

/// Proptest strategy over the same family as [`random_game`], plus
/// non-transparent sender tables when `transparent` is false.
pub fn game_strategy(transparent: bool) -> impl proptest::strategy::Strategy<Value = Game> {
    use proptest::prelude::*;
    (2usize..=6)
        .prop_flat_map(move |n| {
            (
                proptest::collection::vec((-9i64..=9, -9i64..=9), n),
                proptest::collection::vec((-9i64..=9, -9i64..=9), n),
                (2i64..=12).prop_flat_map(|q| (1..q, Just(q))),
            )
        })
        .prop_map(move |(sender, receiver, (p, q))| {
            let receiver = receiver.iter().map(|&(a, b)| [int(a), int(b)]).collect();
            let sender = sender
                .iter()
                .map(|&(a, b)| if transparent { [int(a), int(a)] } else { [int(a), int(b)] })
                .collect();
            Game::from_tables(rat(p, q), sender, receiver).expect("strategy builds valid games")
        })
}
