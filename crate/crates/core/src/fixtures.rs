//! Built-in games and abstract value profiles.
//!
//! `ex1` and `ex2` are concrete transparent games with `v_S(a_i) = i`.
//! `ex3`, `ex4a` and `ex4b` are abstract profiles: only the ordering of the
//! cell values matters, so the breakpoints are evenly spaced and the values
//! are small integers.
//!
//! * `ex3`: breakpoints `i/6`, open-cell values `4, 2, 1, 5, 3, 6`, prior
//!   `5/12` in the value-1 cell.
//! * `ex4a`: breakpoints `i/5` for `i < 4`, values `4, 2, 5, 1`, and an
//!   action of value 3 that is optimal only at belief 1; prior `4/5`.
//! * `ex4b`: breakpoints `i/5`, values `4, 2, 5, 1, 3`, prior `7/10`.

use crate::best_reply::{Span, ValueInterval, ValueProfile};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::rational::{int, one, rat, zero, Rational};

pub const NAMES: [&str; 5] = ["ex1", "ex2", "ex3", "ex4a", "ex4b"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fixture {
    Game(Game),
    Profile { profile: ValueProfile, prior: Rational },
}

pub fn builtin_fixture(name: &str) -> Result<Fixture> {
    Ok(match name {
        "ex1" => Fixture::Game(example1()),
        "ex2" => Fixture::Game(example2()),
        "ex3" => Fixture::Profile {
            profile: example3(),
            prior: rat(5, 12),
        },
        "ex4a" => Fixture::Profile {
            profile: example4a(),
            prior: rat(4, 5),
        },
        "ex4b" => Fixture::Profile {
            profile: example4b(),
            prior: rat(7, 10),
        },
        other => return Err(Error::UnknownFixture(other.to_string())),
    })
}

fn rows(r: &[(i64, i64)]) -> Vec<[Rational; 2]> {
    r.iter().map(|&(a, b)| [int(a), int(b)]).collect()
}

fn identity_values(n: i64) -> Vec<Rational> {
    (0..n).map(int).collect()
}

pub fn example1() -> Game {
    Game::transparent(rat(1, 2), &identity_values(3), rows(&[(3, 3), (4, 0), (0, 4)]))
        .expect("valid fixture")
}

pub fn example2() -> Game {
    Game::transparent(
        rat(1, 2),
        &identity_values(4),
        rows(&[(3, 3), (5, -7), (4, 0), (0, 4)]),
    )
    .expect("valid fixture")
}

/// Step profile with breakpoints `i/denom`: open cell `i` has value
/// `values[i]` and the last open cell extends to 1. Interior breakpoints take
/// the hull of both neighbours, the endpoint cells take `at_zero` / `at_one`.
fn step_profile(denom: i64, values: &[i64], at_zero: (i64, i64), at_one: (i64, i64)) -> ValueProfile {
    let k = values.len() as i64;
    let right = |i: i64| if i == k { one() } else { rat(i, denom) };
    let mut cells = vec![(Span::Point(zero()), ValueInterval::new(int(at_zero.0), int(at_zero.1)))];
    for (i, &v) in values.iter().enumerate() {
        let i = i as i64;
        cells.push((Span::Open(rat(i, denom), right(i + 1)), ValueInterval::point(int(v))));
        if i + 1 < k {
            let next = values[i as usize + 1];
            cells.push((
                Span::Point(rat(i + 1, denom)),
                ValueInterval::new(int(v.min(next)), int(v.max(next))),
            ));
        }
    }
    cells.push((Span::Point(one()), ValueInterval::new(int(at_one.0), int(at_one.1))));
    ValueProfile::from_value_cells(cells).expect("valid fixture")
}

pub fn example3() -> ValueProfile {
    step_profile(6, &[4, 2, 1, 5, 3, 6], (4, 4), (6, 6))
}

pub fn example4a() -> ValueProfile {
    step_profile(5, &[4, 2, 5, 1], (4, 4), (1, 3))
}

pub fn example4b() -> ValueProfile {
    step_profile(5, &[4, 2, 5, 1, 3], (4, 4), (3, 3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::State;

    #[test]
    fn concrete_tables() {
        let g = example2();
        assert_eq!(g.receiver_utility(1, State::Theta2), &int(-7));
        assert_eq!(g.sender_vector(State::Theta2), identity_values(4));
    }

    #[test]
    fn abstract_profiles_have_expected_cells() {
        let p = example3();
        assert_eq!(p.cells().len(), 13);
        assert_eq!(p.value_at(&rat(5, 12)), &ValueInterval::point(int(1)));
        assert_eq!(p.value_at(&rat(1, 6)), &ValueInterval::new(int(2), int(4)));
        let q = example4a();
        assert_eq!(q.value_at(&one()), &ValueInterval::new(int(1), int(3)));
        assert_eq!(q.actions_at(&one()).len(), 2);
        assert_eq!(q.actions_at(&rat(9, 10)).len(), 1);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(builtin_fixture("ex9"), Err(Error::UnknownFixture(_))));
        for name in NAMES {
            builtin_fixture(name).unwrap();
        }
    }
}
