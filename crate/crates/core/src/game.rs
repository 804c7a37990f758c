//! Binary-state cheap-talk games with exact payoffs.

use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{self, get, join, Rational};

/// One of the two states. Beliefs are identified with the probability of
/// [`State::Theta2`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum State {
    Theta1,
    Theta2,
}

impl State {
    pub const ALL: [State; 2] = [State::Theta1, State::Theta2];

    pub fn index(self) -> usize {
        match self {
            State::Theta1 => 0,
            State::Theta2 => 1,
        }
    }
}

/// Probability of the second state, in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Belief(Rational);

impl Belief {
    pub fn new(mu: Rational) -> Result<Self> {
        if mu < Rational::zero() || mu > Rational::one() {
            return Err(Error::validation(
                "belief",
                format!("{} is outside [0, 1]", rational::format_rational(&mu)),
            ));
        }
        Ok(Belief(mu))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    /// Probability assigned to `state`.
    pub fn prob(&self, state: State) -> Rational {
        match state {
            State::Theta1 => Rational::one() - &self.0,
            State::Theta2 => self.0.clone(),
        }
    }

    pub fn supports(&self, state: State) -> bool {
        !self.prob(state).is_zero()
    }

    pub fn is_degenerate(&self) -> bool {
        self.0.is_zero() || self.0.is_one()
    }
}

impl fmt::Display for Belief {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::format_rational(&self.0))
    }
}

/// A cheap-talk game with two states, a full-support prior and `n >= 2`
/// receiver actions. Payoff rows follow the action order of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    state_labels: [String; 2],
    prior: Rational,
    actions: Vec<String>,
    sender: Vec<[Rational; 2]>,
    receiver: Vec<[Rational; 2]>,
}

impl Game {
    pub fn new(
        state_labels: [String; 2],
        prior: Rational,
        actions: Vec<String>,
        sender: Vec<[Rational; 2]>,
        receiver: Vec<[Rational; 2]>,
    ) -> Result<Self> {
        if state_labels[0] == state_labels[1] {
            return Err(Error::validation("states", "state labels must differ"));
        }
        if prior <= Rational::zero() || prior >= Rational::one() {
            return Err(Error::validation(
                "prior",
                format!(
                    "prior {} must lie strictly between 0 and 1",
                    rational::format_rational(&prior)
                ),
            ));
        }
        if actions.len() < 2 {
            return Err(Error::validation(
                "actions",
                format!("need at least two actions, got {}", actions.len()),
            ));
        }
        for (i, a) in actions.iter().enumerate() {
            if actions[..i].contains(a) {
                return Err(Error::validation(
                    format!("actions[{i}]"),
                    format!("duplicate action label `{a}`"),
                ));
            }
        }
        for (name, rows) in [("sender_utility", &sender), ("receiver_utility", &receiver)] {
            if rows.len() != actions.len() {
                return Err(Error::validation(
                    name,
                    format!("expected {} rows, got {}", actions.len(), rows.len()),
                ));
            }
        }
        Ok(Game {
            state_labels,
            prior,
            actions,
            sender,
            receiver,
        })
    }

    /// Game with default labels `theta1`, `theta2` and `a0..`.
    pub fn from_tables(
        prior: Rational,
        sender: Vec<[Rational; 2]>,
        receiver: Vec<[Rational; 2]>,
    ) -> Result<Self> {
        let actions = (0..sender.len()).map(|i| format!("a{i}")).collect();
        Game::new(
            ["theta1".into(), "theta2".into()],
            prior,
            actions,
            sender,
            receiver,
        )
    }

    /// Transparent game from a state-independent sender value per action.
    pub fn transparent(
        prior: Rational,
        sender_values: &[Rational],
        receiver: Vec<[Rational; 2]>,
    ) -> Result<Self> {
        let sender = sender_values
            .iter()
            .map(|v| [v.clone(), v.clone()])
            .collect();
        Game::from_tables(prior, sender, receiver)
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn prior(&self) -> &Rational {
        &self.prior
    }

    pub fn prior_belief(&self) -> Belief {
        Belief(self.prior.clone())
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn state_labels(&self) -> &[String; 2] {
        &self.state_labels
    }

    pub fn sender_utility(&self, action: usize, state: State) -> &Rational {
        &self.sender[action][state.index()]
    }

    pub fn receiver_utility(&self, action: usize, state: State) -> &Rational {
        &self.receiver[action][state.index()]
    }

    /// Column `u_S(state)` in action order.
    pub fn sender_vector(&self, state: State) -> Vec<Rational> {
        self.sender.iter().map(|row| row[state.index()].clone()).collect()
    }

    pub fn receiver_expected(&self, action: usize, mu: &Rational) -> Rational {
        let row = &self.receiver[action];
        &row[0] * (Rational::one() - mu) + &row[1] * mu
    }

    pub fn is_transparent(&self) -> bool {
        self.sender.iter().all(|row| row[0] == row[1])
    }

    /// The state-independent sender values `v_S`.
    pub fn sender_values(&self) -> Result<Vec<Rational>> {
        if !self.is_transparent() {
            return Err(Error::NotTransparent);
        }
        Ok(self.sender_vector(State::Theta1))
    }

    /// Same prior and receiver, different sender utility columns.
    pub fn with_sender_utility(&self, theta1: &[Rational], theta2: &[Rational]) -> Result<Game> {
        let n = self.num_actions();
        if theta1.len() != n || theta2.len() != n {
            return Err(Error::validation(
                "sender_utility",
                format!("expected columns of length {n}"),
            ));
        }
        let sender = theta1
            .iter()
            .zip(theta2)
            .map(|(a, b)| [a.clone(), b.clone()])
            .collect();
        Ok(Game {
            sender,
            ..self.clone()
        })
    }

    pub fn to_json(&self) -> Value {
        let rows = |m: &[[Rational; 2]]| {
            Value::Array(
                m.iter()
                    .map(|r| json!([rational::to_json(&r[0]), rational::to_json(&r[1])]))
                    .collect(),
            )
        };
        json!({
            "states": self.state_labels,
            "prior": rational::to_json(&self.prior),
            "actions": self.actions,
            "sender_utility": rows(&self.sender),
            "receiver_utility": rows(&self.receiver),
        })
    }
}

/// Parse and validate the JSON game document.
pub fn parse_game(text: &str) -> Result<Game> {
    let doc = rational::parse_document(text)?;
    game_from_json(&doc)
}

pub fn game_from_json(doc: &Value) -> Result<Game> {
    let states = get(doc, "states", "")?
        .as_array()
        .ok_or_else(|| Error::schema("states", "expected an array of state names"))?;
    if states.len() != 2 {
        return Err(Error::UnsupportedStateCount(states.len()));
    }
    let label = |i: usize| -> Result<String> {
        states[i]
            .as_str()
            .map(str::to_owned)
            .ok_or_else(|| Error::schema(format!("states[{i}]"), "expected a string"))
    };
    let state_labels = [label(0)?, label(1)?];
    let prior = rational::from_json(get(doc, "prior", "")?, "prior")?;
    let actions = get(doc, "actions", "")?
        .as_array()
        .ok_or_else(|| Error::schema("actions", "expected an array of action names"))?
        .iter()
        .enumerate()
        .map(|(i, a)| {
            a.as_str()
                .map(str::to_owned)
                .ok_or_else(|| Error::schema(format!("actions[{i}]"), "expected a string"))
        })
        .collect::<Result<Vec<_>>>()?;
    let sender = matrix_from_json(doc, "sender_utility")?;
    let receiver = matrix_from_json(doc, "receiver_utility")?;
    Game::new(state_labels, prior, actions, sender, receiver)
}

fn matrix_from_json(doc: &Value, key: &str) -> Result<Vec<[Rational; 2]>> {
    let rows = get(doc, key, "")?
        .as_array()
        .ok_or_else(|| Error::schema(key, "expected an array of [u(theta1), u(theta2)] rows"))?;
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let path = format!("{}[{i}]", join("", key));
            let cols = rational::vec_from_json(row, &path)?;
            match <[Rational; 2]>::try_from(cols) {
                Ok(pair) => Ok(pair),
                Err(cols) => {
                    if cols.len() > 2 {
                        Err(Error::UnsupportedStateCount(cols.len()))
                    } else {
                        Err(Error::validation(path, "expected one payoff per state"))
                    }
                }
            }
        })
        .collect()
}
