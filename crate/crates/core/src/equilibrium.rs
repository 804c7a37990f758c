//! Belief-based equilibria: checking, payoff sets, the quasiconcave
//! envelope, two-posterior construction, support reduction and the
//! message-form expansion.
//!
//! An equilibrium is a finite Bayes-plausible distribution over posteriors,
//! a receiver mixture at each posterior supported on its best replies, and
//! sender interim payoffs. Each state in a posterior's support must make the
//! sender indifferent between that posterior and weakly prefer it to every
//! other one.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::best_reply::{value_profile, ValueInterval, ValueProfile};
use crate::error::{Error, Result};
use crate::game::{Belief, Game, State};
use crate::intervals::IntervalUnion;
use crate::rational::{self, dot, format_rational, get, one, zero, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Posterior {
    pub mu: Rational,
    pub weight: Rational,
    pub mix: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equilibrium {
    pub support: Vec<Posterior>,
    pub interim: [Rational; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub distribution: Vec<(Rational, Rational)>,
    pub interim: [Rational; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptySupport,
    Dimension { posterior: usize },
    BeliefOutOfRange { posterior: usize },
    DuplicateBelief { posterior: usize },
    NonPositiveWeight { posterior: usize },
    WeightsDoNotSumToOne,
    BayesPlausibility,
    MixNotDistribution { posterior: usize },
    MixOutsideBestReply { posterior: usize, action: usize },
    Incentive { state: State, at: usize, deviation: usize },
    InterimMismatch { state: State, computed: Rational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptySupport => write!(f, "support is empty"),
            Violation::Dimension { posterior } => {
                write!(f, "mixture at posterior {posterior} has the wrong length")
            }
            Violation::BeliefOutOfRange { posterior } => {
                write!(f, "posterior {posterior} is outside [0, 1]")
            }
            Violation::DuplicateBelief { posterior } => {
                write!(f, "posterior {posterior} repeats an earlier belief")
            }
            Violation::NonPositiveWeight { posterior } => {
                write!(f, "posterior {posterior} has nonpositive weight")
            }
            Violation::WeightsDoNotSumToOne => write!(f, "weights do not sum to 1"),
            Violation::BayesPlausibility => write!(f, "expected posterior differs from the prior"),
            Violation::MixNotDistribution { posterior } => {
                write!(f, "mixture at posterior {posterior} is not a probability vector")
            }
            Violation::MixOutsideBestReply { posterior, action } => write!(
                f,
                "action {action} is played at posterior {posterior} but is not a best reply"
            ),
            Violation::Incentive { state, at, deviation } => write!(
                f,
                "in state {state:?} the sender strictly prefers posterior {deviation} to posterior {at}"
            ),
            Violation::InterimMismatch { state, computed } => write!(
                f,
                "interim payoff in state {state:?} should be {}",
                format_rational(computed)
            ),
        }
    }
}

impl Equilibrium {
    pub fn babbling(prior: Rational, mix: Vec<Rational>, interim: [Rational; 2]) -> Self {
        Equilibrium {
            support: vec![Posterior {
                mu: prior,
                weight: one(),
                mix,
            }],
            interim,
        }
    }

    pub fn is_babbling(&self) -> bool {
        self.support.len() == 1
    }

    pub fn beliefs(&self) -> Vec<Rational> {
        self.support.iter().map(|p| p.mu.clone()).collect()
    }

    pub fn outcome(&self) -> Outcome {
        Outcome {
            distribution: self
                .support
                .iter()
                .map(|p| (p.mu.clone(), p.weight.clone()))
                .collect(),
            interim: self.interim.clone(),
        }
    }

    /// Support ordered by belief.
    pub fn sorted(&self) -> Equilibrium {
        let mut e = self.clone();
        e.support.sort_by(|a, b| a.mu.cmp(&b.mu));
        e
    }

    pub fn to_json(&self) -> Value {
        json!({
            "support": self.support.iter().map(|p| json!({
                "mu": rational::to_json(&p.mu),
                "weight": rational::to_json(&p.weight),
                "mix": rational::vec_to_json(&p.mix),
            })).collect::<Vec<_>>(),
            "interim": [rational::to_json(&self.interim[0]), rational::to_json(&self.interim[1])],
        })
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let raw = get(doc, "support", "")?
            .as_array()
            .ok_or_else(|| Error::schema("support", "expected an array of posteriors"))?;
        let support = raw
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let path = format!("support[{i}]");
                Ok(Posterior {
                    mu: rational::from_json(get(p, "mu", &path)?, &format!("{path}.mu"))?,
                    weight: rational::from_json(get(p, "weight", &path)?, &format!("{path}.weight"))?,
                    mix: rational::vec_from_json(get(p, "mix", &path)?, &format!("{path}.mix"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let interim = rational::vec_from_json(get(doc, "interim", "")?, "interim")?;
        let interim: [Rational; 2] = interim
            .try_into()
            .map_err(|_| Error::validation("interim", "expected one payoff per state"))?;
        Ok(Equilibrium { support, interim })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_json(&rational::parse_document(text)?)
    }
}

/// Sender payoff `u_S(state) · mix`.
fn sender_payoff(g: &Game, state: State, mix: &[Rational]) -> Rational {
    dot(&g.sender_vector(state), mix)
}

/// Evaluates every equilibrium clause exactly; an empty list means `e` is an
/// equilibrium of `g`.
pub fn check_equilibrium(g: &Game, e: &Equilibrium) -> Vec<Violation> {
    let n = g.num_actions();
    let mut out = Vec::new();
    if e.support.is_empty() {
        out.push(Violation::EmptySupport);
        return out;
    }
    for (k, p) in e.support.iter().enumerate() {
        if p.mix.len() != n {
            out.push(Violation::Dimension { posterior: k });
        }
        if p.mu.is_negative() || p.mu > one() {
            out.push(Violation::BeliefOutOfRange { posterior: k });
        }
        if e.support[..k].iter().any(|q| q.mu == p.mu) {
            out.push(Violation::DuplicateBelief { posterior: k });
        }
        if !p.weight.is_positive() {
            out.push(Violation::NonPositiveWeight { posterior: k });
        }
    }
    if !out.is_empty() {
        return out;
    }
    let total: Rational = e.support.iter().map(|p| &p.weight).sum();
    if !total.is_one() {
        out.push(Violation::WeightsDoNotSumToOne);
    }
    let mean: Rational = e.support.iter().map(|p| &p.weight * &p.mu).sum();
    if &mean != g.prior() {
        out.push(Violation::BayesPlausibility);
    }
    let partition = crate::best_reply::best_reply_partition(g);
    for (k, p) in e.support.iter().enumerate() {
        let total: Rational = p.mix.iter().sum();
        if !total.is_one() || p.mix.iter().any(|x| x.is_negative()) {
            out.push(Violation::MixNotDistribution { posterior: k });
            continue;
        }
        let best = partition.actions_at(&p.mu);
        for (a, x) in p.mix.iter().enumerate() {
            if !x.is_zero() && !best.contains(&a) {
                out.push(Violation::MixOutsideBestReply { posterior: k, action: a });
            }
        }
    }
    for state in State::ALL {
        let payoffs: Vec<Rational> = e
            .support
            .iter()
            .map(|p| sender_payoff(g, state, &p.mix))
            .collect();
        let best = payoffs.iter().max().expect("nonempty").clone();
        for (k, p) in e.support.iter().enumerate() {
            let belief = Belief::new(p.mu.clone()).expect("range checked");
            if belief.supports(state) && payoffs[k] < best {
                let deviation = payoffs.iter().position(|x| *x == best).expect("max exists");
                out.push(Violation::Incentive { state, at: k, deviation });
            }
        }
        if e.interim[state.index()] != best {
            out.push(Violation::InterimMismatch { state, computed: best });
        }
    }
    out
}

pub fn is_equilibrium(g: &Game, e: &Equilibrium) -> bool {
    check_equilibrium(g, e).is_empty()
}

/// Union of the value intervals over cells meeting `[0, mu0)` (left) or
/// `(mu0, 1]` (right), as `(min, max)`.
fn side_hull(profile: &ValueProfile, mu0: &Rational, left: bool) -> (Rational, Rational) {
    let vals: Vec<&ValueInterval> = profile
        .cells()
        .iter()
        .zip(profile.values())
        .filter(|(c, _)| if left { c.span.lo() < mu0 } else { c.span.hi() > mu0 })
        .map(|(_, v)| v)
        .collect();
    let lo = vals.iter().map(|v| &v.lo).min().expect("nonempty side").clone();
    let hi = vals.iter().map(|v| &v.hi).max().expect("nonempty side").clone();
    (lo, hi)
}

/// `V(mu0)` together with every payoff shared by a belief on each side of
/// `mu0`.
pub fn payoff_set(profile: &ValueProfile, mu0: &Rational) -> IntervalUnion {
    let v0 = profile.value_at(mu0);
    let (l_lo, l_hi) = side_hull(profile, mu0, true);
    let (r_lo, r_hi) = side_hull(profile, mu0, false);
    let lo = l_lo.max(r_lo);
    let hi = l_hi.min(r_hi);
    IntervalUnion::new(vec![(v0.lo.clone(), v0.hi.clone()), (lo, hi)])
}

pub fn equilibrium_payoff_set(g: &Game) -> Result<IntervalUnion> {
    Ok(payoff_set(&value_profile(g)?, g.prior()))
}

/// `min(max of V over [0, mu0], max of V over [mu0, 1])`.
pub fn envelope(profile: &ValueProfile, mu0: &Rational) -> Rational {
    let v0 = &profile.value_at(mu0).hi;
    let left = side_hull(profile, mu0, true).1.max(v0.clone());
    let right = side_hull(profile, mu0, false).1.max(v0.clone());
    left.min(right)
}

pub fn quasiconcave_envelope(g: &Game, mu0: &Belief) -> Result<Rational> {
    let mu = mu0.value();
    if mu.is_zero() || mu.is_one() {
        return Err(Error::validation("prior", "envelope needs a prior strictly inside (0, 1)"));
    }
    Ok(envelope(&value_profile(g)?, mu))
}

/// Outermost beliefs on either side of `mu0` whose value interval contains
/// `s`.
pub fn extreme_support_in(
    profile: &ValueProfile,
    mu0: &Rational,
    s: &Rational,
) -> Result<(Rational, Rational)> {
    if profile.value_at(mu0).contains(s) {
        return Err(Error::BabblingSuffices(s.clone()));
    }
    let cells = profile.cells();
    let values = profile.values();
    // Point cells are scanned first from each end; an open cell containing
    // `s` is always preceded by a point cell that contains it too.
    let left = (0..cells.len())
        .find(|&i| cells[i].span.lo() < mu0 && values[i].contains(s))
        .map(|i| cells[i].span.lo().clone());
    let right = (0..cells.len())
        .rev()
        .find(|&i| cells[i].span.hi() > mu0 && values[i].contains(s))
        .map(|i| cells[i].span.hi().clone());
    match (left, right) {
        (Some(l), Some(r)) if &l < mu0 && &r > mu0 => Ok((l, r)),
        _ => Err(Error::PayoffNotAttainable(s.clone())),
    }
}

pub fn extreme_support(g: &Game, s: &Rational) -> Result<(Belief, Belief)> {
    let (mu, mu_prime) = extreme_support_in(&value_profile(g)?, g.prior(), s)?;
    Ok((Belief::new(mu)?, Belief::new(mu_prime)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportChoice {
    Extreme,
    Explicit(Rational, Rational),
}

/// Deterministic mixture over `actions` with sender value `s`: the first
/// action worth exactly `s`, else the lexicographically first bracketing
/// pair `(i, j)` with weight `(s - v_i)/(v_j - v_i)` on `j`.
pub fn mixture_for_payoff(values: &[Rational], actions: &[usize], s: &Rational) -> Option<Vec<Rational>> {
    let n = values.len();
    let mut mix = vec![zero(); n];
    if let Some(&a) = actions.iter().find(|&&a| &values[a] == s) {
        mix[a] = one();
        return Some(mix);
    }
    for (x, &i) in actions.iter().enumerate() {
        for &j in &actions[x + 1..] {
            let (vi, vj) = (&values[i], &values[j]);
            if (vi < s && s < vj) || (vj < s && s < vi) {
                let q = (s - vi) / (vj - vi);
                mix[i] = one() - &q;
                mix[j] = q;
                return Some(mix);
            }
        }
    }
    None
}

/// Builds an equilibrium of the profile's game with sender payoff `s`.
pub fn construct_in(
    profile: &ValueProfile,
    mu0: &Rational,
    s: &Rational,
    choice: &SupportChoice,
) -> Result<Equilibrium> {
    let values = profile.action_values();
    let interim = [s.clone(), s.clone()];
    if profile.value_at(mu0).contains(s) && *choice == SupportChoice::Extreme {
        let mix = mixture_for_payoff(values, profile.actions_at(mu0), s).expect("s in hull");
        return Ok(Equilibrium::babbling(mu0.clone(), mix, interim));
    }
    let (mu, mu_prime) = match choice {
        SupportChoice::Extreme => extreme_support_in(profile, mu0, s)?,
        SupportChoice::Explicit(a, b) => {
            if !(a < mu0 && mu0 < b) || a.is_negative() || b > &one() {
                return Err(Error::InfeasibleSupport(format!(
                    "need mu < {} < mu', got ({}, {})",
                    format_rational(mu0),
                    format_rational(a),
                    format_rational(b)
                )));
            }
            (a.clone(), b.clone())
        }
    };
    let mix = |m: &Rational| {
        mixture_for_payoff(values, profile.actions_at(m), s).ok_or_else(|| {
            Error::InfeasibleSupport(format!(
                "{} is not in V({})",
                format_rational(s),
                format_rational(m)
            ))
        })
    };
    let (r, r_prime) = (mix(&mu)?, mix(&mu_prime)?);
    let w_prime = (mu0 - &mu) / (&mu_prime - &mu);
    Ok(Equilibrium {
        support: vec![
            Posterior {
                mu,
                weight: one() - &w_prime,
                mix: r,
            },
            Posterior {
                mu: mu_prime,
                weight: w_prime,
                mix: r_prime,
            },
        ],
        interim,
    })
}

pub fn construct_equilibrium(g: &Game, s: &Rational, choice: &SupportChoice) -> Result<Equilibrium> {
    let profile = value_profile(g)?;
    if !payoff_set(&profile, g.prior()).contains(s) {
        return Err(Error::PayoffNotAttainable(s.clone()));
    }
    construct_in(&profile, g.prior(), s, choice)
}

/// Keeps at most two posteriors: the prior itself if it is in the support,
/// else the lowest posterior on each side of the prior. Weights are re-solved
/// from Bayes plausibility.
pub fn caratheodory_reduce(g: &Game, e: &Equilibrium) -> Result<Equilibrium> {
    let violations = check_equilibrium(g, e);
    if !violations.is_empty() {
        return Err(Error::NotAnEquilibrium(join_violations(&violations)));
    }
    if e.support.len() <= 2 {
        return Ok(e.clone());
    }
    let mu0 = g.prior();
    if let Some(p) = e.support.iter().find(|p| &p.mu == mu0) {
        return Ok(Equilibrium::babbling(mu0.clone(), p.mix.clone(), e.interim.clone()));
    }
    let sorted = e.sorted();
    let below = sorted.support.iter().find(|p| &p.mu < mu0).expect("Bayes plausible");
    let above = sorted.support.iter().find(|p| &p.mu > mu0).expect("Bayes plausible");
    let w_above = (mu0 - &below.mu) / (&above.mu - &below.mu);
    Ok(Equilibrium {
        support: vec![
            Posterior {
                weight: one() - &w_above,
                ..below.clone()
            },
            Posterior {
                weight: w_above,
                ..above.clone()
            },
        ],
        interim: e.interim.clone(),
    })
}

pub(crate) fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Message-form strategies: `sender[θ][m]` is the probability of message `m`
/// in state `θ`, `receiver[m]` the mixed action after `m`, `beliefs[m]` the
/// posterior probability of the second state after `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageEquilibrium {
    pub messages: Vec<String>,
    pub sender: [Vec<Rational>; 2],
    pub receiver: Vec<Vec<Rational>>,
    pub beliefs: Vec<Rational>,
}

pub fn expand_to_messages(g: &Game, e: &Equilibrium) -> Result<MessageEquilibrium> {
    let violations = check_equilibrium(g, e);
    if !violations.is_empty() {
        return Err(Error::NotAnEquilibrium(join_violations(&violations)));
    }
    let prior = g.prior_belief();
    let sender = State::ALL.map(|state| {
        e.support
            .iter()
            .map(|p| {
                let post = Belief::new(p.mu.clone()).expect("checked");
                post.prob(state) * &p.weight / prior.prob(state)
            })
            .collect()
    });
    Ok(MessageEquilibrium {
        messages: (0..e.support.len()).map(|k| format!("m{k}")).collect(),
        sender,
        receiver: e.support.iter().map(|p| p.mix.clone()).collect(),
        beliefs: e.beliefs(),
    })
}

impl MessageEquilibrium {
    /// Probability of message `m` under the prior.
    pub fn message_probability(&self, prior: &Belief, m: usize) -> Rational {
        State::ALL
            .iter()
            .map(|&s| &self.sender[s.index()][m] * prior.prob(s))
            .sum()
    }

    /// Exact check of Bayes' rule for every message and state.
    pub fn satisfies_bayes_rule(&self, prior: &Belief) -> bool {
        (0..self.messages.len()).all(|m| {
            let pm = self.message_probability(prior, m);
            let beta = match Belief::new(self.beliefs[m].clone()) {
                Ok(b) => b,
                Err(_) => return false,
            };
            State::ALL.iter().all(|&s| {
                &self.sender[s.index()][m] * prior.prob(s) == beta.prob(s) * &pm
            })
        })
    }

    /// Groups messages by induced belief and recovers the belief distribution.
    pub fn collapse(&self, prior: &Belief, interim: [Rational; 2]) -> Outcome {
        let mut by_belief: BTreeMap<Rational, Rational> = BTreeMap::new();
        let mut order = Vec::new();
        for m in 0..self.messages.len() {
            let mu = self.beliefs[m].clone();
            if !by_belief.contains_key(&mu) {
                order.push(mu.clone());
            }
            *by_belief.entry(mu).or_insert_with(zero) += self.message_probability(prior, m);
        }
        Outcome {
            distribution: order
                .into_iter()
                .map(|mu| {
                    let w = by_belief[&mu].clone();
                    (mu, w)
                })
                .collect(),
            interim,
        }
    }
}
