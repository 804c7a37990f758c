//! Closed-form robustness verdicts for transparent binary-state games.
//!
//! Two characterizations are provided. The equilibrium-level one looks at a
//! two-posterior support `{mu, mu'}` and counts the receiver actions optimal
//! at its posteriors. The payoff-level one fixes the outermost support for a
//! payoff `s` and inspects the best-reply structure between its posteriors.
//! Both are stated for `s` above `V(mu0)`; payoffs below `V(mu0)` are
//! handled by the same tests with the order of sender values reversed.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::best_reply::{value_profile, ValueProfile};
use crate::equilibrium::{
    check_equilibrium, envelope, extreme_support_in, join_violations, payoff_set, Equilibrium,
};
use crate::error::{Error, Result};
use crate::game::{Belief, Game};
use crate::intervals::RobustPayoffSet;
use crate::rational::{format_rational, int, one, rat, zero, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    FullyRobust,
    Robust,
    NotRobust,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::FullyRobust => "fully_robust",
            Status::Robust => "robust",
            Status::NotRobust => "not_robust",
        }
    }

    pub fn is_robust(self) -> bool {
        self != Status::NotRobust
    }
}

/// Which condition decided a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rule {
    /// Babbling, or a support whose payoff a common best reply delivers.
    Babbling,
    /// Support `{0, 1}`.
    FullReveal,
    /// A degenerate posterior and at least three optimal actions in total.
    DegenerateThreeActions,
    /// At least four optimal actions in total.
    FourActions,
    /// `s` is a value at belief 0 or 1.
    EndpointValue,
    /// No action is optimal at both outermost posteriors.
    ActionChange,
    /// Three optimal actions at one outermost posterior.
    ThreeActions,
    /// Two actions worth at most `s` that are each optimal somewhere.
    TwoLowActions,
    None,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Babbling => "Prop1-babbling",
            Rule::FullReveal => "P2-cond1",
            Rule::DegenerateThreeActions => "P2-cond2",
            Rule::FourActions => "P2-cond3",
            Rule::EndpointValue => "P4-a",
            Rule::ActionChange => "P4-b",
            Rule::ThreeActions => "P4-c",
            Rule::TwoLowActions => "P4-sufficient",
            Rule::None => "none",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RobustnessVerdict {
    pub status: Status,
    pub rule: Rule,
    /// Every condition that held, in evaluation order.
    pub conditions: Vec<Rule>,
    pub notes: String,
}

impl RobustnessVerdict {
    fn decided(status: Status, rule: Rule, conditions: Vec<Rule>, notes: String) -> Self {
        RobustnessVerdict {
            status,
            rule,
            conditions,
            notes,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "status": self.status.as_str(),
            "rule": self.rule.as_str(),
            "conditions": self.conditions.iter().map(|r| r.as_str()).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

fn union_len(a: &[usize], b: &[usize]) -> usize {
    a.iter().chain(b).collect::<BTreeSet<_>>().len()
}

fn intersects(a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|x| b.contains(x))
}

/// Sender payoff of an equilibrium in a transparent game.
fn transparent_payoff(e: &Equilibrium) -> Result<Rational> {
    if e.interim[0] != e.interim[1] {
        return Err(Error::NotTransparent);
    }
    Ok(e.interim[0].clone())
}

/// Verdict for an equilibrium with at most two posteriors, given the value
/// profile of its game. The equilibrium itself is assumed to be valid.
pub fn classify_in(profile: &ValueProfile, mu0: &Rational, e: &Equilibrium) -> Result<RobustnessVerdict> {
    match e.support.len() {
        1 => {
            return Ok(RobustnessVerdict::decided(
                Status::FullyRobust,
                Rule::Babbling,
                vec![Rule::Babbling],
                "babbling equilibrium".into(),
            ))
        }
        2 => {}
        k => return Err(Error::UnsupportedSupportSize(k)),
    }
    let s = transparent_payoff(e)?;
    let sorted = e.sorted();
    let (mu, mu_prime) = (&sorted.support[0].mu, &sorted.support[1].mu);
    let a = profile.actions_at(mu);
    let a_prime = profile.actions_at(mu_prime);
    if profile.value_at(mu0).contains(&s) && intersects(a, a_prime) {
        return Ok(RobustnessVerdict::decided(
            Status::FullyRobust,
            Rule::Babbling,
            vec![Rule::Babbling],
            format!(
                "payoff {} lies in V(prior) and a common best reply attains it at both posteriors",
                format_rational(&s)
            ),
        ));
    }
    let total = union_len(a, a_prime);
    let degenerate = mu.is_zero() || mu_prime.is_one();
    let mut conditions = Vec::new();
    if mu.is_zero() && mu_prime.is_one() {
        conditions.push(Rule::FullReveal);
    }
    if degenerate && total >= 3 {
        conditions.push(Rule::DegenerateThreeActions);
    }
    if total >= 4 {
        conditions.push(Rule::FourActions);
    }
    let notes = format!(
        "support {{{}, {}}}, {} optimal actions in total",
        format_rational(mu),
        format_rational(mu_prime),
        total
    );
    Ok(match conditions.first() {
        Some(&rule) => RobustnessVerdict::decided(Status::Robust, rule, conditions, notes),
        None => RobustnessVerdict::decided(Status::NotRobust, Rule::None, conditions, notes),
    })
}

pub fn classify_two_posterior(g: &Game, e: &Equilibrium) -> Result<RobustnessVerdict> {
    if e.support.len() > 2 {
        return Err(Error::UnsupportedSupportSize(e.support.len()));
    }
    let violations = check_equilibrium(g, e);
    if !violations.is_empty() {
        return Err(Error::NotAnEquilibrium(join_violations(&violations)));
    }
    classify_in(&value_profile(g)?, g.prior(), e)
}

/// Payoff-level verdict for `s` outside `V(mu0)`, using the outermost
/// support of `s`.
pub fn robust_attainable_in(profile: &ValueProfile, mu0: &Rational, s: &Rational) -> Result<RobustnessVerdict> {
    let v0 = profile.value_at(mu0);
    if v0.contains(s) {
        return Err(Error::BabblingSuffices(s.clone()));
    }
    if !payoff_set(profile, mu0).contains(s) {
        return Err(Error::PayoffNotAttainable(s.clone()));
    }
    let above = s > &v0.hi;
    let (mu, mu_prime) = extreme_support_in(profile, mu0, s)?;
    let a = profile.actions_at(&mu);
    let a_prime = profile.actions_at(&mu_prime);
    let mut conditions = Vec::new();
    if profile.value_at(&zero()).contains(s) || profile.value_at(&one()).contains(s) {
        conditions.push(Rule::EndpointValue);
    }
    if !intersects(a, a_prime) {
        conditions.push(Rule::ActionChange);
    }
    if a.len() >= 3 || a_prime.len() >= 3 {
        conditions.push(Rule::ThreeActions);
    }
    let values = profile.action_values();
    let low = profile
        .partition()
        .used_actions()
        .into_iter()
        .filter(|&x| if above { &values[x] <= s } else { &values[x] >= s })
        .count();
    if low >= 2 {
        conditions.push(Rule::TwoLowActions);
    }
    let notes = format!(
        "outermost support {{{}, {}}}",
        format_rational(&mu),
        format_rational(&mu_prime)
    );
    Ok(match conditions.first() {
        Some(&rule) => RobustnessVerdict::decided(Status::Robust, rule, conditions, notes),
        None => RobustnessVerdict::decided(Status::NotRobust, Rule::None, conditions, notes),
    })
}

pub fn robust_attainable(g: &Game, s: &Rational) -> Result<RobustnessVerdict> {
    robust_attainable_in(&value_profile(g)?, g.prior(), s)
}

/// Sorted distinct action values inside `[lo, hi]`, with both bounds added.
fn candidates(profile: &ValueProfile, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut set: BTreeSet<Rational> = profile
        .action_values()
        .iter()
        .filter(|v| lo <= *v && *v <= hi)
        .cloned()
        .collect();
    set.insert(lo.clone());
    set.insert(hi.clone());
    set.into_iter().collect()
}

/// Membership by scanning candidate values and the open gaps between them;
/// `member` is only ever asked about payoffs in `[lo, hi]`.
fn scan(
    profile: &ValueProfile,
    mu0: &Rational,
    member: impl Fn(&Rational) -> Result<bool>,
) -> Result<RobustPayoffSet> {
    let eq_set = payoff_set(profile, mu0);
    let (lo, hi) = (eq_set.min().expect("V(prior) is nonempty"), eq_set.max().expect("nonempty"));
    let cands = candidates(profile, lo, hi);
    let point_in = cands.iter().map(&member).collect::<Result<Vec<_>>>()?;
    let mut gap_in = Vec::with_capacity(cands.len().saturating_sub(1));
    for w in cands.windows(2) {
        let at = |num: i64| &w[0] + (&w[1] - &w[0]) * rat(num, 4);
        let verdict = member(&at(2))?;
        for probe in [at(1), at(3)] {
            assert_eq!(
                member(&probe)?,
                verdict,
                "membership not constant on ({}, {})",
                format_rational(&w[0]),
                format_rational(&w[1])
            );
        }
        gap_in.push(verdict);
    }
    Ok(RobustPayoffSet::from_scan(&cands, &point_in, &gap_in))
}

pub fn robust_set_in(profile: &ValueProfile, mu0: &Rational) -> Result<RobustPayoffSet> {
    let eq_set = payoff_set(profile, mu0);
    let v0 = profile.value_at(mu0).clone();
    scan(profile, mu0, |s| {
        if v0.contains(s) {
            return Ok(true);
        }
        if !eq_set.contains(s) {
            return Ok(false);
        }
        Ok(robust_attainable_in(profile, mu0, s)?.status.is_robust())
    })
}

pub fn robust_payoff_set(g: &Game) -> Result<RobustPayoffSet> {
    robust_set_in(&value_profile(g)?, g.prior())
}

/// Checks the genericity assumptions of the simplified rule.
pub fn check_generic(profile: &ValueProfile) -> Result<()> {
    for (i, (c, v)) in profile.cells().iter().zip(profile.values()).enumerate() {
        if !c.span.is_point() && v.lo != v.hi {
            return Err(Error::NotGeneric(format!("open cell {i} ({}) has value {v}", c.span)));
        }
        if c.actions.len() > 2 {
            return Err(Error::NotGeneric(format!(
                "cell {i} ({}) has {} optimal actions",
                c.span,
                c.actions.len()
            )));
        }
    }
    let values = profile.action_values();
    let used = profile.partition().used_actions();
    for (x, &a) in used.iter().enumerate() {
        if let Some(&b) = used[x + 1..].iter().find(|&&b| values[a] == values[b]) {
            return Err(Error::NotGeneric(format!(
                "actions {a} and {b} have the same sender value {}",
                format_rational(&values[a])
            )));
        }
    }
    Ok(())
}

/// Simplified rule for generic profiles: besides `V(mu0)`, an equilibrium
/// payoff is robust iff it is a value at belief 0 or 1 or lies at or beyond
/// the second lowest value attained (second highest for payoffs below
/// `V(mu0)`).
pub fn generic_robust_set(profile: &ValueProfile, mu0: &Belief) -> Result<RobustPayoffSet> {
    check_generic(profile)?;
    let mu0 = mu0.value();
    let eq_set = payoff_set(profile, mu0);
    let v0 = profile.value_at(mu0).clone();
    let values = profile.action_values();
    let attained: Vec<&Rational> = profile
        .partition()
        .used_actions()
        .iter()
        .map(|&a| &values[a])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let second_low = attained.get(1).copied();
    let second_high = attained.len().checked_sub(2).map(|i| attained[i]);
    let ends = [profile.value_at(&zero()).clone(), profile.value_at(&one()).clone()];
    scan(profile, mu0, |s| {
        if v0.contains(s) {
            return Ok(true);
        }
        if !eq_set.contains(s) {
            return Ok(false);
        }
        if ends.iter().any(|v| v.contains(s)) {
            return Ok(true);
        }
        Ok(if s > &v0.hi {
            second_low.is_some_and(|b| s >= b)
        } else {
            second_high.is_some_and(|b| s <= b)
        })
    })
}

/// Perturbation direction `d` for which the games with sender utilities
/// `(v_S, v_S + eps * d)` admit no equilibrium with the given belief
/// distribution and a payoff outside `V(mu0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refuter {
    pub direction: Vec<Rational>,
    pub epsilons: Vec<Rational>,
}

impl Refuter {
    pub fn perturbed(&self, v: &[Rational], eps: &Rational) -> (Vec<Rational>, Vec<Rational>) {
        let u2 = v
            .iter()
            .zip(&self.direction)
            .map(|(vi, di)| vi + eps * di)
            .collect();
        (v.to_vec(), u2)
    }
}

/// `+1` on actions optimal only at the lower posterior, `-1` on actions
/// optimal only at the upper one.
pub fn refuter_direction(n: usize, a: &[usize], a_prime: &[usize]) -> Vec<Rational> {
    (0..n)
        .map(|i| match (a.contains(&i), a_prime.contains(&i)) {
            (true, false) => int(1),
            (false, true) => int(-1),
            _ => zero(),
        })
        .collect()
}

pub fn refuter_in(profile: &ValueProfile, mu0: &Rational, e: &Equilibrium) -> Result<Refuter> {
    let s = transparent_payoff(e)?;
    if e.support.len() != 2 || profile.value_at(mu0).contains(&s) {
        return Err(Error::RefuterInapplicable(s));
    }
    let sorted = e.sorted();
    let direction = refuter_direction(
        profile.action_values().len(),
        profile.actions_at(&sorted.support[0].mu),
        profile.actions_at(&sorted.support[1].mu),
    );
    let epsilons = (1..=6).map(|k| rat(1, 10i64.pow(k))).collect();
    Ok(Refuter { direction, epsilons })
}

pub fn fully_robust_refuter(g: &Game, e: &Equilibrium) -> Result<Refuter> {
    refuter_in(&value_profile(g)?, g.prior(), e)
}

/// Convenience: the envelope value and whether it is robustly attainable.
pub fn envelope_is_robust(profile: &ValueProfile, mu0: &Rational) -> Result<bool> {
    let c = envelope(profile, mu0);
    Ok(robust_set_in(profile, mu0)?.contains(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{construct_equilibrium, SupportChoice};
    use crate::fixtures::{example1, example2, example3, example4a, example4b};

    fn eq(g: &Game, s: Rational, choice: SupportChoice) -> Equilibrium {
        construct_equilibrium(g, &s, &choice).unwrap()
    }

    #[test]
    fn classifies_fixture_equilibria() {
        let g1 = example1();
        let inner = eq(&g1, rat(1, 2), SupportChoice::Explicit(rat(1, 4), rat(3, 4)));
        assert_eq!(classify_two_posterior(&g1, &inner).unwrap().status, Status::NotRobust);
        let top = eq(&g1, int(1), SupportChoice::Extreme);
        let v = classify_two_posterior(&g1, &top).unwrap();
        assert_eq!((v.status, v.rule), (Status::Robust, Rule::DegenerateThreeActions));
        let g2 = example2();
        let mid = eq(&g2, rat(3, 2), SupportChoice::Extreme);
        let v = classify_two_posterior(&g2, &mid).unwrap();
        assert_eq!((v.status, v.rule), (Status::Robust, Rule::FourActions));
        let babble = eq(&g1, int(0), SupportChoice::Extreme);
        assert_eq!(classify_two_posterior(&g1, &babble).unwrap().status, Status::FullyRobust);
    }

    #[test]
    fn payoff_level_verdicts() {
        let v = robust_attainable(&example1(), &rat(1, 2)).unwrap();
        assert_eq!(v.status, Status::NotRobust);
        let v = robust_attainable(&example1(), &int(1)).unwrap();
        assert_eq!(v.rule, Rule::EndpointValue);
        let v = robust_attainable(&example2(), &rat(3, 2)).unwrap();
        assert_eq!(v.rule, Rule::ActionChange);
        assert!(matches!(
            robust_attainable(&example1(), &int(0)),
            Err(Error::BabblingSuffices(_))
        ));
        assert!(matches!(
            robust_attainable(&example1(), &int(2)),
            Err(Error::PayoffNotAttainable(_))
        ));
    }

    #[test]
    fn robust_sets_of_concrete_examples() {
        assert_eq!(robust_payoff_set(&example1()).unwrap().to_string(), "{0} ∪ {1}");
        assert_eq!(robust_payoff_set(&example2()).unwrap().to_string(), "{0} ∪ [1, 2]");
    }

    #[test]
    fn generic_rule_on_abstract_profiles() {
        let set = generic_robust_set(&example3(), &Belief::new(rat(5, 12)).unwrap()).unwrap();
        assert_eq!(set.to_string(), "{1} ∪ [2, 4]");
        let set = generic_robust_set(&example4a(), &Belief::new(rat(4, 5)).unwrap()).unwrap();
        assert_eq!(set.to_string(), "[1, 3]");
        let set = generic_robust_set(&example4b(), &Belief::new(rat(7, 10)).unwrap()).unwrap();
        assert_eq!(set.to_string(), "{1} ∪ [2, 3]");
    }

    #[test]
    fn generic_rule_matches_full_scan() {
        for (p, mu0) in [
            (value_profile(&example1()).unwrap(), rat(1, 2)),
            (value_profile(&example2()).unwrap(), rat(1, 2)),
            (example3(), rat(5, 12)),
            (example4a(), rat(4, 5)),
            (example4b(), rat(7, 10)),
        ] {
            let generic = generic_robust_set(&p, &Belief::new(mu0.clone()).unwrap()).unwrap();
            assert_eq!(generic, robust_set_in(&p, &mu0).unwrap());
        }
    }

    #[test]
    fn rejects_non_generic_profiles() {
        let g = Game::transparent(
            rat(1, 2),
            &[int(0), int(1), int(1)],
            vec![[int(3), int(3)], [int(4), int(0)], [int(0), int(4)]],
        )
        .unwrap();
        let p = value_profile(&g).unwrap();
        assert!(matches!(
            generic_robust_set(&p, &Belief::new(rat(1, 2)).unwrap()),
            Err(Error::NotGeneric(_))
        ));
    }

    #[test]
    fn refuter_directions() {
        let g1 = example1();
        let inner = eq(&g1, rat(1, 2), SupportChoice::Explicit(rat(1, 4), rat(3, 4)));
        assert_eq!(
            fully_robust_refuter(&g1, &inner).unwrap().direction,
            vec![int(0), int(1), int(-1)]
        );
        let g2 = example2();
        let mid = eq(&g2, rat(3, 2), SupportChoice::Extreme);
        assert_eq!(
            fully_robust_refuter(&g2, &mid).unwrap().direction,
            vec![int(-1), int(1), int(1), int(-1)]
        );
        let babble = eq(&g1, int(0), SupportChoice::Extreme);
        assert!(matches!(
            fully_robust_refuter(&g1, &babble),
            Err(Error::RefuterInapplicable(_))
        ));
    }

    #[test]
    fn envelope_is_robust_on_fixtures() {
        assert!(envelope_is_robust(&value_profile(&example1()).unwrap(), &rat(1, 2)).unwrap());
        assert!(envelope_is_robust(&example3(), &rat(5, 12)).unwrap());
    }
}
