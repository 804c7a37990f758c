//! Exact Monte Carlo checks of robustness verdicts.
//!
//! Each sampled pair of perturbed sender utilities becomes a linear
//! feasibility problem over the receiver mixtures at the fixed posteriors.
//! A failed sample always carries a Farkas certificate, so a refutation can
//! be rechecked without trusting the solver.

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::best_reply::{best_reply_partition, value_profile};
use crate::equilibrium::{check_equilibrium, join_violations, Equilibrium};
use crate::error::{Error, Result};
use crate::game::Game;
use crate::geometry::{perturbation_witness_with, PerturbationWitness, SignConstraintSystem, SignKind};
use crate::lp::{FarkasCertificate, Feasibility, LinearSystem, Relation};
use crate::rational::{self, dyadic, int, rat, sub_vec, zero, Rational};
use crate::robustness::{classify_in, refuter_in, Status};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifierOptions {
    /// Allowed distance of each interim payoff from the target.
    pub eps_payoff: Rational,
    /// Allowed max-norm distance of `r - r'` from the reference difference.
    pub eps_x: Rational,
    /// Upper bound on feasibility solves per call.
    pub max_solves: usize,
    /// Upper bound on grid centers tried when no witness is available.
    pub center_cap: usize,
}

impl Default for VerifierOptions {
    fn default() -> Self {
        VerifierOptions {
            eps_payoff: rat(1, 10),
            eps_x: rat(1, 4),
            max_solves: 1_000_000,
            center_cap: 729,
        }
    }
}

/// One perturbed game and the set of equilibria it must contain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityQuery {
    pub utilities: [Vec<Rational>; 2],
    /// Posterior beliefs in increasing order with their best-reply sets.
    pub posteriors: Vec<(Rational, Vec<usize>)>,
    pub signs: SignConstraintSystem,
    pub target: [Rational; 2],
    pub eps_payoff: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// Full-length receiver mixture at each posterior.
    pub mixes: Vec<Vec<Rational>>,
    pub payoffs: [Rational; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub enum Search {
    Found(Solution),
    Infeasible {
        system: LinearSystem,
        certificate: FarkasCertificate,
    },
}

impl Search {
    pub fn is_found(&self) -> bool {
        matches!(self, Search::Found(_))
    }
}

impl FeasibilityQuery {
    /// Query for the belief distribution of `e` with interim payoffs of `e`
    /// as the target. `x_window` bounds `r - r'` for two-posterior supports.
    pub fn for_equilibrium(
        g: &Game,
        e: &Equilibrium,
        utilities: [Vec<Rational>; 2],
        x_window: Option<(Vec<Rational>, Rational)>,
        eps_payoff: &Rational,
    ) -> Result<Self> {
        let beliefs = e.sorted().beliefs();
        match beliefs.len() {
            1 => Ok(Self::new(g, beliefs, utilities, None, e.interim.clone(), eps_payoff)),
            2 => Ok(Self::new(g, beliefs, utilities, x_window, e.interim.clone(), eps_payoff)),
            k => Err(Error::UnsupportedSupportSize(k)),
        }
    }

    /// Query at arbitrary beliefs: one belief means babbling, two must be
    /// increasing.
    pub fn new(
        g: &Game,
        beliefs: Vec<Rational>,
        utilities: [Vec<Rational>; 2],
        x_window: Option<(Vec<Rational>, Rational)>,
        target: [Rational; 2],
        eps_payoff: &Rational,
    ) -> Self {
        let n = g.num_actions();
        let partition = best_reply_partition(g);
        let signs = if beliefs.len() == 2 {
            let (center, radius) = match x_window {
                Some((c, r)) => (c, Some(r)),
                None => (vec![zero(); n], None),
            };
            SignConstraintSystem::for_support(&beliefs[0], &beliefs[1], center, radius)
        } else {
            SignConstraintSystem::babbling(n)
        };
        let posteriors = beliefs
            .into_iter()
            .map(|mu| {
                let a = partition.actions_at(&mu).to_vec();
                (mu, a)
            })
            .collect();
        FeasibilityQuery {
            utilities,
            posteriors,
            signs,
            target,
            eps_payoff: eps_payoff.clone(),
        }
    }

    fn offsets(&self) -> Vec<usize> {
        let mut out = vec![0];
        for (_, a) in &self.posteriors {
            out.push(out.last().unwrap() + a.len());
        }
        out
    }

    /// Variables are the mixture weights on each posterior's best replies.
    pub fn system(&self) -> LinearSystem {
        let off = self.offsets();
        let mut sys = LinearSystem::new(*off.last().unwrap());
        let terms = |k: usize, coeff: &dyn Fn(usize) -> Rational| -> Vec<(usize, Rational)> {
            self.posteriors[k]
                .1
                .iter()
                .enumerate()
                .map(|(j, &a)| (off[k] + j, coeff(a)))
                .collect()
        };
        for k in 0..self.posteriors.len() {
            sys.push_sparse(&terms(k, &|_| int(1)), Relation::Eq, int(1));
        }
        // Each state's payoff is read at a posterior that it supports.
        let payoff_at = [0, self.posteriors.len() - 1];
        for (state, &k) in payoff_at.iter().enumerate() {
            let u = &self.utilities[state];
            let row = terms(k, &|a| u[a].clone());
            sys.push_sparse(&row, Relation::Le, &self.target[state] + &self.eps_payoff);
            sys.push_sparse(&row, Relation::Ge, &self.target[state] - &self.eps_payoff);
        }
        if self.posteriors.len() == 2 {
            for (state, kind) in self.signs.kinds.iter().enumerate() {
                let u = &self.utilities[state];
                let mut row = terms(0, &|a| u[a].clone());
                row.extend(terms(1, &|a| -u[a].clone()));
                let relation = match kind {
                    SignKind::Equality => Relation::Eq,
                    SignKind::Geq => Relation::Ge,
                    SignKind::Leq => Relation::Le,
                    SignKind::None => continue,
                };
                sys.push_sparse(&row, relation, zero());
            }
            if let Some(radius) = &self.signs.x_radius {
                for (i, c) in self.signs.x_center.iter().enumerate() {
                    let mut row = terms(0, &|a| if a == i { int(1) } else { zero() });
                    row.extend(terms(1, &|a| if a == i { int(-1) } else { zero() }));
                    row.retain(|(_, v)| !v.is_zero());
                    sys.push_sparse(&row, Relation::Le, c + radius);
                    sys.push_sparse(&row, Relation::Ge, c - radius);
                }
            }
        }
        sys
    }

    pub fn search(&self) -> Search {
        let sys = self.system();
        match sys.solve() {
            Feasibility::Feasible(z) => {
                let off = self.offsets();
                let n = self.utilities[0].len();
                let mixes: Vec<Vec<Rational>> = self
                    .posteriors
                    .iter()
                    .enumerate()
                    .map(|(k, (_, a))| {
                        let mut r = vec![zero(); n];
                        for (j, &act) in a.iter().enumerate() {
                            r[act] = z[off[k] + j].clone();
                        }
                        r
                    })
                    .collect();
                let last = mixes.len() - 1;
                let payoffs = [
                    rational::dot(&self.utilities[0], &mixes[0]),
                    rational::dot(&self.utilities[1], &mixes[last]),
                ];
                Search::Found(Solution { mixes, payoffs })
            }
            Feasibility::Infeasible(certificate) => Search::Infeasible { system: sys, certificate },
        }
    }
}

/// Searches the perturbed game `(u1, u2)` for an equilibrium with the belief
/// distribution of `e`, interim payoffs within `eps_payoff` of those of `e`,
/// and `r - r'` within `eps_x` of the reference.
pub fn perturbed_equilibrium_search(
    g: &Game,
    e: &Equilibrium,
    utilities: [Vec<Rational>; 2],
    options: &VerifierOptions,
) -> Result<Search> {
    let sorted = e.sorted();
    let window = (sorted.support.len() == 2)
        .then(|| (sub_vec(&sorted.support[0].mix, &sorted.support[1].mix), options.eps_x.clone()));
    Ok(FeasibilityQuery::for_equilibrium(g, e, utilities, window, &options.eps_payoff)?.search())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Refuted,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Refuted => "refuted",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub center_index: usize,
    pub sample: [Vec<Rational>; 2],
    pub certificate: Vec<Rational>,
    pub certificate_valid: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifierReport {
    pub mode: &'static str,
    pub verdict: Verdict,
    pub samples_tested: usize,
    pub lp_solves: usize,
    pub centers_tried: usize,
    pub seed: u64,
    /// Center and radius of the ball that passed, or of the last one tried.
    pub center: Option<[Vec<Rational>; 2]>,
    pub radius: Option<Rational>,
    /// At most ten failed samples.
    pub failures: Vec<Failure>,
}

const MAX_FAILURES: usize = 10;

impl VerifierReport {
    fn new(mode: &'static str, seed: u64) -> Self {
        VerifierReport {
            mode,
            verdict: Verdict::Consistent,
            samples_tested: 0,
            lp_solves: 0,
            centers_tried: 0,
            seed,
            center: None,
            radius: None,
            failures: Vec::new(),
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.verdict == Verdict::Consistent
    }

    pub fn to_json(&self) -> Value {
        let pair = |p: &[Vec<Rational>; 2]| json!([rational::vec_to_json(&p[0]), rational::vec_to_json(&p[1])]);
        json!({
            "mode": self.mode,
            "verdict": self.verdict.as_str(),
            "samples_tested": self.samples_tested,
            "lp_solves": self.lp_solves,
            "centers_tried": self.centers_tried,
            "seed": self.seed,
            "center": self.center.as_ref().map(pair),
            "radius": self.radius.as_ref().map(rational::to_json),
            "failures": self.failures.iter().map(|f| json!({
                "center_index": f.center_index,
                "sample": pair(&f.sample),
                "certificate": rational::vec_to_json(&f.certificate),
                "certificate_valid": f.certificate_valid,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Uniform draw from the dyadic grid inside the max-norm ball. The grid step
/// is `2^-16`, refined until the ball holds at least 256 steps per side.
pub fn sample_ball(rng: &mut impl Rng, center: &[Vec<Rational>; 2], radius: &Rational) -> [Vec<Rational>; 2] {
    let mut k = 16;
    while radius * Rational::from_integer(num_bigint::BigInt::from(1u8) << k) < int(256) && k < 96 {
        k += 1;
    }
    let step = dyadic(k);
    let steps = (radius / &step).floor().to_integer().to_i64().unwrap_or(i64::MAX / 2);
    let mut draw = |c: &Rational| c + &step * int(rng.gen_range(-steps..=steps));
    [
        center[0].iter().map(&mut draw).collect(),
        center[1].iter().map(&mut draw).collect(),
    ]
}

struct Runner<'a> {
    g: &'a Game,
    e: &'a Equilibrium,
    options: &'a VerifierOptions,
    window: Option<(Vec<Rational>, Rational)>,
    report: VerifierReport,
}

impl Runner<'_> {
    /// Returns whether the sample admits the required equilibrium.
    fn test(&mut self, center_index: usize, sample: [Vec<Rational>; 2]) -> Result<bool> {
        if self.report.lp_solves >= self.options.max_solves {
            return Err(Error::BudgetExceeded {
                budget: self.options.max_solves,
                samples_tested: self.report.samples_tested,
            });
        }
        self.report.lp_solves += 1;
        self.report.samples_tested += 1;
        let query = FeasibilityQuery::for_equilibrium(
            self.g,
            self.e,
            sample.clone(),
            self.window.clone(),
            &self.options.eps_payoff,
        )?;
        match query.search() {
            Search::Found(_) => Ok(true),
            Search::Infeasible { system, certificate } => {
                if self.report.failures.len() < MAX_FAILURES {
                    self.report.failures.push(Failure {
                        center_index,
                        sample,
                        certificate_valid: certificate.verify(&system),
                        certificate: certificate.multipliers,
                    });
                }
                Ok(false)
            }
        }
    }

    /// Tests up to `n` samples in the ball, stopping at the first failure.
    fn ball(&mut self, index: usize, center: &[Vec<Rational>; 2], radius: &Rational, n: usize, rng: &mut ChaCha8Rng) -> Result<bool> {
        self.report.centers_tried += 1;
        self.report.center = Some(center.clone());
        self.report.radius = Some(radius.clone());
        for _ in 0..n {
            let sample = sample_ball(rng, center, radius);
            if !self.test(index, sample)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn validated(g: &Game, e: &Equilibrium) -> Result<Vec<Rational>> {
    if e.support.len() > 2 {
        return Err(Error::UnsupportedSupportSize(e.support.len()));
    }
    let violations = check_equilibrium(g, e);
    if !violations.is_empty() {
        return Err(Error::NotAnEquilibrium(join_violations(&violations)));
    }
    g.sender_values()
}

fn reference_window(e: &Equilibrium, eps_x: &Rational) -> Option<(Vec<Rational>, Rational)> {
    let sorted = e.sorted();
    (sorted.support.len() == 2)
        .then(|| (sub_vec(&sorted.support[0].mix, &sorted.support[1].mix), eps_x.clone()))
}

/// Offsets `{-eps_u/2, 0, eps_u/2}` per coordinate around `(v, v)`, the
/// unperturbed center first; capped by a seeded subset when there are more
/// than `cap` combinations.
fn grid_centers(v: &[Rational], eps_u: &Rational, cap: usize, rng: &mut ChaCha8Rng) -> Vec<[Vec<Rational>; 2]> {
    let dims = 2 * v.len();
    let half = eps_u / int(2);
    let levels = [zero(), -half.clone(), half];
    let total = 3usize.checked_pow(dims as u32).filter(|&t| t <= cap);
    let codes: Vec<Vec<usize>> = match total {
        Some(t) => (0..t)
            .map(|mut c| {
                (0..dims)
                    .map(|_| {
                        let d = c % 3;
                        c /= 3;
                        d
                    })
                    .collect()
            })
            .collect(),
        None => {
            let mut seen = std::collections::BTreeSet::new();
            seen.insert(vec![0; dims]);
            let mut out = vec![vec![0; dims]];
            while out.len() < cap {
                let code: Vec<usize> = (0..dims).map(|_| rng.gen_range(0..3)).collect();
                if seen.insert(code.clone()) {
                    out.push(code);
                }
            }
            out
        }
    };
    codes
        .into_iter()
        .map(|code| {
            let shifted = |state: usize| -> Vec<Rational> {
                v.iter()
                    .enumerate()
                    .map(|(i, vi)| vi + &levels[code[state * v.len() + i]])
                    .collect()
            };
            [shifted(0), shifted(1)]
        })
        .collect()
}

/// Checks that some ball of perturbations within `eps_u` of the unperturbed
/// game keeps an equilibrium near `e` for every sampled member.
///
/// Robust equilibria are tested on the ball of their witness; the others (or
/// a witness that fails, which would indicate a bug) fall back to a grid of
/// candidate centers with radius `eps_u/4`. The verdict is `Refuted` only
/// when every candidate ball has a sample with a certified infeasible query.
pub fn monte_carlo_robustness(
    g: &Game,
    e: &Equilibrium,
    eps_u: &Rational,
    n_samples: usize,
    seed: u64,
    options: &VerifierOptions,
) -> Result<VerifierReport> {
    let v = validated(g, e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runner = Runner {
        g,
        e,
        options,
        window: reference_window(e, &options.eps_x),
        report: VerifierReport::new("robustness", seed),
    };
    let unperturbed = [v.clone(), v.clone()];
    let status = classify_in(&value_profile(g)?, g.prior(), e)?.status;
    let first: Option<([Vec<Rational>; 2], Rational)> = match status {
        Status::FullyRobust => Some((unperturbed, eps_u / int(2))),
        Status::Robust => {
            let w = perturbation_witness_with(g, e, eps_u, &options.eps_x, options)?;
            Some((w.center, w.radius))
        }
        Status::NotRobust => None,
    };
    if let Some((center, radius)) = first {
        if runner.ball(0, &center, &radius, n_samples, &mut rng)? {
            return Ok(runner.report);
        }
    }
    let radius = eps_u / int(4);
    for (i, center) in grid_centers(&v, eps_u, options.center_cap, &mut rng).iter().enumerate() {
        if runner.ball(i + 1, center, &radius, n_samples, &mut rng)? {
            return Ok(runner.report);
        }
    }
    runner.report.verdict = Verdict::Refuted;
    Ok(runner.report)
}

/// Checks that every perturbation within `eps_u` keeps an equilibrium with
/// the same belief distribution and nearby payoffs. Between two posteriors
/// the first sample is the refuter perturbation at `eps_u/2`; a single
/// failure refutes.
pub fn monte_carlo_full_robustness(
    g: &Game,
    e: &Equilibrium,
    eps_u: &Rational,
    n_samples: usize,
    seed: u64,
    options: &VerifierOptions,
) -> Result<VerifierReport> {
    let v = validated(g, e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runner = Runner {
        g,
        e,
        options,
        window: None,
        report: VerifierReport::new("full_robustness", seed),
    };
    let center = [v.clone(), v.clone()];
    runner.report.centers_tried = 1;
    runner.report.center = Some(center.clone());
    runner.report.radius = Some(eps_u.clone());
    let mut remaining = n_samples;
    if e.support.len() == 2 {
        if let Ok(refuter) = refuter_in(&value_profile(g)?, g.prior(), e) {
            let (u1, u2) = refuter.perturbed(&v, &(eps_u / int(2)));
            remaining = remaining.saturating_sub(1);
            if !runner.test(0, [u1, u2])? {
                runner.report.verdict = Verdict::Refuted;
                return Ok(runner.report);
            }
        }
    }
    for _ in 0..remaining {
        let sample = sample_ball(&mut rng, &center, eps_u);
        if !runner.test(0, sample)? {
            runner.report.verdict = Verdict::Refuted;
            return Ok(runner.report);
        }
    }
    Ok(runner.report)
}

/// Fresh seeded check of a witness: `n_samples` draws from its ball, each
/// required to admit an equilibrium with `r - r'` inside the witness window.
pub fn confirm_witness(
    g: &Game,
    e: &Equilibrium,
    w: &PerturbationWitness,
    n_samples: usize,
    seed: u64,
    options: &VerifierOptions,
) -> Result<VerifierReport> {
    validated(g, e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runner = Runner {
        g,
        e,
        options,
        window: Some((w.x_center.clone(), w.x_radius.clone())),
        report: VerifierReport::new("witness", seed),
    };
    if !runner.ball(0, &w.center, &w.radius, n_samples, &mut rng)? {
        runner.report.verdict = Verdict::Refuted;
    }
    Ok(runner.report)
}
