//! Difference sets, decompositions, sign systems and the exact LP, each
//! checked against a second route.

mod common;

use cheaptalk::equilibrium::{construct_equilibrium, envelope, SupportChoice};
use cheaptalk::best_reply::value_profile;
use cheaptalk::geometry::{decompose_difference, perturbation_witness, DifferenceSet, SignConstraintSystem, SignKind};
use cheaptalk::linalg::solve;
use cheaptalk::lp::{Feasibility, LinearSystem, Relation};
use cheaptalk::rational::{dot, int, max_norm, one, rat, sub_vec, zero, Rational};
use cheaptalk::robustness::{classify_two_posterior, Status};
use cheaptalk::verifier::{confirm_witness, Verdict, VerifierOptions};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Nonempty action subset of `0..n` from a bit mask.
fn subset(n: usize, mask: u32) -> Vec<usize> {
    let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
    if s.is_empty() {
        vec![mask as usize % n]
    } else {
        s
    }
}

/// Distribution on `support` with weights proportional to `raw` (+1).
fn distribution(n: usize, support: &[usize], raw: &[u8]) -> Vec<Rational> {
    let weights: Vec<i64> = support.iter().enumerate().map(|(k, _)| raw[k % raw.len()] as i64 % 5 + 1).collect();
    let total: i64 = weights.iter().sum();
    let mut out = vec![zero(); n];
    for (&a, w) in support.iter().zip(weights) {
        out[a] = rat(w, total);
    }
    out
}

fn is_distribution_on(r: &[Rational], support: &[usize]) -> bool {
    r.iter().sum::<Rational>() == one()
        && r.iter().enumerate().all(|(i, v)| !v.is_negative() && (v.is_zero() || support.contains(&i)))
}

/// `x ∈ D` decided by exact feasibility of `r - r' = x` over distributions.
fn member_by_lp(x: &[Rational], a: &[usize], a_prime: &[usize]) -> bool {
    let n = x.len();
    let mut sys = LinearSystem::new(a.len() + a_prime.len());
    sys.push_sparse(&a.iter().enumerate().map(|(k, _)| (k, one())).collect::<Vec<_>>(), Relation::Eq, one());
    sys.push_sparse(
        &a_prime.iter().enumerate().map(|(k, _)| (a.len() + k, one())).collect::<Vec<_>>(),
        Relation::Eq,
        one(),
    );
    for (i, xi) in x.iter().enumerate().take(n) {
        let mut terms = Vec::new();
        if let Some(k) = a.iter().position(|&b| b == i) {
            terms.push((k, one()));
        }
        if let Some(k) = a_prime.iter().position(|&b| b == i) {
            terms.push((a.len() + k, -one()));
        }
        sys.push_sparse(&terms, Relation::Eq, xi.clone());
    }
    matches!(sys.solve(), Feasibility::Feasible(_))
}

proptest! {
    #[test]
    fn decomposition_reproduces_x_with_valid_distributions(
        n in 2usize..=6,
        masks in (any::<u32>(), any::<u32>()),
        raw in proptest::collection::vec(any::<u8>(), 4..8),
        anchor_raw in proptest::collection::vec(any::<u8>(), 4..8),
    ) {
        let (a, a_prime) = (subset(n, masks.0), subset(n, masks.1));
        let x = sub_vec(&distribution(n, &a, &raw), &distribution(n, &a_prime, &raw[1..]));
        let anchor = (distribution(n, &a, &anchor_raw), distribution(n, &a_prime, &anchor_raw[2..]));
        prop_assert!(DifferenceSet::new(n, &a, &a_prime).check_member(&x).is_ok());
        let dec = decompose_difference(&x, &a, &a_prime, (&anchor.0, &anchor.1)).unwrap();
        prop_assert_eq!(sub_vec(&dec.r, &dec.r_prime), x);
        prop_assert!(is_distribution_on(&dec.r, &a));
        prop_assert!(is_distribution_on(&dec.r_prime, &a_prime));
    }

    #[test]
    fn membership_test_agrees_with_feasibility(
        n in 2usize..=5,
        masks in (any::<u32>(), any::<u32>()),
        entries in proptest::collection::vec(-4i64..=4, 5),
    ) {
        let (a, a_prime) = (subset(n, masks.0), subset(n, masks.1));
        // Balance the last coordinate so that both routes face the same sum.
        let mut x: Vec<Rational> = entries[..n - 1].iter().map(|&e| rat(e, 4)).collect();
        let total: Rational = x.iter().sum();
        x.push(-total);
        let set = DifferenceSet::new(n, &a, &a_prime);
        prop_assert_eq!(set.check_member(&x).is_ok(), member_by_lp(&x, &a, &a_prime), "x = {:?}", x);
    }

    #[test]
    fn sign_kinds_follow_degenerate_posteriors(lo in 0i64..=12, hi in 0i64..=12) {
        prop_assume!(lo < hi);
        let (mu, mu_prime) = (rat(lo, 12), rat(hi, 12));
        let [k1, k2] = SignConstraintSystem::kinds_for(&mu, &mu_prime);
        prop_assert_eq!(k1, if hi == 12 { SignKind::Geq } else { SignKind::Equality });
        prop_assert_eq!(k2, if lo == 0 { SignKind::Leq } else { SignKind::Equality });
    }
}

#[test]
fn half_spaces_over_a_segment() {
    // u·x <= 0 on all of conv{v1, v2} iff it holds at both ends, and some x in
    // the segment has u·x = 0 iff the end values differ in sign (or vanish).
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let coord = |rng: &mut ChaCha8Rng| rat(rng.gen_range(-6..=6), rng.gen_range(1..=3));
    let v1: Vec<Rational> = (0..4).map(|_| coord(&mut rng)).collect();
    let v2: Vec<Rational> = (0..4).map(|_| coord(&mut rng)).collect();
    for _ in 0..10_000 {
        let u: Vec<Rational> = (0..4).map(|_| coord(&mut rng)).collect();
        let (f1, f2) = (dot(&u, &v1), dot(&u, &v2));
        let along: Vec<Rational> = (0..=16).map(|k| rat(k, 16)).map(|t| &f1 * (one() - &t) + &f2 * t).collect();
        let in_all_lower = along.iter().all(|f| !f.is_positive());
        assert_eq!(in_all_lower, !f1.is_positive() && !f2.is_positive());
        let crossing = if f1 == f2 {
            f1.is_zero()
        } else {
            let t = &f1 / (&f1 - &f2);
            t >= zero() && t <= one()
        };
        let by_identity = (!f1.is_positive() && !f2.is_negative()) || (!f1.is_negative() && !f2.is_positive());
        assert_eq!(crossing, by_identity);
    }
}

fn random_system(rng: &mut ChaCha8Rng, vars: usize) -> LinearSystem {
    let mut sys = LinearSystem::new(vars);
    for _ in 0..rng.gen_range(1..=6) {
        let coeffs = (0..vars).map(|_| int(rng.gen_range(-3..=3))).collect();
        let relation = [Relation::Le, Relation::Ge, Relation::Eq][rng.gen_range(0..3)];
        sys.push(coeffs, relation, int(rng.gen_range(-4..=4)));
    }
    sys
}

/// Feasibility of a two-variable system by vertex enumeration: a nonempty
/// region inside the orthant has a vertex on two of its boundary lines.
fn feasible_by_vertices(sys: &LinearSystem) -> bool {
    let mut lines: Vec<(Vec<Rational>, Rational)> = vec![(vec![one(), zero()], zero()), (vec![zero(), one()], zero())];
    lines.extend(sys.constraints().iter().map(|c| (c.coeffs.clone(), c.rhs.clone())));
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let m = vec![lines[i].0.clone(), lines[j].0.clone()];
            if let Some(z) = solve(&m, &[lines[i].1.clone(), lines[j].1.clone()]) {
                if z.iter().all(|v| !v.is_negative()) && sys.is_satisfied_by(&z) {
                    return true;
                }
            }
        }
    }
    false
}

#[test]
fn simplex_matches_vertex_enumeration_in_the_plane() {
    let mut rng = ChaCha8Rng::seed_from_u64(402);
    let mut infeasible = 0;
    for _ in 0..3000 {
        let sys = random_system(&mut rng, 2);
        let oracle = feasible_by_vertices(&sys);
        match sys.solve() {
            Feasibility::Feasible(z) => {
                assert!(oracle && sys.is_satisfied_by(&z), "{sys:?}");
            }
            Feasibility::Infeasible(cert) => {
                assert!(!oracle && cert.verify(&sys), "{sys:?}");
                infeasible += 1;
            }
        }
    }
    assert!(infeasible > 300, "only {infeasible} infeasible systems");
}

#[test]
fn every_answer_carries_its_own_proof() {
    let mut rng = ChaCha8Rng::seed_from_u64(403);
    for _ in 0..2000 {
        let vars = rng.gen_range(1..=5);
        let sys = random_system(&mut rng, vars);
        match sys.solve() {
            Feasibility::Feasible(z) => assert!(z.iter().all(|v| !v.is_negative()) && sys.is_satisfied_by(&z)),
            Feasibility::Infeasible(cert) => assert!(cert.verify(&sys), "{sys:?}"),
        }
    }
}

#[test]
fn witnesses_for_random_games_survive_fresh_samples() {
    let opts = VerifierOptions::default();
    let (eps_u, eps_x) = (rat(1, 100), rat(1, 4));
    let mut built = 0;
    for (i, g) in common::random_games(404, 300).iter().enumerate() {
        let profile = value_profile(g).unwrap();
        let c = envelope(&profile, g.prior());
        let e = construct_equilibrium(g, &c, &SupportChoice::Extreme).unwrap();
        if classify_two_posterior(g, &e).unwrap().status != Status::Robust {
            continue;
        }
        let w = perturbation_witness(g, &e, &eps_u, &eps_x).unwrap_or_else(|err| panic!("game {i}: {err}"));
        let v = g.sender_values().unwrap();
        for center in &w.center {
            assert!(max_norm(&sub_vec(center, &v)) + &w.radius <= eps_u, "game {i}: ball leaves the target");
        }
        let report = confirm_witness(g, &e, &w, 100, 1000 + i as u64, &opts).unwrap();
        assert_eq!(report.verdict, Verdict::Consistent, "game {i}");
        built += 1;
    }
    assert!(built >= 5, "only {built} robust envelope equilibria");
}
