//! Mixture differences at a two-posterior support and witnesses for open
//! sets of perturbed sender utilities.
//!
//! For posteriors `mu < mu'` with best-reply sets `A` and `A'`, the receiver
//! strategies are summarized by `x = r - r'` in the difference set
//! `D = { r - r' : supp r ⊆ A, supp r' ⊆ A' }`. A perturbed pair
//! `(u1, u2)` admits an equilibrium with the same belief distribution iff
//! some `x ∈ D` satisfies the sign system: `u1·x = 0` when `mu' < 1` (else
//! `u1·x >= 0`) and `u2·x = 0` when `mu > 0` (else `u2·x <= 0`).

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::best_reply::{best_reply_partition, value_profile};
use crate::equilibrium::{check_equilibrium, join_violations, Equilibrium};
use crate::error::{Error, Result};
use crate::game::{Belief, Game};
use crate::linalg::{self, orthogonal_complement, project_onto_hyperplane, rank};
use crate::rational::{
    self, add_vec, dot, int, max_norm, one, scale_vec, sub_vec, unit_vec, zero, Rational,
};
use crate::robustness::{classify_in, Status};
use crate::verifier::{FeasibilityQuery, Search, VerifierOptions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceSet {
    pub n: usize,
    pub actions_mu: Vec<usize>,
    pub actions_mu_prime: Vec<usize>,
    pub span_dim: usize,
}

impl DifferenceSet {
    pub fn new(n: usize, a: &[usize], a_prime: &[usize]) -> Self {
        let union: BTreeSet<usize> = a.iter().chain(a_prime).copied().collect();
        DifferenceSet {
            n,
            actions_mu: a.to_vec(),
            actions_mu_prime: a_prime.to_vec(),
            span_dim: union.len().saturating_sub(1),
        }
    }

    /// Nonzero vertices `δ_a - δ_b`, `a ∈ A`, `b ∈ A'`; `D` is their hull
    /// together with 0 when `A ∩ A'` is nonempty.
    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        let mut out = Vec::new();
        for &a in &self.actions_mu {
            for &b in &self.actions_mu_prime {
                if a != b {
                    out.push(sub_vec(&unit_vec(self.n, a), &unit_vec(self.n, b)));
                }
            }
        }
        out
    }

    /// `|A ∪ A'| - 1` vectors spanning `D`: with the union split into
    /// `E ⊆ A` and `E' ⊆ A'`, fix `a ∈ E`, `a' ∈ E'` and take `δ_a - δ_b`
    /// for `b ∈ E'` and `δ_b - δ_a'` for `b ∈ E \ {a}`.
    pub fn generators(&self) -> Vec<Vec<Rational>> {
        let union: BTreeSet<usize> = self
            .actions_mu
            .iter()
            .chain(&self.actions_mu_prime)
            .copied()
            .collect();
        if union.len() < 2 {
            return Vec::new();
        }
        let mut e_prime: Vec<usize> = self
            .actions_mu_prime
            .iter()
            .copied()
            .filter(|b| !self.actions_mu.contains(b))
            .collect();
        if e_prime.is_empty() {
            e_prime.push(self.actions_mu_prime[0]);
        }
        let e: Vec<usize> = union.iter().copied().filter(|b| !e_prime.contains(b)).collect();
        let (a, a_prime) = (e[0], e_prime[0]);
        let unit = |i| unit_vec(self.n, i);
        let mut gens: Vec<Vec<Rational>> = e_prime.iter().map(|&b| sub_vec(&unit(a), &unit(b))).collect();
        gens.extend(e[1..].iter().map(|&b| sub_vec(&unit(b), &unit(a_prime))));
        gens
    }

    /// Exact membership test, naming the first failed clause.
    pub fn check_member(&self, x: &[Rational]) -> std::result::Result<(), String> {
        if x.len() != self.n {
            return Err(format!("expected {} coordinates", self.n));
        }
        let sum: Rational = x.iter().sum();
        if !sum.is_zero() {
            return Err("coordinates do not sum to zero".into());
        }
        for (i, xi) in x.iter().enumerate() {
            if xi.is_positive() && !self.actions_mu.contains(&i) {
                return Err(format!("positive part at action {i} outside A(mu)"));
            }
            if xi.is_negative() && !self.actions_mu_prime.contains(&i) {
                return Err(format!("negative part at action {i} outside A(mu')"));
            }
        }
        let mass: Rational = x.iter().filter(|v| v.is_positive()).sum();
        if mass > one() {
            return Err("positive part has mass above 1".into());
        }
        let shared = self.actions_mu.iter().any(|a| self.actions_mu_prime.contains(a));
        if mass < one() && !shared {
            return Err("positive part has mass below 1 but no action is shared".into());
        }
        Ok(())
    }
}

pub fn difference_set(g: &Game, mu: &Belief, mu_prime: &Belief) -> DifferenceSet {
    let p = best_reply_partition(g);
    DifferenceSet::new(
        g.num_actions(),
        p.actions_at(mu.value()),
        p.actions_at(mu_prime.value()),
    )
}

pub fn dim_span_d(g: &Game, mu: &Belief, mu_prime: &Belief) -> usize {
    difference_set(g, mu, mu_prime).span_dim
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignKind {
    Equality,
    Geq,
    Leq,
    None,
}

impl SignKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SignKind::Equality => "equality",
            SignKind::Geq => "geq",
            SignKind::Leq => "leq",
            SignKind::None => "none",
        }
    }

    pub fn holds(self, value: &Rational) -> bool {
        match self {
            SignKind::Equality => value.is_zero(),
            SignKind::Geq => !value.is_negative(),
            SignKind::Leq => !value.is_positive(),
            SignKind::None => true,
        }
    }
}

/// Per-state constraint on `u_S(θ)·x` plus the tolerated max-norm window
/// around `x_center`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignConstraintSystem {
    pub kinds: [SignKind; 2],
    pub x_center: Vec<Rational>,
    pub x_radius: Option<Rational>,
}

impl SignConstraintSystem {
    /// Kinds for posteriors `mu < mu'`.
    pub fn kinds_for(mu: &Rational, mu_prime: &Rational) -> [SignKind; 2] {
        [
            if mu_prime.is_one() { SignKind::Geq } else { SignKind::Equality },
            if mu.is_zero() { SignKind::Leq } else { SignKind::Equality },
        ]
    }

    pub fn for_support(mu: &Rational, mu_prime: &Rational, x_center: Vec<Rational>, x_radius: Option<Rational>) -> Self {
        SignConstraintSystem {
            kinds: Self::kinds_for(mu, mu_prime),
            x_center,
            x_radius,
        }
    }

    pub fn babbling(n: usize) -> Self {
        SignConstraintSystem {
            kinds: [SignKind::None, SignKind::None],
            x_center: vec![zero(); n],
            x_radius: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub r: Vec<Rational>,
    pub r_prime: Vec<Rational>,
    pub d: Vec<Rational>,
}

fn positive_part(x: &[Rational]) -> Vec<Rational> {
    x.iter().map(|v| if v.is_positive() { v.clone() } else { zero() }).collect()
}

fn negative_part(x: &[Rational]) -> Vec<Rational> {
    x.iter().map(|v| if v.is_negative() { -v } else { zero() }).collect()
}

fn is_distribution_on(r: &[Rational], support: &[usize]) -> bool {
    let total: Rational = r.iter().sum();
    total.is_one()
        && r.iter()
            .enumerate()
            .all(|(i, v)| !v.is_negative() && (v.is_zero() || support.contains(&i)))
}

/// Writes `x ∈ D` as `(x⁺ + d, x⁻ + d)` keeping `d` close to the anchor's
/// `d0 = r0 - x0⁺`: the mass change `1·(x0⁺ - x⁺)` is applied to the first
/// shared coordinate where `d0` is positive (the first shared action when
/// `d0 = 0`). A reduction larger than that coordinate spills over to the
/// remaining shared coordinates in index order, so `‖d - d0‖∞` never exceeds
/// the mass change.
pub fn decompose_difference(
    x: &[Rational],
    actions_mu: &[usize],
    actions_mu_prime: &[usize],
    anchor: (&[Rational], &[Rational]),
) -> Result<Decomposition> {
    let n = x.len();
    let set = DifferenceSet::new(n, actions_mu, actions_mu_prime);
    set.check_member(x).map_err(Error::NotInD)?;
    let (r0, r0_prime) = anchor;
    if r0.len() != n || r0_prime.len() != n {
        return Err(Error::AnchorMismatch("anchor has the wrong dimension".into()));
    }
    if !is_distribution_on(r0, actions_mu) || !is_distribution_on(r0_prime, actions_mu_prime) {
        return Err(Error::AnchorMismatch(
            "anchor mixtures must be distributions on A(mu) and A(mu')".into(),
        ));
    }
    let x0 = sub_vec(r0, r0_prime);
    let d0 = sub_vec(r0, &positive_part(&x0));
    let shared: Vec<usize> = (0..n)
        .filter(|i| actions_mu.contains(i) && actions_mu_prime.contains(i))
        .collect();
    let x_plus = positive_part(x);
    let mut d = vec![zero(); n];
    if !shared.is_empty() {
        d.clone_from(&d0);
        let change: Rational = positive_part(&x0).iter().sum::<Rational>() - x_plus.iter().sum::<Rational>();
        let i = shared
            .iter()
            .copied()
            .find(|&i| d0[i].is_positive())
            .unwrap_or(shared[0]);
        if !change.is_negative() {
            d[i] += change;
        } else {
            let mut owed = -change;
            for j in std::iter::once(i).chain(shared.iter().copied().filter(|&j| j != i)) {
                let take = owed.clone().min(d[j].clone());
                d[j] -= &take;
                owed -= take;
                if owed.is_zero() {
                    break;
                }
            }
            debug_assert!(owed.is_zero(), "membership guarantees enough shared mass");
        }
    }
    Ok(Decomposition {
        r: add_vec(&x_plus, &d),
        r_prime: add_vec(&negative_part(x), &d),
        d,
    })
}

/// Which construction produced a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessCase {
    /// Both posteriors degenerate: two half-spaces.
    FullReveal,
    /// One degenerate posterior: one indifference and one inequality.
    OneIndifference,
    /// Interior posteriors: two indifferences.
    TwoIndifferences,
}

impl WitnessCase {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessCase::FullReveal => "cond1",
            WitnessCase::OneIndifference => "cond2-Prop6",
            WitnessCase::TwoIndifferences => "cond3-Prop7",
        }
    }
}

/// A max-norm ball of sender utility pairs, every member of which admits an
/// equilibrium with the given belief distribution and `x` within `x_radius`
/// of `x_center`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbationWitness {
    pub center: [Vec<Rational>; 2],
    pub radius: Rational,
    pub x_center: Vec<Rational>,
    pub x_radius: Rational,
    pub case: WitnessCase,
    pub internals: BTreeMap<String, Vec<Rational>>,
}

impl PerturbationWitness {
    pub fn to_json(&self) -> Value {
        let internals: serde_json::Map<String, Value> = self
            .internals
            .iter()
            .map(|(k, v)| (k.clone(), rational::vec_to_json(v)))
            .collect();
        json!({
            "center": [rational::vec_to_json(&self.center[0]), rational::vec_to_json(&self.center[1])],
            "radius": rational::to_json(&self.radius),
            "x_center": rational::vec_to_json(&self.x_center),
            "x_radius": rational::to_json(&self.x_radius),
            "case": self.case.as_str(),
            "internals": internals,
        })
    }
}

fn l1(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).sum()
}

/// Vectors of `D` with `x0 = Σ lambda0_j v_j`, `lambda0` a distribution.
struct Basis {
    vectors: Vec<Vec<Rational>>,
    lambda0: Vec<Rational>,
}

impl Basis {
    fn interior(&self) -> bool {
        self.lambda0.iter().all(|l| l.is_positive())
    }
}

fn gram(vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    vectors
        .iter()
        .map(|a| vectors.iter().map(|b| dot(a, b)).collect())
        .collect()
}

fn combine(vectors: &[Vec<Rational>], weights: &[Rational]) -> Vec<Rational> {
    vectors
        .iter()
        .zip(weights)
        .fold(vec![zero(); vectors[0].len()], |acc, (v, w)| add_vec(&acc, &scale_vec(w, v)))
}

/// Convex weights expressing `x0` over linearly independent `vectors`.
fn barycentric(x0: &[Rational], vectors: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    if rank(vectors) < vectors.len() {
        return None;
    }
    let rhs: Vec<Rational> = vectors.iter().map(|v| dot(v, x0)).collect();
    let lambda = linalg::solve(&gram(vectors), &rhs)?;
    let total: Rational = lambda.iter().sum();
    (combine(vectors, &lambda) == x0 && total.is_one() && lambda.iter().all(|l| !l.is_negative())).then_some(lambda)
}

fn subsets(len: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..len)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// Nonzero terms of `x0 = Σ r0(a) r0'(b) (δ_a - δ_b)` with equal vectors
/// merged, plus the total weight of the zero terms (`a = b`).
fn product_terms(r0: &[Rational], r0_prime: &[Rational], sign: &Rational) -> (Vec<(Vec<Rational>, Rational)>, Rational) {
    let n = r0.len();
    let mut terms: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let mut null = zero();
    for (a, ra) in r0.iter().enumerate().filter(|(_, w)| w.is_positive()) {
        for (b, rb) in r0_prime.iter().enumerate().filter(|(_, w)| w.is_positive()) {
            let c = ra * rb;
            if a == b {
                null += c;
                continue;
            }
            let w = scale_vec(sign, &sub_vec(&unit_vec(n, a), &unit_vec(n, b)));
            match terms.iter_mut().find(|(v, _)| *v == w) {
                Some((_, acc)) => *acc += c,
                None => terms.push((w, c)),
            }
        }
    }
    (terms, null)
}

/// Looks for `k` linearly independent points of `D` whose hull holds `x0` in
/// its relative interior: first `k - 1` single terms of the product-measure
/// decomposition with the remaining terms lumped into their centroid, then
/// any `k` vertices. Otherwise `x0` itself is extended by vertices to a
/// linearly independent list, which puts `x0` on the boundary
/// (`lambda0 = e_1`).
fn find_basis(
    x0: &[Rational],
    anchor: (&[Rational], &[Rational], &Rational),
    vertices: &[Vec<Rational>],
    k: usize,
) -> Option<Basis> {
    let (terms, null) = product_terms(anchor.0, anchor.1, anchor.2);
    for idx in subsets(terms.len(), k - 1) {
        let rest_weight: Rational = &null
            + terms
                .iter()
                .enumerate()
                .filter(|(i, _)| !idx.contains(i))
                .map(|(_, t)| &t.1)
                .sum::<Rational>();
        if !rest_weight.is_positive() {
            continue;
        }
        let rest = terms
            .iter()
            .enumerate()
            .filter(|(i, _)| !idx.contains(i))
            .fold(vec![zero(); x0.len()], |acc, (_, (w, c))| add_vec(&acc, &scale_vec(&(c / &rest_weight), w)));
        let mut vectors: Vec<Vec<Rational>> = idx.iter().map(|&i| terms[i].0.clone()).collect();
        let mut lambda0: Vec<Rational> = idx.iter().map(|&i| terms[i].1.clone()).collect();
        vectors.push(rest);
        lambda0.push(rest_weight);
        if rank(&vectors) == k {
            debug_assert_eq!(combine(&vectors, &lambda0), x0);
            return Some(Basis { vectors, lambda0 });
        }
    }
    for idx in subsets(vertices.len(), k) {
        let vectors: Vec<Vec<Rational>> = idx.iter().map(|&i| vertices[i].clone()).collect();
        if let Some(lambda0) = barycentric(x0, &vectors) {
            if lambda0.iter().all(|l| l.is_positive()) {
                return Some(Basis { vectors, lambda0 });
            }
        }
    }
    let mut vectors = vec![x0.to_vec()];
    for v in vertices {
        if vectors.len() == k {
            break;
        }
        let mut trial = vectors.clone();
        trial.push(v.clone());
        if rank(&trial) == trial.len() {
            vectors = trial;
        }
    }
    (vectors.len() == k).then(|| Basis {
        vectors,
        lambda0: unit_vec(k, 0),
    })
}

/// Exact inverse of a nonsingular square matrix.
fn inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let cols = (0..n)
        .map(|j| linalg::solve(m, &unit_vec(n, j)))
        .collect::<Option<Vec<_>>>()?;
    Some(linalg::transpose(&cols))
}

/// Candidate before verifier confirmation.
struct Candidate {
    center: [Vec<Rational>; 2],
    radius: Rational,
    internals: BTreeMap<String, Vec<Rational>>,
}

fn scalar(v: &Rational) -> Vec<Rational> {
    vec![v.clone()]
}

/// Both posteriors degenerate: `x = x0` works on `H⁺_{x0} × H⁻_{x0}`.
fn full_reveal(v: &[Rational], x0: &[Rational], target_u: &Rational, scale: &Rational) -> Candidate {
    let eta = scale * target_u / int(2);
    let norm2 = dot(x0, x0);
    let radius = if norm2.is_zero() {
        target_u / int(2)
    } else {
        (&eta * &norm2 / (int(2) * l1(x0))).min(target_u / int(2))
    };
    let center = [
        add_vec(v, &scale_vec(&eta, x0)),
        sub_vec(v, &scale_vec(&eta, x0)),
    ];
    let mut internals = BTreeMap::new();
    internals.insert("eta".into(), scalar(&eta));
    Candidate {
        center,
        radius,
        internals,
    }
}

/// Shifted weights `(lambda0 + δ1) / (1 + kδ)` for a boundary `lambda0`,
/// with δ halved from `start` until `accept` holds.
fn shift_weights(
    lambda0: &[Rational],
    start: &Rational,
    accept: impl Fn(&[Rational]) -> bool,
) -> Option<(Rational, Vec<Rational>)> {
    let k = int(lambda0.len() as i64);
    let mut delta = start.clone();
    for _ in 0..64 {
        let total = one() + &k * &delta;
        let lambda: Vec<Rational> = lambda0.iter().map(|l| (l + &delta) / &total).collect();
        if accept(&lambda) {
            return Some((delta, lambda));
        }
        delta /= int(2);
    }
    None
}

/// One indifference `u1·x = 0` and one inequality `u2·x <= 0` over `D`.
fn one_indifference(
    u0: &[Rational],
    x0: &[Rational],
    basis: &Basis,
    target_u: &Rational,
    target_x: &Rational,
    scale: &Rational,
) -> Option<Candidate> {
    let vs = &basis.vectors;
    let project = |lambda: &[Rational]| {
        let x_hat = combine(vs, lambda);
        let u_hat = project_onto_hyperplane(u0, &x_hat, &zero());
        (x_hat, u_hat)
    };
    let (delta, lambda_hat) = if basis.interior() {
        (zero(), basis.lambda0.clone())
    } else {
        shift_weights(&basis.lambda0, &(scale * target_x / int(16)), |lambda| {
            let (x_hat, u_hat) = project(lambda);
            max_norm(&sub_vec(&u_hat, u0)) <= target_u / int(4) && max_norm(&sub_vec(&x_hat, x0)) <= target_x / int(4)
        })?
    };
    let (x_hat, u_hat) = project(&lambda_hat);
    let (s1, s2) = (dot(&u_hat, &vs[0]), dot(&u_hat, &vs[1]));
    // The segment towards a vertex with nonpositive value keeps u_hat·x <= 0.
    let toward = if s1.is_negative() || (s1.is_zero() && s2.is_zero()) { &vs[0] } else { &vs[1] };
    let mut kappa = scale.clone();
    let mut x_prime = add_vec(&x_hat, &scale_vec(&kappa, &sub_vec(toward, &x_hat)));
    while max_norm(&sub_vec(&x_prime, x0)) > target_x / int(2) {
        kappa /= int(2);
        x_prime = add_vec(&x_hat, &scale_vec(&kappa, &sub_vec(toward, &x_hat)));
    }
    let xx = dot(&x_hat, &x_hat);
    let lam = dot(&x_prime, &x_hat) / &xx;
    let w = sub_vec(&x_prime, &scale_vec(&lam, &x_hat));
    let ww = dot(&w, &w);
    if ww.is_zero() {
        return None;
    }
    // y1·x_hat = 1, y1·x' = -1; y2·x_hat = -1, y2·x' = -1.
    let y1 = sub_vec(
        &scale_vec(&(one() / &xx), &x_hat),
        &scale_vec(&((&lam + one()) / &ww), &w),
    );
    let y2 = add_vec(
        &scale_vec(&(-one() / &xx), &x_hat),
        &scale_vec(&((&lam - one()) / &ww), &w),
    );
    let t = scale * target_u / int(4) / max_norm(&y1).max(max_norm(&y2));
    let u1 = add_vec(&u_hat, &scale_vec(&t, &y1));
    let u2 = add_vec(&u_hat, &scale_vec(&t, &y2));
    let radius = &t / (int(2) * l1(&x_hat).max(l1(&x_prime)));
    let half = target_u / int(2);
    if ![&u1, &u2].iter().all(|u| max_norm(&sub_vec(u, u0)) + &radius <= half) {
        return None;
    }
    let mut internals = BTreeMap::new();
    internals.insert("lambda0".into(), basis.lambda0.clone());
    internals.insert("lambda_hat".into(), lambda_hat);
    internals.insert("delta".into(), scalar(&delta));
    internals.insert("kappa".into(), scalar(&kappa));
    internals.insert("t".into(), scalar(&t));
    internals.insert("x_hat".into(), x_hat);
    internals.insert("x_prime".into(), x_prime);
    internals.insert("u_hat".into(), u_hat);
    Some(Candidate {
        center: [u1, u2],
        radius,
        internals,
    })
}

/// Two indifferences over the hull of three independent vectors of `D`.
fn two_indifferences(
    u0: &[Rational],
    x0: &[Rational],
    basis: &Basis,
    target_u: &Rational,
    target_x: &Rational,
    scale: &Rational,
) -> Option<Candidate> {
    let vs = &basis.vectors;
    let g = gram(vs);
    // Utility change realizing the change `dy` of (u·v_j)_j: V (VᵀV)⁻¹ dy.
    let lift = |dy: &[Rational]| -> Option<Vec<Rational>> { Some(combine(vs, &linalg::solve(&g, dy)?)) };
    let y0: Vec<Rational> = vs.iter().map(|v| dot(u0, v)).collect();
    let (delta, lambda_hat) = if basis.interior() {
        (zero(), basis.lambda0.clone())
    } else {
        shift_weights(&basis.lambda0, &(scale * target_x / int(16)), |lambda| {
            let y_hat = project_onto_hyperplane(&y0, lambda, &zero());
            let moved = lift(&sub_vec(&y_hat, &y0)).map(|d| max_norm(&d));
            moved.is_some_and(|m| m <= target_u / int(8))
                && max_norm(&sub_vec(&combine(vs, lambda), x0)) <= target_x / int(4)
        })?
    };
    let y_hat = project_onto_hyperplane(&y0, &lambda_hat, &zero());
    let b = orthogonal_complement(&lambda_hat);
    let reach = b[..2]
        .iter()
        .map(|bi| lift(bi).map(|d| max_norm(&d)))
        .collect::<Option<Vec<_>>>()?
        .into_iter()
        .max()?;
    let delta_prime = scale * target_u / int(8) / reach;
    let ys: Vec<Vec<Rational>> = b[..2]
        .iter()
        .map(|bi| add_vec(&y_hat, &scale_vec(&delta_prime, bi)))
        .collect();
    if rank(&ys) < 2 {
        return None;
    }
    let u1 = add_vec(u0, &lift(&sub_vec(&ys[0], &y0))?);
    let u2 = add_vec(u0, &lift(&sub_vec(&ys[1], &y0))?);
    let mut m = ys.clone();
    m.push(vec![one(); 3]);
    let minv = inverse(&m)?;
    let x_hat = combine(vs, &lambda_hat);
    let x_slack = target_x / int(2) - max_norm(&sub_vec(&x_hat, x0));
    if !x_slack.is_positive() {
        return None;
    }
    // A perturbation of at most ρ per coordinate changes entry j of the first
    // two rows of m by at most ρ‖v_j‖₁. With c_i = |m⁻¹_i0| + |m⁻¹_i1|,
    // w_j = ‖v_j‖₁, S = Σ w_j λ̂_j and C = Σ w_j c_j, the map
    // λ ↦ λ̂ - m⁻¹ Δm λ contracts in the w-weighted norm when ρC < 1, and its
    // fixed point satisfies |λ_i - λ̂_i| <= ρ c_i S / (1 - ρC).
    let c: Vec<Rational> = minv.iter().map(|row| row[0].abs() + row[1].abs()).collect();
    let w: Vec<Rational> = vs.iter().map(|v| l1(v)).collect();
    let big_s = dot(&w, &lambda_hat);
    let big_c = dot(&w, &c);
    let heights: Vec<Rational> = vs.iter().map(|v| max_norm(v)).collect();
    let x_gain = dot(&heights, &c) * &big_s;
    let mut bound = (&x_slack / (&x_gain + &x_slack * &big_c)).min(one() / &big_c);
    for (ci, li) in c.iter().zip(&lambda_hat) {
        if ci.is_positive() {
            bound = bound.min(li / (ci * &big_s + li * &big_c));
        }
    }
    let half = target_u / int(2);
    let spent = max_norm(&sub_vec(&u1, u0)).max(max_norm(&sub_vec(&u2, u0)));
    let radius = (bound / int(2)).min(&half - spent);
    if !radius.is_positive() {
        return None;
    }
    let mut internals = BTreeMap::new();
    internals.insert("lambda0".into(), basis.lambda0.clone());
    internals.insert("lambda_hat".into(), lambda_hat);
    internals.insert("delta".into(), scalar(&delta));
    internals.insert("delta_prime".into(), scalar(&delta_prime));
    internals.insert("y0".into(), y0);
    internals.insert("y_hat".into(), y_hat);
    internals.insert("b1".into(), b[0].clone());
    internals.insert("b2".into(), b[1].clone());
    internals.insert("x_hat".into(), x_hat);
    Some(Candidate {
        center: [u1, u2],
        radius,
        internals,
    })
}

/// Finest step-size scale tried before the search reports failure.
pub fn min_scale() -> Rational {
    rational::dyadic(20)
}

/// Ball points used to confirm a witness: the center plus every corner when
/// there are at most 6 coordinates, else 64 seeded corners.
pub fn confirmation_points(center: &[Vec<Rational>; 2], radius: &Rational, seed: u64) -> Vec<[Vec<Rational>; 2]> {
    let n = center[0].len();
    let dims = 2 * n;
    let corner = |bits: u64| -> [Vec<Rational>; 2] {
        let shift = |state: usize, i: usize| {
            let bit = (bits >> (state * n + i)) & 1;
            if bit == 1 { radius.clone() } else { -radius }
        };
        [
            (0..n).map(|i| &center[0][i] + shift(0, i)).collect(),
            (0..n).map(|i| &center[1][i] + shift(1, i)).collect(),
        ]
    };
    let mut points = vec![center.clone()];
    if dims <= 6 {
        points.extend((0..(1u64 << dims)).map(corner));
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = BTreeSet::new();
        while seen.len() < 64 {
            let bits: u64 = rng.gen::<u64>() & ((1u64 << dims.min(63)) - 1);
            if seen.insert(bits) {
                points.push(corner(bits));
            }
        }
    }
    points
}

/// Builds a witness for a robust two-posterior equilibrium whose payoff lies
/// outside `V(mu0)`, confirmed by exact feasibility on
/// [`confirmation_points`].
pub fn perturbation_witness(
    g: &Game,
    e: &Equilibrium,
    target_radius_u: &Rational,
    target_radius_x: &Rational,
) -> Result<PerturbationWitness> {
    perturbation_witness_with(g, e, target_radius_u, target_radius_x, &VerifierOptions::default())
}

pub fn perturbation_witness_with(
    g: &Game,
    e: &Equilibrium,
    target_radius_u: &Rational,
    target_radius_x: &Rational,
    options: &VerifierOptions,
) -> Result<PerturbationWitness> {
    let violations = check_equilibrium(g, e);
    if !violations.is_empty() {
        return Err(Error::NotAnEquilibrium(join_violations(&violations)));
    }
    let profile = value_profile(g)?;
    let verdict = classify_in(&profile, g.prior(), e)?;
    if verdict.status != Status::Robust {
        return Err(Error::NotRobustEquilibrium(format!(
            "classified {} ({})",
            verdict.status.as_str(),
            verdict.notes
        )));
    }
    let v = g.sender_values()?;
    let sorted = e.sorted();
    let (lo, hi) = (&sorted.support[0], &sorted.support[1]);
    let x0 = sub_vec(&lo.mix, &hi.mix);
    let set = DifferenceSet::new(v.len(), profile.actions_at(&lo.mu), profile.actions_at(&hi.mu));
    let kinds = SignConstraintSystem::kinds_for(&lo.mu, &hi.mu);
    let case = match kinds {
        [SignKind::Geq, SignKind::Leq] => WitnessCase::FullReveal,
        [SignKind::Equality, SignKind::Equality] => WitnessCase::TwoIndifferences,
        _ => WitnessCase::OneIndifference,
    };
    let flipped = case == WitnessCase::OneIndifference && kinds[1] == SignKind::Equality;
    // With u2·x = 0 binding instead of u1·x = 0, negate D and swap the states.
    let sign = if flipped { int(-1) } else { int(1) };
    let x_ref = scale_vec(&sign, &x0);
    let vertices: Vec<Vec<Rational>> = set.vertices().iter().map(|w| scale_vec(&sign, w)).collect();
    let basis = match case {
        WitnessCase::FullReveal => None,
        WitnessCase::OneIndifference => Some(find_basis(&x_ref, (&lo.mix, &hi.mix, &sign), &vertices, 2).ok_or_else(|| {
            Error::WitnessSearchFailed("difference set is one-dimensional".into())
        })?),
        WitnessCase::TwoIndifferences => Some(find_basis(&x_ref, (&lo.mix, &hi.mix, &sign), &vertices, 3).ok_or_else(|| {
            Error::WitnessSearchFailed("difference set spans fewer than three dimensions".into())
        })?),
    };
    let mut scale = one();
    while scale >= min_scale() {
        let candidate = match (&basis, case) {
            (None, _) => Some(full_reveal(&v, &x0, target_radius_u, &scale)),
            (Some(b), WitnessCase::OneIndifference) => {
                one_indifference(&v, &x_ref, b, target_radius_u, target_radius_x, &scale).map(|mut c| {
                    if flipped {
                        c.center.swap(0, 1);
                    }
                    c
                })
            }
            (Some(b), _) => two_indifferences(&v, &x_ref, b, target_radius_u, target_radius_x, &scale),
        };
        if let Some(c) = candidate {
            // Any ball inside the constructed one is still a witness. Rounding
            // the center to a grid of step r/2 moves it by at most r/4, so the
            // ball of radius r/2 around the rounded center fits, and sampled
            // coordinates stay short dyadics.
            let r = rational::floor_dyadic(&c.radius);
            let half = &r / int(2);
            let snap = |u: &Vec<Rational>| -> Vec<Rational> { u.iter().map(|x| (x / &half).round() * &half).collect() };
            let witness = PerturbationWitness {
                center: [snap(&c.center[0]), snap(&c.center[1])],
                radius: half,
                x_center: x0.clone(),
                x_radius: target_radius_x.clone(),
                case,
                internals: c.internals,
            };
            if confirm(g, e, &witness, options)? {
                return Ok(witness);
            }
        }
        scale /= int(2);
    }
    Err(Error::WitnessSearchFailed(
        "step sizes shrank below 2^-20 of the targets without a confirmed witness".into(),
    ))
}

fn confirm(g: &Game, e: &Equilibrium, w: &PerturbationWitness, options: &VerifierOptions) -> Result<bool> {
    for point in confirmation_points(&w.center, &w.radius, 0) {
        let query = FeasibilityQuery::for_equilibrium(g, e, point, Some((w.x_center.clone(), w.x_radius.clone())), &options.eps_payoff)?;
        if !matches!(query.search(), Search::Found(_)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{construct_equilibrium, SupportChoice};
    use crate::fixtures::{example1, example2};
    use crate::rational::rat;

    fn belief(p: i64, q: i64) -> Belief {
        Belief::new(rat(p, q)).unwrap()
    }

    #[test]
    fn span_dimensions() {
        assert_eq!(dim_span_d(&example1(), &belief(1, 4), &belief(3, 4)), 2);
        assert_eq!(dim_span_d(&example2(), &belief(1, 8), &belief(3, 4)), 3);
        assert_eq!(dim_span_d(&example1(), &belief(1, 2), &belief(1, 2)), 0);
    }

    #[test]
    fn generators_have_full_rank() {
        for (a, b) in [(vec![0, 1], vec![0, 2]), (vec![1, 2], vec![0, 3]), (vec![0], vec![0]), (vec![0, 1, 2], vec![1])] {
            let d = DifferenceSet::new(4, &a, &b);
            let gens = d.generators();
            assert_eq!(gens.len(), d.span_dim);
            assert_eq!(rank(&gens), d.span_dim);
            assert_eq!(rank(&d.vertices()), d.span_dim);
        }
    }

    #[test]
    fn sign_kinds() {
        assert_eq!(
            SignConstraintSystem::kinds_for(&zero(), &rat(3, 4)),
            [SignKind::Equality, SignKind::Leq]
        );
        assert_eq!(
            SignConstraintSystem::kinds_for(&rat(1, 4), &one()),
            [SignKind::Geq, SignKind::Equality]
        );
        assert_eq!(
            SignConstraintSystem::kinds_for(&zero(), &one()),
            [SignKind::Geq, SignKind::Leq]
        );
    }

    #[test]
    fn decomposes_zero_and_disjoint_differences() {
        let z = vec![zero(), zero(), zero()];
        let delta0 = unit_vec(3, 0);
        let dec = decompose_difference(&z, &[0, 1], &[0, 2], (&delta0, &delta0)).unwrap();
        assert_eq!((dec.r, dec.r_prime), (delta0.clone(), delta0));
        let r0 = unit_vec(3, 1);
        let r0p = vec![rat(1, 2), zero(), rat(1, 2)];
        let x = sub_vec(&r0, &r0p);
        let dec = decompose_difference(&x, &[1], &[0, 2], (&r0, &r0p)).unwrap();
        assert_eq!((dec.r, dec.r_prime), (r0, r0p));
    }

    #[test]
    fn shared_coordinate_absorbs_mass_change() {
        // A = {0, 2}, A' = {0, 3}; anchor puts 1/10 on the shared action 0.
        let r0 = vec![rat(1, 10), zero(), rat(9, 10), zero()];
        let r0p = vec![rat(1, 10), zero(), zero(), rat(9, 10)];
        let x = vec![zero(), zero(), rat(4, 5), rat(-4, 5)];
        let dec = decompose_difference(&x, &[0, 2], &[0, 3], (&r0, &r0p)).unwrap();
        assert_eq!(dec.d, vec![rat(1, 5), zero(), zero(), zero()]);
        assert_eq!(sub_vec(&dec.r, &dec.r_prime), x);
    }

    #[test]
    fn rejects_non_members_and_bad_anchors() {
        let r0 = unit_vec(3, 1);
        let r0p = unit_vec(3, 2);
        let outside = vec![int(1), zero(), int(-1)];
        assert!(matches!(
            decompose_difference(&outside, &[1], &[2], (&r0, &r0p)),
            Err(Error::NotInD(_))
        ));
        let x = sub_vec(&r0, &r0p);
        assert!(matches!(
            decompose_difference(&x, &[1], &[2], (&r0p, &r0)),
            Err(Error::AnchorMismatch(_))
        ));
    }

    #[test]
    fn witness_cases_on_fixtures() {
        let g1 = example1();
        let e1 = construct_equilibrium(&g1, &int(1), &SupportChoice::Extreme).unwrap();
        let w = perturbation_witness(&g1, &e1, &rat(1, 100), &rat(1, 4)).unwrap();
        assert_eq!(w.case, WitnessCase::OneIndifference);
        let g2 = example2();
        let e2 = construct_equilibrium(&g2, &rat(3, 2), &SupportChoice::Extreme).unwrap();
        let w = perturbation_witness(&g2, &e2, &rat(1, 100), &rat(1, 4)).unwrap();
        assert_eq!(w.case, WitnessCase::TwoIndifferences);
        assert!(w.internals["lambda_hat"].iter().all(|l| l.is_positive()));
        let inner = construct_equilibrium(&g1, &rat(1, 2), &SupportChoice::Explicit(rat(1, 4), rat(3, 4))).unwrap();
        assert!(matches!(
            perturbation_witness(&g1, &inner, &rat(1, 100), &rat(1, 4)),
            Err(Error::NotRobustEquilibrium(_))
        ));
    }

    #[test]
    fn full_reveal_witness() {
        // A(0) = {a1}, A(1) = {a2}; the intermediate action a0 is never optimal at the ends.
        let g = Game::transparent(
            rat(1, 2),
            &[int(0), int(1), int(1)],
            vec![[int(2), int(2)], [int(4), int(0)], [int(0), int(4)]],
        )
        .unwrap();
        let e = construct_equilibrium(&g, &int(1), &SupportChoice::Explicit(zero(), one())).unwrap();
        let w = perturbation_witness(&g, &e, &rat(1, 100), &rat(1, 4)).unwrap();
        assert_eq!(w.case, WitnessCase::FullReveal);
        assert_eq!(w.x_center, vec![zero(), int(1), int(-1)]);
    }
}
