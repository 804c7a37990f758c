//! Receiver best replies and the sender value correspondence over `[0, 1]`.
//!
//! A belief partition alternates point cells and open cells, starting and
//! ending with the point cells `{0}` and `{1}`. Every cell carries the set of
//! receiver-optimal actions, which is constant on the cell.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::One;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{Belief, Game, State};
use crate::rational::{self, format_rational, get, one, zero, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Span {
    Point(Rational),
    Open(Rational, Rational),
}

impl Span {
    pub fn contains(&self, mu: &Rational) -> bool {
        match self {
            Span::Point(p) => p == mu,
            Span::Open(lo, hi) => lo < mu && mu < hi,
        }
    }

    pub fn lo(&self) -> &Rational {
        match self {
            Span::Point(p) => p,
            Span::Open(lo, _) => lo,
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            Span::Point(p) => p,
            Span::Open(_, hi) => hi,
        }
    }

    /// A belief inside the span: the point itself or the midpoint.
    pub fn representative(&self) -> Rational {
        match self {
            Span::Point(p) => p.clone(),
            Span::Open(lo, hi) => (lo + hi) / rational::int(2),
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Span::Point(_))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Span::Point(p) => write!(f, "{{{}}}", format_rational(p)),
            Span::Open(lo, hi) => write!(f, "({}, {})", format_rational(lo), format_rational(hi)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub span: Span,
    /// Sorted, nonempty.
    pub actions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestReplyPartition {
    cells: Vec<Cell>,
}

/// A maximal run of cells sharing one action set, as a subinterval of
/// `[0, 1]` with closure flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub lo: Rational,
    pub lo_closed: bool,
    pub hi: Rational,
    pub hi_closed: bool,
    pub actions: Vec<usize>,
}

pub fn best_reply_set(g: &Game, mu: &Belief) -> Vec<usize> {
    argmax_actions(g, mu.value())
}

fn argmax_actions(g: &Game, mu: &Rational) -> Vec<usize> {
    let payoffs: Vec<Rational> = (0..g.num_actions())
        .map(|a| g.receiver_expected(a, mu))
        .collect();
    let best = payoffs.iter().max().expect("at least two actions").clone();
    (0..payoffs.len()).filter(|&a| payoffs[a] == best).collect()
}

/// Roots in `(0, 1)` of all pairwise receiver indifference equations.
pub fn indifference_roots(g: &Game) -> Vec<Rational> {
    let n = g.num_actions();
    let mut roots = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            let d1 = g.receiver_utility(a, State::Theta1) - g.receiver_utility(b, State::Theta1);
            let d2 = g.receiver_utility(a, State::Theta2) - g.receiver_utility(b, State::Theta2);
            if d1 == d2 {
                continue;
            }
            let mu = &d1 / (&d1 - &d2);
            if mu > zero() && mu < one() {
                roots.insert(mu);
            }
        }
    }
    roots.into_iter().collect()
}

pub fn best_reply_partition(g: &Game) -> BestReplyPartition {
    let mut points = vec![zero()];
    points.extend(indifference_roots(g));
    points.push(one());
    let mut cells = Vec::with_capacity(2 * points.len());
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            let span = Span::Open(points[i - 1].clone(), p.clone());
            let actions = argmax_actions(g, &span.representative());
            cells.push(Cell { span, actions });
        }
        cells.push(Cell {
            span: Span::Point(p.clone()),
            actions: argmax_actions(g, p),
        });
    }
    BestReplyPartition::from_cells_merged(cells)
}

impl BestReplyPartition {
    /// Validates tiling and merges interior points whose action set agrees
    /// with both neighbours.
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        validate_tiling(cells.iter().map(|c| &c.span))?;
        for (i, c) in cells.iter().enumerate() {
            if c.actions.is_empty() {
                return Err(Error::validation(
                    format!("cells[{i}].actions"),
                    "action set must be nonempty",
                ));
            }
        }
        Ok(Self::from_cells_merged(cells))
    }

    fn from_cells_merged(cells: Vec<Cell>) -> Self {
        let mut cells: Vec<Cell> = cells
            .into_iter()
            .map(|mut c| {
                c.actions.sort_unstable();
                c.actions.dedup();
                c
            })
            .collect();
        let mut i = 2;
        while i + 1 < cells.len() {
            let same = cells[i].actions == cells[i - 1].actions
                && cells[i].actions == cells[i + 1].actions;
            if same {
                let hi = cells[i + 1].span.hi().clone();
                let lo = cells[i - 1].span.lo().clone();
                cells[i - 1].span = Span::Open(lo, hi);
                cells.drain(i..i + 2);
            } else {
                i += 2;
            }
        }
        BestReplyPartition { cells }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell_index(&self, mu: &Rational) -> usize {
        // Cells are sorted; binary search on the span ordering.
        let (mut lo, mut hi) = (0, self.cells.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            let span = &self.cells[mid].span;
            if span.contains(mu) {
                return mid;
            }
            if mu <= span.lo() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        panic!("belief {} outside [0, 1]", format_rational(mu));
    }

    pub fn actions_at(&self, mu: &Rational) -> &[usize] {
        &self.cells[self.cell_index(mu)].actions
    }

    /// Interior breakpoints, in increasing order.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let last = self.cells.len() - 1;
        self.cells[1..last]
            .iter()
            .filter_map(|c| match &c.span {
                Span::Point(p) => Some(p.clone()),
                Span::Open(..) => None,
            })
            .collect()
    }

    /// Coalesces consecutive cells with equal action sets.
    pub fn regions(&self) -> Vec<Region> {
        let mut out: Vec<Region> = Vec::new();
        for c in &self.cells {
            let (lo, hi, closed) = match &c.span {
                Span::Point(p) => (p.clone(), p.clone(), true),
                Span::Open(lo, hi) => (lo.clone(), hi.clone(), false),
            };
            if let Some(last) = out.last_mut() {
                if last.actions == c.actions {
                    last.hi = hi;
                    last.hi_closed = closed;
                    continue;
                }
            }
            out.push(Region {
                lo,
                lo_closed: closed,
                hi,
                hi_closed: closed,
                actions: c.actions.clone(),
            });
        }
        out
    }

    /// Actions optimal at some belief.
    pub fn used_actions(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.cells.iter().flat_map(|c| c.actions.iter().copied()).collect();
        set.into_iter().collect()
    }
}

fn validate_tiling<'a>(spans: impl IntoIterator<Item = &'a Span>) -> Result<()> {
    let spans: Vec<&Span> = spans.into_iter().collect();
    let bad = |i: usize, msg: &str| Err(Error::validation(format!("cells[{i}].span"), msg));
    if spans.len().is_multiple_of(2) {
        return bad(spans.len().saturating_sub(1), "cells must alternate point/open and end with {1}");
    }
    for (i, s) in spans.iter().enumerate() {
        match (i % 2, s) {
            (0, Span::Point(p)) => {
                let expected_lo = if i == 0 { Some(zero()) } else { None };
                if let Some(z) = expected_lo {
                    if *p != z {
                        return bad(i, "first cell must be the point 0");
                    }
                } else if spans[i - 1].hi() != p {
                    return bad(i, "point must close the preceding open cell");
                }
            }
            (1, Span::Open(lo, hi)) => {
                if lo >= hi || spans[i - 1].hi() != lo {
                    return bad(i, "open cell must start at the preceding point");
                }
            }
            _ => return bad(i, "cells must alternate point and open spans"),
        }
    }
    if !spans.last().expect("nonempty").hi().is_one() {
        return bad(spans.len() - 1, "last cell must be the point 1");
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl ValueInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        ValueInterval { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        ValueInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn contains(&self, s: &Rational) -> bool {
        &self.lo <= s && s <= &self.hi
    }

    pub fn to_json(&self) -> Value {
        json!([rational::to_json(&self.lo), rational::to_json(&self.hi)])
    }
}

impl fmt::Display for ValueInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{{{}}}", format_rational(&self.lo))
        } else {
            write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
        }
    }
}

pub fn value_correspondence(g: &Game, mu: &Belief) -> Result<ValueInterval> {
    let v = g.sender_values()?;
    Ok(hull(&v, &best_reply_set(g, mu)))
}

fn hull(values: &[Rational], actions: &[usize]) -> ValueInterval {
    let lo = actions.iter().map(|&a| &values[a]).min().expect("nonempty");
    let hi = actions.iter().map(|&a| &values[a]).max().expect("nonempty");
    ValueInterval::new(lo.clone(), hi.clone())
}

/// A best-reply partition together with the sender value of every action;
/// each cell's value interval is the hull over its action set.
///
/// Profiles come either from a transparent game or directly from abstract
/// input, in which case actions are synthetic labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueProfile {
    partition: BestReplyPartition,
    action_values: Vec<Rational>,
    values: Vec<ValueInterval>,
}

pub fn value_profile(g: &Game) -> Result<ValueProfile> {
    let v = g.sender_values()?;
    ValueProfile::new(best_reply_partition(g), v)
}

impl ValueProfile {
    pub fn new(partition: BestReplyPartition, action_values: Vec<Rational>) -> Result<Self> {
        for (i, c) in partition.cells.iter().enumerate() {
            if let Some(&a) = c.actions.iter().find(|&&a| a >= action_values.len()) {
                return Err(Error::validation(
                    format!("cells[{i}].actions"),
                    format!("action {a} has no value"),
                ));
            }
        }
        let values = partition
            .cells
            .iter()
            .map(|c| hull(&action_values, &c.actions))
            .collect();
        Ok(ValueProfile {
            partition,
            action_values,
            values,
        })
    }

    /// Builds a profile from per-cell value intervals alone. Each open cell
    /// with a singleton value gets one action of that value; point cells
    /// reuse neighbouring actions whose values fall in their interval and add
    /// fresh actions for uncovered endpoints.
    pub fn from_value_cells(cells: Vec<(Span, ValueInterval)>) -> Result<Self> {
        validate_tiling(cells.iter().map(|(s, _)| s))?;
        let mut action_values: Vec<Rational> = Vec::new();
        let mut actions: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
        for (i, (_, v)) in cells.iter().enumerate().filter(|(i, _)| i % 2 == 1) {
            if v.lo > v.hi {
                return Err(Error::validation(format!("cells[{i}].value"), "lo exceeds hi"));
            }
            // Open cells: one action per distinct endpoint value.
            for val in [&v.lo, &v.hi] {
                if !actions[i].iter().any(|&a| &action_values[a] == val) {
                    action_values.push(val.clone());
                    actions[i].push(action_values.len() - 1);
                }
            }
        }
        for i in (0..cells.len()).step_by(2) {
            let v = &cells[i].1;
            if v.lo > v.hi {
                return Err(Error::validation(format!("cells[{i}].value"), "lo exceeds hi"));
            }
            let mut set: Vec<usize> = Vec::new();
            for j in [i.checked_sub(1), Some(i + 1)].into_iter().flatten() {
                if j < cells.len() {
                    set.extend(actions[j].iter().copied().filter(|&a| v.contains(&action_values[a])));
                }
            }
            for val in [&v.lo, &v.hi] {
                if !set.iter().any(|&a| &action_values[a] == val) {
                    action_values.push(val.clone());
                    set.push(action_values.len() - 1);
                }
            }
            actions[i] = set;
        }
        let cells = cells
            .into_iter()
            .zip(actions)
            .map(|((span, _), actions)| Cell { span, actions })
            .collect();
        Self::new(BestReplyPartition::from_cells_merged(cells), action_values)
    }

    pub fn partition(&self) -> &BestReplyPartition {
        &self.partition
    }

    pub fn cells(&self) -> &[Cell] {
        &self.partition.cells
    }

    pub fn values(&self) -> &[ValueInterval] {
        &self.values
    }

    pub fn action_values(&self) -> &[Rational] {
        &self.action_values
    }

    pub fn cell_index(&self, mu: &Rational) -> usize {
        self.partition.cell_index(mu)
    }

    pub fn actions_at(&self, mu: &Rational) -> &[usize] {
        self.partition.actions_at(mu)
    }

    pub fn value_at(&self, mu: &Rational) -> &ValueInterval {
        &self.values[self.cell_index(mu)]
    }

    /// Smallest and largest value attained anywhere.
    pub fn value_range(&self) -> ValueInterval {
        let lo = self.values.iter().map(|v| &v.lo).min().expect("nonempty");
        let hi = self.values.iter().map(|v| &v.hi).max().expect("nonempty");
        ValueInterval::new(lo.clone(), hi.clone())
    }

    pub fn to_json(&self, prior: Option<&Rational>) -> Value {
        let cells: Vec<Value> = self
            .partition
            .cells
            .iter()
            .zip(&self.values)
            .map(|(c, v)| {
                json!({
                    "span": [rational::to_json(c.span.lo()), rational::to_json(c.span.hi())],
                    "actions": c.actions,
                    "value": v.to_json(),
                })
            })
            .collect();
        let mut doc = json!({
            "action_values": rational::vec_to_json(&self.action_values),
            "cells": cells,
        });
        if let Some(p) = prior {
            doc["prior"] = rational::to_json(p);
        }
        doc
    }
}

/// Parses the profile format. A span `[x, x]` is a point cell; `actions` and
/// `action_values` are optional and synthesized from `value` when absent.
pub fn parse_profile(doc: &Value) -> Result<(ValueProfile, Option<Rational>)> {
    let prior = match doc.get("prior") {
        Some(p) => Some(rational::from_json(p, "prior")?),
        None => None,
    };
    let raw = get(doc, "cells", "")?
        .as_array()
        .ok_or_else(|| Error::schema("cells", "expected an array of cells"))?;
    let mut spans = Vec::with_capacity(raw.len());
    let mut values = Vec::with_capacity(raw.len());
    let mut action_sets = Vec::with_capacity(raw.len());
    for (i, c) in raw.iter().enumerate() {
        let path = format!("cells[{i}]");
        let span = rational::vec_from_json(get(c, "span", &path)?, &format!("{path}.span"))?;
        let span = match span.as_slice() {
            [a, b] if a == b => Span::Point(a.clone()),
            [a, b] => Span::Open(a.clone(), b.clone()),
            _ => return Err(Error::schema(format!("{path}.span"), "expected [lo, hi]")),
        };
        spans.push(span);
        values.push(match c.get("value") {
            Some(v) => {
                let lh = rational::vec_from_json(v, &format!("{path}.value"))?;
                match lh.as_slice() {
                    [lo, hi] if lo <= hi => Some(ValueInterval::new(lo.clone(), hi.clone())),
                    _ => {
                        return Err(Error::validation(format!("{path}.value"), "expected [lo, hi] with lo <= hi"))
                    }
                }
            }
            None => None,
        });
        action_sets.push(match c.get("actions") {
            Some(a) => Some(
                a.as_array()
                    .ok_or_else(|| Error::schema(format!("{path}.actions"), "expected an array"))?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .map(|k| k as usize)
                            .ok_or_else(|| Error::schema(format!("{path}.actions"), "expected action indices"))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        });
    }
    let profile = match doc.get("action_values") {
        Some(av) if action_sets.iter().all(Option::is_some) => {
            let action_values = rational::vec_from_json(av, "action_values")?;
            let cells: Vec<Cell> = spans
                .iter()
                .cloned()
                .zip(action_sets)
                .map(|(span, a)| Cell {
                    span,
                    actions: a.expect("checked"),
                })
                .collect();
            let profile = ValueProfile::new(BestReplyPartition::new(cells)?, action_values)?;
            for (i, (span, v)) in spans.iter().zip(&values).enumerate() {
                if let Some(v) = v {
                    if profile.value_at(&span.representative()) != v {
                        return Err(Error::validation(
                            format!("cells[{i}].value"),
                            "value disagrees with the hull of the cell's action values",
                        ));
                    }
                }
            }
            profile
        }
        _ => {
            let cells = spans
                .into_iter()
                .zip(values)
                .enumerate()
                .map(|(i, (s, v))| {
                    v.map(|v| (s, v))
                        .ok_or_else(|| Error::schema(format!("cells[{i}].value"), "missing field"))
                })
                .collect::<Result<Vec<_>>>()?;
            ValueProfile::from_value_cells(cells)?
        }
    };
    if let Some(p) = &prior {
        if p <= &zero() || p >= &Rational::one() {
            return Err(Error::validation("prior", "prior must lie strictly between 0 and 1"));
        }
    }
    Ok((profile, prior))
}
