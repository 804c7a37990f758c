//! Finite unions of intervals of rationals.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{self, format_rational, get, Rational};

/// Finite union of closed intervals, kept sorted and with overlapping or
/// touching pieces merged.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntervalUnion {
    pieces: Vec<(Rational, Rational)>,
}

impl IntervalUnion {
    pub fn new(mut pieces: Vec<(Rational, Rational)>) -> Self {
        pieces.retain(|(lo, hi)| lo <= hi);
        pieces.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(pieces.len());
        for (lo, hi) in pieces {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        IntervalUnion { pieces: merged }
    }

    pub fn pieces(&self) -> &[(Rational, Rational)] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_interval(&self) -> bool {
        self.pieces.len() == 1
    }

    pub fn contains(&self, s: &Rational) -> bool {
        self.pieces.iter().any(|(lo, hi)| lo <= s && s <= hi)
    }

    pub fn min(&self) -> Option<&Rational> {
        self.pieces.first().map(|p| &p.0)
    }

    pub fn max(&self) -> Option<&Rational> {
        self.pieces.last().map(|p| &p.1)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.pieces
                .iter()
                .map(|(lo, hi)| json!([rational::to_json(lo), rational::to_json(hi)]))
                .collect(),
        )
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|(lo, hi)| {
                if lo == hi {
                    format!("{{{}}}", format_rational(lo))
                } else {
                    format!("[{}, {}]", format_rational(lo), format_rational(hi))
                }
            })
            .collect();
        f.write_str(&parts.join(" ∪ "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub lo_closed: bool,
    pub hi: Rational,
    pub hi_closed: bool,
}

impl Interval {
    pub fn contains(&self, s: &Rational) -> bool {
        let above = if self.lo_closed { s >= &self.lo } else { s > &self.lo };
        let below = if self.hi_closed { s <= &self.hi } else { s < &self.hi };
        above && below
    }
}

/// Isolated points plus positive-length intervals with closure flags.
/// Components are disjoint and sorted; a component never abuts another in a
/// way that would make their union a single interval.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RobustPayoffSet {
    pub points: Vec<Rational>,
    pub intervals: Vec<Interval>,
}

impl RobustPayoffSet {
    /// Assembles the set from sorted distinct `candidates`, the membership of
    /// each candidate, and the membership of each open gap between
    /// consecutive candidates (`gaps.len() == candidates.len() - 1`).
    pub fn from_scan(candidates: &[Rational], point_in: &[bool], gap_in: &[bool]) -> Self {
        assert_eq!(candidates.len(), point_in.len());
        assert_eq!(gap_in.len() + 1, candidates.len().max(1));
        let mut out = RobustPayoffSet::default();
        let mut open: Option<Interval> = None;
        for (i, c) in candidates.iter().enumerate() {
            let gap_before = i > 0 && gap_in[i - 1];
            let gap_after = i < gap_in.len() && gap_in[i];
            match open.as_mut() {
                Some(iv) if gap_before => {
                    iv.hi = c.clone();
                    iv.hi_closed = point_in[i];
                    if !(point_in[i] && gap_after) {
                        out.intervals.push(open.take().expect("open interval"));
                    }
                }
                _ => {}
            }
            if open.is_none() && gap_after {
                // Starts a new interval unless it continues the one just closed.
                open = Some(Interval {
                    lo: c.clone(),
                    lo_closed: point_in[i],
                    hi: c.clone(),
                    hi_closed: false,
                });
            } else if point_in[i] && !gap_before && !gap_after {
                out.points.push(c.clone());
            }
        }
        out
    }

    pub fn contains(&self, s: &Rational) -> bool {
        self.points.contains(s) || self.intervals.iter().any(|iv| iv.contains(s))
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.intervals.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "points": rational::vec_to_json(&self.points),
            "intervals": self.intervals.iter().map(|iv| json!({
                "lo": rational::to_json(&iv.lo),
                "lo_closed": iv.lo_closed,
                "hi": rational::to_json(&iv.hi),
                "hi_closed": iv.hi_closed,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let points = rational::vec_from_json(get(doc, "points", "")?, "points")?;
        let raw = get(doc, "intervals", "")?
            .as_array()
            .ok_or_else(|| Error::schema("intervals", "expected an array"))?;
        let intervals = raw
            .iter()
            .enumerate()
            .map(|(i, iv)| {
                let path = format!("intervals[{i}]");
                let flag = |key: &str| -> Result<bool> {
                    get(iv, key, &path)?
                        .as_bool()
                        .ok_or_else(|| Error::schema(format!("{path}.{key}"), "expected a boolean"))
                };
                Ok(Interval {
                    lo: rational::from_json(get(iv, "lo", &path)?, &format!("{path}.lo"))?,
                    lo_closed: flag("lo_closed")?,
                    hi: rational::from_json(get(iv, "hi", &path)?, &format!("{path}.hi"))?,
                    hi_closed: flag("hi_closed")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RobustPayoffSet { points, intervals })
    }
}

impl fmt::Display for RobustPayoffSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(Rational, String)> = self
            .points
            .iter()
            .map(|p| (p.clone(), format!("{{{}}}", format_rational(p))))
            .collect();
        parts.extend(self.intervals.iter().map(|iv| {
            (
                iv.lo.clone(),
                format!(
                    "{}{}, {}{}",
                    if iv.lo_closed { '[' } else { '(' },
                    format_rational(&iv.lo),
                    format_rational(&iv.hi),
                    if iv.hi_closed { ']' } else { ')' }
                ),
            )
        }));
        parts.sort();
        if parts.is_empty() {
            return f.write_str("{}");
        }
        let text: Vec<String> = parts.into_iter().map(|(_, s)| s).collect();
        f.write_str(&text.join(" ∪ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn merges_touching_pieces() {
        let u = IntervalUnion::new(vec![(int(1), int(2)), (int(0), int(1)), (int(3), int(3))]);
        assert_eq!(u.pieces(), &[(int(0), int(2)), (int(3), int(3))]);
        assert_eq!(u.to_string(), "[0, 2] ∪ {3}");
        assert!(u.contains(&rat(3, 2)));
        assert!(!u.contains(&rat(5, 2)));
    }

    #[test]
    fn scan_builds_points_and_intervals() {
        let c = [int(0), int(1), int(2), int(3)];
        let set = RobustPayoffSet::from_scan(&c, &[true, true, true, false], &[false, true, false]);
        assert_eq!(set.points, vec![int(0)]);
        assert_eq!(set.to_string(), "{0} ∪ [1, 2]");
        assert!(set.contains(&rat(3, 2)));
        assert!(!set.contains(&rat(1, 2)));
    }

    #[test]
    fn scan_keeps_half_open_ends() {
        let c = [int(0), int(1), int(2)];
        let set = RobustPayoffSet::from_scan(&c, &[false, true, false], &[true, true]);
        assert_eq!(set.to_string(), "(0, 2)");
        let set = RobustPayoffSet::from_scan(&c, &[true, false, true], &[true, true]);
        assert_eq!(set.to_string(), "[0, 1) ∪ (1, 2]");
    }

    #[test]
    fn json_round_trip() {
        let c = [int(0), int(1), int(2)];
        let set = RobustPayoffSet::from_scan(&c, &[true, false, true], &[false, true]);
        assert_eq!(RobustPayoffSet::from_json(&set.to_json()).unwrap(), set);
    }

    #[test]
    fn single_candidate() {
        let set = RobustPayoffSet::from_scan(&[int(4)], &[true], &[]);
        assert_eq!(set.points, vec![int(4)]);
    }
}
