//! Step plots of the value correspondence, the envelope as a function of the
//! prior, and the region of priors and payoffs attainable robustly.
//!
//! The SVG is presentation only; the CSV carries the same cell data for
//! scripts. Both are byte-deterministic: coordinates come from exact
//! rationals rounded to two decimals.

use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::best_reply::{ValueInterval, ValueProfile};
use crate::equilibrium::envelope;
use crate::error::Result;
use crate::intervals::RobustPayoffSet;
use crate::rational::{format_fixed, format_rational, int, Rational};
use crate::robustness::robust_set_in;

pub const ROBUST_FILL: &str = "#cce6ff";

/// `(mu_lo, mu_hi) × (s_lo, s_hi)`; either side may be degenerate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rect {
    pub mu: (Rational, Rational),
    pub s: (Rational, Rational),
}

impl Rect {
    pub fn has_area(&self) -> bool {
        self.mu.0 < self.mu.1 && self.s.0 < self.s.1
    }
}

/// Data for one figure. `envelope[i]` and `robust[i]` describe priors in
/// cell `i`; the endpoint cells have no robust set because the prior must be
/// interior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FigureSpec {
    pub profile: ValueProfile,
    pub prior: Option<Rational>,
    pub envelope: Vec<Rational>,
    pub robust: Vec<Option<RobustPayoffSet>>,
    /// Robust payoffs outside `V(mu0)`: rectangles over open cells plus
    /// segments over points or single payoffs.
    pub region: Vec<Rect>,
}

/// Pieces of `[a, b]` strictly below or above the babbling interval `v0`.
fn outside(a: &Rational, b: &Rational, v0: &ValueInterval) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    if a < &v0.lo {
        out.push((a.clone(), b.clone().min(v0.lo.clone())));
    }
    if b > &v0.hi {
        out.push((a.clone().max(v0.hi.clone()), b.clone()));
    }
    out.retain(|(lo, hi)| lo < hi || !v0.contains(lo));
    out
}

impl FigureSpec {
    pub fn new(profile: ValueProfile, prior: Option<Rational>) -> Result<Self> {
        let cells = profile.cells().to_vec();
        let mut env = Vec::with_capacity(cells.len());
        let mut robust = Vec::with_capacity(cells.len());
        let mut region = Vec::new();
        for (cell, v) in cells.iter().zip(profile.values()) {
            let mu = cell.span.representative();
            if mu.is_zero() || mu.is_one() {
                env.push(v.hi.clone());
                robust.push(None);
                continue;
            }
            env.push(envelope(&profile, &mu));
            let set = robust_set_in(&profile, &mu)?;
            let span = (cell.span.lo().clone(), cell.span.hi().clone());
            let pieces = set
                .points
                .iter()
                .map(|p| (p.clone(), p.clone()))
                .chain(set.intervals.iter().map(|iv| (iv.lo.clone(), iv.hi.clone())));
            for (a, b) in pieces {
                for s in outside(&a, &b, v) {
                    region.push(Rect { mu: span.clone(), s });
                }
            }
            robust.push(Some(set));
        }
        Ok(FigureSpec {
            profile,
            prior,
            envelope: env,
            robust,
            region,
        })
    }

    pub fn rectangles(&self) -> impl Iterator<Item = &Rect> {
        self.region.iter().filter(|r| r.has_area())
    }
}

const WIDTH: i64 = 640;
const HEIGHT: i64 = 400;
const MARGIN: i64 = 48;

struct Frame {
    s_min: Rational,
    s_max: Rational,
}

impl Frame {
    fn x(&self, mu: &Rational) -> String {
        format_fixed(&(int(MARGIN) + mu * int(WIDTH - 2 * MARGIN)), 2)
    }

    fn y(&self, s: &Rational) -> String {
        let t = (s - &self.s_min) / (&self.s_max - &self.s_min);
        format_fixed(&(int(HEIGHT - MARGIN) - t * int(HEIGHT - 2 * MARGIN)), 2)
    }

    fn line(&self, out: &mut String, p: (&Rational, &Rational), q: (&Rational, &Rational), style: &str) {
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" {style}/>"#,
            self.x(p.0),
            self.y(p.1),
            self.x(q.0),
            self.y(q.1)
        );
    }
}

const SOLID: &str = r#"stroke="black" stroke-width="3""#;
const DASHED: &str = r#"stroke="black" stroke-width="1.5" stroke-dasharray="6 4" fill="none""#;
const THIN: &str = r##"stroke="#555555" stroke-width="1""##;

pub fn emit_svg(spec: &FigureSpec) -> String {
    let range = spec.profile.value_range();
    let (s_min, s_max) = if range.lo == range.hi {
        (&range.lo - int(1), &range.hi + int(1))
    } else {
        (range.lo.clone(), range.hi.clone())
    };
    let frame = Frame { s_min, s_max };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    for r in spec.rectangles() {
        let (x0, x1) = (frame.x(&r.mu.0), frame.x(&r.mu.1));
        let (y0, y1) = (frame.y(&r.s.1), frame.y(&r.s.0));
        let w = format_fixed(&(parse_fixed(&x1) - parse_fixed(&x0)), 2);
        let h = format_fixed(&(parse_fixed(&y1) - parse_fixed(&y0)), 2);
        let _ = writeln!(
            out,
            r#"<rect class="robust" x="{x0}" y="{y0}" width="{w}" height="{h}" fill="{ROBUST_FILL}" stroke="none"/>"#
        );
    }
    for r in spec.region.iter().filter(|r| !r.has_area()) {
        // Degenerate pieces: a single payoff over a cell or a payoff range at
        // a breakpoint.
        let style = format!(r#"stroke="{ROBUST_FILL}" stroke-width="4""#);
        frame.line(&mut out, (&r.mu.0, &r.s.0), (&r.mu.1, &r.s.1), &style);
    }
    let zero = Rational::zero();
    let one = Rational::one();
    frame.line(&mut out, (&zero, &frame.s_min), (&one, &frame.s_min), THIN);
    frame.line(&mut out, (&zero, &frame.s_min), (&zero, &frame.s_max), THIN);
    for (cell, v) in spec.profile.cells().iter().zip(spec.profile.values()) {
        let (lo, hi) = (cell.span.lo(), cell.span.hi());
        if cell.span.is_point() {
            frame.line(&mut out, (lo, &v.lo), (lo, &v.hi), SOLID);
            let _ = writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="3" fill="black"/>"#,
                frame.x(lo),
                frame.y(&v.hi)
            );
        } else {
            frame.line(&mut out, (lo, &v.lo), (hi, &v.lo), SOLID);
            if v.hi != v.lo {
                frame.line(&mut out, (lo, &v.hi), (hi, &v.hi), SOLID);
            }
        }
    }
    let _ = writeln!(out, r#"<g class="envelope">"#);
    for (cell, c) in spec.profile.cells().iter().zip(&spec.envelope) {
        if !cell.span.is_point() {
            frame.line(&mut out, (cell.span.lo(), c), (cell.span.hi(), c), DASHED);
        }
    }
    let _ = writeln!(out, "</g>");
    if let Some(p) = &spec.prior {
        frame.line(&mut out, (p, &frame.s_min), (p, &frame.s_max), r##"stroke="#888888" stroke-width="1" stroke-dasharray="2 3""##);
    }
    let label = |out: &mut String, x: String, y: String, text: String| {
        let _ = writeln!(out, r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="12">{text}</text>"#);
    };
    let below = format_fixed(&(parse_fixed(&frame.y(&frame.s_min)) + int(16)), 2);
    label(&mut out, frame.x(&zero), below.clone(), "0".into());
    label(&mut out, frame.x(&one), below, "1".into());
    let left = format_fixed(&int(MARGIN / 4), 2);
    label(&mut out, left.clone(), frame.y(&frame.s_min), format_rational(&frame.s_min));
    label(&mut out, left, frame.y(&frame.s_max), format_rational(&frame.s_max));
    out.push_str("</svg>\n");
    out
}

fn parse_fixed(text: &str) -> Rational {
    crate::rational::parse_rational(text).expect("formatted decimal")
}

pub const CSV_HEADER: &str = "cell_lo,cell_hi,v_lo,v_hi,envelope,robust_lo,robust_hi";

/// One row per cell. `robust_lo` and `robust_hi` bound the robust set at a
/// prior in the cell and are empty at the endpoint cells.
pub fn emit_csv(spec: &FigureSpec) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let cells = spec.profile.cells().iter().zip(spec.profile.values());
    for ((cell, v), (c, robust)) in cells.zip(spec.envelope.iter().zip(&spec.robust)) {
        let (r_lo, r_hi) = match robust.as_ref().and_then(bounds) {
            Some((a, b)) => (format_rational(&a), format_rational(&b)),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_rational(cell.span.lo()),
            format_rational(cell.span.hi()),
            format_rational(&v.lo),
            format_rational(&v.hi),
            format_rational(c),
            r_lo,
            r_hi
        );
    }
    out
}

fn bounds(set: &RobustPayoffSet) -> Option<(Rational, Rational)> {
    let ends = set
        .points
        .iter()
        .chain(set.intervals.iter().flat_map(|iv| [&iv.lo, &iv.hi]));
    let (mut lo, mut hi): (Option<&Rational>, Option<&Rational>) = (None, None);
    for e in ends {
        lo = Some(lo.map_or(e, |l| l.min(e)));
        hi = Some(hi.map_or(e, |h| h.max(e)));
    }
    Some((lo?.clone(), hi?.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::best_reply::value_profile;
    use crate::fixtures::{example1, example3};
    use crate::rational::rat;

    #[test]
    fn example1_envelope_steps() {
        let g = example1();
        let spec = FigureSpec::new(value_profile(&g).unwrap(), Some(rat(1, 2))).unwrap();
        let at = |mu: Rational| spec.envelope[spec.profile.cell_index(&mu)].clone();
        assert_eq!(at(rat(1, 8)), int(1));
        assert_eq!(at(rat(1, 2)), int(1));
        assert_eq!(at(rat(7, 8)), int(2));
        let svg = emit_svg(&spec);
        assert!(svg.contains("stroke-dasharray=\"6 4\""));
        assert_eq!(svg, emit_svg(&spec));
    }

    #[test]
    fn robust_region_of_example3() {
        let spec = FigureSpec::new(example3(), Some(rat(5, 12))).unwrap();
        assert!(spec.rectangles().count() >= 2);
        for r in spec.rectangles() {
            assert!(r.mu.0 >= int(0) && r.mu.1 <= int(1));
            assert!(r.s.0 >= int(1) && r.s.1 <= int(6));
        }
    }

    #[test]
    fn no_rectangles_when_only_babbling_is_robust() {
        // A dominant action: the partition is a single region.
        let g = crate::game::Game::transparent(
            rat(1, 2),
            &[int(0), int(5)],
            vec![[int(1), int(1)], [int(0), int(0)]],
        )
        .unwrap();
        let spec = FigureSpec::new(value_profile(&g).unwrap(), None).unwrap();
        assert_eq!(spec.rectangles().count(), 0);
        assert!(!emit_svg(&spec).contains("class=\"robust\""));
    }

    #[test]
    fn csv_has_one_row_per_cell() {
        let g = example1();
        let spec = FigureSpec::new(value_profile(&g).unwrap(), None).unwrap();
        let csv = emit_csv(&spec);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), spec.profile.cells().len() + 1);
        assert!(lines.contains(&"1/4,3/4,0,0,1,0,1"));
    }
}
