//! Closed intervals and finite unions of closed intervals on the real line.
//!
//! Endpoints are plain `f64` values; operations that involve inexact
//! arithmetic (preimages, enclosures) state their tolerance at the call
//! site. Unions are kept sorted and disjoint, merging parts that overlap
//! or touch.

use serde::{Deserialize, Serialize};

/// A nonempty closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// Builds `[lo, hi]`. Returns `None` when the endpoints are not finite
    /// or are out of order.
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Some(Self { lo, hi })
        } else {
            None
        }
    }

    /// Degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        Interval::new(lo, hi)
    }

    /// Smallest interval containing both operands.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Gap between two intervals; 0 when they overlap or touch.
    pub fn distance(&self, other: &Interval) -> f64 {
        (other.lo - self.hi).max(self.lo - other.hi).max(0.0)
    }
}

/// A finite union of closed intervals, sorted and pairwise disjoint.
///
/// Parts that overlap or touch are merged on construction, so `[0,1] ∪ [1,2]`
/// is stored as the single part `[0,2]`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn from_parts(mut parts: Vec<Interval>) -> Self {
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(last) if p.lo <= last.hi => {
                    if p.hi > last.hi {
                        *last = Interval::new(last.lo, p.hi).expect("ordered endpoints");
                    }
                }
                _ => merged.push(p),
            }
        }
        Self { parts: merged }
    }

    pub fn single(iv: Interval) -> Self {
        Self { parts: vec![iv] }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Diameter `sup{|x - y|}`: overall span of the union. 0 for the empty set.
    pub fn diameter(&self) -> f64 {
        match (self.parts.first(), self.parts.last()) {
            (Some(a), Some(b)) => b.hi - a.lo,
            _ => 0.0,
        }
    }

    pub fn hull(&self) -> Option<Interval> {
        match (self.parts.first(), self.parts.last()) {
            (Some(a), Some(b)) => Interval::new(a.lo, b.hi),
            _ => None,
        }
    }

    /// Largest part, ties broken toward the leftmost.
    pub fn largest_part(&self) -> Option<Interval> {
        self.parts
            .iter()
            .copied()
            .max_by(|a, b| a.width().total_cmp(&b.width()).then(b.lo.total_cmp(&a.lo)))
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    /// Set distance `inf{|a - b|}`; 0 when the unions overlap or touch,
    /// infinity when either is empty.
    pub fn distance(&self, other: &IntervalUnion) -> f64 {
        if self.is_empty() || other.is_empty() {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        for a in &self.parts {
            for b in &other.parts {
                best = best.min(a.distance(b));
            }
        }
        best
    }

    /// True when some pair of parts overlaps on a set of positive length.
    pub fn interiors_overlap(&self, other: &IntervalUnion) -> bool {
        self.parts.iter().any(|a| {
            other
                .parts
                .iter()
                .any(|b| a.hi.min(b.hi) - a.lo.max(b.lo) > 0.0)
        })
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                if let Some(iv) = a.intersect(b) {
                    out.push(iv);
                }
            }
        }
        IntervalUnion::from_parts(out)
    }

    /// Intersection that keeps parts missing the other union by at most
    /// `slack` as degenerate points clamped into it. Used by the cylinder
    /// backward induction, where bisection noise on near-point intervals
    /// would otherwise produce spurious empty sets.
    pub fn intersect_with_slack(&self, other: &IntervalUnion, slack: f64) -> IntervalUnion {
        let exact = self.intersect(other);
        if !exact.is_empty() {
            return exact;
        }
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                if a.distance(b) <= slack {
                    let x = if a.hi < b.lo { b.lo } else { b.hi };
                    out.push(Interval::point(x));
                }
            }
        }
        IntervalUnion::from_parts(out)
    }

    /// Inclusion slack of `self` inside `cover`: the minimum over parts of
    /// how deeply each part sits inside a single covering part. Positive
    /// means strictly covered, negative measures the worst protrusion.
    /// Returns +inf when `self` is empty.
    pub fn inclusion_slack(&self, cover: &IntervalUnion) -> f64 {
        let mut worst = f64::INFINITY;
        for p in &self.parts {
            let mut best = f64::NEG_INFINITY;
            for c in &cover.parts {
                let m = (p.lo - c.lo).min(c.hi - p.hi);
                best = best.max(m);
            }
            worst = worst.min(best);
        }
        worst
    }
}
