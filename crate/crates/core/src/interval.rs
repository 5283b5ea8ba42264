//! Finite unions of half-open intervals `[lo, hi)` with exact endpoints.
//!
//! Sets are kept in a canonical normal form (sorted, pairwise disjoint, with
//! touching neighbours merged), so equality of sets "modulo null sets" is
//! plain structural equality.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Signed;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::scalar::ExactScalar;

/// A nonempty half-open interval `[lo, hi)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    lo: ExactScalar,
    hi: ExactScalar,
}

impl Interval {
    /// `None` when `lo >= hi`.
    pub fn new(lo: ExactScalar, hi: ExactScalar) -> Option<Self> {
        (lo < hi).then_some(Self { lo, hi })
    }

    pub fn lo(&self) -> &ExactScalar {
        &self.lo
    }

    pub fn hi(&self) -> &ExactScalar {
        &self.hi
    }

    pub fn length(&self) -> ExactScalar {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &ExactScalar) -> bool {
        self.lo <= *x && *x < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo >= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi <= other.hi { &self.hi } else { &other.hi };
        Interval::new(lo.clone(), hi.clone())
    }

    pub fn translate(&self, shift: &ExactScalar) -> Interval {
        Interval {
            lo: &self.lo + shift,
            hi: &self.hi + shift,
        }
    }

    /// Image under `x ↦ q·x` for `q > 0`.
    pub fn scale(&self, q: &BigRational) -> Interval {
        debug_assert!(q.is_positive());
        Interval {
            lo: self.lo.scale(q),
            hi: self.hi.scale(q),
        }
    }

    /// Whether 0 lies in the closure of the interval.
    pub fn touches_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn to_ascii(&self) -> String {
        format!("[{},{})", self.lo.to_ascii(), self.hi.to_ascii())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_ascii())
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lo: ExactScalar,
            hi: ExactScalar,
        }
        let raw = Raw::deserialize(d)?;
        let text = format!("[{},{})", raw.lo.to_ascii(), raw.hi.to_ascii());
        Interval::new(raw.lo, raw.hi)
            .ok_or_else(|| D::Error::custom(format!("empty interval {text}")))
    }
}

/// A normalized finite union of half-open intervals.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `[lo, hi)`, or the empty set when `lo >= hi`.
    pub fn interval(lo: ExactScalar, hi: ExactScalar) -> Self {
        Interval::new(lo, hi).map(Self::from).unwrap_or_default()
    }

    /// Normalizes an arbitrary list of intervals.
    pub fn from_parts(mut parts: Vec<Interval>) -> Self {
        parts.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for part in parts {
            match merged.last_mut() {
                Some(last) if part.lo <= last.hi => {
                    if part.hi > last.hi {
                        last.hi = part.hi;
                    }
                }
                _ => merged.push(part),
            }
        }
        Self { parts: merged }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Interval> {
        self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn measure(&self) -> ExactScalar {
        self.parts
            .iter()
            .fold(ExactScalar::zero(), |acc, p| acc + p.length())
    }

    pub fn contains(&self, x: &ExactScalar) -> bool {
        let idx = self.parts.partition_point(|p| p.lo <= *x);
        idx > 0 && self.parts[idx - 1].contains(x)
    }

    /// Infimum of the set.
    pub fn min(&self) -> Option<&ExactScalar> {
        self.parts.first().map(|p| &p.lo)
    }

    /// Supremum of the set.
    pub fn max(&self) -> Option<&ExactScalar> {
        self.parts.last().map(|p| &p.hi)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        Self::from_parts(parts)
    }

    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a IntervalSet>) -> IntervalSet {
        Self::from_parts(
            sets.into_iter()
                .flat_map(|s| s.parts.iter().cloned())
                .collect(),
        )
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.parts.len() && j < other.parts.len() {
            let (a, b) = (&self.parts[i], &other.parts[j]);
            if let Some(x) = a.intersect(b) {
                out.push(x);
            }
            if a.hi <= b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // disjoint, sorted and gap-separated already
        Self { parts: out }
    }

    pub fn intersect_interval(&self, iv: &Interval) -> IntervalSet {
        self.intersect(&IntervalSet::from(iv.clone()))
    }

    /// Relative complement `self \ other`.
    pub fn subtract(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let mut j = 0;
        for part in &self.parts {
            let mut lo = part.lo.clone();
            while j < other.parts.len() && other.parts[j].hi <= lo {
                j += 1;
            }
            let mut k = j;
            while k < other.parts.len() && other.parts[k].lo < part.hi {
                let cut = &other.parts[k];
                if cut.lo > lo {
                    out.push(Interval {
                        lo: lo.clone(),
                        hi: cut.lo.clone(),
                    });
                }
                if cut.hi > lo {
                    lo = cut.hi.clone();
                }
                if lo >= part.hi {
                    break;
                }
                k += 1;
            }
            if lo < part.hi {
                out.push(Interval {
                    lo,
                    hi: part.hi.clone(),
                });
            }
        }
        Self { parts: out }
    }

    pub fn symmetric_difference(&self, other: &IntervalSet) -> IntervalSet {
        self.subtract(other).union(&other.subtract(self))
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.subtract(other).is_empty()
    }

    pub fn is_disjoint_from(&self, other: &IntervalSet) -> bool {
        self.intersect(other).is_empty()
    }

    /// Image under `x ↦ factor·x`; the factor must be positive.
    pub fn dilate(&self, factor: &BigRational) -> Result<IntervalSet> {
        if !factor.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "dilation factor must be positive, got {factor}"
            )));
        }
        Ok(self.scale_positive(factor))
    }

    /// Image under `x ↦ q·x` for a known-positive `q`.
    pub(crate) fn scale_positive(&self, q: &BigRational) -> IntervalSet {
        Self {
            parts: self.parts.iter().map(|p| p.scale(q)).collect(),
        }
    }

    /// Image under `x ↦ x + shift`.
    pub fn translate(&self, shift: &ExactScalar) -> IntervalSet {
        Self {
            parts: self.parts.iter().map(|p| p.translate(shift)).collect(),
        }
    }

    /// Part lying in `(0, ∞)` and part lying in `(−∞, 0)`. Intervals that
    /// contain 0 are split there.
    pub fn split_at_zero(&self) -> (IntervalSet, IntervalSet) {
        let zero = ExactScalar::zero();
        let mut neg = Vec::new();
        let mut pos = Vec::new();
        for p in &self.parts {
            if p.hi <= zero {
                neg.push(p.clone());
            } else if p.lo >= zero {
                pos.push(p.clone());
            } else {
                neg.push(Interval {
                    lo: p.lo.clone(),
                    hi: zero.clone(),
                });
                pos.push(Interval {
                    lo: zero.clone(),
                    hi: p.hi.clone(),
                });
            }
        }
        (Self { parts: pos }, Self { parts: neg })
    }

    /// Reparsable ASCII rendering, e.g. `[-2pi,-pi)u[pi,2pi)`.
    pub fn to_ascii(&self) -> String {
        if self.is_empty() {
            return "empty".to_string();
        }
        self.parts
            .iter()
            .map(Interval::to_ascii)
            .collect::<Vec<_>>()
            .join("u")
    }

    /// Checks the normal-form invariant. Always true for values built through
    /// this module's API.
    pub fn is_normalized(&self) -> bool {
        self.parts.iter().all(|p| p.lo < p.hi)
            && self.parts.windows(2).all(|w| w[0].hi < w[1].lo)
    }
}

impl From<Interval> for IntervalSet {
    fn from(iv: Interval) -> Self {
        Self { parts: vec![iv] }
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_ascii())
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            parts: Vec<Interval>,
        }
        Ok(IntervalSet::from_parts(Raw::deserialize(d)?.parts))
    }
}

impl FromStr for IntervalSet {
    type Err = ParseError;

    /// Grammar: `[a,b)` pieces joined by `u`, `U` or `∪`; `empty` or `∅` for
    /// the empty set. Whitespace is ignored. Closed or open brackets are
    /// accepted and read as half-open, since endpoints are null sets.
    fn from_str(src: &str) -> std::result::Result<Self, Self::Err> {
        let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |msg: &str| ParseError::Set(src.to_string(), msg.to_string());
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        if matches!(compact.as_str(), "empty" | "∅" | "{}") {
            return Ok(IntervalSet::empty());
        }
        let mut parts = Vec::new();
        let mut rest = compact.as_str();
        loop {
            rest = rest
                .strip_prefix('[')
                .or_else(|| rest.strip_prefix('('))
                .ok_or_else(|| err("expected '['"))?;
            let close = rest
                .find([')', ']'])
                .ok_or_else(|| err("missing ')'"))?;
            let body = &rest[..close];
            let (lo, hi) = body
                .split_once(',')
                .ok_or_else(|| err("expected 'lo,hi'"))?;
            let lo: ExactScalar = lo.parse()?;
            let hi: ExactScalar = hi.parse()?;
            let iv = Interval::new(lo, hi).ok_or_else(|| err("interval with lo >= hi"))?;
            parts.push(iv);
            rest = &rest[close + 1..];
            if rest.is_empty() {
                break;
            }
            rest = rest
                .strip_prefix('u')
                .or_else(|| rest.strip_prefix('U'))
                .or_else(|| rest.strip_prefix('∪'))
                .ok_or_else(|| err("expected 'u' between intervals"))?;
        }
        Ok(IntervalSet::from_parts(parts))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    pub(crate) fn set(src: &str) -> IntervalSet {
        src.parse().unwrap()
    }

    fn x(src: &str) -> ExactScalar {
        src.parse().unwrap()
    }

    #[test]
    fn union_examples() {
        assert_eq!(
            set("[pi,2pi)").union(&set("[-2pi,-pi)")),
            set("[-2pi,-pi)u[pi,2pi)")
        );
        let a = set("[0,1)u[pi,2pi)");
        assert_eq!(a.union(&IntervalSet::empty()), a);
        assert_eq!(set("[0,pi)").union(&set("[pi/2,2pi)")), set("[0,2pi)"));
        // touching intervals merge
        assert_eq!(set("[0,pi)u[pi,2pi)").parts().len(), 1);
    }

    #[test]
    fn intersect_examples() {
        let journe = set("[-32pi/7,-4pi)u[-pi,-4pi/7)u[4pi/7,pi)u[4pi,32pi/7)");
        assert!(journe.intersect(&set("[pi,3pi/2)")).is_empty());
        assert_eq!(journe.intersect(&journe), journe);
        assert_eq!(
            set("[-2pi,-pi)").intersect(&set("[-3pi/2,0)")),
            set("[-3pi/2,-pi)")
        );
    }

    #[test]
    fn subtract_examples() {
        assert_eq!(set("[2pi,3pi)").subtract(&IntervalSet::empty()), set("[2pi,3pi)"));
        assert_eq!(
            set("[2pi,3pi)").subtract(&set("[2pi,5pi/2)")),
            set("[5pi/2,3pi)")
        );
        let a = set("[-1,2)u[3,pi+1)");
        assert!(a.subtract(&a).is_empty());
        assert_eq!(set("[0,10)").subtract(&set("[1,2)u[3,4)")), set("[0,1)u[2,3)u[4,10)"));
    }

    #[test]
    fn dilate_examples() {
        assert_eq!(set("[pi,2pi)").dilate(&rat(2, 1)).unwrap(), set("[2pi,4pi)"));
        assert_eq!(
            set("[-pi,-4pi/7)").dilate(&rat(4, 1)).unwrap(),
            set("[-4pi,-16pi/7)")
        );
        let a = set("[-3,-1)u[pi,2pi)");
        assert_eq!(a.dilate(&rat(1, 1)).unwrap(), a);
        assert!(a.dilate(&rat(0, 1)).is_err());
        assert!(a.dilate(&rat(-2, 1)).is_err());
    }

    #[test]
    fn translate_examples() {
        assert_eq!(set("[-32pi/7,-4pi)").translate(&x("6pi")), set("[10pi/7,2pi)"));
        let a = set("[1,2)");
        assert_eq!(a.translate(&ExactScalar::zero()), a);
        // α = −π/4
        assert_eq!(
            set("[pi-pi/4,2pi-pi/2)").translate(&x("-2pi")),
            set("[-5pi/4,-pi/2)")
        );
    }

    #[test]
    fn parse_and_render() {
        let s = set("[-2pi, -pi) u [pi, 2pi)");
        assert_eq!(s.to_ascii(), "[-2pi,-pi)u[pi,2pi)");
        assert_eq!(s.to_string(), "[-2π, -π) ∪ [π, 2π)");
        assert_eq!(set(&s.to_string()), s);
        assert!(set("empty").is_empty());
        for bad in ["", "[1,0)", "[0,1", "[0;1)", "[0,1)v[2,3)", "[0,e)"] {
            assert!(bad.parse::<IntervalSet>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn json_round_trip() {
        let s = set("[-2pi,-pi)u[pi,2pi)");
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["parts"][0]["lo"], serde_json::json!({"pi": [-2, 1]}));
        let back: IntervalSet = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
        let bad = serde_json::json!({"parts": [{"lo": {"pi": [1, 1]}, "hi": {"pi": [0, 1]}}]});
        assert!(serde_json::from_value::<IntervalSet>(bad).is_err());
    }

    // Random sets with endpoints k·π/4 + j/2 on a small grid.
    pub(crate) fn endpoint() -> impl Strategy<Value = ExactScalar> {
        (-24i64..24, -2i64..3).prop_map(|(k, j)| ExactScalar::new(rat(k, 4), rat(j, 2)))
    }

    pub(crate) fn random_set() -> impl Strategy<Value = IntervalSet> {
        prop::collection::vec((endpoint(), endpoint()), 0..5).prop_map(|pairs| {
            IntervalSet::from_parts(
                pairs
                    .into_iter()
                    .filter_map(|(a, b)| {
                        if a < b {
                            Interval::new(a, b)
                        } else {
                            Interval::new(b, a)
                        }
                    })
                    .collect(),
            )
        })
    }

    fn sample_points() -> Vec<ExactScalar> {
        // grid that hits endpoints, midpoints and a few off-grid rationals
        let offsets = [(0, 1), (1, 2), (-1, 3), (1, 5), (-7, 11), (3, 4), (2, 7), (-1, 9), (5, 13)];
        let mut pts = Vec::new();
        for k in -56..=56 {
            for &(n, d) in &offsets {
                pts.push(ExactScalar::new(rat(k, 8), rat(n, d)));
            }
        }
        pts
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn inclusion_exclusion(a in random_set(), b in random_set()) {
            let lhs = a.union(&b).measure() + a.intersect(&b).measure();
            prop_assert_eq!(lhs, a.measure() + b.measure());
        }

        #[test]
        fn affine_images_scale_measure(a in random_set(), k in 1i64..9, shift in endpoint()) {
            let q = rat(k, 3);
            prop_assert_eq!(a.dilate(&q).unwrap().measure(), a.measure().scale(&q));
            prop_assert_eq!(a.translate(&shift).measure(), a.measure());
        }

        #[test]
        fn normal_form_is_canonical(a in random_set(), b in random_set()) {
            for s in [a.union(&b), a.intersect(&b), a.subtract(&b), b.subtract(&a)] {
                prop_assert!(s.is_normalized());
                prop_assert_eq!(IntervalSet::from_parts(s.parts().to_vec()), s.clone());
            }
        }

        #[test]
        fn membership_agrees_with_naive_definition(a in random_set(), b in random_set()) {
            let u = a.union(&b);
            let i = a.intersect(&b);
            let d = a.subtract(&b);
            let naive = |s: &IntervalSet, p: &ExactScalar| s.parts().iter().any(|iv| iv.lo() <= p && p < iv.hi());
            for p in sample_points() {
                let (ina, inb) = (naive(&a, &p), naive(&b, &p));
                prop_assert_eq!(u.contains(&p), ina || inb);
                prop_assert_eq!(i.contains(&p), ina && inb);
                prop_assert_eq!(d.contains(&p), ina && !inb);
            }
        }
    }
}
