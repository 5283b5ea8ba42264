//! Dilation rings: the partition of ℝ∖{0} into the dilates of a two-sided
//! annulus `K = [−d·a, −a) ∪ [b, d·b)`.
//!
//! Ring `k` is `d^k·K`. Every nonzero real lies in exactly one ring, which
//! is how dilation-periodic and dilation-homogeneous objects are reduced to
//! their finite description on `K`.

use num_rational::BigRational;
use num_traits::One;

use crate::interval::{Interval, IntervalSet};
use crate::scalar::{rational_pow, ExactScalar};

/// Powers beyond this magnitude are treated as non-terminating splits.
const MAX_RING_INDEX: i64 = 4096;

/// Why an interval could not be split into finitely many rings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitError {
    /// The interval contains 0.
    StraddlesZero,
    /// The interval accumulates at 0 (an endpoint is 0), reaches
    /// astronomically far rings, or needs more rings than allowed.
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annulus {
    factor: BigRational,
    neg_base: ExactScalar,
    pos_base: ExactScalar,
}

impl Annulus {
    /// `factor > 1`, bases positive.
    pub fn new(factor: BigRational, neg_base: ExactScalar, pos_base: ExactScalar) -> Self {
        debug_assert!(factor > BigRational::one());
        debug_assert!(neg_base.is_positive() && pos_base.is_positive());
        Self {
            factor,
            neg_base,
            pos_base,
        }
    }

    /// `[−d·π, −π) ∪ [π, d·π)`; for `d = 2` the Littlewood–Paley set.
    pub fn littlewood_paley(factor: BigRational) -> Self {
        Self::new(factor, ExactScalar::pi(), ExactScalar::pi())
    }

    pub fn factor(&self) -> &BigRational {
        &self.factor
    }

    /// `a` in `[−d·a, −a)`.
    pub fn neg_base(&self) -> &ExactScalar {
        &self.neg_base
    }

    /// `b` in `[b, d·b)`.
    pub fn pos_base(&self) -> &ExactScalar {
        &self.pos_base
    }

    pub fn pow(&self, k: i64) -> BigRational {
        rational_pow(&self.factor, k)
    }

    pub fn positive_part(&self) -> Interval {
        Interval::new(self.pos_base.clone(), self.pos_base.scale(&self.factor)).expect("b < d·b")
    }

    pub fn negative_part(&self) -> Interval {
        Interval::new(-self.neg_base.scale(&self.factor), -&self.neg_base).expect("−d·a < −a")
    }

    pub fn set(&self) -> IntervalSet {
        IntervalSet::from_parts(vec![self.negative_part(), self.positive_part()])
    }

    /// Ring `k`, i.e. `d^k·K`.
    pub fn ring(&self, k: i64) -> IntervalSet {
        self.set().scale_positive(&self.pow(k))
    }

    /// Largest `k` with `base·d^k ≤ x`, for positive `x`.
    fn floor_log(&self, x: &ExactScalar, base: &ExactScalar) -> Option<i64> {
        let est = (x.to_f64() / base.to_f64()).ln() / self.factor_f64().ln();
        let mut k = if est.is_finite() { est.floor() as i64 } else { 0 };
        if k.abs() > MAX_RING_INDEX {
            return None;
        }
        let at = |k: i64| base.scale(&self.pow(k));
        while at(k) > *x {
            k -= 1;
            if k < -MAX_RING_INDEX {
                return None;
            }
        }
        while at(k + 1) <= *x {
            k += 1;
            if k > MAX_RING_INDEX {
                return None;
            }
        }
        Some(k)
    }

    fn factor_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.factor).unwrap_or(2.0)
    }

    /// The unique `k` with `x ∈ d^k·K`; `None` for 0 or out-of-range values.
    pub fn ring_index(&self, x: &ExactScalar) -> Option<i64> {
        match x.signum() {
            1 => self.floor_log(x, &self.pos_base),
            -1 => {
                // −a·d^(k+1) ≤ x < −a·d^k  ⟺  a·d^k < |x| ≤ a·d^(k+1)
                let y = -x;
                let k = self.floor_log(&y, &self.neg_base)?;
                if self.neg_base.scale(&self.pow(k)) == y {
                    Some(k - 1)
                } else {
                    Some(k)
                }
            }
            _ => None,
        }
    }

    /// Reduces `x ≠ 0` into `K`: returns `(k, d^(−k)·x)`.
    pub fn reduce(&self, x: &ExactScalar) -> Option<(i64, ExactScalar)> {
        let k = self.ring_index(x)?;
        Some((k, x.scale(&self.pow(-k))))
    }

    /// Splits an interval into its intersections with the rings, in
    /// increasing order of position. At most `max_rings` rings are allowed.
    pub fn split(&self, iv: &Interval, max_rings: usize) -> Result<Vec<(Interval, i64)>, SplitError> {
        if iv.lo().is_negative() && iv.hi().is_positive() || iv.lo().is_zero() {
            return Err(SplitError::StraddlesZero);
        }
        if iv.hi().is_zero() {
            return Err(SplitError::Unbounded);
        }
        let mut out = Vec::new();
        let mut k = self.ring_index(iv.lo()).ok_or(SplitError::Unbounded)?;
        let positive = iv.lo().is_positive();
        loop {
            if out.len() >= max_rings {
                return Err(SplitError::Unbounded);
            }
            let ring = if positive {
                self.positive_part().scale(&self.pow(k))
            } else {
                self.negative_part().scale(&self.pow(k))
            };
            if let Some(frag) = iv.intersect(&ring) {
                out.push((frag, k));
            }
            if ring.hi() >= iv.hi() {
                break;
            }
            // moving right: outward on the positive side, inward on the negative
            k += if positive { 1 } else { -1 };
            if k.abs() > MAX_RING_INDEX {
                return Err(SplitError::Unbounded);
            }
        }
        Ok(out)
    }

    /// Splits every part of a set; fragments carry their ring index.
    pub fn split_set(&self, set: &IntervalSet, max_rings: usize) -> Result<Vec<(Interval, i64)>, (Interval, SplitError)> {
        let mut out = Vec::new();
        for part in set.parts() {
            out.extend(self.split(part, max_rings).map_err(|e| (part.clone(), e))?);
        }
        Ok(out)
    }
}
