//! Translation and dilation congruence with explicit witnesses, and the
//! wavelet-set criterion built on them.
//!
//! A bounded set `E` is a wavelet set for dilation factor `d` exactly when
//! it is 2π-translation congruent to `[0, 2π)` and its `d`-dilates partition
//! ℝ∖{0}. The second condition is certified by exhibiting a dilation
//! congruence onto a two-sided annulus `[−d·a, −a) ∪ [b, d·b)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::rings::{Annulus, SplitError};
use crate::scalar::{rat, rational_serde, ExactScalar};

/// Largest number of distinct dilation powers a single interval may need.
pub const MAX_RING_POWERS: usize = 64;

/// `[0, 2π)`.
pub fn unit_window() -> IntervalSet {
    IntervalSet::interval(ExactScalar::zero(), ExactScalar::pi_frac(2, 1))
}

/// Why a congruence check failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CongruenceFailure {
    /// Translation shortcut: the measure is not 2π.
    Measure { measure: ExactScalar },
    /// Two translated or dilated fragments overlap on `region`.
    Overlap { region: IntervalSet },
    /// `region` of the target is not covered.
    Gap { region: IntervalSet },
    /// An interval of the set contains 0.
    StraddlesZero { interval: Interval },
    /// Ring splitting did not terminate for `interval`.
    UnboundedSplit { interval: Interval },
    /// The dilation factor is outside the supported range.
    InvalidFactor {
        #[serde(with = "rational_serde")]
        factor: BigRational,
    },
}

impl fmt::Display for CongruenceFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Measure { measure } => write!(f, "measure is {measure}, not 2π"),
            Self::Overlap { region } => write!(f, "overlap on {region}"),
            Self::Gap { region } => write!(f, "gap: {region} is not covered"),
            Self::StraddlesZero { interval } => write!(f, "interval {interval} contains 0"),
            Self::UnboundedSplit { interval } => {
                write!(f, "ring splitting of {interval} does not terminate")
            }
            Self::InvalidFactor { factor } => {
                write!(f, "dilation factor {factor} is not a rational ≥ 2")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationPiece {
    pub piece: IntervalSet,
    /// The piece moves by `2π·shift_multiple`.
    pub shift_multiple: BigInt,
}

/// A partition of a set into pieces whose `2π`-multiple translates tile
/// `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationWitness {
    pub pieces: Vec<TranslationPiece>,
}

impl TranslationWitness {
    pub fn source(&self) -> IntervalSet {
        IntervalSet::union_all(self.pieces.iter().map(|p| &p.piece))
    }

    /// Union of the translated pieces.
    pub fn image(&self) -> IntervalSet {
        IntervalSet::from_parts(
            self.pieces
                .iter()
                .flat_map(|p| {
                    let shift = ExactScalar::two_pi_times(&BigRational::from_integer(p.shift_multiple.clone()));
                    p.piece.translate(&shift).into_parts()
                })
                .collect(),
        )
    }

    /// Shift multiple of the piece containing `x`.
    pub fn shift_at(&self, x: &ExactScalar) -> Option<&BigInt> {
        self.pieces
            .iter()
            .find(|p| p.piece.contains(x))
            .map(|p| &p.shift_multiple)
    }

    /// Re-checks the witness against `source`: the pieces partition it and
    /// their translates partition `[0, 2π)`.
    pub fn verify(&self, source: &IntervalSet) -> bool {
        let piece_measure = self
            .pieces
            .iter()
            .fold(ExactScalar::zero(), |acc, p| acc + p.piece.measure());
        self.source() == *source
            && piece_measure == source.measure()
            && self.image() == unit_window()
            && piece_measure == ExactScalar::pi_frac(2, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DilationPiece {
    pub piece: IntervalSet,
    /// The piece is scaled by `d^power`.
    pub power: i64,
}

/// A partition of a set into pieces whose `d`-power dilates tile the
/// annulus `[−d·a, −a) ∪ [b, d·b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DilationWitness {
    pub pieces: Vec<DilationPiece>,
    #[serde(with = "rational_serde")]
    pub factor: BigRational,
    /// `a`
    pub neg_base: ExactScalar,
    /// `b`
    pub pos_base: ExactScalar,
}

impl DilationWitness {
    pub fn annulus(&self) -> Annulus {
        Annulus::new(self.factor.clone(), self.neg_base.clone(), self.pos_base.clone())
    }

    /// The target `[−d·a, −a) ∪ [b, d·b)`.
    pub fn target(&self) -> IntervalSet {
        self.annulus().set()
    }

    pub fn source(&self) -> IntervalSet {
        IntervalSet::union_all(self.pieces.iter().map(|p| &p.piece))
    }

    /// Union of the dilated pieces.
    pub fn image(&self) -> IntervalSet {
        let ann = self.annulus();
        IntervalSet::from_parts(
            self.pieces
                .iter()
                .flat_map(|p| p.piece.scale_positive(&ann.pow(p.power)).into_parts())
                .collect(),
        )
    }

    /// Re-checks the witness: pieces partition `source` and their dilates
    /// tile the annulus without overlap.
    pub fn verify(&self, source: &IntervalSet) -> bool {
        let ann = self.annulus();
        let scaled_measure = self.pieces.iter().fold(ExactScalar::zero(), |acc, p| {
            acc + p.piece.scale_positive(&ann.pow(p.power)).measure()
        });
        let piece_measure = self
            .pieces
            .iter()
            .fold(ExactScalar::zero(), |acc, p| acc + p.piece.measure());
        self.source() == *source
            && piece_measure == source.measure()
            && self.image() == self.target()
            && scaled_measure == self.target().measure()
    }
}

/// Proof that a set is a wavelet set for a given dilation factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveletSetCertificate {
    pub set: IntervalSet,
    pub translation: TranslationWitness,
    pub dilation: DilationWitness,
    #[serde(with = "rational_serde")]
    pub dilation_factor: BigRational,
}

impl WaveletSetCertificate {
    /// Re-verifies both witnesses from scratch.
    pub fn verify(&self) -> bool {
        self.dilation.factor == self.dilation_factor
            && self.translation.verify(&self.set)
            && self.dilation.verify(&self.set)
    }
}

/// Outcome of a failed wavelet-set check; both sides are always reported.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveletSetFailure {
    pub set: IntervalSet,
    #[serde(with = "rational_serde")]
    pub dilation_factor: BigRational,
    pub translation: Option<CongruenceFailure>,
    pub dilation: Option<CongruenceFailure>,
}

impl fmt::Display for WaveletSetFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if let Some(t) = &self.translation {
            write!(f, "translation congruence failed ({t})")?;
            first = false;
        }
        if let Some(d) = &self.dilation {
            if !first {
                f.write_str("; ")?;
            }
            write!(f, "dilation congruence failed ({d})")?;
        }
        Ok(())
    }
}

/// Overlap region among a list of intervals (union of pairwise
/// intersections), computed by a sweep over the sorted list.
fn overlap_region(mut frags: Vec<Interval>) -> IntervalSet {
    frags.sort_by(|a, b| a.lo().cmp(b.lo()));
    let mut overlaps = Vec::new();
    let mut reach: Option<ExactScalar> = None;
    for f in &frags {
        if let Some(r) = &reach {
            if f.lo() < r {
                let hi = if f.hi() < r { f.hi() } else { r };
                if let Some(iv) = Interval::new(f.lo().clone(), hi.clone()) {
                    overlaps.push(iv);
                }
            }
        }
        match &reach {
            Some(r) if r >= f.hi() => {}
            _ => reach = Some(f.hi().clone()),
        }
    }
    IntervalSet::from_parts(overlaps)
}

/// Decides whether `set` is 2π-translation congruent to `[0, 2π)`.
///
/// Each interval is cut at the grid 2πℤ and every fragment is moved by the
/// unique multiple of 2π that lands it in `[0, 2π)`; the moved fragments
/// must then tile the window exactly.
pub fn translation_congruence(set: &IntervalSet) -> Result<TranslationWitness, CongruenceFailure> {
    let measure = set.measure();
    if measure != ExactScalar::pi_frac(2, 1) {
        return Err(CongruenceFailure::Measure { measure });
    }
    let two_pi = ExactScalar::pi_frac(2, 1);
    let mut by_shift: BTreeMap<BigInt, Vec<Interval>> = BTreeMap::new();
    let mut moved = Vec::new();
    for part in set.parts() {
        let mut k = part.lo().floor_multiple(&two_pi);
        loop {
            let cell_lo = two_pi.scale(&BigRational::from_integer(k.clone()));
            let cell_hi = &cell_lo + &two_pi;
            let cell = Interval::new(cell_lo.clone(), cell_hi.clone()).expect("2π > 0");
            if let Some(frag) = part.intersect(&cell) {
                moved.push(frag.translate(&-&cell_lo));
                by_shift.entry(-k.clone()).or_default().push(frag);
            }
            if cell_hi >= *part.hi() {
                break;
            }
            k += 1;
        }
    }
    let overlap = overlap_region(moved.clone());
    if !overlap.is_empty() {
        return Err(CongruenceFailure::Overlap { region: overlap });
    }
    let gap = unit_window().subtract(&IntervalSet::from_parts(moved));
    if !gap.is_empty() {
        return Err(CongruenceFailure::Gap { region: gap });
    }
    let mut pieces: Vec<TranslationPiece> = by_shift
        .into_iter()
        .map(|(shift_multiple, frags)| TranslationPiece {
            piece: IntervalSet::from_parts(frags),
            shift_multiple,
        })
        .collect();
    pieces.sort_by(|a, b| a.piece.min().cmp(&b.piece.min()));
    Ok(TranslationWitness { pieces })
}

fn check_factor(d: &BigRational) -> Result<(), CongruenceFailure> {
    if *d < rat(2, 1) {
        return Err(CongruenceFailure::InvalidFactor { factor: d.clone() });
    }
    Ok(())
}

/// Decides whether the `d`-dilates of `set` partition ℝ∖{0}.
///
/// The target annulus is anchored at the extremes of the set:
/// `b = max(set)/d` and `a = |min(set)|/d`. Every interval is split along
/// the rings `d^k·K` and each fragment scaled back into `K`; the scaled
/// fragments must tile `K` exactly.
pub fn dilation_congruence(
    set: &IntervalSet,
    d: &BigRational,
) -> Result<DilationWitness, CongruenceFailure> {
    check_factor(d)?;
    for part in set.parts() {
        if part.lo().is_negative() && part.hi().is_positive() || part.lo().is_zero() {
            return Err(CongruenceFailure::StraddlesZero {
                interval: part.clone(),
            });
        }
    }
    let lp = Annulus::littlewood_paley(d.clone());
    let (pos, neg) = set.split_at_zero();
    let (a, b) = match (neg.min(), pos.max()) {
        (Some(lo), Some(hi)) => ((-lo).div_rat(d), hi.div_rat(d)),
        (None, Some(hi)) => {
            let b = hi.div_rat(d);
            let region = IntervalSet::interval(-b.scale(d), -&b);
            return Err(CongruenceFailure::Gap { region });
        }
        (Some(lo), None) => {
            let a = (-lo).div_rat(d);
            let region = IntervalSet::interval(a.clone(), a.scale(d));
            return Err(CongruenceFailure::Gap { region });
        }
        (None, None) => return Err(CongruenceFailure::Gap { region: lp.set() }),
    };
    let ann = Annulus::new(d.clone(), a.clone(), b.clone());
    let mut by_power: BTreeMap<i64, Vec<Interval>> = BTreeMap::new();
    let mut scaled = Vec::new();
    for part in set.parts() {
        let frags = ann.split(part, MAX_RING_POWERS).map_err(|e| match e {
            SplitError::StraddlesZero => CongruenceFailure::StraddlesZero {
                interval: part.clone(),
            },
            SplitError::Unbounded => CongruenceFailure::UnboundedSplit {
                interval: part.clone(),
            },
        })?;
        for (frag, k) in frags {
            scaled.push(frag.scale(&ann.pow(-k)));
            by_power.entry(-k).or_default().push(frag);
        }
    }
    let overlap = overlap_region(scaled.clone());
    if !overlap.is_empty() {
        return Err(CongruenceFailure::Overlap { region: overlap });
    }
    let gap = ann.set().subtract(&IntervalSet::from_parts(scaled));
    if !gap.is_empty() {
        return Err(CongruenceFailure::Gap { region: gap });
    }
    let mut pieces: Vec<DilationPiece> = by_power
        .into_iter()
        .map(|(power, frags)| DilationPiece {
            piece: IntervalSet::from_parts(frags),
            power,
        })
        .collect();
    pieces.sort_by(|x, y| x.piece.min().cmp(&y.piece.min()));
    Ok(DilationWitness {
        pieces,
        factor: d.clone(),
        neg_base: a,
        pos_base: b,
    })
}

/// The wavelet-set criterion: both congruences hold. Both checks always
/// run so a failure carries full diagnostics.
pub fn is_wavelet_set(
    set: &IntervalSet,
    d: &BigRational,
) -> Result<WaveletSetCertificate, WaveletSetFailure> {
    let translation = translation_congruence(set);
    let dilation = dilation_congruence(set, d);
    match (translation, dilation) {
        (Ok(translation), Ok(dilation)) => Ok(WaveletSetCertificate {
            set: set.clone(),
            translation,
            dilation,
            dilation_factor: d.clone(),
        }),
        (t, dl) => Err(WaveletSetFailure {
            set: set.clone(),
            dilation_factor: d.clone(),
            translation: t.err(),
            dilation: dl.err(),
        }),
    }
}

/// [`is_wavelet_set`] with the crate error type.
pub fn certify(set: &IntervalSet, d: &BigRational) -> Result<WaveletSetCertificate> {
    is_wavelet_set(set, d).map_err(|f| Error::NotWaveletSet(Box::new(f)))
}

/// Dyadic convenience wrapper.
pub fn is_dyadic_wavelet_set(set: &IntervalSet) -> Result<WaveletSetCertificate, WaveletSetFailure> {
    is_wavelet_set(set, &rat(2, 1))
}

/// Smallest and largest dilation power recorded in a witness.
pub fn power_span(w: &DilationWitness) -> (i64, i64) {
    let lo = w.pieces.iter().map(|p| p.power).min().unwrap_or(0);
    let hi = w.pieces.iter().map(|p| p.power).max().unwrap_or(0);
    (lo, hi)
}

/// Largest |shift| recorded in a witness, as a machine integer.
pub fn shift_span(w: &TranslationWitness) -> i64 {
    w.pieces
        .iter()
        .filter_map(|p| p.shift_multiple.to_i64())
        .map(i64::abs)
        .max()
        .unwrap_or(0)
}
