//! Interpolation maps between wavelet sets.
//!
//! For wavelet sets `E`, `F` the interpolation map `σ` sends each point of
//! `E` to the unique point of `F` that differs from it by a multiple of 2π,
//! and is extended to ℝ by homogeneity, `σ(d·s) = d·σ(s)`, with `σ(0) = 0`.
//! On `dⁿ·P` for a base piece `P` moving by `2πk`, the extension is the pure
//! translation `s ↦ s + 2πk·dⁿ`, so the countably many pieces of `σ` are
//! described by the finite base table. Composition, inversion, evaluation and
//! classification all operate on that table.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::congruence::{certify, dilation_congruence, DilationWitness, MAX_RING_POWERS};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::rings::{Annulus, SplitError};
use crate::scalar::{rational_serde, ExactScalar};

/// Cap on the number of base pieces a composed map may carry.
pub const MAX_PIECES: usize = 10_000;

/// Default bound for the torsion search.
pub const DEFAULT_TORSION_BOUND: u32 = 12;

/// One row of the base table: on `piece`, `σ(s) = s + 2π·shift`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePiece {
    pub piece: IntervalSet,
    /// Translation in units of 2π. Integral for maps built from a pair of
    /// wavelet sets; compositions may produce fractional values.
    #[serde(with = "rational_serde")]
    pub shift: BigRational,
}

impl BasePiece {
    /// The shift as an integer multiple of 2π, if it is one.
    pub fn shift_multiple(&self) -> Option<BigInt> {
        self.shift.is_integer().then(|| self.shift.to_integer())
    }
}

/// A cell of the annulus on which the map is a single translation.
#[derive(Debug, Clone)]
struct Cell {
    region: Interval,
    /// `region = d^power · (subset of the source)`
    power: i64,
    shift: BigRational,
}

/// A dilation-homogeneous piecewise translation of ℝ, stored through its
/// restriction to a dilation generator (the source).
#[derive(Clone)]
pub struct InterpolationMap {
    base_pieces: Vec<BasePiece>,
    source: IntervalSet,
    target: IntervalSet,
    witness: DilationWitness,
    cells: Vec<Cell>,
}

/// Serializable base-piece table of a map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapTable {
    pub source: IntervalSet,
    pub target: IntervalSet,
    #[serde(with = "rational_serde")]
    pub dilation_factor: BigRational,
    pub base_pieces: Vec<BasePiece>,
}

fn split_error(iv: &Interval, e: SplitError) -> Error {
    match e {
        SplitError::StraddlesZero => Error::InvalidArgument(format!("{iv} contains 0")),
        SplitError::Unbounded => Error::UnboundedSplit(iv.to_string()),
    }
}

/// Groups `(fragment, shift)` pairs into base pieces, one per distinct shift.
fn group_by_shift(frags: Vec<(Interval, BigRational)>) -> Vec<BasePiece> {
    let mut by_shift: BTreeMap<BigRational, Vec<Interval>> = BTreeMap::new();
    for (iv, shift) in frags {
        by_shift.entry(shift).or_default().push(iv);
    }
    let mut pieces: Vec<BasePiece> = by_shift
        .into_iter()
        .map(|(shift, ivs)| BasePiece {
            piece: IntervalSet::from_parts(ivs),
            shift,
        })
        .collect();
    pieces.sort_by(|a, b| a.piece.min().cmp(&b.piece.min()));
    pieces
}

impl InterpolationMap {
    fn from_parts(
        mut base_pieces: Vec<BasePiece>,
        source: IntervalSet,
        target: IntervalSet,
        witness: DilationWitness,
    ) -> Result<Self> {
        base_pieces.sort_by(|a, b| a.piece.min().cmp(&b.piece.min()));
        let piece_count: usize = base_pieces.iter().map(|p| p.piece.parts().len()).sum();
        if piece_count > MAX_PIECES {
            return Err(Error::PieceLimit {
                what: "interpolation map",
                cap: MAX_PIECES,
            });
        }
        let ann = witness.annulus();
        let mut cells = Vec::new();
        for wp in &witness.pieces {
            let scale = ann.pow(wp.power);
            for bp in &base_pieces {
                for part in wp.piece.intersect(&bp.piece).parts() {
                    cells.push(Cell {
                        region: part.scale(&scale),
                        power: wp.power,
                        shift: bp.shift.clone(),
                    });
                }
            }
        }
        cells.sort_by(|a, b| a.region.lo().cmp(b.region.lo()));
        Ok(Self {
            base_pieces,
            source,
            target,
            witness,
            cells,
        })
    }

    /// The identity map, stored over the wavelet set `set`.
    pub fn identity(set: &IntervalSet, d: &BigRational) -> Result<Self> {
        let cert = certify(set, d)?;
        Self::from_parts(
            vec![BasePiece {
                piece: set.clone(),
                shift: BigRational::zero(),
            }],
            set.clone(),
            set.clone(),
            cert.dilation,
        )
    }

    /// Rebuilds a map from its table, re-deriving the dilation structure of
    /// the source and checking that the pieces partition it.
    pub fn from_table(table: MapTable) -> Result<Self> {
        let witness = dilation_congruence(&table.source, &table.dilation_factor)
            .map_err(|f| Error::InvalidArgument(format!("source is not a dilation generator: {f}")))?;
        let union = IntervalSet::union_all(table.base_pieces.iter().map(|p| &p.piece));
        let total = table
            .base_pieces
            .iter()
            .fold(ExactScalar::zero(), |acc, p| acc + p.piece.measure());
        if union != table.source || total != table.source.measure() {
            return Err(Error::InvalidArgument("base pieces do not partition the source".into()));
        }
        let map = Self::from_parts(table.base_pieces, table.source, table.target, witness)?;
        if map.image_of_source() != map.target {
            return Err(Error::InvalidArgument("target does not match the base pieces".into()));
        }
        Ok(map)
    }

    pub fn table(&self) -> MapTable {
        MapTable {
            source: self.source.clone(),
            target: self.target.clone(),
            dilation_factor: self.dilation_factor().clone(),
            base_pieces: self.base_pieces.clone(),
        }
    }

    pub fn base_pieces(&self) -> &[BasePiece] {
        &self.base_pieces
    }

    pub fn source(&self) -> &IntervalSet {
        &self.source
    }

    pub fn target(&self) -> &IntervalSet {
        &self.target
    }

    pub fn dilation_factor(&self) -> &BigRational {
        &self.witness.factor
    }

    fn annulus(&self) -> Annulus {
        self.witness.annulus()
    }

    fn image_of_source(&self) -> IntervalSet {
        IntervalSet::from_parts(
            self.base_pieces
                .iter()
                .flat_map(|bp| bp.piece.translate(&ExactScalar::two_pi_times(&bp.shift)).into_parts())
                .collect(),
        )
    }

    /// True when every base shift is zero.
    pub fn is_identity(&self) -> bool {
        self.base_pieces.iter().all(|p| p.shift.is_zero())
    }

    /// True when every base shift is an integer multiple of 2π.
    pub fn is_two_pi_congruence(&self) -> bool {
        self.base_pieces.iter().all(|p| p.shift.is_integer())
    }

    /// Shift (in units of 2π) on the base piece containing `x ∈ source`.
    pub fn base_shift_at(&self, x: &ExactScalar) -> Option<&BigRational> {
        self.base_pieces
            .iter()
            .find(|p| p.piece.contains(x))
            .map(|p| &p.shift)
    }

    fn cell_at(&self, y: &ExactScalar) -> Option<&Cell> {
        let idx = self.cells.partition_point(|c| c.region.lo() <= y);
        (idx > 0)
            .then(|| &self.cells[idx - 1])
            .filter(|c| c.region.contains(y))
    }

    /// Translation (in units of 2π) applied at `s ≠ 0`.
    pub fn translation_at(&self, s: &ExactScalar) -> Result<BigRational> {
        let ann = self.annulus();
        let (m, y) = ann
            .reduce(s)
            .ok_or_else(|| Error::Internal(format!("no dilation ring contains {s}")))?;
        let cell = self
            .cell_at(&y)
            .ok_or_else(|| Error::Internal(format!("annulus point {y} is in no cell")))?;
        Ok(&cell.shift * ann.pow(m + cell.power))
    }

    /// Exact value `σ(s)`.
    pub fn evaluate(&self, s: &ExactScalar) -> Result<ExactScalar> {
        if s.is_zero() {
            return Ok(ExactScalar::zero());
        }
        let t = self.translation_at(s)?;
        Ok(s + &ExactScalar::two_pi_times(&t))
    }

    /// Splits `omega` into fragments on which the map is a single
    /// translation; each fragment carries its translation in units of 2π.
    pub fn decompose(&self, omega: &IntervalSet) -> Result<Vec<(Interval, BigRational)>> {
        let ann = self.annulus();
        let mut out = Vec::new();
        for part in omega.parts() {
            let rings = ann
                .split(part, MAX_RING_POWERS)
                .map_err(|e| split_error(part, e))?;
            for (frag, m) in rings {
                let down = ann.pow(-m);
                let up = ann.pow(m);
                let y = frag.scale(&down);
                let start = self.cells.partition_point(|c| c.region.hi() <= y.lo());
                for cell in &self.cells[start..] {
                    if cell.region.lo() >= y.hi() {
                        break;
                    }
                    if let Some(piece) = y.intersect(&cell.region) {
                        out.push((piece.scale(&up), &cell.shift * ann.pow(m + cell.power)));
                    }
                }
                if out.len() > MAX_PIECES {
                    return Err(Error::PieceLimit {
                        what: "map decomposition",
                        cap: MAX_PIECES,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Exact image `σ(Ω)`.
    pub fn apply_to_set(&self, omega: &IntervalSet) -> Result<IntervalSet> {
        Ok(IntervalSet::from_parts(
            self.decompose(omega)?
                .into_iter()
                .map(|(iv, t)| iv.translate(&ExactScalar::two_pi_times(&t)))
                .collect(),
        ))
    }

    /// The inverse map, stored over the target.
    pub fn inverse(&self) -> Result<Self> {
        let witness = dilation_congruence(&self.target, self.dilation_factor())
            .map_err(|f| Error::Internal(format!("image of a dilation generator failed to generate: {f}")))?;
        let base = self
            .base_pieces
            .iter()
            .map(|bp| BasePiece {
                piece: bp.piece.translate(&ExactScalar::two_pi_times(&bp.shift)),
                shift: -bp.shift.clone(),
            })
            .collect();
        Self::from_parts(base, self.target.clone(), self.source.clone(), witness)
    }

    /// `self ∘ inner`, stored over `inner`'s source.
    pub fn compose(&self, inner: &InterpolationMap) -> Result<Self> {
        if self.dilation_factor() != inner.dilation_factor() {
            return Err(Error::FactorMismatch(
                self.dilation_factor().to_string(),
                inner.dilation_factor().to_string(),
            ));
        }
        let mut frags = Vec::new();
        let mut image = Vec::new();
        for bp in &inner.base_pieces {
            let shift_in = ExactScalar::two_pi_times(&bp.shift);
            let moved = bp.piece.translate(&shift_in);
            for (iv, t) in self.decompose(&moved)? {
                let total = &bp.shift + &t;
                image.push(iv.translate(&ExactScalar::two_pi_times(&t)));
                frags.push((iv.translate(&-&shift_in), total));
            }
            if frags.len() > MAX_PIECES {
                return Err(Error::PieceLimit {
                    what: "composition",
                    cap: MAX_PIECES,
                });
            }
        }
        Self::from_parts(
            group_by_shift(frags),
            inner.source.clone(),
            IntervalSet::from_parts(image),
            inner.witness.clone(),
        )
    }

    /// `self^n` for `n ≥ 1`, stored over the source.
    pub fn power(&self, n: u32) -> Result<Self> {
        assert!(n >= 1, "power needs n >= 1");
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }
}

impl fmt::Debug for InterpolationMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InterpolationMap")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("base_pieces", &self.base_pieces)
            .finish()
    }
}

impl PartialEq for InterpolationMap {
    fn eq(&self, other: &Self) -> bool {
        self.table() == other.table()
    }
}

/// Builds the interpolation map `σ_E^F` between two wavelet sets for the
/// dilation factor `d`.
pub fn build_sigma(e: &IntervalSet, f: &IntervalSet, d: &BigRational) -> Result<InterpolationMap> {
    let ce = certify(e, d)?;
    let cf = certify(f, d)?;
    let mut frags = Vec::new();
    for pe in &ce.translation.pieces {
        let ke = BigRational::from_integer(pe.shift_multiple.clone());
        let to_window = ExactScalar::two_pi_times(&ke);
        let moved = pe.piece.translate(&to_window);
        for pf in &cf.translation.pieces {
            let kf = BigRational::from_integer(pf.shift_multiple.clone());
            let landed = pf.piece.translate(&ExactScalar::two_pi_times(&kf));
            for iv in moved.intersect(&landed).parts() {
                frags.push((iv.translate(&-&to_window), &ke - &kf));
            }
        }
    }
    let map = InterpolationMap::from_parts(group_by_shift(frags), e.clone(), f.clone(), ce.dilation)?;
    if map.image_of_source() != *f {
        return Err(Error::Internal("translation congruence E → F did not close".into()));
    }
    Ok(map)
}

/// Facts about an interpolation map established by exhaustive piecewise
/// computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapClassification {
    pub is_involution: bool,
    /// Least `k ≤ max_order` with `σᵏ = id`, if any.
    pub torsion_order: Option<u32>,
    /// Every `σⁿ` for `1 ≤ n < k` (or `n ≤ max_order` without torsion) moves
    /// each point of the source by a multiple of 2π and maps it onto a
    /// certified wavelet set.
    pub congruence_powers_ok: bool,
    pub max_order: u32,
}

impl MapClassification {
    /// `σ` is an involution and its powers are 2π-congruences: the pair
    /// `(E, σ(E))` is an interpolation pair.
    pub fn is_interpolation_pair(&self) -> bool {
        self.is_involution && self.congruence_powers_ok
    }
}

/// Classifies `σ`: involution, torsion order up to `max_order`, and the
/// 2π-congruence of its powers.
pub fn classify(sigma: &InterpolationMap, max_order: u32) -> Result<MapClassification> {
    let d = sigma.dilation_factor().clone();
    let is_involution = sigma.compose(sigma)?.is_identity();
    let mut torsion_order = None;
    let mut powers_ok = true;
    let mut power = sigma.clone();
    for n in 1..=max_order.max(1) {
        if power.is_identity() {
            torsion_order = Some(n);
            break;
        }
        if powers_ok {
            powers_ok = power.is_two_pi_congruence() && certify(power.target(), &d).is_ok();
        }
        if n < max_order {
            power = sigma.compose(&power)?;
        }
    }
    Ok(MapClassification {
        is_involution,
        torsion_order,
        congruence_powers_ok: powers_ok,
        max_order,
    })
}

/// Torsion bound from `WAVESET_TORSION_BOUND`, falling back to the default.
pub fn torsion_bound_from_env() -> u32 {
    std::env::var("WAVESET_TORSION_BOUND")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &u32| n >= 1)
        .unwrap_or(DEFAULT_TORSION_BOUND)
}

/// `d^n` as a convenience for callers evaluating homogeneity.
pub fn factor_pow(d: &BigRational, n: i64) -> BigRational {
    if n == 0 {
        BigRational::one()
    } else {
        crate::scalar::rational_pow(d, n)
    }
}
