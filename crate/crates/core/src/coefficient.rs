//! Dilation-periodic multipliers and the coefficient criterion for
//! interpolated wavelets.
//!
//! A multiplier `h` with `h(d·s) = h(s)` is determined by its values on the
//! fundamental domain `[−dπ, −π) ∪ [π, dπ)`. For an interpolation map `σ` of
//! torsion order `k` and multipliers `h₀ … h_{k−1}`, the function
//! `(1/√(2π))·Σ hₙ·χ_{σⁿ(E)}` is an orthonormal wavelet exactly when the
//! matrix with entries `h_{(j−i) mod k} ∘ σ^{−i}` is unitary almost
//! everywhere. The sum has `k` terms (`n = 0 … k−1`).

use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::congruence::MAX_RING_POWERS;
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, ParseError, Result};
use crate::interpolation::{classify, InterpolationMap, MAX_PIECES};
use crate::interval::{Interval, IntervalSet};
use crate::rings::{Annulus, SplitError};
use crate::scalar::{ExactScalar, RationalPair};
use crate::spectral::{msf_wavelet, ModulatedPiecewise, Term};

/// Tolerance for comparisons involving float-valued coefficients.
pub const FLOAT_TOL: f64 = 1e-12;

/// A multiplier value: exact cyclotomic number or a float fallback.
#[derive(Clone)]
pub enum Coefficient {
    Exact(Cyclotomic),
    Approx(Complex64),
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::Exact(Cyclotomic::zero())
    }

    pub fn one() -> Self {
        Coefficient::Exact(Cyclotomic::one())
    }

    pub fn rational(re: BigRational, im: BigRational) -> Self {
        Coefficient::Exact(Cyclotomic::complex(re, im))
    }

    /// `e^{iπ·num/den}`.
    pub fn root_of_unity(num: i64, den: i64) -> Self {
        Coefficient::Exact(Cyclotomic::root_of_unity(num, den))
    }

    /// `e^{iθ}` as a float.
    pub fn phase(theta: f64) -> Self {
        Coefficient::Approx(Complex64::from_polar(1.0, theta))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coefficient::Exact(_))
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Coefficient::Exact(c) => c.to_complex(),
            Coefficient::Approx(z) => *z,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Coefficient::Exact(c) => Coefficient::Exact(c.conj()),
            Coefficient::Approx(z) => Coefficient::Approx(z.conj()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => Coefficient::Exact(a.clone() + b.clone()),
            _ => Coefficient::Approx(self.to_complex() + other.to_complex()),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        match (self, other) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => Coefficient::Exact(a.clone() - b.clone()),
            _ => Coefficient::Approx(self.to_complex() - other.to_complex()),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => Coefficient::Exact(a * b),
            _ => Coefficient::Approx(self.to_complex() * other.to_complex()),
        }
    }

    /// Exact zero test for exact values, `|z| < FLOAT_TOL` otherwise.
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Exact(c) => c.is_zero_or_close(FLOAT_TOL),
            Coefficient::Approx(z) => z.norm() < FLOAT_TOL,
        }
    }

    pub fn same_value(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Exact(c) => write!(f, "{c}"),
            Coefficient::Approx(z) => write!(f, "{:.12} {:+.12}i", z.re, z.im),
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// JSON form of a coefficient.
#[derive(Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum CoefficientJson {
    /// `e^{iπ·num/den}`
    RootOfUnity { root_of_unity: (i64, i64) },
    Float { float: (f64, f64) },
    Sum { sum: Vec<CoefficientJson> },
    Product { product: Vec<CoefficientJson> },
    Rectangular {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        re: Option<RationalPair>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<RationalPair>,
    },
}

impl CoefficientJson {
    pub fn into_coefficient(self) -> Result<Coefficient, ParseError> {
        let bad = |m: String| ParseError::Coefficient(m);
        Ok(match self {
            CoefficientJson::RootOfUnity { root_of_unity: (n, d) } => {
                if d == 0 {
                    return Err(bad("root_of_unity with zero denominator".into()));
                }
                Coefficient::root_of_unity(n, d)
            }
            CoefficientJson::Float { float: (re, im) } => {
                if !re.is_finite() || !im.is_finite() {
                    return Err(bad("non-finite float coefficient".into()));
                }
                Coefficient::Approx(Complex64::new(re, im))
            }
            CoefficientJson::Sum { sum } => sum
                .into_iter()
                .try_fold(Coefficient::zero(), |acc, c| Ok(acc.add(&c.into_coefficient()?)))?,
            CoefficientJson::Product { product } => product
                .into_iter()
                .try_fold(Coefficient::one(), |acc, c| Ok(acc.mul(&c.into_coefficient()?)))?,
            CoefficientJson::Rectangular { re, im } => {
                let conv = |p: Option<RationalPair>| p.map_or(Ok(BigRational::zero()), |p| p.into_rational().map_err(bad));
                Coefficient::rational(conv(re)?, conv(im)?)
            }
        })
    }

    pub fn from_coefficient(c: &Coefficient) -> Self {
        match c {
            Coefficient::Approx(z) => CoefficientJson::Float { float: (z.re, z.im) },
            Coefficient::Exact(x) => match x.as_rectangular() {
                Some((re, im)) => CoefficientJson::Rectangular {
                    re: Some(RationalPair::from_rational(&re)),
                    im: (!im.is_zero()).then(|| RationalPair::from_rational(&im)),
                },
                None => CoefficientJson::Sum {
                    sum: x
                        .terms()
                        .map(|(q, c)| CoefficientJson::Product {
                            product: vec![
                                CoefficientJson::Rectangular {
                                    re: Some(RationalPair::from_rational(c)),
                                    im: None,
                                },
                                root_json(q),
                            ],
                        })
                        .collect(),
                },
            },
        }
    }
}

fn root_json(q: &BigRational) -> CoefficientJson {
    use num_traits::ToPrimitive;
    match (q.numer().to_i64(), q.denom().to_i64()) {
        (Some(n), Some(d)) => CoefficientJson::RootOfUnity { root_of_unity: (n, d) },
        _ => {
            let z = Cyclotomic::term(BigRational::one(), q.clone()).to_complex();
            CoefficientJson::Float { float: (z.re, z.im) }
        }
    }
}

impl Serialize for Coefficient {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoefficientJson::from_coefficient(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        CoefficientJson::deserialize(d)?
            .into_coefficient()
            .map_err(serde::de::Error::custom)
    }
}

fn split_err(iv: &Interval, e: SplitError) -> Error {
    match e {
        SplitError::StraddlesZero => Error::InvalidArgument(format!("{iv} contains 0")),
        SplitError::Unbounded => Error::UnboundedSplit(iv.to_string()),
    }
}

/// A piecewise-constant function with `h(d·s) = h(s)`.
#[derive(Clone)]
pub struct PeriodicMultiplier {
    annulus: Annulus,
    /// Sorted cells partitioning the fundamental domain.
    cells: Vec<(Interval, Coefficient)>,
}

impl PeriodicMultiplier {
    /// Extends values given on the fundamental domain `[−dπ, −π) ∪ [π, dπ)`.
    pub fn extend(d: &BigRational, pieces: Vec<(IntervalSet, Coefficient)>) -> Result<Self> {
        if *d <= BigRational::one() {
            return Err(Error::OutOfRange(format!("dilation factor {d} must exceed 1")));
        }
        let annulus = Annulus::littlewood_paley(d.clone());
        let fd = annulus.set();
        let mut cells = Vec::new();
        let mut covered = IntervalSet::empty();
        for (set, value) in pieces {
            if !set.is_subset_of(&fd) {
                return Err(Error::NotAPartition(format!("{set} leaves the fundamental domain {fd}")));
            }
            if !set.is_disjoint_from(&covered) {
                return Err(Error::NotAPartition(format!("{set} overlaps another piece")));
            }
            covered = covered.union(&set);
            cells.extend(set.into_parts().into_iter().map(|iv| (iv, value.clone())));
        }
        if covered != fd {
            return Err(Error::NotAPartition(format!("{} is not covered", fd.subtract(&covered))));
        }
        cells.sort_by(|a, b| a.0.lo().cmp(b.0.lo()));
        Ok(Self { annulus, cells })
    }

    pub fn constant(d: &BigRational, value: Coefficient) -> Result<Self> {
        let fd = Annulus::littlewood_paley(d.clone()).set();
        Self::extend(d, vec![(fd, value)])
    }

    /// `e^{iθ}` from a real piecewise-constant phase on the fundamental domain.
    pub fn from_phases(d: &BigRational, phases: Vec<(IntervalSet, f64)>) -> Result<Self> {
        Self::extend(d, phases.into_iter().map(|(s, t)| (s, Coefficient::phase(t))).collect())
    }

    pub fn dilation_factor(&self) -> &BigRational {
        self.annulus.factor()
    }

    pub fn fundamental_domain(&self) -> IntervalSet {
        self.annulus.set()
    }

    pub fn cells(&self) -> &[(Interval, Coefficient)] {
        &self.cells
    }

    pub fn is_exact(&self) -> bool {
        self.cells.iter().all(|(_, v)| v.is_exact())
    }

    pub fn sup_norm(&self) -> f64 {
        self.cells
            .iter()
            .map(|(_, v)| v.to_complex().norm())
            .fold(0.0, f64::max)
    }

    fn cell_at(&self, y: &ExactScalar) -> Option<&Coefficient> {
        let idx = self.cells.partition_point(|(iv, _)| iv.lo() <= y);
        (idx > 0)
            .then(|| &self.cells[idx - 1])
            .filter(|(iv, _)| iv.contains(y))
            .map(|(_, v)| v)
    }

    /// `h(s)` for `s ≠ 0`.
    pub fn evaluate(&self, s: &ExactScalar) -> Option<&Coefficient> {
        let (_, y) = self.annulus.reduce(s)?;
        self.cell_at(&y)
    }

    /// Splits `omega` into fragments on which `h` is constant.
    pub fn restrict(&self, omega: &IntervalSet) -> Result<Vec<(Interval, Coefficient)>> {
        let mut out = Vec::new();
        for part in omega.parts() {
            for (frag, m) in self
                .annulus
                .split(part, MAX_RING_POWERS)
                .map_err(|e| split_err(part, e))?
            {
                let up = self.annulus.pow(m);
                let y = frag.scale(&self.annulus.pow(-m));
                let start = self.cells.partition_point(|(iv, _)| iv.hi() <= y.lo());
                for (iv, v) in &self.cells[start..] {
                    if iv.lo() >= y.hi() {
                        break;
                    }
                    if let Some(piece) = y.intersect(iv) {
                        out.push((piece.scale(&up), v.clone()));
                    }
                }
                if out.len() > MAX_PIECES {
                    return Err(Error::PieceLimit {
                        what: "multiplier restriction",
                        cap: MAX_PIECES,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Pointwise product `h·f`.
    pub fn multiply(&self, f: &ModulatedPiecewise) -> Result<ModulatedPiecewise> {
        let mut out = ModulatedPiecewise::zero();
        for t in &f.terms {
            for (piece, v) in self.restrict(&IntervalSet::from(t.support.clone()))? {
                out.push(Term {
                    coeff: t.coeff * v.to_complex(),
                    freq: t.freq.clone(),
                    support: piece,
                });
            }
        }
        Ok(out)
    }

    /// Values of `h ∘ τ^{−1}` on `region`, where `tau_inv = τ^{−1}`.
    fn pullback_on(&self, tau_inv: &InterpolationMap, region: &IntervalSet) -> Result<Vec<(Interval, Coefficient)>> {
        let mut out = Vec::new();
        for (frag, t) in tau_inv.decompose(region)? {
            let shift = ExactScalar::two_pi_times(&t);
            for (piece, v) in self.restrict(&IntervalSet::from(frag.translate(&shift)))? {
                out.push((piece.translate(&-&shift), v));
            }
        }
        Ok(out)
    }

    /// Structural agreement of two multipliers cell by cell.
    pub fn same_function(&self, other: &Self) -> bool {
        self.dilation_factor() == other.dilation_factor()
            && self.cells.iter().all(|(iv, v)| {
                other
                    .restrict(&IntervalSet::from(iv.clone()))
                    .map(|frags| frags.iter().all(|(_, w)| w.same_value(v)))
                    .unwrap_or(false)
            })
    }
}

impl fmt::Debug for PeriodicMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.cells.iter().map(|(iv, v)| (iv.to_string(), v)))
            .finish()
    }
}

/// `h ∘ σ^{−1}`, reduced to the fundamental domain and re-checked for
/// dilation periodicity on the neighbouring rings.
pub fn conjugate_by_sigma(h: &PeriodicMultiplier, sigma: &InterpolationMap) -> Result<PeriodicMultiplier> {
    if h.dilation_factor() != sigma.dilation_factor() {
        return Err(Error::FactorMismatch(
            h.dilation_factor().to_string(),
            sigma.dilation_factor().to_string(),
        ));
    }
    let inv = sigma.inverse()?;
    let fd = h.fundamental_domain();
    let cells = h.pullback_on(&inv, &fd)?;
    let result = PeriodicMultiplier::extend(
        h.dilation_factor(),
        cells.into_iter().map(|(iv, v)| (IntervalSet::from(iv), v)).collect(),
    )?;
    if !periodicity_recheck(h, &inv, &result)? {
        return Err(Error::Internal("conjugated multiplier is not dilation periodic".into()));
    }
    Ok(result)
}

/// Independently recomputes `h ∘ σ^{−1}` on the rings `d^{±1}·K` and
/// compares with the reduced representation `result`.
pub fn periodicity_recheck(h: &PeriodicMultiplier, sigma_inv: &InterpolationMap, result: &PeriodicMultiplier) -> Result<bool> {
    let fd = h.fundamental_domain();
    for k in [-1i64, 1] {
        let scale = h.annulus.pow(k);
        let ring = fd.dilate(&scale)?;
        for (iv, v) in h.pullback_on(sigma_inv, &ring)? {
            let back = IntervalSet::from(iv.scale(&h.annulus.pow(-k)));
            for (_, w) in result.restrict(&back)? {
                if !w.same_value(&v) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Multipliers `h₀ … h_{k−1}` attached to an interpolation map of torsion
/// order `k`.
#[derive(Clone, Debug)]
pub struct CoefficientFamily {
    sigma: InterpolationMap,
    order: usize,
    h: Vec<PeriodicMultiplier>,
    /// `conj[i][n] = hₙ ∘ σ^{−i}`
    conj: Vec<Vec<PeriodicMultiplier>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitarityReport {
    pub unitary: bool,
    pub exact: bool,
    pub pieces_checked: usize,
    /// First cell of the fundamental domain where the matrix is not unitary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<IntervalSet>,
}

impl CoefficientFamily {
    /// Requires `σᵏ = id` with `k = h.len()` and `k ≤ max_order`.
    pub fn new(sigma: InterpolationMap, h: Vec<PeriodicMultiplier>, max_order: u32) -> Result<Self> {
        let class = classify(&sigma, max_order)?;
        let k = class
            .torsion_order
            .ok_or_else(|| Error::InvalidArgument(format!("no torsion order up to {max_order}")))?
            as usize;
        if h.len() != k {
            return Err(Error::InvalidArgument(format!(
                "torsion order is {k} but {} multipliers were given",
                h.len()
            )));
        }
        let mut conj = vec![h.clone()];
        let mut power = sigma.clone();
        for _ in 1..k {
            conj.push(
                h.iter()
                    .map(|hn| conjugate_by_sigma(hn, &power))
                    .collect::<Result<Vec<_>>>()?,
            );
            power = sigma.compose(&power)?;
        }
        Ok(Self { sigma, order: k, h, conj })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sigma(&self) -> &InterpolationMap {
        &self.sigma
    }

    pub fn multipliers(&self) -> &[PeriodicMultiplier] {
        &self.h
    }

    fn entry(&self, i: usize, j: usize) -> &PeriodicMultiplier {
        &self.conj[i][(j + self.order - i) % self.order]
    }

    /// Row-major `k×k` matrix at `s ≠ 0`.
    pub fn coefficient_matrix(&self, s: &ExactScalar) -> Result<Vec<Vec<Coefficient>>> {
        let k = self.order;
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        self.entry(i, j)
                            .evaluate(s)
                            .cloned()
                            .ok_or_else(|| Error::InvalidArgument(format!("cannot evaluate at {s}")))
                    })
                    .collect()
            })
            .collect()
    }

    /// Checks `M·M* = I` on every cell of the common refinement of all
    /// entries over the fundamental domain.
    pub fn is_unitary_ae(&self) -> Result<UnitarityReport> {
        let fd = self.h[0].fundamental_domain();
        let mut cuts: Vec<ExactScalar> = self
            .conj
            .iter()
            .flatten()
            .flat_map(|m| m.cells.iter().flat_map(|(iv, _)| [iv.lo().clone(), iv.hi().clone()]))
            .collect();
        cuts.sort();
        cuts.dedup();
        if cuts.len() > MAX_PIECES {
            return Err(Error::PieceLimit {
                what: "common refinement",
                cap: MAX_PIECES,
            });
        }
        let exact = self.conj.iter().flatten().all(PeriodicMultiplier::is_exact);
        let mut checked = 0;
        for w in cuts.windows(2) {
            if !fd.contains(&w[0]) {
                continue;
            }
            checked += 1;
            let m = self.coefficient_matrix(&w[0])?;
            if !is_unitary(&m) {
                let cell = Interval::new(w[0].clone(), w[1].clone()).expect("sorted cuts");
                return Ok(UnitarityReport {
                    unitary: false,
                    exact,
                    pieces_checked: checked,
                    violation: Some(cell.into()),
                });
            }
        }
        Ok(UnitarityReport {
            unitary: true,
            exact,
            pieces_checked: checked,
            violation: None,
        })
    }

    /// `(1/√(2π))·Σₙ hₙ·χ_{σⁿ(E)}`. Fails unless the matrix is unitary a.e.
    /// or `force` is set.
    pub fn synthesize(&self, force: bool) -> Result<ModulatedPiecewise> {
        if !force {
            let report = self.is_unitary_ae()?;
            if let Some(v) = report.violation {
                return Err(Error::CriterionFailed(format!("coefficient matrix not unitary on {v}")));
            }
        }
        let norm = Complex64::new(1.0 / (2.0 * std::f64::consts::PI).sqrt(), 0.0);
        let mut out = ModulatedPiecewise::zero();
        let mut support = self.sigma.source().clone();
        for (n, hn) in self.h.iter().enumerate() {
            if n > 0 {
                support = self.sigma.apply_to_set(&support)?;
            }
            out = out.add(&hn.multiply(&ModulatedPiecewise::indicator(&support, norm))?);
        }
        Ok(out)
    }
}

fn is_unitary(m: &[Vec<Coefficient>]) -> bool {
    let k = m.len();
    (0..k).all(|i| {
        (0..k).all(|l| {
            let dot = (0..k).fold(Coefficient::zero(), |acc, j| acc.add(&m[i][j].mul(&m[l][j].conj())));
            let target = if i == l { Coefficient::one() } else { Coefficient::zero() };
            dot.same_value(&target)
        })
    })
}

/// `h·ψ̂_E`, the wavelet obtained from an MSF wavelet by a dilation-periodic
/// phase or multiplier.
pub fn apply_phase(set: &IntervalSet, h: &PeriodicMultiplier) -> Result<ModulatedPiecewise> {
    h.multiply(&msf_wavelet(set))
}
