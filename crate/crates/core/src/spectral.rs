//! Closed-form Fourier-side oracle.
//!
//! Functions are finite sums `Σ c·e^{iωs}·χ_[a,b)(s)` with complex `c`,
//! rational `ω` and exact supports. The dilation `D̂ⁿ`, the modulation `T̂^l`
//! and the composition with an interpolation map keep this form, and inner
//! products are integrals of exponentials over intervals, so orthonormality
//! of `{D̂ⁿT̂^l f}` can be checked without quadrature.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interpolation::{build_sigma, InterpolationMap};
use crate::interval::{Interval, IntervalSet};
use crate::scalar::{rational_pow, rational_serde, ExactScalar};

/// Seed for the mixed-entry subsample of [`gram_check`].
pub const MIXED_SEED: u64 = 0x5eed_f9a3;

/// Number of random mixed `(n, l) × (m, j)` entries checked by [`gram_check`].
pub const MIXED_PAIRS: usize = 200;

/// `c·e^{iωs}` on `support`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: Complex64,
    #[serde(with = "rational_serde")]
    pub freq: BigRational,
    pub support: Interval,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModulatedPiecewise {
    pub terms: Vec<Term>,
}

/// `∫_a^b e^{iθs} ds`, stable for small `θ`.
fn exp_integral(theta: f64, a: f64, b: f64) -> Complex64 {
    let half = 0.5 * (b - a);
    let x = theta * half;
    let sinc = if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    };
    Complex64::from_polar(2.0 * half * sinc, theta * 0.5 * (a + b))
}

/// Pairwise summation for reproducible rounding.
fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::zero(),
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn q_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `e^{−2πi·x}` for rational `x`, reduced mod 1 first.
fn unit_phase(x: &BigRational) -> Complex64 {
    let frac = x - x.floor();
    Complex64::from_polar(1.0, -2.0 * PI * q_f64(&frac))
}

impl ModulatedPiecewise {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Constant `c` on each part of `set`.
    pub fn indicator(set: &IntervalSet, c: Complex64) -> Self {
        Self {
            terms: set
                .parts()
                .iter()
                .map(|iv| Term {
                    coeff: c,
                    freq: BigRational::zero(),
                    support: iv.clone(),
                })
                .collect(),
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn push(&mut self, term: Term) {
        if term.coeff != Complex64::zero() {
            self.terms.push(term);
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * c,
                    ..t.clone()
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Union of the supports.
    pub fn support(&self) -> IntervalSet {
        IntervalSet::from_parts(self.terms.iter().map(|t| t.support.clone()).collect())
    }

    /// Pointwise value.
    pub fn eval(&self, s: f64) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.support.lo().to_f64() <= s && s < t.support.hi().to_f64())
            .map(|t| t.coeff * Complex64::from_polar(1.0, q_f64(&t.freq) * s))
            .sum()
    }

    /// `D̂ⁿT̂^l` for dilation factor `d`: `f(s) ↦ d^{−n/2}·e^{−il·d^{−n}s}·f(d^{−n}s)`.
    pub fn apply_dn_tl_with(&self, d: &BigRational, n: i64, l: i64) -> Self {
        let up = rational_pow(d, n);
        let down = rational_pow(d, -n);
        let amp = q_f64(d).powf(-(n as f64) / 2.0);
        let l = BigRational::from_integer(l.into());
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * amp,
                    freq: (&t.freq - &l) * &down,
                    support: t.support.scale(&up),
                })
                .collect(),
        }
    }

    /// `D̂ⁿT̂^l` for the dyadic dilation.
    pub fn apply_dn_tl(&self, n: i64, l: i64) -> Self {
        self.apply_dn_tl_with(&BigRational::from_integer(2.into()), n, l)
    }

    /// Composition with the inverse of an interpolation map, `f ∘ σ^{−1}`.
    pub fn compose_inverse(&self, sigma: &InterpolationMap) -> Result<Self> {
        let mut out = Self::zero();
        for t in &self.terms {
            for (piece, shift) in sigma.decompose(&IntervalSet::from(t.support.clone()))? {
                // on σ(piece) = piece + 2π·shift: f(σ^{−1}s) = c·e^{iω(s − 2π·shift)}
                out.push(Term {
                    coeff: t.coeff * unit_phase(&(&t.freq * &shift)),
                    freq: t.freq.clone(),
                    support: piece.translate(&ExactScalar::two_pi_times(&shift)),
                });
            }
        }
        Ok(out)
    }

    /// Same function with disjoint supports per frequency: supports are
    /// refined to the common breakpoints and equal `(cell, ω)` terms merged.
    pub fn canonicalize(&self) -> Self {
        let mut cuts: Vec<ExactScalar> = self
            .terms
            .iter()
            .flat_map(|t| [t.support.lo().clone(), t.support.hi().clone()])
            .collect();
        cuts.sort();
        cuts.dedup();
        let mut merged: BTreeMap<(usize, BigRational), Complex64> = BTreeMap::new();
        for t in &self.terms {
            let start = cuts.partition_point(|c| c < t.support.lo());
            let mut i = start;
            while i + 1 < cuts.len() && cuts[i] < *t.support.hi() {
                *merged.entry((i, t.freq.clone())).or_default() += t.coeff;
                i += 1;
            }
        }
        Self {
            terms: merged
                .into_iter()
                .map(|((i, freq), coeff)| Term {
                    coeff,
                    freq,
                    support: Interval::new(cuts[i].clone(), cuts[i + 1].clone()).expect("increasing cuts"),
                })
                .collect(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        inner_product(self, self).re
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().max(0.0).sqrt()
    }
}

/// Float image of a function: `(c, ω, a, b)` per term. Inner products of
/// prepared functions avoid repeated exact-to-float conversion.
#[derive(Debug, Clone)]
pub struct Prepared {
    terms: Vec<(Complex64, f64, f64, f64)>,
}

impl ModulatedPiecewise {
    pub fn prepare(&self) -> Prepared {
        let mut terms: Vec<_> = self
            .terms
            .iter()
            .map(|t| (t.coeff, q_f64(&t.freq), t.support.lo().to_f64(), t.support.hi().to_f64()))
            .collect();
        terms.sort_by(|x, y| x.2.total_cmp(&y.2));
        Prepared { terms }
    }
}

/// `⟨f, g⟩` for prepared functions.
pub fn inner_prepared(f: &Prepared, g: &Prepared) -> Complex64 {
    let mut parts = Vec::new();
    for &(ca, wa, a0, a1) in &f.terms {
        for &(cb, wb, b0, b1) in &g.terms {
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if lo < hi {
                parts.push(ca * cb.conj() * exp_integral(wa - wb, lo, hi));
            }
        }
    }
    pairwise_sum(&parts)
}

/// `⟨f, g⟩ = ∫ f·ḡ`.
pub fn inner_product(f: &ModulatedPiecewise, g: &ModulatedPiecewise) -> Complex64 {
    inner_prepared(&f.prepare(), &g.prepare())
}

/// `(1/√(2π))·χ_E`.
pub fn msf_wavelet(set: &IntervalSet) -> ModulatedPiecewise {
    ModulatedPiecewise::indicator(set, Complex64::new(1.0 / (2.0 * PI).sqrt(), 0.0))
}

/// Inverse Fourier transform `(1/√(2π))∫ e^{ist} f(s) ds` at each `t`.
pub fn time_samples(f: &ModulatedPiecewise, ts: &[f64]) -> Vec<Complex64> {
    let norm = 1.0 / (2.0 * PI).sqrt();
    ts.iter()
        .map(|&t| {
            let parts: Vec<Complex64> = f
                .terms
                .iter()
                .map(|term| {
                    term.coeff * exp_integral(q_f64(&term.freq) + t, term.support.lo().to_f64(), term.support.hi().to_f64())
                })
                .collect();
            pairwise_sum(&parts) * norm
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub max_off_diagonal: f64,
    pub max_diagonal_deviation: f64,
    pub n_range: (i64, i64),
    pub l_range: (i64, i64),
    pub mixed_pairs: usize,
    /// `⟨D̂ⁿT̂^l f, f⟩` over the slice, row-major in `n` then `l`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Complex64>>,
}

impl GramReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_off_diagonal.max(self.max_diagonal_deviation)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_off_diagonal < tol && self.max_diagonal_deviation < tol
    }
}

/// Orthonormality check of `{D̂ⁿT̂^l f}` on `|n| ≤ n_max`, `|l| ≤ l_max`.
///
/// Unitarity of `D̂ⁿT̂^l` reduces the Gram matrix to the slice
/// `⟨D̂ⁿT̂^l f, f⟩`; a seeded sample of mixed entries is checked as well.
pub fn gram_check(f: &ModulatedPiecewise, n_max: i64, l_max: i64, keep_entries: bool) -> Result<GramReport> {
    gram_check_with(f, &BigRational::from_integer(2.into()), n_max, l_max, keep_entries)
}

pub fn gram_check_with(
    f: &ModulatedPiecewise,
    d: &BigRational,
    n_max: i64,
    l_max: i64,
    keep_entries: bool,
) -> Result<GramReport> {
    if n_max < 1 || l_max < 1 {
        return Err(Error::InvalidArgument("n_max and l_max must be at least 1".into()));
    }
    let mut off = 0.0f64;
    let mut diag = 0.0f64;
    let mut entries = Vec::new();
    let fp = f.prepare();
    for n in -n_max..=n_max {
        for l in -l_max..=l_max {
            let v = inner_prepared(&f.apply_dn_tl_with(d, n, l).prepare(), &fp);
            if n == 0 && l == 0 {
                diag = diag.max((v - 1.0).norm());
            } else {
                off = off.max(v.norm());
            }
            entries.push(v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(MIXED_SEED);
    for _ in 0..MIXED_PAIRS {
        let (n, l) = (rng.gen_range(-n_max..=n_max), rng.gen_range(-l_max..=l_max));
        let (m, j) = (rng.gen_range(-n_max..=n_max), rng.gen_range(-l_max..=l_max));
        let v = inner_product(&f.apply_dn_tl_with(d, n, l), &f.apply_dn_tl_with(d, m, j));
        if (n, l) == (m, j) {
            diag = diag.max((v - 1.0).norm());
        } else {
            off = off.max(v.norm());
        }
    }
    Ok(GramReport {
        max_off_diagonal: off,
        max_diagonal_deviation: diag,
        n_range: (-n_max, n_max),
        l_range: (-l_max, l_max),
        mixed_pairs: MIXED_PAIRS,
        entries: keep_entries.then_some(entries),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsevalEntry {
    pub norm_sqr: f64,
    pub captured: f64,
    pub deficiency: f64,
    /// Crude bound on the energy lost to `|l| > l_max`; `None` when `l_max`
    /// is below twice the largest frequency involved and the bound does not
    /// apply. Energy at dilation levels beyond `n_max` is not bounded.
    pub l_tail_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    pub entries: Vec<ParsevalEntry>,
    pub n_max: i64,
    pub l_max: i64,
}

impl ParsevalReport {
    pub fn max_deficiency(&self) -> f64 {
        self.entries.iter().map(|e| e.deficiency).fold(0.0, f64::max)
    }
}

/// Truncated Parseval sums `Σ |⟨g, D̂ⁿT̂^l f⟩|²` against `‖g‖²`.
///
/// Tail bound: writing `⟨g, D̂ⁿT̂^l f⟩ = 2^{n/2}∫ φ_n(u)e^{ilu} du` with
/// `φ_n = g(2ⁿ·)·f̄` a finite sum of modulated indicators of total
/// coefficient mass `S_n`, each term integrates to at most `2|c|/|ω + l|`,
/// so for `L ≥ 2·max|ω|` the tail over `|l| > L` is at most
/// `Σ_n 2ⁿ·(4S_n)²·2/L`.
pub fn parseval_check(f: &ModulatedPiecewise, tests: &[ModulatedPiecewise], n_max: i64, l_max: i64) -> Result<ParsevalReport> {
    let reach = 2f64.powi(n_max as i32) * 2.0 * PI;
    let mut entries = Vec::new();
    for g in tests {
        for t in &g.terms {
            if t.support.lo().to_f64() < -reach - 1e-12 || t.support.hi().to_f64() > reach + 1e-12 {
                return Err(Error::SupportOutOfRange(t.support.to_string()));
            }
        }
        let norm_sqr = g.norm_sqr();
        let mut captured = Vec::new();
        let mut tail = 0.0;
        let mut tail_valid = true;
        let gp = g.prepare();
        for n in -n_max..=n_max {
            let fl = f.apply_dn_tl(n, 0);
            let mut mass = 0.0;
            let mut max_freq = 0.0f64;
            for a in &g.terms {
                for b in &fl.terms {
                    if a.support.intersect(&b.support).is_some() {
                        mass += (a.coeff * b.coeff).norm() * 2f64.powf(n as f64 / 2.0);
                        max_freq = max_freq.max(q_f64(&(&a.freq - &b.freq)).abs() * 2f64.powi(n as i32));
                    }
                }
            }
            if (l_max as f64) < 2.0 * max_freq {
                tail_valid = false;
            }
            // rescale to the u-variable: φ_n(u) = g(2ⁿu)·conj(f(u))
            tail += 2f64.powi(n as i32) * (4.0 * mass / 2f64.powf(n as f64)).powi(2) * 2.0 / l_max as f64;
            for l in -l_max..=l_max {
                captured.push(Complex64::new(inner_prepared(&gp, &f.apply_dn_tl(n, l).prepare()).norm_sqr(), 0.0));
            }
        }
        let captured = pairwise_sum(&captured).re;
        entries.push(ParsevalEntry {
            norm_sqr,
            captured,
            deficiency: norm_sqr - captured,
            l_tail_bound: tail_valid.then_some(tail),
        });
    }
    Ok(ParsevalReport { entries, n_max, l_max })
}

/// `‖U_σ D̂ⁿT̂^l ψ̂_E − D̂ⁿT̂^l ψ̂_F‖` for `σ = σ_E^F`.
pub fn local_commutant_check(e: &IntervalSet, f: &IntervalSet, n: i64, l: i64) -> Result<f64> {
    let d = BigRational::from_integer(2.into());
    let sigma = build_sigma(e, f, &d)?;
    local_commutant_deviation(&sigma, n, l)
}

/// As [`local_commutant_check`] for a prebuilt map.
pub fn local_commutant_deviation(sigma: &InterpolationMap, n: i64, l: i64) -> Result<f64> {
    let d = sigma.dilation_factor();
    let left = msf_wavelet(sigma.source())
        .apply_dn_tl_with(d, n, l)
        .compose_inverse(sigma)?;
    let right = msf_wavelet(sigma.target()).apply_dn_tl_with(d, n, l);
    Ok(left.sub(&right).canonicalize().norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RieszReport {
    pub min_eig: f64,
    pub max_eig: f64,
    pub size: usize,
}

/// Eigenvalue range of the truncated Gram matrix of
/// `{D̂ⁿT̂^l(ψ̂_E + λψ̂_F)}`, `|n| ≤ n_max`, `|l| ≤ l_max`. An estimate of
/// the Riesz bounds of the infinite system, not a certificate.
pub fn riesz_combination_check(
    e: &IntervalSet,
    f: &IntervalSet,
    lambda: Complex64,
    n_max: i64,
    l_max: i64,
) -> Result<RieszReport> {
    let psi = msf_wavelet(e).add(&msf_wavelet(f).scale(lambda)).canonicalize();
    let family: Vec<Prepared> = (-n_max..=n_max)
        .flat_map(|n| (-l_max..=l_max).map(move |l| (n, l)))
        .map(|(n, l)| psi.apply_dn_tl(n, l).prepare())
        .collect();
    let size = family.len();
    let mut gram = DMatrix::<Complex64>::zeros(size, size);
    for i in 0..size {
        for j in i..size {
            let v = inner_prepared(&family[j], &family[i]);
            gram[(i, j)] = v;
            gram[(j, i)] = v.conj();
        }
    }
    let eig = gram.symmetric_eigenvalues();
    let min_eig = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_eig = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(RieszReport { min_eig, max_eig, size })
}

/// `e^{iθ}` helper for unimodular coefficients.
pub fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// `1` as a complex coefficient.
pub fn one() -> Complex64 {
    Complex64::one()
}
