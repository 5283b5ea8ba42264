//! Exact complex numbers of the form `Σ c_q·e^{iπq}` with rational `c_q`
//! and rational `q`, i.e. elements of a cyclotomic field.
//!
//! Equality is decided exactly: with `M = 2·lcm(denominators of q)` every
//! exponential is a power of `ζ = e^{2πi/M}`, and a polynomial in `ζ`
//! vanishes iff the cyclotomic polynomial `Φ_M` divides it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest field order for which the exact zero test is attempted.
pub const MAX_EXACT_ORDER: u64 = 2048;

#[derive(Clone, Default)]
pub struct Cyclotomic {
    /// exponent `q ∈ [0, 2)` ↦ nonzero coefficient
    terms: BTreeMap<BigRational, BigRational>,
}

fn reduce_exponent(q: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    q - &two * (q / &two).floor()
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(c: BigRational) -> Self {
        Self::term(c, BigRational::zero())
    }

    /// `re + i·im`.
    pub fn complex(re: BigRational, im: BigRational) -> Self {
        Self::rational(re) + Self::term(im, BigRational::new(1.into(), 2.into()))
    }

    /// `c·e^{iπq}`.
    pub fn term(c: BigRational, q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(reduce_exponent(&q), c);
        }
        Self { terms }
    }

    /// `e^{iπ·num/den}`.
    pub fn root_of_unity(num: i64, den: i64) -> Self {
        Self::term(BigRational::one(), BigRational::new(num.into(), den.into()))
    }

    /// `cos(πq)`.
    pub fn cos_pi(q: BigRational) -> Self {
        let half = BigRational::new(1.into(), 2.into());
        Self::term(half.clone(), q.clone()) + Self::term(half, -q)
    }

    /// `i·sin(πq)`.
    pub fn i_sin_pi(q: BigRational) -> Self {
        let half = BigRational::new(1.into(), 2.into());
        Self::term(half.clone(), q.clone()) - Self::term(half, -q)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, &BigRational)> {
        self.terms.iter()
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for (q, c) in &self.terms {
            out = out + Self::term(c.clone(), -q);
        }
        out
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(q, c)| (q.clone(), c * r)).collect(),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(q, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                let q = q.to_f64().unwrap_or(f64::NAN);
                Complex64::from_polar(c, std::f64::consts::PI * q)
            })
            .sum()
    }

    /// Field order `M` in which all exponentials live.
    fn order(&self) -> BigInt {
        let l = self
            .terms
            .keys()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        l * 2
    }

    /// Exact zero test; `None` when the field order is too large.
    pub fn try_is_zero(&self) -> Option<bool> {
        if self.terms.is_empty() {
            return Some(true);
        }
        let m = self.order().to_u64().filter(|&m| m <= MAX_EXACT_ORDER)?;
        let half = BigRational::from_integer(BigInt::from(m / 2));
        let mut poly = vec![BigRational::zero(); m as usize];
        for (q, c) in &self.terms {
            let e = (q * &half).to_integer().to_usize().expect("exponent in range");
            poly[e] += c;
        }
        Some(poly_rem(poly, &cyclotomic_poly(m)).iter().all(Zero::is_zero))
    }

    /// Exact when possible, otherwise `|z| < tol` on the float value.
    pub fn is_zero_or_close(&self, tol: f64) -> bool {
        self.try_is_zero()
            .unwrap_or_else(|| self.to_complex().norm() < tol)
    }

    /// `(re, im)` when every exponent is a multiple of π/2.
    pub fn as_rectangular(&self) -> Option<(BigRational, BigRational)> {
        let mut re = BigRational::zero();
        let mut im = BigRational::zero();
        for (q, c) in &self.terms {
            let twice = q * BigRational::from_integer(2.into());
            if !twice.is_integer() {
                return None;
            }
            match twice.to_integer().to_i64()? {
                0 => re += c,
                1 => im += c,
                2 => re -= c,
                3 => im -= c,
                _ => unreachable!("exponent reduced to [0, 2)"),
            }
        }
        Some((re, im))
    }
}

fn moebius(mut n: u64) -> i8 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// `Φ_m` as coefficient vector (lowest degree first), via
/// `Φ_m = Π_{d | m} (x^d − 1)^{μ(m/d)}`.
fn cyclotomic_poly(m: u64) -> Vec<BigRational> {
    let binomial = |d: u64| {
        let mut p = vec![BigRational::zero(); d as usize + 1];
        p[0] = -BigRational::one();
        p[d as usize] = BigRational::one();
        p
    };
    let mut num = vec![BigRational::one()];
    let mut dens = Vec::new();
    for d in (1..=m).filter(|d| m.is_multiple_of(*d)) {
        match moebius(m / d) {
            1 => num = poly_mul(&num, &binomial(d)),
            -1 => dens.push(binomial(d)),
            _ => {}
        }
    }
    for den in dens {
        num = poly_div(num, &den);
    }
    num
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_div(mut num: Vec<BigRational>, den: &[BigRational]) -> Vec<BigRational> {
    let dd = den.len() - 1;
    if num.len() <= dd {
        return vec![BigRational::zero()];
    }
    let mut quot = vec![BigRational::zero(); num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = &num[i + dd] / &den[dd];
        if !c.is_zero() {
            for (j, dj) in den.iter().enumerate() {
                num[i + j] -= &c * dj;
            }
        }
        quot[i] = c;
    }
    quot
}

fn poly_rem(mut num: Vec<BigRational>, den: &[BigRational]) -> Vec<BigRational> {
    let dd = den.len() - 1;
    while num.len() > dd {
        let top = num.pop().expect("nonempty");
        if !top.is_zero() {
            let shift = num.len() - dd;
            for (j, dj) in den.iter().enumerate().take(dd) {
                num[shift + j] -= &top * dj;
            }
        }
    }
    num
}

/// Value equality (exact where the field order allows it).
impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero_or_close(1e-12)
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(mut self, rhs: Cyclotomic) -> Cyclotomic {
        for (q, c) in rhs.terms {
            let entry = self.terms.entry(q.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                self.terms.remove(&q);
            }
        }
        self
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            terms: self.terms.into_iter().map(|(q, c)| (q, -c)).collect(),
        }
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Cyclotomic) -> Cyclotomic {
        self + (-rhs)
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        let mut out = Cyclotomic::zero();
        for (qa, ca) in &self.terms {
            for (qb, cb) in &rhs.terms {
                out = out + Cyclotomic::term(ca * cb, qa + qb);
            }
        }
        out
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Cyclotomic) -> Cyclotomic {
        &self * &rhs
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((re, im)) = self.as_rectangular() {
            return match (re.is_zero(), im.is_zero()) {
                (_, true) => write!(f, "{re}"),
                (true, false) => write!(f, "{im}i"),
                _ if im.is_negative() => write!(f, "{re} - {}i", -im),
                _ => write!(f, "{re} + {im}i"),
            };
        }
        let mut first = true;
        for (q, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}·e^(iπ·{q})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polynomials() {
        let as_ints = |m| {
            cyclotomic_poly(m)
                .iter()
                .map(|c| c.to_integer().to_i64().unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(as_ints(1), vec![-1, 1]);
        assert_eq!(as_ints(4), vec![1, 0, 1]);
        assert_eq!(as_ints(6), vec![1, -1, 1]);
        assert_eq!(as_ints(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(2048).len(), 1025);
        assert_eq!(cyclotomic_poly(105).len(), 49);
    }

    #[test]
    fn classical_identities() {
        // 1 + ω + ω² = 0 for ω = e^{2πi/3}
        let s = Cyclotomic::one() + Cyclotomic::root_of_unity(2, 3) + Cyclotomic::root_of_unity(4, 3);
        assert_eq!(s.try_is_zero(), Some(true));
        // cos²(π/6) + sin²(π/6) = 1
        let c = Cyclotomic::cos_pi(rat(1, 6));
        let is = Cyclotomic::i_sin_pi(rat(1, 6));
        let norm = &c * &c.conj() + &is * &is.conj();
        assert_eq!((norm - Cyclotomic::one()).try_is_zero(), Some(true));
        // 2cos(π/5) = golden ratio is irrational: 2cos(π/5) − 1 ≠ 0, ≠ 3/5
        let g = Cyclotomic::cos_pi(rat(1, 5)).scale(&rat(2, 1));
        assert_eq!((g.clone() - Cyclotomic::one()).try_is_zero(), Some(false));
        assert_eq!((g.clone() * g.clone() - g - Cyclotomic::one()).try_is_zero(), Some(true));
        assert_eq!(Cyclotomic::root_of_unity(1, 2).as_rectangular(), Some((rat(0, 1), rat(1, 1))));
        assert_eq!(Cyclotomic::root_of_unity(3, 1), -Cyclotomic::one());
    }

    proptest! {
        #[test]
        fn zero_test_agrees_with_float(terms in prop::collection::vec((-6i64..=6, -12i64..12, prop::sample::select(vec![1i64, 2, 3, 4, 6, 8, 12])), 1..6)) {
            let z = terms.iter().fold(Cyclotomic::zero(), |acc, &(c, n, d)| acc + Cyclotomic::term(rat(c, 1), rat(n, d)));
            let exact = z.try_is_zero().unwrap();
            let approx = z.to_complex().norm() < 1e-9;
            prop_assert_eq!(exact, approx);
            prop_assert_eq!((z.clone() - z.clone()).try_is_zero(), Some(true));
            let zz = &z * &z.conj();
            prop_assert!((zz.to_complex().re - z.to_complex().norm_sqr()).abs() < 1e-9);
        }
    }
}
