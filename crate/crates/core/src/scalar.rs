//! Exact scalars of the form `p·π + r` with `p`, `r` rational.
//!
//! Every endpoint, shift and breakpoint used by the wavelet-set constructions
//! lives in the field ℚ + ℚπ. Because π is transcendental, equality reduces
//! to equality of the two rational coordinates, and ordering is decided by a
//! certified rational enclosure of π that is refined until the sign of the
//! difference is known.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseError;

/// π to 99 decimals, as an integer.
const PI_DIGITS: &str = "31415926535897932384626433832795028841971693993751\
                         05820974944592307816406286208998628034825342117067";
const PI_DIGITS_PRECISION: u32 = 99;

/// Continued-fraction convergents bracketing π, tried before the long
/// expansion so that everyday comparisons stay on small integers.
const PI_CONVERGENT_BRACKETS: [(i64, i64, i64, i64); 4] = [
    (333, 106, 355, 113),
    (103_993, 33_102, 104_348, 33_215),
    (833_719, 265_381, 1_146_408, 364_913),
    (80_143_857, 25_510_582, 165_707_065, 52_746_197),
];

/// Shorthand for building a [`BigRational`] from machine integers.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Rational bracket `lo < π < hi`.
#[derive(Clone, Debug)]
struct PiBracket {
    lo: BigRational,
    hi: BigRational,
}

fn base_bracket() -> &'static PiBracket {
    static BRACKET: OnceLock<PiBracket> = OnceLock::new();
    BRACKET.get_or_init(|| {
        let digits: BigInt = PI_DIGITS.parse().expect("pi digits");
        let scale = BigInt::from(10u32).pow(PI_DIGITS_PRECISION);
        PiBracket {
            lo: BigRational::new(digits.clone(), scale.clone()),
            hi: BigRational::new(digits + 1, scale),
        }
    })
}

/// `atan(1/x)·10^digits`, truncated term by term, with a bound on the
/// accumulated truncation error (in the same units).
fn arctan_inv_scaled(x: u32, digits: u32) -> (BigInt, BigInt) {
    let scale = BigInt::from(10u32).pow(digits);
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = scale / BigInt::from(x); // 10^digits / x^(2k+1)
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    // one unit per truncated division, plus the alternating tail
    (sum, BigInt::from(2 * k + 2))
}

/// Machin's formula, π = 16·atan(1/5) − 4·atan(1/239), evaluated with
/// integer arithmetic and returned as a certified bracket.
fn machin_bracket(digits: u32) -> PiBracket {
    let guard = digits + 10;
    let (a5, e5) = arctan_inv_scaled(5, guard);
    let (a239, e239) = arctan_inv_scaled(239, guard);
    let centre = a5 * 16 - a239 * 4;
    let err = e5 * 16 + e239 * 4;
    let scale = BigInt::from(10u32).pow(guard);
    PiBracket {
        lo: BigRational::new(&centre - &err, scale.clone()),
        hi: BigRational::new(centre + err, scale),
    }
}

/// An exact element `pi·π + rat` of ℚ + ℚπ.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    pi: BigRational,
    rat: BigRational,
}

impl ExactScalar {
    pub fn new(pi: BigRational, rat: BigRational) -> Self {
        Self { pi, rat }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `1·π`.
    pub fn pi() -> Self {
        Self::pi_multiple(BigRational::one())
    }

    /// `q·π`.
    pub fn pi_multiple(q: BigRational) -> Self {
        Self {
            pi: q,
            rat: BigRational::zero(),
        }
    }

    /// `(n/d)·π`, for literals.
    pub fn pi_frac(n: i64, d: i64) -> Self {
        Self::pi_multiple(rat(n, d))
    }

    /// A pure rational.
    pub fn rational(q: BigRational) -> Self {
        Self {
            pi: BigRational::zero(),
            rat: q,
        }
    }

    /// `2π·k`, the translation unit of the integer lattice in frequency space.
    pub fn two_pi_times(k: &BigRational) -> Self {
        Self::pi_multiple(k * BigInt::from(2))
    }

    pub fn pi_coeff(&self) -> &BigRational {
        &self.pi
    }

    pub fn rat_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn is_zero(&self) -> bool {
        self.pi.is_zero() && self.rat.is_zero()
    }

    /// Multiplication by a rational.
    pub fn scale(&self, q: &BigRational) -> Self {
        Self {
            pi: &self.pi * q,
            rat: &self.rat * q,
        }
    }

    /// Division by a nonzero rational. Panics on zero, like integer division.
    pub fn div_rat(&self, q: &BigRational) -> Self {
        assert!(!q.is_zero(), "division of ExactScalar by zero");
        Self {
            pi: &self.pi / q,
            rat: &self.rat / q,
        }
    }

    /// Exact sign: −1, 0 or 1.
    pub fn signum(&self) -> i8 {
        if self.pi.is_zero() {
            return sign_of(&self.rat);
        }
        let decide = |lo: &BigRational, hi: &BigRational| -> Option<i8> {
            let a = &self.pi * lo + &self.rat;
            let b = &self.pi * hi + &self.rat;
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            if lo.is_positive() {
                Some(1)
            } else if hi.is_negative() {
                Some(-1)
            } else {
                None
            }
        };
        for &(ln, ld, hn, hd) in &PI_CONVERGENT_BRACKETS {
            if let Some(s) = decide(&rat(ln, ld), &rat(hn, hd)) {
                return s;
            }
        }
        let base = base_bracket();
        if let Some(s) = decide(&base.lo, &base.hi) {
            return s;
        }
        // rat/pi is a rational closer to π than 10^-99; widen precision
        // until the sign is decided (π is irrational, so this terminates).
        let mut digits = 2 * PI_DIGITS_PRECISION;
        loop {
            let b = machin_bracket(digits);
            if let Some(s) = decide(&b.lo, &b.hi) {
                return s;
            }
            digits *= 2;
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Nearest double-precision value.
    pub fn to_f64(&self) -> f64 {
        if self.pi.is_zero() {
            return self.rat.to_f64().unwrap_or(f64::NAN);
        }
        // π to 30 decimals: far below half an ulp for any double result
        static PI_30: OnceLock<BigRational> = OnceLock::new();
        let pi = PI_30.get_or_init(|| {
            let digits: BigInt = PI_DIGITS[..31].parse().expect("pi digits");
            BigRational::new(digits, BigInt::from(10u32).pow(30))
        });
        (&self.pi * pi + &self.rat).to_f64().unwrap_or(f64::NAN)
    }

    /// Integer `k` with `k·unit ≤ self < (k+1)·unit`; `unit` must be positive.
    pub fn floor_multiple(&self, unit: &ExactScalar) -> BigInt {
        assert!(unit.is_positive(), "floor_multiple needs a positive unit");
        let estimate = (self.to_f64() / unit.to_f64()).floor();
        let mut k = if estimate.is_finite() {
            BigInt::from(estimate as i64)
        } else {
            BigInt::zero()
        };
        let at = |k: &BigInt| unit.scale(&BigRational::from_integer(k.clone()));
        while at(&k) > *self {
            k -= 1;
        }
        while at(&(&k + 1)) <= *self {
            k += 1;
        }
        k
    }

    /// Exact ratio `self / other` when it is rational, i.e. when the two
    /// scalars are rationally proportional.
    pub fn ratio(&self, other: &ExactScalar) -> Option<BigRational> {
        if other.is_zero() {
            return None;
        }
        let q = if !other.pi.is_zero() {
            &self.pi / &other.pi
        } else {
            &self.rat / &other.rat
        };
        (other.scale(&q) == *self).then_some(q)
    }

    /// Reparsable ASCII rendering, e.g. `-32pi/7` or `pi/2+1`.
    pub fn to_ascii(&self) -> String {
        self.render("pi")
    }

    fn render(&self, pi_symbol: &str) -> String {
        let mut out = String::new();
        if !self.pi.is_zero() {
            let n = self.pi.numer();
            let d = self.pi.denom();
            if n.is_negative() {
                out.push('-');
            }
            let n_abs = n.abs();
            if !n_abs.is_one() {
                out.push_str(&n_abs.to_string());
            }
            out.push_str(pi_symbol);
            if !d.is_one() {
                out.push('/');
                out.push_str(&d.to_string());
            }
        }
        if !self.rat.is_zero() || self.pi.is_zero() {
            if !out.is_empty() && !self.rat.is_negative() {
                out.push('+');
            }
            out.push_str(&self.rat.to_string());
        }
        out
    }
}

fn sign_of(q: &BigRational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.pi == other.pi {
            return self.rat.cmp(&other.rat);
        }
        match (self - other).signum() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar {
            pi: &self.pi + &rhs.pi,
            rat: &self.rat + &rhs.rat,
        }
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: ExactScalar) -> ExactScalar {
        &self + &rhs
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        self.pi += &rhs.pi;
        self.rat += &rhs.rat;
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar {
            pi: &self.pi - &rhs.pi,
            rat: &self.rat - &rhs.rat,
        }
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: ExactScalar) -> ExactScalar {
        &self - &rhs
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        self.pi -= &rhs.pi;
        self.rat -= &rhs.rat;
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            pi: -self.pi,
            rat: -self.rat,
        }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -self.clone()
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("π"))
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactScalar({})", self.to_ascii())
    }
}

// ---------------------------------------------------------------------------
// Parsing

/// Parses a rational literal: `3`, `-3/4`, `0.25`.
pub fn parse_rational(src: &str) -> Result<BigRational, ParseError> {
    let s = src.trim();
    let bad = || ParseError::Scalar(src.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !int.chars().all(|c| c.is_ascii_digit())
            || (int.is_empty() && frac.is_empty())
        {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let q = BigRational::new(digits, scale);
        return Ok(if negative { -q } else { q });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Option<&'a str> {
        let rest = self.rest();
        let len = rest
            .char_indices()
            .take_while(|(_, c)| c.is_ascii_digit() || *c == '.')
            .map(|(i, c)| i + c.len_utf8())
            .last()
            .unwrap_or(0);
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }
}

impl FromStr for ExactScalar {
    type Err = ParseError;

    /// Accepts sums of terms such as `-32pi/7`, `3/2pi`, `pi/2 + 1`, `0.5`,
    /// `2*π`. Anything outside ℚ + ℚπ is rejected.
    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || ParseError::Scalar(src.to_string());
        if compact.is_empty() {
            return Err(bad());
        }
        let mut cur = Cursor {
            src: &compact,
            pos: 0,
        };
        let mut acc = ExactScalar::zero();
        let mut first = true;
        while !cur.rest().is_empty() {
            let negative = if cur.eat("-") {
                true
            } else {
                if !cur.eat("+") && !first {
                    return Err(bad());
                }
                false
            };
            first = false;
            let mut coeff = BigRational::one();
            let mut seen = false;
            if let Some(num) = cur.number() {
                coeff = parse_rational(num)?;
                seen = true;
                if cur.eat("/") {
                    let den = cur.number().ok_or_else(bad)?;
                    let den = parse_rational(den)?;
                    if den.is_zero() {
                        return Err(bad());
                    }
                    coeff /= den;
                }
            }
            let had_star = seen && cur.eat("*");
            let has_pi = cur.eat("pi") || cur.eat("π");
            if had_star && !has_pi {
                return Err(bad());
            }
            if has_pi {
                seen = true;
                if cur.eat("/") {
                    let den = parse_rational(cur.number().ok_or_else(bad)?)?;
                    if den.is_zero() {
                        return Err(bad());
                    }
                    coeff /= den;
                }
            }
            if !seen {
                return Err(bad());
            }
            if negative {
                coeff = -coeff;
            }
            if has_pi {
                acc.pi += coeff;
            } else {
                acc.rat += coeff;
            }
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// JSON: {"pi": [p, q], "rat": [r, s]}, "rat" omitted when zero.

/// Integer that serializes as a JSON number when it fits in i64 and as a
/// decimal string otherwise.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    fn from_big(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => JsonInt::Small(v),
            None => JsonInt::Big(n.to_string()),
        }
    }

    fn into_big(self) -> Result<BigInt, String> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(v)),
            JsonInt::Big(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
        }
    }
}

/// A rational as a `[numerator, denominator]` JSON pair.
#[derive(Serialize, Deserialize)]
pub struct RationalPair(JsonInt, JsonInt);

impl RationalPair {
    pub fn from_rational(q: &BigRational) -> Self {
        RationalPair(JsonInt::from_big(q.numer()), JsonInt::from_big(q.denom()))
    }

    pub fn into_rational(self) -> Result<BigRational, String> {
        let n = self.0.into_big()?;
        let d = self.1.into_big()?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(BigRational::new(n, d))
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi: Option<RationalPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rat: Option<RationalPair>,
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScalarJson {
            pi: Some(RationalPair::from_rational(&self.pi)),
            rat: (!self.rat.is_zero()).then(|| RationalPair::from_rational(&self.rat)),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ScalarJson::deserialize(deserializer)?;
        let conv = |p: Option<RationalPair>| match p {
            Some(p) => p.into_rational().map_err(D::Error::custom),
            None => Ok(BigRational::zero()),
        };
        Ok(ExactScalar {
            pi: conv(raw.pi)?,
            rat: conv(raw.rat)?,
        })
    }
}

/// Serde helper for `BigRational` fields encoded as `[p, q]`.
pub mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        RationalPair::from_rational(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        RationalPair::deserialize(d)?
            .into_rational()
            .map_err(D::Error::custom)
    }
}

/// `q^k` for a nonzero rational and any integer exponent.
pub fn rational_pow(q: &BigRational, k: i64) -> BigRational {
    let base = if k < 0 { q.recip() } else { q.clone() };
    let mut result = BigRational::one();
    let mut b = base;
    let mut e = k.unsigned_abs();
    while e > 0 {
        if e.is_odd() {
            result *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    result
}
