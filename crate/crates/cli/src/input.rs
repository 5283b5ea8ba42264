//! Argument decoding shared by the subcommands.

use std::fs;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::Deserialize;

use waveset::coefficient::{Coefficient, CoefficientJson, PeriodicMultiplier};
use waveset::scalar::parse_rational;
use waveset::spectral::ModulatedPiecewise;
use waveset::{Error, ExactScalar, IntervalSet};

/// Failure of a subcommand, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input or an argument outside a documented range.
    Usage(String),
    /// The input was well formed but the mathematics said no.
    Math(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidArgument(_)
            | Error::OutOfRange(_)
            | Error::FactorMismatch(..)
            | Error::NotAPartition(_)
            | Error::SupportOutOfRange(_) => CliError::Usage(e.to_string()),
            _ => CliError::Math(e.to_string()),
        }
    }
}

impl From<waveset::ParseError> for CliError {
    fn from(e: waveset::ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// `@path` reads the file, anything else is taken literally.
pub fn read_arg(src: &str) -> CliResult<String> {
    match src.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}"))),
        None => Ok(src.to_string()),
    }
}

fn parse_set_text(text: &str) -> CliResult<IntervalSet> {
    let t = text.trim();
    if t.starts_with('{') {
        serde_json::from_str(t).map_err(|e| CliError::Usage(format!("bad interval-set JSON: {e}")))
    } else {
        Ok(t.parse()?)
    }
}

/// A set given as shorthand (`[-2pi,-pi)u[pi,2pi)`), JSON, or `@file` of either.
pub fn parse_set(src: &str) -> CliResult<IntervalSet> {
    parse_set_text(&read_arg(src)?)
}

pub fn parse_scalar(src: &str) -> CliResult<ExactScalar> {
    Ok(src.parse()?)
}

pub fn parse_factor(src: &str) -> CliResult<BigRational> {
    Ok(parse_rational(src)?)
}

/// Family parameters: a bare rational is read as a multiple of π.
pub fn parse_angle(src: &str) -> CliResult<ExactScalar> {
    if src.contains("pi") || src.contains('π') {
        parse_scalar(src)
    } else {
        Ok(ExactScalar::pi_multiple(parse_rational(src)?))
    }
}

pub fn load_function(path: &str) -> CliResult<ModulatedPiecewise> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad function JSON in {path}: {e}")))
}

/// `a:b:n`, `n ≥ 1` points from `a` to `b` inclusive.
pub fn parse_grid(src: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("bad range {src:?} (expected a:b:n)"));
    let fields: Vec<&str> = src.split(':').collect();
    let [a, b, n] = fields.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|i| a + step * i as f64).collect())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SetJson {
    Text(String),
    Parts(IntervalSet),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceJson {
    set: SetJson,
    value: CoefficientJson,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MultiplierJson {
    Pieces(Vec<PieceJson>),
    Constant(CoefficientJson),
}

/// Multipliers `h₀ … h_{k−1}`: a JSON array whose entries are either one
/// coefficient (a constant multiplier) or a list of `{set, value}` pieces
/// partitioning the fundamental domain.
pub fn parse_multipliers(src: &str, d: &BigRational) -> CliResult<Vec<PeriodicMultiplier>> {
    let text = read_arg(src)?;
    let raw: Vec<MultiplierJson> =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad coefficient JSON: {e}")))?;
    raw.into_iter()
        .map(|m| match m {
            MultiplierJson::Constant(c) => Ok(PeriodicMultiplier::constant(d, c.into_coefficient()?)?),
            MultiplierJson::Pieces(pieces) => {
                let cells = pieces
                    .into_iter()
                    .map(|p| {
                        let set = match p.set {
                            SetJson::Text(s) => parse_set_text(&s)?,
                            SetJson::Parts(s) => s,
                        };
                        Ok((set, p.value.into_coefficient()?))
                    })
                    .collect::<CliResult<Vec<(IntervalSet, Coefficient)>>>()?;
                Ok(PeriodicMultiplier::extend(d, cells)?)
            }
        })
        .collect()
}

/// `1/√|S|·χ_S`, a unit-norm test function.
pub fn unit_indicator(set: &IntervalSet) -> CliResult<ModulatedPiecewise> {
    let m = set.measure().to_f64();
    if m <= 0.0 {
        return Err(CliError::Usage("test set is empty".into()));
    }
    Ok(ModulatedPiecewise::indicator(set, Complex64::new(1.0 / m.sqrt(), 0.0)))
}
