//! Constructors for the classical wavelet-set families.

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::scalar::{rat, rational_serde, ExactScalar};

fn pi(n: i64, d: i64) -> ExactScalar {
    ExactScalar::pi_frac(n, d)
}

fn iv(lo: ExactScalar, hi: ExactScalar) -> IntervalSet {
    IntervalSet::interval(lo, hi)
}

/// A named family together with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FamilySpec {
    Shannon,
    ShannonAlpha { alpha: ExactScalar },
    Journe,
    JourneBeta { beta: ExactScalar },
    SubsetThrough { subset: IntervalSet },
    DDilation {
        #[serde(with = "rational_serde")]
        d: BigRational,
    },
}

impl FamilySpec {
    pub fn build(&self) -> Result<IntervalSet> {
        match self {
            FamilySpec::Shannon => Ok(shannon()),
            FamilySpec::ShannonAlpha { alpha } => shannon_alpha(alpha),
            FamilySpec::Journe => Ok(journe()),
            FamilySpec::JourneBeta { beta } => journe_beta(beta),
            FamilySpec::SubsetThrough { subset } => subset_through(subset),
            FamilySpec::DDilation { d } => d_dilation_set(d),
        }
    }

    /// The dilation factor the family is a wavelet set for.
    pub fn dilation_factor(&self) -> BigRational {
        match self {
            FamilySpec::DDilation { d } => d.clone(),
            _ => rat(2, 1),
        }
    }
}

/// The Shannon (Littlewood–Paley) set `[−2π, −π) ∪ [π, 2π)`.
pub fn shannon() -> IntervalSet {
    iv(pi(-2, 1), pi(-1, 1)).union(&iv(pi(1, 1), pi(2, 1)))
}

/// `E_α = [−2π + 2α, −π + α) ∪ [π + α, 2π + 2α)` for `−π < α < π`.
pub fn shannon_alpha(alpha: &ExactScalar) -> Result<IntervalSet> {
    if !(pi(-1, 1) < *alpha && *alpha < pi(1, 1)) {
        return Err(Error::OutOfRange(format!("alpha = {alpha} must lie in (-π, π)")));
    }
    let two_alpha = alpha.scale(&rat(2, 1));
    Ok(iv(&pi(-2, 1) + &two_alpha, &pi(-1, 1) + alpha)
        .union(&iv(&pi(1, 1) + alpha, &pi(2, 1) + &two_alpha)))
}

/// Journé's four-interval set
/// `[−32π/7, −4π) ∪ [−π, −4π/7) ∪ [4π/7, π) ∪ [4π, 32π/7)`.
pub fn journe() -> IntervalSet {
    IntervalSet::union_all(&[
        iv(pi(-32, 7), pi(-4, 1)),
        iv(pi(-1, 1), pi(-4, 7)),
        iv(pi(4, 7), pi(1, 1)),
        iv(pi(4, 1), pi(32, 7)),
    ])
}

/// The Journé path
/// `J_β = [−32π/7, −4π + 4β) ∪ [−π + β, −4π/7) ∪ [4π/7, π + β) ∪ [4π + 4β, 32π/7)`
/// for `−π/7 ≤ β ≤ π/7`. At the endpoints one interval degenerates and the
/// set has three parts.
pub fn journe_beta(beta: &ExactScalar) -> Result<IntervalSet> {
    if !(pi(-1, 7) <= *beta && *beta <= pi(1, 7)) {
        return Err(Error::OutOfRange(format!("beta = {beta} must lie in [-π/7, π/7]")));
    }
    let four_beta = beta.scale(&rat(4, 1));
    Ok(IntervalSet::union_all(&[
        iv(pi(-32, 7), &pi(-4, 1) + &four_beta),
        iv(&pi(-1, 1) + beta, pi(-4, 7)),
        iv(pi(4, 7), &pi(1, 1) + beta),
        iv(&pi(4, 1) + &four_beta, pi(32, 7)),
    ]))
}

/// A wavelet set `W` with `W ∩ [π, 3π/2) = A`, for any `A ⊆ [π, 3π/2)`:
/// `W = [3π/2, 2π) ∪ A ∪ ([2π, 3π) ∖ 2A) ∪ ([−π, −π/2) ∖ (A − 2π)) ∪ (2A − 4π)`.
pub fn subset_through(a: &IntervalSet) -> Result<IntervalSet> {
    let window = iv(pi(1, 1), pi(3, 2));
    if !a.is_subset_of(&window) {
        return Err(Error::OutOfRange(format!("{a} is not contained in [π, 3π/2)")));
    }
    let two_a = a.scale_positive(&rat(2, 1));
    let b = iv(pi(2, 1), pi(3, 1)).subtract(&two_a);
    let c = iv(pi(-1, 1), pi(-1, 2)).subtract(&a.translate(&pi(-2, 1)));
    let d = two_a.translate(&pi(-4, 1));
    Ok(IntervalSet::union_all(&[iv(pi(3, 2), pi(2, 1)), a.clone(), b, c, d]))
}

/// The non-dyadic wavelet set `G = A ∪ B ∪ C` for dilation factor `d ≥ 2`:
/// `A = [−2dπ/(d+1), −2π/(d+1))`, `B = [2π/(d²−1), 2π/(d+1))`,
/// `C = [2dπ/(d+1), 2d²π/(d²−1))`. For `d = 2` the middle piece is empty.
pub fn d_dilation_set(d: &BigRational) -> Result<IntervalSet> {
    if *d < rat(2, 1) {
        return Err(Error::OutOfRange(format!("dilation factor {d} must be ≥ 2")));
    }
    let one = BigRational::one();
    let dp1 = d + &one;
    let d2m1 = d * d - &one;
    let two_pi = |q: BigRational| ExactScalar::two_pi_times(&q);
    let a = iv(two_pi(-(d / &dp1)), two_pi(-(&one / &dp1)));
    let b = iv(two_pi(&one / &d2m1), two_pi(&one / &dp1));
    let c = iv(two_pi(d / &dp1), two_pi(d * d / &d2m1));
    Ok(IntervalSet::union_all(&[a, b, c]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::is_wavelet_set;
    use crate::interval::tests::set;

    fn dyadic() -> BigRational {
        rat(2, 1)
    }

    fn certified(e: &IntervalSet, d: &BigRational) -> bool {
        is_wavelet_set(e, d).map(|c| c.verify()).unwrap_or(false)
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon(), set("[-2pi,-pi)u[pi,2pi)"));
        assert_eq!(shannon().measure(), pi(2, 1));
        assert!(certified(&shannon(), &dyadic()));
    }

    #[test]
    fn shannon_alpha_examples() {
        assert_eq!(shannon_alpha(&ExactScalar::zero()).unwrap(), shannon());
        assert_eq!(
            shannon_alpha(&pi(-1, 2)).unwrap(),
            set("[-3pi,-3pi/2)u[pi/2,pi)")
        );
        assert!(certified(&shannon_alpha(&pi(1, 3)).unwrap(), &dyadic()));
        assert!(shannon_alpha(&pi(1, 1)).is_err());
        assert!(shannon_alpha(&pi(-1, 1)).is_err());
    }

    #[test]
    fn shannon_alpha_grid() {
        for k in -7..=7 {
            let e = shannon_alpha(&pi(k, 8)).unwrap();
            assert!(certified(&e, &dyadic()), "alpha = {k}π/8");
        }
    }

    #[test]
    fn journe_examples() {
        let j = journe();
        assert_eq!(j.parts().len(), 4);
        // 4π/7 + 3π/7 + 3π/7 + 4π/7
        assert_eq!(j.measure(), pi(14, 7));
        assert_eq!(journe_beta(&ExactScalar::zero()).unwrap(), j);
        assert!(certified(&j, &dyadic()));
    }

    #[test]
    fn journe_beta_grid() {
        for k in -4..=4 {
            let beta = pi(k, 28);
            let j = journe_beta(&beta).unwrap();
            assert_eq!(j.measure(), pi(2, 1), "beta = {beta}");
            assert!(certified(&j, &dyadic()), "beta = {beta}");
        }
        assert_eq!(journe_beta(&pi(1, 7)).unwrap().parts().len(), 3);
        assert_eq!(journe_beta(&pi(-1, 7)).unwrap().parts().len(), 3);
        assert!(journe_beta(&pi(2, 7)).is_err());
    }

    #[test]
    fn journe_beta_symmetric_difference_is_linear() {
        // the four moving endpoints travel at speeds 4, 1, 1, 4
        for (k1, k2) in [(-4, 4), (-1, 3), (0, 2), (2, 3), (-4, -3)] {
            let (b1, b2) = (pi(k1, 28), pi(k2, 28));
            let delta = journe_beta(&b1)
                .unwrap()
                .symmetric_difference(&journe_beta(&b2).unwrap())
                .measure();
            assert_eq!(delta, (&b2 - &b1).abs().scale(&rat(10, 1)));
        }
    }

    #[test]
    fn subset_through_examples() {
        let w = subset_through(&IntervalSet::empty()).unwrap();
        assert_eq!(w, set("[3pi/2,2pi)u[2pi,3pi)u[-pi,-pi/2)"));
        assert!(certified(&w, &dyadic()));

        let w = subset_through(&set("[pi,3pi/2)")).unwrap();
        assert_eq!(w, shannon());

        let a = set("[pi,5pi/4)");
        let w = subset_through(&a).unwrap();
        assert_eq!(w.intersect(&set("[pi,3pi/2)")), a);
        assert!(certified(&w, &dyadic()));

        assert!(subset_through(&set("[pi,2pi)")).is_err());
    }

    #[test]
    fn subset_through_grid() {
        let subsets = [
            "[pi,9pi/8)",
            "[9pi/8,5pi/4)",
            "[pi,17pi/16)u[5pi/4,11pi/8)",
            "[21pi/16,3pi/2)",
            "[4,4.5)",
            "[pi,3.5)u[4.25,4.5)",
            "[7pi/6,4pi/3)",
            "[pi+1/10,pi+1/5)",
        ];
        for src in subsets {
            let a = set(src);
            let w = subset_through(&a).unwrap();
            assert_eq!(w.intersect(&set("[pi,3pi/2)")), a, "{src}");
            assert!(certified(&w, &dyadic()), "{src}");
        }
    }

    #[test]
    fn d_dilation_examples() {
        let g3 = d_dilation_set(&rat(3, 1)).unwrap();
        assert_eq!(g3, set("[-3pi/2,-pi/2)u[pi/4,pi/2)u[3pi/2,9pi/4)"));
        // {A + 2π, B, C} tiles [π/4, 9π/4)
        let a = set("[-3pi/2,-pi/2)").translate(&pi(2, 1));
        let tiled = a.union(&set("[pi/4,pi/2)")).union(&set("[3pi/2,9pi/4)"));
        assert_eq!(tiled, set("[pi/4,9pi/4)"));

        let g2 = d_dilation_set(&rat(2, 1)).unwrap();
        assert_eq!(g2, set("[-4pi/3,-2pi/3)u[4pi/3,8pi/3)"));

        for d in [rat(2, 1), rat(3, 1), rat(5, 2)] {
            assert_eq!(d_dilation_set(&d).unwrap().measure(), pi(2, 1));
        }
        assert!(d_dilation_set(&rat(3, 2)).is_err());
    }

    #[test]
    fn d_dilation_grid() {
        for (n, den) in [(2, 1), (5, 2), (3, 1), (7, 2), (4, 1), (9, 2), (5, 1), (17, 3)] {
            let d = rat(n, den);
            let g = d_dilation_set(&d).unwrap();
            let cert = is_wavelet_set(&g, &d).unwrap();
            assert!(cert.verify());
            assert_eq!(cert.dilation_factor, d);
        }
    }

    #[test]
    fn family_spec_round_trip() {
        let spec = FamilySpec::JourneBeta { beta: pi(1, 14) };
        let json = serde_json::to_string(&spec).unwrap();
        let back: FamilySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.build().unwrap(), journe_beta(&pi(1, 14)).unwrap());
        assert_eq!(FamilySpec::DDilation { d: rat(3, 1) }.dilation_factor(), rat(3, 1));
    }
}
