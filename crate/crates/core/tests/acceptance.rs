//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, followed by
//! the measured quantities. The process exits non-zero if any criterion
//! fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use waveset::coefficient::{conjugate_by_sigma, periodicity_recheck, Coefficient, CoefficientFamily, PeriodicMultiplier};
use waveset::congruence::{certify, is_wavelet_set};
use waveset::cyclotomic::Cyclotomic;
use waveset::families::{d_dilation_set, journe, journe_beta, shannon, shannon_alpha, subset_through};
use waveset::interpolation::{build_sigma, classify, InterpolationMap, DEFAULT_TORSION_BOUND};
use waveset::spectral::{
    gram_check, inner_product, local_commutant_check, msf_wavelet, riesz_combination_check, ModulatedPiecewise, Term,
};
use waveset::{rat, ExactScalar, Interval, IntervalSet};

struct Outcome {
    pass: bool,
    detail: String,
}

fn pi(n: i64, d: i64) -> ExactScalar {
    ExactScalar::pi_frac(n, d)
}

fn two() -> BigRational {
    rat(2, 1)
}

fn iv(lo: ExactScalar, hi: ExactScalar) -> Interval {
    Interval::new(lo, hi).expect("nonempty interval")
}

fn the_journe_pair() -> (IntervalSet, IntervalSet) {
    (journe_beta(&pi(-1, 7)).unwrap(), journe_beta(&pi(1, 7)).unwrap())
}

fn sigma_corpus() -> Vec<(&'static str, InterpolationMap)> {
    let e0 = shannon();
    vec![
        ("E0->Journe", build_sigma(&e0, &journe(), &two()).unwrap()),
        (
            "J(-pi/14)->J(pi/14)",
            build_sigma(&journe_beta(&pi(-1, 14)).unwrap(), &journe_beta(&pi(1, 14)).unwrap(), &two()).unwrap(),
        ),
        ("E0->E(pi/3)", build_sigma(&e0, &shannon_alpha(&pi(1, 3)).unwrap(), &two()).unwrap()),
    ]
}

/// Sorted distinct multiples of π/`den` strictly inside `(lo, hi)`, in units of π/den.
fn random_cuts(rng: &mut ChaCha8Rng, lo: i64, hi: i64, count: usize) -> Vec<i64> {
    let mut cuts: Vec<i64> = (0..count).map(|_| rng.gen_range(lo + 1..hi)).collect();
    cuts.sort();
    cuts.dedup();
    cuts
}

/// A random partition of the fundamental domain `[−2π, −π) ∪ [π, 2π)` into
/// intervals with endpoints in `(π/24)ℤ`.
fn random_partition(rng: &mut ChaCha8Rng) -> Vec<Interval> {
    let den = 24;
    let mut out = Vec::new();
    for (lo, hi) in [(-2 * den, -den), (den, 2 * den)] {
        let mut pts = vec![lo];
        let count = rng.gen_range(0..4);
        pts.extend(random_cuts(rng, lo, hi, count));
        pts.push(hi);
        for w in pts.windows(2) {
            out.push(iv(pi(w[0], den), pi(w[1], den)));
        }
    }
    out
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=7))
}

/// Random finite union of intervals bounded away from 0 (0 may sit in a gap).
fn random_set(rng: &mut ChaCha8Rng) -> IntervalSet {
    let parts = (0..rng.gen_range(1..5))
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let a = rng.gen_range(1..60);
            let len = rng.gen_range(1..40);
            let (lo, hi) = if rng.gen_bool(0.5) {
                (pi(a, 8), pi(a + len, 8))
            } else {
                (
                    ExactScalar::rational(rat(a, 5)),
                    ExactScalar::rational(rat(a + len, 5)),
                )
            };
            if sign > 0 {
                iv(lo, hi)
            } else {
                iv(-hi, -lo)
            }
        })
        .collect();
    IntervalSet::from_parts(parts)
}

fn criterion_1() -> Outcome {
    let d = two();
    let mut notes = Vec::new();
    let mut pass = true;
    let mut check = |name: String, set: &IntervalSet, factor: &BigRational| {
        if certify(set, factor).is_err() {
            pass = false;
            notes.push(format!("rejected {name}"));
        }
    };
    check("Shannon".into(), &shannon(), &d);
    let mut count = 1;
    for j in 0..16 {
        let alpha = pi(2 * j - 15, 16);
        check(format!("E_alpha({alpha})"), &shannon_alpha(&alpha).unwrap(), &d);
        count += 1;
    }
    for j in 0..8 {
        let beta = pi(2 * j - 7, 49);
        check(format!("J_beta({beta})"), &journe_beta(&beta).unwrap(), &d);
        count += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        // A ⊆ [π, 3π/2), endpoints in (π/48)ℤ
        let cuts = rng.gen_range(2..7);
        let mut pts = random_cuts(&mut rng, 48, 72, cuts);
        if pts.len() % 2 == 1 {
            pts.pop();
        }
        let a = IntervalSet::from_parts(pts.chunks(2).map(|w| iv(pi(w[0], 48), pi(w[1], 48))).collect());
        check(format!("subset_through({a})"), &subset_through(&a).unwrap(), &d);
        count += 1;
    }
    for factor in [rat(2, 1), rat(5, 2), rat(3, 1), rat(4, 1)] {
        check(format!("d_dilation({factor})"), &d_dilation_set(&factor).unwrap(), &factor);
        count += 1;
    }
    // Journé witness shifts
    let cert = certify(&journe(), &d).unwrap();
    let mut shifts: Vec<BigInt> = cert.translation.pieces.iter().map(|p| p.shift_multiple.clone()).collect();
    shifts.sort();
    shifts.dedup();
    let want: Vec<BigInt> = [-2, 0, 1, 3].into_iter().map(BigInt::from).collect();
    if shifts != want {
        pass = false;
        notes.push(format!("Journé shifts {shifts:?}"));
    }
    count += 1;
    // Hardy set: translation side fine, dilation side fails
    let hardy: IntervalSet = "[2pi,4pi)".parse().unwrap();
    match is_wavelet_set(&hardy, &d) {
        Err(f) if f.translation.is_none() && f.dilation.is_some() => {}
        other => {
            pass = false;
            notes.push(format!("Hardy set verdict {other:?}"));
        }
    }
    count += 1;
    Outcome {
        pass,
        detail: format!("{count} exact verdicts{}", fmt_notes(&notes)),
    }
}

fn fmt_notes(notes: &[String]) -> String {
    if notes.is_empty() {
        String::new()
    } else {
        format!("; {}", notes.join("; "))
    }
}

fn criterion_2() -> Outcome {
    let betas: Vec<ExactScalar> = [-2, -1, 0, 1, 2].iter().map(|&k| pi(k, 14)).collect();
    let mut ok = 0;
    let mut notes = Vec::new();
    for i in 0..betas.len() {
        for j in i + 1..betas.len() {
            let e = journe_beta(&betas[i]).unwrap();
            let f = journe_beta(&betas[j]).unwrap();
            let c = classify(&build_sigma(&e, &f, &two()).unwrap(), DEFAULT_TORSION_BOUND).unwrap();
            if c.is_involution && c.congruence_powers_ok {
                ok += 1;
            } else {
                notes.push(format!("({}, {}) -> {c:?}", betas[i], betas[j]));
            }
        }
    }
    Outcome {
        pass: ok == 10,
        detail: format!("{ok}/10 pairs are involutions with 2pi-congruent powers{}", fmt_notes(&notes)),
    }
}

fn criterion_3() -> Outcome {
    let pairs = [
        (shannon(), journe()),
        (journe_beta(&pi(-1, 14)).unwrap(), journe_beta(&pi(1, 14)).unwrap()),
        (shannon(), shannon_alpha(&pi(1, 3)).unwrap()),
    ];
    let mut worst = 0.0f64;
    for (e, f) in &pairs {
        for n in -2..=2 {
            for l in -4..=4 {
                worst = worst.max(local_commutant_check(e, f, n, l).unwrap());
            }
        }
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("max deviation {worst:.3e} over 3 pairs x 45 (n,l) (tol 1e-10)"),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let corpus = sigma_corpus();
    let inverses: Vec<_> = corpus.iter().map(|(_, s)| s.inverse().unwrap()).collect();
    let mut ok = 0;
    let mut total = 0;
    for _ in 0..20 {
        let pieces = random_partition(&mut rng)
            .into_iter()
            .map(|cell| {
                let v = Coefficient::rational(random_rational(&mut rng), random_rational(&mut rng));
                (IntervalSet::from(cell), v)
            })
            .collect();
        let h = PeriodicMultiplier::extend(&two(), pieces).unwrap();
        for ((_, sigma), inv) in corpus.iter().zip(&inverses) {
            total += 1;
            if let Ok(g) = conjugate_by_sigma(&h, sigma) {
                if g.is_exact() && periodicity_recheck(&h, inv, &g).unwrap_or(false) {
                    ok += 1;
                }
            }
        }
    }
    Outcome {
        pass: ok == total,
        detail: format!("{ok}/{total} conjugated multipliers pass the exact periodicity re-check"),
    }
}

fn criterion_5() -> Outcome {
    let (e, f) = the_journe_pair();
    let sigma = build_sigma(&e, &f, &two()).unwrap();
    let constant = |c: Cyclotomic| PeriodicMultiplier::constant(&two(), Coefficient::Exact(c)).unwrap();
    let mut notes = Vec::new();
    let mut worst = 0.0f64;
    let mut unitary_ok = 0;
    for q in [rat(0, 1), rat(1, 6), rat(1, 4), rat(1, 3), rat(1, 2)] {
        let h = vec![constant(Cyclotomic::cos_pi(q.clone())), constant(Cyclotomic::i_sin_pi(q.clone()))];
        let fam = CoefficientFamily::new(sigma.clone(), h, DEFAULT_TORSION_BOUND).unwrap();
        let report = fam.is_unitary_ae().unwrap();
        if report.unitary && report.exact {
            unitary_ok += 1;
        } else {
            notes.push(format!("alpha = {q}pi not unitary"));
        }
        let psi = fam.synthesize(true).unwrap();
        worst = worst.max(gram_check(&psi, 3, 8, false).unwrap().max_deviation());
    }
    let ones = vec![constant(Cyclotomic::one()), constant(Cyclotomic::one())];
    let fam = CoefficientFamily::new(sigma, ones, DEFAULT_TORSION_BOUND).unwrap();
    let ones_rejected = !fam.is_unitary_ae().unwrap().unitary;
    let norm_sqr = fam.synthesize(true).unwrap().norm_sqr();
    let norm_ok = (norm_sqr - 2.0).abs() <= 1e-10;
    if !ones_rejected {
        notes.push("(1,1) family accepted".into());
    }
    if !norm_ok {
        notes.push(format!(
            "(1,1) forced synthesis has ||psi||^2 = {norm_sqr:.12} = 2 + |E∩F|/pi, not 2 +- 1e-10"
        ));
    }
    Outcome {
        pass: unitary_ok == 5 && worst < 1e-8 && ones_rejected && norm_ok,
        detail: format!(
            "{unitary_ok}/5 (cos a, i sin a) families unitary, max Gram deviation {worst:.3e} (tol 1e-8); (1,1) rejected: {ones_rejected}{}",
            fmt_notes(&notes)
        ),
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let corpus = sigma_corpus();
    let mut ok = 0;
    let mut total = 0;
    for _ in 0..100 {
        let omega = random_set(&mut rng);
        for (_, sigma) in &corpus {
            total += 1;
            if sigma.apply_to_set(&omega).map(|img| img.measure() == omega.measure()).unwrap_or(false) {
                ok += 1;
            }
        }
    }
    Outcome {
        pass: ok == total,
        detail: format!("{ok}/{total} images have exactly the measure of the original"),
    }
}

fn criterion_7() -> Outcome {
    let (e, f) = the_journe_pair();
    let half = riesz_combination_check(&e, &f, Complex64::new(0.5, 0.0), 3, 16).unwrap();
    let one = riesz_combination_check(&e, &f, Complex64::new(1.0, 0.0), 3, 16).unwrap();
    let pass = (0.24..=0.26).contains(&half.min_eig) && (2.24..=2.26).contains(&half.max_eig) && one.min_eig < 0.05;
    Outcome {
        pass,
        detail: format!(
            "lambda=1/2: eig in [{:.6}, {:.6}]; lambda=1: min eig {:.3e} ({}x{} Gram)",
            half.min_eig, half.max_eig, one.min_eig, half.size, half.size
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let e0 = shannon();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let phases = random_partition(&mut rng)
            .into_iter()
            .map(|cell| (IntervalSet::from(cell), rng.gen_range(-PI..PI)))
            .collect();
        let h = PeriodicMultiplier::from_phases(&two(), phases).unwrap();
        let psi = h.multiply(&msf_wavelet(&e0)).unwrap();
        worst = worst.max(gram_check(&psi, 3, 8, false).unwrap().max_deviation());
    }
    Outcome {
        pass: worst < 1e-8,
        detail: format!("max Gram deviation {worst:.3e} over 10 random phases (tol 1e-8)"),
    }
}

/// Float view of a function for the quadrature oracle.
struct Samples(Vec<(Complex64, f64, f64, f64)>);

impl Samples {
    fn new(f: &ModulatedPiecewise) -> Self {
        use num_traits::ToPrimitive;
        Samples(
            f.terms()
                .iter()
                .map(|t| (t.coeff, t.freq.to_f64().unwrap(), t.support.lo().to_f64(), t.support.hi().to_f64()))
                .collect(),
        )
    }

    fn at(&self, s: f64) -> Complex64 {
        self.0
            .iter()
            .filter(|(_, _, a, b)| *a <= s && s < *b)
            .map(|(c, w, _, _)| c * Complex64::from_polar(1.0, w * s))
            .sum()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.0.iter().flat_map(|(_, _, a, b)| [*a, *b]).collect()
    }
}

fn adaptive_simpson<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> Complex64 {
    fn step<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `∫ f·ḡ` by adaptive quadrature on each smooth segment.
fn quadrature_inner(f: &ModulatedPiecewise, g: &ModulatedPiecewise) -> Complex64 {
    let (fs, gs) = (Samples::new(f), Samples::new(g));
    let mut cuts = fs.breakpoints();
    cuts.extend(gs.breakpoints());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            // the integrand is smooth on [a, b); the right end is taken as a limit
            let (a, b) = (w[0], w[1]);
            let inner_end = b - (b - a) * 1e-13;
            let inside = |s: f64| {
                let s = s.min(inner_end);
                fs.at(s) * gs.at(s).conj()
            };
            adaptive_simpson(&inside, a, b, 1e-13)
        })
        .sum()
}

fn random_function(rng: &mut ChaCha8Rng) -> ModulatedPiecewise {
    if rng.gen_bool(0.5) {
        let sets = [shannon(), journe(), journe_beta(&pi(1, 14)).unwrap(), shannon_alpha(&pi(-1, 4)).unwrap()];
        let base = msf_wavelet(&sets[rng.gen_range(0..sets.len())]);
        base.apply_dn_tl(rng.gen_range(-2..=2), rng.gen_range(-6..=6))
    } else {
        let mut f = ModulatedPiecewise::zero();
        for _ in 0..rng.gen_range(1..5) {
            let lo = rng.gen_range(-24..20);
            let len = rng.gen_range(1..12);
            f.push(Term {
                coeff: Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                freq: rat(rng.gen_range(-12..=12), rng.gen_range(1..=4)),
                support: iv(pi(lo, 4), pi(lo + len, 4)),
            });
        }
        f
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let mut largest = 0.0f64;
    let mut nonzero = 0;
    for _ in 0..50 {
        let f = random_function(&mut rng);
        let g = random_function(&mut rng);
        let closed = inner_product(&f, &g);
        largest = largest.max(closed.norm());
        if closed.norm() > 1e-6 {
            nonzero += 1;
        }
        worst = worst.max((closed - quadrature_inner(&f, &g)).norm());
    }
    Outcome {
        pass: worst < 1e-8,
        detail: format!(
            "max |closed form - quadrature| = {worst:.3e} over 50 pairs, {nonzero} with |<f,g>| > 1e-6, largest {largest:.3} (tol 1e-8)"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("criterion soundness on classical examples", criterion_1),
        ("Journé pairs are interpolation pairs", criterion_2),
        ("local commutant identity", criterion_3),
        ("conjugated multipliers stay dilation periodic", criterion_4),
        ("coefficient criterion soundness", criterion_5),
        ("measure preservation", criterion_6),
        ("Riesz combination bounds", criterion_7),
        ("phase attainability", criterion_8),
        ("closed-form inner products vs quadrature", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "acceptance {} [{verdict}] {name}: {} ({:.2}s)",
            i + 1,
            out.detail,
            start.elapsed().as_secs_f64()
        );
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
