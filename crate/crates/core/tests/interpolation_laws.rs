use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use waveset::families::{journe, journe_beta, shannon, shannon_alpha, subset_through};
use waveset::interpolation::{build_sigma, classify, InterpolationMap};
use waveset::{rat, ExactScalar, Interval, IntervalSet};

fn pi(n: i64, d: i64) -> ExactScalar {
    ExactScalar::pi_frac(n, d)
}

fn corpus() -> Vec<IntervalSet> {
    let a: IntervalSet = "[9pi/8,5pi/4)".parse().unwrap();
    vec![
        shannon(),
        journe(),
        journe_beta(&pi(-1, 7)).unwrap(),
        journe_beta(&pi(1, 14)).unwrap(),
        shannon_alpha(&pi(1, 3)).unwrap(),
        shannon_alpha(&pi(-1, 2)).unwrap(),
        subset_through(&a).unwrap(),
    ]
}

fn random_point(rng: &mut ChaCha8Rng) -> ExactScalar {
    loop {
        let x = if rng.gen_bool(0.5) {
            pi(rng.gen_range(-4000..4000), rng.gen_range(1..200))
        } else {
            ExactScalar::rational(rat(rng.gen_range(-4000..4000), rng.gen_range(1..200)))
        };
        if !x.is_zero() {
            return x;
        }
    }
}

fn random_set(rng: &mut ChaCha8Rng) -> IntervalSet {
    let parts = (0..rng.gen_range(1..6))
        .map(|_| {
            let a = rng.gen_range(1..80);
            let len = rng.gen_range(1..50);
            let (lo, hi) = (pi(a, 7), pi(a + len, 7));
            if rng.gen_bool(0.5) {
                Interval::new(lo, hi).unwrap()
            } else {
                Interval::new(-hi, -lo).unwrap()
            }
        })
        .collect();
    IntervalSet::from_parts(parts)
}

#[test]
fn maps_between_corpus_sets_carry_source_to_target() {
    let sets = corpus();
    for e in &sets {
        for f in &sets {
            let s = build_sigma(e, f, &rat(2, 1)).unwrap();
            assert_eq!(s.apply_to_set(e).unwrap(), *f);
        }
    }
}

#[test]
fn measure_is_preserved_on_random_sets() {
    let sets = corpus();
    let maps = [
        build_sigma(&sets[0], &sets[1], &rat(2, 1)).unwrap(),
        build_sigma(&sets[2], &sets[3], &rat(2, 1)).unwrap(),
        build_sigma(&sets[4], &sets[6], &rat(2, 1)).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let omega = random_set(&mut rng);
        for s in &maps {
            assert_eq!(s.apply_to_set(&omega).unwrap().measure(), omega.measure(), "{omega}");
        }
    }
}

#[test]
fn composition_is_associative_and_inverses_are_two_sided() {
    let sets = corpus();
    let d = rat(2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..6 {
        let pick = |rng: &mut ChaCha8Rng| sets[rng.gen_range(0..sets.len())].clone();
        let (a, b, c, e) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let ab = build_sigma(&a, &b, &d).unwrap();
        let bc = build_sigma(&b, &c, &d).unwrap();
        let ce = build_sigma(&c, &e, &d).unwrap();
        let left = ce.compose(&bc.compose(&ab).unwrap()).unwrap();
        let right = ce.compose(&bc).unwrap().compose(&ab).unwrap();
        assert_eq!(left, right);
        assert_eq!(left, build_sigma(&a, &e, &d).unwrap());
        let inv = ab.inverse().unwrap();
        assert!(ab.compose(&inv).unwrap().is_identity());
        assert!(inv.compose(&ab).unwrap().is_identity());
    }
}

#[test]
fn evaluation_is_homogeneous_and_invertible() {
    let sets = corpus();
    let d = rat(2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let s = build_sigma(&sets[1], &sets[5], &d).unwrap();
    let inv = s.inverse().unwrap();
    for _ in 0..300 {
        let x = random_point(&mut rng);
        let y = s.evaluate(&x).unwrap();
        assert_eq!(s.evaluate(&x.scale(&d)).unwrap(), y.scale(&d));
        assert_eq!(s.evaluate(&x.scale(&rat(1, 8))).unwrap(), y.scale(&rat(1, 8)));
        assert_eq!(inv.evaluate(&y).unwrap(), x);
        // the move is a multiple of 2π scaled by the ring
        let moved = (&y - &x).ratio(&ExactScalar::pi()).unwrap();
        assert!(moved.denom().bits() <= 64);
    }
    assert!(s.evaluate(&ExactScalar::zero()).unwrap().is_zero());
}

#[test]
fn base_piece_involution_check_matches_random_points() {
    let sets = corpus();
    let d = rat(2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let pairs = [(2usize, 3usize), (0, 1), (0, 4), (4, 5), (0, 6)];
    let mut seen = [false, false];
    for (i, j) in pairs {
        let s = build_sigma(&sets[i], &sets[j], &d).unwrap();
        let verdict = classify(&s, 12).unwrap().is_involution;
        let pointwise = (0..1000).all(|_| {
            let x = random_point(&mut rng);
            s.evaluate(&s.evaluate(&x).unwrap()).unwrap() == x
        });
        assert_eq!(verdict, pointwise, "pair ({i}, {j})");
        seen[verdict as usize] = true;
    }
    assert!(seen[0] && seen[1], "corpus should contain both kinds of maps");
}

#[test]
fn torsion_free_maps_report_no_order() {
    let d = rat(2, 1);
    let s = build_sigma(&shannon(), &journe(), &d).unwrap();
    let c = classify(&s, 3).unwrap();
    if let Some(k) = c.torsion_order {
        assert!(s.power(k).unwrap().is_identity());
    } else {
        for n in 1..=3 {
            assert!(!s.power(n).unwrap().is_identity());
        }
    }
    let id = InterpolationMap::identity(&journe(), &d).unwrap();
    assert_eq!(classify(&id, 1).unwrap().torsion_order, Some(1));
}
