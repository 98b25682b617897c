//! Runners shared by the property and acceptance suites. Each checks one
//! family of randomized or exhaustive assertions and panics with context on
//! the first violation.

#![allow(dead_code)]

use gasket::apollonian::{generator, generator_det_abs, Letter, Subsystem, Word};
use gasket::distortion::empirical_word_distortion;
use gasket::moebius::{compose, extrema_with_det, Disk};
use gasket::pressure::{
    dim_bracket, partition_bounds, DimBracket, DomainMode, EnumerationBudget, EnumerationMode,
};
use gasket::{RigorousComplex, RigorousScalar};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite sample")
}

fn assert_contains_exact(iv: RigorousScalar, exact: &BigRational, what: &str) {
    assert!(
        &rat(iv.lower) <= exact && exact <= &rat(iv.upper),
        "{what}: [{:.17}, {:.17}] misses the exact value",
        iv.lower,
        iv.upper
    );
}

/// Interval arithmetic against exact rational arithmetic: every add, sub,
/// mul, div, square, square root, and complex product over random f64
/// inputs must enclose the exact result.
pub fn check_enclosure_soundness(trials: u32, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let a = rng.random_range(-8.0..8.0_f64);
        let b = rng.random_range(-8.0..8.0_f64);
        let ia = RigorousScalar::point(a);
        let ib = RigorousScalar::point(b);
        let (ra, rb) = (rat(a), rat(b));

        assert_contains_exact(ia + ib, &(&ra + &rb), "sum");
        assert_contains_exact(ia - ib, &(&ra - &rb), "difference");
        assert_contains_exact(ia * ib, &(&ra * &rb), "product");
        if b.abs() > 1e-3 {
            assert_contains_exact(ia / ib, &(&ra / &rb), "quotient");
        }
        assert_contains_exact(ia.sqr(), &(&ra * &ra), "square");

        let x = a.abs();
        let s = RigorousScalar::point(x).sqrt();
        let rx = rat(x);
        assert!(s.lower >= 0.0, "sqrt lower sign at trial {trial}");
        assert!(
            rat(s.lower) * rat(s.lower) <= rx && rx <= rat(s.upper) * rat(s.upper),
            "sqrt fails at trial {trial}: x = {x:.17}"
        );

        let c = rng.random_range(-4.0..4.0_f64);
        let d = rng.random_range(-4.0..4.0_f64);
        let z1 = RigorousComplex::point(a, b);
        let z2 = RigorousComplex::point(c, d);
        let prod = z1 * z2;
        let (rc, rd) = (rat(c), rat(d));
        assert_contains_exact(prod.re, &(&ra * &rc - &rb * &rd), "complex re");
        assert_contains_exact(prod.im, &(&ra * &rd + &rb * &rc), "complex im");
    }
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize, min_n: u32, max_n: u32) -> Word {
    let len = rng.random_range(1..=max_len);
    Word::new(
        (0..len)
            .map(|_| Letter::new(rng.random_range(1..=6), rng.random_range(min_n..=max_n)))
            .collect(),
    )
}

/// Measured sup/inf derivative ratios over random words stay within the
/// published distortion caps: the universal one for arbitrary letters, the
/// improved one when every letter has index ≥ 3.
pub fn check_word_distortion_caps(words: u32, max_len: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..words {
        let word = random_word(&mut rng, max_len, 1, 30);
        let ratio = empirical_word_distortion(&word).unwrap();
        assert!(ratio.upper >= 1.0 - 1e-12);
        assert!(
            ratio.lower <= 5.900319 + 1e-6,
            "universal cap broken by {word:?}: {:.7}",
            ratio.lower
        );
    }
    for _ in 0..words {
        let word = random_word(&mut rng, max_len, 3, 30);
        let ratio = empirical_word_distortion(&word).unwrap();
        assert!(
            ratio.lower <= 4.3655 + 1e-6,
            "deep-letter cap broken by {word:?}: {:.7}",
            ratio.lower
        );
    }
}

/// Depth-2 partition sums multiply against depth-1 sums from both sides:
/// Σ sup is submultiplicative, Σ inf supermultiplicative.
pub fn check_z_multiplicativity(systems: u32, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = EnumerationBudget {
        max_words: 1_000_000,
        max_depth: 8,
        mode: EnumerationMode::Certified,
    };
    for _ in 0..systems {
        let size = rng.random_range(1..=4usize);
        let mut members: Vec<u32> = (0..size).map(|_| rng.random_range(1..=10)).collect();
        members.sort_unstable();
        members.dedup();
        let f = Subsystem::FiniteSet(members.clone());
        let t = RigorousScalar::point(rng.random_range(0.55..1.4));
        let b1 = partition_bounds(&f, 1, t, DomainMode::WholeDisk, &budget).unwrap();
        let b2 = partition_bounds(&f, 2, t, DomainMode::WholeDisk, &budget).unwrap();
        let square_max = b1.z_max * b1.z_max;
        let square_min = b1.z_min * b1.z_min;
        assert!(
            b2.z_max.lower <= square_max.upper * (1.0 + 1e-9),
            "sup sums fail to submultiply for {members:?} at t = {:.4}",
            t.midpoint()
        );
        assert!(
            b2.z_min.upper >= square_min.lower * (1.0 - 1e-9),
            "inf sums fail to supermultiply for {members:?} at t = {:.4}",
            t.midpoint()
        );
    }
}

/// Certified brackets for the singleton {5} at increasing depth: each stays
/// valid, nests into its predecessor up to bisection slack, and the deepest
/// still contains the reference value 0.4581.
pub fn check_bracket_nesting(max_depth: u32) -> Vec<DimBracket> {
    let f: Subsystem = "n in {5}".parse().unwrap();
    let slack = 2.5e-3;
    let mut brackets: Vec<DimBracket> = Vec::new();
    for q in 2..=max_depth {
        let budget = EnumerationBudget {
            max_words: 6u64.pow(q),
            max_depth: q,
            mode: EnumerationMode::Certified,
        };
        let bracket = dim_bracket(&f, &budget).unwrap();
        assert_eq!(bracket.depth_upper, q);
        assert!(bracket.certified);
        assert!(bracket.lower <= bracket.upper);
        if let Some(prev) = brackets.last() {
            assert!(
                bracket.lower >= prev.lower - slack,
                "lower endpoint retreats at depth {q}"
            );
            assert!(
                bracket.upper <= prev.upper + slack,
                "upper endpoint grows at depth {q}"
            );
        }
        brackets.push(bracket);
    }
    let last = brackets.last().unwrap();
    assert!(last.lower <= 0.4581 && 0.4581 <= last.upper);
    brackets
}

/// partition_bounds against an independent exhaustive path for {5}: words
/// enumerated in the reverse order and composed with the opposite
/// association must give intersecting sums at every depth.
pub fn check_oracle_equivalence(max_depth: u32) {
    let f: Subsystem = "n in {5}".parse().unwrap();
    let t = RigorousScalar::point(0.7);
    let budget = EnumerationBudget {
        max_words: 1_000_000,
        max_depth: 8,
        mode: EnumerationMode::Certified,
    };
    let letters: Vec<Letter> = (1..=6).map(|k| Letter::new(k, 5)).collect();
    for depth in 1..=max_depth {
        let b = partition_bounds(&f, depth, t, DomainMode::WholeDisk, &budget).unwrap();

        let mut words: Vec<Vec<Letter>> = letters.iter().map(|&l| vec![l]).collect();
        for _ in 1..depth {
            words = words
                .into_iter()
                .flat_map(|w| {
                    letters.iter().map(move |&l| {
                        let mut next = w.clone();
                        next.push(l);
                        next
                    })
                })
                .collect();
        }
        words.reverse();

        let mut z_max = RigorousScalar::point(0.0);
        let mut z_min = RigorousScalar::point(0.0);
        for word in &words {
            let mut m = generator(*word.last().unwrap());
            let mut det = generator_det_abs(word.last().unwrap().n);
            for &letter in word.iter().rev().skip(1) {
                m = compose(&generator(letter), &m);
                det = det * generator_det_abs(letter.n);
            }
            let (inf, sup) = extrema_with_det(&m, &Disk::unit(), det).unwrap();
            z_max = z_max + sup.pow(t);
            z_min = z_min + inf.pow(t);
        }
        let rel = 1.0 + 1e-9;
        assert!(
            b.z_max.lower <= z_max.upper * rel && z_max.lower <= b.z_max.upper * rel,
            "sup sums diverge from oracle at depth {depth}"
        );
        assert!(
            b.z_min.lower <= z_min.upper * rel && z_min.lower <= b.z_min.upper * rel,
            "inf sums diverge from oracle at depth {depth}"
        );
    }
}
