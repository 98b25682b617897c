//! Randomized properties: enclosure soundness against exact rationals,
//! algebraic laws of the map layer, distortion caps over random words, and
//! multiplicativity of the partition sums.

mod common;

use gasket::apollonian::{generator, natural_order_less, Letter, Subsystem, Word};
use gasket::complex::RigorousComplex;
use gasket::moebius::{circle_through, compose, map_disk, proportional, Disk, MoebiusMap};
use gasket::RigorousScalar;
use proptest::prelude::*;

#[test]
fn interval_arithmetic_encloses_exact_rationals() {
    common::check_enclosure_soundness(100_000, 0x736f756e64);
}

#[test]
fn random_word_distortion_respects_published_caps() {
    common::check_word_distortion_caps(10_000, 6, 0x77726473);
}

#[test]
fn partition_sums_multiply_for_random_subsystems() {
    common::check_z_multiplicativity(25, 0x7375626d);
}

#[test]
fn singleton_brackets_nest_through_depth_five() {
    common::check_bracket_nesting(5);
}

#[test]
fn partition_sums_match_exhaustive_oracle() {
    common::check_oracle_equivalence(3);
}

// --- structural laws ---------------------------------------------------------

fn letter_strategy() -> impl Strategy<Value = Letter> {
    (1..=6u32, 1..=40u32).prop_map(|(k, n)| Letter::new(k, n))
}

fn word_strategy(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter_strategy(), 1..=max_len).prop_map(Word::new)
}

proptest! {
    #[test]
    fn composition_is_associative(
        a in word_strategy(2),
        b in word_strategy(2),
        c in word_strategy(2),
    ) {
        let to_map = |w: &Word| {
            w.letters()[1..].iter().fold(generator(w.letters()[0]), |acc, &l| {
                compose(&acc, &generator(l))
            })
        };
        let (ma, mb, mc) = (to_map(&a), to_map(&b), to_map(&c));
        let left = compose(&compose(&ma, &mb), &mc);
        let right = compose(&ma, &compose(&mb, &mc));
        prop_assert!(proportional(&left, &right));
    }

    #[test]
    fn mapped_boundary_points_stay_inside_image_disk(
        word in word_strategy(4),
        angle in 0.0..std::f64::consts::TAU,
    ) {
        let m = word.letters()[1..].iter().fold(generator(word.letters()[0]), |acc, &l| {
            compose(&acc, &generator(l))
        });
        let image = map_disk(&m, &Disk::unit()).unwrap();
        let z = RigorousComplex::point(angle.cos(), angle.sin());
        let gap = (m.apply(z) - image.center).abs() - image.radius;
        prop_assert!(gap.lower <= 1e-9, "point escapes image disk by {}", gap.lower);
    }

    #[test]
    fn rotations_never_change_derivative_extrema(
        word in word_strategy(3),
        third in 0..3u32,
    ) {
        let m = word.letters()[1..].iter().fold(generator(word.letters()[0]), |acc, &l| {
            compose(&acc, &generator(l))
        });
        let w = gasket::complex::third_root_of_unity(third);
        let rotated = compose(&MoebiusMap::rotation(w), &m);
        let (inf0, sup0) = gasket::moebius::deriv_extrema_on_disk(&m, &Disk::unit()).unwrap();
        let (inf1, sup1) =
            gasket::moebius::deriv_extrema_on_disk(&rotated, &Disk::unit()).unwrap();
        prop_assert!(sup0.lower <= sup1.upper && sup1.lower <= sup0.upper);
        prop_assert!(inf0.lower <= inf1.upper && inf1.lower <= inf0.upper);
    }

    #[test]
    fn circle_through_ignores_argument_order(
        ax in -0.9..0.9f64, ay in -0.9..0.9f64,
        bx in -0.9..0.9f64, by in -0.9..0.9f64,
        cx in -0.9..0.9f64, cy in -0.9..0.9f64,
    ) {
        // non-collinearity via twice the triangle area
        let area2 = ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax)).abs();
        prop_assume!(area2 > 1e-2);
        let p = RigorousComplex::point(ax, ay);
        let q = RigorousComplex::point(bx, by);
        let r = RigorousComplex::point(cx, cy);
        let base = circle_through(p, q, r).unwrap();
        for (u, v, w) in [(q, p, r), (r, q, p), (q, r, p)] {
            let other = circle_through(u, v, w).unwrap();
            let center_gap = (base.center - other.center).abs();
            prop_assert!(center_gap.lower <= 1e-9);
            prop_assert!(
                base.radius.lower <= other.radius.upper
                    && other.radius.lower <= base.radius.upper
            );
        }
    }

    #[test]
    fn natural_order_is_a_strict_total_order(
        a in letter_strategy(),
        b in letter_strategy(),
        c in letter_strategy(),
    ) {
        // exactly one of <, >, = holds
        let ab = natural_order_less(a, b);
        let ba = natural_order_less(b, a);
        prop_assert!(!(ab && ba));
        prop_assert!(ab || ba || a == b);
        // transitivity
        if natural_order_less(a, b) && natural_order_less(b, c) {
            prop_assert!(natural_order_less(a, c));
        }
    }

    #[test]
    fn subsystem_text_form_round_trips(
        members in prop::collection::btree_set(1..=60u32, 1..12),
        cofinite in any::<bool>(),
    ) {
        let v: Vec<u32> = members.into_iter().collect();
        let sys = if cofinite {
            Subsystem::Cofinite { excluded: v }
        } else {
            Subsystem::FiniteSet(v)
        };
        let text = sys.to_string();
        let back: Subsystem = text.parse().unwrap();
        prop_assert_eq!(back, sys);
    }

    #[test]
    fn interval_midpoint_lies_inside(
        x in -100.0..100.0f64,
        y in -100.0..100.0f64,
    ) {
        let iv = RigorousScalar::point(x) + RigorousScalar::point(y);
        prop_assert!(iv.lower <= iv.midpoint() && iv.midpoint() <= iv.upper);
        let prod = RigorousScalar::point(x) * RigorousScalar::point(y);
        prop_assert!(prod.contains(x * y));
    }
}
