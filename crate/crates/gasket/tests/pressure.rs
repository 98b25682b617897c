//! Partition-sum and dimension-engine regressions: brute-force oracles,
//! multiplicativity structure, bracket nesting, cofinite truncation, and
//! tail enclosures.

use gasket::apollonian::{
    generator, generator_det_abs, phi_sup_norm, true_sup_norm, Letter, Subsystem,
};
use gasket::moebius::{compose, extrema_with_det, Disk, MoebiusMap};
use gasket::pressure::{
    dim_bracket, dim_lower_certificate, dim_upper_bound, dim_upper_bound_cofinite,
    dim_upper_certificate, partition_bounds, z1_tail_bounds, DomainMode, EnumerationBudget,
    EnumerationMode, PartitionBounds,
};
use gasket::{GasketError, RigorousScalar};

fn scalar(x: f64) -> RigorousScalar {
    RigorousScalar::point(x)
}

fn budget(max_words: u64) -> EnumerationBudget {
    EnumerationBudget {
        max_words,
        max_depth: 8,
        mode: EnumerationMode::Certified,
    }
}

fn whole_disk_bounds(f: &Subsystem, depth: u32, t: f64) -> PartitionBounds {
    partition_bounds(f, depth, scalar(t), DomainMode::WholeDisk, &budget(1_000_000)).unwrap()
}

// --- plain-f64 complex helpers for the sampling oracle ---------------------

type C = (f64, f64);

fn cmul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cadd(a: C, b: C) -> C {
    (a.0 + b.0, a.1 + b.1)
}

fn cabs2(a: C) -> f64 {
    a.0 * a.0 + a.1 * a.1
}

struct F64Matrix {
    a: C,
    b: C,
    c: C,
    d: C,
}

fn midpoint_matrix(m: &MoebiusMap) -> F64Matrix {
    let mid = |z: gasket::RigorousComplex| (z.re.midpoint(), z.im.midpoint());
    F64Matrix {
        a: mid(m.a),
        b: mid(m.b),
        c: mid(m.c),
        d: mid(m.d),
    }
}

fn matmul(m1: &F64Matrix, m2: &F64Matrix) -> F64Matrix {
    F64Matrix {
        a: cadd(cmul(m1.a, m2.a), cmul(m1.b, m2.c)),
        b: cadd(cmul(m1.a, m2.b), cmul(m1.b, m2.d)),
        c: cadd(cmul(m1.c, m2.a), cmul(m1.d, m2.c)),
        d: cadd(cmul(m1.c, m2.b), cmul(m1.d, m2.d)),
    }
}

/// Sampled sup and inf of |φ′_ω| on the unit circle, where the word's
/// matrix is multiplied out in bare f64 and the derivative evaluated as
/// |det| / |cz+d|² at `samples` equispaced boundary points.
fn sampled_extrema(word: &[Letter], samples: usize) -> (f64, f64) {
    let mut m = midpoint_matrix(&generator(word[0]));
    let mut det = generator_det_abs(word[0].n).midpoint();
    for &letter in &word[1..] {
        m = matmul(&m, &midpoint_matrix(&generator(letter)));
        det *= generator_det_abs(letter.n).midpoint();
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * (i as f64) / (samples as f64);
        let z = (theta.cos(), theta.sin());
        let val = det / cabs2(cadd(cmul(m.c, z), m.d));
        lo = lo.min(val);
        hi = hi.max(val);
    }
    (lo, hi)
}

fn all_words(members: &[u32], depth: u32) -> Vec<Vec<Letter>> {
    let letters: Vec<Letter> = members
        .iter()
        .flat_map(|&n| (1..=6u32).map(move |k| Letter::new(k, n)))
        .collect();
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
    words
}

// ---------------------------------------------------------------------------

#[test]
fn depth_one_sums_reduce_to_six_identical_terms() {
    for m in [1u32, 4, 9] {
        let f: Subsystem = format!("n in {{{m}}}").parse().unwrap();
        let b = whole_disk_bounds(&f, 1, 1.0);
        let single = true_sup_norm(m);
        let six_fold = scalar(6.0) * single;
        assert!(b.z_max.lower <= six_fold.upper && six_fold.lower <= b.z_max.upper);
        // the closed-form norm proxy strictly dominates the summed sups
        let proxy = scalar(6.0) * phi_sup_norm(m);
        assert!(b.z_max.upper < proxy.lower);
        assert!(b.z_min.upper <= b.z_max.upper * (1.0 + 1e-12));
    }
}

#[test]
fn depth_two_sums_match_boundary_sampling_oracle() {
    let f: Subsystem = "n in {5}".parse().unwrap();
    let b = whole_disk_bounds(&f, 2, 0.5);
    let mut sup_sum = 0.0;
    let mut inf_sum = 0.0;
    for word in all_words(&[5], 2) {
        let (lo, hi) = sampled_extrema(&word, 4096);
        sup_sum += hi.powf(0.5);
        inf_sum += lo.powf(0.5);
    }
    // sampling can only undershoot a sup and overshoot an inf
    assert!(sup_sum <= b.z_max.upper * (1.0 + 1e-9));
    assert!(sup_sum >= b.z_max.lower * (1.0 - 1e-3));
    assert!(inf_sum >= b.z_min.lower * (1.0 - 1e-9));
    assert!(inf_sum <= b.z_min.upper * (1.0 + 1e-3));
}

#[test]
fn word_sums_agree_with_reassociated_enumeration() {
    // same sums, but words composed right-to-left and added in the reverse
    // order — the results must still intersect
    let f: Subsystem = "n in {5}".parse().unwrap();
    let t = scalar(0.7);
    for depth in 1..=3u32 {
        let b = partition_bounds(&f, depth, t, DomainMode::WholeDisk, &budget(1_000_000))
            .unwrap();
        let mut words = all_words(&[5], depth);
        words.reverse();
        let mut z_max = scalar(0.0);
        let mut z_min = scalar(0.0);
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
        assert!(b.z_max.lower <= z_max.upper * rel && z_max.lower <= b.z_max.upper * rel);
        assert!(b.z_min.lower <= z_min.upper * rel && z_min.lower <= b.z_min.upper * rel);
    }
}

#[test]
fn sums_are_sub_and_supermultiplicative_across_depths() {
    for (spec, t) in [("n in {5}", 0.6), ("n in {1,2}", 1.0), ("n in {3,7}", 0.8)] {
        let f: Subsystem = spec.parse().unwrap();
        let b1 = whole_disk_bounds(&f, 1, t);
        let b2 = whole_disk_bounds(&f, 2, t);
        let square_max = b1.z_max * b1.z_max;
        let square_min = b1.z_min * b1.z_min;
        assert!(
            b2.z_max.lower <= square_max.upper * (1.0 + 1e-9),
            "sup sums fail to submultiply for {spec}"
        );
        assert!(
            b2.z_min.upper >= square_min.lower * (1.0 - 1e-9),
            "inf sums fail to supermultiply for {spec}"
        );
    }
}

#[test]
fn sum_spread_is_controlled_by_universal_distortion() {
    for (spec, depth, t) in [
        ("n in {1,2}", 3u32, 0.9),
        ("n in {3,7}", 2, 0.7),
        ("n in {1,2,3,4,5,6,7,8,9,10}", 2, 1.0),
        ("n in {5}", 4, 0.6),
    ] {
        let f: Subsystem = spec.parse().unwrap();
        let b = whole_disk_bounds(&f, depth, t);
        let cap = scalar(5.900319).pow(scalar(t * depth as f64)) * b.z_min;
        assert!(
            b.z_max.lower <= cap.upper,
            "spread escapes distortion cap for {spec} at depth {depth}"
        );
    }
}

#[test]
fn refined_domains_tighten_both_sums() {
    let f: Subsystem = "n in {1,2}".parse().unwrap();
    let t = scalar(1.0);
    let whole =
        partition_bounds(&f, 2, t, DomainMode::WholeDisk, &budget(1_000_000)).unwrap();
    let refined =
        partition_bounds(&f, 2, t, DomainMode::FirstLevelRefined, &budget(1_000_000)).unwrap();
    assert!(refined.z_max.lower <= whole.z_max.upper * (1.0 + 1e-12));
    assert!(refined.z_min.upper >= whole.z_min.lower * (1.0 - 1e-12));
    // the refinement is strict at this depth
    assert!(refined.z_max.upper < whole.z_max.lower);
}

#[test]
fn word_budget_is_enforced() {
    let f: Subsystem = "n in {5}".parse().unwrap();
    let got = partition_bounds(&f, 2, scalar(1.0), DomainMode::WholeDisk, &budget(35));
    assert!(matches!(got, Err(GasketError::BudgetExceeded)));
    assert!(partition_bounds(&f, 2, scalar(1.0), DomainMode::WholeDisk, &budget(36)).is_ok());
}

#[test]
#[should_panic(expected = "depth starts at 1")]
fn zero_depth_is_rejected() {
    let f: Subsystem = "n in {5}".parse().unwrap();
    let _ = partition_bounds(&f, 0, scalar(1.0), DomainMode::WholeDisk, &budget(100));
}

#[test]
fn singleton_bracket_is_certified_and_nests_with_depth() {
    let f: Subsystem = "n in {5}".parse().unwrap();
    let shallow = dim_bracket(&f, &budget(40)).unwrap();
    let deep = dim_bracket(&f, &budget(1_296)).unwrap();
    assert_eq!(shallow.depth_upper, 2);
    assert_eq!(deep.depth_upper, 4);
    assert!(shallow.certified && deep.certified);
    assert!(shallow.lower <= shallow.upper && deep.lower <= deep.upper);
    // deeper enumeration can only tighten, up to bisection slack
    let slack = 2.5e-3;
    assert!(deep.lower >= shallow.lower - slack);
    assert!(deep.upper <= shallow.upper + slack);
    // the deep bracket pins the value near 0.458
    assert!(deep.lower <= 0.4581 && 0.4581 <= deep.upper);
    assert!(deep.upper - deep.lower < 2e-3);

    let json = serde_json::to_string(&deep).unwrap();
    assert!(json.contains("\"subsystem\":\"n in {5}\""));
}

#[test]
fn bisection_endpoints_reproduce_their_certificates() {
    let f: Subsystem = "n in {5}".parse().unwrap();
    let bracket = dim_bracket(&f, &budget(1_296)).unwrap();
    let q = bracket.depth_upper;
    assert!(dim_upper_certificate(&f, q, bracket.upper).unwrap());
    assert!(!dim_upper_certificate(&f, q, bracket.upper - 1e-3).unwrap());
    assert!(dim_lower_certificate(&f, q, bracket.lower).unwrap());
    assert!(!dim_lower_certificate(&f, q, bracket.lower + 1e-3).unwrap());
}

#[test]
fn upper_estimates_improve_with_budget() {
    let f: Subsystem = "n in {3,4}".parse().unwrap();
    let coarse = dim_upper_bound(&f, &budget(144)).unwrap();
    let fine = dim_upper_bound(&f, &budget(20_736)).unwrap();
    assert_eq!(coarse.depth, 2);
    assert_eq!(fine.depth, 4);
    assert!(coarse.certified && fine.certified);
    assert!(fine.value <= coarse.value + 1e-6);
}

#[test]
fn deep_singletons_have_small_dimension() {
    let f: Subsystem = "n in {10000}".parse().unwrap();
    let est = dim_upper_bound(&f, &budget(216)).unwrap();
    assert!(est.value <= 0.15, "upper bound {} too coarse", est.value);
    assert!(est.value > 0.0);
}

#[test]
fn cofinite_upper_bound_brackets_the_full_system() {
    let est = dim_upper_bound_cofinite(&Subsystem::all(), 30, &budget(1_000_000)).unwrap();
    assert!(est.certified);
    assert_eq!(est.depth, 30);
    // cannot certify below the true value, and 30 head states already
    // land well under 1.5
    assert!(est.value >= 1.30568);
    assert!(est.value <= 1.50);
}

#[test]
fn cofinite_truncation_is_clamped_by_budget_and_exclusions() {
    let est = dim_upper_bound_cofinite(&Subsystem::all(), 30, &budget(400)).unwrap();
    assert_eq!(est.depth, 2);
    let punctured: Subsystem = "n > 3".parse().unwrap();
    let est = dim_upper_bound_cofinite(&punctured, 1, &budget(1_000_000)).unwrap();
    assert_eq!(est.depth, 3);
    let finite: Subsystem = "n in {1,2}".parse().unwrap();
    assert!(matches!(
        dim_upper_bound_cofinite(&finite, 10, &budget(1_000_000)),
        Err(GasketError::Parse(_))
    ));
}

#[test]
fn tail_bounds_enclose_and_shrink() {
    let t = scalar(1.3057);
    let (lo, hi) = z1_tail_bounds(t, 26).unwrap();
    assert!(lo.lower > 0.0);
    assert!(hi.upper < 1.0);
    assert!(lo.upper <= hi.upper * (1.0 + 1e-12));

    // the enclosure dominates the bare integral comparison
    let two_t_minus_1 = scalar(2.0) * t - scalar(1.0);
    let closed = scalar(6.0) * scalar(0.45).pow(t) * scalar(27.0).pow(scalar(1.0) - scalar(2.0) * t)
        / two_t_minus_1;
    assert!(lo.upper >= closed.lower);

    // dropping more leading terms strictly shrinks the tail
    let (_, hi_far) = z1_tail_bounds(t, 100).unwrap();
    assert!(hi_far.upper < lo.lower);
}

#[test]
fn tail_bounds_reject_divergent_exponents() {
    assert!(matches!(
        z1_tail_bounds(scalar(0.5), 10),
        Err(GasketError::TailDiverges)
    ));
    assert!(matches!(
        z1_tail_bounds(scalar(0.4), 10),
        Err(GasketError::TailDiverges)
    ));
    assert!(z1_tail_bounds(scalar(0.51), 10).is_ok());
}
