//! The gasket's generating maps φ_{k,n}, their alphabet, norm estimates,
//! geometric witnesses, and curvature bookkeeping.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complex::{third_root_of_unity, RigorousComplex};
use crate::error::{GasketError, Result};
use crate::interval::{sqrt3, RigorousScalar};
use crate::moebius::{compose, deriv_extrema_on_disk, extrema_with_det, Disk, MoebiusMap};

/// Index (k, n) of one generating map: k ∈ {1,…,6} picks the rotational
/// position, n ≥ 1 the depth along the parabolic direction.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub k: u32,
    pub n: u32,
}

impl Letter {
    pub fn new(k: u32, n: u32) -> Self {
        assert!((1..=6).contains(&k), "rotational index out of range");
        assert!(n >= 1, "parabolic index out of range");
        Self { k, n }
    }
}

/// A nonempty composition φ_{w₁} ∘ φ_{w₂} ∘ ⋯ ∘ φ_{w_m}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        assert!(!letters.is_empty(), "words are nonempty");
        Self(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Which parabolic indices participate: an explicit finite set, or all of
/// ℕ minus an excluded finite set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subsystem {
    FiniteSet(Vec<u32>),
    Cofinite { excluded: Vec<u32> },
}

// Subsystems travel through JSON as their text-grammar form, so step files
// and reports stay human-readable and diffable.
impl Serialize for Subsystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Subsystem {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Subsystem {
    pub fn all() -> Self {
        Subsystem::Cofinite { excluded: vec![] }
    }

    pub fn contains(&self, n: u32) -> bool {
        match self {
            Subsystem::FiniteSet(s) => s.contains(&n),
            Subsystem::Cofinite { excluded } => !excluded.contains(&n),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Subsystem::FiniteSet(_))
    }

    /// Sorted members of a finite subsystem.
    pub fn members(&self) -> Option<Vec<u32>> {
        match self {
            Subsystem::FiniteSet(s) => {
                let mut v = s.clone();
                v.sort_unstable();
                v.dedup();
                Some(v)
            }
            Subsystem::Cofinite { .. } => None,
        }
    }

    /// Smallest participating index.
    pub fn min_index(&self) -> Option<u32> {
        match self {
            Subsystem::FiniteSet(s) => s.iter().copied().min(),
            Subsystem::Cofinite { excluded } => (1..).find(|n| !excluded.contains(n)),
        }
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subsystem::FiniteSet(s) => {
                let mut v = s.clone();
                v.sort_unstable();
                v.dedup();
                let items: Vec<String> = v.iter().map(|n| n.to_string()).collect();
                write!(f, "n in {{{}}}", items.join(","))
            }
            Subsystem::Cofinite { excluded } if excluded.is_empty() => write!(f, "all"),
            Subsystem::Cofinite { excluded } => {
                let mut v = excluded.clone();
                v.sort_unstable();
                v.dedup();
                let items: Vec<String> = v.iter().map(|n| n.to_string()).collect();
                write!(f, "n != {{{}}}", items.join(","))
            }
        }
    }
}

fn parse_set_body(body: &str) -> Result<Vec<u32>> {
    let body = body.trim();
    let inner = body
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .unwrap_or(body);
    let mut out = Vec::new();
    for piece in inner.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let n: u32 = piece
            .parse()
            .map_err(|_| GasketError::Parse(format!("bad index `{piece}`")))?;
        if n == 0 {
            return Err(GasketError::Parse("indices start at 1".into()));
        }
        out.push(n);
    }
    if out.is_empty() {
        return Err(GasketError::Parse("empty index set".into()));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

impl FromStr for Subsystem {
    type Err = GasketError;

    /// Accepts `all`, `n<=K`, `n>K`, `n in {a,b,…}`, `n != {a,b,…}`;
    /// whitespace is insignificant everywhere.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "all" {
            return Ok(Subsystem::all());
        }
        if let Some(rest) = compact.strip_prefix("n<=") {
            let k: u32 = rest
                .parse()
                .map_err(|_| GasketError::Parse(format!("bad bound `{rest}`")))?;
            if k == 0 {
                return Err(GasketError::Parse("bound must be at least 1".into()));
            }
            return Ok(Subsystem::FiniteSet((1..=k).collect()));
        }
        if let Some(rest) = compact.strip_prefix("n>") {
            let k: u32 = rest
                .parse()
                .map_err(|_| GasketError::Parse(format!("bad bound `{rest}`")))?;
            return Ok(Subsystem::Cofinite {
                excluded: (1..=k).collect(),
            });
        }
        if let Some(rest) = compact.strip_prefix("nin") {
            return Ok(Subsystem::FiniteSet(parse_set_body(rest)?));
        }
        if let Some(rest) = compact.strip_prefix("n!=") {
            return Ok(Subsystem::Cofinite {
                excluded: parse_set_body(rest)?,
            });
        }
        Err(GasketError::Parse(format!("unrecognized subsystem `{s}`")))
    }
}

/// The handful of scalars everything else leans on.
pub struct SystemConstants {
    pub lambda: RigorousScalar,
    /// Lower coefficient in 0.45/n² < v(n).
    pub norm_lower_coeff: RigorousScalar,
    /// Upper coefficient in v(n) < 3.821/n².
    pub norm_upper_coeff: RigorousScalar,
}

impl SystemConstants {
    pub fn standard() -> Self {
        Self {
            lambda: sqrt3(),
            norm_lower_coeff: RigorousScalar::point(0.45),
            norm_upper_coeff: RigorousScalar::point(3.821),
        }
    }
}

/// The base parabolic matrix (λ−1, 1; −1, λ+1) representing
/// z ↦ ((λ−1)z+1)/(−z+λ+1).
pub fn base_matrix() -> MoebiusMap {
    let l = sqrt3();
    MoebiusMap::new(
        RigorousComplex::from_real(l - RigorousScalar::point(1.0)),
        RigorousComplex::one(),
        -RigorousComplex::one(),
        RigorousComplex::from_real(l + RigorousScalar::point(1.0)),
    )
}

/// The n-th parabolic power (−n+λ, n; −n, n+λ), fixing 1.
pub fn parabolic_power(n: u32) -> MoebiusMap {
    let l = sqrt3();
    let nn = RigorousScalar::point(n as f64);
    MoebiusMap::new(
        RigorousComplex::from_real(l - nn),
        RigorousComplex::from_real(nn),
        RigorousComplex::from_real(-nn),
        RigorousComplex::from_real(nn + l),
    )
}

fn theta_factor(k: u32) -> RigorousComplex {
    // e^{iθ_k} with θ_k = (−1)^k · 2π/3
    if k % 2 == 0 {
        third_root_of_unity(1)
    } else {
        third_root_of_unity(2)
    }
}

fn theta_prime_factor(k: u32) -> RigorousComplex {
    // e^{iθ'_k}: k ≡ 1 → e^{2πi/3}, k ≡ 2 → e^{4πi/3}, k ≡ 0 → 1
    match k % 3 {
        1 => third_root_of_unity(1),
        2 => third_root_of_unity(2),
        _ => third_root_of_unity(0),
    }
}

/// Center of the rotation sector for k, i.e. e^{iθ'_k}.
pub fn sector_center(k: u32) -> RigorousComplex {
    theta_prime_factor(k)
}

/// The generating map φ_{k,n} = R_{θ'_k} ∘ fⁿ ∘ R_{θ_k} ∘ f in closed form.
///
/// Multiplying the four factors symbolically and clearing a common 1/n
/// leaves entries whose determinant has magnitude 9/n²; all downstream
/// uses are scale-invariant, so the normalization is free.
pub fn generator(letter: Letter) -> MoebiusMap {
    let l = sqrt3();
    let one = RigorousScalar::point(1.0);
    let l_over_n = l / RigorousScalar::point(letter.n as f64);
    let ei_t = theta_factor(letter.k);
    let ei_tp = theta_prime_factor(letter.k);

    let lm1 = RigorousComplex::from_real(l - one);
    let lp1 = RigorousComplex::from_real(l + one);
    let ln1 = RigorousComplex::from_real(l_over_n - one);
    let lpn = RigorousComplex::from_real(one + l_over_n);

    let a = ei_tp * (ei_t * lm1 * ln1 - RigorousComplex::one());
    let b = ei_tp * (ei_t * ln1 + lp1);
    let c = -(ei_t * lm1) - lpn;
    let d = -ei_t + lpn * lp1;
    MoebiusMap::new(a, b, c, d)
}

/// |det φ_{k,n}| = 9/n² for the closed-form normalization above.
pub fn generator_det_abs(n: u32) -> RigorousScalar {
    RigorousScalar::point(9.0) / RigorousScalar::point(n as f64).sqr()
}

/// The same map assembled the slow way — four explicit factors — kept as an
/// independent cross-check for the closed form.
pub fn generator_by_factors(letter: Letter) -> MoebiusMap {
    let f = base_matrix();
    let r_theta = MoebiusMap::rotation(theta_factor(letter.k));
    let r_theta_p = MoebiusMap::rotation(theta_prime_factor(letter.k));
    let fn_pow = parabolic_power(letter.n);
    compose(&compose(&r_theta_p, &fn_pow), &compose(&r_theta, &f))
}

/// v(n) = (λ²/n²)(2+λ)² / (|−1+λi−(1+λ/n)(2+λ)| − λ)², the norm proxy used
/// by the tail machinery. It dominates the true sup of |φ′_{k,n}| on the
/// unit disk and is independent of k.
pub fn phi_sup_norm(n: u32) -> RigorousScalar {
    let l = sqrt3();
    let one = RigorousScalar::point(1.0);
    let two_plus_l = RigorousScalar::point(2.0) + l;
    let l_over_n = l / RigorousScalar::point(n as f64);
    let w = RigorousComplex::new(
        -one - (one + l_over_n) * two_plus_l,
        l,
    );
    let den = w.abs() - l;
    (l_over_n * two_plus_l / den).sqr()
}

/// Composition along the word, left to right, with |det| tracked as the
/// product of per-letter values (the naive ad−bc cancels at depth).
pub fn word_matrix(word: &Word) -> (MoebiusMap, RigorousScalar) {
    let mut m = generator(word.letters()[0]);
    let mut det = generator_det_abs(word.letters()[0].n);
    for &letter in &word.letters()[1..] {
        m = compose(&m, &generator(letter));
        det = det * generator_det_abs(letter.n);
    }
    (m, det)
}

/// sup and inf of |φ′_w| over a disk, with the cancellation-free determinant.
pub fn word_extrema_on_disk(word: &Word, dom: &Disk) -> Result<(RigorousScalar, RigorousScalar)> {
    let (m, det) = word_matrix(word);
    extrema_with_det(&m, dom, det)
}

/// Fourth curvature tangent to three mutually tangent circles:
/// k₄ = k₁+k₂+k₃ + 2√(k₁k₂+k₂k₃+k₃k₁).
pub fn descartes_next(
    k1: RigorousScalar,
    k2: RigorousScalar,
    k3: RigorousScalar,
) -> Result<RigorousScalar> {
    let cross = k1 * k2 + k2 * k3 + k3 * k1;
    if cross.upper < 0.0 {
        return Err(GasketError::NegativeDiscriminant);
    }
    Ok(k1 + k2 + k3 + RigorousScalar::point(2.0) * cross.sqrt())
}

/// Strict order by n first, then k; letters compare equal only to themselves.
pub fn natural_order_less(a: Letter, b: Letter) -> bool {
    match a.n.cmp(&b.n) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.k < b.k,
    }
}

/// H(n) = λ(2+λ)s / (n·(√(s²+3) − λ)·√(s²+3)) with s = (2+λ)(λ/n+1) + 1:
/// minus half the logarithmic n-derivative of v, times n. H(n) < 1 is
/// exactly v′(n) < 0, so values below 1 witness strict decrease of the
/// norm proxy at n.
pub fn monotonicity_witness_h(n: u32) -> RigorousScalar {
    let l = sqrt3();
    let one = RigorousScalar::point(1.0);
    let two_plus_l = RigorousScalar::point(2.0) + l;
    let nn = RigorousScalar::point(n as f64);
    let s = two_plus_l * (l / nn + one) + one;
    let rt = (s.sqr() + RigorousScalar::point(3.0)).sqrt();
    l * two_plus_l * s / (nn * (rt - l) * rt)
}

/// Upper majorant for H on the ray [n, ∞): s is decreasing in n, so its
/// value at n dominates the numerator, while the limiting root
/// √((3+λ)²+3) minimizes the denominator. A value < 1 certifies
/// v′(m) < 0 for every m ≥ n at once.
pub fn monotonicity_majorant(n: u32) -> RigorousScalar {
    let l = sqrt3();
    let one = RigorousScalar::point(1.0);
    let two_plus_l = RigorousScalar::point(2.0) + l;
    let nn = RigorousScalar::point(n as f64);
    let s_here = two_plus_l * (l / nn + one) + one;
    let s_inf = two_plus_l + one;
    let rt_inf = (s_inf.sqr() + RigorousScalar::point(3.0)).sqrt();
    l * two_plus_l * s_here / (nn * (rt_inf - l) * rt_inf)
}

/// The six first-level image disks φ_{k,n}(𝔻) for a fixed n.
pub fn first_level_disks(n: u32) -> Vec<Disk> {
    (1..=6)
        .map(|k| {
            crate::moebius::map_disk(&generator(Letter::new(k, n)), &Disk::unit())
                .expect("unit disk avoids every generator pole")
        })
        .collect()
}

/// Certified radius around the rotation fixed points that contains every
/// image φ_{k,n}(B(0, 1+ρ)) with n > truncation. Splitting one parabolic
/// factor off φ_{k,n} leaves the chain f∘R_θ∘f acting first; its image
/// determines the tail via |1 − fᵐ(w)| = λ|1−w| / |m(1−w) + λ| with
/// m = n−1 ≥ truncation.
pub fn tail_image_radius(truncation: u32, rho: f64) -> Result<RigorousScalar> {
    let l = sqrt3();
    let dom = Disk::new(
        RigorousComplex::zero(),
        RigorousScalar::point(1.0) + RigorousScalar::point(rho),
    );
    let f = base_matrix();
    let mut u_max: Option<RigorousScalar> = None;
    let mut alpha_min: Option<RigorousScalar> = None;
    for parity in 0..2 {
        let w1 = crate::moebius::map_disk(&f, &dom)?;
        let eith = if parity == 0 {
            third_root_of_unity(1)
        } else {
            third_root_of_unity(2)
        };
        let w2 = Disk::new(eith * w1.center, w1.radius);
        let w3 = crate::moebius::map_disk(&f, &w2)?;
        let u0 = RigorousComplex::one() - w3.center;
        let s = w3.radius;
        let alpha = u0.re - s;
        if !alpha.surely_positive() {
            return Err(GasketError::MajorantFailure);
        }
        let um = u0.abs() + s;
        u_max = Some(match u_max {
            None => um,
            Some(m) => m.max(um),
        });
        alpha_min = Some(match alpha_min {
            None => alpha,
            Some(m) => m.min(alpha),
        });
    }
    let u_max = u_max.expect("two parities");
    let alpha_min = alpha_min.expect("two parities");
    let m_min = RigorousScalar::point(truncation as f64);
    Ok(l * u_max / (m_min * alpha_min + l))
}

/// First-level image disks for a whole subsystem. Finite subsystems list
/// all 6|F| disks. Cofinite subsystems list the head disks up to the
/// truncation followed by one disk certified to enclose every deeper image.
pub fn subsystem_first_level_disks(f: &Subsystem, truncation: u32) -> Result<Vec<Disk>> {
    match f {
        Subsystem::FiniteSet(_) => {
            let members = f.members().expect("finite");
            if let Some(&top) = members.last() {
                if truncation < top {
                    return Err(GasketError::Parse(
                        "truncation must reach every member".into(),
                    ));
                }
            }
            Ok(members.iter().flat_map(|&n| first_level_disks(n)).collect())
        }
        Subsystem::Cofinite { excluded } => {
            if excluded.iter().any(|&n| n > truncation) {
                return Err(GasketError::Parse(
                    "truncation must reach every excluded index".into(),
                ));
            }
            let mut disks: Vec<Disk> = (1..=truncation)
                .filter(|n| !excluded.contains(n))
                .flat_map(first_level_disks)
                .collect();
            // every deeper image sits within tail_image_radius of one of
            // the three rotation fixed points on the unit circle
            let r = tail_image_radius(truncation, 0.0)?;
            disks.push(Disk::new(
                RigorousComplex::zero(),
                RigorousScalar::point(1.0) + r,
            ));
            Ok(disks)
        }
    }
}

/// Radius of the first-level disks at index n, from the mapped geometry.
pub fn first_level_radius(n: u32) -> RigorousScalar {
    first_level_disks(n)[0].radius
}

/// True sup of |φ′_{k,n}| over the closed unit disk (k-independent).
pub fn true_sup_norm(n: u32) -> RigorousScalar {
    let (_, sup) = deriv_extrema_on_disk(&generator(Letter::new(1, n)), &Disk::unit())
        .expect("unit disk avoids every generator pole");
    sup
}
