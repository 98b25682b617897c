//! Partition-function bounds and certified dimension brackets.
//!
//! Upper bounds come from subinvariant vectors of a conditioned block
//! transfer matrix (sup entries), lower bounds from superinvariant vectors
//! of the inf-matrix; both reduce to Bowen's pressure sign test. The
//! cofinite system gets a depth-one matrix whose tail letters are folded
//! into three residual states near the rotation fixed points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apollonian::{
    first_level_disks, generator, generator_det_abs, phi_sup_norm, tail_image_radius, Letter,
    Subsystem,
};
use crate::complex::{third_root_of_unity, RigorousComplex};
use crate::error::{GasketError, Result};
use crate::interval::{sqrt3, RigorousScalar};
use crate::moebius::{extrema_with_det, map_disk, Disk, MoebiusMap};

/// Where |φ′_ω| is extremized when forming partition sums.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainMode {
    WholeDisk,
    FirstLevelRefined,
}

/// Whether enumeration is exhaustive (every word counted, results
/// certified) or allowed to prune negligible entries (uncertified).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnumerationMode {
    Certified,
    Exploratory,
}

/// Work limits for word enumeration.
#[derive(Copy, Clone, Debug)]
pub struct EnumerationBudget {
    pub max_words: u64,
    pub max_depth: u32,
    pub mode: EnumerationMode,
}

impl EnumerationBudget {
    /// A budget sized for interactive use: about a million words.
    pub fn desk() -> Self {
        Self {
            max_words: 1_000_000,
            max_depth: 8,
            mode: EnumerationMode::Certified,
        }
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self::desk()
    }
}

/// Two-sided enclosure of a depth-n partition sum.
#[derive(Copy, Clone, Debug)]
pub struct PartitionBounds {
    pub depth: u32,
    pub t: RigorousScalar,
    pub z_min: RigorousScalar,
    pub z_max: RigorousScalar,
    pub domain_mode: DomainMode,
}

/// One certified side of a dimension estimate.
#[derive(Copy, Clone, Debug)]
pub struct DimEstimate {
    pub value: f64,
    pub depth: u32,
    pub certified: bool,
}

/// A certified dimension bracket for one subsystem.
#[derive(Clone, Debug, Serialize)]
pub struct DimBracket {
    pub lower: f64,
    pub upper: f64,
    pub depth_lower: u32,
    pub depth_upper: u32,
    pub subsystem: Subsystem,
    pub certified: bool,
}

const BISECT_TOL: f64 = 1e-6;
const BISECT_MAX_ITERS: u32 = 80;
const BISECT_LO: f64 = 0.0;
const BISECT_HI: f64 = 2.0;
// Exploratory pruning threshold: per-word contributions below this are
// dropped, which is why exploratory results are never certified.
const PRUNE_EPS: f64 = 1e-18;

fn letters_of(f: &Subsystem) -> Result<Vec<Letter>> {
    let members = f
        .members()
        .ok_or_else(|| GasketError::Parse("operation requires a finite subsystem".into()))?;
    if members.is_empty() {
        return Err(GasketError::Parse("empty subsystem".into()));
    }
    let mut letters = Vec::with_capacity(members.len() * 6);
    for &n in &members {
        for k in 1..=6 {
            letters.push(Letter::new(k, n));
        }
    }
    Ok(letters)
}

struct WordRow {
    a: RigorousComplex,
    b: RigorousComplex,
    c: RigorousComplex,
    d: RigorousComplex,
    det: RigorousScalar,
}

/// All words of the given depth in prepend order: the word at index
/// i₁·L^{q-1} + … + i_q is φ_{i₁} ∘ … ∘ φ_{i_q}, so the first letter of
/// word w is w / L^{q-1}.
fn build_words(letters: &[Letter], depth: u32) -> Vec<WordRow> {
    let base: Vec<(MoebiusMap, RigorousScalar)> = letters
        .iter()
        .map(|&l| (generator(l), generator_det_abs(l.n)))
        .collect();
    let mut rows: Vec<WordRow> = base
        .iter()
        .map(|(m, det)| WordRow {
            a: m.a,
            b: m.b,
            c: m.c,
            d: m.d,
            det: *det,
        })
        .collect();
    for _ in 1..depth {
        let prev = rows;
        let mut next = Vec::with_capacity(prev.len() * base.len());
        for (m, det1) in &base {
            next.par_extend(prev.par_iter().map(|r| WordRow {
                a: m.a * r.a + m.b * r.c,
                b: m.a * r.b + m.b * r.d,
                c: m.c * r.a + m.d * r.c,
                d: m.c * r.b + m.d * r.d,
                det: *det1 * r.det,
            }));
        }
        rows = next;
    }
    rows
}

fn word_count(alphabet: usize, depth: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..depth {
        acc = acc.checked_mul(alphabet as u64)?;
    }
    Some(acc)
}

/// Depth-n partition sums Σ_ω sup^t and Σ_ω inf^t, every word included.
pub fn partition_bounds(
    f: &Subsystem,
    depth: u32,
    t: RigorousScalar,
    mode: DomainMode,
    budget: &EnumerationBudget,
) -> Result<PartitionBounds> {
    assert!(depth >= 1, "depth starts at 1");
    let letters = letters_of(f)?;
    match word_count(letters.len(), depth) {
        Some(w) if w <= budget.max_words => {}
        _ => return Err(GasketError::BudgetExceeded),
    }
    let domains: Vec<Disk> = match mode {
        DomainMode::WholeDisk => vec![Disk::unit()],
        DomainMode::FirstLevelRefined => {
            let members = f.members().expect("checked finite above");
            members
                .iter()
                .flat_map(|&n| first_level_disks(n))
                .collect()
        }
    };
    let rows = build_words(&letters, depth);
    // per-word terms are collected in enumeration order and folded
    // sequentially, so identical inputs give bit-identical sums
    let terms: Vec<(RigorousScalar, RigorousScalar)> = rows
        .par_iter()
        .map(|r| -> Result<(RigorousScalar, RigorousScalar)> {
            let m = MoebiusMap::new(r.a, r.b, r.c, r.d);
            let mut word_sup: Option<RigorousScalar> = None;
            let mut word_inf: Option<RigorousScalar> = None;
            for dom in &domains {
                let (inf, sup) = extrema_with_det(&m, dom, r.det)?;
                word_sup = Some(match word_sup {
                    None => sup,
                    Some(s) => s.max(sup),
                });
                word_inf = Some(match word_inf {
                    None => inf,
                    Some(i) => i.min(inf),
                });
            }
            let sup = word_sup.expect("at least one domain disk");
            let inf = word_inf.expect("at least one domain disk");
            Ok((inf.pow(t), sup.pow(t)))
        })
        .collect::<Result<_>>()?;
    let (z_min, z_max) = terms.iter().fold(
        (RigorousScalar::point(0.0), RigorousScalar::point(0.0)),
        |acc, term| (acc.0 + term.0, acc.1 + term.1),
    );
    Ok(PartitionBounds {
        depth,
        t,
        z_min,
        z_max,
        domain_mode: mode,
    })
}

// ---------------------------------------------------------------------------
// Finite subsystems: conditioned block transfer matrix.
// ---------------------------------------------------------------------------

/// Depth-q transfer data for a finite subsystem: for every conditioning
/// disk e (a first-level image disk) and every length-q word ω, the sup and
/// inf of |φ′_ω| over that disk. Entries are t-independent; exponentiation
/// happens per query.
pub struct BlockSystem {
    letters: usize,
    words: usize,
    stride: usize,
    q: u32,
    sup: Vec<RigorousScalar>,
    inf: Vec<RigorousScalar>,
}

impl BlockSystem {
    pub fn build(f: &Subsystem, q: u32, budget: &EnumerationBudget) -> Result<Self> {
        let letters = letters_of(f)?;
        let l = letters.len();
        match word_count(l, q) {
            Some(w) if w <= budget.max_words => {}
            _ => return Err(GasketError::BudgetExceeded),
        }
        let disks: Vec<Disk> = letters
            .iter()
            .map(|&lt| map_disk(&generator(lt), &Disk::unit()))
            .collect::<Result<_>>()?;
        let rows = build_words(&letters, q);
        let w = rows.len();
        let entries: Vec<(RigorousScalar, RigorousScalar)> = (0..l * w)
            .into_par_iter()
            .map(|idx| {
                let e = idx / w;
                let r = &rows[idx % w];
                let m = MoebiusMap::new(r.a, r.b, r.c, r.d);
                extrema_with_det(&m, &disks[e], r.det)
            })
            .collect::<Result<_>>()?;
        let mut sup = Vec::with_capacity(l * w);
        let mut inf = Vec::with_capacity(l * w);
        for (i, s) in entries {
            inf.push(i);
            sup.push(s);
        }
        Ok(Self {
            letters: l,
            words: w,
            stride: w / l,
            q,
            sup,
            inf,
        })
    }

    pub fn depth(&self) -> u32 {
        self.q
    }

    pub fn words(&self) -> usize {
        self.words
    }

    /// Collapse to the L×L block matrix at exponent t:
    /// M[e,f] = Σ_{ω, first(ω)=f} entry(e,ω)^t.
    fn collapsed(&self, use_sup: bool, t: f64, prune: bool) -> Vec<RigorousScalar> {
        let src = if use_sup { &self.sup } else { &self.inf };
        let l = self.letters;
        let w = self.words;
        let stride = self.stride;
        let t_iv = RigorousScalar::point(t);
        (0..l)
            .into_par_iter()
            .flat_map_iter(|e| {
                let mut acc = vec![RigorousScalar::point(0.0); l];
                for wi in 0..w {
                    let v = src[e * w + wi].pow(t_iv);
                    if prune && v.upper < PRUNE_EPS {
                        continue;
                    }
                    acc[wi / stride] = acc[wi / stride] + v;
                }
                acc.into_iter()
            })
            .collect()
    }

    /// Certify dim ≤ t (sup side) or dim ≥ t (inf side) via an invariant
    /// positive vector: a max-normalized power iterate of the collapsed
    /// matrix, re-verified with one interval matrix-vector pass.
    pub fn certifies(&self, t: f64, upper_side: bool, prune: bool) -> bool {
        let l = self.letters;
        let m = self.collapsed(upper_side, t, prune);
        let mid: Vec<f64> = m.iter().map(|v| v.midpoint()).collect();
        let u = perron_vector(&mid, l);
        for e in 0..l {
            let mut y = RigorousScalar::point(0.0);
            for f in 0..l {
                y = y + m[e * l + f] * RigorousScalar::point(u[f]);
            }
            let ok = if upper_side {
                y.upper <= u[e]
            } else {
                y.lower >= u[e]
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Max-normalized power iterate of a positive L×L matrix — an approximate
/// Perron vector, good enough to act as the test vector in the
/// Collatz–Wielandt inequalities.
fn perron_vector(mid: &[f64], l: usize) -> Vec<f64> {
    let mut x = vec![1.0f64; l];
    let mut y = vec![0.0f64; l];
    for _ in 0..400 {
        let mut hi = 0.0f64;
        for e in 0..l {
            let mut s = 0.0;
            for f in 0..l {
                s += mid[e * l + f] * x[f];
            }
            y[e] = s;
            hi = hi.max(s);
        }
        if hi == 0.0 || !hi.is_finite() {
            return vec![1.0; l];
        }
        let mut spread_lo = f64::INFINITY;
        let mut spread_hi = 0.0f64;
        for e in 0..l {
            let r = y[e] / x[e];
            spread_lo = spread_lo.min(r);
            spread_hi = spread_hi.max(r);
        }
        for e in 0..l {
            x[e] = y[e] / hi;
        }
        if spread_hi - spread_lo < 1e-13 * spread_hi {
            break;
        }
    }
    x
}

/// Last verified t from above: pred must hold at the top of the bracket and
/// be (effectively) monotone; the answer is always a t that passed.
fn bisect_from_above(mut pred: impl FnMut(f64) -> bool) -> Option<f64> {
    let (mut lo, mut hi) = (BISECT_LO, BISECT_HI);
    if !pred(hi) {
        return None;
    }
    let mut good = hi;
    for _ in 0..BISECT_MAX_ITERS {
        if hi - lo <= BISECT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            good = mid;
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(good)
}

/// Last verified t from below (mirror image).
fn bisect_from_below(mut pred: impl FnMut(f64) -> bool) -> Option<f64> {
    let (mut lo, mut hi) = (BISECT_LO, BISECT_HI);
    if !pred(lo) {
        return None;
    }
    let mut good = lo;
    for _ in 0..BISECT_MAX_ITERS {
        if hi - lo <= BISECT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            good = mid;
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(good)
}

/// Deepest block depth the budget affords; depth 1 must fit or the call is
/// over budget outright.
fn affordable_depth(alphabet: usize, budget: &EnumerationBudget) -> Result<u32> {
    let mut q = 0u32;
    while q < budget.max_depth {
        match word_count(alphabet, q + 1) {
            Some(w) if w <= budget.max_words => q += 1,
            _ => break,
        }
    }
    if q == 0 {
        return Err(GasketError::BudgetExceeded);
    }
    Ok(q)
}

/// Certified upper bound for dim_H of a finite subsystem.
pub fn dim_upper_bound(f: &Subsystem, budget: &EnumerationBudget) -> Result<DimEstimate> {
    let letters = letters_of(f)?;
    let q = affordable_depth(letters.len(), budget)?;
    let sys = BlockSystem::build(f, q, budget)?;
    let prune = budget.mode == EnumerationMode::Exploratory;
    let value = bisect_from_above(|t| sys.certifies(t, true, prune))
        .ok_or(GasketError::BudgetExceeded)?;
    Ok(DimEstimate {
        value,
        depth: q,
        certified: budget.mode == EnumerationMode::Certified,
    })
}

/// Certified lower bound for dim_H of a finite subsystem.
pub fn dim_lower_bound(f: &Subsystem, budget: &EnumerationBudget) -> Result<DimEstimate> {
    let letters = letters_of(f)?;
    let q = affordable_depth(letters.len(), budget)?;
    let sys = BlockSystem::build(f, q, budget)?;
    let prune = budget.mode == EnumerationMode::Exploratory;
    let value = bisect_from_below(|t| sys.certifies(t, false, prune))
        .ok_or(GasketError::BudgetExceeded)?;
    Ok(DimEstimate {
        value,
        depth: q,
        certified: budget.mode == EnumerationMode::Certified,
    })
}

/// Post-hoc re-check of an upper-bound certificate at depth q.
pub fn dim_upper_certificate(f: &Subsystem, q: u32, t: f64) -> Result<bool> {
    let budget = EnumerationBudget {
        max_words: u64::MAX,
        max_depth: q,
        mode: EnumerationMode::Certified,
    };
    Ok(BlockSystem::build(f, q, &budget)?.certifies(t, true, false))
}

/// Post-hoc re-check of a lower-bound certificate at depth q.
pub fn dim_lower_certificate(f: &Subsystem, q: u32, t: f64) -> Result<bool> {
    let budget = EnumerationBudget {
        max_words: u64::MAX,
        max_depth: q,
        mode: EnumerationMode::Certified,
    };
    Ok(BlockSystem::build(f, q, &budget)?.certifies(t, false, false))
}

/// Both sides at once, sharing a single word enumeration.
pub fn dim_bracket(f: &Subsystem, budget: &EnumerationBudget) -> Result<DimBracket> {
    let letters = letters_of(f)?;
    let q = affordable_depth(letters.len(), budget)?;
    let sys = BlockSystem::build(f, q, budget)?;
    let prune = budget.mode == EnumerationMode::Exploratory;
    let upper = bisect_from_above(|t| sys.certifies(t, true, prune))
        .ok_or(GasketError::BudgetExceeded)?;
    let lower = bisect_from_below(|t| sys.certifies(t, false, prune))
        .ok_or(GasketError::BudgetExceeded)?;
    Ok(DimBracket {
        lower,
        upper,
        depth_lower: q,
        depth_upper: q,
        subsystem: f.clone(),
        certified: budget.mode == EnumerationMode::Certified,
    })
}

// ---------------------------------------------------------------------------
// Cofinite systems: depth-one matrix with residual tail states.
// ---------------------------------------------------------------------------

/// Conditioning data for a cofinite system truncated at T: image disks of
/// the first T index levels on the enlarged domain B(0, 1+ρ), plus three
/// residual disks at the rotation fixed points that absorb every deeper
/// letter's image. ρ is grown until the residual radius fits inside it.
pub struct CofiniteSystem {
    truncation: u32,
    heads: Vec<Letter>,
    disks: Vec<Disk>,
    states: usize,
    /// sup of |φ′_head| per (state, head), t-independent
    head_sup: Vec<RigorousScalar>,
    /// per (state, parity): exact per-letter sups for n in (T, 6T]
    tail_terms: Vec<Vec<RigorousScalar>>,
    /// per (state, parity): uniform sup bound past 6T
    tail_uniform: Vec<RigorousScalar>,
    tail_cut: u32,
}

fn parity_of(k: u32) -> usize {
    // θ_k = +2π/3 for even k, −2π/3 for odd
    (k % 2) as usize
}

fn residual_class(k: u32) -> usize {
    match k % 3 {
        1 => 0,
        2 => 1,
        _ => 2,
    }
}

fn c_inf(parity: usize) -> RigorousComplex {
    let l = sqrt3();
    let one = RigorousScalar::point(1.0);
    let eith = if parity == 0 {
        third_root_of_unity(1)
    } else {
        third_root_of_unity(2)
    };
    -(eith * RigorousComplex::from_real(l - one)) - RigorousComplex::one()
}

fn d_inf(parity: usize) -> RigorousComplex {
    let l = sqrt3();
    let one = RigorousScalar::point(1.0);
    let eith = if parity == 0 {
        third_root_of_unity(1)
    } else {
        third_root_of_unity(2)
    };
    -eith + RigorousComplex::from_real(l + one)
}

impl CofiniteSystem {
    pub fn build(truncation: u32, excluded: &[u32]) -> Result<Self> {
        assert!(truncation >= 2, "truncation too small to condition on");
        assert!(
            excluded.iter().all(|&n| n <= truncation),
            "truncation must reach past every excluded index"
        );
        let l = sqrt3();
        // Fixed point for the enlarged-domain radius: start near 2λ/(T+1)
        // and grow by 10% past the implied residual radius until it fits.
        let mut rho = 2.0 * l.midpoint() / (truncation as f64 + 1.0);
        let mut r_res = tail_image_radius(truncation, rho)?;
        let mut settled = false;
        for _ in 0..40 {
            if r_res.upper <= rho {
                settled = true;
                break;
            }
            rho = 1.1 * r_res.upper;
            r_res = tail_image_radius(truncation, rho)?;
        }
        if !settled {
            return Err(GasketError::MajorantFailure);
        }
        let dom_radius = RigorousScalar::point(1.0) + RigorousScalar::point(rho);
        let dom = Disk::new(RigorousComplex::zero(), dom_radius);

        let heads: Vec<Letter> = (1..=truncation)
            .filter(|n| !excluded.contains(n))
            .flat_map(|n| (1..=6).map(move |k| Letter::new(k, n)))
            .collect();
        let mut disks: Vec<Disk> = heads
            .iter()
            .map(|&lt| map_disk(&generator(lt), &dom))
            .collect::<Result<_>>()?;
        for d in &disks {
            // forward invariance of the enlarged domain
            if !(d.center.abs() + d.radius - dom_radius).surely_le(0.0) {
                return Err(GasketError::MajorantFailure);
            }
        }
        for class in 0..3 {
            let center = match class {
                0 => third_root_of_unity(1),
                1 => third_root_of_unity(2),
                _ => third_root_of_unity(0),
            };
            disks.push(Disk::new(center, r_res));
        }
        let states = disks.len();

        // Tail letters must keep their pole outside every state disk; the
        // uniform check |d∞| > (1+ρ)(|c∞| + λ/(T+1)) covers all of them.
        for parity in 0..2 {
            let lhs = d_inf(parity).abs();
            let rhs = dom_radius
                * (c_inf(parity).abs() + l / RigorousScalar::point(truncation as f64 + 1.0));
            if !(lhs - rhs).surely_positive() {
                return Err(GasketError::MajorantFailure);
            }
        }

        let head_sup: Vec<RigorousScalar> = (0..states * heads.len())
            .into_par_iter()
            .map(|idx| -> Result<RigorousScalar> {
                let e = idx / heads.len();
                let lt = heads[idx % heads.len()];
                let m = generator(lt);
                let (_, sup) = extrema_with_det(&m, &disks[e], generator_det_abs(lt.n))?;
                Ok(sup)
            })
            .collect::<Result<_>>()?;

        // Exact tail sups for n in (T, 6T]: the letter matrices depend on n
        // through c_n = c∞ − λ/n and d_n = d∞ + λ(λ+1)/n, so on a state
        // disk B(z₀, r): |c_n z₀ + d_n| = |P + Q/n| with P = c∞z₀ + d∞ and
        // Q = λ(λ+1 − z₀).
        let tail_cut = 6 * truncation;
        let one = RigorousScalar::point(1.0);
        let tail_data: Vec<(Vec<RigorousScalar>, RigorousScalar)> = (0..states * 2)
            .into_par_iter()
            .map(|idx| -> Result<(Vec<RigorousScalar>, RigorousScalar)> {
                let e = idx / 2;
                let parity = idx % 2;
                let z0 = disks[e].center;
                let r = disks[e].radius;
                let ci = c_inf(parity);
                let di = d_inf(parity);
                let p = ci * z0 + di;
                let q = RigorousComplex::from_real(l) * (RigorousComplex::from_real(l + one) - z0);
                let mut terms = Vec::with_capacity((tail_cut - truncation) as usize);
                for n in (truncation + 1)..=tail_cut {
                    let nn = RigorousScalar::point(n as f64);
                    let den = (p + q.scale(one / nn)).abs()
                        - r * (ci - RigorousComplex::from_real(l / nn)).abs();
                    if !den.surely_positive() {
                        return Err(GasketError::PoleInDomain);
                    }
                    terms.push(RigorousScalar::point(9.0) / nn.sqr() / den.sqr());
                }
                let cut = RigorousScalar::point(tail_cut as f64);
                let den_u = p.abs() - q.abs() / cut - r * (ci.abs() + l / cut);
                if !den_u.surely_positive() {
                    return Err(GasketError::PoleInDomain);
                }
                let uniform = RigorousScalar::point(9.0) / den_u.sqr();
                Ok((terms, uniform))
            })
            .collect::<Result<_>>()?;
        let mut tail_terms = Vec::with_capacity(states * 2);
        let mut tail_uniform = Vec::with_capacity(states * 2);
        for (terms, uniform) in tail_data {
            tail_terms.push(terms);
            tail_uniform.push(uniform);
        }

        Ok(Self {
            truncation,
            heads,
            disks,
            states,
            head_sup,
            tail_terms,
            tail_uniform,
            tail_cut,
        })
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// The conditioning disks: head images first, then the three residual
    /// disks at the rotation fixed points.
    pub fn state_disks(&self) -> &[Disk] {
        &self.disks
    }

    /// Σ over tail letters n > T of sup^t for one (state, parity): the
    /// exact terms up to the cut plus an integral-test remainder.
    fn tail_sum(&self, e: usize, parity: usize, t: f64) -> Result<RigorousScalar> {
        if t <= 0.5 {
            return Err(GasketError::TailDiverges);
        }
        let t_iv = RigorousScalar::point(t);
        let mut acc = RigorousScalar::point(0.0);
        for term in &self.tail_terms[e * 2 + parity] {
            acc = acc + term.pow(t_iv);
        }
        let two_t_minus_1 = RigorousScalar::point(2.0) * t_iv - RigorousScalar::point(1.0);
        let cut = RigorousScalar::point(self.tail_cut as f64);
        let exponent = RigorousScalar::point(1.0) - RigorousScalar::point(2.0) * t_iv;
        let remainder =
            self.tail_uniform[e * 2 + parity].pow(t_iv) * cut.pow(exponent) / two_t_minus_1;
        Ok(acc + remainder)
    }

    /// Whether the subinvariance certificate holds at t, i.e. whether t is
    /// a certified upper bound for the full cofinite dimension.
    pub fn certifies_upper(&self, t: f64) -> Result<bool> {
        if t <= 0.5 {
            return Err(GasketError::TailDiverges);
        }
        let states = self.states;
        let h = self.heads.len();
        let t_iv = RigorousScalar::point(t);
        // collapsed matrix: head columns target their own disk, tail sums
        // target the three residual classes
        let m: Vec<RigorousScalar> = (0..states)
            .into_par_iter()
            .flat_map_iter(|e| {
                let mut row = vec![RigorousScalar::point(0.0); states];
                for (i, _) in self.heads.iter().enumerate() {
                    row[i] = self.head_sup[e * h + i].pow(t_iv);
                }
                for k in 1..=6u32 {
                    let target = h + residual_class(k);
                    let ts = self
                        .tail_sum(e, parity_of(k), t)
                        .expect("t checked above");
                    row[target] = row[target] + ts;
                }
                row.into_iter()
            })
            .collect();
        let mid: Vec<f64> = m.iter().map(|v| v.midpoint()).collect();
        let u = perron_vector(&mid, states);
        for e in 0..states {
            let mut y = RigorousScalar::point(0.0);
            for f in 0..states {
                y = y + m[e * states + f] * RigorousScalar::point(u[f]);
            }
            if !(y.upper <= u[e]) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Certified upper bound for a cofinite system's dimension. The truncation
/// is clamped to what the budget affords; any truncation yields a valid
/// bound, deeper ones are merely tighter.
pub fn dim_upper_bound_cofinite(
    f: &Subsystem,
    truncation: u32,
    budget: &EnumerationBudget,
) -> Result<DimEstimate> {
    let excluded = match f {
        Subsystem::Cofinite { excluded } => excluded.clone(),
        Subsystem::FiniteSet(_) => {
            return Err(GasketError::Parse(
                "cofinite bound requires a cofinite subsystem".into(),
            ))
        }
    };
    let max_excl = excluded.iter().copied().max().unwrap_or(0);
    // states ≈ 6T+3; cap the implied matrix size by the word budget
    let budget_cap = (((budget.max_words as f64).sqrt() - 3.0) / 6.0).floor() as u32;
    let eff = truncation.min(budget_cap.max(1)).max(max_excl.max(2));
    let sys = CofiniteSystem::build(eff, &excluded)?;
    let value = bisect_from_above(|t| sys.certifies_upper(t).unwrap_or(false))
        .ok_or(GasketError::BudgetExceeded)?;
    Ok(DimEstimate {
        value,
        depth: eff,
        certified: true,
    })
}

// ---------------------------------------------------------------------------
// Tail enclosures for the depth-one partition function.
// ---------------------------------------------------------------------------

/// Exact terms taken before switching to integral bounds.
const Z1_PARTIAL_TERMS: u32 = 20_000;

/// Enclosure of the depth-one tail 6·Σ_{n>M} v(n)^t: exact partial sums,
/// then integral bounds with the 0.45/3.821 coefficient envelopes.
pub fn z1_tail_bounds(t: RigorousScalar, m: u32) -> Result<(RigorousScalar, RigorousScalar)> {
    if !(t.lower > 0.5) {
        return Err(GasketError::TailDiverges);
    }
    let six = RigorousScalar::point(6.0);
    let mut partial = RigorousScalar::point(0.0);
    let cut = m + Z1_PARTIAL_TERMS;
    for n in (m + 1)..=cut {
        partial = partial + phi_sup_norm(n).pow(t);
    }
    let one = RigorousScalar::point(1.0);
    let two = RigorousScalar::point(2.0);
    let two_t_minus_1 = two * t - one;
    let exponent = one - two * t;
    // Σ_{n>cut} (0.45/n²)^t  ≥  0.45^t ∫_{cut+1}^∞ x^{-2t} dx
    let lo_int = RigorousScalar::point(0.45).pow(t)
        * (RigorousScalar::point(cut as f64) + one).pow(exponent)
        / two_t_minus_1;
    // Σ_{n>cut} (3.821/n²)^t  ≤  3.821^t ∫_{cut}^∞ x^{-2t} dx
    let hi_int = RigorousScalar::point(3.821).pow(t)
        * RigorousScalar::point(cut as f64).pow(exponent)
        / two_t_minus_1;
    let lower = six * (partial + lo_int);
    let upper = six * (partial + hi_int);
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_depth_map_matches_word_counts() {
        let b = EnumerationBudget::desk();
        assert_eq!(affordable_depth(6, &b).unwrap(), 7);
        assert_eq!(affordable_depth(18, &b).unwrap(), 4);
        assert_eq!(affordable_depth(156, &b).unwrap(), 2);
        let tiny = EnumerationBudget {
            max_words: 5,
            max_depth: 8,
            mode: EnumerationMode::Certified,
        };
        assert!(matches!(
            affordable_depth(6, &tiny),
            Err(GasketError::BudgetExceeded)
        ));
    }

    #[test]
    fn tail_bounds_diverge_at_half() {
        let e = z1_tail_bounds(RigorousScalar::point(0.5), 10);
        assert!(matches!(e, Err(GasketError::TailDiverges)));
    }
}
