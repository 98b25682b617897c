//! Möbius transformations as 2×2 complex matrices, with rigorous disk
//! images, derivative extremization, and the three-point circle.

use crate::complex::RigorousComplex;
use crate::error::{GasketError, Result};
use crate::interval::RigorousScalar;

/// The matrix (a b; c d) acting as z ↦ (az+b)/(cz+d).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct MoebiusMap {
    pub a: RigorousComplex,
    pub b: RigorousComplex,
    pub c: RigorousComplex,
    pub d: RigorousComplex,
}

/// A closed disk: center plus nonnegative radius.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Disk {
    pub center: RigorousComplex,
    pub radius: RigorousScalar,
}

impl Disk {
    pub fn new(center: RigorousComplex, radius: RigorousScalar) -> Self {
        debug_assert!(radius.upper >= 0.0);
        Self {
            center,
            radius: RigorousScalar::from_bounds(radius.lower.max(0.0), radius.upper),
        }
    }

    pub fn unit() -> Self {
        Self::new(RigorousComplex::zero(), RigorousScalar::point(1.0))
    }

    /// B(0, r) for a representable r.
    pub fn centered(r: f64) -> Self {
        Self::new(RigorousComplex::zero(), RigorousScalar::point(r))
    }

    /// Certified containment of this disk inside `outer`
    /// (|c1 − c2| + r1 ≤ r2 on sure endpoints).
    pub fn surely_inside(&self, outer: &Disk) -> bool {
        let gap = (self.center - outer.center).abs() + self.radius - outer.radius;
        gap.surely_le(0.0)
    }
}

impl MoebiusMap {
    pub fn new(
        a: RigorousComplex,
        b: RigorousComplex,
        c: RigorousComplex,
        d: RigorousComplex,
    ) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self {
            a: RigorousComplex::one(),
            b: RigorousComplex::zero(),
            c: RigorousComplex::zero(),
            d: RigorousComplex::one(),
        }
    }

    /// Rotation z ↦ wz for |w| = 1.
    pub fn rotation(w: RigorousComplex) -> Self {
        Self {
            a: w,
            b: RigorousComplex::zero(),
            c: RigorousComplex::zero(),
            d: RigorousComplex::one(),
        }
    }

    /// ad − bc. Fine for single maps; long composed words track their
    /// determinant as a running product instead, because the difference
    /// cancels catastrophically once entries dwarf the determinant.
    pub fn det(&self) -> RigorousComplex {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: RigorousComplex) -> RigorousComplex {
        (self.a * z + self.b).div(self.c * z + self.d)
    }

    fn is_exactly_affine(&self) -> bool {
        self.c == RigorousComplex::zero()
    }
}

/// Matrix product M₁·M₂, representing z ↦ m1(m2(z)).
pub fn compose(m1: &MoebiusMap, m2: &MoebiusMap) -> MoebiusMap {
    MoebiusMap {
        a: m1.a * m2.a + m1.b * m2.c,
        b: m1.a * m2.b + m1.b * m2.d,
        c: m1.c * m2.a + m1.d * m2.c,
        d: m1.c * m2.b + m1.d * m2.d,
    }
}

/// |m′(z)| = |det| / |cz+d|².
pub fn deriv_magnitude(m: &MoebiusMap, z: RigorousComplex) -> Result<RigorousScalar> {
    let den = (m.c * z + m.d).abs_sq();
    if !den.surely_positive() {
        return Err(GasketError::PoleProximity);
    }
    Ok(m.det().abs() / den)
}

/// Min and max of |m′| over a closed disk, via the extremes of |cz+d|:
/// sup = |det|/(|cz₀+d| − r|c|)², inf = |det|/(|cz₀+d| + r|c|)².
pub fn deriv_extrema_on_disk(
    m: &MoebiusMap,
    dom: &Disk,
) -> Result<(RigorousScalar, RigorousScalar)> {
    let det_abs = m.det().abs();
    extrema_with_det(m, dom, det_abs)
}

/// Extremization with the determinant magnitude supplied by the caller —
/// the workhorse for composed words, whose |det| is a per-letter product.
pub fn extrema_with_det(
    m: &MoebiusMap,
    dom: &Disk,
    det_abs: RigorousScalar,
) -> Result<(RigorousScalar, RigorousScalar)> {
    let at_center = (m.c * dom.center + m.d).abs();
    let c_abs = m.c.abs();
    let near = at_center - dom.radius * c_abs;
    if !near.surely_positive() {
        return Err(GasketError::PoleInDomain);
    }
    let far = at_center + dom.radius * c_abs;
    let sup = det_abs / near.sqr();
    let inf = det_abs / far.sqr();
    Ok((inf, sup))
}

/// Image of a disk: the center is the image of the pole's reflection across
/// the boundary, and the radius reaches any boundary point's image.
pub fn map_disk(m: &MoebiusMap, dom: &Disk) -> Result<Disk> {
    if m.is_exactly_affine() {
        let scale = m.a.div(m.d).abs();
        return Ok(Disk::new(m.apply(dom.center), scale * dom.radius));
    }
    let at_center = (m.c * dom.center + m.d).abs();
    if !(at_center - dom.radius * m.c.abs()).surely_positive() {
        return Err(GasketError::PoleInDomain);
    }
    let pole = (-m.d).div(m.c);
    let offset = pole - dom.center;
    // reflection of the pole across ∂dom, then any boundary point
    let reflected = dom.center + RigorousComplex::from_real(dom.radius.sqr()).div(offset.conj());
    let boundary = dom.center + offset.scale(dom.radius / offset.abs());
    let center = m.apply(reflected);
    let radius = (m.apply(boundary) - center).abs();
    Ok(Disk::new(center, radius))
}

/// Circle through three non-collinear points (circumcenter form).
pub fn circle_through(
    p1: RigorousComplex,
    p2: RigorousComplex,
    p3: RigorousComplex,
) -> Result<Disk> {
    let two = RigorousScalar::point(2.0);
    let area2 = (p2.re - p1.re) * (p3.im - p1.im) - (p2.im - p1.im) * (p3.re - p1.re);
    if !area2.excludes_zero() {
        return Err(GasketError::CollinearPoints);
    }
    let d = two * area2;
    let s1 = p1.abs_sq();
    let s2 = p2.abs_sq();
    let s3 = p3.abs_sq();
    let ux = (s1 * (p2.im - p3.im) + s2 * (p3.im - p1.im) + s3 * (p1.im - p2.im)) / d;
    let uy = (s1 * (p3.re - p2.re) + s2 * (p1.re - p3.re) + s3 * (p2.re - p1.re)) / d;
    let center = RigorousComplex::new(ux, uy);
    // the exact radius lies in each distance enclosure; intersect for tightness
    let r1 = (p1 - center).abs();
    let r2 = (p2 - center).abs();
    let r3 = (p3 - center).abs();
    let radius = RigorousScalar::from_bounds(
        r1.lower.max(r2.lower).max(r3.lower),
        r1.upper.min(r2.upper).min(r3.upper),
    );
    Ok(Disk::new(center, radius))
}

/// All 2×2 minors of the stacked coefficient rows enclose zero — the
/// certified version of "equal up to a scalar multiple".
pub fn proportional(m1: &MoebiusMap, m2: &MoebiusMap) -> bool {
    let u = [m1.a, m1.b, m1.c, m1.d];
    let v = [m2.a, m2.b, m2.c, m2.d];
    for i in 0..4 {
        for j in (i + 1)..4 {
            let minor = u[i] * v[j] - u[j] * v[i];
            if !minor.contains(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}
