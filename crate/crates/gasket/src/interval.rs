//! Outward-rounded interval arithmetic on `f64`.
//!
//! Hardware rounds to nearest, so every endpoint computation is followed by
//! a `next_down`/`next_up` nudge: correctly-rounded operations (+, −, ×, ÷,
//! sqrt) get one ulp of slack, library transcendentals (exp, ln, pow) get
//! [`TRANS_SLOP_ULPS`]. Bounds degrade to wider intervals, never to invalid
//! ones; division through zero saturates to the whole real line.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// `exp`, `ln` and `powf` come from the system libm, which does not promise
/// correct rounding. Measured errors are under 1 ulp and documented worst
/// cases under 2; four ulps of outward slack is a wide safety factor at
/// negligible cost to bound quality.
const TRANS_SLOP_ULPS: u32 = 4;

/// An outward-rounded enclosure of one real number.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RigorousScalar {
    pub lower: f64,
    pub upper: f64,
}

fn steps_down(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = x.next_down();
    }
    x
}

fn steps_up(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = x.next_up();
    }
    x
}

impl RigorousScalar {
    /// Degenerate enclosure of a value exactly representable in `f64`.
    pub fn point(x: f64) -> Self {
        debug_assert!(!x.is_nan());
        Self { lower: x, upper: x }
    }

    /// Enclosure from explicit endpoints.
    pub fn from_bounds(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "invalid enclosure [{lower}, {upper}]");
        Self { lower, upper }
    }

    /// Everything: the fallback when no finite bound can be offered.
    pub fn whole_line() -> Self {
        Self {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }

    pub fn width(self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn intersects(self, other: Self) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    /// Certified comparison: the enclosed value is surely ≤ `x`.
    pub fn surely_le(self, x: f64) -> bool {
        self.upper <= x
    }

    /// Certified comparison: the enclosed value is surely ≥ `x`.
    pub fn surely_ge(self, x: f64) -> bool {
        self.lower >= x
    }

    /// Certified strict positivity.
    pub fn surely_positive(self) -> bool {
        self.lower > 0.0
    }

    /// The enclosure excludes zero.
    pub fn excludes_zero(self) -> bool {
        self.lower > 0.0 || self.upper < 0.0
    }

    pub fn abs(self) -> Self {
        if self.lower >= 0.0 {
            self
        } else if self.upper <= 0.0 {
            -self
        } else {
            Self {
                lower: 0.0,
                upper: self.upper.max(-self.lower),
            }
        }
    }

    pub fn min(self, other: Self) -> Self {
        Self {
            lower: self.lower.min(other.lower),
            upper: self.upper.min(other.upper),
        }
    }

    pub fn max(self, other: Self) -> Self {
        Self {
            lower: self.lower.max(other.lower),
            upper: self.upper.max(other.upper),
        }
    }

    /// Square, tight across sign changes (never negative).
    pub fn sqr(self) -> Self {
        let a = self.lower * self.lower;
        let b = self.upper * self.upper;
        if self.lower >= 0.0 {
            Self::from_bounds(a.next_down().max(0.0), b.next_up())
        } else if self.upper <= 0.0 {
            Self::from_bounds(b.next_down().max(0.0), a.next_up())
        } else {
            Self::from_bounds(0.0, a.max(b).next_up())
        }
    }

    /// Square root; the negative part of sloppy enclosures is clipped at 0.
    pub fn sqrt(self) -> Self {
        debug_assert!(self.upper >= 0.0, "sqrt of a surely negative enclosure");
        let lo = self.lower.max(0.0).sqrt().next_down().max(0.0);
        let hi = self.upper.sqrt().next_up();
        Self::from_bounds(lo, hi)
    }

    /// Integer power by square-and-multiply; every step rounds outward, so
    /// validity holds for any n (f64::powi itself is not correctly rounded).
    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::point(1.0);
        }
        if n < 0 {
            return Self::point(1.0) / self.powi(-n);
        }
        let mut acc = Self::point(1.0);
        let mut base = self;
        let mut e = n as u32;
        loop {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.sqr();
        }
        acc
    }

    /// `self^t` for a nonnegative base. Corner evaluation is valid because
    /// x^t is monotone in x for fixed t and monotone in t for fixed x.
    pub fn pow(self, t: Self) -> Self {
        debug_assert!(self.lower >= -1e-300, "pow of a negative base");
        let base_lo = self.lower.max(0.0);
        let base_hi = self.upper;
        // Fast exact path: point exponent that is a small half-integer.
        // Hot certification loops evaluate s^t with t fixed; sqrt and powi
        // are correctly rounded, so this path is both faster and tighter.
        if t.lower == t.upper {
            let two_t = 2.0 * t.lower;
            if two_t.fract() == 0.0 && two_t.abs() <= 64.0 {
                let n = two_t as i32;
                let b = Self::from_bounds(base_lo, base_hi);
                return if n % 2 == 0 {
                    b.powi(n / 2)
                } else {
                    b.powi(n.div_euclid(2)) * b.sqrt()
                };
            }
        }
        let corners = [
            base_lo.powf(t.lower),
            base_lo.powf(t.upper),
            base_hi.powf(t.lower),
            base_hi.powf(t.upper),
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in corners {
            lo = lo.min(c);
            hi = hi.max(c);
        }
        Self::from_bounds(
            steps_down(lo, TRANS_SLOP_ULPS).max(0.0),
            steps_up(hi, TRANS_SLOP_ULPS),
        )
    }

    pub fn exp(self) -> Self {
        Self::from_bounds(
            steps_down(self.lower.exp(), TRANS_SLOP_ULPS).max(0.0),
            steps_up(self.upper.exp(), TRANS_SLOP_ULPS),
        )
    }

    pub fn ln(self) -> Self {
        debug_assert!(self.lower > 0.0, "ln of a non-positive enclosure");
        Self::from_bounds(
            steps_down(self.lower.ln(), TRANS_SLOP_ULPS),
            steps_up(self.upper.ln(), TRANS_SLOP_ULPS),
        )
    }
}

impl Add for RigorousScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_bounds(
            (self.lower + rhs.lower).next_down(),
            (self.upper + rhs.upper).next_up(),
        )
    }
}

impl Sub for RigorousScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_bounds(
            (self.lower - rhs.upper).next_down(),
            (self.upper - rhs.lower).next_up(),
        )
    }
}

impl Neg for RigorousScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            lower: -self.upper,
            upper: -self.lower,
        }
    }
}

impl Mul for RigorousScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let c = [
            self.lower * rhs.lower,
            self.lower * rhs.upper,
            self.upper * rhs.lower,
            self.upper * rhs.upper,
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in c {
            if x.is_nan() {
                // 0 × ∞ at a corner: give up tightness, stay valid
                return Self::whole_line();
            }
            lo = lo.min(x);
            hi = hi.max(x);
        }
        Self::from_bounds(lo.next_down(), hi.next_up())
    }
}

impl Div for RigorousScalar {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if rhs.lower <= 0.0 && rhs.upper >= 0.0 {
            return Self::whole_line();
        }
        let c = [
            self.lower / rhs.lower,
            self.lower / rhs.upper,
            self.upper / rhs.lower,
            self.upper / rhs.upper,
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in c {
            if x.is_nan() {
                return Self::whole_line();
            }
            lo = lo.min(x);
            hi = hi.max(x);
        }
        Self::from_bounds(lo.next_down(), hi.next_up())
    }
}

impl From<f64> for RigorousScalar {
    fn from(x: f64) -> Self {
        Self::point(x)
    }
}

/// Shared tight enclosure of λ = √3, the paper's single geometric constant.
pub fn sqrt3() -> RigorousScalar {
    RigorousScalar::point(3.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_bracket_exact_arithmetic() {
        let a = RigorousScalar::point(0.1);
        let b = RigorousScalar::point(0.3);
        let s = a + b;
        assert!(s.contains(0.4) || (s.lower <= 0.1 + 0.3 && 0.1 + 0.3 <= s.upper));
        assert!(s.width() < 1e-15);
    }

    #[test]
    fn sqrt3_squares_back_to_three() {
        let l = sqrt3();
        let sq = l.sqr();
        assert!(sq.contains(3.0));
        assert!(sq.width() < 1e-14);
    }

    #[test]
    fn division_through_zero_saturates() {
        let a = RigorousScalar::point(1.0);
        let b = RigorousScalar::from_bounds(-1.0, 1.0);
        let q = a / b;
        assert_eq!(q.lower, f64::NEG_INFINITY);
        assert_eq!(q.upper, f64::INFINITY);
    }

    #[test]
    fn pow_half_integer_matches_float_path() {
        let x = RigorousScalar::from_bounds(0.3, 0.3000000001);
        let fast = x.pow(RigorousScalar::point(1.5));
        let direct = 0.3_f64.powf(1.5);
        assert!(fast.contains(direct));
        assert!(fast.width() < 1e-9);
    }

    #[test]
    fn pow_interval_exponent_brackets_corners() {
        let x = RigorousScalar::from_bounds(2.0, 3.0);
        let t = RigorousScalar::from_bounds(0.25, 0.75);
        let p = x.pow(t);
        assert!(p.contains(2.0_f64.powf(0.25)));
        assert!(p.contains(3.0_f64.powf(0.75)));
        assert!(p.contains(2.5_f64.powf(0.5)));
    }

    #[test]
    fn sqr_straddling_zero_is_nonnegative() {
        let x = RigorousScalar::from_bounds(-2.0, 1.0);
        let s = x.sqr();
        assert_eq!(s.lower, 0.0);
        assert!(s.contains(4.0));
    }
}
