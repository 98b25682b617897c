//! Complex enclosures: a rectangle of `RigorousScalar` per component.

use std::ops::{Add, Mul, Neg, Sub};

use crate::interval::{sqrt3, RigorousScalar};

/// Componentwise enclosure of one complex number.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RigorousComplex {
    pub re: RigorousScalar,
    pub im: RigorousScalar,
}

impl RigorousComplex {
    pub fn new(re: RigorousScalar, im: RigorousScalar) -> Self {
        Self { re, im }
    }

    pub fn point(re: f64, im: f64) -> Self {
        Self {
            re: RigorousScalar::point(re),
            im: RigorousScalar::point(im),
        }
    }

    pub fn zero() -> Self {
        Self::point(0.0, 0.0)
    }

    pub fn one() -> Self {
        Self::point(1.0, 0.0)
    }

    pub fn from_real(re: RigorousScalar) -> Self {
        Self {
            re,
            im: RigorousScalar::point(0.0),
        }
    }

    pub fn conj(self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn abs_sq(self) -> RigorousScalar {
        self.re.sqr() + self.im.sqr()
    }

    pub fn abs(self) -> RigorousScalar {
        self.abs_sq().sqrt()
    }

    pub fn scale(self, s: RigorousScalar) -> Self {
        Self {
            re: self.re * s,
            im: self.im * s,
        }
    }

    /// Multiplicative inverse, z̄ / |z|².
    pub fn recip(self) -> Self {
        let d = self.abs_sq();
        Self {
            re: self.re / d,
            im: -self.im / d,
        }
    }

    pub fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }

    pub fn contains(self, re: f64, im: f64) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    pub fn intersects(self, other: Self) -> bool {
        self.re.intersects(other.re) && self.im.intersects(other.im)
    }

    /// Largest componentwise half-width, a cheap diameter proxy.
    pub fn width(self) -> f64 {
        self.re.width().max(self.im.width())
    }
}

impl Add for RigorousComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for RigorousComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Neg for RigorousComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for RigorousComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

/// e^{2πi·k/3} for k mod 3 — the only rotations the system uses, held as
/// tight enclosures (−1/2 is exact; ±√3/2 comes from the shared λ).
pub fn third_root_of_unity(k: u32) -> RigorousComplex {
    let half_sqrt3 = sqrt3().scale_half();
    match k % 3 {
        0 => RigorousComplex::one(),
        1 => RigorousComplex::new(RigorousScalar::point(-0.5), half_sqrt3),
        _ => RigorousComplex::new(RigorousScalar::point(-0.5), -half_sqrt3),
    }
}

impl RigorousScalar {
    /// Exact halving (binary scaling never rounds).
    pub fn scale_half(self) -> Self {
        Self {
            lower: 0.5 * self.lower,
            upper: 0.5 * self.upper,
        }
    }
}
