//! Scalar abstraction for the numerical kernels.
//!
//! Everything downstream of the special functions is written against
//! [`CScalar`], a minimal complex-field trait with two implementations:
//! hardware `Complex64` (the default) and [`Cdd`], a double-double complex
//! used when determinant cancellation exceeds what f64 can absorb.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Complex scalar usable by the generic special-function kernels.
pub trait CScalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(self) -> Complex64;
    /// Magnitude, accurate enough for truncation and pivoting decisions.
    fn mag(self) -> f64;
    fn is_finite_val(self) -> bool;
}

impl CScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn to_c64(self) -> Complex64 {
        self
    }
    fn mag(self) -> f64 {
        self.norm()
    }
    fn is_finite_val(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

// ---------------------------------------------------------------------------
// Double-double arithmetic (Dekker/Knuth error-free transforms).
// ---------------------------------------------------------------------------

/// Unevaluated sum of two doubles, `hi + lo`, with |lo| <= ulp(hi)/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + rhs.lo);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }
}

/// Double-double complex number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, rhs: Cdd) -> Cdd {
        Cdd {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, rhs: Cdd) -> Cdd {
        Cdd {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, rhs: Cdd) -> Cdd {
        Cdd {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, rhs: Cdd) -> Cdd {
        let den = rhs.re * rhs.re + rhs.im * rhs.im;
        Cdd {
            re: (self.re * rhs.re + self.im * rhs.im) / den,
            im: (self.im * rhs.re - self.re * rhs.im) / den,
        }
    }
}

impl CScalar for Cdd {
    fn zero() -> Self {
        Cdd {
            re: Dd::ZERO,
            im: Dd::ZERO,
        }
    }
    fn one() -> Self {
        Cdd {
            re: Dd::ONE,
            im: Dd::ZERO,
        }
    }
    fn from_c64(z: Complex64) -> Self {
        Cdd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    fn mag(self) -> f64 {
        self.to_c64().norm()
    }
    fn is_finite_val(self) -> bool {
        self.re.hi.is_finite() && self.im.hi.is_finite()
    }
}

/// Requested working precision. `Double` is the default; `Extended` routes
/// cancellation-prone determinant work through double-double arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Double,
    Extended,
}

impl Precision {
    /// Map a precision-bits request (e.g. from the CLI) onto a backend.
    pub fn from_bits(bits: u32) -> Precision {
        if bits <= 53 {
            Precision::Double
        } else {
            Precision::Extended
        }
    }
}
