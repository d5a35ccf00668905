//! Gaussian rational numbers: exact complex numbers with rational real and
//! imaginary parts. These are the ground coefficients of every expression in
//! the crate; no floating point appears anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// A Gaussian rational `re + im*i`. `BigRational` keeps denominators positive
/// and in lowest terms, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GRat { re, im }
    }

    pub fn zero() -> Self {
        GRat::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GRat::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        GRat::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        GRat::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplicative inverse; panics on zero (callers check first).
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        let norm = &self.re * &self.re + &self.im * &self.im;
        GRat::new(&self.re / &norm, -&self.im / &norm)
    }

    /// Real part sign used to orient canonical scalings: positive when the
    /// real part is positive, or the real part is zero and the imaginary
    /// part is positive.
    pub fn is_canonical_positive(&self) -> bool {
        if !self.re.is_zero() {
            self.re.is_positive()
        } else {
            self.im.is_positive()
        }
    }
}

impl fmt::Debug for GRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for GRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            if self.im.is_one() {
                write!(f, "i")
            } else if (-&self.im).is_one() {
                write!(f, "-i")
            } else {
                write!(f, "{}*i", self.im)
            }
        } else {
            write!(f, "({}{}{}*i)", self.re, if self.im.is_positive() { "+" } else { "" }, self.im)
        }
    }
}

impl Add for &GRat {
    type Output = GRat;
    fn add(self, rhs: &GRat) -> GRat {
        GRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GRat {
    type Output = GRat;
    fn sub(self, rhs: &GRat) -> GRat {
        GRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GRat {
    type Output = GRat;
    fn mul(self, rhs: &GRat) -> GRat {
        // (a+bi)(c+di) = (ac-bd) + (ad+bc)i
        GRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &GRat {
    type Output = GRat;
    fn div(self, rhs: &GRat) -> GRat {
        self * &rhs.inv()
    }
}

impl Neg for &GRat {
    type Output = GRat;
    fn neg(self) -> GRat {
        GRat::new(-&self.re, -&self.im)
    }
}

impl AddAssign<&GRat> for GRat {
    fn add_assign(&mut self, rhs: &GRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GRat> for GRat {
    fn sub_assign(&mut self, rhs: &GRat) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GRat> for GRat {
    fn mul_assign(&mut self, rhs: &GRat) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let i = GRat::i();
        assert_eq!(&i * &i, GRat::from_int(-1));
    }

    #[test]
    fn inverse_roundtrip() {
        let z = GRat::new(
            BigRational::new(BigInt::from(3), BigInt::from(7)),
            BigRational::new(BigInt::from(-2), BigInt::from(5)),
        );
        assert!((&z * &z.inv()).is_one());
    }
}
