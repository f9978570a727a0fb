//! Exact scalars: arbitrary-precision rationals, Gaussian rationals, and the
//! coefficient-field abstraction used by the polynomial layer.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{EvalError, ExactError};
use crate::expr::EvalContext;

/// Arbitrary-precision rational, always reduced, positive denominator.
pub type Rational = num_rational::BigRational;

/// Element of Q(i): complex number with rational real and imaginary parts.
pub type GaussianRational = Complex<Rational>;

/// Double-precision complex number used by the numeric layer.
pub type Complex64 = num_complex::Complex64;

/// Reduced rational from a numerator/denominator pair.
pub fn rat_checked(num: i64, den: i64) -> Result<Rational, ExactError> {
    if den == 0 {
        return Err(ExactError::ZeroDenominator);
    }
    Ok(Rational::new(BigInt::from(num), BigInt::from(den)))
}

/// Rational from small integers; panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    rat_checked(num, den).expect("nonzero denominator")
}

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Gaussian rational from real and imaginary parts.
pub fn gauss(re: Rational, im: Rational) -> GaussianRational {
    Complex::new(re, im)
}

/// Real Gaussian rational from an integer.
pub fn gauss_int(n: i64) -> GaussianRational {
    Complex::new(rat_int(n), rat_int(0))
}

/// Real Gaussian rational from a fraction; panics on zero denominator.
pub fn gauss_rat(num: i64, den: i64) -> GaussianRational {
    Complex::new(rat(num, den), rat_int(0))
}

/// The imaginary unit.
pub fn gauss_i() -> GaussianRational {
    Complex::new(rat_int(0), rat_int(1))
}

/// Total order on rationals (the natural one).
pub fn cmp_rational(a: &Rational, b: &Rational) -> Ordering {
    a.cmp(b)
}

/// Total order on Gaussian rationals: real part first, then imaginary.
pub fn cmp_gauss(a: &GaussianRational, b: &GaussianRational) -> Ordering {
    a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im))
}

/// Canonical text form of a rational: `3`, `-7/4`.
pub fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn render_imaginary_part(im: &Rational) -> String {
    if im.is_one() {
        "i".to_string()
    } else if (-im).is_one() {
        "-i".to_string()
    } else {
        format!("{}*i", render_rational(im))
    }
}

/// Canonical text form of a Gaussian rational: `2/3`, `-i`, `1-2*i`.
pub fn render_gauss(z: &GaussianRational) -> String {
    if z.im.is_zero() {
        render_rational(&z.re)
    } else if z.re.is_zero() {
        render_imaginary_part(&z.im)
    } else {
        let im = render_imaginary_part(&z.im);
        if im.starts_with('-') {
            format!("{}{}", render_rational(&z.re), im)
        } else {
            format!("{}+{}", render_rational(&z.re), im)
        }
    }
}

/// Rational to f64; errors when out of range.
pub fn rational_to_f64(r: &Rational) -> Result<f64, EvalError> {
    r.to_f64().ok_or(EvalError::OutOfRange)
}

/// Gaussian rational to a complex double.
pub fn gauss_to_c64(z: &GaussianRational) -> Result<Complex64, EvalError> {
    Ok(Complex64::new(rational_to_f64(&z.re)?, rational_to_f64(&z.im)?))
}

/// Coefficient field for [`Polynomial`](crate::poly::Polynomial).
///
/// Built on the num-traits `Zero`/`One` hooks plus exact division, a manual
/// total order (the complex scalars have no `Ord`), and canonical rendering.
/// Implemented by [`GaussianRational`] and by
/// [`RationalFunction`](crate::ratfunc::RationalFunction).
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + std::ops::Neg<Output = Self>
    + std::ops::Sub<Output = Self>
{
    /// Exact division; panics on zero divisor.
    fn field_div(&self, other: &Self) -> Self;

    /// Total order used for canonical layouts; agrees with `==`.
    fn canon_cmp(&self, other: &Self) -> Ordering;

    /// Canonical text form.
    fn render(&self) -> String;

    /// Whether `render` needs no parentheses when used as a product factor.
    fn atomic(&self) -> bool;

    /// Whether the canonical sign is negative (used to pull `-` out of terms).
    fn is_display_negative(&self) -> bool;

    /// Numeric value under the given symbol bindings.
    fn to_complex(&self, ctx: &EvalContext) -> Result<Complex64, EvalError>;
}

impl Scalar for GaussianRational {
    fn field_div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero scalar");
        self.clone() / other.clone()
    }

    fn canon_cmp(&self, other: &Self) -> Ordering {
        cmp_gauss(self, other)
    }

    fn render(&self) -> String {
        render_gauss(self)
    }

    fn atomic(&self) -> bool {
        self.re.is_zero() || self.im.is_zero()
    }

    fn is_display_negative(&self) -> bool {
        if self.re.is_zero() {
            self.im.is_negative()
        } else {
            self.re.is_negative()
        }
    }

    fn to_complex(&self, _ctx: &EvalContext) -> Result<Complex64, EvalError> {
        gauss_to_c64(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_constructors_reduce() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(3, -6), rat(-1, 2));
        assert_eq!(render_rational(&rat(3, -6)), "-1/2");
        assert!(rat_checked(1, 0).is_err());
    }

    #[test]
    fn gauss_arithmetic_is_exact() {
        let i = gauss_i();
        assert_eq!(i.clone() * i.clone(), gauss_int(-1));
        let z = gauss(rat(1, 3), rat(-2, 5));
        let w = z.clone() * z.clone().inv();
        assert_eq!(w, gauss_int(1));
    }

    #[test]
    fn gauss_rendering() {
        assert_eq!(render_gauss(&gauss_int(0)), "0");
        assert_eq!(render_gauss(&gauss_rat(-7, 4)), "-7/4");
        assert_eq!(render_gauss(&gauss_i()), "i");
        assert_eq!(render_gauss(&-gauss_i()), "-i");
        assert_eq!(render_gauss(&gauss(rat_int(1), rat_int(-2))), "1-2*i");
        assert_eq!(render_gauss(&gauss(rat(1, 2), rat(1, 3))), "1/2+1/3*i");
        assert_eq!(render_gauss(&gauss(rat_int(0), rat(2, 3))), "2/3*i");
    }

    #[test]
    fn canonical_order_is_total() {
        let vals = [
            gauss_int(-1),
            gauss_int(0),
            gauss_i(),
            -gauss_i(),
            gauss_rat(1, 2),
        ];
        for a in &vals {
            for b in &vals {
                let ab = cmp_gauss(a, b);
                let ba = cmp_gauss(b, a);
                assert_eq!(ab, ba.reverse());
                assert_eq!(ab == Ordering::Equal, a == b);
            }
        }
    }

    #[test]
    fn display_negative_pulls_sign() {
        assert!(gauss_int(-2).is_display_negative());
        assert!((-gauss_i()).is_display_negative());
        assert!(!gauss_i().is_display_negative());
        assert!(!gauss(rat_int(1), rat_int(-5)).is_display_negative());
    }
}
