//! Rational functions of the free parameters, kept in canonical form:
//! gcd-cancelled, with a monic denominator.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{EvalError, ExactError};
use crate::expr::EvalContext;
use crate::poly::{poly_div_exact, poly_gcd, Polynomial, VarSet};
use crate::scalar::{gauss, gauss_int, Complex64, GaussianRational, Rational, Scalar};
use crate::ParamPoly;

use std::sync::Arc;

/// Quotient of parameter polynomials; equality is structural because the
/// representation is canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    num: ParamPoly,
    den: ParamPoly,
}

impl Eq for RationalFunction {}

impl RationalFunction {
    /// Canonicalize a quotient: cancel the gcd and make the denominator monic.
    pub fn new(num: ParamPoly, den: ParamPoly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        let (num, den) = Polynomial::unify(&num, &den)?;
        if num.is_zero() {
            return Ok(RationalFunction {
                den: Polynomial::one_over(num.vars()),
                num,
            });
        }
        let g = poly_gcd(&num, &den);
        let mut num = poly_div_exact(&num, &g).expect("gcd divides numerator");
        let mut den = poly_div_exact(&den, &g).expect("gcd divides denominator");
        let lc = den.lead().expect("nonzero denominator").1.clone();
        num = num.map_coeffs(|c| c.field_div(&lc));
        den = den.map_coeffs(|c| c.field_div(&lc));
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: ParamPoly) -> Self {
        RationalFunction {
            den: Polynomial::one_over(p.vars()),
            num: p,
        }
    }

    pub fn constant(vars: &Arc<VarSet>, c: GaussianRational) -> Self {
        RationalFunction::from_poly(Polynomial::constant(vars, c))
    }

    pub fn from_int(n: i64) -> Self {
        RationalFunction::constant(&VarSet::empty(), gauss_int(n))
    }

    pub fn from_rat(r: Rational) -> Self {
        RationalFunction::constant(&VarSet::empty(), gauss(r, Rational::zero()))
    }

    /// The parameter with the given index, as a rational function.
    pub fn generator(vars: &Arc<VarSet>, idx: usize) -> Self {
        RationalFunction::from_poly(Polynomial::var(vars, idx))
    }

    pub fn num(&self) -> &ParamPoly {
        &self.num
    }

    pub fn den(&self) -> &ParamPoly {
        &self.den
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        self.num.vars()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    /// Constant value when both sides are free of parameters.
    pub fn as_gauss(&self) -> Option<GaussianRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n.field_div(&d))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(
            RationalFunction::new(self.den.clone(), self.num.clone())
                .expect("nonzero numerator"),
        )
    }

    pub fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl std::ops::Add for RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: RationalFunction) -> RationalFunction {
        let n = &self.num.checked_mul(&rhs.den).expect("ring")
            + &rhs.num.checked_mul(&self.den).expect("ring");
        let d = self.den.checked_mul(&rhs.den).expect("ring");
        RationalFunction::new(n, d).expect("nonzero denominator")
    }
}

impl std::ops::Sub for RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: RationalFunction) -> RationalFunction {
        self + (-rhs)
    }
}

impl std::ops::Mul for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: RationalFunction) -> RationalFunction {
        let n = self.num.checked_mul(&rhs.num).expect("ring");
        let d = self.den.checked_mul(&rhs.den).expect("ring");
        RationalFunction::new(n, d).expect("nonzero denominator")
    }
}

impl std::ops::Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den,
        }
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        let vars = VarSet::empty();
        RationalFunction {
            num: Polynomial::zero_over(&vars),
            den: Polynomial::one_over(&vars),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        let vars = VarSet::empty();
        RationalFunction {
            num: Polynomial::one_over(&vars),
            den: Polynomial::one_over(&vars),
        }
    }

    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
}

fn needs_parens(s: &str) -> bool {
    s.contains([' ', '+', '-', '*', '^', '/'])
}

impl Scalar for RationalFunction {
    fn field_div(&self, other: &Self) -> Self {
        self.clone() * other.inv().expect("division by zero rational function")
    }

    fn canon_cmp(&self, other: &Self) -> Ordering {
        self.num
            .canon_cmp(&other.num)
            .then_with(|| self.den.canon_cmp(&other.den))
    }

    fn render(&self) -> String {
        if self.den.is_one() {
            return self.num.render();
        }
        let num = if self.num.nterms() > 1 {
            format!("({})", self.num.render())
        } else {
            self.num.render()
        };
        let den = {
            let s = self.den.render();
            if needs_parens(&s) {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{num}/{den}")
    }

    fn atomic(&self) -> bool {
        self.den.is_one() && self.num.nterms() <= 1
    }

    fn is_display_negative(&self) -> bool {
        match self.num.lead() {
            Some((_, c)) => c.is_display_negative(),
            None => false,
        }
    }

    fn to_complex(&self, ctx: &EvalContext) -> Result<Complex64, EvalError> {
        let n = self.num.eval(ctx)?;
        let d = self.den.eval(ctx)?;
        if d.norm() == 0.0 {
            return Err(EvalError::Pole(self.render()));
        }
        Ok(n / d)
    }
}

/// Expression form of a parameter polynomial.
pub fn poly_to_expr(p: &ParamPoly) -> crate::expr::Expr {
    use crate::expr::Expr;
    let mut terms = Vec::new();
    for (m, c) in p.iter() {
        let mut factors = vec![Expr::Const(c.clone())];
        for (i, &e) in m.0.iter().enumerate() {
            if e == 1 {
                factors.push(Expr::sym(p.vars().name(i)));
            } else if e > 1 {
                factors.push(Expr::pow(Expr::sym(p.vars().name(i)), e as i64));
            }
        }
        terms.push(Expr::Prod(factors));
    }
    Expr::Sum(terms).canonical()
}

/// Expression form of a rational function; the denominator becomes a
/// negative power.
pub fn rf_to_expr(rf: &RationalFunction) -> crate::expr::Expr {
    use crate::expr::Expr;
    let n = poly_to_expr(rf.num());
    if rf.den().is_one() {
        return n;
    }
    let d = poly_to_expr(rf.den());
    Expr::prod(vec![n, Expr::pow(d, -1)]).canonical()
}

/// Positive rational content of a nonzero parameter polynomial: the gcd of
/// all rational parts, so that `p / content` has coprime integer
/// coefficients. Zero for the zero polynomial.
pub fn rational_content(p: &ParamPoly) -> Rational {
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    let mut push = |r: &Rational| {
        if !r.is_zero() {
            num_gcd = num_gcd.gcd(r.numer());
            den_lcm = den_lcm.lcm(r.denom());
        }
    };
    for (_, c) in p.iter() {
        push(&c.re);
        push(&c.im);
    }
    if num_gcd.is_zero() {
        return Rational::zero();
    }
    Rational::new(num_gcd.abs(), den_lcm)
}
