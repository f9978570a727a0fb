//! Exact radical values `sign * outer * sqrt(radicand)` and finite sums of
//! such terms over distinct canonical radicands.
//!
//! Canonical radicand form: denominator cleared into the outer factor, the
//! square part of the rational content extracted, even monomial exponents
//! extracted, and `sqrt(-1)` folded into the Gaussian outer factor. Negative
//! symbolic content stays inside the radical.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;

use num_traits::{One, Signed, Zero};

use crate::error::EvalError;
use crate::expr::{EvalContext, Expr};
use crate::poly::{Monomial, Polynomial};
use crate::ratfunc::{rational_content, RationalFunction};
use crate::scalar::{gauss, gauss_i, Complex64, Rational, Scalar};
use crate::{ParamPoly, SysPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// Split a positive integer as `t^2 * s` with `s` squarefree.
fn square_split(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "square_split needs a positive integer");
    let mut m = n.clone();
    let mut t = BigInt::one();
    let mut s = BigInt::one();
    let r = m.sqrt();
    if &r * &r == m {
        return (r, BigInt::one());
    }
    let mut p = BigInt::from(2u8);
    let cap = BigInt::from(1_000_000u32);
    while &p * &p <= m && p <= cap {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            t *= p.pow(e / 2);
            if e % 2 == 1 {
                s *= &p;
            }
        }
        p += 1;
    }
    if !m.is_one() {
        let r = m.sqrt();
        if &r * &r == m {
            t *= r;
        } else {
            s *= m;
        }
    }
    (t, s)
}

/// sqrt of a positive rational as `coeff * sqrt(squarefree integer)`.
fn sqrt_rational(ct: &Rational) -> (Rational, BigInt) {
    // sqrt(a/b) = (ta*tb/b) * sqrt(sa*sb) for a = ta^2*sa, b = tb^2*sb.
    let (ta, sa) = square_split(ct.numer());
    let (tb, sb) = square_split(ct.denom());
    let coeff = Rational::new(ta * tb, ct.denom().clone());
    (coeff, sa * sb)
}

/// Exact value `sign * outer * sqrt(radicand)` in canonical form.
///
/// Invariants: the radicand is a polynomial (denominator 1); when it is 1 the
/// sign is `Plus` and the value is just `outer`; otherwise `outer` is
/// display-positive and flips live in `sign`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadicalValue {
    sign: Sign,
    outer: RationalFunction,
    radicand: RationalFunction,
}

impl RadicalValue {
    pub fn zero() -> RadicalValue {
        RadicalValue {
            sign: Sign::Plus,
            outer: RationalFunction::zero(),
            radicand: RationalFunction::one(),
        }
    }

    /// A radical-free value.
    pub fn from_rf(rf: RationalFunction) -> RadicalValue {
        RadicalValue {
            sign: Sign::Plus,
            outer: rf,
            radicand: RationalFunction::one(),
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn outer(&self) -> &RationalFunction {
        &self.outer
    }

    pub fn radicand(&self) -> &RationalFunction {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.outer.is_zero()
    }

    pub fn is_radical_free(&self) -> bool {
        self.radicand.is_one()
    }

    /// The value as a plain rational function, when radical-free.
    pub fn as_rf(&self) -> Option<&RationalFunction> {
        if self.is_radical_free() {
            Some(&self.outer)
        } else {
            None
        }
    }

    /// `outer` with the sign applied.
    pub fn signed_outer(&self) -> RationalFunction {
        match self.sign {
            Sign::Plus => self.outer.clone(),
            Sign::Minus => -self.outer.clone(),
        }
    }

    /// The exact square `outer^2 * radicand`.
    pub fn square(&self) -> RationalFunction {
        self.outer.square() * self.radicand.clone()
    }

    pub fn negated(&self) -> RadicalValue {
        if self.is_zero() {
            return self.clone();
        }
        if self.is_radical_free() {
            RadicalValue {
                sign: Sign::Plus,
                outer: -self.outer.clone(),
                radicand: self.radicand.clone(),
            }
        } else {
            RadicalValue {
                sign: self.sign.flip(),
                outer: self.outer.clone(),
                radicand: self.radicand.clone(),
            }
        }
    }

    /// Same magnitude with the requested sign (used to enumerate root pairs).
    pub fn with_sign(&self, s: Sign) -> RadicalValue {
        match s {
            Sign::Plus => {
                let mut v = self.clone();
                if v.is_radical_free() {
                    v
                } else {
                    v.sign = Sign::Plus;
                    v
                }
            }
            Sign::Minus => self.with_sign(Sign::Plus).negated(),
        }
    }

    /// Multiply by a radical-free factor, keeping canonical form.
    pub fn scaled(&self, rf: &RationalFunction) -> RadicalValue {
        canonicalize_radical(self.signed_outer() * rf.clone(), self.radicand.clone())
    }

    pub fn to_complex(&self, ctx: &EvalContext) -> Result<Complex64, EvalError> {
        let o = self.outer.to_complex(ctx)?;
        let r = self.radicand.to_complex(ctx)?;
        Ok(o * r.sqrt() * self.sign.factor())
    }

    /// Expression form; radical-free values render without `sqrt`.
    pub fn to_expr(&self) -> Expr {
        let outer = crate::ratfunc::rf_to_expr(&self.outer);
        let e = if self.is_radical_free() {
            outer
        } else {
            let rad = crate::ratfunc::rf_to_expr(&self.radicand);
            Expr::prod(vec![outer, Expr::func(crate::expr::Func::Sqrt, rad)])
        };
        let signed = match self.sign {
            Sign::Plus => e,
            Sign::Minus => Expr::prod(vec![Expr::int(-1), e]),
        };
        signed.canonical()
    }

    /// Display form `[-]outer*sqrt(radicand)` with the factors in place.
    pub fn render(&self) -> String {
        if self.is_radical_free() {
            return self.outer.render();
        }
        let sqrt_s = format!("sqrt({})", self.radicand.num().render());
        let body = if self.outer.is_one() {
            sqrt_s
        } else {
            let o = self.outer.render();
            if self.outer.atomic() {
                format!("{o}*{sqrt_s}")
            } else {
                format!("({o})*{sqrt_s}")
            }
        };
        match self.sign {
            Sign::Plus => body,
            Sign::Minus => format!("-{body}"),
        }
    }
}

/// Canonicalize `outer * sqrt(radicand)`.
pub fn canonicalize_radical(outer: RationalFunction, radicand: RationalFunction) -> RadicalValue {
    if outer.is_zero() || radicand.is_zero() {
        return RadicalValue::zero();
    }
    // Clear the denominator: sqrt(n/d) = sqrt(n*d)/d.
    let mut out = outer;
    let num = radicand.num().clone();
    let den = radicand.den().clone();
    if !den.is_one() {
        out = out * RationalFunction::new(Polynomial::one_over(den.vars()), den.clone())
            .expect("nonzero denominator");
    }
    let mut p: ParamPoly = num.checked_mul(&den).expect("same ring");

    // Rational content: extract its square part.
    let ct = rational_content(&p);
    p = p.map_coeffs(|c| {
        let d = gauss(ct.clone(), Rational::zero());
        c.field_div(&d)
    });
    let (coeff, crad) = sqrt_rational(&ct);
    out = out
        * RationalFunction::constant(p.vars(), gauss(coeff, Rational::zero()));

    // Even exponents of a single-term radicand move outside.
    if p.nterms() == 1 {
        let (m, c) = p.lead().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let half = Monomial(m.0.iter().map(|e| e / 2).collect());
        let rem = Monomial(m.0.iter().map(|e| e % 2).collect());
        if !half.is_unit() {
            let shift = Polynomial::from_terms(
                p.vars(),
                [(half, crate::scalar::gauss_int(1))],
            );
            out = out * RationalFunction::from_poly(shift);
            p = Polynomial::from_terms(p.vars(), [(rem, c)]);
        }
    }

    // Reattach the squarefree content.
    let crad_g = gauss(Rational::from_integer(crad), Rational::zero());
    p = p.scale(&crad_g);

    // Constant radicands: fold sqrt(-1) into the outer factor.
    if let Some(g) = p.as_constant() {
        if g.im.is_zero() && g.re.is_negative() {
            out = out * RationalFunction::constant(p.vars(), gauss_i());
            p = Polynomial::constant(p.vars(), -g);
        }
        if p.is_one() {
            return RadicalValue {
                sign: Sign::Plus,
                outer: out,
                radicand: RationalFunction::one(),
            };
        }
    }

    let radicand = RationalFunction::from_poly(p);
    if out.is_display_negative() {
        RadicalValue {
            sign: Sign::Minus,
            outer: -out,
            radicand,
        }
    } else {
        RadicalValue {
            sign: Sign::Plus,
            outer: out,
            radicand,
        }
    }
}

/// Radicand key ordered by the canonical polynomial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadKey(pub RationalFunction);

impl Ord for RadKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.canon_cmp(&other.0)
    }
}

impl PartialOrd for RadKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Finite sum `sum_k coeff_k * sqrt(k)` over distinct canonical radicands;
/// the key 1 holds the radical-free part. Closed under ring operations, with
/// inverses for sums of at most two terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RadicalSum {
    terms: BTreeMap<RadKey, RationalFunction>,
}

impl RadicalSum {
    pub fn zero() -> RadicalSum {
        RadicalSum::default()
    }

    pub fn one() -> RadicalSum {
        RadicalSum::from_rf(RationalFunction::one())
    }

    pub fn from_rf(rf: RationalFunction) -> RadicalSum {
        let mut s = RadicalSum::zero();
        s.add_term(RationalFunction::one(), rf);
        s
    }

    pub fn from_value(v: &RadicalValue) -> RadicalSum {
        let mut s = RadicalSum::zero();
        s.add_term(v.radicand.clone(), v.signed_outer());
        s
    }

    fn add_term(&mut self, radicand: RationalFunction, coeff: RationalFunction) {
        if coeff.is_zero() {
            return;
        }
        let key = RadKey(radicand);
        match self.terms.remove(&key) {
            None => {
                self.terms.insert(key, coeff);
            }
            Some(old) => {
                let sum = old + coeff;
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RadKey, &RationalFunction)> {
        self.terms.iter()
    }

    /// Coefficient of `sqrt(1)`.
    pub fn rational_part(&self) -> RationalFunction {
        self.terms
            .get(&RadKey(RationalFunction::one()))
            .cloned()
            .unwrap_or_else(RationalFunction::zero)
    }

    pub fn add(&self, other: &RadicalSum) -> RadicalSum {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.0.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> RadicalSum {
        let mut out = RadicalSum::zero();
        for (k, c) in &self.terms {
            out.add_term(k.0.clone(), -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &RadicalSum) -> RadicalSum {
        self.add(&other.neg())
    }

    pub fn mul_rf(&self, rf: &RationalFunction) -> RadicalSum {
        let mut out = RadicalSum::zero();
        for (k, c) in &self.terms {
            out.add_term(k.0.clone(), c.clone() * rf.clone());
        }
        out
    }

    pub fn mul(&self, other: &RadicalSum) -> RadicalSum {
        let mut out = RadicalSum::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let c = c1.clone() * c2.clone();
                if k1 == k2 {
                    // sqrt(k)^2 = k regardless of the branch choice.
                    out.add_term(RationalFunction::one(), c * k1.0.clone());
                } else {
                    let rv = canonicalize_radical(RationalFunction::one(), k1.0.clone() * k2.0.clone());
                    out.add_term(rv.radicand.clone(), c * rv.signed_outer());
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> RadicalSum {
        let mut acc = RadicalSum::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse for sums of at most two terms.
    pub fn try_inv(&self) -> Option<RadicalSum> {
        let items: Vec<(&RadKey, &RationalFunction)> = self.terms.iter().collect();
        match items.len() {
            0 => None,
            1 => {
                let (k, c) = items[0];
                let mut out = RadicalSum::zero();
                if k.0.is_one() {
                    out.add_term(RationalFunction::one(), c.inv()?);
                } else {
                    // (c*sqrt(k))^-1 = sqrt(k)/(c*k)
                    out.add_term(k.0.clone(), (c.clone() * k.0.clone()).inv()?);
                }
                Some(out)
            }
            2 => {
                // Conjugate trick: (c1*s1 + c2*s2)^-1 = (c1*s1 - c2*s2)/(c1^2*k1 - c2^2*k2).
                let (k1, c1) = items[0];
                let (k2, c2) = items[1];
                let d = c1.square() * k1.0.clone() - c2.square() * k2.0.clone();
                let dinv = d.inv()?;
                let mut out = RadicalSum::zero();
                out.add_term(k1.0.clone(), c1.clone() * dinv.clone());
                out.add_term(k2.0.clone(), -(c2.clone() * dinv));
                Some(out)
            }
            _ => None,
        }
    }

    /// Collapse to a single radical value when the sum has at most one term.
    pub fn try_to_value(&self) -> Option<RadicalValue> {
        match self.terms.len() {
            0 => Some(RadicalValue::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                Some(canonicalize_radical(c.clone(), k.0.clone()))
            }
            _ => None,
        }
    }

    pub fn to_complex(&self, ctx: &EvalContext) -> Result<Complex64, EvalError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            acc += c.to_complex(ctx)? * k.0.to_complex(ctx)?.sqrt();
        }
        Ok(acc)
    }

    pub fn to_expr(&self) -> Expr {
        if self.terms.is_empty() {
            return Expr::int(0);
        }
        let parts: Vec<Expr> = self
            .terms
            .iter()
            .map(|(k, c)| canonicalize_radical(c.clone(), k.0.clone()).to_expr())
            .collect();
        Expr::sum(parts)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            let rv = canonicalize_radical(c.clone(), k.0.clone());
            parts.push(rv.render());
        }
        parts.join(" + ")
    }
}

/// Substitute radical values for a subset of the unknowns of a system
/// polynomial. Returns the surviving monomials in the untouched unknowns,
/// each with its exact radical-sum coefficient.
pub fn eval_partial_radical(
    p: &SysPoly,
    assign: &BTreeMap<usize, RadicalValue>,
) -> BTreeMap<Monomial, RadicalSum> {
    let arity = p.arity();
    let mut out: BTreeMap<Monomial, RadicalSum> = BTreeMap::new();
    for (m, coeff) in p.iter() {
        let mut value = RadicalSum::from_rf(coeff.clone());
        let mut rest = vec![0u32; arity];
        for i in 0..arity {
            let e = m.exp(i);
            if e == 0 {
                continue;
            }
            match assign.get(&i) {
                None => rest[i] = e,
                Some(v) => {
                    let q = e / 2;
                    let r = e % 2;
                    if q > 0 {
                        let sq = v.square();
                        let mut acc = RationalFunction::one();
                        for _ in 0..q {
                            acc = acc * sq.clone();
                        }
                        value = value.mul_rf(&acc);
                    }
                    if r == 1 {
                        value = value.mul(&RadicalSum::from_value(v));
                    }
                }
            }
        }
        if value.is_zero() {
            continue;
        }
        let key = Monomial(rest);
        let entry = out.remove(&key).unwrap_or_else(RadicalSum::zero);
        let sum = entry.add(&value);
        if !sum.is_zero() {
            out.insert(key, sum);
        }
    }
    out
}
