//! The quotient ring Q(i)(params)[unknowns][s, c] / (s^2 + c^2 - 1) with the
//! derivation s' = s*c, c' = -s^2, written in the normal form where the
//! s-degree is at most one. Hosts the expansion ansatz, its substitution
//! into a reduced ODE, and extraction of the coefficient system.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::ExactError;
use crate::poly::{poly_gcd, poly_lcm, Polynomial, VarSet};
use crate::ratfunc::{rational_content, RationalFunction};
use crate::reduction::DerivPoly;
use crate::scalar::{gauss, gauss_int, Complex64, GaussianRational, Rational, Scalar};
use crate::expr::EvalContext;
use crate::SysPoly;

/// Element of the trig quotient ring; keys are `(s_exp, c_exp)` with
/// `s_exp <= 1` after normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    vars: Arc<VarSet>,
    terms: BTreeMap<(u32, u32), SysPoly>,
}

fn binomial(n: u32, k: u32) -> GaussianRational {
    let mut num = Rational::one();
    for j in 0..k {
        num = num * Rational::from_integer((n - j).into())
            / Rational::from_integer((j + 1).into());
    }
    gauss(num, Rational::zero())
}

impl TrigPoly {
    pub fn zero(vars: &Arc<VarSet>) -> TrigPoly {
        TrigPoly {
            vars: Arc::clone(vars),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<VarSet>, c: SysPoly) -> TrigPoly {
        let mut p = TrigPoly::zero(vars);
        p.add_raw(0, 0, c);
        p
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &SysPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: u32, c: u32) -> SysPoly {
        self.terms
            .get(&(s, c))
            .cloned()
            .unwrap_or_else(|| Polynomial::zero_over(&self.vars))
    }

    /// Add `coeff * s^a * c^b`, normalizing `s^2 -> 1 - c^2`.
    pub fn add_raw(&mut self, a: u32, b: u32, coeff: SysPoly) {
        if coeff.is_zero() {
            return;
        }
        if a <= 1 {
            self.insert(a, b, coeff);
            return;
        }
        let q = a / 2;
        let r = a % 2;
        // s^(2q) = (1 - c^2)^q = sum_j C(q,j) (-1)^j c^(2j)
        for j in 0..=q {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            let k = binomial(q, j) * gauss_int(sign);
            let scaled = coeff.scale(&RationalFunction::constant(&VarSet::empty(), k));
            self.insert(r, b + 2 * j, scaled);
        }
    }

    fn insert(&mut self, a: u32, b: u32, coeff: SysPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&(a, b)) {
            None => {
                self.terms.insert((a, b), coeff);
            }
            Some(old) => {
                let sum = &old + &coeff;
                if !sum.is_zero() {
                    self.terms.insert((a, b), sum);
                }
            }
        }
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.add_raw(a, b, c.clone());
        }
        out
    }

    pub fn neg(&self) -> TrigPoly {
        let mut out = TrigPoly::zero(&self.vars);
        for (&(a, b), c) in &self.terms {
            out.insert(a, b, -c);
        }
        out
    }

    pub fn sub(&self, other: &TrigPoly) -> TrigPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::zero(&self.vars);
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                out.add_raw(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, k: &SysPoly) -> TrigPoly {
        let mut out = TrigPoly::zero(&self.vars);
        for (&(a, b), c) in &self.terms {
            out.insert(a, b, c * k);
        }
        out
    }

    pub fn pow(&self, e: u32) -> TrigPoly {
        let mut acc = TrigPoly::constant(&self.vars, Polynomial::one_over(&self.vars));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Derivation: (s^a c^b)' = a s^a c^(b+1) - b s^(a+2) c^(b-1).
    pub fn diff(&self) -> TrigPoly {
        let mut out = TrigPoly::zero(&self.vars);
        for (&(a, b), coeff) in &self.terms {
            if a > 0 {
                let k = RationalFunction::constant(&VarSet::empty(), gauss_int(a as i64));
                out.add_raw(a, b + 1, coeff.scale(&k));
            }
            if b > 0 {
                let k = RationalFunction::constant(&VarSet::empty(), gauss_int(-(b as i64)));
                out.add_raw(a + 2, b - 1, coeff.scale(&k));
            }
        }
        out
    }

    /// Numeric value at `s = sech(eta)`, `c = tanh(eta)` with unknowns and
    /// parameters bound in the context.
    pub fn eval(
        &self,
        s: Complex64,
        c: Complex64,
        ctx: &EvalContext,
    ) -> Result<Complex64, crate::error::EvalError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(a, b), coeff) in &self.terms {
            acc += coeff.eval(ctx)? * s.powi(a as i32) * c.powi(b as i32);
        }
        Ok(acc)
    }
}

/// The expansion ansatz of degree `n`:
/// `U = A0 + sum_{j=1..n} cos^(j-1) * (B_j sin + A_j cos)`.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pub n: u32,
    pub vars: Arc<VarSet>,
    pub body: TrigPoly,
    speed_idx: usize,
}

impl Ansatz {
    pub fn unknown_names(n: u32, speed: &str) -> Vec<String> {
        let mut names = vec!["A0".to_string()];
        for j in 1..=n {
            names.push(format!("B{j}"));
            names.push(format!("A{j}"));
        }
        names.push(speed.to_string());
        names
    }

    pub fn speed_idx(&self) -> usize {
        self.speed_idx
    }
}

/// Build the degree-`n` ansatz over unknowns `[A0, B1, A1, .., Bn, An, speed]`.
pub fn build_ansatz(n: u32, speed: &str) -> Ansatz {
    assert!(n >= 1, "ansatz degree must be positive");
    let names = Ansatz::unknown_names(n, speed);
    let vars = VarSet::new(names);
    let mut body = TrigPoly::zero(&vars);
    body.add_raw(0, 0, Polynomial::var(&vars, 0));
    for j in 1..=n {
        let bj = Polynomial::var(&vars, (2 * j - 1) as usize);
        let aj = Polynomial::var(&vars, (2 * j) as usize);
        body.add_raw(1, j - 1, bj);
        body.add_raw(0, j, aj);
    }
    Ansatz {
        n,
        speed_idx: vars.arity() - 1,
        vars,
        body,
    }
}

/// Substitute the ansatz into a reduced ODE. Derivatives of the body are
/// computed once per order and reused across terms.
pub fn substitute_ansatz(ode: &DerivPoly, ansatz: &Ansatz) -> Result<TrigPoly, ExactError> {
    let max_order = ode.max_order() as usize;
    let mut derivs: Vec<TrigPoly> = Vec::with_capacity(max_order + 1);
    derivs.push(ansatz.body.clone());
    for k in 1..=max_order {
        let next = derivs[k - 1].diff();
        derivs.push(next);
    }
    let mut out = TrigPoly::zero(&ansatz.vars);
    for (mono, coeff) in ode.iter() {
        let lifted = coeff.extend_vars(&ansatz.vars)?;
        let mut term = TrigPoly::constant(&ansatz.vars, lifted);
        for &(order, mult) in mono.factors() {
            term = term.mul(&derivs[order as usize].pow(mult));
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// One extracted equation: the exact coefficient of `sin^s * cos^c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TrigTag {
    pub s: u32,
    pub c: u32,
}

impl TrigTag {
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if self.s == 1 {
            parts.push("sin(w)".to_string());
        } else if self.s > 1 {
            parts.push(format!("sin(w)^{}", self.s));
        }
        if self.c == 1 {
            parts.push("cos(w)".to_string());
        } else if self.c > 1 {
            parts.push(format!("cos(w)^{}", self.c));
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// The polynomial system over the ansatz unknowns.
#[derive(Debug, Clone)]
pub struct PolySystem {
    pub vars: Arc<VarSet>,
    pub eqs: Vec<(TrigTag, SysPoly)>,
}

impl PolySystem {
    pub fn polys(&self) -> Vec<SysPoly> {
        self.eqs.iter().map(|(_, p)| p.clone()).collect()
    }

    pub fn render(&self) -> Vec<String> {
        self.eqs
            .iter()
            .map(|(tag, p)| format!("[{}] {} = 0", tag.render(), p.render()))
            .collect()
    }
}

/// Clear rational-function denominators and numeric content; flip so the
/// leading coefficient displays positive. The result generates the same
/// ideal and has a unique representation.
pub fn canonical_primitive(p: &SysPoly) -> SysPoly {
    if p.is_zero() {
        return p.clone();
    }
    // Common denominator.
    let mut den = Polynomial::one_over(p.iter().next().unwrap().1.vars());
    for (_, c) in p.iter() {
        den = poly_lcm(&den, c.den());
    }
    let lifted = p.map_coeffs(|c| c.clone() * RationalFunction::from_poly(den.clone()));
    // Polynomial gcd of the numerators.
    let mut g = Polynomial::zero_over(den.vars());
    for (_, c) in lifted.iter() {
        g = poly_gcd(&g, c.num());
        if g.is_one() {
            break;
        }
    }
    let reduced = lifted.map_coeffs(|c| c.field_div(&RationalFunction::from_poly(g.clone())));
    // Numeric content across all coefficients.
    let mut ct = Rational::zero();
    for (_, c) in reduced.iter() {
        let rc = rational_content(c.num());
        ct = if ct.is_zero() {
            rc
        } else {
            // gcd of positive rationals
            let num = ct.numer().gcd(rc.numer());
            let den = ct.denom().lcm(rc.denom());
            Rational::new(num, den)
        };
        if ct.is_one() {
            break;
        }
    }
    let mut out = if ct.is_one() || ct.is_zero() {
        reduced
    } else {
        let k = RationalFunction::constant(
            &VarSet::empty(),
            gauss(Rational::one() / ct, Rational::zero()),
        );
        reduced.map_coeffs(|c| c.clone() * k.clone())
    };
    if out.is_display_negative() {
        out = -&out;
    }
    out
}

/// Group the trig normal form by monomial and return the nonzero coefficient
/// polynomials in canonical primitive form, ordered by ascending cosine then
/// sine exponent.
pub fn extract_coefficient_system(tp: &TrigPoly) -> PolySystem {
    let mut eqs: Vec<(TrigTag, SysPoly)> = Vec::new();
    for (&(a, b), coeff) in tp.iter() {
        if coeff.is_zero() {
            continue;
        }
        eqs.push((TrigTag { s: a, c: b }, canonical_primitive(coeff)));
    }
    eqs.sort_by(|(t1, _), (t2, _)| (t1.c, t1.s).cmp(&(t2.c, t2.s)));
    PolySystem {
        vars: Arc::clone(tp.vars()),
        eqs,
    }
}
