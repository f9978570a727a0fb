//! Sparse multivariate polynomials over an exact scalar field.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so every polynomial
//! has one canonical layout and iteration order is deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;



use crate::error::{EvalError, ExactError};
use crate::expr::EvalContext;
use crate::scalar::{Complex64, Scalar};

/// Ordered set of variable names shared by all polynomials of one ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSet {
    names: Vec<String>,
}

impl VarSet {
    pub fn new<I, S>(names: I) -> Arc<VarSet>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = std::collections::BTreeSet::new();
        for n in &names {
            assert!(seen.insert(n.clone()), "duplicate variable name `{n}`");
        }
        Arc::new(VarSet { names })
    }

    /// The empty set, home of bare constants.
    pub fn empty() -> Arc<VarSet> {
        VarSet::new(Vec::<String>::new())
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Exponent vector; length fixed by the owning [`VarSet`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn unit(arity: usize) -> Monomial {
        Monomial(vec![0; arity])
    }

    pub fn var(arity: usize, idx: usize) -> Monomial {
        Monomial::var_pow(arity, idx, 1)
    }

    pub fn var_pow(arity: usize, idx: usize, exp: u32) -> Monomial {
        let mut e = vec![0; arity];
        e[idx] = exp;
        Monomial(e)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exp(&self, idx: usize) -> u32 {
        self.0[idx]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Quotient `other / self`; caller guarantees divisibility.
    pub fn quotient_into(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|e| e * k).collect())
    }
}

/// Sparse polynomial with coefficients in `C`.
#[derive(Debug, Clone)]
pub struct Polynomial<C: Scalar> {
    vars: Arc<VarSet>,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Scalar> Polynomial<C> {
    pub fn zero_over(vars: &Arc<VarSet>) -> Self {
        Polynomial {
            vars: Arc::clone(vars),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<VarSet>, c: C) -> Self {
        let mut p = Polynomial::zero_over(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(vars.arity()), c);
        }
        p
    }

    pub fn one_over(vars: &Arc<VarSet>) -> Self {
        Polynomial::constant(vars, C::one())
    }

    pub fn var(vars: &Arc<VarSet>, idx: usize) -> Self {
        assert!(idx < vars.arity());
        let mut p = Polynomial::zero_over(vars);
        p.terms.insert(Monomial::var(vars.arity(), idx), C::one());
        p
    }

    pub fn from_terms<I>(vars: &Arc<VarSet>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, C)>,
    {
        let mut p = Polynomial::zero_over(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Accumulate one term, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, mono: Monomial, c: C) {
        assert_eq!(mono.arity(), self.vars.arity(), "monomial arity mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&mono) {
            None => {
                self.terms.insert(mono, c);
            }
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(mono, sum);
                }
            }
        }
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.arity()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    /// Constant value when the polynomial has no variable part.
    pub fn as_constant(&self) -> Option<C> {
        if self.terms.is_empty() {
            return Some(C::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_unit() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, mono: &Monomial) -> C {
        self.terms.get(mono).cloned().unwrap_or_else(C::zero)
    }

    /// Leading term under the canonical storage order (plain lex on exponents).
    pub fn lead(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(idx)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Indices of variables that actually occur.
    pub fn occurring_vars(&self) -> Vec<usize> {
        (0..self.arity())
            .filter(|&i| self.terms.keys().any(|m| m.exp(i) > 0))
            .collect()
    }

    fn same_ring(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars
    }

    /// Lift constants into a common ring; errors when both sides are
    /// genuinely multivariate over different sets.
    pub(crate) fn unify(a: &Self, b: &Self) -> Result<(Self, Self), ExactError> {
        if a.same_ring(b) {
            return Ok((a.clone(), b.clone()));
        }
        if let Some(c) = a.as_constant() {
            return Ok((Polynomial::constant(&b.vars, c), b.clone()));
        }
        if let Some(c) = b.as_constant() {
            return Ok((a.clone(), Polynomial::constant(&a.vars, c)));
        }
        Err(ExactError::VariableSetMismatch)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        let (mut a, b) = Polynomial::unify(self, other)?;
        for (m, c) in b.terms {
            a.add_term(m, c);
        }
        Ok(a)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        let (mut a, b) = Polynomial::unify(self, other)?;
        for (m, c) in b.terms {
            a.add_term(m, -c);
        }
        Ok(a)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        let (a, b) = Polynomial::unify(self, other)?;
        let mut out = Polynomial::zero_over(&a.vars);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Polynomial::zero_over(&self.vars);
        }
        let mut out = Polynomial::zero_over(&self.vars);
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k.clone() * c.clone());
        }
        out
    }

    /// Multiply by a single term `c * mono`.
    pub fn mul_term(&self, mono: &Monomial, c: &C) -> Self {
        if c.is_zero() {
            return Polynomial::zero_over(&self.vars);
        }
        let mut out = Polynomial::zero_over(&self.vars);
        for (m, k) in &self.terms {
            out.add_term(m.mul(mono), k.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Polynomial::one_over(&self.vars);
        for _ in 0..k {
            acc = acc.checked_mul(self).expect("same ring");
        }
        acc
    }

    /// Divide every coefficient by the leading one.
    pub fn monic(&self) -> Self {
        match self.lead() {
            None => self.clone(),
            Some((_, lc)) => {
                let lc = lc.clone();
                self.map_coeffs(|c| c.field_div(&lc))
            }
        }
    }

    pub fn map_coeffs<F: Fn(&C) -> C>(&self, f: F) -> Self {
        let mut out = Polynomial::zero_over(&self.vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Substitute scalar values for a subset of variables.
    pub fn substitute_scalars(&self, values: &BTreeMap<usize, C>) -> Self {
        let mut out = Polynomial::zero_over(&self.vars);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = m.0.clone();
            for (&idx, val) in values {
                let e = exps[idx];
                if e > 0 {
                    exps[idx] = 0;
                    let mut p = C::one();
                    for _ in 0..e {
                        p = p * val.clone();
                    }
                    coeff = coeff * p;
                }
            }
            out.add_term(Monomial(exps), coeff);
        }
        out
    }

    /// Reinterpret over a superset of variables, matching names.
    pub fn extend_vars(&self, target: &Arc<VarSet>) -> Result<Self, ExactError> {
        if self.same_ring(&Polynomial::<C>::zero_over(target)) {
            return Ok(Polynomial {
                vars: Arc::clone(target),
                terms: self.terms.clone(),
            });
        }
        let map: Vec<usize> = self
            .vars
            .names()
            .iter()
            .map(|n| {
                target
                    .index_of(n)
                    .ok_or_else(|| ExactError::UnknownVariable(n.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut out = Polynomial::zero_over(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.arity()];
            for (i, &exp) in m.0.iter().enumerate() {
                e[map[i]] = exp;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Coefficients of powers of one variable, as polynomials with that
    /// variable's exponent zeroed.
    pub fn coeffs_wrt(&self, idx: usize) -> BTreeMap<u32, Polynomial<C>> {
        let mut out: BTreeMap<u32, Polynomial<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exp(idx);
            let mut rest = m.0.clone();
            rest[idx] = 0;
            out.entry(e)
                .or_insert_with(|| Polynomial::zero_over(&self.vars))
                .add_term(Monomial(rest), c.clone());
        }
        out
    }

    /// Coefficient of `var^deg` as a polynomial in the remaining variables.
    pub fn coeff_wrt(&self, idx: usize, deg: u32) -> Polynomial<C> {
        let mut out = Polynomial::zero_over(&self.vars);
        for (m, c) in &self.terms {
            if m.exp(idx) == deg {
                let mut rest = m.0.clone();
                rest[idx] = 0;
                out.add_term(Monomial(rest), c.clone());
            }
        }
        out
    }

    /// Total order on polynomials of one ring, for canonical layouts.
    pub fn canon_cmp(&self, other: &Self) -> Ordering {
        let mut ai = self.terms.iter().rev();
        let mut bi = other.terms.iter().rev();
        loop {
            match (ai.next(), bi.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => {
                    let c = ma.cmp(mb).then_with(|| ca.canon_cmp(cb));
                    if c != Ordering::Equal {
                        return c;
                    }
                }
            }
        }
    }

    /// Evaluate numerically; only variables that actually occur are looked
    /// up by name in the context.
    pub fn eval(&self, ctx: &EvalContext) -> Result<Complex64, EvalError> {
        let mut point = vec![Complex64::new(0.0, 0.0); self.arity()];
        for i in self.occurring_vars() {
            let name = self.vars.name(i);
            point[i] = ctx
                .get(name)
                .ok_or_else(|| EvalError::UnboundSymbol(name.to_string()))?;
        }
        self.eval_at(&point, ctx)
    }

    /// Evaluate at an explicit point indexed like the variable set.
    pub fn eval_at(&self, point: &[Complex64], ctx: &EvalContext) -> Result<Complex64, EvalError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex(ctx)?;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= point[i].powi(e as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    fn render_mono(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            if e == 1 {
                parts.push(self.vars.name(i).to_string());
            } else if e > 1 {
                parts.push(format!("{}^{}", self.vars.name(i), e));
            }
        }
        parts.join("*")
    }

    /// Whether the leading coefficient displays with a minus sign.
    pub fn is_display_negative(&self) -> bool {
        self.lead().is_some_and(|(_, c)| c.is_display_negative())
    }

    /// Canonical text form, terms in descending storage order.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_display_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            let mut piece = String::new();
            if m.is_unit() {
                piece.push_str(&mag.render());
            } else {
                let mono = self.render_mono(m);
                if mag.is_one() {
                    piece.push_str(&mono);
                } else if mag.atomic() {
                    piece.push_str(&format!("{}*{}", mag.render(), mono));
                } else {
                    piece.push_str(&format!("({})*{}", mag.render(), mono));
                }
            }
            if k == 0 {
                if neg {
                    out.push('-');
                }
                out.push_str(&piece);
            } else {
                out.push_str(if neg { " - " } else { " + " });
                out.push_str(&piece);
            }
        }
        out
    }
}

impl<C: Scalar> PartialEq for Polynomial<C> {
    fn eq(&self, other: &Self) -> bool {
        if self.same_ring(other) {
            return self.terms == other.terms;
        }
        match (self.as_constant(), other.as_constant()) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }
}

impl<C: Scalar> Eq for Polynomial<C> {}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<C: Scalar> std::ops::$trait for &Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: &Polynomial<C>) -> Polynomial<C> {
                self.$checked(rhs).expect("variable set mismatch")
            }
        }
        impl<C: Scalar> std::ops::$trait for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: Polynomial<C>) -> Polynomial<C> {
                (&self).$checked(&rhs).expect("variable set mismatch")
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl<C: Scalar> std::ops::Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

impl<C: Scalar> std::ops::Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

/// Exact polynomial quotient, or `None` when the division leaves a remainder.
pub fn poly_div_exact<C: Scalar>(a: &Polynomial<C>, b: &Polynomial<C>) -> Option<Polynomial<C>> {
    assert!(!b.is_zero(), "division by zero polynomial");
    let mut rem = a.clone();
    let mut quo = Polynomial::zero_over(a.vars());
    let (bm, bc) = {
        let (m, c) = b.lead().unwrap();
        (m.clone(), c.clone())
    };
    while !rem.is_zero() {
        let (rm, rc) = {
            let (m, c) = rem.lead().unwrap();
            (m.clone(), c.clone())
        };
        if !bm.divides(&rm) {
            return None;
        }
        let m = bm.quotient_into(&rm);
        let c = rc.field_div(&bc);
        quo.add_term(m.clone(), c.clone());
        rem = &rem - &b.mul_term(&m, &c);
    }
    Some(quo)
}

fn pseudo_rem<C: Scalar>(f: &Polynomial<C>, g: &Polynomial<C>, v: usize) -> Polynomial<C> {
    let dg = g.degree_in(v);
    let lcg = g.coeff_wrt(v, dg);
    let mut r = f.clone();
    while !r.is_zero() {
        let dr = r.degree_in(v);
        if dr < dg {
            break;
        }
        let lcr = r.coeff_wrt(v, dr);
        let shift = Monomial::var_pow(r.arity(), v, dr - dg);
        r = &(&r * &lcg) - &g.mul_term(&shift, &C::one()).checked_mul(&lcr).unwrap();
    }
    r
}

fn content_wrt<C: Scalar>(p: &Polynomial<C>, v: usize) -> Polynomial<C> {
    let mut content = Polynomial::zero_over(p.vars());
    for (_, coeff) in p.coeffs_wrt(v) {
        content = poly_gcd(&content, &coeff);
        if content.is_one() {
            break;
        }
    }
    content
}

/// Multivariate gcd by primitive pseudo-remainder sequences; monic result.
pub fn poly_gcd<C: Scalar>(a: &Polynomial<C>, b: &Polynomial<C>) -> Polynomial<C> {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Polynomial::one_over(a.vars());
    }
    let va = a.occurring_vars();
    let vb = b.occurring_vars();
    let v = *va.iter().chain(vb.iter()).max().unwrap();
    if a.degree_in(v) == 0 {
        return poly_gcd(a, &content_wrt(b, v));
    }
    if b.degree_in(v) == 0 {
        return poly_gcd(&content_wrt(a, v), b);
    }
    let ca = content_wrt(a, v);
    let cb = content_wrt(b, v);
    let cg = poly_gcd(&ca, &cb);
    let pa = poly_div_exact(a, &ca).expect("content divides");
    let pb = poly_div_exact(b, &cb).expect("content divides");
    let (mut f, mut g) = if pa.degree_in(v) >= pb.degree_in(v) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    loop {
        let r = pseudo_rem(&f, &g, v);
        if r.is_zero() {
            break;
        }
        let rc = content_wrt(&r, v);
        let rp = poly_div_exact(&r, &rc).expect("content divides");
        f = g;
        g = rp;
    }
    if g.degree_in(v) == 0 {
        // Chain bottomed out below the main variable: the primitive parts
        // are coprime, so only the content gcd survives.
        return cg.monic();
    }
    let gp = poly_div_exact(&g, &content_wrt(&g, v)).expect("content divides");
    cg.checked_mul(&gp).unwrap().monic()
}

/// Least common multiple, monic.
pub fn poly_lcm<C: Scalar>(a: &Polynomial<C>, b: &Polynomial<C>) -> Polynomial<C> {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero_over(a.vars());
    }
    let g = poly_gcd(a, b);
    let q = poly_div_exact(a, &g).expect("gcd divides");
    q.checked_mul(b).unwrap().monic()
}
