//! Travelling-wave reduction: rewrite a polynomial PDE as an ODE in the wave
//! coordinate, integrate it by pattern, reduce its order, and find the
//! homogeneous balance degree.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::ReductionError;
use crate::expr::Expr;
use crate::poly::{Polynomial, VarSet};
use crate::ratfunc::RationalFunction;
use crate::scalar::{gauss, Rational};
use crate::SysPoly;

/// Travelling frame `eta = sum_i k_i * x_i - speed * t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFrame {
    pub spatial: Vec<(String, Rational)>,
    pub time: String,
    pub speed: String,
}

impl WaveFrame {
    pub fn validate(&self) -> Result<(), ReductionError> {
        if self.spatial.iter().all(|(_, k)| k.is_zero()) {
            return Err(ReductionError::DegenerateFrame);
        }
        Ok(())
    }

    pub fn spatial_coeff(&self, name: &str) -> Option<&Rational> {
        self.spatial
            .iter()
            .find_map(|(n, k)| if n == name { Some(k) } else { None })
    }

    /// The phase `sum k_i x_i - speed * t` as an expression, with the speed
    /// symbol left symbolic or substituted by the caller later.
    pub fn phase_expr(&self) -> Expr {
        let mut terms = Vec::new();
        for (name, k) in &self.spatial {
            terms.push(Expr::prod(vec![
                Expr::Const(gauss(k.clone(), Rational::zero())),
                Expr::sym(name),
            ]));
        }
        terms.push(Expr::prod(vec![
            Expr::int(-1),
            Expr::sym(&self.speed),
            Expr::sym(&self.time),
        ]));
        Expr::Sum(terms).canonical()
    }
}

/// Multiset of derivative orders: `[(order, multiplicity)]`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct JetMono(Vec<(u32, u32)>);

impl JetMono {
    pub fn unit() -> JetMono {
        JetMono(Vec::new())
    }

    pub fn single(order: u32) -> JetMono {
        JetMono(vec![(order, 1)])
    }

    pub fn factors(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &JetMono) -> JetMono {
        let mut map: BTreeMap<u32, u32> = self.0.iter().copied().collect();
        for &(o, m) in &other.0 {
            *map.entry(o).or_insert(0) += m;
        }
        JetMono(map.into_iter().collect())
    }

    /// Total multiplicity (degree in the dependent variable and derivatives).
    pub fn multiplicity(&self) -> u32 {
        self.0.iter().map(|&(_, m)| m).sum()
    }

    /// Sum of order * multiplicity.
    pub fn order_weight(&self) -> u32 {
        self.0.iter().map(|&(o, m)| o * m).sum()
    }

    pub fn max_order(&self) -> u32 {
        self.0.iter().map(|&(o, _)| o).max().unwrap_or(0)
    }

    pub fn min_order(&self) -> u32 {
        self.0.iter().map(|&(o, _)| o).min().unwrap_or(0)
    }

    pub fn render(&self, dep: &str) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for &(o, m) in &self.0 {
            let mut f = dep.to_string();
            for _ in 0..o {
                f.push('\'');
            }
            if m > 1 {
                f.push_str(&format!("^{m}"));
            }
            parts.push(f);
        }
        parts.join("*")
    }
}

/// Polynomial in one dependent variable and its wave-coordinate derivatives,
/// with coefficients polynomial in the wave speed over the parameter field.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivPoly {
    dep: String,
    vars: Arc<VarSet>,
    terms: BTreeMap<JetMono, SysPoly>,
}

impl DerivPoly {
    pub fn zero(dep: &str, vars: &Arc<VarSet>) -> DerivPoly {
        DerivPoly {
            dep: dep.to_string(),
            vars: Arc::clone(vars),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_const(dep: &str, vars: &Arc<VarSet>, c: SysPoly) -> DerivPoly {
        let mut p = DerivPoly::zero(dep, vars);
        p.add_term(JetMono::unit(), c);
        p
    }

    pub fn jet(dep: &str, vars: &Arc<VarSet>, order: u32) -> DerivPoly {
        let mut p = DerivPoly::zero(dep, vars);
        p.add_term(JetMono::single(order), Polynomial::one_over(vars));
        p
    }

    pub fn dep(&self) -> &str {
        &self.dep
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn add_term(&mut self, mono: JetMono, c: SysPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&mono) {
            None => {
                self.terms.insert(mono, c);
            }
            Some(old) => {
                let sum = &old + &c;
                if !sum.is_zero() {
                    self.terms.insert(mono, sum);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&JetMono, &SysPoly)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &DerivPoly) -> DerivPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> DerivPoly {
        let mut out = DerivPoly::zero(&self.dep, &self.vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &DerivPoly) -> DerivPoly {
        let mut out = DerivPoly::zero(&self.dep, &self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &SysPoly) -> DerivPoly {
        let mut out = DerivPoly::zero(&self.dep, &self.vars);
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> DerivPoly {
        let mut acc = DerivPoly::from_const(&self.dep, &self.vars, Polynomial::one_over(&self.vars));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Constant content when there is no jet dependence at all.
    pub fn as_const(&self) -> Option<SysPoly> {
        if self.terms.is_empty() {
            return Some(Polynomial::zero_over(&self.vars));
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_unit() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn max_order(&self) -> u32 {
        self.terms.keys().map(|m| m.max_order()).max().unwrap_or(0)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_display_negative();
            let mag = if neg { -c } else { c.clone() };
            let coeff_s = mag.render();
            let piece = if m.is_unit() {
                if mag.nterms() > 1 {
                    format!("({coeff_s})")
                } else {
                    coeff_s
                }
            } else if mag.is_one() {
                m.render(&self.dep)
            } else if mag.nterms() > 1 {
                format!("({})*{}", coeff_s, m.render(&self.dep))
            } else {
                format!("{}*{}", coeff_s, m.render(&self.dep))
            };
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

/// Substitute the travelling-wave form into a PDE: each partial derivative
/// along a spatial coordinate contributes its frame coefficient, and the
/// time derivative contributes `-speed`, per order.
pub fn reduce_to_ode(
    pde: &Expr,
    frame: &WaveFrame,
    dep: &str,
    params: &Arc<VarSet>,
) -> Result<DerivPoly, ReductionError> {
    frame.validate()?;
    let vars = VarSet::new([frame.speed.as_str()]);
    walk(&pde.canonical(), frame, dep, params, &vars)
}

fn walk(
    e: &Expr,
    frame: &WaveFrame,
    dep: &str,
    params: &Arc<VarSet>,
    vars: &Arc<VarSet>,
) -> Result<DerivPoly, ReductionError> {
    Ok(match e {
        Expr::Const(c) => DerivPoly::from_const(
            dep,
            vars,
            Polynomial::constant(vars, RationalFunction::constant(params, c.clone())),
        ),
        Expr::Sym(s) => {
            if s == dep {
                DerivPoly::jet(dep, vars, 0)
            } else if let Some(idx) = params.index_of(s) {
                DerivPoly::from_const(
                    dep,
                    vars,
                    Polynomial::constant(vars, RationalFunction::generator(params, idx)),
                )
            } else if s == &frame.time || frame.spatial_coeff(s).is_some() {
                return Err(ReductionError::NonPolynomial(format!(
                    "coordinate `{s}` appears outside a derivative"
                )));
            } else {
                return Err(ReductionError::UnknownSymbol(s.clone()));
            }
        }
        Expr::Sum(terms) => {
            let mut acc = DerivPoly::zero(dep, vars);
            for t in terms {
                acc = acc.add(&walk(t, frame, dep, params, vars)?);
            }
            acc
        }
        Expr::Prod(factors) => {
            let mut acc =
                DerivPoly::from_const(dep, vars, Polynomial::one_over(vars));
            for f in factors {
                acc = acc.mul(&walk(f, frame, dep, params, vars)?);
            }
            acc
        }
        Expr::Pow(base, exp) => {
            let b = walk(base, frame, dep, params, vars)?;
            if *exp >= 0 {
                b.pow(*exp as u32)
            } else {
                let c = b.as_const().and_then(|p| p.as_constant()).ok_or_else(|| {
                    ReductionError::NonPolynomial(format!(
                        "negative power of a non-constant: {}",
                        e.render()
                    ))
                })?;
                let inv = c.inv().ok_or_else(|| {
                    ReductionError::NonPolynomial("negative power of zero".to_string())
                })?;
                let mut acc = RationalFunction::one();
                for _ in 0..(-exp) {
                    acc = acc * inv.clone();
                }
                DerivPoly::from_const(dep, vars, Polynomial::constant(vars, acc))
            }
        }
        Expr::Func(f, arg) => {
            return Err(ReductionError::NonPolynomial(format!(
                "{}({})",
                f.name(),
                arg.render()
            )))
        }
        Expr::Deriv { dep: d, coords } => {
            if d != dep {
                return Err(ReductionError::ForeignDerivative(d.clone()));
            }
            let mut mult = Polynomial::one_over(vars);
            for c in coords {
                if c == &frame.time {
                    mult = &mult * &(-Polynomial::var(vars, 0));
                } else if let Some(k) = frame.spatial_coeff(c) {
                    mult = mult.scale(&RationalFunction::constant(
                        params,
                        gauss(k.clone(), Rational::zero()),
                    ));
                } else {
                    return Err(ReductionError::UnknownSymbol(c.clone()));
                }
            }
            DerivPoly::jet(dep, vars, coords.len() as u32).scale(&mult)
        }
    })
}

/// Integrate once in the wave coordinate, by pattern, with the integration
/// constant set to zero. Handled patterns: `c*U^(k)` with `k >= 1`, and
/// `c*U^(j)*U^(j+1)`.
pub fn integrate_once(p: &DerivPoly) -> Result<DerivPoly, ReductionError> {
    let mut out = DerivPoly::zero(p.dep(), p.vars());
    for (m, c) in p.iter() {
        let f = m.factors();
        if f.len() == 1 && f[0].1 == 1 && f[0].0 >= 1 {
            out.add_term(JetMono::single(f[0].0 - 1), c.clone());
            continue;
        }
        if f.len() == 2 && f[0].1 == 1 && f[1].1 == 1 && f[1].0 == f[0].0 + 1 {
            let half = RationalFunction::constant(
                &VarSet::empty(),
                gauss(crate::scalar::rat(1, 2), Rational::zero()),
            );
            let mut mono = JetMono::single(f[0].0);
            mono = mono.mul(&JetMono::single(f[0].0));
            out.add_term(mono, c.scale(&half));
            continue;
        }
        return Err(ReductionError::NotIntegrable(format!(
            "{}",
            m.render(p.dep())
        )));
    }
    Ok(out)
}

/// Shift every derivative order down by one, renaming the dependent symbol.
/// Fails when the underived dependent variable occurs.
pub fn reduce_order(p: &DerivPoly, taken: &BTreeSet<String>) -> Result<DerivPoly, ReductionError> {
    for (m, _) in p.iter() {
        if !m.is_unit() && m.min_order() == 0 {
            return Err(ReductionError::UnderivedDependent(p.dep().to_string()));
        }
    }
    let mut new_dep = next_dep_name(p.dep());
    while taken.contains(&new_dep) {
        new_dep = next_dep_name(&new_dep);
    }
    let mut out = DerivPoly::zero(&new_dep, p.vars());
    for (m, c) in p.iter() {
        let shifted = m
            .factors()
            .iter()
            .map(|&(o, mult)| (o - 1, mult))
            .collect::<Vec<_>>();
        out.add_term(JetMono(shifted), c.clone());
    }
    Ok(out)
}

fn next_dep_name(dep: &str) -> String {
    let mut chars: Vec<char> = dep.chars().collect();
    if let Some(last) = chars.last_mut() {
        if last.is_ascii_alphabetic() && *last != 'z' && *last != 'Z' {
            *last = char::from_u32(*last as u32 + 1).unwrap();
            return chars.into_iter().collect();
        }
    }
    format!("{dep}1")
}

/// Result of the homogeneous balance: the ansatz degree and the two terms
/// whose weights were equated.
#[derive(Debug, Clone, PartialEq)]
pub struct Balance {
    pub n: u32,
    pub linear: JetMono,
    pub nonlinear: JetMono,
}

/// Equate the weight `n + k` of the highest linear derivative with the
/// maximal nonlinear weight `M*n + K`; returns the smallest positive integer
/// degree that balances them.
pub fn homogeneous_balance(p: &DerivPoly) -> Result<Balance, ReductionError> {
    let mut kmax: Option<(u32, JetMono)> = None;
    let mut nonlinear: Vec<(u32, u32, JetMono)> = Vec::new();
    for (m, _) in p.iter() {
        let f = m.factors();
        if f.len() == 1 && f[0].1 == 1 && f[0].0 >= 1 {
            if kmax.as_ref().map_or(true, |(k, _)| f[0].0 > *k) {
                kmax = Some((f[0].0, m.clone()));
            }
        } else if m.multiplicity() >= 2 {
            nonlinear.push((m.multiplicity(), m.order_weight(), m.clone()));
        }
    }
    let (kmax, linear) = kmax.ok_or_else(|| {
        ReductionError::MethodInapplicable("no linear derivative term".to_string())
    })?;
    if nonlinear.is_empty() {
        return Err(ReductionError::MethodInapplicable(
            "no nonlinear term".to_string(),
        ));
    }
    let mut candidates: Vec<u32> = Vec::new();
    for &(mult, weight, _) in &nonlinear {
        if mult >= 2 && kmax > weight {
            let num = kmax - weight;
            let den = mult - 1;
            if num % den == 0 && num / den >= 1 {
                candidates.push(num / den);
            }
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    for n in candidates {
        let target = n + kmax;
        let max_nl = nonlinear
            .iter()
            .map(|&(mult, weight, _)| mult * n + weight)
            .max()
            .unwrap();
        if max_nl == target {
            let winner = nonlinear
                .iter()
                .find(|&&(mult, weight, _)| mult * n + weight == target)
                .unwrap();
            return Ok(Balance {
                n,
                linear,
                nonlinear: winner.2.clone(),
            });
        }
    }
    Err(ReductionError::MethodInapplicable(
        "no positive integer degree balances the weights".to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::scalar::rat_int;

    fn frame_1d() -> WaveFrame {
        WaveFrame {
            spatial: vec![("x".to_string(), rat_int(1))],
            time: "t".to_string(),
            speed: "v".to_string(),
        }
    }

    fn params() -> Arc<VarSet> {
        VarSet::new(["alpha", "beta", "gamma"])
    }

    fn reduce(src: &str) -> DerivPoly {
        let pde = parse_expr(src).unwrap();
        reduce_to_ode(&pde, &frame_1d(), "u", &params()).unwrap()
    }

    #[test]
    fn second_order_wave_operator() {
        // u_tt + alpha*u_xx -> (v^2 + alpha) u''
        let ode = reduce("D(u,t,t) + alpha*D(u,x,x)");
        assert_eq!(ode.render(), "(v^2 + alpha)*u''");
    }

    #[test]
    fn reaction_terms_pass_through() {
        let ode = reduce("D(u,t,t) + alpha*D(u,x,x) + beta*u + gamma*u^3");
        assert_eq!(ode.render(), "(v^2 + alpha)*u'' + gamma*u^3 + beta*u");
    }

    #[test]
    fn mixed_derivative_collects_speed_factors() {
        // u_xt -> -v u''
        let ode = reduce("D(u,x,t)");
        assert_eq!(ode.render(), "-v*u''");
    }

    #[test]
    fn fractional_frame_coefficients() {
        let frame = WaveFrame {
            spatial: vec![
                ("x".to_string(), rat_int(1)),
                ("y".to_string(), crate::scalar::rat(1, 2)),
            ],
            time: "t".to_string(),
            speed: "c".to_string(),
        };
        let pde = parse_expr("D(u,x,y) + D(u,y,y)").unwrap();
        let ode = reduce_to_ode(&pde, &frame, "u", &params()).unwrap();
        assert_eq!(ode.render(), "3/4*u''");
    }

    #[test]
    fn rejects_non_polynomial_and_foreign() {
        let pde = parse_expr("sin(u) + D(u,x,x)").unwrap();
        assert!(matches!(
            reduce_to_ode(&pde, &frame_1d(), "u", &params()),
            Err(ReductionError::NonPolynomial(_))
        ));
        let pde = parse_expr("D(w,x)").unwrap();
        assert!(matches!(
            reduce_to_ode(&pde, &frame_1d(), "u", &params()),
            Err(ReductionError::ForeignDerivative(_))
        ));
        let pde = parse_expr("x*u + D(u,x,x)").unwrap();
        assert!(matches!(
            reduce_to_ode(&pde, &frame_1d(), "u", &params()),
            Err(ReductionError::NonPolynomial(_))
        ));
        let pde = parse_expr("q*u").unwrap();
        assert!(matches!(
            reduce_to_ode(&pde, &frame_1d(), "u", &params()),
            Err(ReductionError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn degenerate_frame_rejected() {
        let frame = WaveFrame {
            spatial: vec![("x".to_string(), rat_int(0))],
            time: "t".to_string(),
            speed: "v".to_string(),
        };
        let pde = parse_expr("D(u,x,x)").unwrap();
        assert!(matches!(
            reduce_to_ode(&pde, &frame, "u", &params()),
            Err(ReductionError::DegenerateFrame)
        ));
    }

    #[test]
    fn integrate_linear_and_quadratic_patterns() {
        // u'''' + u'*u'' integrates to u''' + 1/2 u'^2.
        let ode = reduce("D(u,x,x,x,x)").add(&reduce("D(u,x)").mul(&reduce("D(u,x,x)")));
        let integrated = integrate_once(&ode).unwrap();
        assert_eq!(integrated.render(), "u''' + 1/2*u'^2");
    }

    #[test]
    fn integrate_rejects_underived_terms() {
        let ode = reduce("beta*u + D(u,x,x)");
        assert!(matches!(
            integrate_once(&ode),
            Err(ReductionError::NotIntegrable(_))
        ));
        let ode = reduce("u^3");
        assert!(matches!(
            integrate_once(&ode),
            Err(ReductionError::NotIntegrable(_))
        ));
    }

    #[test]
    fn order_reduction_renames() {
        let ode = reduce("D(u,x,x,x) + D(u,x)*D(u,x)");
        let v = reduce_order(&ode, &BTreeSet::new()).unwrap();
        assert_eq!(v.dep(), "v");
        assert_eq!(v.render(), "v'' + v^2");
        let bad = reduce("u + D(u,x)");
        assert!(matches!(
            reduce_order(&bad, &BTreeSet::new()),
            Err(ReductionError::UnderivedDependent(_))
        ));
    }

    #[test]
    fn balance_quadratic_nonlinearity() {
        // u'' + u^2: n + 2 = 2n -> n = 2.
        let ode = reduce("D(u,x,x) + u^2");
        let b = homogeneous_balance(&ode).unwrap();
        assert_eq!(b.n, 2);
        assert_eq!(b.linear.render("u"), "u''");
        assert_eq!(b.nonlinear.render("u"), "u^2");
    }

    #[test]
    fn balance_cubic_nonlinearity() {
        // u'' + u^3: n + 2 = 3n -> n = 1.
        let ode = reduce("D(u,x,x) + u^3 + beta*u");
        let b = homogeneous_balance(&ode).unwrap();
        assert_eq!(b.n, 1);
    }

    #[test]
    fn balance_fourth_order() {
        // u'''' + u*u'': n + 4 = 2n + 2 -> n = 2.
        let ode = reduce("D(u,x,x,x,x) + u*D(u,x,x)");
        let b = homogeneous_balance(&ode).unwrap();
        assert_eq!(b.n, 2);
    }

    #[test]
    fn balance_failures() {
        let ode = reduce("D(u,x,x) + u");
        assert!(matches!(
            homogeneous_balance(&ode),
            Err(ReductionError::MethodInapplicable(_))
        ));
        let ode = reduce("u^2 + u");
        assert!(matches!(
            homogeneous_balance(&ode),
            Err(ReductionError::MethodInapplicable(_))
        ));
        // u' + u^2: 1 + n = 2n -> n = 1 works; u'' + u^4: (2+n = 4n) no integer.
        let ode = reduce("D(u,x,x) + u^4");
        assert!(matches!(
            homogeneous_balance(&ode),
            Err(ReductionError::MethodInapplicable(_))
        ));
    }
}
