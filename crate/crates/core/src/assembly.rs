//! From solved branches to closed-form travelling waves: realize exact
//! coefficients, undo order reductions with a small antiderivative table,
//! emit expressions, and verify them numerically against the original PDE.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{AssemblyError, EvalError, ExprError};
use crate::expr::{differentiate, eval, substitute, EvalContext, Expr, Func};
use crate::radical::{eval_partial_radical, RadicalSum, RadicalValue};
use crate::reduction::WaveFrame;
use crate::scalar::Complex64;
use crate::solver::SolutionBranch;
use crate::trig::Ansatz;

/// One basis shape a realized solution can contain. `SechTanh` terms come
/// straight from the ansatz; the rest appear as antiderivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TermKind {
    /// sech^s(eta) * tanh^c(eta)
    SechTanh { s: u32, c: u32 },
    /// eta itself
    Eta,
    /// ln(cosh(eta))
    LnCosh,
    /// 2*arctan(tanh(eta/2))
    ArctanHalf,
}

impl TermKind {
    pub fn render(&self) -> String {
        match self {
            TermKind::SechTanh { s: 0, c: 0 } => "1".to_string(),
            TermKind::SechTanh { s, c } => {
                let mut parts = Vec::new();
                match s {
                    0 => {}
                    1 => parts.push("sech(eta)".to_string()),
                    _ => parts.push(format!("sech(eta)^{s}")),
                }
                match c {
                    0 => {}
                    1 => parts.push("tanh(eta)".to_string()),
                    _ => parts.push(format!("tanh(eta)^{c}")),
                }
                parts.join("*")
            }
            TermKind::Eta => "eta".to_string(),
            TermKind::LnCosh => "ln(cosh(eta))".to_string(),
            TermKind::ArctanHalf => "2*arctan(tanh(1/2*eta))".to_string(),
        }
    }

    fn to_expr(self, arg: &Expr) -> Expr {
        match self {
            TermKind::SechTanh { s, c } => {
                let mut fs = Vec::new();
                if s > 0 {
                    fs.push(Expr::pow(Expr::func(Func::Sech, arg.clone()), i64::from(s)));
                }
                if c > 0 {
                    fs.push(Expr::pow(Expr::func(Func::Tanh, arg.clone()), i64::from(c)));
                }
                if fs.is_empty() {
                    Expr::int(1)
                } else {
                    Expr::prod(fs)
                }
            }
            TermKind::Eta => arg.clone(),
            TermKind::LnCosh => Expr::func(Func::Ln, Expr::func(Func::Cosh, arg.clone())),
            TermKind::ArctanHalf => Expr::prod(vec![
                Expr::int(2),
                Expr::func(
                    Func::Arctan,
                    Expr::func(
                        Func::Tanh,
                        Expr::prod(vec![Expr::rational(1, 2), arg.clone()]),
                    ),
                ),
            ]),
        }
    }
}

/// A solution realized over the wave variable: exact radical coefficients
/// attached to term shapes, plus the branch's wave speed if it is pinned.
#[derive(Debug, Clone)]
pub struct RealizedForm {
    pub dep: String,
    pub terms: BTreeMap<TermKind, RadicalSum>,
    pub speed: Option<RadicalValue>,
}

impl RealizedForm {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let kind = k.render();
                if kind == "1" {
                    format!("({})", c.render())
                } else {
                    format!("({})*{}", c.render(), kind)
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Substitute a resolved branch into the ansatz body. Every unknown that
/// appears in the body must carry a value; free body unknowns are an error
/// because the result would not be a single closed form.
pub fn realize(ansatz: &Ansatz, branch: &SolutionBranch) -> Result<RealizedForm, AssemblyError> {
    if !branch.is_resolved() {
        let name = branch
            .unresolved
            .first()
            .cloned()
            .unwrap_or_else(|| "system".to_string());
        return Err(AssemblyError::UnresolvedUnknown(name));
    }
    let mut terms = BTreeMap::new();
    for (&(s, c), coeff) in ansatz.body.iter() {
        let parts = eval_partial_radical(coeff, &branch.assignments);
        let mut sum = RadicalSum::zero();
        for (mono, val) in parts {
            if !mono.is_unit() {
                let leftover = (0..mono.arity())
                    .find(|&i| mono.exp(i) > 0)
                    .map(|i| ansatz.vars.name(i).to_string())
                    .unwrap_or_default();
                return Err(AssemblyError::FreeUnknown(leftover));
            }
            sum = sum.add(&val);
        }
        if !sum.is_zero() {
            terms.insert(TermKind::SechTanh { s, c }, sum);
        }
    }
    let speed = branch.assignments.get(&ansatz.speed_idx()).cloned();
    Ok(RealizedForm {
        dep: String::new(),
        terms,
        speed,
    })
}

/// Antiderivatives with respect to eta of the supported term shapes, using
/// d/deta tanh = sech^2 and d/deta sech = -sech*tanh.
fn antiderivative(kind: TermKind) -> Option<Vec<(TermKind, i64)>> {
    match kind {
        TermKind::SechTanh { s: 0, c: 0 } => Some(vec![(TermKind::Eta, 1)]),
        TermKind::SechTanh { s: 0, c: 1 } => Some(vec![(TermKind::LnCosh, 1)]),
        TermKind::SechTanh { s: 0, c: 2 } => Some(vec![
            (TermKind::Eta, 1),
            (TermKind::SechTanh { s: 0, c: 1 }, -1),
        ]),
        TermKind::SechTanh { s: 1, c: 0 } => Some(vec![(TermKind::ArctanHalf, 1)]),
        TermKind::SechTanh { s: 1, c: 1 } => Some(vec![(TermKind::SechTanh { s: 1, c: 0 }, -1)]),
        _ => None,
    }
}

/// Integrate a realized form once in eta. The integration constant is fixed
/// at zero, matching the boundary conditions baked into the ansatz.
pub fn integrate_form(form: &RealizedForm) -> Result<RealizedForm, AssemblyError> {
    let mut out: BTreeMap<TermKind, RadicalSum> = BTreeMap::new();
    for (&kind, coeff) in &form.terms {
        let table =
            antiderivative(kind).ok_or_else(|| AssemblyError::MissingAntiderivative(kind.render()))?;
        for (tk, mult) in table {
            let scaled = coeff.mul_rf(&crate::ratfunc::RationalFunction::from_int(mult));
            let entry = out.entry(tk).or_insert_with(RadicalSum::zero);
            *entry = entry.add(&scaled);
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(RealizedForm {
        dep: form.dep.clone(),
        terms: out,
        speed: form.speed.clone(),
    })
}

/// A fully assembled travelling-wave solution.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    pub dep: String,
    /// Expression in the single symbol `eta`.
    pub eta_expr: Expr,
    /// Expression in the original coordinates, phase substituted; the wave
    /// speed symbol is replaced by its exact value when the branch pins it.
    pub wave_expr: Expr,
    pub speed: Option<RadicalValue>,
}

/// Build the closed-form expressions for a realized form in a given frame.
pub fn assemble(form: &RealizedForm, frame: &WaveFrame) -> Result<ClosedForm, AssemblyError> {
    let eta = Expr::sym("eta");
    let mut parts = Vec::new();
    for (&kind, coeff) in &form.terms {
        parts.push(Expr::prod(vec![coeff.to_expr(), kind.to_expr(&eta)]));
    }
    let eta_expr = if parts.is_empty() {
        Expr::int(0)
    } else {
        Expr::sum(parts).canonical()
    };
    let phase = frame.phase_expr();
    let mut wave_expr = substitute(&eta_expr, "eta", &phase);
    if let Some(v) = &form.speed {
        wave_expr = substitute(&wave_expr, &frame.speed, &v.to_expr());
    }
    Ok(ClosedForm {
        dep: form.dep.clone(),
        eta_expr,
        wave_expr: wave_expr.canonical(),
        speed: form.speed.clone(),
    })
}

/// Replace every derivative and occurrence of `dep` in a PDE by symbolic
/// derivatives of a candidate solution, yielding the residual expression.
pub fn residual_expr(pde: &Expr, dep: &str, candidate: &Expr) -> Result<Expr, ExprError> {
    let mut cache: BTreeMap<Vec<String>, Expr> = BTreeMap::new();
    cache.insert(Vec::new(), candidate.clone());
    fn deriv_of(
        cache: &mut BTreeMap<Vec<String>, Expr>,
        coords: &[String],
    ) -> Result<Expr, ExprError> {
        if let Some(e) = cache.get(coords) {
            return Ok(e.clone());
        }
        let shorter = &coords[..coords.len() - 1];
        let base = deriv_of(cache, shorter)?;
        let d = differentiate(&base, &coords[coords.len() - 1])?;
        cache.insert(coords.to_vec(), d.clone());
        Ok(d)
    }
    fn walk(
        e: &Expr,
        dep: &str,
        cache: &mut BTreeMap<Vec<String>, Expr>,
    ) -> Result<Expr, ExprError> {
        Ok(match e {
            Expr::Deriv { dep: d, coords } if d == dep => {
                let mut cs = coords.clone();
                cs.sort();
                deriv_of(cache, &cs)?
            }
            Expr::Sym(s) if s == dep => cache.get(&Vec::new() as &Vec<String>).unwrap().clone(),
            Expr::Sum(ts) => Expr::Sum(
                ts.iter()
                    .map(|t| walk(t, dep, cache))
                    .collect::<Result<_, _>>()?,
            ),
            Expr::Prod(fs) => Expr::Prod(
                fs.iter()
                    .map(|f| walk(f, dep, cache))
                    .collect::<Result<_, _>>()?,
            ),
            Expr::Pow(b, k) => Expr::Pow(Box::new(walk(b, dep, cache)?), *k),
            Expr::Func(f, a) => Expr::func(*f, walk(a, dep, cache)?),
            other => other.clone(),
        })
    }
    Ok(walk(pde, dep, &mut cache)?.canonical())
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub tol: f64,
    pub points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            tol: 1.0e-8,
            points: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub max_residual: f64,
    pub points: usize,
    pub pass: bool,
}

/// Sample the PDE residual of an assembled solution at random coordinate
/// points with the phase kept in the well-conditioned window |eta| <= 3.
pub fn verify_numeric_residual(
    pde: &Expr,
    dep: &str,
    closed: &ClosedForm,
    frame: &WaveFrame,
    params: &BTreeMap<String, Complex64>,
    cfg: &VerifyConfig,
) -> Result<VerifyReport, AssemblyError> {
    let residual = residual_expr(pde, dep, &closed.wave_expr)
        .map_err(|_| AssemblyError::UnrepresentableCoefficient)?;
    let mut base = EvalContext::new();
    for (k, v) in params {
        base.bind(k.clone(), *v);
    }
    // The phase needs a numeric speed: either the branch pinned one (already
    // substituted into wave_expr) or the caller supplied it as a parameter.
    let speed_val = match &closed.speed {
        Some(v) => Some(v.to_complex(&base).map_err(AssemblyError::Eval)?),
        None => base.get(&frame.speed),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut max_residual = 0.0f64;
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < cfg.points {
        attempts += 1;
        if attempts > cfg.points * 1000 {
            return Err(AssemblyError::BadGrid(
                "could not sample points with |eta| <= 3".to_string(),
            ));
        }
        let mut ctx = base.clone();
        let mut eta = Complex64::new(0.0, 0.0);
        for (name, k) in &frame.spatial {
            let x = rng.gen_range(-2.0..2.0);
            ctx.bind(name.clone(), Complex64::new(x, 0.0));
            let kf = crate::scalar::rational_to_f64(k).map_err(AssemblyError::Eval)?;
            eta += kf * x;
        }
        let t = rng.gen_range(-2.0..2.0);
        ctx.bind(frame.time.clone(), Complex64::new(t, 0.0));
        if let Some(v) = speed_val {
            ctx.bind(frame.speed.clone(), v);
            eta -= v * t;
        }
        if eta.norm() > 3.0 {
            continue;
        }
        let r = match eval(&residual, &ctx) {
            Ok(r) => r,
            Err(EvalError::Pole(_)) => continue,
            Err(e) => return Err(AssemblyError::Eval(e)),
        };
        accepted += 1;
        max_residual = max_residual.max(r.norm());
    }
    Ok(VerifyReport {
        max_residual,
        points: accepted,
        pass: max_residual <= cfg.tol,
    })
}

/// Evaluate a closed form on a uniform grid of the wave variable.
pub fn sample_eta_grid(
    closed: &ClosedForm,
    params: &BTreeMap<String, Complex64>,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Vec<(f64, Complex64)>, AssemblyError> {
    if points < 2 || !(hi > lo) {
        return Err(AssemblyError::BadGrid(format!(
            "need at least 2 points and hi > lo, got [{lo}, {hi}] with {points}"
        )));
    }
    let mut ctx = EvalContext::new();
    for (k, v) in params {
        ctx.bind(k.clone(), *v);
    }
    let mut out = Vec::with_capacity(points);
    let step = (hi - lo) / ((points - 1) as f64);
    for i in 0..points {
        let eta = lo + step * (i as f64);
        let mut c = ctx.clone();
        c.bind("eta", Complex64::new(eta, 0.0));
        let u = eval(&closed.eta_expr, &c).map_err(AssemblyError::Eval)?;
        out.push((eta, u));
    }
    Ok(out)
}

/// Evaluate the assembled wave along one original coordinate, with every
/// other symbol (remaining coordinates, parameters, speed) fixed by
/// `params`. Each row carries the phase value at the sample point, so the
/// output lines up with `sample_eta_grid` rows.
#[allow(clippy::too_many_arguments)]
pub fn sample_coord_grid(
    closed: &ClosedForm,
    phase: &Expr,
    params: &BTreeMap<String, Complex64>,
    coord: &str,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Vec<(f64, Complex64)>, AssemblyError> {
    if points < 2 || !(hi > lo) {
        return Err(AssemblyError::BadGrid(format!(
            "need at least 2 points and hi > lo, got [{lo}, {hi}] with {points}"
        )));
    }
    let mut base = EvalContext::new();
    for (k, v) in params {
        base.bind(k.clone(), *v);
    }
    let mut out = Vec::with_capacity(points);
    let step = (hi - lo) / ((points - 1) as f64);
    for i in 0..points {
        let x = lo + step * (i as f64);
        let mut ctx = base.clone();
        ctx.bind(coord.to_string(), Complex64::new(x, 0.0));
        let eta = eval(phase, &ctx).map_err(AssemblyError::Eval)?;
        let u = eval(&closed.wave_expr, &ctx).map_err(AssemblyError::Eval)?;
        out.push((eta.re, u));
    }
    Ok(out)
}

/// Evaluate a closed form over a 2-coordinate grid with all other symbols
/// fixed by `params`.
#[allow(clippy::too_many_arguments)]
pub fn sample_plane_grid(
    closed: &ClosedForm,
    params: &BTreeMap<String, Complex64>,
    c1: &str,
    range1: (f64, f64, usize),
    c2: &str,
    range2: (f64, f64, usize),
) -> Result<Vec<(f64, f64, Complex64)>, AssemblyError> {
    let (lo1, hi1, n1) = range1;
    let (lo2, hi2, n2) = range2;
    if n1 < 2 || n2 < 2 || !(hi1 > lo1) || !(hi2 > lo2) {
        return Err(AssemblyError::BadGrid(
            "need at least 2x2 points and increasing ranges".to_string(),
        ));
    }
    let mut base = EvalContext::new();
    for (k, v) in params {
        base.bind(k.clone(), *v);
    }
    let s1 = (hi1 - lo1) / ((n1 - 1) as f64);
    let s2 = (hi2 - lo2) / ((n2 - 1) as f64);
    let mut out = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        let x1 = lo1 + s1 * (i as f64);
        for j in 0..n2 {
            let x2 = lo2 + s2 * (j as f64);
            let mut ctx = base.clone();
            ctx.bind(c1.to_string(), Complex64::new(x1, 0.0));
            ctx.bind(c2.to_string(), Complex64::new(x2, 0.0));
            let u = eval(&closed.wave_expr, &ctx).map_err(AssemblyError::Eval)?;
            out.push((x1, x2, u));
        }
    }
    Ok(out)
}
