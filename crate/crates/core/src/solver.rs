//! Exact solver for the extracted coefficient systems: lex Gröbner bases
//! over the parameter field, followed by a factor-split search that
//! enumerates solution branches with radical values.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::SolverError;
use crate::poly::{Monomial, Polynomial, VarSet};
use crate::radical::{
    canonicalize_radical, eval_partial_radical, RadKey, RadicalSum, RadicalValue, Sign,
};
use crate::ratfunc::RationalFunction;
use crate::scalar::Scalar;
use crate::trig::{canonical_primitive, PolySystem};
use crate::SysPoly;

/// Lexicographic order driven by an explicit variable priority list
/// (most significant first).
#[derive(Debug, Clone)]
pub struct TermOrder {
    priority: Vec<usize>,
}

impl TermOrder {
    pub fn lex(priority: Vec<usize>) -> TermOrder {
        TermOrder { priority }
    }

    /// Standard order for ansatz unknowns: the last variable (the wave
    /// speed) is most significant, the first (A0) least.
    pub fn for_arity(arity: usize) -> TermOrder {
        TermOrder {
            priority: (0..arity).rev().collect(),
        }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
        for &i in &self.priority {
            let c = a.exp(i).cmp(&b.exp(i));
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        std::cmp::Ordering::Equal
    }

    /// Leading term under this order.
    pub fn lead<'a>(&self, p: &'a SysPoly) -> Option<(&'a Monomial, &'a RationalFunction)> {
        p.iter().max_by(|(m1, _), (m2, _)| self.cmp(m1, m2))
    }
}

/// S-polynomial of two nonzero polynomials.
pub fn s_polynomial(f: &SysPoly, g: &SysPoly, ord: &TermOrder) -> SysPoly {
    let (mf, cf) = ord.lead(f).expect("nonzero");
    let (mg, cg) = ord.lead(g).expect("nonzero");
    let l = mf.lcm(mg);
    let tf = mf.quotient_into(&l);
    let tg = mg.quotient_into(&l);
    let a = f.mul_term(&tf, &cf.inv().expect("unit"));
    let b = g.mul_term(&tg, &cg.inv().expect("unit"));
    &a - &b
}

/// Full normal form: every monomial of the result is irreducible modulo the
/// basis leading terms.
pub fn normal_form(p: &SysPoly, basis: &[SysPoly], ord: &TermOrder) -> SysPoly {
    let mut p = p.clone();
    let mut r = Polynomial::zero_over(p.vars());
    'outer: while !p.is_zero() {
        let (m, c) = {
            let (m, c) = ord.lead(&p).unwrap();
            (m.clone(), c.clone())
        };
        for b in basis {
            if b.is_zero() {
                continue;
            }
            let (mb, cb) = ord.lead(b).unwrap();
            if mb.divides(&m) {
                let t = mb.quotient_into(&m);
                let k = c.field_div(cb);
                p = &p - &b.mul_term(&t, &k);
                continue 'outer;
            }
        }
        r.add_term(m.clone(), c.clone());
        p.add_term(m, -c);
    }
    r
}

/// Buchberger's algorithm with the coprime-leading-term criterion and a hard
/// cap on processed critical pairs. Returns the unique reduced basis, sorted
/// by leading monomial.
pub fn buchberger(
    gens: &[SysPoly],
    ord: &TermOrder,
    max_pairs: usize,
) -> Result<Vec<SysPoly>, SolverError> {
    let mut basis: Vec<SysPoly> = Vec::new();
    for g in gens {
        if !g.is_zero() {
            basis.push(g.clone());
        }
    }
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let mut pairs: VecDeque<(usize, usize)> = VecDeque::new();
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            pairs.push_back((i, j));
        }
    }
    let mut processed = 0usize;
    while let Some((i, j)) = pairs.pop_front() {
        processed += 1;
        if processed > max_pairs {
            return Err(SolverError::PairCapExceeded(max_pairs));
        }
        let (mi, _) = ord.lead(&basis[i]).unwrap();
        let (mj, _) = ord.lead(&basis[j]).unwrap();
        // Coprime leading monomials reduce to zero.
        if mi.lcm(mj) == mi.mul(mj) {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j], ord);
        let r = normal_form(&s, &basis, ord);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(r);
            for i in 0..k {
                pairs.push_back((i, k));
            }
        }
    }
    Ok(reduce_basis(basis, ord))
}

fn reduce_basis(mut basis: Vec<SysPoly>, ord: &TermOrder) -> Vec<SysPoly> {
    // Minimal: drop elements whose leading monomial is divisible by another.
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        let (mi, _) = ord.lead(&basis[i]).unwrap();
        let mi = mi.clone();
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (mj, _) = ord.lead(&basis[j]).unwrap();
            if mj.divides(&mi) && (mj != &mi || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut minimal: Vec<SysPoly> = basis
        .drain(..)
        .zip(keep)
        .filter_map(|(b, k)| if k { Some(b) } else { None })
        .collect();
    // Interreduce tails until stable.
    for _ in 0..100 {
        let mut changed = false;
        for i in 0..minimal.len() {
            let others: Vec<SysPoly> = minimal
                .iter()
                .enumerate()
                .filter_map(|(j, b)| if j != i { Some(b.clone()) } else { None })
                .collect();
            let r = normal_form(&minimal[i], &others, ord);
            if r != minimal[i] {
                minimal[i] = r;
                changed = true;
            }
        }
        minimal.retain(|b| !b.is_zero());
        if !changed {
            break;
        }
    }
    for b in minimal.iter_mut() {
        let lc = ord.lead(b).unwrap().1.clone();
        *b = b.map_coeffs(|c| c.field_div(&lc));
    }
    minimal.sort_by(|a, b| {
        let (ma, _) = ord.lead(a).unwrap();
        let (mb, _) = ord.lead(b).unwrap();
        ord.cmp(ma, mb)
    });
    minimal
}

/// Ideal membership via reduction to zero by a Gröbner basis.
pub fn reduces_to_zero(p: &SysPoly, gb: &[SysPoly], ord: &TermOrder) -> bool {
    normal_form(p, gb, ord).is_zero()
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_pairs: usize,
    pub max_depth: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_pairs: 10_000,
            max_depth: 64,
        }
    }
}

/// One solution branch: exact assignments, unconstrained unknowns, and any
/// residual constraints the solver could not resolve in radicals.
#[derive(Debug, Clone)]
pub struct SolutionBranch {
    pub vars: Arc<VarSet>,
    pub assignments: BTreeMap<usize, RadicalValue>,
    pub free: BTreeSet<usize>,
    pub unresolved: Vec<String>,
    pub conditions: Vec<String>,
}

impl SolutionBranch {
    pub fn is_resolved(&self) -> bool {
        self.unresolved.is_empty()
    }

    pub fn value_of(&self, name: &str) -> Option<&RadicalValue> {
        let idx = self.vars.index_of(name)?;
        self.assignments.get(&idx)
    }

    pub fn is_free(&self, name: &str) -> bool {
        self.vars
            .index_of(name)
            .is_some_and(|i| self.free.contains(&i))
    }

    /// Canonical identity used for deduplication and ordering.
    pub fn key(&self) -> String {
        let mut parts = Vec::new();
        for (i, v) in &self.assignments {
            parts.push(format!("{}={}", self.vars.name(*i), v.render()));
        }
        for i in &self.free {
            parts.push(format!("{} free", self.vars.name(*i)));
        }
        for u in &self.unresolved {
            parts.push(format!("unresolved {u}"));
        }
        parts.join("; ")
    }

    pub fn render_lines(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for (i, v) in &self.assignments {
            lines.push(format!("{} = {}", self.vars.name(*i), v.render()));
        }
        for i in &self.free {
            lines.push(format!("{} free", self.vars.name(*i)));
        }
        for u in &self.unresolved {
            lines.push(format!("unresolved: {u} = 0"));
        }
        lines
    }
}

/// All branches found for one system, deduplicated and sorted.
#[derive(Debug, Clone, Default)]
pub struct SolutionSet {
    pub branches: Vec<SolutionBranch>,
}

impl SolutionSet {
    pub fn resolved(&self) -> impl Iterator<Item = &SolutionBranch> {
        self.branches.iter().filter(|b| b.is_resolved())
    }
}

/// Check that every equation vanishes identically under a branch's
/// assignments, with free unknowns treated as indeterminates.
pub fn check_branch(eqs: &[SysPoly], branch: &SolutionBranch) -> bool {
    for eq in eqs {
        if !eval_partial_radical(eq, &branch.assignments).is_empty() {
            return false;
        }
    }
    true
}

struct SearchCtx<'a> {
    ord: TermOrder,
    config: &'a SolverConfig,
    vars: Arc<VarSet>,
    original: Vec<SysPoly>,
    out: Vec<SolutionBranch>,
    seen: BTreeSet<String>,
}

/// Solve a coefficient system by repeated Gröbner reduction and splitting on
/// factors of the structurally simplest basis element. Every branch is
/// either fully resolved in radicals, marked free where underdetermined, or
/// returned as unresolved with its residual system.
pub fn factor_split_solve(
    system: &PolySystem,
    config: &SolverConfig,
) -> Result<SolutionSet, SolverError> {
    let eqs = system.polys();
    let vars = Arc::clone(&system.vars);
    let ord = TermOrder::for_arity(vars.arity());
    let mut ctx = SearchCtx {
        ord,
        config,
        vars,
        original: eqs.clone(),
        out: Vec::new(),
        seen: BTreeSet::new(),
    };
    solve_rec(&mut ctx, eqs, BTreeMap::new(), Vec::new(), 0)?;
    let mut out = std::mem::take(&mut ctx.out);
    out.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(SolutionSet { branches: out })
}

fn record_leaf(ctx: &mut SearchCtx, mut branch: SolutionBranch) {
    if branch.is_resolved() {
        branch.free = (0..ctx.vars.arity())
            .filter(|i| !branch.assignments.contains_key(i))
            .collect();
        if !check_branch(&ctx.original, &branch) {
            return;
        }
    }
    let key = branch.key();
    if ctx.seen.insert(key) {
        ctx.out.push(branch);
    }
}

fn record_unresolved(
    ctx: &mut SearchCtx,
    assignments: BTreeMap<usize, RadicalValue>,
    conditions: Vec<String>,
    residual: Vec<String>,
) {
    let branch = SolutionBranch {
        vars: Arc::clone(&ctx.vars),
        assignments,
        free: BTreeSet::new(),
        unresolved: residual,
        conditions,
    };
    let key = branch.key();
    if ctx.seen.insert(key) {
        ctx.out.push(branch);
    }
}

fn clean_system(eqs: Vec<SysPoly>) -> Result<Vec<SysPoly>, ()> {
    let mut out: Vec<SysPoly> = Vec::new();
    for eq in eqs {
        let c = canonical_primitive(&eq);
        if c.is_zero() {
            continue;
        }
        if c.as_constant().is_some() {
            // Nonzero constant: inconsistent system.
            return Err(());
        }
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

fn solve_rec(
    ctx: &mut SearchCtx,
    eqs: Vec<SysPoly>,
    assignments: BTreeMap<usize, RadicalValue>,
    conditions: Vec<String>,
    depth: usize,
) -> Result<(), SolverError> {
    let eqs = match clean_system(eqs) {
        Ok(e) => e,
        Err(()) => return Ok(()), // inconsistent: dead branch
    };
    if eqs.is_empty() {
        record_leaf(
            ctx,
            SolutionBranch {
                vars: Arc::clone(&ctx.vars),
                assignments,
                free: BTreeSet::new(),
                unresolved: Vec::new(),
                conditions,
            },
        );
        return Ok(());
    }
    if depth >= ctx.config.max_depth {
        let residual: Vec<String> = eqs.iter().map(|e| e.render()).collect();
        record_unresolved(ctx, assignments, conditions, residual);
        return Ok(());
    }

    let gb = buchberger(&eqs, &ctx.ord, ctx.config.max_pairs)?;
    let gb: Vec<SysPoly> = gb.iter().map(canonical_primitive).collect();
    if gb.iter().any(|p| p.as_constant().is_some() && !p.is_zero()) {
        return Ok(()); // ideal is (1): no solutions on this branch
    }
    if gb.is_empty() {
        record_leaf(
            ctx,
            SolutionBranch {
                vars: Arc::clone(&ctx.vars),
                assignments,
                free: BTreeSet::new(),
                unresolved: Vec::new(),
                conditions,
            },
        );
        return Ok(());
    }

    // Pick the structurally simplest element: fewest unknowns, then lowest
    // total degree, then first in the deterministic basis order.
    let pick = gb
        .iter()
        .enumerate()
        .min_by_key(|(k, p)| (p.occurring_vars().len(), p.total_degree(), *k))
        .map(|(_, p)| p.clone())
        .unwrap();

    // Split off the monomial part: variables dividing every term.
    let arity = ctx.vars.arity();
    let mut min_exp = vec![u32::MAX; arity];
    for (m, _) in pick.iter() {
        for i in 0..arity {
            min_exp[i] = min_exp[i].min(m.exp(i));
        }
    }
    let mono_vars: Vec<usize> = (0..arity).filter(|&i| min_exp[i] >= 1).collect();
    let shift = Monomial(
        (0..arity)
            .map(|i| if min_exp[i] == u32::MAX { 0 } else { min_exp[i] })
            .collect(),
    );
    let mut cofactor = Polynomial::zero_over(&ctx.vars);
    for (m, c) in pick.iter() {
        cofactor.add_term(shift.quotient_into(m), c.clone());
    }
    let cofactor = canonical_primitive(&cofactor);

    // Branch: each monomial variable vanishes.
    for &i in &mono_vars {
        let mut values = BTreeMap::new();
        values.insert(i, RationalFunction::zero());
        let next: Vec<SysPoly> = gb.iter().map(|e| e.substitute_scalars(&values)).collect();
        let mut assign2 = assignments.clone();
        assign2.insert(i, RadicalValue::zero());
        let mut conds2 = conditions.clone();
        conds2.push(format!("{} = 0", ctx.vars.name(i)));
        solve_rec(ctx, next, assign2, conds2, depth + 1)?;
    }

    if cofactor.as_constant().is_some() {
        return Ok(()); // the picked element was a pure monomial
    }

    let occurring = cofactor.occurring_vars();
    if occurring.len() == 1 {
        let x = occurring[0];
        return branch_univariate(ctx, &gb, &cofactor, x, assignments, conditions, depth);
    }

    if !mono_vars.is_empty() {
        // Genuine split: keep searching with the cofactor as a new equation.
        let mut next = gb.clone();
        next.push(cofactor.clone());
        let mut conds2 = conditions;
        conds2.push(format!("factor {} = 0", cofactor.render()));
        return solve_rec(ctx, next, assignments, conds2, depth + 1);
    }

    // Multivariate element the factorizer cannot split further.
    let mut residual: Vec<String> = gb.iter().map(|e| e.render()).collect();
    residual.sort();
    record_unresolved(ctx, assignments, conditions, residual);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn branch_univariate(
    ctx: &mut SearchCtx,
    gb: &[SysPoly],
    f: &SysPoly,
    x: usize,
    assignments: BTreeMap<usize, RadicalValue>,
    conditions: Vec<String>,
    depth: usize,
) -> Result<(), SolverError> {
    let deg = f.degree_in(x);
    let coeff_of = |k: u32| -> RationalFunction {
        f.coeff(&Monomial::var_pow(ctx.vars.arity(), x, k))
    };
    match deg {
        1 => {
            let c1 = coeff_of(1);
            let c0 = coeff_of(0);
            let root = -(c0.field_div(&c1));
            apply_scalar_root(ctx, gb, x, root, assignments, conditions, depth)
        }
        2 => {
            let c2 = coeff_of(2);
            let c1 = coeff_of(1);
            let c0 = coeff_of(0);
            if c1.is_zero() {
                // x^2 = -c0/c2
                let target = -(c0.field_div(&c2));
                let rv = canonicalize_radical(RationalFunction::one(), target);
                return apply_root_pair(ctx, gb, x, rv, assignments, conditions, depth);
            }
            let four = RationalFunction::constant(&VarSet::empty(), crate::scalar::gauss_int(4));
            let disc = c1.square() - four * c2.clone() * c0.clone();
            let rd = canonicalize_radical(RationalFunction::one(), disc);
            if rd.is_radical_free() {
                let sq = rd.as_rf().unwrap().clone();
                let two_a = c2.clone() + c2.clone();
                let r1 = (sq.clone() - c1.clone()).field_div(&two_a);
                let r2 = (-sq - c1).field_div(&two_a);
                apply_scalar_root(
                    ctx,
                    gb,
                    x,
                    r1.clone(),
                    assignments.clone(),
                    conditions.clone(),
                    depth,
                )?;
                if r2 != r1 {
                    apply_scalar_root(ctx, gb, x, r2, assignments, conditions, depth)?;
                }
                Ok(())
            } else {
                // Root is a sum of a rational and a radical part, which the
                // radical value type cannot carry: report as unresolved.
                let mut residual: Vec<String> = gb.iter().map(|e| e.render()).collect();
                residual.sort();
                record_unresolved(ctx, assignments, conditions, residual);
                Ok(())
            }
        }
        _ => {
            let mut residual: Vec<String> = gb.iter().map(|e| e.render()).collect();
            residual.sort();
            record_unresolved(ctx, assignments, conditions, residual);
            Ok(())
        }
    }
}

fn apply_scalar_root(
    ctx: &mut SearchCtx,
    gb: &[SysPoly],
    x: usize,
    root: RationalFunction,
    assignments: BTreeMap<usize, RadicalValue>,
    conditions: Vec<String>,
    depth: usize,
) -> Result<(), SolverError> {
    let mut values = BTreeMap::new();
    values.insert(x, root.clone());
    let next: Vec<SysPoly> = gb.iter().map(|e| e.substitute_scalars(&values)).collect();
    let mut assign2 = assignments;
    assign2.insert(x, RadicalValue::from_rf(root.clone()));
    let mut conds2 = conditions;
    conds2.push(format!("{} = {}", ctx.vars.name(x), root.render()));
    solve_rec(ctx, next, assign2, conds2, depth + 1)
}

fn apply_root_pair(
    ctx: &mut SearchCtx,
    gb: &[SysPoly],
    x: usize,
    rv: RadicalValue,
    assignments: BTreeMap<usize, RadicalValue>,
    conditions: Vec<String>,
    depth: usize,
) -> Result<(), SolverError> {
    if rv.is_zero() {
        return apply_scalar_root(
            ctx,
            gb,
            x,
            RationalFunction::zero(),
            assignments,
            conditions,
            depth,
        );
    }
    for sign in [Sign::Plus, Sign::Minus] {
        let val = rv.with_sign(sign);
        if let Some(rf) = val.as_rf() {
            apply_scalar_root(
                ctx,
                gb,
                x,
                rf.clone(),
                assignments.clone(),
                conditions.clone(),
                depth,
            )?;
        } else {
            apply_radical_root(
                ctx,
                gb,
                x,
                val,
                assignments.clone(),
                conditions.clone(),
                depth,
            )?;
        }
    }
    Ok(())
}

enum Classified {
    Dropped,
    Poly(SysPoly),
    Dead,
    NewAssign(usize, RadicalValue),
    Residual(String),
}

fn classify_parts(
    ctx: &SearchCtx,
    parts: BTreeMap<Monomial, RadicalSum>,
) -> Classified {
    if parts.is_empty() {
        return Classified::Dropped;
    }
    // Coefficients that are all plain multiples of one common radical
    // sqrt(k): dividing the equation by the nonzero unit sqrt(k) leaves an
    // ordinary polynomial (k = 1 is the all-rational case).
    let mut single_terms: Vec<(&Monomial, &RadKey, &RationalFunction)> = Vec::new();
    let mut uniform = true;
    for (m, s) in &parts {
        let terms: Vec<_> = s.iter().collect();
        if terms.len() != 1 {
            uniform = false;
            break;
        }
        single_terms.push((m, terms[0].0, terms[0].1));
    }
    if uniform {
        let key0 = single_terms[0].1;
        if single_terms.iter().all(|(_, k, _)| *k == key0) {
            let mut p = Polynomial::zero_over(&ctx.vars);
            for (m, _, outer) in single_terms {
                p.add_term(m.clone(), (*outer).clone());
            }
            return Classified::Poly(p);
        }
    }
    let monos: Vec<&Monomial> = parts.keys().collect();
    if monos.len() == 1 && monos[0].is_unit() {
        // Constant radical sum that is not identically zero.
        return Classified::Dead;
    }
    // Linear in exactly one unknown: a*x + b = 0.
    let nonunit: Vec<&Monomial> = monos.iter().copied().filter(|m| !m.is_unit()).collect();
    if nonunit.len() == 1 && nonunit[0].total_degree() == 1 {
        let x = (0..nonunit[0].arity())
            .find(|&i| nonunit[0].exp(i) == 1)
            .unwrap();
        let a = parts.get(nonunit[0]).unwrap().clone();
        let b = parts
            .get(&Monomial::unit(nonunit[0].arity()))
            .cloned()
            .unwrap_or_else(RadicalSum::zero);
        if let Some(ainv) = a.try_inv() {
            let val = b.mul(&ainv).neg();
            if let Some(rv) = val.try_to_value() {
                return Classified::NewAssign(x, rv);
            }
        }
    }
    let rendered: Vec<String> = parts
        .iter()
        .map(|(m, s)| {
            let mono = render_monomial(&ctx.vars, m);
            if mono == "1" {
                format!("({})", s.render())
            } else {
                format!("({})*{}", s.render(), mono)
            }
        })
        .collect();
    Classified::Residual(rendered.join(" + "))
}

fn render_monomial(vars: &Arc<VarSet>, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for i in 0..m.arity() {
        let e = m.exp(i);
        if e == 1 {
            parts.push(vars.name(i).to_string());
        } else if e > 1 {
            parts.push(format!("{}^{}", vars.name(i), e));
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

#[allow(clippy::too_many_arguments)]
fn apply_radical_root(
    ctx: &mut SearchCtx,
    gb: &[SysPoly],
    x: usize,
    val: RadicalValue,
    assignments: BTreeMap<usize, RadicalValue>,
    conditions: Vec<String>,
    depth: usize,
) -> Result<(), SolverError> {
    let mut assign2 = assignments;
    let mut conds2 = conditions;
    conds2.push(format!("{} = {}", ctx.vars.name(x), val.render()));
    assign2.insert(x, val.clone());
    let mut eqs: Vec<SysPoly> = gb.to_vec();
    let mut queue: VecDeque<(usize, RadicalValue)> = VecDeque::new();
    queue.push_back((x, val));
    let mut residuals: Vec<String> = Vec::new();
    while let Some((i, v)) = queue.pop_front() {
        let mut single = BTreeMap::new();
        single.insert(i, v.clone());
        let mut next_eqs = Vec::new();
        for eq in &eqs {
            if eq.degree_in(i) == 0 {
                next_eqs.push(eq.clone());
                continue;
            }
            let parts = eval_partial_radical(eq, &single);
            match classify_parts(ctx, parts) {
                Classified::Dropped => {}
                Classified::Poly(p) => next_eqs.push(p),
                Classified::Dead => return Ok(()),
                Classified::NewAssign(y, rv) => {
                    if let Some(existing) = assign2.get(&y) {
                        if existing != &rv {
                            return Ok(()); // contradictory forced values
                        }
                    } else {
                        conds2.push(format!("{} = {}", ctx.vars.name(y), rv.render()));
                        assign2.insert(y, rv.clone());
                        queue.push_back((y, rv));
                    }
                }
                Classified::Residual(s) => residuals.push(s),
            }
        }
        eqs = next_eqs;
        // A newly assigned unknown may still occur in kept equations from
        // earlier passes; the queue revisits them in turn.
    }
    if !residuals.is_empty() {
        residuals.extend(eqs.iter().map(|e| e.render()));
        residuals.sort();
        residuals.dedup();
        record_unresolved(ctx, assign2, conds2, residuals);
        return Ok(());
    }
    solve_rec(ctx, eqs, assign2, conds2, depth + 1)
}
