//! Exact differentiation and symbol substitution on expressions.

use crate::error::ExprError;
use crate::scalar::gauss_rat;

use super::{Expr, Func};

/// d/d`sym`, with the chain rule applied through the function vocabulary.
pub fn differentiate(e: &Expr, sym: &str) -> Result<Expr, ExprError> {
    let d = diff(e, sym)?;
    Ok(d.canonical())
}

fn diff(e: &Expr, sym: &str) -> Result<Expr, ExprError> {
    Ok(match e {
        Expr::Const(_) => Expr::int(0),
        Expr::Sym(s) => {
            if s == sym {
                Expr::int(1)
            } else {
                Expr::int(0)
            }
        }
        Expr::Sum(terms) => Expr::Sum(
            terms
                .iter()
                .map(|t| diff(t, sym))
                .collect::<Result<_, _>>()?,
        ),
        Expr::Prod(factors) => {
            let mut terms = Vec::with_capacity(factors.len());
            for (k, f) in factors.iter().enumerate() {
                let df = diff(f, sym)?;
                if df.is_zero_const() {
                    continue;
                }
                let mut parts = factors.clone();
                parts[k] = df;
                terms.push(Expr::Prod(parts));
            }
            Expr::Sum(terms)
        }
        Expr::Pow(base, exp) => {
            let db = diff(base, sym)?;
            if db.is_zero_const() {
                Expr::int(0)
            } else {
                Expr::prod(vec![
                    Expr::int(*exp),
                    Expr::pow((**base).clone(), exp - 1),
                    db,
                ])
            }
        }
        Expr::Func(f, arg) => {
            let da = diff(arg, sym)?;
            if da.is_zero_const() {
                return Ok(Expr::int(0));
            }
            let a = (**arg).clone();
            let outer = match f {
                Func::Sin => Expr::func(Func::Cos, a),
                Func::Cos => Expr::prod(vec![Expr::int(-1), Expr::func(Func::Sin, a)]),
                Func::Tan => Expr::sum(vec![
                    Expr::int(1),
                    Expr::pow(Expr::func(Func::Tan, a), 2),
                ]),
                Func::Sinh => Expr::func(Func::Cosh, a),
                Func::Cosh => Expr::func(Func::Sinh, a),
                Func::Tanh => Expr::pow(Expr::func(Func::Sech, a), 2),
                Func::Sech => Expr::prod(vec![
                    Expr::int(-1),
                    Expr::func(Func::Sech, a.clone()),
                    Expr::func(Func::Tanh, a),
                ]),
                Func::Exp => Expr::func(Func::Exp, a),
                Func::Ln => Expr::pow(a, -1),
                Func::Arctan => Expr::pow(
                    Expr::sum(vec![Expr::int(1), Expr::pow(a, 2)]),
                    -1,
                ),
                Func::Sqrt => Expr::prod(vec![
                    Expr::Const(gauss_rat(1, 2)),
                    Expr::pow(Expr::func(Func::Sqrt, a), -1),
                ]),
            };
            Expr::prod(vec![outer, da])
        }
        Expr::Deriv { dep, coords } => {
            return Err(ExprError::CannotDifferentiate(format!(
                "derivative marker D({dep},{})",
                coords.join(",")
            )))
        }
    })
}

/// Replace every occurrence of the symbol with the given expression;
/// the result is canonicalized. Derivative markers are left untouched.
pub fn substitute(e: &Expr, sym: &str, with: &Expr) -> Expr {
    subst(e, sym, with).canonical()
}

fn subst(e: &Expr, sym: &str, with: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Deriv { .. } => e.clone(),
        Expr::Sym(s) => {
            if s == sym {
                with.clone()
            } else {
                e.clone()
            }
        }
        Expr::Sum(v) => Expr::Sum(v.iter().map(|t| subst(t, sym, with)).collect()),
        Expr::Prod(v) => Expr::Prod(v.iter().map(|t| subst(t, sym, with)).collect()),
        Expr::Pow(b, k) => Expr::pow(subst(b, sym, with), *k),
        Expr::Func(f, a) => Expr::func(*f, subst(a, sym, with)),
    }
}
