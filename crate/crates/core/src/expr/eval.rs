//! Complex double-precision evaluation of expressions.
//!
//! `sech`, `tanh`, `cosh`, and the `ln(cosh(..))` pattern route through
//! exponentials of non-positive real part, so large real arguments stay
//! finite instead of overflowing.

use std::collections::HashMap;

use crate::error::EvalError;
use crate::scalar::{Complex64, Scalar};

use super::{Expr, Func};

/// Symbol bindings for numeric evaluation.
#[derive(Debug, Clone, Default)]
pub struct EvalContext {
    bindings: HashMap<String, Complex64>,
}

impl EvalContext {
    pub fn new() -> Self {
        EvalContext::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, value: Complex64) -> &mut Self {
        self.bindings.insert(name.into(), value);
        self
    }

    pub fn with(mut self, name: impl Into<String>, value: Complex64) -> Self {
        self.bind(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.bindings.get(name).copied()
    }
}

fn sign_re(z: Complex64) -> f64 {
    if z.re < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Stable tanh: for s = sign(Re z), tanh(z) = s*(1 - e^{-2sz})/(1 + e^{-2sz}).
pub fn stable_tanh(z: Complex64) -> Complex64 {
    let s = sign_re(z);
    let t = (z * (-2.0 * s)).exp();
    (Complex64::new(1.0, 0.0) - t) / (Complex64::new(1.0, 0.0) + t) * s
}

/// Stable sech: 2e^{-sz}/(1 + e^{-2sz}) with s = sign(Re z).
pub fn stable_sech(z: Complex64) -> Complex64 {
    let s = sign_re(z);
    let t = (z * (-s)).exp();
    t * 2.0 / (Complex64::new(1.0, 0.0) + t * t)
}

/// Stable ln(cosh(z)) = sz + ln((1 + e^{-2sz})/2) with s = sign(Re z).
pub fn stable_ln_cosh(z: Complex64) -> Complex64 {
    let s = sign_re(z);
    let t = (z * (-2.0 * s)).exp();
    z * s + ((Complex64::new(1.0, 0.0) + t) / 2.0).ln()
}

fn apply_func(f: Func, z: Complex64) -> Complex64 {
    match f {
        Func::Sin => z.sin(),
        Func::Cos => z.cos(),
        Func::Tan => z.tan(),
        Func::Sinh => z.sinh(),
        Func::Cosh => {
            // cosh = 1/sech keeps the same guarded exponential path.
            let s = stable_sech(z);
            s.inv()
        }
        Func::Tanh => stable_tanh(z),
        Func::Sech => stable_sech(z),
        Func::Exp => z.exp(),
        Func::Ln => z.ln(),
        Func::Arctan => z.atan(),
        Func::Sqrt => z.sqrt(),
    }
}

/// Evaluate at the given bindings. Fails on unbound symbols, unresolved
/// derivative markers, and poles or non-finite intermediate values.
pub fn eval(e: &Expr, ctx: &EvalContext) -> Result<Complex64, EvalError> {
    let v = eval_inner(e, ctx)?;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite(e.render()))
    }
}

fn eval_inner(e: &Expr, ctx: &EvalContext) -> Result<Complex64, EvalError> {
    Ok(match e {
        Expr::Const(c) => c.to_complex(ctx)?,
        Expr::Sym(s) => ctx
            .get(s)
            .ok_or_else(|| EvalError::UnboundSymbol(s.clone()))?,
        Expr::Sum(terms) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in terms {
                acc += eval_inner(t, ctx)?;
            }
            acc
        }
        Expr::Prod(factors) => {
            let mut acc = Complex64::new(1.0, 0.0);
            for f in factors {
                acc *= eval_inner(f, ctx)?;
            }
            acc
        }
        Expr::Pow(base, exp) => {
            let b = eval_inner(base, ctx)?;
            if *exp < 0 && b.norm() == 0.0 {
                return Err(EvalError::Pole(e.render()));
            }
            b.powi(*exp as i32)
        }
        Expr::Func(Func::Ln, arg) => {
            // ln(cosh(w)) gets the overflow-safe form.
            if let Expr::Func(Func::Cosh, inner) = &**arg {
                let w = eval_inner(inner, ctx)?;
                return Ok(stable_ln_cosh(w));
            }
            let a = eval_inner(arg, ctx)?;
            if a.norm() == 0.0 {
                return Err(EvalError::Pole(e.render()));
            }
            a.ln()
        }
        Expr::Func(f, arg) => apply_func(*f, eval_inner(arg, ctx)?),
        Expr::Deriv { dep, coords } => {
            return Err(EvalError::UnresolvedDerivative(format!(
                "D({dep},{})",
                coords.join(",")
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn ev(src: &str, ctx: &EvalContext) -> Complex64 {
        eval(&parse_expr(src).unwrap().canonical(), ctx).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn basic_values() {
        let ctx = EvalContext::new().with("x", Complex64::new(0.5, 0.0));
        assert!(close(
            ev("tanh(x)", &ctx),
            Complex64::new(0.5f64.tanh(), 0.0),
            1e-15
        ));
        assert!(close(
            ev("sech(x)", &ctx),
            Complex64::new(1.0 / 0.5f64.cosh(), 0.0),
            1e-15
        ));
        assert!(close(ev("i^2", &ctx), Complex64::new(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn hyperbolics_stay_finite_for_large_arguments() {
        for x in [400.0, -400.0, 5000.0] {
            let ctx = EvalContext::new().with("x", Complex64::new(x, 0.3));
            let t = ev("tanh(x)", &ctx);
            assert!((t.norm() - 1.0).abs() < 1e-10);
            let s = ev("sech(x)", &ctx);
            assert!(s.norm() < 1e-100);
            let lc = ev("ln(cosh(x))", &ctx);
            assert!((lc.re - x.abs()).abs() < 1.0);
        }
    }

    #[test]
    fn identities_on_complex_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.2..1.2));
            let ctx = EvalContext::new().with("z", z);
            let lhs = ev("sech(z)^2 + tanh(z)^2", &ctx);
            assert!(close(lhs, Complex64::new(1.0, 0.0), 1e-10), "at {z}");
            let sinh_check = ev("sinh(2*z) - 2*sinh(z)*cosh(z)", &ctx);
            assert!(close(sinh_check, Complex64::new(0.0, 0.0), 1e-10));
        }
    }

    #[test]
    fn unbound_and_pole_errors() {
        let ctx = EvalContext::new();
        assert!(matches!(
            eval(&parse_expr("q + 1").unwrap(), &ctx),
            Err(EvalError::UnboundSymbol(_))
        ));
        let ctx = EvalContext::new().with("x", Complex64::new(0.0, 0.0));
        assert!(matches!(
            eval(&parse_expr("x^-1").unwrap(), &ctx),
            Err(EvalError::Pole(_))
        ));
        assert!(eval(&parse_expr("ln(x)").unwrap(), &ctx).is_err());
    }

    #[test]
    fn gudermannian_derivative_matches_sech() {
        // d/dx 2*arctan(tanh(x/2)) = sech(x), checked by finite differences.
        let f = parse_expr("2*arctan(tanh(1/2*x))").unwrap().canonical();
        let h = 1e-6;
        for x in [-2.0f64, -0.5, 0.0, 0.7, 2.3] {
            let up = eval(
                &f,
                &EvalContext::new().with("x", Complex64::new(x + h, 0.0)),
            )
            .unwrap();
            let dn = eval(
                &f,
                &EvalContext::new().with("x", Complex64::new(x - h, 0.0)),
            )
            .unwrap();
            let fd = (up - dn) / (2.0 * h);
            let sech = 1.0 / x.cosh();
            assert!((fd.re - sech).abs() < 1e-8, "x = {x}");
        }
    }
}
