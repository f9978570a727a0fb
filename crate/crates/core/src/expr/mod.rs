//! Symbolic expressions: a small fixed-vocabulary AST with a canonical form,
//! a text grammar, exact differentiation, and complex numeric evaluation.

mod calculus;
mod eval;
mod parse;

pub use calculus::{differentiate, substitute};
pub use eval::{eval, stable_ln_cosh, stable_sech, stable_tanh, EvalContext};
pub use parse::parse_expr;

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::scalar::{cmp_gauss, gauss_int, gauss_rat, GaussianRational, Scalar};

/// Unary function vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Sech,
    Exp,
    Ln,
    Arctan,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sech => "sech",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Arctan => "arctan",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "sech" => Func::Sech,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "arctan" => Func::Arctan,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Expression node. Constants are exact Gaussian rationals; exponents are
/// signed integers; `Deriv` is a partial-derivative marker resolved by the
/// reduction stage.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(GaussianRational),
    Sym(String),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Func(Func, Box<Expr>),
    Deriv { dep: String, coords: Vec<String> },
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(gauss_int(n))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::Const(gauss_rat(num, den))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(name.to_string())
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        Expr::Sum(terms)
    }

    pub fn prod(factors: Vec<Expr>) -> Expr {
        Expr::Prod(factors)
    }

    pub fn pow(base: Expr, exp: i64) -> Expr {
        Expr::Pow(Box::new(base), exp)
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        Expr::Func(f, Box::new(arg))
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    /// Flatten, fold constants, sort operands; no algebraic rewriting beyond
    /// that.
    pub fn canonical(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Sym(_) => self.clone(),
            Expr::Deriv { dep, coords } => {
                let mut coords = coords.clone();
                coords.sort();
                Expr::Deriv {
                    dep: dep.clone(),
                    coords,
                }
            }
            Expr::Func(f, a) => Expr::func(*f, a.canonical()),
            Expr::Pow(base, exp) => {
                let base = base.canonical();
                if *exp == 0 {
                    return Expr::int(1);
                }
                if *exp == 1 {
                    return base;
                }
                match base {
                    Expr::Const(c) => {
                        if let Some(v) = const_pow(&c, *exp) {
                            return Expr::Const(v);
                        }
                        Expr::pow(Expr::Const(c), *exp)
                    }
                    Expr::Pow(inner, j) => Expr::pow(*inner, j * exp),
                    other => Expr::pow(other, *exp),
                }
            }
            Expr::Sum(terms) => {
                let mut flat = Vec::new();
                let mut konst = gauss_int(0);
                for t in terms {
                    match t.canonical() {
                        Expr::Sum(inner) => {
                            for u in inner {
                                match u {
                                    Expr::Const(c) => konst = konst + c,
                                    other => flat.push(other),
                                }
                            }
                        }
                        Expr::Const(c) => konst = konst + c,
                        other => flat.push(other),
                    }
                }
                flat.sort_by(expr_cmp);
                if !konst.is_zero() {
                    flat.push(Expr::Const(konst));
                }
                match flat.len() {
                    0 => Expr::int(0),
                    1 => flat.pop().unwrap(),
                    _ => Expr::Sum(flat),
                }
            }
            Expr::Prod(factors) => {
                let mut flat = Vec::new();
                let mut konst = gauss_int(1);
                for f in factors {
                    match f.canonical() {
                        Expr::Prod(inner) => {
                            for u in inner {
                                match u {
                                    Expr::Const(c) => konst = konst * c,
                                    other => flat.push(other),
                                }
                            }
                        }
                        Expr::Const(c) => konst = konst * c,
                        other => flat.push(other),
                    }
                }
                if konst.is_zero() {
                    return Expr::int(0);
                }
                flat.sort_by(expr_cmp);
                if flat.is_empty() {
                    return Expr::Const(konst);
                }
                if !konst.is_one() {
                    flat.insert(0, Expr::Const(konst));
                }
                if flat.len() == 1 {
                    return flat.pop().unwrap();
                }
                Expr::Prod(flat)
            }
        }
    }

    /// Canonical text form; `parse_expr` of the output reproduces the
    /// canonical AST.
    pub fn render(&self) -> String {
        render_prec(&self.canonical(), Prec::Sum)
    }
}

fn const_pow(c: &GaussianRational, exp: i64) -> Option<GaussianRational> {
    if exp >= 0 {
        let mut acc = gauss_int(1);
        for _ in 0..exp {
            acc = acc * c.clone();
        }
        Some(acc)
    } else {
        if c.is_zero() {
            return None;
        }
        let inv = c.clone().inv();
        let mut acc = gauss_int(1);
        for _ in 0..(-exp) {
            acc = acc * inv.clone();
        }
        Some(acc)
    }
}

fn node_rank(e: &Expr) -> u8 {
    match e {
        Expr::Const(_) => 0,
        Expr::Sym(_) => 1,
        Expr::Func(..) => 2,
        Expr::Pow(..) => 3,
        Expr::Prod(_) => 4,
        Expr::Sum(_) => 5,
        Expr::Deriv { .. } => 6,
    }
}

/// Total order on canonical expressions.
pub fn expr_cmp(a: &Expr, b: &Expr) -> Ordering {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => cmp_gauss(x, y),
        (Expr::Sym(x), Expr::Sym(y)) => x.cmp(y),
        (Expr::Func(f, x), Expr::Func(g, y)) => f.cmp(g).then_with(|| expr_cmp(x, y)),
        (Expr::Pow(x, j), Expr::Pow(y, k)) => expr_cmp(x, y).then_with(|| j.cmp(k)),
        (Expr::Sum(xs), Expr::Sum(ys)) | (Expr::Prod(xs), Expr::Prod(ys)) => {
            for (x, y) in xs.iter().zip(ys.iter()) {
                let c = expr_cmp(x, y);
                if c != Ordering::Equal {
                    return c;
                }
            }
            xs.len().cmp(&ys.len())
        }
        (Expr::Deriv { dep: d1, coords: c1 }, Expr::Deriv { dep: d2, coords: c2 }) => {
            d1.cmp(d2).then_with(|| c1.cmp(c2))
        }
        _ => node_rank(a).cmp(&node_rank(b)),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Term,
    Factor,
}

fn render_prec(e: &Expr, prec: Prec) -> String {
    match e {
        Expr::Const(c) => {
            let s = c.render();
            let needs = match prec {
                Prec::Sum => false,
                Prec::Term => !c.atomic(),
                Prec::Factor => !c.atomic() || c.is_display_negative(),
            };
            if needs {
                format!("({s})")
            } else {
                s
            }
        }
        Expr::Sym(name) => name.clone(),
        Expr::Func(f, a) => format!("{}({})", f.name(), render_prec(a, Prec::Sum)),
        Expr::Pow(base, exp) => {
            format!("{}^{}", render_prec(base, Prec::Factor), exp)
        }
        Expr::Prod(factors) => {
            let mut negate = false;
            let mut parts = Vec::with_capacity(factors.len());
            for (k, f) in factors.iter().enumerate() {
                let p = if k == 0 {
                    match f {
                        // A leading factor of exactly -1 becomes a sign.
                        Expr::Const(c) if factors.len() > 1 && *c == gauss_int(-1) => {
                            negate = true;
                            continue;
                        }
                        // Other leading negative constants keep their sign.
                        Expr::Const(c) if c.atomic() => render_prec(f, Prec::Sum),
                        _ => render_prec(f, Prec::Factor),
                    }
                } else {
                    render_prec(f, Prec::Factor)
                };
                parts.push(p);
            }
            let mut s = parts.join("*");
            if negate {
                s.insert(0, '-');
            }
            if prec == Prec::Factor {
                format!("({s})")
            } else {
                s
            }
        }
        Expr::Sum(terms) => {
            let mut out = String::new();
            for (k, t) in terms.iter().enumerate() {
                let s = render_prec(t, Prec::Term);
                if k == 0 {
                    out.push_str(&s);
                } else if let Some(rest) = s.strip_prefix('-') {
                    out.push_str(" - ");
                    out.push_str(rest);
                } else {
                    out.push_str(" + ");
                    out.push_str(&s);
                }
            }
            if prec != Prec::Sum {
                format!("({out})")
            } else {
                out
            }
        }
        Expr::Deriv { dep, coords } => {
            let mut args = vec![dep.clone()];
            args.extend(coords.iter().cloned());
            format!("D({})", args.join(","))
        }
    }
}
