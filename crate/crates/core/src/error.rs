//! Error types shared across the crate.

use thiserror::Error;

/// Errors from the exact-arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("polynomials have different variable sets")]
    VariableSetMismatch,
    #[error("variable `{0}` is not present in the target variable set")]
    UnknownVariable(String),
    #[error("nested radicals are not supported")]
    NestedRadical,
}

/// Expression parsing failure with source location. Line 0 marks errors
/// with no meaningful position (e.g. a missing binding).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", self.render())]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    fn render(&self) -> String {
        if self.line == 0 {
            self.msg.clone()
        } else {
            format!("{}:{}: {}", self.line, self.col, self.msg)
        }
    }
}

/// Errors from symbolic expression operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("cannot differentiate {0}")]
    CannotDifferentiate(String),
}

/// Errors from numeric evaluation of expressions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("pole or singular value while evaluating {0}")]
    Pole(String),
    #[error("non-finite value while evaluating {0}")]
    NonFinite(String),
    #[error("unresolved derivative node {0} cannot be evaluated")]
    UnresolvedDerivative(String),
    #[error("value out of f64 range")]
    OutOfRange,
}

/// Errors from the travelling-wave reduction pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("equation is not polynomial in the dependent variable: {0}")]
    NonPolynomial(String),
    #[error("derivative of `{0}`, which is not the dependent variable")]
    ForeignDerivative(String),
    #[error("unknown symbol `{0}` in equation")]
    UnknownSymbol(String),
    #[error("term not integrable by pattern: {0}")]
    NotIntegrable(String),
    #[error("cannot reduce order: underived `{0}` present")]
    UnderivedDependent(String),
    #[error("homogeneous balance inapplicable: {0}")]
    MethodInapplicable(String),
    #[error("wave frame must have at least one nonzero spatial coefficient")]
    DegenerateFrame,
}

/// Errors from the algebraic solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("critical pair limit of {0} exceeded in Buchberger's algorithm")]
    PairCapExceeded(usize),
}

/// Errors from solution assembly and verification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssemblyError {
    #[error("free unknown `{0}` appears in the ansatz body")]
    FreeUnknown(String),
    #[error("unknown `{0}` is unresolved in this branch")]
    UnresolvedUnknown(String),
    #[error("no antiderivative table entry for {0}")]
    MissingAntiderivative(String),
    #[error("branch coefficient is not a representable radical value")]
    UnrepresentableCoefficient,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("empty or malformed grid specification: {0}")]
    BadGrid(String),
}
