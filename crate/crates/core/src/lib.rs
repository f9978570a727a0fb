//! Exact solver for travelling-wave solitons of nonlinear evolution
//! equations, built around a sech/tanh expansion ansatz.
//!
//! The pipeline: reduce a polynomial PDE to a wave-frame ODE, optionally
//! integrate and reduce order, pick the ansatz degree by homogeneous
//! balance, substitute the ansatz in a trigonometric quotient ring, extract
//! the polynomial coefficient system, solve it exactly over the parameter
//! field with radicals, and assemble verified closed-form solutions.

pub mod assembly;
pub mod error;
pub mod expr;
pub mod pipeline;
pub mod problem;
pub mod poly;
pub mod radical;
pub mod ratfunc;
pub mod reduction;
pub mod report;
pub mod scalar;
pub mod solver;
pub mod trig;

pub use assembly::{
    assemble, integrate_form, realize, residual_expr, sample_coord_grid, sample_eta_grid,
    sample_plane_grid,
    verify_numeric_residual, ClosedForm, RealizedForm, TermKind, VerifyConfig, VerifyReport,
};
pub use error::*;
pub use expr::{differentiate, eval, parse_expr, substitute, EvalContext, Expr, Func};
pub use pipeline::{run_solve, run_verify, PipelineError, PipelineOutput};
pub use problem::{parse_problem, Options, PipelineStep, ProblemFile};
pub use poly::{poly_div_exact, poly_gcd, poly_lcm, Monomial, Polynomial, VarSet};
pub use radical::{canonicalize_radical, eval_partial_radical, RadicalSum, RadicalValue, Sign};
pub use ratfunc::{poly_to_expr, rational_content, rf_to_expr, RationalFunction};
pub use reduction::{
    homogeneous_balance, integrate_once, reduce_order, reduce_to_ode, Balance, DerivPoly,
    JetMono, WaveFrame,
};
pub use report::{
    eta_csv, format_value, plane_csv, Assignment, BranchReport, ClosedFormReport, ProblemEcho,
    SolutionReport, SystemEq, VerificationEntry,
};
pub use scalar::{Complex64, GaussianRational, Rational, Scalar};
pub use solver::{
    buchberger, check_branch, factor_split_solve, normal_form, s_polynomial, SolutionBranch,
    SolutionSet, SolverConfig, TermOrder,
};
pub use trig::{
    build_ansatz, canonical_primitive, extract_coefficient_system, substitute_ansatz, Ansatz,
    PolySystem, TrigPoly, TrigTag,
};

/// Polynomial in the free parameters with Gaussian-rational coefficients.
pub type ParamPoly = Polynomial<GaussianRational>;

/// Polynomial in the ansatz unknowns with rational-function coefficients.
pub type SysPoly = Polynomial<RationalFunction>;
