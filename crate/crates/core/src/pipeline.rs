//! End-to-end driver: problem file -> reduction -> balance -> ansatz ->
//! coefficient system -> solve -> assemble -> verify -> report.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::assembly::{
    assemble, integrate_form, realize, verify_numeric_residual, ClosedForm, VerifyConfig,
};
use crate::error::{
    AssemblyError, EvalError, ExactError, ParseError, ReductionError, SolverError,
};
use crate::expr::parse_expr;
use crate::poly::VarSet;
use crate::problem::{PipelineStep, ProblemFile};
use crate::reduction::{
    homogeneous_balance, integrate_once, reduce_order, reduce_to_ode, DerivPoly,
};
use crate::report::{
    Assignment, BranchReport, ClosedFormReport, ProblemEcho, SolutionReport, SystemEq,
    VerificationEntry,
};
use crate::scalar::Complex64;
use crate::solver::{factor_split_solve, SolutionSet, SolverConfig};
use crate::trig::{build_ansatz, extract_coefficient_system, substitute_ansatz, Ansatz, PolySystem};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("reduction failed: {0}")]
    Reduction(#[from] ReductionError),
    #[error("solver failed: {0}")]
    Solver(#[from] SolverError),
    #[error("assembly failed: {0}")]
    Assembly(#[from] AssemblyError),
    #[error("exact arithmetic failed: {0}")]
    Exact(#[from] ExactError),
}

impl PipelineError {
    /// Process exit code for each failure class: 2 bad input, 3 method
    /// inapplicable, 4 solver resource cap, 1 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Parse(_) => 2,
            PipelineError::Reduction(e) => match e {
                ReductionError::UnknownSymbol(_) | ReductionError::ForeignDerivative(_) => 2,
                _ => 3,
            },
            PipelineError::Solver(SolverError::PairCapExceeded(_)) => 4,
            _ => 1,
        }
    }
}

/// Everything run_solve produces, including typed intermediates for tests
/// and downstream tooling; `report` is the serializable artifact.
#[derive(Debug)]
pub struct PipelineOutput {
    pub report: SolutionReport,
    pub ode: DerivPoly,
    pub ansatz: Ansatz,
    pub system: PolySystem,
    pub solutions: SolutionSet,
    pub closed: Vec<(usize, ClosedForm)>,
}

pub fn run_solve(problem: &ProblemFile) -> Result<PipelineOutput, PipelineError> {
    let pde = parse_expr(&problem.pde)?;
    let params = VarSet::new(problem.parameters.iter().map(|s| s.as_str()));
    let mut ode = reduce_to_ode(&pde, &problem.frame, &problem.dependent, &params)?;
    let taken = problem.taken_names();
    let mut integrations = 0usize;
    for step in &problem.pipeline {
        match step {
            PipelineStep::IntegrateOnce => ode = integrate_once(&ode)?,
            PipelineStep::ReduceOrder => {
                ode = reduce_order(&ode, &taken)?;
                integrations += 1;
            }
        }
    }
    let balance = homogeneous_balance(&ode)?;
    let ansatz = build_ansatz(balance.n, &problem.frame.speed);
    let trig = substitute_ansatz(&ode, &ansatz)?;
    let system = extract_coefficient_system(&trig);
    let config = SolverConfig {
        max_pairs: problem.options.max_pairs,
        ..SolverConfig::default()
    };
    let solutions = factor_split_solve(&system, &config)?;

    let verify_cfg = VerifyConfig {
        seed: problem.options.seed,
        tol: problem.options.tol,
        points: problem.options.points,
    };
    let no_params: BTreeMap<String, Complex64> = BTreeMap::new();
    let mut branches = Vec::new();
    let mut closed_forms = Vec::new();
    for (i, branch) in solutions.branches.iter().enumerate() {
        let id = i + 1;
        let assignments: Vec<Assignment> = branch
            .assignments
            .iter()
            .map(|(idx, v)| Assignment {
                name: branch.vars.name(*idx).to_string(),
                value: v.render(),
            })
            .collect();
        let free: Vec<String> = branch
            .free
            .iter()
            .map(|i| branch.vars.name(*i).to_string())
            .collect();
        let mut note = None;
        let mut closed_report = None;
        let mut verification = None;
        if branch.is_resolved() {
            match realize(&ansatz, branch) {
                Ok(mut form) => {
                    form.dep = problem.dependent.clone();
                    let mut ok = true;
                    for _ in 0..integrations {
                        match integrate_form(&form) {
                            Ok(f) => form = f,
                            Err(e) => {
                                note = Some(e.to_string());
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        let cf = assemble(&form, &problem.frame)?;
                        closed_report = Some(ClosedFormReport {
                            eta: cf.eta_expr.render(),
                            wave: cf.wave_expr.render(),
                            speed: cf.speed.as_ref().map(|v| v.render()),
                        });
                        // Verify now when every remaining symbol is numeric;
                        // symbolic parameters defer to the verify command.
                        match verify_numeric_residual(
                            &pde,
                            &problem.dependent,
                            &cf,
                            &problem.frame,
                            &no_params,
                            &verify_cfg,
                        ) {
                            Ok(rep) => {
                                verification = Some(VerificationEntry {
                                    max_residual: rep.max_residual,
                                    points: rep.points,
                                    tolerance: verify_cfg.tol,
                                    pass: rep.pass,
                                });
                            }
                            Err(AssemblyError::Eval(EvalError::UnboundSymbol(_))) => {}
                            Err(e) => return Err(e.into()),
                        }
                        closed_forms.push((id, cf));
                    }
                }
                Err(e) => note = Some(e.to_string()),
            }
        }
        branches.push(BranchReport {
            id,
            assignments,
            free,
            unresolved: branch.unresolved.clone(),
            conditions: branch.conditions.clone(),
            closed_form: closed_report,
            note,
            verification,
        });
    }

    let report = SolutionReport {
        problem: ProblemEcho::from_problem(problem),
        balance: balance.n,
        ode: ode.render(),
        unknowns: (0..system.vars.arity())
            .map(|i| system.vars.name(i).to_string())
            .collect(),
        system: system
            .eqs
            .iter()
            .map(|(tag, poly)| SystemEq {
                tag: tag.render(),
                poly: poly.render(),
            })
            .collect(),
        branches,
    };
    Ok(PipelineOutput {
        report,
        ode,
        ansatz,
        system,
        solutions,
        closed: closed_forms,
    })
}

/// Re-verify every closed form in a report at numeric parameter values.
/// Returns one row per verified branch: (branch id, report, pass).
pub fn run_verify(
    report: &SolutionReport,
    params: &BTreeMap<String, Complex64>,
    cfg: &VerifyConfig,
) -> Result<Vec<(usize, VerificationEntry)>, PipelineError> {
    let problem = report
        .problem
        .to_problem()
        .map_err(|msg| ParseError {
            line: 0,
            col: 0,
            msg,
        })?;
    let pde = parse_expr(&problem.pde)?;
    let mut missing: Vec<String> = problem
        .parameters
        .iter()
        .filter(|p| !params.contains_key(*p))
        .cloned()
        .collect();
    if !missing.is_empty() {
        missing.sort();
        return Err(PipelineError::Parse(ParseError {
            line: 0,
            col: 0,
            msg: format!("unbound parameters: {}", missing.join(", ")),
        }));
    }
    let mut rows = Vec::new();
    for b in &report.branches {
        let Some(cf) = &b.closed_form else { continue };
        let blame = |e: ParseError| {
            PipelineError::Parse(ParseError {
                line: e.line,
                col: e.col,
                msg: format!("branch {}: {}", b.id, e.msg),
            })
        };
        let wave = parse_expr(&cf.wave).map_err(&blame)?;
        let eta = parse_expr(&cf.eta).map_err(&blame)?;
        let closed = ClosedForm {
            dep: problem.dependent.clone(),
            eta_expr: eta,
            wave_expr: wave,
            speed: None,
        };
        let rep = verify_numeric_residual(&pde, &problem.dependent, &closed, &problem.frame, params, cfg)?;
        rows.push((
            b.id,
            VerificationEntry {
                max_residual: rep.max_residual,
                points: rep.points,
                tolerance: cfg.tol,
                pass: rep.pass,
            },
        ));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_problem;

    #[test]
    fn inapplicable_equation_is_reported() {
        // Heat equation: balance has no valid n.
        let text = "\
[problem]
name = heat
pde = D(u,t) - D(u,x,x)
dependent = u
coordinates = x, t
parameters =

[frame]
coefficients = x:1
time = t
speed = v
";
        let problem = parse_problem(text).unwrap();
        let err = run_solve(&problem).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn bad_symbol_is_an_input_error() {
        let text = "\
[problem]
name = typo
pde = D(u,t) + q*u^3 + D(u,x,x)
dependent = u
coordinates = x, t
parameters =

[frame]
coefficients = x:1
time = t
speed = v
";
        let problem = parse_problem(text).unwrap();
        let err = run_solve(&problem).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
