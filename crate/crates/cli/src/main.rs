//! Command-line driver: `solve` runs the whole pipeline on a problem file,
//! `verify` re-checks a report's closed forms at numeric parameter values,
//! `plot` samples a resolved branch onto a CSV grid.
//!
//! Exit codes: 0 success; 2 parse or input error; 3 method inapplicable;
//! 4 solver pair cap exceeded; 5 verification failure; 1 anything else.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sgem_core::{
    eta_csv, eval, format_value, parse_expr, parse_problem, plane_csv, run_solve, run_verify,
    sample_coord_grid, sample_eta_grid, sample_plane_grid, ClosedForm, Complex64, EvalContext,
    SolutionReport, VerifyConfig,
};

#[derive(Parser)]
#[command(
    name = "sgem",
    version,
    about = "Exact travelling-wave soliton solver (sine-Gordon expansion method)"
)]
struct Cli {
    /// Override the verification RNG seed.
    #[arg(long, global = true, value_name = "u64")]
    seed: Option<u64>,

    /// Override the numeric residual tolerance.
    #[arg(long, global = true, value_name = "real")]
    tol: Option<f64>,

    /// Override the Groebner basis pair cap.
    #[arg(long, global = true, value_name = "n")]
    max_pairs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce, balance, solve and verify a problem file; print the report.
    Solve {
        /// Problem definition file.
        problem: PathBuf,
        /// Directory for <name>.report.json and <name>.report.txt.
        #[arg(long, value_name = "dir")]
        out: Option<PathBuf>,
    },
    /// Re-verify every closed form of a report at numeric parameters.
    Verify {
        /// Report JSON produced by `solve`.
        report: PathBuf,
        /// Bind a parameter, e.g. --param alpha=-3 (repeatable).
        #[arg(long = "param", value_name = "name=value")]
        params: Vec<String>,
    },
    /// Sample one branch's closed form on a grid and write CSV plot data.
    Plot {
        /// Report JSON produced by `solve`.
        report: PathBuf,
        /// Branch id from the report.
        #[arg(long, value_name = "id")]
        branch: usize,
        /// Grid spec: `eta=-5:5:201`, `x=-4:4:41`, or `x=-4:4:41,t=-2:2:21`.
        #[arg(long, value_name = "spec")]
        grid: String,
        /// Output CSV path.
        #[arg(long, value_name = "csv")]
        out: PathBuf,
        /// Bind a parameter or fix a coordinate, e.g. --param t=0 (repeatable).
        #[arg(long = "param", value_name = "name=value")]
        params: Vec<String>,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure {
        code,
        msg: msg.into(),
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Solve { problem, out } => cmd_solve(&cli, problem, out.as_deref()),
        Cmd::Verify { report, params } => cmd_verify(&cli, report, params),
        Cmd::Plot {
            report,
            branch,
            grid,
            out,
            params,
        } => cmd_plot(report, *branch, grid, out, params),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_solve(cli: &Cli, path: &Path, out: Option<&Path>) -> CmdResult {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))?;
    let mut problem =
        parse_problem(&text).map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
    if let Some(s) = cli.seed {
        problem.options.seed = s;
    }
    if let Some(t) = cli.tol {
        problem.options.tol = t;
    }
    if let Some(m) = cli.max_pairs {
        problem.options.max_pairs = m;
    }
    match run_solve(&problem) {
        Ok(output) => {
            let json = output.report.to_json();
            print!("{json}");
            if let Some(dir) = out {
                write_file(&dir.join(format!("{}.report.json", problem.name)), &json)?;
                write_file(
                    &dir.join(format!("{}.report.txt", problem.name)),
                    &output.report.to_text(),
                )?;
            }
            let failed: Vec<String> = output
                .report
                .branches
                .iter()
                .filter(|b| b.verification.as_ref().is_some_and(|v| !v.pass))
                .map(|b| b.id.to_string())
                .collect();
            if !failed.is_empty() {
                return Err(fail(
                    5,
                    format!("verification failed for branch(es) {}", failed.join(", ")),
                ));
            }
            Ok(())
        }
        Err(e) => {
            // Leave a marker file so a partial run is visible on disk.
            if let Some(dir) = out {
                let _ = fs::create_dir_all(dir);
                let _ = fs::write(
                    dir.join(format!("{}.error.txt", problem.name)),
                    format!("solve failed: {e}\n"),
                );
            }
            Err(fail(e.exit_code() as u8, e.to_string()))
        }
    }
}

fn cmd_verify(cli: &Cli, path: &Path, raw_params: &[String]) -> CmdResult {
    let report = load_report(path)?;
    let params = parse_params(raw_params)?;
    let cfg = VerifyConfig {
        seed: cli.seed.unwrap_or(report.problem.options.seed),
        tol: cli.tol.unwrap_or(report.problem.options.tol),
        points: report.problem.options.points,
    };
    let rows = run_verify(&report, &params, &cfg)
        .map_err(|e| fail(e.exit_code() as u8, e.to_string()))?;
    if rows.is_empty() {
        println!("no resolved branches to verify");
        return Ok(());
    }
    println!("branch  max residual            tolerance  result");
    let mut failed = Vec::new();
    for (id, v) in &rows {
        println!(
            "{id:>6}  {:<22}  {:<9}  {}",
            format_value(v.max_residual),
            format!("{:e}", v.tolerance),
            if v.pass { "pass" } else { "FAIL" }
        );
        if !v.pass {
            failed.push(id.to_string());
        }
    }
    if !failed.is_empty() {
        return Err(fail(
            5,
            format!(
                "branch(es) {} exceeded the residual tolerance",
                failed.join(", ")
            ),
        ));
    }
    Ok(())
}

fn cmd_plot(
    path: &Path,
    branch_id: usize,
    grid: &str,
    out: &Path,
    raw_params: &[String],
) -> CmdResult {
    let report = load_report(path)?;
    let branch = report
        .branch(branch_id)
        .ok_or_else(|| fail(2, format!("report has no branch {branch_id}")))?;
    if !branch.unresolved.is_empty() || branch.closed_form.is_none() {
        return Err(fail(2, format!("branch {branch_id} is not fully resolved")));
    }
    let cf = branch.closed_form.as_ref().unwrap();
    let problem = report.problem.to_problem().map_err(|m| fail(2, m))?;
    let mut params = parse_params(raw_params)?;
    let axes = parse_grid(grid)?;

    let missing: Vec<&str> = problem
        .parameters
        .iter()
        .filter(|p| !params.contains_key(*p))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() {
        return Err(fail(2, format!("unbound parameters: {}", missing.join(", "))));
    }

    let closed = ClosedForm {
        dep: problem.dependent.clone(),
        eta_expr: parse_expr(&cf.eta).map_err(|e| fail(2, format!("branch eta: {e}")))?,
        wave_expr: parse_expr(&cf.wave).map_err(|e| fail(2, format!("branch wave: {e}")))?,
        speed: None,
    };
    // Pin the wave speed numerically when the branch fixes it symbolically.
    if let Some(s) = &cf.speed {
        let e = parse_expr(s).map_err(|e| fail(2, format!("branch speed: {e}")))?;
        let mut ctx = EvalContext::new();
        for (k, v) in &params {
            ctx.bind(k.clone(), *v);
        }
        let v = eval(&e, &ctx)
            .map_err(|e| fail(2, format!("cannot evaluate branch speed: {e}")))?;
        params.entry(problem.frame.speed.clone()).or_insert(v);
    }

    let grid_err = |e: sgem_core::AssemblyError| fail(2, e.to_string());
    let csv = match axes.as_slice() {
        [a] if a.name == "eta" => {
            let rows = sample_eta_grid(&closed, &params, a.lo, a.hi, a.n).map_err(grid_err)?;
            eta_csv(&rows)
        }
        [a] => {
            check_axis_coord(&problem.coordinates, &a.name)?;
            check_pinned(&problem.coordinates, &[&a.name], &params)?;
            let phase = problem.frame.phase_expr();
            let rows = sample_coord_grid(&closed, &phase, &params, &a.name, a.lo, a.hi, a.n)
                .map_err(grid_err)?;
            eta_csv(&rows)
        }
        [a, b] => {
            check_axis_coord(&problem.coordinates, &a.name)?;
            check_axis_coord(&problem.coordinates, &b.name)?;
            if a.name == b.name {
                return Err(fail(2, format!("grid repeats axis `{}`", a.name)));
            }
            check_pinned(&problem.coordinates, &[&a.name, &b.name], &params)?;
            let rows = sample_plane_grid(
                &closed,
                &params,
                &a.name,
                (a.lo, a.hi, a.n),
                &b.name,
                (b.lo, b.hi, b.n),
            )
            .map_err(grid_err)?;
            plane_csv(&a.name, &b.name, &rows)
        }
        _ => unreachable!("parse_grid caps the axis count"),
    };
    write_file(out, &csv)?;
    println!(
        "wrote {} rows to {}",
        csv.lines().count().saturating_sub(1),
        out.display()
    );
    Ok(())
}

struct Axis {
    name: String,
    lo: f64,
    hi: f64,
    n: usize,
}

fn parse_grid(spec: &str) -> Result<Vec<Axis>, Failure> {
    let mut axes = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        let Some((name, range)) = part.split_once('=') else {
            return Err(fail(
                2,
                format!("grid axis `{part}` must look like name=lo:hi:count"),
            ));
        };
        let pieces: Vec<&str> = range.split(':').collect();
        let [lo, hi, n] = pieces.as_slice() else {
            return Err(fail(
                2,
                format!("grid axis `{part}` must look like name=lo:hi:count"),
            ));
        };
        let lo: f64 = lo
            .parse()
            .map_err(|_| fail(2, format!("bad grid bound `{lo}`")))?;
        let hi: f64 = hi
            .parse()
            .map_err(|_| fail(2, format!("bad grid bound `{hi}`")))?;
        let n: usize = n
            .parse()
            .map_err(|_| fail(2, format!("bad grid count `{n}`")))?;
        axes.push(Axis {
            name: name.trim().to_string(),
            lo,
            hi,
            n,
        });
    }
    if axes.is_empty() || axes.len() > 2 {
        return Err(fail(2, "grid must have one or two axes"));
    }
    Ok(axes)
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, Complex64>, Failure> {
    let mut map = BTreeMap::new();
    for item in raw {
        let Some((name, value)) = item.split_once('=') else {
            return Err(fail(2, format!("--param `{item}` must look like name=value")));
        };
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| fail(2, format!("--param `{item}`: `{value}` is not a number")))?;
        map.insert(name.trim().to_string(), Complex64::new(v, 0.0));
    }
    Ok(map)
}

fn check_axis_coord(coords: &[String], name: &str) -> CmdResult {
    if coords.iter().any(|c| c == name) {
        Ok(())
    } else {
        Err(fail(
            2,
            format!(
                "grid axis `{name}` is not a coordinate (have: {}, or eta)",
                coords.join(", ")
            ),
        ))
    }
}

fn check_pinned(
    coords: &[String],
    axes: &[&str],
    params: &BTreeMap<String, Complex64>,
) -> CmdResult {
    let loose: Vec<&str> = coords
        .iter()
        .filter(|c| !axes.contains(&c.as_str()) && !params.contains_key(*c))
        .map(String::as_str)
        .collect();
    if loose.is_empty() {
        Ok(())
    } else {
        Err(fail(
            2,
            format!("fix coordinate(s) with --param: {}", loose.join(", ")),
        ))
    }
}

fn load_report(path: &Path) -> Result<SolutionReport, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))?;
    SolutionReport::from_json(&text)
        .map_err(|e| fail(2, format!("{} is not a solve report: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> CmdResult {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .map_err(|e| fail(1, format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    fs::write(path, content).map_err(|e| fail(1, format!("cannot write {}: {e}", path.display())))
}
