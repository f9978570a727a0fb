//! Machine-readable solution reports and plot CSV emission. The JSON form
//! is the golden artifact: field order is fixed by struct order and all
//! exact values are rendered as strings, so identical inputs produce
//! byte-identical output.

use serde::{Deserialize, Serialize};

use crate::problem::{Options, PipelineStep, ProblemFile};
use crate::reduction::WaveFrame;
use crate::scalar::{render_rational, Complex64, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameEcho {
    pub coefficients: Vec<(String, String)>,
    pub time: String,
    pub speed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionsEcho {
    pub seed: u64,
    pub tol: f64,
    pub max_pairs: usize,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemEcho {
    pub name: String,
    pub pde: String,
    pub dependent: String,
    pub coordinates: Vec<String>,
    pub parameters: Vec<String>,
    pub frame: FrameEcho,
    pub pipeline: Vec<String>,
    pub options: OptionsEcho,
}

impl ProblemEcho {
    pub fn from_problem(p: &ProblemFile) -> ProblemEcho {
        ProblemEcho {
            name: p.name.clone(),
            pde: p.pde.clone(),
            dependent: p.dependent.clone(),
            coordinates: p.coordinates.clone(),
            parameters: p.parameters.clone(),
            frame: FrameEcho {
                coefficients: p
                    .frame
                    .spatial
                    .iter()
                    .map(|(n, k)| (n.clone(), render_rational(k)))
                    .collect(),
                time: p.frame.time.clone(),
                speed: p.frame.speed.clone(),
            },
            pipeline: p.pipeline.iter().map(|s| s.name().to_string()).collect(),
            options: OptionsEcho {
                seed: p.options.seed,
                tol: p.options.tol,
                max_pairs: p.options.max_pairs,
                points: p.options.points,
            },
        }
    }

    /// Rebuild the typed problem from its echo; reports carry everything
    /// needed to re-run verification and plotting.
    pub fn to_problem(&self) -> Result<ProblemFile, String> {
        let mut spatial = Vec::new();
        for (n, k) in &self.frame.coefficients {
            let r: Rational = k.parse().map_err(|e| format!("bad coefficient: {e}"))?;
            spatial.push((n.clone(), r));
        }
        let mut pipeline = Vec::new();
        for s in &self.pipeline {
            pipeline.push(match s.as_str() {
                "integrate_once" => PipelineStep::IntegrateOnce,
                "reduce_order" => PipelineStep::ReduceOrder,
                other => return Err(format!("unknown pipeline step `{other}`")),
            });
        }
        Ok(ProblemFile {
            name: self.name.clone(),
            pde: self.pde.clone(),
            dependent: self.dependent.clone(),
            coordinates: self.coordinates.clone(),
            parameters: self.parameters.clone(),
            frame: WaveFrame {
                spatial,
                time: self.frame.time.clone(),
                speed: self.frame.speed.clone(),
            },
            pipeline,
            options: Options {
                seed: self.options.seed,
                tol: self.options.tol,
                max_pairs: self.options.max_pairs,
                points: self.options.points,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemEq {
    pub tag: String,
    pub poly: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormReport {
    /// Expression in the wave variable `eta`.
    pub eta: String,
    /// Expression in the original coordinates.
    pub wave: String,
    /// Exact wave speed when the branch pins it.
    pub speed: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationEntry {
    pub max_residual: f64,
    pub points: usize,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub id: usize,
    pub assignments: Vec<Assignment>,
    pub free: Vec<String>,
    pub unresolved: Vec<String>,
    pub conditions: Vec<String>,
    pub closed_form: Option<ClosedFormReport>,
    pub note: Option<String>,
    pub verification: Option<VerificationEntry>,
}

impl BranchReport {
    pub fn is_resolved(&self) -> bool {
        self.unresolved.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub problem: ProblemEcho,
    pub balance: u32,
    pub ode: String,
    pub unknowns: Vec<String>,
    pub system: Vec<SystemEq>,
    pub branches: Vec<BranchReport>,
}

impl SolutionReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<SolutionReport, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn branch(&self, id: usize) -> Option<&BranchReport> {
        self.branches.iter().find(|b| b.id == id)
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("problem: {}\n", self.problem.name));
        out.push_str(&format!("pde: {}\n", self.problem.pde));
        out.push_str(&format!("balance: n = {}\n", self.balance));
        out.push_str(&format!("reduced ode: {} = 0\n", self.ode));
        out.push_str(&format!(
            "unknowns: {}\n\ncoefficient system ({} equations):\n",
            self.unknowns.join(", "),
            self.system.len()
        ));
        for eq in &self.system {
            out.push_str(&format!("  [{}]  {} = 0\n", eq.tag, eq.poly));
        }
        out.push_str(&format!("\nbranches: {}\n", self.branches.len()));
        for b in &self.branches {
            out.push_str(&format!("\nbranch {}:\n", b.id));
            for a in &b.assignments {
                out.push_str(&format!("  {} = {}\n", a.name, a.value));
            }
            for f in &b.free {
                out.push_str(&format!("  {f} free\n"));
            }
            for u in &b.unresolved {
                out.push_str(&format!("  unresolved: {u} = 0\n"));
            }
            if let Some(cf) = &b.closed_form {
                out.push_str(&format!("  u(eta) = {}\n", cf.eta));
                out.push_str(&format!("  u = {}\n", cf.wave));
                if let Some(v) = &cf.speed {
                    out.push_str(&format!("  speed = {v}\n"));
                }
            }
            if let Some(n) = &b.note {
                out.push_str(&format!("  note: {n}\n"));
            }
            if let Some(v) = &b.verification {
                out.push_str(&format!(
                    "  verification: max residual {:.3e} over {} points -> {}\n",
                    v.max_residual,
                    v.points,
                    if v.pass { "pass" } else { "FAIL" }
                ));
            }
        }
        out
    }
}

/// Render one floating value with 17 significant digits, enough to round
/// trip any f64.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write plot rows for a 1-D sweep of the wave variable.
pub fn eta_csv(rows: &[(f64, Complex64)]) -> String {
    let mut out = String::from("eta,re_u,im_u\n");
    for (eta, u) in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            format_value(*eta),
            format_value(u.re),
            format_value(u.im)
        ));
    }
    out
}

/// Write plot rows for a 2-coordinate surface sweep.
pub fn plane_csv(c1: &str, c2: &str, rows: &[(f64, f64, Complex64)]) -> String {
    let mut out = format!("{c1},{c2},re_u,im_u\n");
    for (x1, x2, u) in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_value(*x1),
            format_value(*x2),
            format_value(u.re),
            format_value(u.im)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> SolutionReport {
        SolutionReport {
            problem: ProblemEcho {
                name: "demo".into(),
                pde: "D(u,t) + D(u,x)".into(),
                dependent: "u".into(),
                coordinates: vec!["x".into(), "t".into()],
                parameters: vec![],
                frame: FrameEcho {
                    coefficients: vec![("x".into(), "1".into())],
                    time: "t".into(),
                    speed: "v".into(),
                },
                pipeline: vec![],
                options: OptionsEcho {
                    seed: 42,
                    tol: 1e-8,
                    max_pairs: 10_000,
                    points: 200,
                },
            },
            balance: 1,
            ode: "u' - v*u'".into(),
            unknowns: vec!["A0".into(), "B1".into(), "A1".into(), "v".into()],
            system: vec![SystemEq {
                tag: "sin(w)^0*cos(w)^0".into(),
                poly: "A0".into(),
            }],
            branches: vec![BranchReport {
                id: 1,
                assignments: vec![Assignment {
                    name: "A0".into(),
                    value: "0".into(),
                }],
                free: vec!["v".into()],
                unresolved: vec![],
                conditions: vec!["A0 = 0".into()],
                closed_form: Some(ClosedFormReport {
                    eta: "0".into(),
                    wave: "0".into(),
                    speed: None,
                }),
                note: None,
                verification: Some(VerificationEntry {
                    max_residual: 0.0,
                    points: 200,
                    tolerance: 1e-8,
                    pass: true,
                }),
            }],
        }
    }

    #[test]
    fn json_round_trip_and_stability() {
        let r = sample_report();
        let j1 = r.to_json();
        let back = SolutionReport::from_json(&j1).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), j1);
        assert!(j1.ends_with('\n'));
        let p = back.problem.to_problem().unwrap();
        assert_eq!(p.name, "demo");
        assert_eq!(ProblemEcho::from_problem(&p), back.problem);
    }

    #[test]
    fn csv_format_is_fixed() {
        let rows = vec![
            (-1.0, Complex64::new(0.5, 0.0)),
            (0.0, Complex64::new(1.0, -0.25)),
        ];
        let csv = eta_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "eta,re_u,im_u");
        assert_eq!(
            lines[1],
            "-1.0000000000000000e0,5.0000000000000000e-1,0.0000000000000000e0"
        );
        assert!(csv.ends_with('\n'));
        let surface = plane_csv("x", "t", &[(0.0, 0.0, Complex64::new(2.0, 0.0))]);
        assert!(surface.starts_with("x,t,re_u,im_u\n"));
    }

    #[test]
    fn text_summary_mentions_branches() {
        let r = sample_report();
        let text = r.to_text();
        assert!(text.contains("balance: n = 1"));
        assert!(text.contains("branch 1:"));
        assert!(text.contains("v free"));
        assert!(text.contains("pass"));
    }
}
