//! Problem-definition files: a plain sectioned key/value format describing
//! the PDE, the travelling-wave frame, the post-reduction pipeline, and
//! solver options. Parsing is lossless: parse -> serialize -> parse is the
//! identity.

use std::collections::BTreeSet;
use std::str::FromStr;

use crate::error::ParseError;
use crate::reduction::WaveFrame;
use crate::scalar::{render_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineStep {
    IntegrateOnce,
    ReduceOrder,
}

impl PipelineStep {
    pub fn name(self) -> &'static str {
        match self {
            PipelineStep::IntegrateOnce => "integrate_once",
            PipelineStep::ReduceOrder => "reduce_order",
        }
    }

    fn from_name(s: &str) -> Option<PipelineStep> {
        match s {
            "integrate_once" => Some(PipelineStep::IntegrateOnce),
            "reduce_order" => Some(PipelineStep::ReduceOrder),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub seed: u64,
    pub tol: f64,
    pub max_pairs: usize,
    pub points: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 42,
            tol: 1.0e-8,
            max_pairs: 10_000,
            points: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub name: String,
    pub pde: String,
    pub dependent: String,
    pub coordinates: Vec<String>,
    pub parameters: Vec<String>,
    pub frame: WaveFrame,
    pub pipeline: Vec<PipelineStep>,
    pub options: Options,
}

impl ProblemFile {
    /// Every symbol introduced by the problem; used to keep generated names
    /// (like the order-reduced dependent) from colliding.
    pub fn taken_names(&self) -> BTreeSet<String> {
        let mut s: BTreeSet<String> = self.coordinates.iter().cloned().collect();
        s.extend(self.parameters.iter().cloned());
        s.insert(self.dependent.clone());
        s.insert(self.frame.speed.clone());
        s.insert("eta".to_string());
        s
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("[problem]\n");
        out.push_str(&format!("name = {}\n", self.name));
        out.push_str(&format!("pde = {}\n", self.pde));
        out.push_str(&format!("dependent = {}\n", self.dependent));
        out.push_str(&format!("coordinates = {}\n", self.coordinates.join(", ")));
        out.push_str(&format!("parameters = {}\n", self.parameters.join(", ")));
        out.push('\n');
        out.push_str("[frame]\n");
        let coeffs: Vec<String> = self
            .frame
            .spatial
            .iter()
            .map(|(n, k)| format!("{}:{}", n, render_rational(k)))
            .collect();
        out.push_str(&format!("coefficients = {}\n", coeffs.join(", ")));
        out.push_str(&format!("time = {}\n", self.frame.time));
        out.push_str(&format!("speed = {}\n", self.frame.speed));
        out.push('\n');
        out.push_str("[pipeline]\n");
        let steps: Vec<&str> = self.pipeline.iter().map(|s| s.name()).collect();
        out.push_str(&format!("steps = {}\n", steps.join(", ")));
        out.push('\n');
        out.push_str("[options]\n");
        out.push_str(&format!("seed = {}\n", self.options.seed));
        out.push_str(&format!("tol = {:e}\n", self.options.tol));
        out.push_str(&format!("max_pairs = {}\n", self.options.max_pairs));
        out.push_str(&format!("points = {}\n", self.options.points));
        out
    }
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        col: 1,
        msg: msg.into(),
    }
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let mut section = String::new();
    let mut name = None;
    let mut pde = None;
    let mut dependent = None;
    let mut coordinates: Option<Vec<String>> = None;
    let mut parameters: Vec<String> = Vec::new();
    let mut coefficients: Option<Vec<(String, Rational)>> = None;
    let mut time = None;
    let mut speed = None;
    let mut pipeline: Vec<PipelineStep> = Vec::new();
    let mut options = Options::default();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(sec) = rest.strip_suffix(']') else {
                return Err(err(lineno, "unterminated section header"));
            };
            let sec = sec.trim();
            if !matches!(sec, "problem" | "frame" | "pipeline" | "options") {
                return Err(err(lineno, format!("unknown section `{sec}`")));
            }
            section = sec.to_string();
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(err(lineno, "expected `key = value`"));
        };
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim();
        match (section.as_str(), key) {
            ("problem", "name") => name = Some(value.to_string()),
            ("problem", "pde") => pde = Some(value.to_string()),
            ("problem", "dependent") => dependent = Some(value.to_string()),
            ("problem", "coordinates") => coordinates = Some(split_list(value)),
            ("problem", "parameters") => parameters = split_list(value),
            ("frame", "coefficients") => {
                let mut cs = Vec::new();
                for item in split_list(value) {
                    let Some(colon) = item.find(':') else {
                        return Err(err(lineno, format!("expected `name:coeff` in `{item}`")));
                    };
                    let n = item[..colon].trim().to_string();
                    let k = Rational::from_str(item[colon + 1..].trim())
                        .map_err(|e| err(lineno, format!("bad coefficient: {e}")))?;
                    cs.push((n, k));
                }
                coefficients = Some(cs);
            }
            ("frame", "time") => time = Some(value.to_string()),
            ("frame", "speed") => speed = Some(value.to_string()),
            ("pipeline", "steps") => {
                pipeline.clear();
                for item in split_list(value) {
                    let Some(step) = PipelineStep::from_name(&item) else {
                        return Err(err(lineno, format!("unknown pipeline step `{item}`")));
                    };
                    pipeline.push(step);
                }
            }
            ("options", "seed") => {
                options.seed = value
                    .parse()
                    .map_err(|e| err(lineno, format!("bad seed: {e}")))?
            }
            ("options", "tol") => {
                options.tol = value
                    .parse()
                    .map_err(|e| err(lineno, format!("bad tol: {e}")))?
            }
            ("options", "max_pairs") => {
                options.max_pairs = value
                    .parse()
                    .map_err(|e| err(lineno, format!("bad max_pairs: {e}")))?
            }
            ("options", "points") => {
                options.points = value
                    .parse()
                    .map_err(|e| err(lineno, format!("bad points: {e}")))?
            }
            ("", _) => return Err(err(lineno, "key outside of any section")),
            (sec, k) => return Err(err(lineno, format!("unknown key `{k}` in [{sec}]"))),
        }
    }

    let name = name.ok_or_else(|| err(0, "missing problem.name"))?;
    let pde = pde.ok_or_else(|| err(0, "missing problem.pde"))?;
    let dependent = dependent.ok_or_else(|| err(0, "missing problem.dependent"))?;
    let coordinates = coordinates.ok_or_else(|| err(0, "missing problem.coordinates"))?;
    let coefficients = coefficients.ok_or_else(|| err(0, "missing frame.coefficients"))?;
    let time = time.ok_or_else(|| err(0, "missing frame.time"))?;
    let speed = speed.ok_or_else(|| err(0, "missing frame.speed"))?;

    let frame = WaveFrame {
        spatial: coefficients,
        time,
        speed,
    };
    let problem = ProblemFile {
        name,
        pde,
        dependent,
        coordinates,
        parameters,
        frame,
        pipeline,
        options,
    };
    validate(&problem)?;
    Ok(problem)
}

fn validate(p: &ProblemFile) -> Result<(), ParseError> {
    let mut seen = BTreeSet::new();
    let mut names: Vec<&String> = p.coordinates.iter().collect();
    names.extend(p.parameters.iter());
    names.push(&p.dependent);
    names.push(&p.frame.speed);
    for n in names {
        if n == "eta" {
            return Err(err(0, "`eta` is reserved for the wave variable"));
        }
        if !seen.insert(n.clone()) {
            return Err(err(0, format!("name `{n}` is used more than once")));
        }
    }
    let coord_set: BTreeSet<&String> = p.coordinates.iter().collect();
    for (n, _) in &p.frame.spatial {
        if !coord_set.contains(n) {
            return Err(err(0, format!("frame coordinate `{n}` is not declared")));
        }
    }
    if !coord_set.contains(&p.frame.time) {
        return Err(err(0, "frame time coordinate is not declared"));
    }
    if p.frame.spatial.len() + 1 != p.coordinates.len() {
        return Err(err(
            0,
            "coordinates must be exactly the frame coordinates plus time",
        ));
    }
    Ok(())
}
