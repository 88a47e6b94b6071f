use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::HarnessError;
use crate::heuristic::Heuristic;
use crate::problem::Problem;
use crate::testbed::TestFunction;

/// One problem-dimension pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Instance {
    pub function: TestFunction,
    pub dim: usize,
}

impl Instance {
    /// Label used in file names and CSV rows, e.g. `ackley_n10`.
    pub fn label(&self) -> String {
        format!("{}_n{}", self.function.name(), self.dim)
    }

    pub fn problem(&self) -> Problem {
        self.function
            .make_problem(self.dim)
            .expect("instances are validated on construction")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub instances: Vec<Instance>,
    pub heuristics: Vec<Heuristic>,
    pub runs: usize,
    pub budget: usize,
    pub inner_samples: usize,
    pub num_initial: usize,
    pub post_samples: usize,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub workers: usize,
    /// Write per-run trace files (2D instances only).
    pub trace: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            instances: Vec::new(),
            heuristics: Vec::new(),
            runs: 50,
            budget: 10_000,
            inner_samples: 100,
            num_initial: 1,
            post_samples: 100_000,
            base_seed: 0,
            output_dir: PathBuf::from("results"),
            workers: 1,
            trace: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.instances.is_empty() {
            return err("no problems configured");
        }
        if self.heuristics.is_empty() {
            return err("no heuristics configured");
        }
        for (name, v) in [
            ("runs", self.runs),
            ("budget", self.budget),
            ("inner_samples", self.inner_samples),
            ("num_initial", self.num_initial),
            ("post_samples", self.post_samples),
            ("workers", self.workers),
        ] {
            if v == 0 {
                return Err(HarnessError::Config(format!("{name} must be positive")));
            }
        }
        for inst in &self.instances {
            let problem = inst.problem();
            for h in &self.heuristics {
                h.check_problem(&problem)
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
            }
        }
        Ok(())
    }
}

/// Raw settings as read from a config file and command-line flags, before
/// names are resolved. Later sources override earlier ones key by key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub values: BTreeMap<String, String>,
    pub heuristic_params: BTreeMap<String, BTreeMap<String, String>>,
}

const KEYS: [&str; 12] = [
    "problem",
    "dim",
    "heuristic",
    "runs",
    "budget",
    "inner_samples",
    "num_initial",
    "post_samples",
    "seed",
    "out",
    "workers",
    "trace",
];

fn canonical_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl RawConfig {
    /// Parses the flat `key = value` format with `[heuristic.<name>]`
    /// sections. `#` starts a comment; values may be double-quoted.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut raw = RawConfig::default();
        let mut section: Option<String> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| HarnessError::Config(format!("line {}: {m}", lineno + 1));
            if let Some(inner) = line.strip_prefix('[') {
                let name = inner
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("malformed section header {line:?}")))?
                    .trim();
                let h = name
                    .strip_prefix("heuristic.")
                    .ok_or_else(|| err(format!("unknown section [{name}]")))?;
                Heuristic::by_name(h).map_err(|e| err(e.to_string()))?;
                raw.heuristic_params.entry(h.to_string()).or_default();
                section = Some(h.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let key = canonical_key(key);
            let value = unquote(value.trim()).to_string();
            match &section {
                Some(h) => {
                    raw.heuristic_params.get_mut(h).unwrap().insert(key, value);
                }
                None => raw.set(&key, value).map_err(|e| err(e.to_string()))?,
            }
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), HarnessError> {
        let key = canonical_key(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(HarnessError::Config(format!("unknown key {key:?}")));
        }
        self.values.insert(key, value.into());
        Ok(())
    }

    pub fn resolve(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = ExperimentConfig::default();
        let get = |k: &str| self.values.get(k).map(String::as_str);
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, HarnessError> {
            v.trim()
                .parse()
                .map_err(|_| HarnessError::Config(format!("{key}: cannot parse {v:?}")))
        }

        let problems = list(
            get("problem").ok_or_else(|| HarnessError::Config("missing key \"problem\"".into()))?,
        );
        let functions: Vec<TestFunction> = problems
            .iter()
            .map(|p| {
                p.parse()
                    .map_err(|e: crate::problem::ProblemError| HarnessError::Config(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let dims: Option<Vec<usize>> = get("dim")
            .map(|d| list(d).iter().map(|v| num("dim", v)).collect())
            .transpose()?;
        for f in functions {
            let ds = match &dims {
                Some(ds) => ds.clone(),
                None if f == TestFunction::Poly2D => vec![2],
                None => {
                    return Err(HarnessError::Config(format!(
                        "no dim given for {}",
                        f.name()
                    )))
                }
            };
            for dim in ds {
                f.make_problem(dim)
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
                cfg.instances.push(Instance { function: f, dim });
            }
        }

        let names = list(
            get("heuristic")
                .ok_or_else(|| HarnessError::Config("missing key \"heuristic\"".into()))?,
        );
        for name in self.heuristic_params.keys() {
            if !names.contains(name) {
                return Err(HarnessError::Config(format!(
                    "parameters given for heuristic {name} which is not selected"
                )));
            }
        }
        let empty = BTreeMap::new();
        for name in &names {
            let overrides = self.heuristic_params.get(name).unwrap_or(&empty);
            cfg.heuristics.push(
                Heuristic::configure(name, overrides)
                    .map_err(|e| HarnessError::Config(e.to_string()))?,
            );
        }

        if let Some(v) = get("runs") {
            cfg.runs = num("runs", v)?;
        }
        if let Some(v) = get("budget") {
            cfg.budget = num("budget", v)?;
        }
        if let Some(v) = get("inner_samples") {
            cfg.inner_samples = num("inner_samples", v)?;
        }
        if let Some(v) = get("num_initial") {
            cfg.num_initial = num("num_initial", v)?;
        }
        if let Some(v) = get("post_samples") {
            cfg.post_samples = num("post_samples", v)?;
        }
        if let Some(v) = get("seed") {
            cfg.base_seed = num("seed", v)?;
        }
        if let Some(v) = get("workers") {
            cfg.workers = num("workers", v)?;
        }
        if let Some(v) = get("out") {
            cfg.output_dir = PathBuf::from(v);
        }
        if let Some(v) = get("trace") {
            cfg.trace = num("trace", v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(v)
}

fn list(v: &str) -> Vec<String> {
    v.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
# desk-scale poly2D comparison
problem = poly2D
heuristic = rnd, ga, pso
runs = 5
inner-samples = 50
out = "out dir"   # quoted value

[heuristic.ga]
population = 10
generations = 10
"#;

    #[test]
    fn parses_sample() {
        let cfg = RawConfig::parse(SAMPLE).unwrap().resolve().unwrap();
        assert_eq!(
            cfg.instances,
            vec![Instance {
                function: TestFunction::Poly2D,
                dim: 2
            }]
        );
        assert_eq!(cfg.heuristics.len(), 3);
        assert_eq!(cfg.runs, 5);
        assert_eq!(cfg.inner_samples, 50);
        assert_eq!(cfg.budget, 10_000);
        assert_eq!(cfg.output_dir, PathBuf::from("out dir"));
        let Heuristic::Ga(g) = &cfg.heuristics[1] else {
            panic!()
        };
        assert_eq!(g.population, 10);
    }

    #[test]
    fn cross_product_of_problems_and_dims() {
        let mut raw = RawConfig::default();
        raw.set("problem", "sphere,ackley").unwrap();
        raw.set("dim", "2, 5").unwrap();
        raw.set("heuristic", "ga").unwrap();
        let cfg = raw.resolve().unwrap();
        let labels: Vec<String> = cfg.instances.iter().map(Instance::label).collect();
        assert_eq!(labels, ["sphere_n2", "sphere_n5", "ackley_n2", "ackley_n5"]);
    }

    #[test]
    fn errors() {
        assert!(RawConfig::parse("colour = red").is_err());
        assert!(RawConfig::parse("[other]").is_err());
        assert!(RawConfig::parse("[heuristic.sa]").is_err());
        assert!(RawConfig::parse("problem").is_err());

        let mut raw = RawConfig::default();
        raw.set("problem", "sphere").unwrap();
        raw.set("dim", "3").unwrap();
        raw.set("heuristic", "vor").unwrap();
        assert!(matches!(raw.resolve(), Err(HarnessError::Config(_))));

        let mut raw = RawConfig::default();
        raw.set("problem", "poly2D").unwrap();
        raw.set("dim", "3").unwrap();
        raw.set("heuristic", "ga").unwrap();
        assert!(raw.resolve().is_err());

        let raw = RawConfig::parse("problem = sphere\ndim = 2\nheuristic = ga\nruns = 0").unwrap();
        assert!(raw.resolve().is_err());

        let raw = RawConfig::parse(
            "problem = sphere\ndim = 2\nheuristic = ga\n[heuristic.pso]\nswarm = 5",
        )
        .unwrap();
        assert!(raw.resolve().is_err());
    }
}
