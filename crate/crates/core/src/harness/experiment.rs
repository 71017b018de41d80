//! Batch runs of (method, seed) pairs with per-run artifacts and a summary table.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{export_strategy, ExportFormat, HarnessError};
use crate::bayes::BayesianNetwork;
use crate::domain::{Money, Problem, Scenario};
use crate::search::{run_search, Method, SearchConfig};

pub const DEFAULT_D6_GRID: [f64; 6] = [0.1, 0.25, 0.5, 1.0, 1.5, 2.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Network and scenario files; relative paths resolve against the experiment file.
    pub network: PathBuf,
    pub scenario: PathBuf,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    /// Base search constants; `seed` is overridden per run.
    #[serde(default)]
    pub config: SearchConfig,
    /// Per-method replacements of `config`.
    #[serde(default)]
    pub method_configs: Vec<(Method, SearchConfig)>,
    /// When set, every UCBRB method runs once per `d6` value.
    #[serde(default)]
    pub d6_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Concurrent runs; 0 uses every core.
    #[serde(default)]
    pub jobs: usize,
    /// Write measured seconds into trace CSVs instead of zeros.
    #[serde(default)]
    pub trace_wall_time: bool,
}

impl ExperimentSpec {
    pub fn new(network: impl Into<PathBuf>, scenario: impl Into<PathBuf>) -> Self {
        ExperimentSpec {
            network: network.into(),
            scenario: scenario.into(),
            methods: vec![Method::Ucbrb1],
            seeds: vec![0],
            config: SearchConfig::default(),
            method_configs: Vec::new(),
            d6_grid: None,
            out_dir: None,
            jobs: 1,
            trace_wall_time: false,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| io_err(path, source))?;
        let mut spec: ExperimentSpec = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut spec.network, &mut spec.scenario] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.seeds.is_empty() {
            return Err(HarnessError::Invalid("experiment needs at least one seed".into()));
        }
        if self.methods.is_empty() {
            return Err(HarnessError::Invalid("experiment needs at least one method".into()));
        }
        if let Some(grid) = &self.d6_grid {
            if grid.is_empty() || grid.iter().any(|d| !(*d > 0.0)) {
                return Err(HarnessError::Invalid("d6 grid must be non-empty and positive".into()));
            }
        }
        for (_, cfg) in
            std::iter::once((Method::Ucbrb1, &self.config)).chain(self.method_configs.iter().map(|(m, c)| (*m, c)))
        {
            cfg.validate()?;
        }
        Ok(())
    }

    /// Loads and cross-validates the referenced network and scenario.
    pub fn load_problem(&self) -> Result<Problem, HarnessError> {
        let net = BayesianNetwork::load(&self.network)?;
        let scenario = Scenario::load(&self.scenario)?;
        Ok(Problem::new(net, scenario)?)
    }

    fn config_for(&self, method: Method) -> &SearchConfig {
        self.method_configs.iter().find(|(m, _)| *m == method).map(|(_, c)| c).unwrap_or(&self.config)
    }

    /// Every run in output order: methods, then grid values, then seeds.
    pub fn runs(&self) -> Vec<RunSpec> {
        let mut runs = Vec::new();
        for &method in &self.methods {
            let grid: Vec<Option<f64>> = match (&self.d6_grid, method) {
                (Some(grid), Method::Ucbrb1 | Method::Ucbrb2) => grid.iter().map(|d| Some(*d)).collect(),
                _ => vec![None],
            };
            for d6 in grid {
                for &seed in &self.seeds {
                    let mut config = self.config_for(method).clone();
                    config.seed = seed;
                    if let Some(d6) = d6 {
                        config.d6 = d6;
                    }
                    runs.push(RunSpec { method, seed, d6, config });
                }
            }
        }
        runs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub method: Method,
    pub seed: u64,
    /// Grid value when running a sweep.
    pub d6: Option<f64>,
    pub config: SearchConfig,
}

impl RunSpec {
    /// File stem for this run's artifacts.
    pub fn label(&self) -> String {
        match self.d6 {
            Some(d6) => format!("{}_d6-{d6}_seed{}", self.method, self.seed),
            None => format!("{}_seed{}", self.method, self.seed),
        }
    }
}

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub method: Method,
    pub seed: u64,
    pub d6: Option<f64>,
    /// Best backed-up sample-tree value, the last entry of the trace.
    pub best_value: Money,
    pub runtime: f64,
    pub trees: usize,
    pub nodes_expanded: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub runs: Vec<RunSummary>,
}

impl ExperimentReport {
    /// CSV with columns `method,seed,d6,best_value,runtime,trees,nodes_expanded`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), HarnessError> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.runs {
            w.serialize(r)?;
        }
        w.flush().map_err(|source| io_err(Path::new("summary.csv"), source))?;
        Ok(())
    }
}

fn io_err(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io { path: path.display().to_string(), source }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(|source| io_err(path, source))
}

/// Loads the problem named by `spec` and runs every configured pair.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    let problem = spec.load_problem()?;
    run_experiment_on(&problem, spec)
}

/// Runs every (method, seed) pair of `spec` on `problem`, up to `spec.jobs` at
/// a time. Each run writes `<label>.trace.csv`, `<label>.strategy.json` and
/// `<label>.strategy.dot` as soon as it finishes; `summary.csv` lists the
/// runs that succeeded. The first failure is returned after all runs end.
pub fn run_experiment_on(problem: &Problem, spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    let out_dir = spec.out_dir.as_deref();
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|source| io_err(dir, source))?;
    }
    let runs = spec.runs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| HarnessError::Invalid(e.to_string()))?;
    let results: Vec<Result<RunSummary, HarnessError>> =
        pool.install(|| runs.par_iter().map(|run| execute(problem, run, out_dir, spec.trace_wall_time)).collect());

    let mut report = ExperimentReport::default();
    let mut first_error = None;
    for r in results {
        match r {
            Ok(summary) => report.runs.push(summary),
            Err(e) => {
                log::error!("run failed: {e}");
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(dir) = out_dir {
        let path = dir.join("summary.csv");
        let file = fs::File::create(&path).map_err(|source| io_err(&path, source))?;
        report.write_csv(file)?;
    }
    match first_error {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

fn execute(
    problem: &Problem,
    run: &RunSpec,
    out_dir: Option<&Path>,
    wall_time: bool,
) -> Result<RunSummary, HarnessError> {
    let label = run.label();
    log::info!("starting {label}");
    let mut config = run.config.clone();
    if let (Some(dir), Some(dump)) = (out_dir, config.forest.dump_dir.as_mut()) {
        if dump.is_relative() {
            *dump = dir.join(&*dump).join(&label);
        }
    }
    let result = run_search(run.method, problem, &config)?;
    if let Some(dir) = out_dir {
        let mut trace = Vec::new();
        result.trace.write_csv(&mut trace, wall_time)?;
        write_file(&dir.join(format!("{label}.trace.csv")), &trace)?;
        let json = export_strategy(problem, &result.best_tree, ExportFormat::Json)?;
        write_file(&dir.join(format!("{label}.strategy.json")), json.as_bytes())?;
        let dot = export_strategy(problem, &result.best_tree, ExportFormat::Dot)?;
        write_file(&dir.join(format!("{label}.strategy.dot")), dot.as_bytes())?;
    }
    log::info!("finished {label}: best {:.2} in {:.1}s", result.best_value, result.elapsed);
    Ok(RunSummary {
        method: run.method,
        seed: run.seed,
        d6: run.d6,
        best_value: result.trace.final_value().expect("budget is positive"),
        runtime: result.elapsed,
        trees: config.budget,
        nodes_expanded: result.nodes_expanded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_scenario, Template};

    fn tiny_spec(dir: &Path) -> ExperimentSpec {
        let (net, sc) = generate_scenario(Template::Tiny, 0).unwrap();
        net.save(dir.join("net.json")).unwrap();
        sc.save(dir.join("scenario.json")).unwrap();
        let mut spec = ExperimentSpec::new(dir.join("net.json"), dir.join("scenario.json"));
        spec.methods = vec![Method::Ucbrb1, Method::MonteCarlo];
        spec.seeds = vec![1, 2];
        spec.config.budget = 60;
        spec.jobs = 2;
        spec.out_dir = Some(dir.join("out"));
        spec
    }

    #[test]
    fn writes_artifacts_and_summary() {
        let dir = tempfile::tempdir().unwrap();
        let spec = tiny_spec(dir.path());
        let report = run_experiment(&spec).unwrap();
        assert_eq!(report.runs.len(), 4);
        let out = dir.path().join("out");
        for stem in ["ucbrb1_seed1", "montecarlo_seed2"] {
            for ext in ["trace.csv", "strategy.json", "strategy.dot"] {
                assert!(out.join(format!("{stem}.{ext}")).exists(), "{stem}.{ext}");
            }
        }
        let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
        assert!(summary.starts_with("method,seed,d6,best_value,runtime,trees,nodes_expanded\n"));
        let best =
            |m: Method| report.runs.iter().filter(|r| r.method == m).map(|r| r.best_value).fold(f64::MIN, f64::max);
        assert!(best(Method::Ucbrb1) >= best(Method::MonteCarlo));
    }

    #[test]
    fn d6_grid_emits_one_trace_per_constant() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = tiny_spec(dir.path());
        spec.methods = vec![Method::Ucbrb1];
        spec.seeds = vec![3];
        spec.d6_grid = Some(DEFAULT_D6_GRID.to_vec());
        let report = run_experiment(&spec).unwrap();
        assert_eq!(report.runs.len(), DEFAULT_D6_GRID.len());
        let traces = fs::read_dir(dir.path().join("out"))
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".trace.csv"))
            .count();
        assert_eq!(traces, DEFAULT_D6_GRID.len());
    }

    #[test]
    fn empty_seed_list_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = tiny_spec(dir.path());
        spec.seeds.clear();
        assert!(matches!(run_experiment(&spec), Err(HarnessError::Invalid(_))));
    }

    #[test]
    fn spec_paths_resolve_against_spec_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = tiny_spec(dir.path());
        spec.network = "net.json".into();
        spec.scenario = "scenario.json".into();
        let path = dir.path().join("spec.json");
        fs::write(&path, serde_json::to_string(&spec).unwrap()).unwrap();
        let loaded = ExperimentSpec::load(&path).unwrap();
        assert_eq!(loaded.network, dir.path().join("net.json"));
        loaded.load_problem().unwrap();
    }
}
