use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use jvcs::bandit::{simulate_regret, ArmDistribution, D0Mode, PolicyConfig, DEFAULT_D0_FLOOR};
use jvcs::bayes::BayesianNetwork;
use jvcs::domain::{Problem, Scenario};
use jvcs::harness::{
    export_strategy, generate_scenario, import_strategy, run_experiment, ExperimentSpec, ExportFormat, Template,
    DEFAULT_D6_GRID,
};
use jvcs::oracle::{backward_induction, brute_force_enumerate, DEFAULT_STATE_CAP};
use jvcs::search::{run_search, Method, SearchConfig};

#[derive(Parser)]
#[command(name = "jvcs", version, about = "Verification-correction strategy planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a network and scenario and check that they fit together.
    Validate(ProblemArgs),
    /// Write a built-in scenario template as network and scenario files.
    Generate {
        /// tiny, small or large.
        template: Template,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "JVCS_OUT_DIR", default_value = "out")]
        out_dir: PathBuf,
    },
    /// Run one tree-search method and write its trace and best strategy.
    Plan(PlanArgs),
    /// Solve a scenario exactly by backward induction.
    Oracle {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Refuse instances with more reachable states than this.
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
        /// Also enumerate every strategy up to this depth (tiny instances only).
        #[arg(long)]
        brute_force: Option<usize>,
        #[arg(long, env = "JVCS_OUT_DIR")]
        out_dir: Option<PathBuf>,
    },
    /// Simulate cumulative regret of a bandit policy and print it as CSV.
    RegretSim(RegretArgs),
    /// Run every (method, seed) pair of an experiment spec file.
    Experiment {
        spec: PathBuf,
        /// Override the experiment file's concurrency.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, env = "JVCS_OUT_DIR")]
        out_dir: Option<PathBuf>,
        /// Sweep d6 over the default grid for UCBRB methods.
        #[arg(long)]
        d6_sweep: bool,
    },
    /// Convert a JSON strategy to DOT or canonical JSON on stdout.
    Export {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long, default_value = "dot")]
        format: ExportFormat,
    },
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    scenario: PathBuf,
}

impl ProblemArgs {
    fn load(&self) -> Result<Problem> {
        let net = BayesianNetwork::load(&self.network)?;
        let scenario = Scenario::load(&self.scenario)?;
        Ok(Problem::new(net, scenario)?)
    }
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value = "ucbrb1")]
    method: Method,
    /// JSON file with search constants; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trace_every: Option<usize>,
    #[arg(long)]
    d6: Option<f64>,
    /// Write each trained forest as JSON under the output directory.
    #[arg(long)]
    dump_models: bool,
    #[arg(long)]
    rfr_period: Option<usize>,
    #[arg(long)]
    rfr_trees: Option<usize>,
    #[arg(long)]
    rfr_percentile: Option<f64>,
    /// Record measured seconds in the trace instead of zeros.
    #[arg(long)]
    wall_time: bool,
    #[arg(long, env = "JVCS_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RegretArgs {
    /// ucbrb, uct, spmcts or marab.
    #[arg(long, default_value = "ucbrb")]
    policy: String,
    /// Fixed UCBRB constant; estimated from the plays when omitted.
    #[arg(long)]
    d0: Option<f64>,
    /// Exploration weight for uct, spmcts and marab.
    #[arg(long, default_value_t = 0.5)]
    weight: f64,
    /// JSON list of arms, e.g. `[{"uniform":{"low":0,"high":0.5}}]`.
    #[arg(long)]
    arms: String,
    #[arg(long, default_value_t = 10_000)]
    horizon: u64,
    #[arg(long, default_value_t = 50)]
    replications: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of log-spaced checkpoints.
    #[arg(long, default_value_t = 20)]
    points: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Validate(args) => validate(&args),
        Command::Generate { template, seed, out_dir } => generate(template, seed, &out_dir),
        Command::Plan(args) => plan(&args),
        Command::Oracle { problem, state_cap, brute_force, out_dir } => {
            oracle(&problem, state_cap, brute_force, out_dir.as_deref())
        }
        Command::RegretSim(args) => regret_sim(&args),
        Command::Experiment { spec, jobs, out_dir, d6_sweep } => experiment(&spec, jobs, out_dir, d6_sweep),
        Command::Export { problem, strategy, format } => {
            let problem = problem.load()?;
            let text = fs::read_to_string(&strategy).with_context(|| strategy.display().to_string())?;
            let tree = import_strategy(&problem, &text)?;
            print!("{}", export_strategy(&problem, &tree, format)?);
            Ok(())
        }
    }
}

fn validate(args: &ProblemArgs) -> Result<()> {
    let problem = args.load()?;
    let sc = problem.scenario();
    println!("scenario {}: {} nodes, {} VAs, {} CAs", sc.name, problem.network().len(), problem.n_va(), problem.n_ca());
    for t in &sc.targets {
        let p = problem.confidence(&problem.initial_state(), t.parameter)?;
        println!(
            "target {}: prior confidence {p:.4}, threshold {}",
            problem.network().node(t.parameter)?.name,
            t.threshold
        );
    }
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| path.display().to_string())
}

fn generate(template: Template, seed: u64, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).with_context(|| out_dir.display().to_string())?;
    let (net, scenario) = generate_scenario(template, seed)?;
    let (np, sp) = (out_dir.join("network.json"), out_dir.join("scenario.json"));
    net.save(&np)?;
    scenario.save(&sp)?;
    println!("{}\n{}", np.display(), sp.display());
    Ok(())
}

fn plan(args: &PlanArgs) -> Result<()> {
    let problem = args.problem.load()?;
    let mut config: SearchConfig = match &args.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path).with_context(|| path.display().to_string())?)?,
        None => SearchConfig::default(),
    };
    config.budget = args.budget.unwrap_or(config.budget);
    config.seed = args.seed.unwrap_or(config.seed);
    config.trace_every = args.trace_every.unwrap_or(config.trace_every);
    config.d6 = args.d6.unwrap_or(config.d6);
    config.forest.period = args.rfr_period.unwrap_or(config.forest.period);
    config.forest.trees = args.rfr_trees.unwrap_or(config.forest.trees);
    config.forest.percentile = args.rfr_percentile.unwrap_or(config.forest.percentile);
    if args.dump_models {
        config.forest.dump_dir = Some(args.out_dir.join("models"));
    }
    fs::create_dir_all(&args.out_dir).with_context(|| args.out_dir.display().to_string())?;
    let result = run_search(args.method, &problem, &config)?;
    let mut trace = Vec::new();
    result.trace.write_csv(&mut trace, args.wall_time)?;
    fs::write(args.out_dir.join("trace.csv"), trace)?;
    write(&args.out_dir.join("strategy.json"), &export_strategy(&problem, &result.best_tree, ExportFormat::Json)?)?;
    write(&args.out_dir.join("strategy.dot"), &export_strategy(&problem, &result.best_tree, ExportFormat::Dot)?)?;
    println!(
        "{} best value {:.4} ({} nodes) after {} trees in {:.2}s",
        result.method,
        result.best_value,
        result.best_tree.len(),
        config.budget,
        result.elapsed
    );
    Ok(())
}

fn oracle(args: &ProblemArgs, state_cap: usize, brute_force: Option<usize>, out_dir: Option<&Path>) -> Result<()> {
    let problem = args.load()?;
    let table = backward_induction(&problem, state_cap)?;
    let value = table.value(&problem.initial_state()).context("initial state missing from table")?;
    let tree = table.extract_strategy(&problem)?;
    println!("optimal value {value:.6}");
    println!("states {}", table.len());
    println!("wall time {:.3}s", table.elapsed);
    if let Some(depth) = brute_force {
        let (_, v) = brute_force_enumerate(&problem, depth)?;
        println!("brute force value {v:.6}");
    }
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
            write(&dir.join("oracle_strategy.json"), &export_strategy(&problem, &tree, ExportFormat::Json)?)?;
            write(&dir.join("oracle_strategy.dot"), &export_strategy(&problem, &tree, ExportFormat::Dot)?)?;
        }
        None => print!("{}", export_strategy(&problem, &tree, ExportFormat::Dot)?),
    }
    Ok(())
}

fn regret_sim(args: &RegretArgs) -> Result<()> {
    let arms: Vec<ArmDistribution> = serde_json::from_str(&args.arms).context("parsing --arms")?;
    let policy = match args.policy.to_ascii_lowercase().as_str() {
        "ucbrb" => {
            PolicyConfig::Ucbrb { d0: args.d0.map_or(D0Mode::Estimated { floor: DEFAULT_D0_FLOOR }, D0Mode::Fixed) }
        }
        "uct" => PolicyConfig::Uct { d1: args.weight },
        "spmcts" => PolicyConfig::SpMcts { d2: args.weight, d3: 0.01 },
        "marab" => PolicyConfig::Marab { d4: args.weight, alpha: 0.2, window: None },
        other => bail!("unknown policy `{other}`"),
    };
    let warmup = policy.initial_plays() * arms.len() as u64;
    let checkpoints = jvcs::bandit::log_checkpoints(warmup.max(1), args.horizon, args.points);
    let curve = simulate_regret(&policy, &arms, args.horizon, args.replications, args.seed, &checkpoints)?;
    match &args.out {
        Some(path) => curve.write_csv(fs::File::create(path).with_context(|| path.display().to_string())?)?,
        None => curve.write_csv(std::io::stdout().lock())?,
    }
    Ok(())
}

fn experiment(path: &Path, jobs: Option<usize>, out_dir: Option<PathBuf>, d6_sweep: bool) -> Result<()> {
    let mut spec = ExperimentSpec::load(path)?;
    if let Some(jobs) = jobs {
        spec.jobs = jobs;
    }
    if out_dir.is_some() {
        spec.out_dir = out_dir;
    }
    if spec.out_dir.is_none() {
        spec.out_dir = Some(PathBuf::from("out"));
    }
    if d6_sweep && spec.d6_grid.is_none() {
        spec.d6_grid = Some(DEFAULT_D6_GRID.to_vec());
    }
    let report = run_experiment(&spec)?;
    report.write_csv(std::io::stdout().lock())?;
    Ok(())
}
