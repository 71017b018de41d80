//! Runs every search method over a few seeds through the experiment harness
//! and prints the summary table. Artifacts land in a temporary directory.
//!
//! ```bash
//! cargo run --release --example compare_methods
//! ```

use jvcs::harness::{generate_scenario, run_experiment, ExperimentSpec, Template};
use jvcs::search::Method;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("jvcs-compare-methods");
    std::fs::create_dir_all(&dir)?;
    let (net, scenario) = generate_scenario(Template::Small, 1)?;
    net.save(dir.join("network.json"))?;
    scenario.save(dir.join("scenario.json"))?;

    let mut spec = ExperimentSpec::new(dir.join("network.json"), dir.join("scenario.json"));
    spec.methods = vec![Method::Ucbrb1, Method::Uct, Method::SpMcts, Method::MonteCarlo];
    spec.seeds = vec![1, 2, 3];
    spec.config.budget = 2000;
    spec.jobs = 0;
    spec.out_dir = Some(dir.join("runs"));
    let report = run_experiment(&spec)?;

    println!("{:<12} {:>5} {:>12} {:>9}", "method", "seed", "best value", "runtime");
    for r in &report.runs {
        println!("{:<12} {:>5} {:>12.2} {:>8.2}s", r.method.name(), r.seed, r.best_value, r.runtime);
    }
    println!("traces and strategies written to {}", dir.join("runs").display());
    Ok(())
}
