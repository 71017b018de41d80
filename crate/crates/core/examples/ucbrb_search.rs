//! UCBRB1 tree search on a generated five-parameter scenario, with the
//! convergence trace and the random baseline for comparison.
//!
//! ```bash
//! cargo run --release --example ucbrb_search -- 3
//! ```

use jvcs::harness::{generate_problem, Template};
use jvcs::search::{run_search, Method, SearchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let problem = generate_problem(Template::Small, seed)?;
    let config = SearchConfig { budget: 5000, trace_every: 500, seed, ..Default::default() };

    let result = run_search(Method::Ucbrb1, &problem, &config)?;
    println!("trees  best value");
    for p in &result.trace.points {
        println!("{:>5}  {:.2}", p.tree_index, p.best_value);
    }
    let root = result.best_tree.root_action().map(|a| problem.action_label(a)).unwrap_or_default();
    println!(
        "UCBRB1: {:.2} with {} nodes, first activity {root}, {} states in the lookup table, {:.2}s",
        result.best_value,
        result.best_tree.len(),
        result.table.len(),
        result.elapsed
    );

    let baseline = run_search(Method::MonteCarlo, &problem, &config)?;
    println!("Monte Carlo: {:.2} with {} nodes", baseline.best_value, baseline.best_tree.len());
    Ok(())
}
