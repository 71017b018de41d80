//! Exports a searched strategy as JSON and DOT, then re-imports the JSON and
//! checks that the expected value survives the round trip.
//!
//! ```bash
//! cargo run --release --example export_strategy > strategy.dot
//! ```

use jvcs::harness::{export_strategy, generate_problem, import_strategy, ExportFormat, Template};
use jvcs::search::{run_search, Method, SearchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = generate_problem(Template::Small, 4)?;
    let config = SearchConfig { budget: 1000, seed: 4, ..Default::default() };
    let result = run_search(Method::Ucbrb1, &problem, &config)?;

    let json = export_strategy(&problem, &result.best_tree, ExportFormat::Json)?;
    let back = import_strategy(&problem, &json)?;
    eprintln!("exported value {:.6}", result.best_tree.strategy_value(&problem)?);
    eprintln!("imported value {:.6}", back.strategy_value(&problem)?);
    eprintln!("{} bytes of JSON", json.len());
    print!("{}", export_strategy(&problem, &back, ExportFormat::Dot)?);
    Ok(())
}
