//! Exact solution of the one-test instance by backward induction and by
//! exhaustive strategy enumeration, printed as a DOT graph.
//!
//! ```bash
//! cargo run --example tiny_oracle | dot -Tsvg > tiny.svg
//! ```

use jvcs::harness::{export_strategy, generate_problem, ExportFormat, Template};
use jvcs::oracle::{backward_induction, brute_force_enumerate, count_strategies, DEFAULT_STATE_CAP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = generate_problem(Template::Tiny, 0)?;
    let table = backward_induction(&problem, DEFAULT_STATE_CAP)?;
    let root = problem.initial_state();
    eprintln!("backward induction: {} over {} states", table.value(&root).unwrap_or_default(), table.len());
    eprintln!("first action: {}", table.action(&root).map(|a| problem.action_label(a)).unwrap_or_default());

    let depth = 6;
    let (_, best) = brute_force_enumerate(&problem, depth)?;
    eprintln!("enumeration: {best} over {} strategies up to depth {depth}", count_strategies(&problem, depth)?);

    let tree = table.extract_strategy(&problem)?;
    print!("{}", export_strategy(&problem, &tree, ExportFormat::Dot)?);
    Ok(())
}
