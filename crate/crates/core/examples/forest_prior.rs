//! UCBRB2: UCBRB1 with a periodically retrained random-forest value prior.
//! Prints each training period and compares against plain UCBRB1.
//!
//! ```bash
//! cargo run --release --example forest_prior
//! ```

use jvcs::harness::{generate_problem, Template};
use jvcs::search::{run_search, run_with_prior, Method, SearchConfig};
use jvcs::value::ForestPrior;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = generate_problem(Template::Small, 2)?;
    let mut config = SearchConfig { budget: 3000, seed: 2, ..Default::default() };
    config.forest.period = 1000;
    config.forest.check_interpolation = true;

    let mut prior = ForestPrior::new(config.forest.clone(), config.seed);
    let with_prior = run_with_prior(Method::Ucbrb2, &problem, &config, &mut prior)?;
    for p in prior.periods() {
        println!(
            "period {} after tree {}: {} tree nodes + {} table draws -> {} unique rows, max fit error {:?}",
            p.generation, p.after_tree, p.buffered, p.resampled, p.training_rows, p.max_training_error
        );
    }
    let plain = run_search(Method::Ucbrb1, &problem, &config)?;
    println!("UCBRB2 {:.2} in {:.1}s", with_prior.best_value, with_prior.elapsed);
    println!("UCBRB1 {:.2} in {:.1}s", plain.best_value, plain.elapsed);
    Ok(())
}
