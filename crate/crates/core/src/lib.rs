pub mod bandit;
pub mod bayes;
pub mod domain;
pub mod harness;
pub mod oracle;
pub mod search;
pub mod value;
