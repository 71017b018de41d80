//! Exact posteriors with hard VA results and a correction's soft evidence.
//!
//! ```bash
//! cargo run --example inference
//! ```

use jvcs::bayes::{
    hard, noisy_and_cpt, noisy_or_cpt, posterior, BayesianNetwork, Cpt, EvidenceItem, Likelihood, Node, NodeId,
    NodeKind, Outcome,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // theta_1 needs both subsystems; each subsystem has one test.
    let node = |id, name: &str, kind, cpt| Node { id: NodeId(id), name: name.into(), kind, cpt };
    let net = BayesianNetwork::new(vec![
        node(0, "theta_1", NodeKind::Parameter, noisy_and_cpt(vec![NodeId(1), NodeId(2)], 0.97, &[0.7, 0.6])?),
        node(1, "theta_2", NodeKind::Parameter, Cpt::prior(0.8)),
        node(2, "theta_3", NodeKind::Parameter, Cpt::prior(0.75)),
        node(3, "mu_1", NodeKind::Observable, noisy_or_cpt(vec![NodeId(1)], 0.1, &[0.95])?),
        node(4, "mu_2", NodeKind::Observable, noisy_or_cpt(vec![NodeId(2)], 0.15, &[0.9])?),
    ])?;
    let query = [NodeId(0), NodeId(1), NodeId(2)];
    let show = |label: &str, ev: &[EvidenceItem]| -> Result<(), Box<dyn std::error::Error>> {
        let post = posterior(&net, ev, &query)?;
        let cells: Vec<String> = query.iter().map(|q| format!("{:.4}", post[q])).collect();
        println!("{label:<32} theta_1..3 = {}", cells.join("  "));
        Ok(())
    };

    show("prior", &[])?;
    show("mu_1 fails", &[hard(NodeId(3), Outcome::Fail)])?;
    // A correction on theta_2 makes Fail five times less likely.
    let rework = EvidenceItem::Virtual { node: NodeId(1), likelihood: Likelihood::new(1.0, 0.2)? };
    show("mu_1 fails, theta_2 reworked", &[hard(NodeId(3), Outcome::Fail), rework])?;
    show("both tests pass", &[hard(NodeId(3), Outcome::Pass), hard(NodeId(4), Outcome::Pass)])?;
    Ok(())
}
