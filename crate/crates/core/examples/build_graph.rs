//! Builds the reachability graph of a small network and lists its states.
//!
//! cargo run --example build_graph [model.csm]

use csmcheck::graph::{build_rg, BuildOptions};
use csmcheck::model::parse_model;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/models/toy1.csm").to_string());
    let net = parse_model(&std::fs::read_to_string(&path)?)?;
    let rg = build_rg(&net, BuildOptions::default())?;

    println!("{} automata, {} signals", net.automata.len(), net.signals().len());
    println!("{} states, {} arcs", rg.num_states(), rg.num_arcs());
    for s in rg.states() {
        let succ: Vec<String> = rg.successors(s).map(|t| t.to_string()).collect();
        println!("{:>4}  {:<30} -> {}", s.to_string(), rg.describe(s), succ.join(" "));
    }
    Ok(())
}
