//! Collapses stutter chains and shows what a critical sequence loses when it
//! is read over the reduced state space.

use std::collections::BTreeSet;

use csmcheck::formula::{parse_formula, Atom};
use csmcheck::graph::{build_rg, BuildOptions};
use csmcheck::model::parse_model;
use csmcheck::reduction::{project_sequence, reduce, surviving_states};
use csmcheck::tree::build_tree;
use csmcheck::views::seqdiag::render_states_listing;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = parse_model(include_str!("../models/toy1.csm"))?;
    let rg = build_rg(&net, BuildOptions::default())?;
    let atoms: BTreeSet<Atom> = [Atom::Signal("ack".into())].into();
    let red = reduce(&rg, &atoms)?;
    println!("{} states reduce to {} classes", rg.num_states(), red.num_classes());
    for c in red.quotient().states() {
        let members: Vec<String> = red.members(c).iter().map(|s| s.to_string()).collect();
        println!("  class {c}: {{{}}}, representative {}", members.join(", "), red.representative(c));
    }

    let f = parse_formula("F false", Some(&net))?;
    let tree = build_tree(&rg, &f, rg.initial())?;
    let seq = &tree.entry(f.root()).states;
    let kept = surviving_states(seq, &red);
    println!("\nsequence of {} states projects to {} classes", seq.len(), project_sequence(seq, &red).len());
    println!("original:\n{}", render_states_listing(&rg, seq));
    println!("reduced:\n{}", render_states_listing(&rg, &kept));
    Ok(())
}
