//! Builds the critical tree of a false formula and prints it in each of the
//! four tree views, then in compressed form.

use csmcheck::formula::parse_formula;
use csmcheck::graph::{build_rg, BuildOptions};
use csmcheck::model::parse_model;
use csmcheck::tree::{build_tree, compress};
use csmcheck::views::{render, render_compressed, ViewKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = parse_model(include_str!("../models/toy1.csm"))?;
    let rg = build_rg(&net, BuildOptions::default())?;
    let f = parse_formula(include_str!("../models/toy1_g.qsctl"), Some(&net))?;
    let tree = build_tree(&rg, &f, rg.initial())?;

    for e in &tree.entries {
        let states: Vec<String> = e.states.iter().map(|s| s.to_string()).collect();
        println!("node {:>2}  rule {:>4}  [{}]", e.node, e.rule.map_or("-".into(), |r| r.to_string()), states.join(" "));
    }
    for kind in ViewKind::TREE_VIEWS {
        println!("\n== {kind} ==");
        print!("{}", render(kind, &tree, &rg).text);
    }
    println!("\n== compressed ==");
    print!("{}", render_compressed(&compress(&tree), &rg));
    Ok(())
}
