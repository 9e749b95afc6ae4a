//! The nested weak-until formula over a socket stand-in: prints the parse
//! tree with node numbers, the rule used at each node, and the states view.

use csmcheck::formula::parse_formula;
use csmcheck::graph::{build_rg, BuildOptions};
use csmcheck::model::parse_model;
use csmcheck::tree::build_tree;
use csmcheck::views::render_states;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = parse_model(include_str!("../models/sig.csm"))?;
    let rg = build_rg(&net, BuildOptions::default())?;
    let f = parse_formula(include_str!("../models/sig.qsctl"), Some(&net))?;
    let tree = build_tree(&rg, &f, rg.initial())?;

    for n in f.nodes() {
        let e = tree.entry(n.id);
        let how = match (e.rule, e.skipped) {
            (_, Some(why)) => format!("not constructed ({why})"),
            (Some(r), None) => format!("rule {r}"),
            (None, None) => "atom".to_string(),
        };
        println!("{:indent$}{} {}  {how}", "", n.id, n.op.heading(), indent = 2 * n.depth);
    }
    println!();
    print!("{}", render_states(&tree));
    Ok(())
}
