//! Times graph construction, evaluation and tree construction on the
//! synthetic scale fixture (15 360 states, 46 080 arcs).

use std::time::Instant;

use csmcheck::engine::{EvalContext, Optimizations};
use csmcheck::formula::parse_formula;
use csmcheck::graph::{build_rg, BuildOptions};
use csmcheck::model::parse_model;
use csmcheck::tree::build_tree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t0 = Instant::now();
    let net = parse_model(include_str!("../models/scale.csm"))?;
    let rg = build_rg(&net, BuildOptions::default())?;
    println!("graph: {} states, {} arcs in {:?}", rg.num_states(), rg.num_arcs(), t0.elapsed());

    let f = parse_formula(include_str!("../models/scale.qsctl"), Some(&net))?;
    let t1 = Instant::now();
    let mut cx = EvalContext::new(&rg, &f, Optimizations::ALL)?;
    let verdict = cx.eval(rg.initial())?;
    println!("verdict {verdict} in {:?} ({} node/state results computed)", t1.elapsed(), cx.stats().computed);

    if !verdict {
        let t2 = Instant::now();
        let tree = build_tree(&rg, &f, rg.initial())?;
        let longest = tree.constructed().map(|e| e.states.len()).max().unwrap_or(0);
        println!("critical tree in {:?}, longest sequence {longest} states", t2.elapsed());
    }
    Ok(())
}
