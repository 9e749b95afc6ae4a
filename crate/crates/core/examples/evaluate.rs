//! Evaluates formulas at every state with the sphere engine and cross-checks
//! each verdict against the fixed-point evaluator.

use csmcheck::engine::{eval_oracle, EvalContext, Optimizations};
use csmcheck::formula::parse_formula;
use csmcheck::graph::{build_rg, BuildOptions};
use csmcheck::model::parse_model;

const MODEL: &str = include_str!("../models/toy1.csm");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = parse_model(MODEL)?;
    let rg = build_rg(&net, BuildOptions::default())?;
    let formulas = ["G !ack", "F ack", "go U ack", "N[A] in A.a1", "A s in {A.a0}; F ack", "F false"];

    for text in formulas {
        let f = parse_formula(text, Some(&net))?;
        let mut cx = EvalContext::new(&rg, &f, Optimizations::ALL)?;
        let mut row = Vec::new();
        for s in rg.states() {
            let v = cx.eval(s)?;
            assert_eq!(v, eval_oracle(&rg, &f, s)?);
            row.push(if v { "T" } else { "F" });
        }
        let stats = cx.stats();
        println!("{text:<24} {}   ({} computed, {} cache hits)", row.join(" "), stats.computed, stats.cache_hits);
    }
    Ok(())
}
