//! Prints the sequence-diagram listing of a connect handshake, then reads
//! the same listing back out of the XML view.

use csmcheck::formula::parse_formula;
use csmcheck::graph::{build_rg, BuildOptions};
use csmcheck::model::parse_model;
use csmcheck::tree::build_tree;
use csmcheck::views::{render_seqdiagram, render_xml, seqdiag, xml};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = parse_model(include_str!("../models/handshake.csm"))?;
    let rg = build_rg(&net, BuildOptions::default())?;
    let f = parse_formula(include_str!("../models/handshake.qsctl"), Some(&net))?;
    let tree = build_tree(&rg, &f, rg.initial())?;

    let listing = render_seqdiagram(&tree, &rg, 1)?;
    print!("{listing}");

    let doc = xml::parse(&render_xml(&tree, &rg))?;
    assert_eq!(seqdiag::render_from_document(&doc, 1)?, listing);
    assert!(seqdiag::conforms(&listing));
    Ok(())
}
