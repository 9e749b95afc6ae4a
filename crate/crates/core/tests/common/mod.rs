//! Shared test support: random corpus generation, an independent tree
//! replayer, and a schema interpreter for the XML view.
#![allow(dead_code)]

pub mod gen;
pub mod replay;
pub mod xsd;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use csmcheck::formula::{parse_formula, Formula};
use csmcheck::graph::{build_rg, BuildOptions, ReachabilityGraph};
use csmcheck::model::{parse_model, Network};

pub use gen::Case;

pub const CORPUS_SEED: u64 = 0x5e_edc5_2024;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `networks` random cases with `formulas` random formulas each; the same
/// seed always yields the same corpus.
pub fn corpus(seed: u64, networks: usize, formulas: usize) -> Vec<(Case, Vec<(String, Formula)>)> {
    let mut r = rng(seed);
    (0..networks)
        .map(|_| {
            let case = gen::network(&mut r);
            let fs = (0..formulas).map(|_| gen::formula(&mut r, &case)).collect();
            (case, fs)
        })
        .collect()
}

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models")
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(models_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub struct Fixture {
    pub name: &'static str,
    pub net: Network,
    pub rg: ReachabilityGraph,
    pub formula: Formula,
}

/// The shipped model/formula pairs.
pub const FIXTURES: [(&str, &str, &str); 4] = [
    ("toy1", "toy1.csm", "toy1_g.qsctl"),
    ("handshake", "handshake.csm", "handshake.qsctl"),
    ("sig", "sig.csm", "sig.qsctl"),
    ("scale", "scale.csm", "scale.qsctl"),
];

pub fn fixture(name: &'static str) -> Fixture {
    let (_, model, formula) = FIXTURES.iter().find(|f| f.0 == name).expect("known fixture");
    let net = parse_model(&read_fixture(model)).unwrap();
    let rg = build_rg(&net, BuildOptions::default()).unwrap();
    let formula = parse_formula(&read_fixture(formula), Some(&net)).unwrap();
    Fixture { name, net, rg, formula }
}

pub fn model_from(text: &str) -> (Network, ReachabilityGraph) {
    let net = parse_model(text).unwrap();
    let rg = build_rg(&net, BuildOptions::default()).unwrap();
    (net, rg)
}

/// Directed cases, one per table row: (model fixture, formula, start state,
/// row expected at the node given). Odd rows explain a true subformula, so
/// their formulas sit under a negation to make the verdict false.
pub const ROW_CASES: [(&str, &str, u32, u32, u8); 27] = [
    ("toy1.csm", "!(!ack)", 0, 2, 1),
    ("toy1.csm", "!go", 0, 1, 2),
    ("toy1.csm", "!(go + ack)", 0, 2, 3),
    ("toy1.csm", "ack + false", 0, 1, 4),
    ("toy1.csm", "!(go * true)", 0, 2, 5),
    ("toy1.csm", "go * ack", 0, 1, 6),
    ("toy1.csm", "!(ack => go)", 0, 2, 7),
    ("toy1.csm", "go => ack", 0, 1, 8),
    ("toy1.csm", "!(go <=> true)", 0, 2, 9),
    ("toy1.csm", "go <=> ack", 0, 1, 10),
    ("toy1.csm", "!(N go)", 0, 2, 11),
    ("toy1.csm", "N !ack", 0, 1, 12),
    ("toy1.csm", "!(N[B] in B.b1)", 0, 2, 13),
    ("toy1.csm", "!(N[A] false)", 0, 2, 13),
    ("toy1.csm", "N[B] !in B.b1", 0, 1, 14),
    ("toy1.csm", "!(F ack)", 0, 2, 15),
    ("toy1.csm", "F false", 0, 1, 16),
    ("toy1.csm", "!(G true)", 0, 2, 17),
    ("toy1.csm", "G !ack", 0, 1, 18),
    ("toy1.csm", "!(go U ack)", 0, 2, 19),
    ("toy1.csm", "!ack U false", 0, 1, 20),
    ("sig.csm", "!(SocketSocket.c1 : !CGVar)", 0, 2, 21),
    ("sig.csm", "SocketSocket.c1 : CGVar", 0, 1, 22),
    ("toy1.csm", "!(A v in {A.a0}; go)", 0, 2, 23),
    ("toy1.csm", "A v in {A.a0}; ack", 0, 1, 24),
    ("toy1.csm", "!(E v in {A.a0}; ack)", 0, 2, 25),
    ("toy1.csm", "E v in {A.a1}; go", 0, 1, 26),
];
