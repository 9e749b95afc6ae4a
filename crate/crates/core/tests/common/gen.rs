//! Seeded random networks and formulas.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use csmcheck::formula::{parse_formula, Formula};
use csmcheck::graph::{build_rg, BuildOptions, ReachabilityGraph};
use csmcheck::model::{parse_model, Network};

pub const MAX_AUTOMATA: usize = 5;
pub const MAX_LOCALS: usize = 4;
pub const MAX_SIGNALS: usize = 3;
pub const MAX_DEPTH: usize = 4;

pub struct Case {
    pub text: String,
    pub net: Network,
    pub rg: ReachabilityGraph,
}

fn guard(rng: &mut ChaCha8Rng, signals: &[String], depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.5) {
        return match rng.gen_range(0..10) {
            0..=2 => "true".into(),
            3 => "false".into(),
            4..=6 => format!("!{}", signals.choose(rng).unwrap()),
            _ => signals.choose(rng).unwrap().clone(),
        };
    }
    match rng.gen_range(0..3) {
        0 => format!("!({})", guard(rng, signals, depth - 1)),
        1 => format!("({}) * ({})", guard(rng, signals, depth - 1), guard(rng, signals, depth - 1)),
        _ => format!("({}) + ({})", guard(rng, signals, depth - 1), guard(rng, signals, depth - 1)),
    }
}

/// Model text with up to five automata `P0..P4` of up to four local states
/// `q0..q3`, communicating over up to three signals `x0..x2`.
pub fn model_text(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(1..=MAX_AUTOMATA);
    let k = rng.gen_range(1..=MAX_SIGNALS);
    let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=MAX_LOCALS)).collect();
    // every signal gets at least one emitting local state
    let mut emits: Vec<Vec<Vec<usize>>> = sizes.iter().map(|&m| vec![Vec::new(); m]).collect();
    for x in 0..k {
        let a = rng.gen_range(0..n);
        let l = rng.gen_range(0..sizes[a]);
        emits[a][l].push(x);
    }
    for locals in emits.iter_mut() {
        for e in locals.iter_mut() {
            for x in 0..k {
                if rng.gen_bool(0.1) && !e.contains(&x) {
                    e.push(x);
                }
            }
            e.sort_unstable();
        }
    }
    let signals: Vec<String> = (0..k).map(|x| format!("x{x}")).collect();
    let mut out = String::new();
    for (a, &m) in sizes.iter().enumerate() {
        out.push_str(&format!("automaton P{a} {{\n"));
        for (l, e) in emits[a].iter().enumerate() {
            if e.is_empty() {
                out.push_str(&format!("  state q{l};\n"));
            } else {
                let names: Vec<String> = e.iter().map(|x| format!("x{x}")).collect();
                out.push_str(&format!("  state q{l} emits {};\n", names.join(", ")));
            }
        }
        out.push_str(&format!("  init q{};\n", rng.gen_range(0..m)));
        for l in 0..m {
            // a ring keeps most of the product reachable
            if m > 1 {
                let g = if rng.gen_bool(0.5) { "true".to_string() } else { guard(rng, &signals, 1) };
                out.push_str(&format!("  arc q{l} -> q{} when {g};\n", (l + 1) % m));
            }
            for _ in 0..rng.gen_range(0..=2) {
                let to = rng.gen_range(0..m);
                out.push_str(&format!("  arc q{l} -> q{to} when {};\n", guard(rng, &signals, 2)));
            }
        }
        out.push_str("}\n");
    }
    out
}

pub fn network(rng: &mut ChaCha8Rng) -> Case {
    let text = model_text(rng);
    let net = parse_model(&text).unwrap_or_else(|e| panic!("generated model does not parse: {e}\n{text}"));
    let rg = build_rg(&net, BuildOptions::default()).unwrap();
    Case { text, net, rg }
}

fn designators(net: &Network) -> Vec<String> {
    net.automata
        .iter()
        .flat_map(|a| a.local_states.iter().map(move |l| format!("{}.{l}", a.name)))
        .collect()
}

/// Designators naming exactly one reachable state (usable by `d : φ`).
fn unique_designators(case: &Case) -> Vec<String> {
    let mut out = Vec::new();
    for (i, a) in case.net.automata.iter().enumerate() {
        for (l, name) in a.local_states.iter().enumerate() {
            let hits = case.rg.states().filter(|&s| case.rg.components(s)[i] as usize == l).count();
            if hits == 1 {
                out.push(format!("{}.{name}", a.name));
            }
        }
    }
    out
}

/// Operator families the generator can emit at an inner position.
pub const OPERATORS: [&str; 13] = ["!", "*", "+", "=>", "<=>", "N", "N[]", "F", "G", "U", "@", "A", "E"];

struct FormulaGen<'a> {
    case: &'a Case,
    designators: Vec<String>,
    unique: Vec<String>,
    scope: Vec<String>,
}

impl FormulaGen<'_> {
    fn atom(&self, rng: &mut ChaCha8Rng) -> String {
        let net = &self.case.net;
        loop {
            match rng.gen_range(0..8) {
                0 => return ["true", "false"].choose(rng).unwrap().to_string(),
                1 | 2 => return format!("in {}", self.designators.choose(rng).unwrap()),
                3 if !self.scope.is_empty() => {
                    let v = self.scope.choose(rng).unwrap();
                    return if rng.gen_bool(0.5) { v.clone() } else { format!("in {v}") };
                }
                3 => continue,
                _ => return net.signals().choose(rng).unwrap().clone(),
            }
        }
    }

    fn formula(&mut self, rng: &mut ChaCha8Rng, depth: usize) -> String {
        if depth == 0 || rng.gen_bool(0.2) {
            return self.atom(rng);
        }
        let d = depth - 1;
        loop {
            let op = *OPERATORS.choose(rng).unwrap();
            return match op {
                "!" => format!("!({})", self.formula(rng, d)),
                "*" | "+" | "=>" | "<=>" | "U" => {
                    format!("({}) {op} ({})", self.formula(rng, d), self.formula(rng, d))
                }
                "N" | "F" | "G" => format!("{op} ({})", self.formula(rng, d)),
                "N[]" => {
                    let a = &self.case.net.automata.choose(rng).unwrap().name;
                    format!("N[{a}] ({})", self.formula(rng, d))
                }
                "@" => {
                    let target = if !self.scope.is_empty() && rng.gen_bool(0.6) {
                        self.scope.choose(rng).unwrap().clone()
                    } else if let Some(u) = self.unique.choose(rng) {
                        u.clone()
                    } else {
                        continue;
                    };
                    format!("({target} : {})", self.formula(rng, d))
                }
                _ => {
                    let var = format!("v{}", self.scope.len());
                    let size = rng.gen_range(1..=2);
                    let set: Vec<String> = self.designators.choose_multiple(rng, size).cloned().collect();
                    self.scope.push(var.clone());
                    let body = self.formula(rng, d);
                    self.scope.pop();
                    format!("({op} {var} in {{{}}}; {body})", set.join(", "))
                }
            };
        }
    }
}

/// A random formula over `case`'s names, of nesting depth at most
/// [`MAX_DEPTH`].
pub fn formula_text(rng: &mut ChaCha8Rng, case: &Case) -> String {
    let mut g = FormulaGen {
        case,
        designators: designators(&case.net),
        unique: unique_designators(case),
        scope: Vec::new(),
    };
    g.formula(rng, MAX_DEPTH)
}

pub fn formula(rng: &mut ChaCha8Rng, case: &Case) -> (String, Formula) {
    let text = formula_text(rng, case);
    let f = parse_formula(&text, Some(&case.net)).unwrap_or_else(|e| panic!("generated formula does not parse: {e}\n{text}"));
    (text, f)
}
