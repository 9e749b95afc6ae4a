//! Simplified reduction: stutter collapse relative to a set of atoms.
//!
//! A state `u` is folded into its successor `v` when `v` is its only
//! successor, `v` differs from `u`, and both agree on every atom. Such a `u` is a
//! pure stutter step: every path through it moves on to `v` with nothing
//! observable changing. Branching states are never folded, which keeps
//! verdicts of next-free formulas over the atoms intact.

use std::collections::{BTreeSet, HashMap};

use crate::engine::EvalError;
use crate::formula::Atom;
use crate::graph::{GraphArc, MoverSet, ReachabilityGraph, StateId};
use crate::model::{LocalId, SignalId};

#[derive(Debug, Clone)]
enum Probe {
    Signal(SignalId),
    In(usize, LocalId),
}

fn probes(rg: &ReachabilityGraph, atoms: &[Atom]) -> Result<Vec<Probe>, EvalError> {
    let net = rg.network();
    atoms
        .iter()
        .map(|a| match a {
            Atom::Signal(x) => net.signal_id(x).map(Probe::Signal).ok_or_else(|| EvalError::UnknownSignal(x.clone())),
            Atom::In(d) => {
                let i = net
                    .automaton_index(&d.automaton)
                    .ok_or_else(|| EvalError::UnknownAutomaton(d.automaton.clone()))?;
                let l = net.automata[i]
                    .local_index(&d.local)
                    .ok_or_else(|| EvalError::UnknownLocalState(d.clone()))?;
                Ok(Probe::In(i, l))
            }
        })
        .collect()
}

fn valuation_of(rg: &ReachabilityGraph, probes: &[Probe], s: StateId) -> Vec<bool> {
    probes
        .iter()
        .map(|p| match *p {
            Probe::Signal(x) => rg.generates(s, x),
            Probe::In(a, l) => rg.in_local(s, a, l),
        })
        .collect()
}

/// Truth values of `atoms` at `s`, in the given order.
pub fn valuation(rg: &ReachabilityGraph, atoms: &[Atom], s: StateId) -> Result<Vec<bool>, EvalError> {
    Ok(valuation_of(rg, &probes(rg, atoms)?, s))
}

/// Number of consecutive pairs of `seq` whose valuations differ.
pub fn change_points(rg: &ReachabilityGraph, atoms: &[Atom], seq: &[StateId]) -> Result<usize, EvalError> {
    let p = probes(rg, atoms)?;
    let vals: Vec<Vec<bool>> = seq.iter().map(|&s| valuation_of(rg, &p, s)).collect();
    Ok(vals.windows(2).filter(|w| w[0] != w[1]).count())
}

#[derive(Debug, Clone)]
pub struct ReducedGraph {
    pub atoms: Vec<Atom>,
    class_of: Vec<u32>,
    classes: Vec<Vec<StateId>>,
    representatives: Vec<StateId>,
    quotient: ReachabilityGraph,
    pub diagnostics: Vec<String>,
}

fn find(parent: &mut [u32], x: u32) -> u32 {
    let mut r = x;
    while parent[r as usize] != r {
        r = parent[r as usize];
    }
    let mut x = x;
    while parent[x as usize] != r {
        let next = parent[x as usize];
        parent[x as usize] = r;
        x = next;
    }
    r
}

pub fn reduce(rg: &ReachabilityGraph, atoms: &BTreeSet<Atom>) -> Result<ReducedGraph, EvalError> {
    let atoms: Vec<Atom> = atoms.iter().cloned().collect();
    let p = probes(rg, &atoms)?;
    let n = rg.num_states();
    let vals: Vec<Vec<bool>> = rg.states().map(|s| valuation_of(rg, &p, s)).collect();

    // the unique successor a state is folded into, if any
    let link: Vec<Option<StateId>> = rg
        .states()
        .map(|u| {
            let arcs = rg.arcs_from(u);
            match arcs {
                [only] if only.dst != u && vals[u.index()] == vals[only.dst.index()] => Some(only.dst),
                _ => None,
            }
        })
        .collect();

    let mut parent: Vec<u32> = (0..n as u32).collect();
    for (u, v) in link.iter().enumerate() {
        if let Some(v) = v {
            let (a, b) = (find(&mut parent, u as u32), find(&mut parent, v.0));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }

    // classes numbered by their smallest member, so the initial state's class is 0
    let mut number: HashMap<u32, u32> = HashMap::new();
    let mut class_of = vec![0u32; n];
    let mut classes: Vec<Vec<StateId>> = Vec::new();
    for s in 0..n as u32 {
        let root = find(&mut parent, s);
        let c = *number.entry(root).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() as u32 - 1
        });
        class_of[s as usize] = c;
        classes[c as usize].push(StateId(s));
    }

    // representative: first state of the chain, i.e. a member nothing in the
    // class folds into (smallest such; smallest member for a pure cycle)
    let representatives: Vec<StateId> = classes
        .iter()
        .map(|members| {
            members
                .iter()
                .copied()
                .find(|s| {
                    !rg.predecessors(*s)
                        .iter()
                        .any(|p| class_of[p.index()] == class_of[s.index()] && link[p.index()] == Some(*s))
                })
                .unwrap_or(members[0])
        })
        .collect();

    let mut arcs: HashMap<(u32, u32), MoverSet> = HashMap::new();
    let mut internal: Vec<Option<MoverSet>> = vec![None; classes.len()];
    for arc in rg.arcs() {
        let (cu, cv) = (class_of[arc.src.index()], class_of[arc.dst.index()]);
        if cu != cv {
            arcs.entry((cu, cv)).or_default().0 |= arc.movers.0;
        } else if link[arc.src.index()] != Some(arc.dst) {
            // a non-folding arc inside a class closes a cycle
            internal[cu as usize].get_or_insert_with(MoverSet::default).0 |= arc.movers.0;
        }
    }
    for (c, members) in classes.iter().enumerate() {
        // a cycle made only of folding links has no non-folding arc
        if internal[c].is_none() && members.iter().all(|s| link[s.index()].is_some()) {
            internal[c] = Some(MoverSet::default());
        }
    }
    for (c, m) in internal.iter().enumerate() {
        if let Some(m) = m {
            arcs.entry((c as u32, c as u32)).or_default().0 |= m.0;
        }
    }
    let arcs: Vec<GraphArc> = arcs
        .into_iter()
        .map(|((a, b), movers)| GraphArc { src: StateId(a), dst: StateId(b), movers })
        .collect();
    let states: Vec<Vec<LocalId>> = representatives.iter().map(|&r| rg.components(r).to_vec()).collect();
    let aliases: Vec<Vec<LocalId>> = classes
        .iter()
        .map(|m| m.iter().flat_map(|&s| rg.components(s).iter().copied()).collect())
        .collect();
    let initial = StateId(class_of[rg.initial().index()]);
    let quotient = ReachabilityGraph::from_parts(rg.network().clone(), states, arcs, initial, Some(aliases));

    let mut diagnostics = Vec::new();
    if atoms.is_empty() {
        diagnostics.push("reduction over an empty atom set: every linear chain collapses".to_string());
    }
    Ok(ReducedGraph { atoms, class_of, classes, representatives, quotient, diagnostics })
}

impl ReducedGraph {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, s: StateId) -> StateId {
        StateId(self.class_of[s.index()])
    }

    pub fn members(&self, class: StateId) -> &[StateId] {
        &self.classes[class.index()]
    }

    pub fn representative(&self, class: StateId) -> StateId {
        self.representatives[class.index()]
    }

    /// The quotient as a graph of its own; state `c` stands for class `c`.
    pub fn quotient(&self) -> &ReachabilityGraph {
        &self.quotient
    }
}

/// Classes visited by `seq`, with consecutive repeats removed.
pub fn project_sequence(seq: &[StateId], red: &ReducedGraph) -> Vec<StateId> {
    let mut out: Vec<StateId> = Vec::new();
    for &s in seq {
        let c = red.class_of(s);
        if out.last() != Some(&c) {
            out.push(c);
        }
    }
    out
}

/// First original state of each run of `seq` inside one class: the states a
/// reduced listing still shows.
pub fn surviving_states(seq: &[StateId], red: &ReducedGraph) -> Vec<StateId> {
    let mut out: Vec<StateId> = Vec::new();
    let mut last = None;
    for &s in seq {
        let c = red.class_of(s);
        if last != Some(c) {
            out.push(s);
            last = Some(c);
        }
    }
    out
}
