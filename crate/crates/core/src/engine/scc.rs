//! Cycle detection inside an induced subgraph of the reachability graph.

use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::graph::{ReachabilityGraph, StateId};

/// Strongly connected components of the subgraph induced by `members` that
/// contain a cycle: more than one state, or a single state with a self-loop.
/// Each component is sorted; components are ordered by their smallest state.
pub fn cyclic_components(rg: &ReachabilityGraph, members: &[StateId]) -> Vec<Vec<StateId>> {
    let mut g: DiGraph<StateId, ()> = DiGraph::with_capacity(members.len(), members.len());
    let index: HashMap<StateId, NodeIndex> = members.iter().map(|&s| (s, g.add_node(s))).collect();
    for &s in members {
        for t in rg.successors(s) {
            if let Some(&j) = index.get(&t) {
                g.add_edge(index[&s], j, ());
            }
        }
    }
    let mut out: Vec<Vec<StateId>> = tarjan_scc(&g)
        .into_iter()
        .filter(|c| c.len() > 1 || rg.has_arc(g[c[0]], g[c[0]]))
        .map(|c| {
            let mut v: Vec<StateId> = c.into_iter().map(|n| g[n]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    out.sort_unstable_by_key(|c| c[0]);
    out
}
