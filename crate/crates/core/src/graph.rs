//! Global state space of a network: synchronous product of its automata.
//!
//! Step rule: every automaton moves at once. An automaton picks one of the
//! arcs whose guard holds under the signals generated in the current global
//! state; with no enabled arc it stays put. An automaton with enabled arcs
//! must take one of them.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::model::{LocalId, Network, SignalId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

pub const MAX_AUTOMATA: usize = 64;

/// Set of automaton indices (at most [`MAX_AUTOMATA`]).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct MoverSet(pub u64);

impl MoverSet {
    pub fn contains(self, automaton: usize) -> bool {
        self.0 & (1 << automaton) != 0
    }

    pub fn insert(&mut self, automaton: usize) {
        self.0 |= 1 << automaton;
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_AUTOMATA).filter(move |&i| self.contains(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphArc {
    pub src: StateId,
    pub dst: StateId,
    /// Automata that fired an enabled arc on this step, united over every
    /// firing combination that yields the same `(src, dst)` pair.
    pub movers: MoverSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub state_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { state_cap: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("state space exceeds the cap of {cap} states")]
    StateCapExceeded { cap: usize },
    #[error("network has {count} automata; at most {max} are supported")]
    TooManyAutomata { count: usize, max: usize },
}

#[derive(Debug, Clone)]
pub struct ReachabilityGraph {
    net: Network,
    width: usize,
    components: Vec<LocalId>,
    index: HashMap<Box<[LocalId]>, StateId>,
    arcs: Vec<GraphArc>,
    succ_offsets: Vec<usize>,
    pred_offsets: Vec<usize>,
    preds: Vec<StateId>,
    initial: StateId,
    /// For quotient graphs: every original component tuple folded into each
    /// state. Designator sets match a state when any of its tuples matches.
    aliases: Option<Vec<Vec<LocalId>>>,
}

/// Builds the reachability graph by breadth-first search from the product of
/// the initial local states. State ids follow discovery order.
pub fn build_rg(net: &Network, opts: BuildOptions) -> Result<ReachabilityGraph, GraphError> {
    let width = net.automata.len();
    if width > MAX_AUTOMATA {
        return Err(GraphError::TooManyAutomata { count: width, max: MAX_AUTOMATA });
    }
    let mut components: Vec<LocalId> = Vec::new();
    let mut index: HashMap<Box<[LocalId]>, StateId> = HashMap::new();
    let mut arcs: Vec<GraphArc> = Vec::new();
    let mut succ_offsets = vec![0usize];
    let mut queue = VecDeque::new();

    let init: Box<[LocalId]> = net.initial_components().into();
    components.extend_from_slice(&init);
    index.insert(init, StateId(0));
    queue.push_back(StateId(0));

    let mut choices: Vec<Vec<(LocalId, bool)>> = vec![Vec::new(); width];
    let mut odometer = vec![0usize; width];
    let mut next = vec![0 as LocalId; width];

    while let Some(s) = queue.pop_front() {
        let current: Vec<LocalId> = components[s.index() * width..(s.index() + 1) * width].to_vec();
        let generated = net.generated_signals(&current);
        for (i, aut) in net.automata.iter().enumerate() {
            let set = &mut choices[i];
            set.clear();
            for arc in aut.arcs_from(current[i]) {
                if arc.guard.holds(&generated) && !set.iter().any(|&(t, _)| t == arc.to) {
                    set.push((arc.to, true));
                }
            }
            if set.is_empty() {
                set.push((current[i], false));
            }
        }

        let mut succs: BTreeMap<StateId, MoverSet> = BTreeMap::new();
        odometer.iter_mut().for_each(|d| *d = 0);
        'product: loop {
            let mut movers = MoverSet::default();
            for i in 0..width {
                let (target, fired) = choices[i][odometer[i]];
                next[i] = target;
                if fired {
                    movers.insert(i);
                }
            }
            let id = match index.get(next.as_slice()) {
                Some(&id) => id,
                None => {
                    let count = index.len();
                    if count >= opts.state_cap {
                        return Err(GraphError::StateCapExceeded { cap: opts.state_cap });
                    }
                    let id = StateId(count as u32);
                    components.extend_from_slice(&next);
                    index.insert(next.clone().into(), id);
                    queue.push_back(id);
                    id
                }
            };
            succs.entry(id).or_default().0 |= movers.0;

            // last automaton varies fastest
            let mut k = width;
            loop {
                if k == 0 {
                    break 'product;
                }
                k -= 1;
                odometer[k] += 1;
                if odometer[k] < choices[k].len() {
                    break;
                }
                odometer[k] = 0;
            }
        }

        arcs.extend(succs.into_iter().map(|(dst, movers)| GraphArc { src: s, dst, movers }));
        succ_offsets.push(arcs.len());
    }

    Ok(ReachabilityGraph::assemble(net.clone(), width, components, index, arcs, succ_offsets, None))
}

impl ReachabilityGraph {
    fn assemble(
        net: Network,
        width: usize,
        components: Vec<LocalId>,
        index: HashMap<Box<[LocalId]>, StateId>,
        arcs: Vec<GraphArc>,
        succ_offsets: Vec<usize>,
        aliases: Option<Vec<Vec<LocalId>>>,
    ) -> Self {
        let n = succ_offsets.len() - 1;
        let mut pred_lists: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for arc in &arcs {
            pred_lists[arc.dst.index()].push(arc.src);
        }
        let mut pred_offsets = Vec::with_capacity(n + 1);
        let mut preds = Vec::with_capacity(arcs.len());
        pred_offsets.push(0);
        for mut list in pred_lists {
            list.sort_unstable();
            preds.extend(list);
            pred_offsets.push(preds.len());
        }
        ReachabilityGraph {
            net,
            width,
            components,
            index,
            arcs,
            succ_offsets,
            pred_offsets,
            preds,
            initial: StateId(0),
            aliases,
        }
    }

    /// Assembles a graph from explicit parts; arcs must be sorted by
    /// `(src, dst)` and every state needs at least one outgoing arc.
    pub(crate) fn from_parts(
        net: Network,
        states: Vec<Vec<LocalId>>,
        mut arcs: Vec<GraphArc>,
        initial: StateId,
        aliases: Option<Vec<Vec<LocalId>>>,
    ) -> Self {
        let width = net.automata.len();
        arcs.sort_by_key(|a| (a.src, a.dst));
        let mut components = Vec::with_capacity(states.len() * width);
        let mut index = HashMap::new();
        for (i, st) in states.iter().enumerate() {
            components.extend_from_slice(st);
            index.insert(st.clone().into_boxed_slice(), StateId(i as u32));
        }
        let mut succ_offsets = vec![0usize; states.len() + 1];
        for arc in &arcs {
            succ_offsets[arc.src.index() + 1] += 1;
        }
        for i in 0..states.len() {
            succ_offsets[i + 1] += succ_offsets[i];
        }
        let mut rg = Self::assemble(net, width, components, index, arcs, succ_offsets, aliases);
        rg.initial = initial;
        rg
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.succ_offsets.len() - 1
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.num_states() as u32).map(StateId)
    }

    pub fn components(&self, s: StateId) -> &[LocalId] {
        &self.components[s.index() * self.width..(s.index() + 1) * self.width]
    }

    pub fn state_of(&self, components: &[LocalId]) -> Option<StateId> {
        self.index.get(components).copied()
    }

    pub fn arcs(&self) -> &[GraphArc] {
        &self.arcs
    }

    /// Outgoing arcs of `s`, ascending by destination id.
    pub fn arcs_from(&self, s: StateId) -> &[GraphArc] {
        &self.arcs[self.succ_offsets[s.index()]..self.succ_offsets[s.index() + 1]]
    }

    pub fn successors(&self, s: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.arcs_from(s).iter().map(|a| a.dst)
    }

    /// Predecessors of `s`, ascending by id.
    pub fn predecessors(&self, s: StateId) -> &[StateId] {
        &self.preds[self.pred_offsets[s.index()]..self.pred_offsets[s.index() + 1]]
    }

    pub fn has_arc(&self, src: StateId, dst: StateId) -> bool {
        self.arcs_from(src).binary_search_by_key(&dst, |a| a.dst).is_ok()
    }

    pub fn arc(&self, src: StateId, dst: StateId) -> Option<&GraphArc> {
        let arcs = self.arcs_from(src);
        arcs.binary_search_by_key(&dst, |a| a.dst).ok().map(|i| &arcs[i])
    }

    pub fn generates(&self, s: StateId, signal: SignalId) -> bool {
        self.net
            .automata
            .iter()
            .zip(self.components(s))
            .any(|(a, &l)| a.emits[l as usize].contains(&signal))
    }

    pub fn in_local(&self, s: StateId, automaton: usize, local: LocalId) -> bool {
        self.components(s)[automaton] == local
    }

    /// Whether `s` belongs to the designator set `automaton.local`.
    pub fn matches_designator(&self, s: StateId, automaton: usize, local: LocalId) -> bool {
        match &self.aliases {
            None => self.in_local(s, automaton, local),
            Some(aliases) => aliases[s.index()]
                .chunks(self.width)
                .any(|tuple| tuple[automaton] == local),
        }
    }

    pub fn is_quotient(&self) -> bool {
        self.aliases.is_some()
    }

    pub fn describe(&self, s: StateId) -> String {
        format!("{s}{}", self.net.format_components(self.components(s)))
    }
}
