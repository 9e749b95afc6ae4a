//! Formula evaluation over a reachability graph by sphere-based search.
//!
//! Temporal operators are decided by looking for a counterexample in the
//! spheres around the state of interest, so verdicts are computed on demand
//! rather than as global label sets.

mod oracle;
mod scc;
mod sphere;

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{Designator, Formula, NodeId, Op, StateRef};
use crate::graph::{ReachabilityGraph, StateId};
use crate::model::{LocalId, SignalId};

pub use oracle::{eval_oracle, oracle_labels};
pub use scc::cyclic_components;
pub use sphere::{
    find_sequence, layered_search, spheres, Always, Class, LayeredSearch, SearchError, SequenceQuery, Sphere,
    Spheres,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown automaton `{0}`")]
    UnknownAutomaton(String),
    #[error("unknown local state `{0}`")]
    UnknownLocalState(Designator),
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("designator `{0}` matches no reachable state")]
    NoMatchingState(Designator),
    #[error("designator `{designator}` matches {count} reachable states; bind it with a quantifier")]
    AmbiguousState { designator: Designator, count: usize },
    #[error("state variable `{0}` is used outside its quantifier")]
    Unbound(String),
    #[error("state {0} is not in the graph")]
    NoSuchState(StateId),
}

/// Switches for the two evaluation speed-ups. Verdicts never depend on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Optimizations {
    /// After a temporal search succeeds, record the verdict for every state of
    /// the explored region, not only for the state asked about.
    pub memoization: bool,
    /// Skip the second operand of `*`, `+`, `=>` (and later successors or
    /// quantifier members) once the result is fixed.
    pub short_circuit: bool,
}

impl Optimizations {
    pub const ALL: Optimizations = Optimizations { memoization: true, short_circuit: true };
    pub const NONE: Optimizations = Optimizations { memoization: false, short_circuit: false };
}

impl Default for Optimizations {
    fn default() -> Self {
        Optimizations::ALL
    }
}

#[derive(Debug, Clone)]
enum Resolved {
    None,
    Signal(SignalId),
    In(usize, LocalId),
    Mover(usize),
    Members(Vec<StateId>),
    At(Result<StateId, EvalError>),
}

/// Counters exposed for diagnostics and tests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalStats {
    pub computed: u64,
    pub cache_hits: u64,
    pub searches: u64,
}

/// Evaluation state for one formula over one graph.
///
/// Every verdict is cached per (node, state, binding of the node's free state
/// variables), so repeated queries from the critical-tree builder are cheap.
pub struct EvalContext<'a> {
    rg: &'a ReachabilityGraph,
    f: &'a Formula,
    opts: Optimizations,
    resolved: Vec<Resolved>,
    free: Vec<Vec<NodeId>>,
    bindings: Vec<Option<StateId>>,
    envs: HashMap<Vec<StateId>, u32>,
    cache: HashMap<(u32, u32, u32), bool>,
    diagnostics: Vec<String>,
    stats: EvalStats,
}

fn resolve_designator(rg: &ReachabilityGraph, d: &Designator) -> Result<(usize, LocalId), EvalError> {
    let net = rg.network();
    let a = net
        .automaton_index(&d.automaton)
        .ok_or_else(|| EvalError::UnknownAutomaton(d.automaton.clone()))?;
    let l = net.automata[a]
        .local_index(&d.local)
        .ok_or_else(|| EvalError::UnknownLocalState(d.clone()))?;
    Ok((a, l))
}

/// Reachable states belonging to `automaton.local`, ascending.
pub fn designator_states(rg: &ReachabilityGraph, d: &Designator) -> Result<Vec<StateId>, EvalError> {
    let (a, l) = resolve_designator(rg, d)?;
    Ok(rg.states().filter(|&s| rg.matches_designator(s, a, l)).collect())
}

/// Members of a quantifier set: the union of the designated states, ascending.
pub fn quantifier_members(rg: &ReachabilityGraph, set: &[Designator]) -> Result<Vec<StateId>, EvalError> {
    let resolved = set.iter().map(|d| resolve_designator(rg, d)).collect::<Result<Vec<_>, _>>()?;
    Ok(rg
        .states()
        .filter(|&s| resolved.iter().any(|&(a, l)| rg.matches_designator(s, a, l)))
        .collect())
}

impl<'a> EvalContext<'a> {
    pub fn new(rg: &'a ReachabilityGraph, f: &'a Formula, opts: Optimizations) -> Result<Self, EvalError> {
        let net = rg.network();
        let mut resolved = Vec::with_capacity(f.len());
        for node in f.nodes() {
            resolved.push(match &node.op {
                Op::AtomSignal(x) => {
                    Resolved::Signal(net.signal_id(x).ok_or_else(|| EvalError::UnknownSignal(x.clone()))?)
                }
                Op::AtomIn(d) => {
                    let (a, l) = resolve_designator(rg, d)?;
                    Resolved::In(a, l)
                }
                Op::NextIn(a) => Resolved::Mover(
                    net.automaton_index(a)
                        .ok_or_else(|| EvalError::UnknownAutomaton(a.clone()))?,
                ),
                Op::ForAll { set, .. } | Op::Exists { set, .. } => Resolved::Members(quantifier_members(rg, set)?),
                Op::AtState(StateRef::Designator(d)) => {
                    let states = designator_states(rg, d)?;
                    Resolved::At(match states.len() {
                        1 => Ok(states[0]),
                        0 => Err(EvalError::NoMatchingState(d.clone())),
                        count => Err(EvalError::AmbiguousState { designator: d.clone(), count }),
                    })
                }
                _ => Resolved::None,
            });
        }
        let free = f.nodes().iter().map(|n| f.free_binders(n.id)).collect();
        let mut envs = HashMap::new();
        envs.insert(Vec::new(), 0);
        Ok(EvalContext {
            rg,
            f,
            opts,
            resolved,
            free,
            bindings: vec![None; f.len()],
            envs,
            cache: HashMap::new(),
            diagnostics: Vec::new(),
            stats: EvalStats::default(),
        })
    }

    pub fn graph(&self) -> &'a ReachabilityGraph {
        self.rg
    }

    pub fn formula(&self) -> &'a Formula {
        self.f
    }

    pub fn optimizations(&self) -> Optimizations {
        self.opts
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    pub fn stats(&self) -> EvalStats {
        self.stats
    }

    /// Verdict of the whole formula at `s`.
    pub fn eval(&mut self, s: StateId) -> Result<bool, EvalError> {
        self.holds(self.f.root(), s)
    }

    /// Members of the quantifier at `node`.
    pub fn members(&self, node: NodeId) -> &[StateId] {
        match &self.resolved[node.0 as usize - 1] {
            Resolved::Members(m) => m,
            _ => &[],
        }
    }

    /// Automaton index of the `N[a]` operator at `node`.
    pub fn mover(&self, node: NodeId) -> Option<usize> {
        match self.resolved[node.0 as usize - 1] {
            Resolved::Mover(a) => Some(a),
            _ => None,
        }
    }

    /// State an at-state operator jumps to under the current bindings.
    pub fn at_target(&self, node: NodeId) -> Result<StateId, EvalError> {
        match (&self.resolved[node.0 as usize - 1], self.f.op(node)) {
            (Resolved::At(r), _) => r.clone(),
            (_, Op::AtState(StateRef::Var { name, binder })) => {
                self.bindings[binder.0 as usize - 1].ok_or_else(|| EvalError::Unbound(name.clone()))
            }
            _ => unreachable!("at_target called on a non at-state node"),
        }
    }

    /// Binds the variable of quantifier `binder`; returns the previous value.
    pub fn bind(&mut self, binder: NodeId, s: Option<StateId>) -> Option<StateId> {
        std::mem::replace(&mut self.bindings[binder.0 as usize - 1], s)
    }

    pub fn binding(&self, binder: NodeId) -> Option<StateId> {
        self.bindings[binder.0 as usize - 1]
    }

    fn env(&mut self, node: NodeId) -> Result<u32, EvalError> {
        let free = &self.free[node.0 as usize - 1];
        if free.is_empty() {
            return Ok(0);
        }
        let mut key = Vec::with_capacity(free.len());
        for b in free {
            match self.bindings[b.0 as usize - 1] {
                Some(s) => key.push(s),
                None => {
                    let name = match self.f.op(*b) {
                        Op::ForAll { var, .. } | Op::Exists { var, .. } => var.clone(),
                        _ => b.to_string(),
                    };
                    return Err(EvalError::Unbound(name));
                }
            }
        }
        let next = self.envs.len() as u32;
        Ok(*self.envs.entry(key).or_insert(next))
    }

    /// Verdict of the subformula at `node` in state `s` under the current
    /// variable bindings.
    pub fn holds(&mut self, node: NodeId, s: StateId) -> Result<bool, EvalError> {
        if s.index() >= self.rg.num_states() {
            return Err(EvalError::NoSuchState(s));
        }
        let env = self.env(node)?;
        if let Some(&v) = self.cache.get(&(node.0, s.0, env)) {
            self.stats.cache_hits += 1;
            return Ok(v);
        }
        self.stats.computed += 1;
        let v = self.compute(node, s, env)?;
        self.cache.insert((node.0, s.0, env), v);
        Ok(v)
    }

    fn record(&mut self, node: NodeId, env: u32, states: impl IntoIterator<Item = StateId>, v: bool) {
        for t in states {
            self.cache.insert((node.0, t.0, env), v);
        }
    }

    fn compute(&mut self, node: NodeId, s: StateId, env: u32) -> Result<bool, EvalError> {
        let rg = self.rg;
        let kids = self.f.children(node);
        let short = self.opts.short_circuit;
        match self.f.op(node) {
            Op::Const(b) => Ok(*b),
            Op::AtomSignal(_) => match self.resolved[node.0 as usize - 1] {
                Resolved::Signal(x) => Ok(rg.generates(s, x)),
                _ => unreachable!(),
            },
            Op::AtomIn(_) => match self.resolved[node.0 as usize - 1] {
                Resolved::In(a, l) => Ok(rg.matches_designator(s, a, l)),
                _ => unreachable!(),
            },
            Op::AtomStateVar { name, binder } => match self.bindings[binder.0 as usize - 1] {
                Some(b) => Ok(b == s),
                None => Err(EvalError::Unbound(name.clone())),
            },
            Op::Not => Ok(!self.holds(kids[0], s)?),
            Op::And => {
                let a = self.holds(kids[0], s)?;
                if short && !a {
                    return Ok(false);
                }
                let b = self.holds(kids[1], s)?;
                Ok(a && b)
            }
            Op::Or => {
                let a = self.holds(kids[0], s)?;
                if short && a {
                    return Ok(true);
                }
                let b = self.holds(kids[1], s)?;
                Ok(a || b)
            }
            Op::Implies => {
                let a = self.holds(kids[0], s)?;
                if short && !a {
                    return Ok(true);
                }
                let b = self.holds(kids[1], s)?;
                Ok(!a || b)
            }
            Op::Iff => Ok(self.holds(kids[0], s)? == self.holds(kids[1], s)?),
            Op::Next => {
                let mut all = true;
                for t in rg.successors(s) {
                    if !self.holds(kids[0], t)? {
                        all = false;
                        if short {
                            break;
                        }
                    }
                }
                Ok(all)
            }
            Op::NextIn(_) => {
                let a = self.mover(node).expect("resolved");
                let mut all = true;
                for arc in rg.arcs_from(s) {
                    if arc.movers.contains(a) && !self.holds(kids[0], arc.dst)? {
                        all = false;
                        if short {
                            break;
                        }
                    }
                }
                Ok(all)
            }
            Op::Globally => {
                let phi = kids[0];
                self.stats.searches += 1;
                let search = layered_search(rg, s, |t| {
                    Ok(if self.holds(phi, t)? { Class::Expand } else { Class::Target })
                })?;
                let v = search.found.is_none();
                if v && self.opts.memoization {
                    self.record(node, env, search.expanded(), true);
                }
                Ok(v)
            }
            Op::Finally => {
                let phi = kids[0];
                if self.holds(phi, s)? {
                    return Ok(true);
                }
                self.stats.searches += 1;
                let search = layered_search(rg, s, |t| {
                    Ok(if self.holds(phi, t)? { Class::Block } else { Class::Expand })
                })?;
                let region: Vec<StateId> = search.expanded().collect();
                let cycles = cyclic_components(rg, &region);
                let v = cycles.is_empty();
                if self.opts.memoization {
                    if v {
                        self.record(node, env, region, true);
                    } else {
                        self.record(node, env, cycles.into_iter().flatten(), false);
                    }
                }
                Ok(v)
            }
            Op::WeakUntil => {
                let (phi, psi) = (kids[0], kids[1]);
                if self.holds(psi, s)? {
                    return Ok(true);
                }
                self.stats.searches += 1;
                let search = layered_search(rg, s, |t| {
                    Ok(if self.holds(psi, t)? {
                        Class::Block
                    } else if self.holds(phi, t)? {
                        Class::Expand
                    } else {
                        Class::Target
                    })
                })?;
                let v = search.found.is_none();
                if v && self.opts.memoization {
                    self.record(node, env, search.expanded(), true);
                }
                Ok(v)
            }
            Op::AtState(_) => {
                let t = self.at_target(node)?;
                self.holds(kids[0], t)
            }
            Op::ForAll { var, .. } | Op::Exists { var, .. } => {
                let universal = matches!(self.f.op(node), Op::ForAll { .. });
                let members = match &self.resolved[node.0 as usize - 1] {
                    Resolved::Members(m) => m.clone(),
                    _ => unreachable!(),
                };
                if members.is_empty() {
                    let note = format!(
                        "quantifier over `{var}` at node {node} ranges over no reachable state; it is {}",
                        if universal { "true" } else { "false" }
                    );
                    if !self.diagnostics.contains(&note) {
                        self.diagnostics.push(note);
                    }
                }
                let mut acc = universal;
                for m in members {
                    let prev = self.bind(node, Some(m));
                    let r = self.holds(kids[0], m);
                    self.bind(node, prev);
                    if r? != universal {
                        acc = !universal;
                        if short {
                            break;
                        }
                    }
                }
                Ok(acc)
            }
        }
    }
}

/// Evaluates `f` at `s` with both optimizations on.
pub fn eval(rg: &ReachabilityGraph, f: &Formula, s: StateId) -> Result<bool, EvalError> {
    EvalContext::new(rg, f, Optimizations::ALL)?.eval(s)
}
