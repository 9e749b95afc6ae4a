//! Reference evaluator: global label sets computed by fixed-point iteration.
//!
//! Shares nothing with the sphere engine beyond the graph itself, which makes
//! it a useful cross-check (`check --oracle`, and the test suite).

use std::collections::VecDeque;

use super::EvalError;
use crate::formula::{Designator, Formula, NodeId, Op, StateRef};
use crate::graph::{ReachabilityGraph, StateId};

struct Oracle<'a> {
    rg: &'a ReachabilityGraph,
    f: &'a Formula,
    env: Vec<Option<StateId>>,
}

fn designator(rg: &ReachabilityGraph, d: &Designator) -> Result<Vec<bool>, EvalError> {
    let net = rg.network();
    let a = net
        .automaton_index(&d.automaton)
        .ok_or_else(|| EvalError::UnknownAutomaton(d.automaton.clone()))?;
    let l = net.automata[a]
        .local_index(&d.local)
        .ok_or_else(|| EvalError::UnknownLocalState(d.clone()))?;
    Ok(rg.states().map(|s| rg.matches_designator(s, a, l)).collect())
}

impl Oracle<'_> {
    fn n(&self) -> usize {
        self.rg.num_states()
    }

    /// Least fixed point of `Z = seed ∨ (allow ∧ EX Z)` by backward
    /// propagation along predecessor lists.
    fn backward_lfp(&self, seed: Vec<bool>, allow: &[bool]) -> Vec<bool> {
        let mut z = seed;
        let mut queue: VecDeque<StateId> = self.rg.states().filter(|s| z[s.index()]).collect();
        while let Some(t) = queue.pop_front() {
            for &p in self.rg.predecessors(t) {
                if !z[p.index()] && allow[p.index()] {
                    z[p.index()] = true;
                    queue.push_back(p);
                }
            }
        }
        z
    }

    /// Least fixed point of `Z = φ ∨ AX Z` by counting successors not yet in Z.
    fn af(&self, phi: Vec<bool>) -> Vec<bool> {
        let mut z = phi;
        let mut pending: Vec<usize> = self.rg.states().map(|s| self.rg.arcs_from(s).len()).collect();
        let mut queue: VecDeque<StateId> = self.rg.states().filter(|s| z[s.index()]).collect();
        while let Some(t) = queue.pop_front() {
            for &p in self.rg.predecessors(t) {
                if z[p.index()] {
                    continue;
                }
                pending[p.index()] -= 1;
                if pending[p.index()] == 0 {
                    z[p.index()] = true;
                    queue.push_back(p);
                }
            }
        }
        z
    }

    fn sat(&mut self, id: NodeId) -> Result<Vec<bool>, EvalError> {
        let rg = self.rg;
        let n = self.n();
        let kids = self.f.children(id).to_vec();
        Ok(match self.f.op(id) {
            Op::Const(b) => vec![*b; n],
            Op::AtomSignal(x) => {
                let x = rg.network().signal_id(x).ok_or_else(|| EvalError::UnknownSignal(x.clone()))?;
                rg.states().map(|s| rg.generates(s, x)).collect()
            }
            Op::AtomIn(d) => designator(rg, d)?,
            Op::AtomStateVar { name, binder } => {
                let b = self.env[binder.0 as usize - 1].ok_or_else(|| EvalError::Unbound(name.clone()))?;
                rg.states().map(|s| s == b).collect()
            }
            Op::Not => self.sat(kids[0])?.into_iter().map(|v| !v).collect(),
            Op::And | Op::Or | Op::Implies | Op::Iff => {
                let a = self.sat(kids[0])?;
                let b = self.sat(kids[1])?;
                let op = self.f.op(id).clone();
                a.into_iter()
                    .zip(b)
                    .map(|(x, y)| match op {
                        Op::And => x && y,
                        Op::Or => x || y,
                        Op::Implies => !x || y,
                        _ => x == y,
                    })
                    .collect()
            }
            Op::Next => {
                let a = self.sat(kids[0])?;
                rg.states().map(|s| rg.successors(s).all(|t| a[t.index()])).collect()
            }
            Op::NextIn(name) => {
                let who = rg
                    .network()
                    .automaton_index(name)
                    .ok_or_else(|| EvalError::UnknownAutomaton(name.clone()))?;
                let a = self.sat(kids[0])?;
                rg.states()
                    .map(|s| rg.arcs_from(s).iter().all(|arc| !arc.movers.contains(who) || a[arc.dst.index()]))
                    .collect()
            }
            Op::Globally => {
                // AG φ = ¬ lfp Z. (¬φ ∨ EX Z)
                let bad = self.sat(kids[0])?.into_iter().map(|v| !v).collect();
                let all = vec![true; n];
                self.backward_lfp(bad, &all).into_iter().map(|v| !v).collect()
            }
            Op::Finally => {
                let phi = self.sat(kids[0])?;
                self.af(phi)
            }
            Op::WeakUntil => {
                // A(φ W ψ) = ¬ lfp Z. ((¬φ ∧ ¬ψ) ∨ (¬ψ ∧ EX Z))
                let phi = self.sat(kids[0])?;
                let psi = self.sat(kids[1])?;
                let seed: Vec<bool> = (0..n).map(|i| !phi[i] && !psi[i]).collect();
                let allow: Vec<bool> = psi.iter().map(|v| !v).collect();
                self.backward_lfp(seed, &allow).into_iter().map(|v| !v).collect()
            }
            Op::AtState(r) => {
                let target = match r {
                    StateRef::Var { name, binder } => {
                        self.env[binder.0 as usize - 1].ok_or_else(|| EvalError::Unbound(name.clone()))?
                    }
                    StateRef::Designator(d) => {
                        let hits: Vec<StateId> =
                            designator(rg, d)?.iter().enumerate().filter(|(_, v)| **v).map(|(i, _)| StateId(i as u32)).collect();
                        match hits.len() {
                            1 => hits[0],
                            0 => return Err(EvalError::NoMatchingState(d.clone())),
                            count => return Err(EvalError::AmbiguousState { designator: d.clone(), count }),
                        }
                    }
                };
                let v = self.sat(kids[0])?[target.index()];
                vec![v; n]
            }
            Op::ForAll { set, .. } | Op::Exists { set, .. } => {
                let universal = matches!(self.f.op(id), Op::ForAll { .. });
                let mut member = vec![false; n];
                for d in set {
                    for (i, v) in designator(rg, d)?.into_iter().enumerate() {
                        member[i] |= v;
                    }
                }
                let mut acc = universal;
                for (i, _) in member.iter().enumerate().filter(|(_, m)| **m) {
                    let m = StateId(i as u32);
                    self.env[id.0 as usize - 1] = Some(m);
                    let v = self.sat(kids[0])?[i];
                    self.env[id.0 as usize - 1] = None;
                    if universal {
                        acc &= v;
                    } else {
                        acc |= v;
                    }
                }
                vec![acc; n]
            }
        })
    }
}

/// Verdict of `f` at `s` computed from global label sets.
pub fn eval_oracle(rg: &ReachabilityGraph, f: &Formula, s: StateId) -> Result<bool, EvalError> {
    if s.index() >= rg.num_states() {
        return Err(EvalError::NoSuchState(s));
    }
    let mut o = Oracle { rg, f, env: vec![None; f.len()] };
    Ok(o.sat(f.root())?[s.index()])
}

/// Verdicts of `f` at every state, indexed by state id.
pub fn oracle_labels(rg: &ReachabilityGraph, f: &Formula) -> Result<Vec<bool>, EvalError> {
    let mut o = Oracle { rg, f, env: vec![None; f.len()] };
    o.sat(f.root())
}
