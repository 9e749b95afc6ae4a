use std::cell::RefCell;
use std::collections::HashSet;

use super::rules::{dispatch_rule, Endpoint, Rule};
use super::{CriticalTree, SequenceEntry, SkipReason, TreeError};
use crate::engine::{
    cyclic_components, find_sequence, layered_search, Class, EvalContext, EvalError, Optimizations, SearchError,
    SequenceQuery,
};
use crate::formula::{Formula, NodeId, Op};
use crate::graph::{ReachabilityGraph, StateId};

/// What the endpoint search produced.
enum Found {
    Path(Vec<StateId>),
    /// No state qualifies (empty quantifier set, or no step of the named
    /// automaton); the arguments are left unexplained.
    Vacuous(Vec<StateId>),
}

struct Builder<'a> {
    rg: &'a ReachabilityGraph,
    f: &'a Formula,
    cx: RefCell<EvalContext<'a>>,
    entries: Vec<Option<SequenceEntry>>,
}

/// Builds the critical tree for a false verdict of `f` at `start`.
///
/// Evaluation is repeated with both optimizations off so that every argument
/// of every explained operator gets its own verdict.
pub fn build_tree(rg: &ReachabilityGraph, f: &Formula, start: StateId) -> Result<CriticalTree, TreeError> {
    let mut cx = EvalContext::new(rg, f, Optimizations::NONE)?;
    if cx.eval(start)? {
        return Err(TreeError::VerdictTrue(start));
    }
    let mut b = Builder { rg, f, cx: RefCell::new(cx), entries: vec![None; f.len()] };
    b.visit(f.root(), start, true)?;
    let entries = b
        .entries
        .into_iter()
        .map(|e| e.expect("every node is visited, skipped or unreached"))
        .collect();
    Ok(CriticalTree { formula: f.clone(), start, entries })
}

fn not_found(node: NodeId, rule: &Rule) -> impl Fn(SearchError<EvalError>) -> TreeError {
    let row = rule.row;
    move |e| match e {
        SearchError::NotFound { .. } => TreeError::NoEndpoint { node, row },
        SearchError::Predicate(e) => TreeError::Eval(e),
    }
}

impl<'a> Builder<'a> {
    fn holds(&self, node: NodeId, s: StateId) -> Result<bool, EvalError> {
        self.cx.borrow_mut().holds(node, s)
    }

    fn bind(&self, binder: NodeId, s: Option<StateId>) -> Option<StateId> {
        self.cx.borrow_mut().bind(binder, s)
    }

    fn mark_unreached(&mut self, node: NodeId) {
        for id in self.f.subtree(node) {
            self.entries[id.0 as usize - 1] = Some(SequenceEntry {
                node: id,
                desired: None,
                actual: None,
                rule: None,
                states: Vec::new(),
                skipped: Some(SkipReason::NotReached),
                jump: false,
            });
        }
    }

    fn visit(&mut self, node: NodeId, start: StateId, desired: bool) -> Result<(), TreeError> {
        let actual = self.holds(node, start)?;
        if actual == desired {
            return Err(TreeError::Inconsistent { node, state: start, expected: !desired });
        }
        let op = self.f.op(node).clone();
        let jump = matches!(op, Op::AtState(_) | Op::ForAll { .. } | Op::Exists { .. });
        let Some(rule) = dispatch_rule(op.kind(), desired) else {
            self.entries[node.0 as usize - 1] = Some(SequenceEntry {
                node,
                desired: Some(desired),
                actual: Some(actual),
                rule: None,
                states: vec![start],
                skipped: None,
                jump: false,
            });
            return Ok(());
        };
        let found = self.sequence(node, rule, start)?;
        let (states, vacuous) = match found {
            Found::Path(p) => (p, false),
            Found::Vacuous(p) => (p, true),
        };
        let end = *states.last().expect("sequences are nonempty");
        self.entries[node.0 as usize - 1] = Some(SequenceEntry {
            node,
            desired: Some(desired),
            actual: Some(actual),
            rule: Some(rule.row),
            states,
            skipped: None,
            jump,
        });
        let kids = self.f.children(node).to_vec();
        if vacuous {
            for k in kids {
                self.mark_unreached(k);
            }
            return Ok(());
        }
        let quantifier = matches!(op, Op::ForAll { .. } | Op::Exists { .. });
        let saved = quantifier.then(|| self.bind(node, Some(end)));
        for (k, directive) in kids.into_iter().zip(rule.children) {
            let child_actual = self.holds(k, end)?;
            let child_desired = directive.desired(child_actual);
            if child_actual == child_desired {
                self.mark_unreached(k);
                self.entries[k.0 as usize - 1] = Some(SequenceEntry {
                    node: k,
                    desired: Some(child_desired),
                    actual: Some(child_actual),
                    rule: None,
                    states: Vec::new(),
                    skipped: Some(SkipReason::ValueAsDesired),
                    jump: false,
                });
            } else {
                self.visit(k, end, child_desired)?;
            }
        }
        if let Some(prev) = saved {
            self.bind(node, prev);
        }
        Ok(())
    }

    /// Sequence from `s` to the state finishing `rule` for `node`.
    fn sequence(&self, node: NodeId, rule: &Rule, s: StateId) -> Result<Found, TreeError> {
        let rg = self.rg;
        let kids = self.f.children(node);
        let phi = kids.first().copied().unwrap_or(node);
        let psi = kids.get(1).copied().unwrap_or(node);
        let missing = not_found(node, rule);
        Ok(match rule.endpoint {
            Endpoint::Start => Found::Path(vec![s]),
            Endpoint::Successor { holding } => {
                for t in rg.successors(s) {
                    if self.holds(phi, t)? == holding {
                        return Ok(Found::Path(vec![s, t]));
                    }
                }
                return Err(TreeError::NoEndpoint { node, row: rule.row });
            }
            Endpoint::MoverSuccessor { holding } => {
                let a = self.cx.borrow().mover(node).expect("resolved mover");
                let mut any_step = false;
                for arc in rg.arcs_from(s).iter().filter(|arc| arc.movers.contains(a)) {
                    any_step = true;
                    if self.holds(phi, arc.dst)? == holding {
                        return Ok(Found::Path(vec![s, arc.dst]));
                    }
                }
                if !any_step && holding {
                    // N[a] is vacuously true when `a` cannot move
                    Found::Vacuous(vec![s])
                } else {
                    return Err(TreeError::NoEndpoint { node, row: rule.row });
                }
            }
            Endpoint::Reach { holding } => Found::Path(
                find_sequence(rg, SequenceQuery::new(s, |_| Ok(true), |t| Ok(self.holds(phi, t)? == holding)))
                    .map_err(missing)?,
            ),
            Endpoint::CycleAvoiding => {
                let region = layered_search(rg, s, |t| {
                    Ok::<_, EvalError>(if self.holds(phi, t)? { Class::Block } else { Class::Expand })
                })?;
                let region: Vec<StateId> = region.expanded().collect();
                let cyclic: HashSet<StateId> = cyclic_components(rg, &region).into_iter().flatten().collect();
                Found::Path(
                    find_sequence(
                        rg,
                        SequenceQuery::new(s, |t| Ok(!self.holds(phi, t)?), |t| Ok(cyclic.contains(&t))),
                    )
                    .map_err(missing)?,
                )
            }
            Endpoint::Neither => Found::Path(
                find_sequence(
                    rg,
                    SequenceQuery::new(
                        s,
                        |t| Ok(self.holds(phi, t)? && !self.holds(psi, t)?),
                        |t| Ok(!self.holds(phi, t)? && !self.holds(psi, t)?),
                    ),
                )
                .map_err(missing)?,
            ),
            Endpoint::BothOrCycle => Found::Path(self.both_or_cycle(node, rule, s, phi, psi)?),
            Endpoint::Named => Found::Path(vec![self.cx.borrow().at_target(node)?]),
            Endpoint::Member { satisfying } => {
                let members = self.cx.borrow().members(node).to_vec();
                if members.is_empty() {
                    return Ok(Found::Vacuous(vec![s]));
                }
                let mut hit = None;
                for m in members {
                    let prev = self.bind(node, Some(m));
                    let v = self.holds(phi, m);
                    self.bind(node, prev);
                    if v? == satisfying {
                        hit = Some(m);
                        break;
                    }
                }
                Found::Path(vec![hit.ok_or(TreeError::NoEndpoint { node, row: rule.row })?])
            }
        })
    }

    /// Row 19. First choice: a state holding both arguments, reached through
    /// φ ∧ ¬ψ states. Otherwise a cycle of φ ∧ ¬ψ states: walk to the first
    /// cycle state reached, then around the cycle to the state whose step
    /// closes it. Failing both, the first state where ψ holds.
    fn both_or_cycle(
        &self,
        node: NodeId,
        rule: &Rule,
        s: StateId,
        phi: NodeId,
        psi: NodeId,
    ) -> Result<Vec<StateId>, TreeError> {
        let rg = self.rg;
        let missing = not_found(node, rule);
        let inside = |t: StateId| -> Result<bool, EvalError> { Ok(self.holds(phi, t)? && !self.holds(psi, t)?) };
        let both = find_sequence(
            rg,
            SequenceQuery::new(s, inside, |t| Ok(self.holds(phi, t)? && self.holds(psi, t)?)),
        );
        match both {
            Ok(p) => return Ok(p),
            Err(SearchError::Predicate(e)) => return Err(e.into()),
            Err(SearchError::NotFound { .. }) => {}
        }
        let region = layered_search(rg, s, |t| Ok::<_, EvalError>(if inside(t)? { Class::Expand } else { Class::Block }))?;
        let region: Vec<StateId> = region.expanded().collect();
        let components = cyclic_components(rg, &region);
        if components.is_empty() {
            return find_sequence(rg, SequenceQuery::new(s, inside, |t| self.holds(psi, t))).map_err(missing);
        }
        let cyclic: HashSet<StateId> = components.iter().flatten().copied().collect();
        let mut path = find_sequence(rg, SequenceQuery::new(s, inside, |t| Ok(cyclic.contains(&t)))).map_err(&missing)?;
        let entry = *path.last().expect("nonempty");
        let comp: HashSet<StateId> = components
            .into_iter()
            .find(|c| c.contains(&entry))
            .expect("entry lies on a cycle")
            .into_iter()
            .collect();
        let around = layered_search(rg, entry, |t| {
            Ok::<_, EvalError>(if rg.has_arc(t, entry) {
                Class::Target
            } else if comp.contains(&t) {
                Class::Expand
            } else {
                Class::Block
            })
        })?;
        let closer = around.found.ok_or(TreeError::NoEndpoint { node, row: rule.row })?;
        path.extend(around.backtrack(rg, closer).into_iter().skip(1));
        Ok(path)
    }
}
