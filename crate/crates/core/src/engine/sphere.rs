//! Spheres: breadth-first layers of states around a source.
//!
//! `SPH_0(s) = {s}`; `SPH_i(s)` holds the successors of `SPH_{i-1}(s)` that
//! lie in no earlier sphere. A restricted search admits every successor into
//! the next sphere but only expands states the restriction accepts, so a
//! target may sit just past the restricted region.

use std::collections::HashMap;
use std::convert::Infallible;
use std::fmt;

use crate::graph::{ReachabilityGraph, StateId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sphere {
    pub index: usize,
    /// Ascending state ids.
    pub members: Vec<StateId>,
}

/// Unrestricted sphere succession from `source`; ends before the first empty
/// sphere.
pub struct Spheres<'g> {
    rg: &'g ReachabilityGraph,
    seen: HashMap<StateId, ()>,
    current: Vec<StateId>,
    index: usize,
}

impl Iterator for Spheres<'_> {
    type Item = Sphere;

    fn next(&mut self) -> Option<Sphere> {
        if self.current.is_empty() {
            return None;
        }
        let mut next = Vec::new();
        for &s in &self.current {
            for t in self.rg.successors(s) {
                if self.seen.insert(t, ()).is_none() {
                    next.push(t);
                }
            }
        }
        next.sort_unstable();
        let members = std::mem::replace(&mut self.current, next);
        let sphere = Sphere { index: self.index, members };
        self.index += 1;
        Some(sphere)
    }
}

pub fn spheres(rg: &ReachabilityGraph, source: StateId) -> Spheres<'_> {
    let mut seen = HashMap::new();
    seen.insert(source, ());
    Spheres { rg, seen, current: vec![source], index: 0 }
}

/// How a restricted search treats a state placed in a sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Target,
    Expand,
    Block,
}

#[derive(Debug, Clone, Copy)]
struct Visit {
    layer: u32,
    expanded: bool,
}

/// Result of a layered search: the spheres built so far and, when the search
/// stopped on a target, that target (smallest id in its sphere).
#[derive(Debug)]
pub struct LayeredSearch {
    pub spheres: Vec<Vec<StateId>>,
    visits: HashMap<StateId, Visit>,
    pub found: Option<StateId>,
}

impl LayeredSearch {
    /// States the restriction let the search expand through.
    pub fn expanded(&self) -> impl Iterator<Item = StateId> + '_ {
        self.spheres
            .iter()
            .flatten()
            .copied()
            .filter(|s| self.visits[s].expanded)
    }

    pub fn layer(&self, s: StateId) -> Option<usize> {
        self.visits.get(&s).map(|v| v.layer as usize)
    }

    /// Walks back from `end` choosing, in every earlier sphere, the
    /// smallest-id expanded predecessor. Returns `source ..= end`.
    pub fn backtrack(&self, rg: &ReachabilityGraph, end: StateId) -> Vec<StateId> {
        let mut path = vec![end];
        let mut at = end;
        let mut layer = self.visits[&end].layer;
        while layer > 0 {
            let prev = rg
                .predecessors(at)
                .iter()
                .copied()
                .find(|p| {
                    self.visits
                        .get(p)
                        .is_some_and(|v| v.expanded && v.layer == layer - 1)
                })
                .expect("every sphere member has an expanded predecessor one sphere earlier");
            path.push(prev);
            at = prev;
            layer -= 1;
        }
        path.reverse();
        path
    }
}

pub fn layered_search<E>(
    rg: &ReachabilityGraph,
    source: StateId,
    mut classify: impl FnMut(StateId) -> Result<Class, E>,
) -> Result<LayeredSearch, E> {
    let mut visits = HashMap::new();
    visits.insert(source, Visit { layer: 0, expanded: false });
    let mut search = LayeredSearch { spheres: vec![vec![source]], visits, found: None };
    let mut layer = 0u32;
    loop {
        let current = &search.spheres[layer as usize];
        let mut to_expand = Vec::new();
        for &s in current {
            match classify(s)? {
                Class::Target => {
                    search.found = Some(s);
                    return Ok(search);
                }
                Class::Expand => to_expand.push(s),
                Class::Block => {}
            }
        }
        let mut next = Vec::new();
        for s in to_expand {
            search.visits.get_mut(&s).expect("visited").expanded = true;
            for t in rg.successors(s) {
                if let std::collections::hash_map::Entry::Vacant(e) = search.visits.entry(t) {
                    e.insert(Visit { layer: layer + 1, expanded: false });
                    next.push(t);
                }
            }
        }
        if next.is_empty() {
            return Ok(search);
        }
        next.sort_unstable();
        search.spheres.push(next);
        layer += 1;
    }
}

/// Search parameters: start from `source`, expand only through states
/// accepted by `restrict`, stop at the first sphere holding a state that
/// satisfies both `target` (cond1) and `side` (cond2).
pub struct SequenceQuery<R, T, C> {
    pub source: StateId,
    pub restrict: R,
    pub target: T,
    pub side: C,
    /// Carried for completeness; the search ignores them.
    pub cond1res: Option<bool>,
    pub cond2res: Option<bool>,
}

pub type Always<E> = fn(StateId) -> Result<bool, E>;

fn always<E>(_: StateId) -> Result<bool, E> {
    Ok(true)
}

impl<R, T, E> SequenceQuery<R, T, Always<E>>
where
    R: FnMut(StateId) -> Result<bool, E>,
    T: FnMut(StateId) -> Result<bool, E>,
{
    pub fn new(source: StateId, restrict: R, target: T) -> Self {
        SequenceQuery { source, restrict, target, side: always::<E>, cond1res: None, cond2res: None }
    }
}

impl<T> SequenceQuery<Always<Infallible>, T, Always<Infallible>>
where
    T: FnMut(StateId) -> Result<bool, Infallible>,
{
    /// Unrestricted query with an infallible target predicate.
    pub fn unrestricted(source: StateId, target: T) -> Self {
        SequenceQuery::new(source, always::<Infallible>, target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchError<E> {
    NotFound { source: StateId },
    Predicate(E),
}

impl<E: fmt::Display> fmt::Display for SearchError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::NotFound { source } => {
                write!(f, "no target state reachable from {source} under the restriction")
            }
            SearchError::Predicate(e) => e.fmt(f),
        }
    }
}

impl<E: fmt::Debug + fmt::Display> std::error::Error for SearchError<E> {}

/// Sphere search followed by backtracking. The returned path runs from the
/// source to the smallest-id target of the first sphere containing one.
pub fn find_sequence<R, T, C, E>(
    rg: &ReachabilityGraph,
    mut q: SequenceQuery<R, T, C>,
) -> Result<Vec<StateId>, SearchError<E>>
where
    R: FnMut(StateId) -> Result<bool, E>,
    T: FnMut(StateId) -> Result<bool, E>,
    C: FnMut(StateId) -> Result<bool, E>,
{
    let search = layered_search(rg, q.source, |s| {
        if (q.target)(s)? && (q.side)(s)? {
            Ok(Class::Target)
        } else if (q.restrict)(s)? {
            Ok(Class::Expand)
        } else {
            Ok(Class::Block)
        }
    })
    .map_err(SearchError::Predicate)?;
    match search.found {
        Some(end) => Ok(search.backtrack(rg, end)),
        None => Err(SearchError::NotFound { source: q.source }),
    }
}
