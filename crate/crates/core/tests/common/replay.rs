//! Independent checker for critical trees.
//!
//! Recomputes every subformula value with its own naive fixed-point labeler
//! and checks each sequence against the finishing-state condition of its
//! table row. Nothing here calls the sphere engine or the tree builder.

use std::collections::{HashMap, VecDeque};

use csmcheck::formula::{Formula, NodeId, Op, StateRef};
use csmcheck::graph::{ReachabilityGraph, StateId};
use csmcheck::tree::{CriticalTree, SkipReason};

type Env = Vec<Option<StateId>>;

pub struct Labeler<'a> {
    rg: &'a ReachabilityGraph,
    f: &'a Formula,
    cache: HashMap<(u32, Env), Vec<bool>>,
}

fn local_matches(rg: &ReachabilityGraph, s: StateId, automaton: &str, local: &str) -> bool {
    let net = rg.network();
    let Some(a) = net.automata.iter().position(|x| x.name == automaton) else { return false };
    net.automata[a].local_states[rg.components(s)[a] as usize] == local
}

impl<'a> Labeler<'a> {
    pub fn new(rg: &'a ReachabilityGraph, f: &'a Formula) -> Self {
        Labeler { rg, f, cache: HashMap::new() }
    }

    pub fn empty_env(&self) -> Env {
        vec![None; self.f.len()]
    }

    fn ax(&self, z: &[bool]) -> Vec<bool> {
        self.rg.states().map(|s| self.rg.successors(s).all(|t| z[t.index()])).collect()
    }

    fn fix(&self, init: bool, step: impl Fn(&[bool]) -> Vec<bool>) -> Vec<bool> {
        let mut z = vec![init; self.rg.num_states()];
        loop {
            let next = step(&z);
            if next == z {
                return z;
            }
            z = next;
        }
    }

    pub fn members(&self, node: NodeId) -> Vec<StateId> {
        let set = match self.f.op(node) {
            Op::ForAll { set, .. } | Op::Exists { set, .. } => set,
            _ => return Vec::new(),
        };
        self.rg
            .states()
            .filter(|&s| set.iter().any(|d| local_matches(self.rg, s, &d.automaton, &d.local)))
            .collect()
    }

    pub fn at_target(&self, node: NodeId, env: &Env) -> StateId {
        match self.f.op(node) {
            Op::AtState(StateRef::Var { binder, .. }) => env[binder.0 as usize - 1].expect("bound"),
            Op::AtState(StateRef::Designator(d)) => {
                let hits: Vec<StateId> =
                    self.rg.states().filter(|&s| local_matches(self.rg, s, &d.automaton, &d.local)).collect();
                assert_eq!(hits.len(), 1, "at-state designator must name one state");
                hits[0]
            }
            _ => panic!("not an at-state node"),
        }
    }

    pub fn value(&mut self, node: NodeId, env: &Env, s: StateId) -> bool {
        self.labels(node, env)[s.index()]
    }

    pub fn labels(&mut self, node: NodeId, env: &Env) -> Vec<bool> {
        let key = (node.0, env.clone());
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let v = self.compute(node, env);
        self.cache.insert(key, v.clone());
        v
    }

    fn compute(&mut self, node: NodeId, env: &Env) -> Vec<bool> {
        let rg = self.rg;
        let n = rg.num_states();
        let kids = self.f.children(node).to_vec();
        match self.f.op(node).clone() {
            Op::Const(b) => vec![b; n],
            Op::AtomSignal(x) => rg
                .states()
                .map(|s| {
                    let comps = rg.components(s);
                    rg.network()
                        .automata
                        .iter()
                        .enumerate()
                        .any(|(a, aut)| aut.emits[comps[a] as usize].iter().any(|&y| rg.network().signal_name(y) == x))
                })
                .collect(),
            Op::AtomIn(d) => rg.states().map(|s| local_matches(rg, s, &d.automaton, &d.local)).collect(),
            Op::AtomStateVar { binder, .. } => {
                let b = env[binder.0 as usize - 1].expect("bound");
                rg.states().map(|s| s == b).collect()
            }
            Op::Not => self.labels(kids[0], env).into_iter().map(|v| !v).collect(),
            op @ (Op::And | Op::Or | Op::Implies | Op::Iff) => {
                let a = self.labels(kids[0], env);
                let b = self.labels(kids[1], env);
                (0..n)
                    .map(|i| match op {
                        Op::And => a[i] && b[i],
                        Op::Or => a[i] || b[i],
                        Op::Implies => !a[i] || b[i],
                        _ => a[i] == b[i],
                    })
                    .collect()
            }
            Op::Next => {
                let a = self.labels(kids[0], env);
                self.ax(&a)
            }
            Op::NextIn(name) => {
                let who = rg.network().automata.iter().position(|x| x.name == name).unwrap();
                let a = self.labels(kids[0], env);
                rg.states()
                    .map(|s| rg.arcs_from(s).iter().filter(|arc| arc.movers.contains(who)).all(|arc| a[arc.dst.index()]))
                    .collect()
            }
            Op::Finally => {
                let a = self.labels(kids[0], env);
                self.fix(false, |z| {
                    let next = self.ax(z);
                    (0..n).map(|i| a[i] || next[i]).collect()
                })
            }
            Op::Globally => {
                let a = self.labels(kids[0], env);
                self.fix(true, |z| {
                    let next = self.ax(z);
                    (0..n).map(|i| a[i] && next[i]).collect()
                })
            }
            Op::WeakUntil => {
                let a = self.labels(kids[0], env);
                let b = self.labels(kids[1], env);
                self.fix(true, |z| {
                    let next = self.ax(z);
                    (0..n).map(|i| b[i] || (a[i] && next[i])).collect()
                })
            }
            Op::AtState(_) => {
                let t = self.at_target(node, env);
                let v = self.value(kids[0], env, t);
                vec![v; n]
            }
            Op::ForAll { .. } | Op::Exists { .. } => {
                let universal = matches!(self.f.op(node), Op::ForAll { .. });
                let mut acc = universal;
                for m in self.members(node) {
                    let mut inner = env.clone();
                    inner[node.0 as usize - 1] = Some(m);
                    let v = self.value(kids[0], &inner, m);
                    acc = if universal { acc && v } else { acc || v };
                }
                vec![acc; n]
            }
        }
    }
}

/// Expected table row for an operator whose value is to be explained
/// towards `desired`.
pub fn expected_row(op: &Op, desired: bool) -> Option<u8> {
    let base = match op {
        Op::Not => 1,
        Op::Or => 3,
        Op::And => 5,
        Op::Implies => 7,
        Op::Iff => 9,
        Op::Next => 11,
        Op::NextIn(_) => 13,
        Op::Finally => 15,
        Op::Globally => 17,
        Op::WeakUntil => 19,
        Op::AtState(_) => 21,
        Op::ForAll { .. } => 23,
        Op::Exists { .. } => 25,
        _ => return None,
    };
    Some(if desired { base + 1 } else { base })
}

/// Desired results of the arguments under `row`; `None` means the opposite
/// of the argument's actual value.
fn directives(row: u8) -> &'static [Option<bool>] {
    const F: Option<bool> = Some(false);
    const T: Option<bool> = Some(true);
    match row {
        1 => &[T],
        2 => &[F],
        3 | 5 => &[F, F],
        4 | 6 => &[T, T],
        7 | 9 | 10 => &[None, None],
        8 => &[F, T],
        19 => &[F, F],
        20 => &[T, T],
        r if r % 2 == 1 => &[F],
        _ => &[T],
    }
}

/// Every row whose sequence was checked, for coverage accounting.
#[derive(Debug, Default, Clone)]
pub struct Coverage {
    pub rows: [usize; 27],
}

impl Coverage {
    pub fn missing(&self) -> Vec<u8> {
        (1..=26u8).filter(|&r| self.rows[r as usize] == 0).collect()
    }

    pub fn merge(&mut self, other: &Coverage) {
        for (a, b) in self.rows.iter_mut().zip(other.rows.iter()) {
            *a += b;
        }
    }
}

pub struct Replayer<'a, 't, 'l> {
    rg: &'a ReachabilityGraph,
    t: &'t CriticalTree,
    lab: &'l mut Labeler<'a>,
    pub violations: Vec<String>,
    pub coverage: Coverage,
}

fn bfs_distance(rg: &ReachabilityGraph, from: StateId, target: &[bool]) -> Option<usize> {
    let mut dist = vec![usize::MAX; rg.num_states()];
    let mut q = VecDeque::from([from]);
    dist[from.index()] = 0;
    while let Some(s) = q.pop_front() {
        if target[s.index()] {
            return Some(dist[s.index()]);
        }
        for t in rg.successors(s) {
            if dist[t.index()] == usize::MAX {
                dist[t.index()] = dist[s.index()] + 1;
                q.push_back(t);
            }
        }
    }
    None
}

/// Whether `s` lies on a cycle made only of `inside` states.
fn on_cycle(rg: &ReachabilityGraph, s: StateId, inside: &[bool]) -> bool {
    let mut seen = vec![false; rg.num_states()];
    let mut q: VecDeque<StateId> = rg.successors(s).filter(|t| inside[t.index()]).collect();
    while let Some(t) = q.pop_front() {
        if t == s {
            return true;
        }
        if std::mem::replace(&mut seen[t.index()], true) {
            continue;
        }
        q.extend(rg.successors(t).filter(|u| inside[u.index()]));
    }
    false
}

impl<'a, 't, 'l> Replayer<'a, 't, 'l> {
    pub fn new(rg: &'a ReachabilityGraph, t: &'t CriticalTree, lab: &'l mut Labeler<'a>) -> Self {
        Replayer { rg, t, lab, violations: Vec::new(), coverage: Coverage::default() }
    }

    fn fail(&mut self, node: NodeId, msg: String) {
        self.violations.push(format!("node {}: {msg}", node.0));
    }

    /// Checks the whole tree; returns the violations found.
    pub fn run(mut self) -> (Vec<String>, Coverage) {
        let root = self.t.formula.root();
        let env = self.lab.empty_env();
        let e = self.t.entry(root);
        if !e.jump && e.first() != Some(self.t.start) {
            self.fail(root, format!("root sequence starts at {:?}, not at {}", e.first(), self.t.start));
        }
        if self.lab.value(root, &env, self.t.start) {
            self.fail(root, "tree built for a true verdict".into());
        }
        self.visit(root, &env, self.t.start, true, None);
        (self.violations, self.coverage)
    }

    fn unreached(&mut self, node: NodeId) {
        let e = self.t.entry(node);
        if e.skipped != Some(SkipReason::NotReached) || !e.states.is_empty() {
            self.fail(node, "expected not-reached".into());
        }
        for &k in self.t.formula.children(node) {
            self.unreached(k);
        }
    }

    fn path(&mut self, node: NodeId, seq: &[StateId]) {
        for w in seq.windows(2) {
            if !self.rg.has_arc(w[0], w[1]) {
                self.fail(node, format!("no arc {} -> {}", w[0], w[1]));
            }
        }
    }

    /// `at` is where the node is evaluated; `desired` is what the parent
    /// asked for (`None` at the root).
    fn visit(&mut self, node: NodeId, env: &Env, at: StateId, reached: bool, desired: Option<bool>) {
        if !reached {
            self.unreached(node);
            return;
        }
        let e = self.t.entry(node).clone();
        let actual = self.lab.value(node, env, at);
        if desired == Some(actual) {
            if e.skipped != Some(SkipReason::ValueAsDesired) || !e.states.is_empty() {
                self.fail(node, "value already as desired but the node was constructed".into());
            }
            for &k in self.t.formula.children(node) {
                self.unreached(k);
            }
            return;
        }
        if e.skipped.is_some() {
            self.fail(node, format!("skipped ({:?}) although its value differs from the desired one", e.skipped));
            return;
        }
        if e.actual != Some(actual) || e.desired != Some(!actual) {
            self.fail(node, format!("recorded actual/desired {:?}/{:?}, replayed actual {actual}", e.actual, e.desired));
        }
        if e.states.is_empty() {
            self.fail(node, "empty sequence".into());
            return;
        }
        if !e.jump && e.states[0] != at {
            self.fail(node, format!("sequence starts at {} instead of {at} (sticking)", e.states[0]));
        }
        self.path(node, &e.states);
        let op = self.t.formula.op(node).clone();
        let Some(row) = expected_row(&op, !actual) else {
            if e.rule.is_some() || e.states != [at] {
                self.fail(node, "atom must have no rule and a one-state sequence".into());
            }
            return;
        };
        if e.rule != Some(row) {
            self.fail(node, format!("rule {:?}, expected row {row}", e.rule));
            return;
        }
        self.coverage.rows[row as usize] += 1;
        let kids = self.t.formula.children(node).to_vec();
        let last = *e.states.last().unwrap();
        let mut child_env = env.clone();
        let vacuous = self.endpoint(node, row, env, at, &e.states, &mut child_env);
        if vacuous {
            for &k in &kids {
                self.unreached(k);
            }
            return;
        }
        for (&k, d) in kids.iter().zip(directives(row)) {
            let want = match d {
                Some(b) => *b,
                None => !self.lab.value(k, &child_env, last),
            };
            self.visit(k, &child_env, last, true, Some(want));
        }
    }

    /// Checks the finishing state of `seq` under `row`. Returns true for a
    /// vacuous explanation (no argument is reached).
    fn endpoint(&mut self, node: NodeId, row: u8, env: &Env, at: StateId, seq: &[StateId], child_env: &mut Env) -> bool {
        let kids = self.t.formula.children(node).to_vec();
        let last = *seq.last().unwrap();
        let rg = self.rg;
        match row {
            1..=10 | 17 => {
                if seq != [at] {
                    self.fail(node, format!("row {row} must finish at the start state"));
                }
            }
            11 | 12 => {
                let phi = self.lab.value(kids[0], env, last);
                if seq.len() != 2 || phi != (row == 11) {
                    self.fail(node, format!("row {row}: bad successor {seq:?}"));
                }
            }
            13 | 14 => {
                let Op::NextIn(name) = self.t.formula.op(node) else { unreachable!() };
                let who = rg.network().automata.iter().position(|x| &x.name == name).unwrap();
                let steps = rg.arcs_from(at).iter().any(|a| a.movers.contains(who));
                if row == 13 && !steps {
                    if seq != [at] {
                        self.fail(node, "vacuous next-in must stay at the start".into());
                    }
                    return true;
                }
                let moved = seq.len() == 2 && rg.arc(seq[0], seq[1]).is_some_and(|a| a.movers.contains(who));
                let phi = self.lab.value(kids[0], env, last);
                if !moved || phi != (row == 13) {
                    self.fail(node, format!("row {row}: bad mover successor {seq:?}"));
                }
            }
            15 | 18 => {
                let holding = row == 15;
                let labels: Vec<bool> = self.lab.labels(kids[0], env).into_iter().map(|v| v == holding).collect();
                if !labels[last.index()] {
                    self.fail(node, format!("row {row}: finishing state {last} has the wrong value"));
                }
                if bfs_distance(rg, at, &labels) != Some(seq.len() - 1) {
                    self.fail(node, format!("row {row}: sequence of {} states is not shortest", seq.len()));
                }
            }
            16 => {
                let phi = self.lab.labels(kids[0], env);
                let outside: Vec<bool> = phi.iter().map(|v| !v).collect();
                if seq.iter().any(|s| phi[s.index()]) {
                    self.fail(node, "row 16: argument holds on the sequence".into());
                }
                if !on_cycle(rg, last, &outside) {
                    self.fail(node, format!("row 16: {last} is not on a cycle avoiding the argument"));
                }
            }
            19 | 20 => {
                let phi = self.lab.labels(kids[0], env);
                let psi = self.lab.labels(kids[1], env);
                let (body, tail) = seq.split_at(seq.len() - 1);
                if body.iter().any(|s| !phi[s.index()] || psi[s.index()]) {
                    self.fail(node, format!("row {row}: a state before the last breaks left-and-not-right"));
                }
                let l = tail[0].index();
                let ok = if row == 20 {
                    !phi[l] && !psi[l]
                } else {
                    psi[l] || (phi[l] && rg.successors(tail[0]).any(|t| seq.contains(&t)))
                };
                if !ok {
                    self.fail(node, format!("row {row}: bad finishing state {last}"));
                }
            }
            21 | 22 => {
                let target = self.lab.at_target(node, env);
                if seq != [target] {
                    self.fail(node, format!("at-state sequence {seq:?}, expected [{target}]"));
                }
            }
            _ => {
                let members = self.lab.members(node);
                if members.is_empty() {
                    if seq != [at] {
                        self.fail(node, "empty quantifier set must stay at the start".into());
                    }
                    return true;
                }
                let satisfying = row % 2 == 1;
                let mut first = None;
                for &m in &members {
                    let mut inner = env.clone();
                    inner[node.0 as usize - 1] = Some(m);
                    if self.lab.value(kids[0], &inner, m) == satisfying {
                        first = Some(m);
                        break;
                    }
                }
                match first {
                    Some(m) if seq == [m] => child_env[node.0 as usize - 1] = Some(m),
                    _ => self.fail(node, format!("row {row}: member sequence {seq:?}, expected {first:?}")),
                }
            }
        }
        false
    }
}

/// Checks the OK/ERROR marks of a states-view document against the tree:
/// one block of state lines per constructed sequence, in pre-order, with
/// ERROR exactly on the last line of each block.
pub fn check_marks(t: &CriticalTree, text: &str) -> Vec<String> {
    let mut blocks: Vec<Vec<(String, String)>> = Vec::new();
    let mut open = false;
    for line in text.lines() {
        let words: Vec<&str> = line.split_whitespace().collect();
        let is_state = words.len() == 2
            && words[0].starts_with('s')
            && words[0][1..].parse::<u32>().is_ok()
            && (words[1] == "OK" || words[1] == "ERROR");
        if is_state {
            if !open {
                blocks.push(Vec::new());
            }
            blocks.last_mut().unwrap().push((words[0].to_string(), words[1].to_string()));
        }
        open = is_state;
    }
    let seqs: Vec<&Vec<StateId>> = t.constructed().map(|e| &e.states).collect();
    let mut out = Vec::new();
    if blocks.len() != seqs.len() {
        out.push(format!("{} state blocks for {} sequences", blocks.len(), seqs.len()));
        return out;
    }
    for (b, s) in blocks.iter().zip(seqs) {
        for (i, ((label, mark), st)) in b.iter().zip(s.iter()).enumerate() {
            let want = if i + 1 == s.len() { "ERROR" } else { "OK" };
            if label != &st.to_string() || mark != want {
                out.push(format!("line `{label}  {mark}` should read `{st}  {want}`"));
            }
        }
        if b.len() != s.len() {
            out.push(format!("block of {} lines for a sequence of {}", b.len(), s.len()));
        }
    }
    out
}
