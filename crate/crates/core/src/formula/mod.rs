//! QsCTL formulas: universal-path CTL with state quantifiers and an
//! at-state operator.
//!
//! A parsed [`Formula`] is a flat arena of nodes numbered in pre-order
//! starting at 1, so every subtree occupies a contiguous id block. Those ids
//! key the sequences of a critical tree.

mod parser;
mod print;

use std::collections::BTreeSet;
use std::fmt;

pub use parser::{parse_formula, FormulaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(1);

    fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `automaton.local`: denotes every global state whose named component is in
/// the named local state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Designator {
    pub automaton: String,
    pub local: String,
}

impl fmt::Display for Designator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.automaton, self.local)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateRef {
    Var { name: String, binder: NodeId },
    Designator(Designator),
}

impl fmt::Display for StateRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateRef::Var { name, .. } => f.write_str(name),
            StateRef::Designator(d) => d.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op {
    Not,
    And,
    Or,
    Implies,
    Iff,
    /// AX
    Next,
    /// AX restricted to steps on which the automaton moves.
    NextIn(String),
    /// AF
    Finally,
    /// AG
    Globally,
    /// A(φ U_w ψ)
    WeakUntil,
    AtState(StateRef),
    ForAll { var: String, set: Vec<Designator> },
    Exists { var: String, set: Vec<Designator> },
    AtomIn(Designator),
    AtomSignal(String),
    AtomStateVar { name: String, binder: NodeId },
    Const(bool),
}

/// Coarse operator classification used by rule dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Not,
    And,
    Or,
    Implies,
    Iff,
    Next,
    NextIn,
    Finally,
    Globally,
    WeakUntil,
    AtState,
    ForAll,
    Exists,
    Atom,
}

impl Op {
    pub fn kind(&self) -> OpKind {
        match self {
            Op::Not => OpKind::Not,
            Op::And => OpKind::And,
            Op::Or => OpKind::Or,
            Op::Implies => OpKind::Implies,
            Op::Iff => OpKind::Iff,
            Op::Next => OpKind::Next,
            Op::NextIn(_) => OpKind::NextIn,
            Op::Finally => OpKind::Finally,
            Op::Globally => OpKind::Globally,
            Op::WeakUntil => OpKind::WeakUntil,
            Op::AtState(_) => OpKind::AtState,
            Op::ForAll { .. } => OpKind::ForAll,
            Op::Exists { .. } => OpKind::Exists,
            Op::AtomIn(_) | Op::AtomSignal(_) | Op::AtomStateVar { .. } | Op::Const(_) => OpKind::Atom,
        }
    }

    pub fn arity(&self) -> usize {
        match self.kind() {
            OpKind::And | OpKind::Or | OpKind::Implies | OpKind::Iff | OpKind::WeakUntil => 2,
            OpKind::Atom => 0,
            _ => 1,
        }
    }

    pub fn is_temporal(&self) -> bool {
        matches!(
            self.kind(),
            OpKind::Next | OpKind::NextIn | OpKind::Finally | OpKind::Globally | OpKind::WeakUntil
        )
    }

    /// Short operator lexeme in the input syntax.
    pub fn lexeme(&self) -> String {
        match self {
            Op::Not => "!".into(),
            Op::And => "*".into(),
            Op::Or => "+".into(),
            Op::Implies => "=>".into(),
            Op::Iff => "<=>".into(),
            Op::Next => "N".into(),
            Op::NextIn(a) => format!("N[{a}]"),
            Op::Finally => "F".into(),
            Op::Globally => "G".into(),
            Op::WeakUntil => "U".into(),
            Op::AtState(_) => ":".into(),
            Op::ForAll { .. } => "A".into(),
            Op::Exists { .. } => "E".into(),
            Op::AtomIn(d) => format!("in {d}"),
            Op::AtomSignal(x) => x.clone(),
            Op::AtomStateVar { name, .. } => format!("in {name}"),
            Op::Const(b) => b.to_string(),
        }
    }

    /// Operator text as shown at the head of a tree line: the lexeme plus
    /// any binding prefix.
    pub fn heading(&self) -> String {
        match self {
            Op::ForAll { var, set } | Op::Exists { var, set } => {
                let q = if matches!(self, Op::ForAll { .. }) { "A" } else { "E" };
                let members: Vec<_> = set.iter().map(|d| d.to_string()).collect();
                format!("{q} {var} in {{{}}};", members.join(", "))
            }
            Op::AtState(r) => format!("{r}:"),
            other => other.lexeme(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub op: Op,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    pub depth: usize,
    /// Largest id inside this node's subtree.
    pub last: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    nodes: Vec<Node>,
}

/// Atomic proposition occurring in a formula.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Signal(String),
    In(Designator),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Signal(x) => f.write_str(x),
            Atom::In(d) => write!(f, "in {d}"),
        }
    }
}

impl Formula {
    pub(crate) fn from_nodes(nodes: Vec<Node>) -> Self {
        Formula { nodes }
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.slot()]
    }

    pub fn op(&self, id: NodeId) -> &Op {
        &self.node(id).op
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.node(id).children
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.0 >= 1 && id.slot() < self.nodes.len()
    }

    /// Nodes in pre-order.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Ids of `id`'s subtree, including `id` itself.
    pub fn subtree(&self, id: NodeId) -> impl Iterator<Item = NodeId> {
        (id.0..=self.node(id).last.0).map(NodeId)
    }

    /// Binders of state variables that occur free in the subtree of `id`.
    pub fn free_binders(&self, id: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .subtree(id)
            .filter_map(|n| match self.op(n) {
                Op::AtomStateVar { binder, .. } => Some(*binder),
                Op::AtState(StateRef::Var { binder, .. }) => Some(*binder),
                _ => None,
            })
            .filter(|b| *b < id || *b > self.node(id).last)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn has_next(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n.op, Op::Next | Op::NextIn(_)))
    }

    /// Signal atoms and `in a.p` atoms occurring in the formula.
    pub fn free_atoms(&self) -> BTreeSet<Atom> {
        self.nodes
            .iter()
            .filter_map(|n| match &n.op {
                Op::AtomSignal(x) => Some(Atom::Signal(x.clone())),
                Op::AtomIn(d) => Some(Atom::In(d.clone())),
                _ => None,
            })
            .collect()
    }
}

/// Free-function form of [`Formula::free_atoms`].
pub fn free_atoms(f: &Formula) -> BTreeSet<Atom> {
    f.free_atoms()
}
