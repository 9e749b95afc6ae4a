//! The 26-row rule table for critical-tree construction.
//!
//! A row is selected by (operator, desired result), where the desired result
//! is the opposite of the operator's actual value at the sequence start. It
//! names the state that finishes the operator's sequence and the result each
//! argument should be explained towards at that state.

use crate::formula::OpKind;

/// Which state finishes the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    /// The start state itself (zero-length sequence).
    Start,
    /// An immediate successor where φ has the given value.
    Successor { holding: bool },
    /// An immediate successor, reached by a step of the named automaton,
    /// where φ has the given value.
    MoverSuccessor { holding: bool },
    /// Any reachable state where φ has the given value.
    Reach { holding: bool },
    /// A member of a cycle in the region where φ is false.
    CycleAvoiding,
    /// A state holding φ and ψ, or a φ-state closing a cycle.
    BothOrCycle,
    /// A state holding neither φ nor ψ, reached through φ ∧ ¬ψ states.
    Neither,
    /// The state named by the at-state operator.
    Named,
    /// A member of the quantifier set where the body has the given value.
    Member { satisfying: bool },
}

/// Desired result for one argument at the finishing state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChildDirective {
    Desired(bool),
    /// "b if it is not b": explained only when its actual value differs.
    Conditional(bool),
    OppositeOfActual,
}

impl ChildDirective {
    pub fn desired(self, actual: bool) -> bool {
        match self {
            ChildDirective::Desired(b) | ChildDirective::Conditional(b) => b,
            ChildDirective::OppositeOfActual => !actual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub row: u8,
    pub op: OpKind,
    pub desired: bool,
    pub endpoint: Endpoint,
    pub children: &'static [ChildDirective],
    /// Human-readable finishing-state description.
    pub finish: &'static str,
}

use ChildDirective::*;
use Endpoint::*;

macro_rules! row {
    ($n:expr, $op:ident, $d:expr, $e:expr, [$($c:expr),*], $txt:expr) => {
        Rule { row: $n, op: OpKind::$op, desired: $d, endpoint: $e, children: &[$($c),*], finish: $txt }
    };
}

pub static RULES: [Rule; 26] = [
    row!(1, Not, false, Start, [Desired(true)], "starting state"),
    row!(2, Not, true, Start, [Desired(false)], "starting state"),
    row!(3, Or, false, Start, [Conditional(false), Conditional(false)], "starting state"),
    row!(4, Or, true, Start, [Desired(true), Desired(true)], "starting state"),
    row!(5, And, false, Start, [Desired(false), Desired(false)], "starting state"),
    row!(6, And, true, Start, [Conditional(true), Conditional(true)], "starting state"),
    row!(7, Implies, false, Start, [OppositeOfActual, OppositeOfActual], "starting state"),
    row!(8, Implies, true, Start, [Desired(false), Desired(true)], "starting state"),
    row!(9, Iff, false, Start, [OppositeOfActual, OppositeOfActual], "starting state"),
    row!(10, Iff, true, Start, [OppositeOfActual, OppositeOfActual], "starting state"),
    row!(11, Next, false, Successor { holding: true }, [Desired(false)], "successor holding the argument"),
    row!(12, Next, true, Successor { holding: false }, [Desired(true)], "successor not holding the argument"),
    row!(
        13,
        NextIn,
        false,
        MoverSuccessor { holding: true },
        [Desired(false)],
        "successor in the automaton holding the argument"
    ),
    row!(
        14,
        NextIn,
        true,
        MoverSuccessor { holding: false },
        [Desired(true)],
        "successor in the automaton not holding the argument"
    ),
    row!(15, Finally, false, Reach { holding: true }, [Desired(false)], "state holding the argument"),
    row!(16, Finally, true, CycleAvoiding, [Desired(true)], "cycle member where the argument is false"),
    row!(17, Globally, false, Start, [Desired(false)], "starting state"),
    row!(18, Globally, true, Reach { holding: false }, [Desired(true)], "state not holding the argument"),
    row!(
        19,
        WeakUntil,
        false,
        BothOrCycle,
        [Desired(false), Conditional(false)],
        "state holding both arguments, or last of a cycle holding the left one"
    ),
    row!(20, WeakUntil, true, Neither, [Desired(true), Desired(true)], "state holding neither argument"),
    row!(21, AtState, false, Named, [Desired(false)], "the named state"),
    row!(22, AtState, true, Named, [Desired(true)], "the named state"),
    row!(23, ForAll, false, Member { satisfying: true }, [Desired(false)], "member satisfying the body"),
    row!(24, ForAll, true, Member { satisfying: false }, [Desired(true)], "member not satisfying the body"),
    row!(25, Exists, false, Member { satisfying: true }, [Desired(false)], "member satisfying the body"),
    row!(26, Exists, true, Member { satisfying: false }, [Desired(true)], "member not satisfying the body"),
];

/// Row for an operator and its desired result; `None` for atoms, which end
/// the tree.
pub fn dispatch_rule(op: OpKind, desired: bool) -> Option<&'static Rule> {
    RULES.iter().find(|r| r.op == op && r.desired == desired)
}

pub fn rule(row: u8) -> &'static Rule {
    &RULES[row as usize - 1]
}
