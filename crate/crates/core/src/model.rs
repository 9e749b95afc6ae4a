//! Networks of communicating automata.
//!
//! Each automaton is a Moore-style emitter: every local state generates a
//! fixed set of signals, and arcs are guarded by Boolean expressions over the
//! signals generated in the current global state.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::lexer::{tokenize, Cursor, Pos, Tok};

pub type SignalId = usize;

/// Index of a local state inside its automaton.
pub type LocalId = u16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Guard {
    True,
    False,
    Signal(SignalId),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

impl Guard {
    pub fn holds(&self, generated: &SignalSet) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Signal(x) => generated.contains(*x),
            Guard::Not(g) => !g.holds(generated),
            Guard::And(a, b) => a.holds(generated) && b.holds(generated),
            Guard::Or(a, b) => a.holds(generated) || b.holds(generated),
        }
    }

    /// Every signal atom occurring in the guard, under any Boolean context.
    pub fn mentions(&self, out: &mut SignalSet) {
        match self {
            Guard::True | Guard::False => {}
            Guard::Signal(x) => out.insert(*x),
            Guard::Not(g) => g.mentions(out),
            Guard::And(a, b) | Guard::Or(a, b) => {
                a.mentions(out);
                b.mentions(out);
            }
        }
    }
}

/// Dense bit set over the network's signal ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SignalSet {
    words: Vec<u64>,
}

impl SignalSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: SignalId) {
        let (w, b) = (x / 64, x % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn contains(&self, x: SignalId) -> bool {
        self.words.get(x / 64).is_some_and(|w| w & (1 << (x % 64)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &SignalSet) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Ascending signal ids.
    pub fn iter(&self) -> impl Iterator<Item = SignalId> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits & (1 << b) != 0).map(move |b| w * 64 + b)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub from: LocalId,
    pub to: LocalId,
    pub guard: Guard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    pub name: String,
    pub local_states: Vec<String>,
    pub initial: LocalId,
    /// Signals emitted per local state, in declaration order.
    pub emits: Vec<Vec<SignalId>>,
    pub arcs: Vec<Arc>,
    /// Signals mentioned by guards of arcs leaving each local state.
    mentioned: Vec<SignalSet>,
}

impl Automaton {
    pub fn local_index(&self, name: &str) -> Option<LocalId> {
        self.local_states.iter().position(|s| s == name).map(|i| i as LocalId)
    }

    pub fn local_name(&self, local: LocalId) -> &str {
        &self.local_states[local as usize]
    }

    pub fn arcs_from(&self, local: LocalId) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(move |a| a.from == local)
    }

    pub fn listens_to(&self, local: LocalId, signal: SignalId) -> bool {
        self.mentioned[local as usize].contains(signal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    pub automata: Vec<Automaton>,
    signals: Vec<String>,
    signal_index: HashMap<String, SignalId>,
    automaton_index: HashMap<String, usize>,
}

impl Network {
    pub fn signals(&self) -> &[String] {
        &self.signals
    }

    pub fn signal_id(&self, name: &str) -> Option<SignalId> {
        self.signal_index.get(name).copied()
    }

    pub fn signal_name(&self, id: SignalId) -> &str {
        &self.signals[id]
    }

    pub fn automaton_index(&self, name: &str) -> Option<usize> {
        self.automaton_index.get(name).copied()
    }

    pub fn initial_components(&self) -> Vec<LocalId> {
        self.automata.iter().map(|a| a.initial).collect()
    }

    /// Union of the signals emitted by each component's local state.
    pub fn generated_signals(&self, components: &[LocalId]) -> SignalSet {
        let mut out = SignalSet::new();
        for (aut, &local) in self.automata.iter().zip(components) {
            for &x in &aut.emits[local as usize] {
                out.insert(x);
            }
        }
        out
    }

    /// Automata whose current local state has an outgoing arc whose guard
    /// mentions `signal`, in declaration order.
    pub fn listeners(&self, components: &[LocalId], signal: SignalId) -> Vec<usize> {
        self.automata
            .iter()
            .zip(components)
            .enumerate()
            .filter(|(_, (aut, &local))| aut.listens_to(local, signal))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn format_components(&self, components: &[LocalId]) -> String {
        let parts: Vec<_> = self
            .automata
            .iter()
            .zip(components)
            .map(|(a, &l)| a.local_name(l))
            .collect();
        format!("({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("no automata declared")]
    NoAutomata,
    #[error("{pos}: duplicate {kind} `{name}`")]
    Duplicate { pos: Pos, kind: &'static str, name: String },
    #[error("{pos}: unknown local state `{name}` in automaton `{automaton}`")]
    UnknownLocalState { pos: Pos, automaton: String, name: String },
    #[error("{pos}: undeclared signal `{name}` (no automaton emits it)")]
    UndeclaredSignal { pos: Pos, name: String },
    #[error("{pos}: automaton `{automaton}` has no initial state")]
    MissingInitial { pos: Pos, automaton: String },
    #[error("{pos}: automaton `{automaton}` declares no local states")]
    NoLocalStates { pos: Pos, automaton: String },
    #[error("automaton `{automaton}` has more than {max} local states")]
    TooManyStates { automaton: String, max: usize },
}

enum RawGuard {
    True,
    False,
    Signal(String, Pos),
    Not(Box<RawGuard>),
    And(Box<RawGuard>, Box<RawGuard>),
    Or(Box<RawGuard>, Box<RawGuard>),
}

struct RawArc {
    from: (String, Pos),
    to: (String, Pos),
    guard: RawGuard,
}

struct RawAutomaton {
    name: String,
    pos: Pos,
    states: Vec<(String, Vec<String>)>,
    initial: Option<(String, Pos)>,
    arcs: Vec<RawArc>,
}

fn syntax(pos: Pos, message: impl Into<String>) -> ModelError {
    ModelError::Syntax { pos, message: message.into() }
}

fn expect(cur: &mut Cursor, tok: Tok) -> Result<(), ModelError> {
    let t = cur.next();
    if t.tok == tok {
        Ok(())
    } else {
        Err(syntax(t.pos, format!("expected {tok}, found {}", t.tok)))
    }
}

fn ident(cur: &mut Cursor) -> Result<(String, Pos), ModelError> {
    let t = cur.next();
    match t.tok {
        Tok::Ident(s) => Ok((s, t.pos)),
        other => Err(syntax(t.pos, format!("expected identifier, found {other}"))),
    }
}

fn keyword(cur: &mut Cursor, kw: &str) -> Result<(), ModelError> {
    let (s, pos) = ident(cur)?;
    if s == kw {
        Ok(())
    } else {
        Err(syntax(pos, format!("expected `{kw}`, found `{s}`")))
    }
}

fn guard_or(cur: &mut Cursor) -> Result<RawGuard, ModelError> {
    let mut lhs = guard_and(cur)?;
    while cur.eat(&Tok::Plus) {
        lhs = RawGuard::Or(Box::new(lhs), Box::new(guard_and(cur)?));
    }
    Ok(lhs)
}

fn guard_and(cur: &mut Cursor) -> Result<RawGuard, ModelError> {
    let mut lhs = guard_unary(cur)?;
    while cur.eat(&Tok::Star) {
        lhs = RawGuard::And(Box::new(lhs), Box::new(guard_unary(cur)?));
    }
    Ok(lhs)
}

fn guard_unary(cur: &mut Cursor) -> Result<RawGuard, ModelError> {
    let t = cur.next();
    match t.tok {
        Tok::Bang => Ok(RawGuard::Not(Box::new(guard_unary(cur)?))),
        Tok::LParen => {
            let g = guard_or(cur)?;
            expect(cur, Tok::RParen)?;
            Ok(g)
        }
        Tok::Ident(s) if s == "true" => Ok(RawGuard::True),
        Tok::Ident(s) if s == "false" => Ok(RawGuard::False),
        Tok::Ident(s) => Ok(RawGuard::Signal(s, t.pos)),
        other => Err(syntax(t.pos, format!("expected guard, found {other}"))),
    }
}

fn parse_automaton(cur: &mut Cursor) -> Result<RawAutomaton, ModelError> {
    let (name, pos) = ident(cur)?;
    expect(cur, Tok::LBrace)?;
    let mut raw = RawAutomaton { name, pos, states: Vec::new(), initial: None, arcs: Vec::new() };
    loop {
        let t = cur.next();
        match t.tok {
            Tok::RBrace => break,
            Tok::Ident(kw) if kw == "state" => {
                let (state, spos) = ident(cur)?;
                if raw.states.iter().any(|(s, _)| *s == state) {
                    return Err(ModelError::Duplicate { pos: spos, kind: "local state", name: state });
                }
                let mut emits = Vec::new();
                if cur.peek_ident() == Some("emits") {
                    cur.next();
                    loop {
                        let (sig, _) = ident(cur)?;
                        if !emits.contains(&sig) {
                            emits.push(sig);
                        }
                        if !cur.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                expect(cur, Tok::Semi)?;
                raw.states.push((state, emits));
            }
            Tok::Ident(kw) if kw == "init" => {
                let (state, spos) = ident(cur)?;
                if raw.initial.is_some() {
                    return Err(ModelError::Duplicate { pos: t.pos, kind: "init declaration", name: state });
                }
                expect(cur, Tok::Semi)?;
                raw.initial = Some((state, spos));
            }
            Tok::Ident(kw) if kw == "arc" => {
                let from = ident(cur)?;
                expect(cur, Tok::Arrow)?;
                let to = ident(cur)?;
                keyword(cur, "when")?;
                let guard = guard_or(cur)?;
                expect(cur, Tok::Semi)?;
                raw.arcs.push(RawArc { from, to, guard });
            }
            other => {
                return Err(syntax(t.pos, format!("expected `state`, `init`, `arc` or `}}`, found {other}")))
            }
        }
    }
    Ok(raw)
}

fn resolve_guard(g: RawGuard, index: &HashMap<String, SignalId>) -> Result<Guard, ModelError> {
    Ok(match g {
        RawGuard::True => Guard::True,
        RawGuard::False => Guard::False,
        RawGuard::Signal(name, pos) => match index.get(&name) {
            Some(&id) => Guard::Signal(id),
            None => return Err(ModelError::UndeclaredSignal { pos, name }),
        },
        RawGuard::Not(g) => Guard::Not(Box::new(resolve_guard(*g, index)?)),
        RawGuard::And(a, b) => Guard::And(
            Box::new(resolve_guard(*a, index)?),
            Box::new(resolve_guard(*b, index)?),
        ),
        RawGuard::Or(a, b) => Guard::Or(
            Box::new(resolve_guard(*a, index)?),
            Box::new(resolve_guard(*b, index)?),
        ),
    })
}

/// Parses a model file. Signals are declared implicitly by `emits` clauses;
/// a guard may only mention signals that some automaton emits.
pub fn parse_model(text: &str) -> Result<Network, ModelError> {
    let tokens = tokenize(text).map_err(|e| syntax(e.pos, format!("unexpected character `{}`", e.found)))?;
    let mut cur = Cursor::new(tokens);
    let mut raws: Vec<RawAutomaton> = Vec::new();

    while cur.peek().tok != Tok::Eof {
        keyword(&mut cur, "automaton")?;
        let raw = parse_automaton(&mut cur)?;
        if raws.iter().any(|r| r.name == raw.name) {
            return Err(ModelError::Duplicate { pos: raw.pos, kind: "automaton", name: raw.name });
        }
        raws.push(raw);
    }
    if raws.is_empty() {
        return Err(ModelError::NoAutomata);
    }

    let mut signals: Vec<String> = Vec::new();
    let mut signal_index: HashMap<String, SignalId> = HashMap::new();
    for raw in &raws {
        for (_, emits) in &raw.states {
            for sig in emits {
                if !signal_index.contains_key(sig) {
                    signal_index.insert(sig.clone(), signals.len());
                    signals.push(sig.clone());
                }
            }
        }
    }

    let mut automata = Vec::with_capacity(raws.len());
    let mut automaton_index = HashMap::new();
    for raw in raws {
        if raw.states.is_empty() {
            return Err(ModelError::NoLocalStates { pos: raw.pos, automaton: raw.name });
        }
        if raw.states.len() > LocalId::MAX as usize {
            return Err(ModelError::TooManyStates { automaton: raw.name, max: LocalId::MAX as usize });
        }
        let local_states: Vec<String> = raw.states.iter().map(|(s, _)| s.clone()).collect();
        let lookup = |(name, pos): (String, Pos)| -> Result<LocalId, ModelError> {
            local_states
                .iter()
                .position(|s| *s == name)
                .map(|i| i as LocalId)
                .ok_or_else(|| ModelError::UnknownLocalState { pos, automaton: raw.name.clone(), name })
        };
        let initial = match raw.initial {
            Some(init) => lookup(init)?,
            None => return Err(ModelError::MissingInitial { pos: raw.pos, automaton: raw.name }),
        };
        let mut arcs = Vec::with_capacity(raw.arcs.len());
        for arc in raw.arcs {
            arcs.push(Arc {
                from: lookup(arc.from)?,
                to: lookup(arc.to)?,
                guard: resolve_guard(arc.guard, &signal_index)?,
            });
        }
        let emits = raw
            .states
            .iter()
            .map(|(_, e)| e.iter().map(|s| signal_index[s]).collect())
            .collect();
        let mut mentioned = vec![SignalSet::new(); local_states.len()];
        for arc in &arcs {
            arc.guard.mentions(&mut mentioned[arc.from as usize]);
        }
        automaton_index.insert(raw.name.clone(), automata.len());
        automata.push(Automaton { name: raw.name, local_states, initial, emits, arcs, mentioned });
    }

    Ok(Network { automata, signals, signal_index, automaton_index })
}

impl fmt::Display for Network {
    /// Writes the network back in model-file syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for aut in &self.automata {
            writeln!(f, "automaton {} {{", aut.name)?;
            for (i, name) in aut.local_states.iter().enumerate() {
                write!(f, "  state {name}")?;
                if !aut.emits[i].is_empty() {
                    let names: Vec<_> = aut.emits[i].iter().map(|&x| self.signal_name(x)).collect();
                    write!(f, " emits {}", names.join(", "))?;
                }
                writeln!(f, ";")?;
            }
            writeln!(f, "  init {};", aut.local_name(aut.initial))?;
            for arc in &aut.arcs {
                write!(f, "  arc {} -> {} when ", aut.local_name(arc.from), aut.local_name(arc.to))?;
                write_guard(f, &arc.guard, self, 0)?;
                writeln!(f, ";")?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}

fn write_guard(f: &mut fmt::Formatter<'_>, g: &Guard, net: &Network, min_level: u8) -> fmt::Result {
    let level = match g {
        Guard::Or(..) => 0,
        Guard::And(..) => 1,
        _ => 2,
    };
    if level < min_level {
        f.write_str("(")?;
    }
    match g {
        Guard::True => f.write_str("true")?,
        Guard::False => f.write_str("false")?,
        Guard::Signal(x) => f.write_str(net.signal_name(*x))?,
        Guard::Not(inner) => {
            f.write_str("!")?;
            write_guard(f, inner, net, 2)?;
        }
        Guard::And(a, b) => {
            write_guard(f, a, net, 1)?;
            f.write_str(" * ")?;
            write_guard(f, b, net, 2)?;
        }
        Guard::Or(a, b) => {
            write_guard(f, a, net, 0)?;
            f.write_str(" + ")?;
            write_guard(f, b, net, 1)?;
        }
    }
    if level < min_level {
        f.write_str(")")?;
    }
    Ok(())
}
