use thiserror::Error;

use super::{Designator, Formula, Node, NodeId, Op, StateRef};
use crate::lexer::{tokenize, Cursor, Pos, Tok};
use crate::model::Network;

const KEYWORDS: &[&str] = &["A", "E", "in", "N", "F", "G", "U", "true", "false"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: unbound state variable `{name}`")]
    UnboundVariable { pos: Pos, name: String },
    #[error("{pos}: unknown automaton `{name}`")]
    UnknownAutomaton { pos: Pos, name: String },
    #[error("{pos}: unknown local state `{local}` in automaton `{automaton}`")]
    UnknownLocalState { pos: Pos, automaton: String, local: String },
    #[error("{pos}: unknown signal `{name}`")]
    UnknownSignal { pos: Pos, name: String },
}

/// Parse tree before pre-order numbering; variables are still names.
enum Expr {
    Unary(Op, Box<Expr>),
    Binary(Op, Box<Expr>, Box<Expr>),
    Quant { exists: bool, var: String, set: Vec<Designator>, body: Box<Expr> },
    AtVar(String, Box<Expr>),
    AtDesignator(Designator, Box<Expr>),
    Var(String),
    Leaf(Op),
}

struct Parser<'n> {
    cur: Cursor,
    net: Option<&'n Network>,
    scope: Vec<String>,
}

fn syntax(pos: Pos, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax { pos, message: message.into() }
}

impl<'n> Parser<'n> {
    fn expect(&mut self, tok: Tok) -> Result<(), FormulaError> {
        let t = self.cur.next();
        if t.tok == tok {
            Ok(())
        } else {
            Err(syntax(t.pos, format!("expected {tok}, found {}", t.tok)))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), FormulaError> {
        let t = self.cur.next();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.pos)),
            other => Err(syntax(t.pos, format!("expected identifier, found {other}"))),
        }
    }

    fn nth_is(&self, n: usize, tok: &Tok) -> bool {
        &self.cur.peek_nth(n).tok == tok
    }

    fn nth_ident(&self, n: usize) -> Option<&str> {
        match &self.cur.peek_nth(n).tok {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }

    fn bound(&self, name: &str) -> bool {
        self.scope.iter().any(|v| v == name)
    }

    fn designator(&mut self) -> Result<Designator, FormulaError> {
        let (automaton, apos) = self.ident()?;
        self.expect(Tok::Dot)?;
        let (local, lpos) = self.ident()?;
        if let Some(net) = self.net {
            let Some(i) = net.automaton_index(&automaton) else {
                return Err(FormulaError::UnknownAutomaton { pos: apos, name: automaton });
            };
            if net.automata[i].local_index(&local).is_none() {
                return Err(FormulaError::UnknownLocalState { pos: lpos, automaton, local });
            }
        }
        Ok(Designator { automaton, local })
    }

    // formula := until (("=>" | "<=>") formula)?
    fn formula(&mut self) -> Result<Expr, FormulaError> {
        let lhs = self.until()?;
        let op = match self.cur.peek().tok {
            Tok::Implies => Op::Implies,
            Tok::Iff => Op::Iff,
            _ => return Ok(lhs),
        };
        self.cur.next();
        let rhs = self.formula()?;
        Ok(Expr::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    // until := or ("U" until)?
    fn until(&mut self) -> Result<Expr, FormulaError> {
        let lhs = self.or()?;
        if self.cur.peek_ident() == Some("U") {
            self.cur.next();
            let rhs = self.until()?;
            return Ok(Expr::Binary(Op::WeakUntil, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, FormulaError> {
        let mut lhs = self.and()?;
        while self.cur.eat(&Tok::Plus) {
            let rhs = self.and()?;
            lhs = Expr::Binary(Op::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, FormulaError> {
        let mut lhs = self.unary()?;
        while self.cur.eat(&Tok::Star) {
            let rhs = self.unary()?;
            lhs = Expr::Binary(Op::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, FormulaError> {
        let t = self.cur.peek().clone();
        if t.tok == Tok::Bang {
            self.cur.next();
            return Ok(Expr::Unary(Op::Not, Box::new(self.unary()?)));
        }
        let Tok::Ident(name) = &t.tok else {
            return self.primary();
        };
        let followed_by_dot = self.nth_is(1, &Tok::Dot);
        let followed_by_colon = self.nth_is(1, &Tok::Colon);

        if (name == "A" || name == "E") && self.nth_ident(1).is_some() && self.nth_ident(2) == Some("in") {
            return self.quantifier(name == "E");
        }
        if followed_by_colon {
            self.cur.next();
            self.cur.next();
            if !self.bound(name) {
                return Err(FormulaError::UnboundVariable { pos: t.pos, name: name.clone() });
            }
            let body = self.formula()?;
            return Ok(Expr::AtVar(name.clone(), Box::new(body)));
        }
        if followed_by_dot && self.nth_is(3, &Tok::Colon) {
            let d = self.designator()?;
            self.expect(Tok::Colon)?;
            let body = self.formula()?;
            return Ok(Expr::AtDesignator(d, Box::new(body)));
        }
        if !followed_by_dot {
            let op = match name.as_str() {
                "N" if self.nth_is(1, &Tok::LBracket) => {
                    self.cur.next();
                    self.cur.next();
                    let (aut, apos) = self.ident()?;
                    if let Some(net) = self.net {
                        if net.automaton_index(&aut).is_none() {
                            return Err(FormulaError::UnknownAutomaton { pos: apos, name: aut });
                        }
                    }
                    self.expect(Tok::RBracket)?;
                    return Ok(Expr::Unary(Op::NextIn(aut), Box::new(self.unary()?)));
                }
                "N" => Some(Op::Next),
                "F" => Some(Op::Finally),
                "G" => Some(Op::Globally),
                _ => None,
            };
            if let Some(op) = op {
                self.cur.next();
                return Ok(Expr::Unary(op, Box::new(self.unary()?)));
            }
        }
        self.primary()
    }

    fn quantifier(&mut self, exists: bool) -> Result<Expr, FormulaError> {
        self.cur.next();
        let (var, vpos) = self.ident()?;
        if KEYWORDS.contains(&var.as_str()) {
            return Err(syntax(vpos, format!("`{var}` is a keyword and cannot name a state variable")));
        }
        self.cur.next(); // `in`
        self.expect(Tok::LBrace)?;
        let mut set = vec![self.designator()?];
        while self.cur.eat(&Tok::Comma) {
            set.push(self.designator()?);
        }
        self.expect(Tok::RBrace)?;
        self.expect(Tok::Semi)?;
        self.scope.push(var.clone());
        let body = self.formula();
        self.scope.pop();
        Ok(Expr::Quant { exists, var, set, body: Box::new(body?) })
    }

    fn primary(&mut self) -> Result<Expr, FormulaError> {
        let t = self.cur.next();
        match t.tok {
            Tok::LParen => {
                let e = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) if s == "true" => Ok(Expr::Leaf(Op::Const(true))),
            Tok::Ident(s) if s == "false" => Ok(Expr::Leaf(Op::Const(false))),
            Tok::Ident(s) if s == "in" => {
                let (name, pos) = match &self.cur.peek().tok {
                    Tok::Ident(n) => (n.clone(), self.cur.peek().pos),
                    other => return Err(syntax(self.cur.peek().pos, format!("expected state after `in`, found {other}"))),
                };
                if self.nth_is(1, &Tok::Dot) {
                    return Ok(Expr::Leaf(Op::AtomIn(self.designator()?)));
                }
                self.cur.next();
                if self.bound(&name) {
                    Ok(Expr::Var(name))
                } else {
                    Err(FormulaError::UnboundVariable { pos, name })
                }
            }
            Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) && !self.nth_is(0, &Tok::Dot) => {
                Err(syntax(t.pos, format!("unexpected keyword `{s}`")))
            }
            Tok::Ident(s) => {
                if self.bound(&s) {
                    return Ok(Expr::Var(s));
                }
                if self.cur.peek().tok == Tok::Dot {
                    self.cur.next();
                    let (local, lpos) = self.ident()?;
                    if let Some(net) = self.net {
                        let Some(i) = net.automaton_index(&s) else {
                            return Err(FormulaError::UnknownAutomaton { pos: t.pos, name: s });
                        };
                        if net.automata[i].local_index(&local).is_none() {
                            return Err(FormulaError::UnknownLocalState { pos: lpos, automaton: s, local });
                        }
                    }
                    return Ok(Expr::Leaf(Op::AtomIn(Designator { automaton: s, local })));
                }
                if let Some(net) = self.net {
                    if net.signal_id(&s).is_none() {
                        return Err(FormulaError::UnknownSignal { pos: t.pos, name: s });
                    }
                }
                Ok(Expr::Leaf(Op::AtomSignal(s)))
            }
            other => Err(syntax(t.pos, format!("expected formula, found {other}"))),
        }
    }
}

struct Flattener {
    nodes: Vec<Node>,
    binders: Vec<(String, NodeId)>,
}

impl Flattener {
    fn resolve(&self, name: &str) -> NodeId {
        self.binders
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, id)| *id)
            .expect("variables are checked against scope while parsing")
    }

    fn push(&mut self, e: Expr, parent: Option<NodeId>, depth: usize) -> NodeId {
        let id = NodeId(self.nodes.len() as u32 + 1);
        let (op, kids, binds): (Op, Vec<Expr>, Option<String>) = match e {
            Expr::Unary(op, a) => (op, vec![*a], None),
            Expr::Binary(op, a, b) => (op, vec![*a, *b], None),
            Expr::Quant { exists, var, set, body } => {
                let op = if exists {
                    Op::Exists { var: var.clone(), set }
                } else {
                    Op::ForAll { var: var.clone(), set }
                };
                (op, vec![*body], Some(var))
            }
            Expr::AtVar(name, body) => {
                let binder = self.resolve(&name);
                (Op::AtState(StateRef::Var { name, binder }), vec![*body], None)
            }
            Expr::AtDesignator(d, body) => (Op::AtState(StateRef::Designator(d)), vec![*body], None),
            Expr::Var(name) => {
                let binder = self.resolve(&name);
                (Op::AtomStateVar { name, binder }, vec![], None)
            }
            Expr::Leaf(op) => (op, vec![], None),
        };
        self.nodes.push(Node { id, op, children: Vec::new(), parent, depth, last: id });
        if let Some(var) = &binds {
            self.binders.push((var.clone(), id));
        }
        let mut children = Vec::with_capacity(kids.len());
        for k in kids {
            children.push(self.push(k, Some(id), depth + 1));
        }
        if binds.is_some() {
            self.binders.pop();
        }
        let last = NodeId(self.nodes.len() as u32);
        let node = &mut self.nodes[id.0 as usize - 1];
        node.children = children;
        node.last = last;
        id
    }
}

/// Parses a formula. When a network is supplied, designators, signals and
/// automaton names are checked against it.
pub fn parse_formula(text: &str, net: Option<&Network>) -> Result<Formula, FormulaError> {
    let tokens =
        tokenize(text).map_err(|e| syntax(e.pos, format!("unexpected character `{}`", e.found)))?;
    let mut p = Parser { cur: Cursor::new(tokens), net, scope: Vec::new() };
    let expr = p.formula()?;
    let t = p.cur.peek();
    if t.tok != Tok::Eof {
        return Err(syntax(t.pos, format!("unexpected {} after formula", t.tok)));
    }
    let mut flat = Flattener { nodes: Vec::new(), binders: Vec::new() };
    flat.push(expr, None, 0);
    Ok(Formula::from_nodes(flat.nodes))
}
