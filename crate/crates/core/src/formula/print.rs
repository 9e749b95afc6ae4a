//! Pretty-printing with the minimum parentheses that reparse to the same tree.

use std::fmt::{self, Write};

use super::{Formula, NodeId, Op};

// prefix (quantifier, at-state) < => <=> < U < + < * < unary < atom
fn level(op: &Op) -> u8 {
    match op {
        Op::ForAll { .. } | Op::Exists { .. } | Op::AtState(_) => 0,
        Op::Implies | Op::Iff => 1,
        Op::WeakUntil => 2,
        Op::Or => 3,
        Op::And => 4,
        Op::Not | Op::Next | Op::NextIn(_) | Op::Finally | Op::Globally => 5,
        _ => 6,
    }
}

impl Formula {
    fn write_node(&self, out: &mut impl Write, id: NodeId, min: u8) -> fmt::Result {
        let node = self.node(id);
        let lvl = level(&node.op);
        let paren = lvl < min;
        if paren {
            out.write_char('(')?;
        }
        let kids = &node.children;
        match &node.op {
            Op::Not => {
                out.write_char('!')?;
                self.write_node(out, kids[0], 5)?;
            }
            Op::Next | Op::NextIn(_) | Op::Finally | Op::Globally => {
                write!(out, "{} ", node.op.lexeme())?;
                self.write_node(out, kids[0], 5)?;
            }
            Op::And | Op::Or => {
                self.write_node(out, kids[0], lvl)?;
                write!(out, " {} ", node.op.lexeme())?;
                self.write_node(out, kids[1], lvl + 1)?;
            }
            Op::Implies | Op::Iff | Op::WeakUntil => {
                self.write_node(out, kids[0], lvl + 1)?;
                write!(out, " {} ", node.op.lexeme())?;
                self.write_node(out, kids[1], lvl)?;
            }
            Op::ForAll { .. } | Op::Exists { .. } | Op::AtState(_) => {
                write!(out, "{} ", node.op.heading())?;
                self.write_node(out, kids[0], 0)?;
            }
            leaf => out.write_str(&leaf.lexeme())?,
        }
        if paren {
            out.write_char(')')?;
        }
        Ok(())
    }

    /// Text of the subformula rooted at `id`.
    pub fn subformula_text(&self, id: NodeId) -> String {
        let mut s = String::new();
        self.write_node(&mut s, id, 0).expect("writing to a String");
        s
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_node(f, self.root(), 0)
    }
}
