//! XML export of a critical tree, plus a reader and structural validator for
//! the same format (the schema ships as `schema/critical-tree.xsd`).

use std::fmt::Write;

use roxmltree::{Document, Node};
use thiserror::Error;

use crate::formula::NodeId;
use crate::graph::{ReachabilityGraph, StateId};
use crate::tree::{CriticalTree, SkipReason};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlDocument {
    pub formula: String,
    pub result: bool,
    pub root: XmlNode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlNode {
    pub id: u32,
    pub op: String,
    /// Table row; 0 for atoms, absent for skipped nodes.
    pub rule: Option<u8>,
    pub desired: Option<bool>,
    pub actual: Option<bool>,
    pub skipped: Option<SkipReason>,
    pub states: Vec<XmlState>,
    pub children: Vec<XmlNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlState {
    pub id: u32,
    pub error: bool,
    /// (automaton, local state) in declaration order.
    pub components: Vec<(String, String)>,
    pub signals: Vec<XmlSignal>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlSignal {
    pub name: String,
    pub emitter: String,
    pub listeners: Vec<String>,
}

#[derive(Debug, Error)]
pub enum XmlError {
    #[error("malformed XML: {0}")]
    Parse(#[from] roxmltree::Error),
    #[error("{pos}: {message}")]
    Invalid { pos: String, message: String },
}

/// Per-state payload: every component and every generated signal with its
/// emitter and listeners.
pub fn state_payload(rg: &ReachabilityGraph, s: StateId, error: bool) -> XmlState {
    let net = rg.network();
    let comps = rg.components(s);
    let mut components = Vec::new();
    let mut signals = Vec::new();
    for (a, aut) in net.automata.iter().enumerate() {
        let local = comps[a];
        components.push((aut.name.clone(), aut.local_name(local).to_string()));
        for &x in &aut.emits[local as usize] {
            signals.push(XmlSignal {
                name: net.signal_name(x).to_string(),
                emitter: aut.name.clone(),
                listeners: net.listeners(comps, x).into_iter().map(|l| net.automata[l].name.clone()).collect(),
            });
        }
    }
    XmlState { id: s.0, error, components, signals }
}

pub fn document(t: &CriticalTree, rg: &ReachabilityGraph) -> XmlDocument {
    fn node(t: &CriticalTree, rg: &ReachabilityGraph, id: NodeId) -> XmlNode {
        let e = t.entry(id);
        let op = t.formula.op(id);
        let rule = match (e.rule, e.skipped) {
            (_, Some(_)) => None,
            (Some(r), None) => Some(r),
            (None, None) => Some(0),
        };
        XmlNode {
            id: id.0,
            op: op.lexeme(),
            rule,
            desired: e.desired,
            actual: e.actual,
            skipped: e.skipped,
            states: e
                .states
                .iter()
                .enumerate()
                .map(|(i, &s)| state_payload(rg, s, i + 1 == e.states.len()))
                .collect(),
            children: t.formula.children(id).iter().map(|&k| node(t, rg, k)).collect(),
        }
    }
    XmlDocument { formula: t.formula.to_string(), result: false, root: node(t, rg, t.formula.root()) }
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

pub fn write(doc: &XmlDocument) -> String {
    fn node(n: &XmlNode, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        write!(out, "{pad}<node id=\"{}\" op=\"{}\"", n.id, esc(&n.op)).unwrap();
        if let Some(r) = n.rule {
            write!(out, " rule=\"{r}\"").unwrap();
        }
        if let Some(d) = n.desired {
            write!(out, " desired=\"{d}\"").unwrap();
        }
        if let Some(a) = n.actual {
            write!(out, " actual=\"{a}\"").unwrap();
        }
        if let Some(s) = n.skipped {
            write!(out, " skipped=\"{}\"", s.token()).unwrap();
        }
        if n.states.is_empty() && n.children.is_empty() {
            out.push_str("/>\n");
            return;
        }
        out.push_str(">\n");
        if !n.states.is_empty() {
            writeln!(out, "{pad}  <sequence>").unwrap();
            for s in &n.states {
                let mark = if s.error { "ERROR" } else { "OK" };
                writeln!(out, "{pad}    <state id=\"s{}\" mark=\"{mark}\">", s.id).unwrap();
                for (a, l) in &s.components {
                    writeln!(out, "{pad}      <component automaton=\"{}\" local=\"{}\"/>", esc(a), esc(l)).unwrap();
                }
                for sig in &s.signals {
                    let head = format!("{pad}      <signal name=\"{}\" emitter=\"{}\"", esc(&sig.name), esc(&sig.emitter));
                    if sig.listeners.is_empty() {
                        writeln!(out, "{head}/>").unwrap();
                    } else {
                        writeln!(out, "{head}>").unwrap();
                        for l in &sig.listeners {
                            writeln!(out, "{pad}        <listener automaton=\"{}\"/>", esc(l)).unwrap();
                        }
                        writeln!(out, "{pad}      </signal>").unwrap();
                    }
                }
                writeln!(out, "{pad}    </state>").unwrap();
            }
            writeln!(out, "{pad}  </sequence>").unwrap();
        }
        for k in &n.children {
            node(k, depth + 1, out);
        }
        writeln!(out, "{pad}</node>").unwrap();
    }
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(out, "<critical-tree formula=\"{}\" result=\"{}\">", esc(&doc.formula), doc.result).unwrap();
    node(&doc.root, 1, &mut out);
    out.push_str("</critical-tree>\n");
    out
}

pub fn render_xml(t: &CriticalTree, rg: &ReachabilityGraph) -> String {
    write(&document(t, rg))
}

struct Reader<'d> {
    doc: &'d Document<'d>,
}

impl<'d> Reader<'d> {
    fn fail<T>(&self, n: Node, message: impl Into<String>) -> Result<T, XmlError> {
        let p = self.doc.text_pos_at(n.range().start);
        Err(XmlError::Invalid { pos: format!("{}:{}", p.row, p.col), message: message.into() })
    }

    /// Element children, rejecting non-whitespace text.
    fn elements<'a>(&self, n: Node<'a, 'd>) -> Result<Vec<Node<'a, 'd>>, XmlError> {
        let mut out = Vec::new();
        for c in n.children() {
            if c.is_element() {
                out.push(c);
            } else if c.is_text() && !c.text().unwrap_or("").trim().is_empty() {
                return self.fail(c, format!("unexpected text inside <{}>", n.tag_name().name()));
            }
        }
        Ok(out)
    }

    fn expect_tag(&self, n: Node, tag: &str) -> Result<(), XmlError> {
        if n.tag_name().name() != tag || n.tag_name().namespace().is_some() {
            return self.fail(n, format!("expected <{tag}>, found <{}>", n.tag_name().name()));
        }
        Ok(())
    }

    fn attrs(&self, n: Node, allowed: &[&str]) -> Result<(), XmlError> {
        for a in n.attributes() {
            if !allowed.contains(&a.name()) {
                return self.fail(n, format!("unexpected attribute `{}` on <{}>", a.name(), n.tag_name().name()));
            }
        }
        Ok(())
    }

    fn req<'a>(&self, n: Node<'a, 'd>, name: &str) -> Result<&'a str, XmlError> {
        match n.attribute(name) {
            Some(v) => Ok(v),
            None => self.fail(n, format!("<{}> lacks `{name}`", n.tag_name().name())),
        }
    }

    fn boolean(&self, n: Node, name: &str) -> Result<Option<bool>, XmlError> {
        match n.attribute(name) {
            None => Ok(None),
            Some("true") => Ok(Some(true)),
            Some("false") => Ok(Some(false)),
            Some(v) => self.fail(n, format!("`{name}` must be true or false, not `{v}`")),
        }
    }

    fn name(&self, n: Node, attr: &str) -> Result<String, XmlError> {
        let v = self.req(n, attr)?;
        let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return self.fail(n, format!("`{attr}` must be an identifier, not `{v}`"));
        }
        Ok(v.to_string())
    }

    fn node(&self, n: Node) -> Result<XmlNode, XmlError> {
        self.expect_tag(n, "node")?;
        self.attrs(n, &["id", "op", "rule", "desired", "actual", "skipped"])?;
        let id = match self.req(n, "id")?.parse::<u32>() {
            Ok(v) if v >= 1 => v,
            _ => return self.fail(n, "`id` must be a positive integer"),
        };
        let op = self.req(n, "op")?.to_string();
        let rule = match n.attribute("rule") {
            None => None,
            Some(r) => match r.parse::<u8>() {
                Ok(v) if v <= 26 => Some(v),
                _ => return self.fail(n, format!("`rule` must be 0..=26, not `{r}`")),
            },
        };
        let skipped = match n.attribute("skipped") {
            None => None,
            Some(s) => match SkipReason::from_token(s) {
                Some(r) => Some(r),
                None => return self.fail(n, format!("unknown skip reason `{s}`")),
            },
        };
        let mut out = XmlNode {
            id,
            op,
            rule,
            desired: self.boolean(n, "desired")?,
            actual: self.boolean(n, "actual")?,
            skipped,
            states: Vec::new(),
            children: Vec::new(),
        };
        let kids = self.elements(n)?;
        let mut rest = &kids[..];
        if let Some(first) = rest.first() {
            if first.tag_name().name() == "sequence" {
                out.states = self.sequence(*first)?;
                rest = &rest[1..];
            }
        }
        match (out.skipped.is_some(), out.states.is_empty()) {
            (true, false) => return self.fail(n, "a skipped node has no <sequence>"),
            (false, true) => return self.fail(n, "a constructed node needs a <sequence>"),
            _ => {}
        }
        if out.skipped.is_none() && (out.rule.is_none() || out.desired.is_none() || out.actual.is_none()) {
            return self.fail(n, "a constructed node carries `rule`, `desired` and `actual`");
        }
        for k in rest {
            out.children.push(self.node(*k)?);
        }
        Ok(out)
    }

    fn sequence(&self, n: Node) -> Result<Vec<XmlState>, XmlError> {
        self.attrs(n, &[])?;
        let states = self.elements(n)?;
        if states.is_empty() {
            return self.fail(n, "<sequence> needs at least one <state>");
        }
        let last = states.len() - 1;
        states
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                let st = self.state(s)?;
                if st.error != (i == last) {
                    return self.fail(s, "only the last state of a sequence is marked ERROR");
                }
                Ok(st)
            })
            .collect()
    }

    fn state(&self, n: Node) -> Result<XmlState, XmlError> {
        self.expect_tag(n, "state")?;
        self.attrs(n, &["id", "mark"])?;
        let raw = self.req(n, "id")?;
        let id = match raw.strip_prefix('s').and_then(|d| d.parse::<u32>().ok()) {
            Some(v) => v,
            None => return self.fail(n, format!("state id must look like s12, not `{raw}`")),
        };
        let error = match self.req(n, "mark")? {
            "OK" => false,
            "ERROR" => true,
            m => return self.fail(n, format!("mark must be OK or ERROR, not `{m}`")),
        };
        let mut st = XmlState { id, error, components: Vec::new(), signals: Vec::new() };
        for c in self.elements(n)? {
            match c.tag_name().name() {
                "component" if st.signals.is_empty() => {
                    self.attrs(c, &["automaton", "local"])?;
                    if !self.elements(c)?.is_empty() {
                        return self.fail(c, "<component> is empty");
                    }
                    st.components.push((self.name(c, "automaton")?, self.name(c, "local")?));
                }
                "signal" => {
                    self.attrs(c, &["name", "emitter"])?;
                    let mut sig = XmlSignal { name: self.name(c, "name")?, emitter: self.name(c, "emitter")?, listeners: Vec::new() };
                    for l in self.elements(c)? {
                        self.expect_tag(l, "listener")?;
                        self.attrs(l, &["automaton"])?;
                        if !self.elements(l)?.is_empty() {
                            return self.fail(l, "<listener> is empty");
                        }
                        sig.listeners.push(self.name(l, "automaton")?);
                    }
                    st.signals.push(sig);
                }
                other => return self.fail(c, format!("unexpected <{other}> in <state>")),
            }
        }
        if st.components.is_empty() {
            return self.fail(n, "<state> needs at least one <component>");
        }
        Ok(st)
    }
}

/// Parses and validates a critical-tree document.
pub fn parse(text: &str) -> Result<XmlDocument, XmlError> {
    let doc = Document::parse(text)?;
    let r = Reader { doc: &doc };
    let root = doc.root_element();
    r.expect_tag(root, "critical-tree")?;
    r.attrs(root, &["formula", "result"])?;
    let formula = r.req(root, "formula")?.to_string();
    let result = match r.boolean(root, "result")? {
        Some(v) => v,
        None => return r.fail(root, "<critical-tree> lacks `result`"),
    };
    let kids = r.elements(root)?;
    if kids.len() != 1 {
        return r.fail(root, "<critical-tree> holds exactly one root <node>");
    }
    Ok(XmlDocument { formula, result, root: r.node(kids[0])? })
}

/// Checks a document against the critical-tree schema.
pub fn validate(text: &str) -> Result<(), XmlError> {
    parse(text).map(|_| ())
}

impl XmlDocument {
    /// Depth-first search for the node with the given formula id.
    pub fn find(&self, id: u32) -> Option<&XmlNode> {
        fn go(n: &XmlNode, id: u32) -> Option<&XmlNode> {
            if n.id == id {
                return Some(n);
            }
            n.children.iter().find_map(|k| go(k, id))
        }
        go(&self.root, id)
    }

    pub fn nodes(&self) -> Vec<&XmlNode> {
        fn go<'a>(n: &'a XmlNode, out: &mut Vec<&'a XmlNode>) {
            out.push(n);
            for k in &n.children {
                go(k, out);
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut out);
        out
    }
}
