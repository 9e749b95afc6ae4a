//! A small XML Schema interpreter covering the constructs used by the
//! shipped schema: global and inline element declarations, named and inline
//! complex types with a `sequence` of child elements and attributes, and
//! simple types restricted by enumeration, pattern and maxInclusive.

use std::collections::HashMap;

use regex::Regex;
use roxmltree::{Document, Node};

const XS: &str = "http://www.w3.org/2001/XMLSchema";

#[derive(Debug, Clone)]
enum Simple {
    Builtin(String),
    Restricted { base: String, enums: Vec<String>, pattern: Option<String>, max: Option<u64> },
}

#[derive(Debug, Clone)]
struct Attr {
    name: String,
    ty: Simple,
    required: bool,
}

#[derive(Debug, Clone)]
struct Particle {
    name: String,
    ty: TypeRef,
    min: usize,
    max: Option<usize>,
}

#[derive(Debug, Clone)]
enum TypeRef {
    Named(String),
    Inline(Box<Complex>),
}

#[derive(Debug, Clone, Default)]
struct Complex {
    children: Vec<Particle>,
    attrs: Vec<Attr>,
}

pub struct Schema {
    roots: Vec<Particle>,
    complex: HashMap<String, Complex>,
}

fn is_xs(n: &Node, name: &str) -> bool {
    n.is_element() && n.tag_name().namespace() == Some(XS) && n.tag_name().name() == name
}

fn xs_children<'a, 'i>(n: Node<'a, 'i>, name: &'static str) -> impl Iterator<Item = Node<'a, 'i>> {
    n.children().filter(move |c| is_xs(c, name))
}

fn strip(ty: &str) -> String {
    ty.rsplit(':').next().unwrap().to_string()
}

fn simple(n: Node, simple_types: &HashMap<String, Simple>) -> Simple {
    let r = xs_children(n, "restriction").next().expect("restriction");
    let base = strip(r.attribute("base").unwrap());
    let enums = xs_children(r, "enumeration").map(|e| e.attribute("value").unwrap().to_string()).collect();
    let pattern = xs_children(r, "pattern").next().map(|p| p.attribute("value").unwrap().to_string());
    let max = xs_children(r, "maxInclusive").next().map(|m| m.attribute("value").unwrap().parse().unwrap());
    let base = match simple_types.get(&base) {
        Some(Simple::Builtin(b)) => b.clone(),
        _ => base,
    };
    Simple::Restricted { base, enums, pattern, max }
}

fn complex(n: Node, simple_types: &HashMap<String, Simple>) -> Complex {
    let mut c = Complex::default();
    if let Some(seq) = xs_children(n, "sequence").next() {
        c.children = xs_children(seq, "element").map(|e| particle(e, simple_types)).collect();
    }
    for a in xs_children(n, "attribute") {
        let ty = match a.attribute("type") {
            Some(t) => simple_types.get(&strip(t)).cloned().unwrap_or(Simple::Builtin(strip(t))),
            None => simple(xs_children(a, "simpleType").next().expect("attribute type"), simple_types),
        };
        c.attrs.push(Attr {
            name: a.attribute("name").unwrap().to_string(),
            ty,
            required: a.attribute("use") == Some("required"),
        });
    }
    c
}

fn particle(e: Node, simple_types: &HashMap<String, Simple>) -> Particle {
    let ty = match e.attribute("type") {
        Some(t) => TypeRef::Named(strip(t)),
        None => TypeRef::Inline(Box::new(
            xs_children(e, "complexType").next().map(|c| complex(c, simple_types)).unwrap_or_default(),
        )),
    };
    Particle {
        name: e.attribute("name").unwrap().to_string(),
        ty,
        min: e.attribute("minOccurs").map_or(1, |v| v.parse().unwrap()),
        max: match e.attribute("maxOccurs") {
            Some("unbounded") => None,
            Some(v) => Some(v.parse().unwrap()),
            None => Some(1),
        },
    }
}

impl Schema {
    pub fn parse(text: &str) -> Result<Schema, String> {
        let doc = Document::parse(text).map_err(|e| e.to_string())?;
        let root = doc.root_element();
        if !is_xs(&root, "schema") {
            return Err("not an XML Schema document".into());
        }
        let mut simple_types = HashMap::new();
        for s in xs_children(root, "simpleType") {
            let v = simple(s, &simple_types);
            simple_types.insert(s.attribute("name").unwrap().to_string(), v);
        }
        let complex_types = xs_children(root, "complexType")
            .map(|c| (c.attribute("name").unwrap().to_string(), complex(c, &simple_types)))
            .collect();
        let roots = xs_children(root, "element").map(|e| particle(e, &simple_types)).collect();
        Ok(Schema { roots, complex: complex_types })
    }

    /// Element and attribute names the schema declares, for comparison
    /// with what a writer emits.
    pub fn vocabulary(&self) -> (Vec<String>, Vec<String>) {
        let mut elements = Vec::new();
        let mut attrs = Vec::new();
        fn walk(s: &Schema, p: &Particle, el: &mut Vec<String>, at: &mut Vec<String>, depth: usize) {
            if depth > 8 || el.contains(&p.name) {
                return;
            }
            el.push(p.name.clone());
            let c = s.resolve(&p.ty);
            at.extend(c.attrs.iter().map(|a| a.name.clone()));
            for k in &c.children {
                walk(s, k, el, at, depth + 1);
            }
        }
        for r in &self.roots {
            walk(self, r, &mut elements, &mut attrs, 0);
        }
        elements.sort();
        elements.dedup();
        attrs.sort();
        attrs.dedup();
        (elements, attrs)
    }

    fn resolve<'s>(&'s self, t: &'s TypeRef) -> &'s Complex {
        match t {
            TypeRef::Named(n) => self.complex.get(n).unwrap_or_else(|| panic!("unknown type {n}")),
            TypeRef::Inline(c) => c,
        }
    }

    pub fn validate(&self, text: &str) -> Result<(), String> {
        let doc = Document::parse(text).map_err(|e| e.to_string())?;
        let root = doc.root_element();
        let decl = self
            .roots
            .iter()
            .find(|p| p.name == root.tag_name().name())
            .ok_or_else(|| format!("undeclared root element <{}>", root.tag_name().name()))?;
        self.element(root, decl)
    }

    fn element(&self, n: Node, p: &Particle) -> Result<(), String> {
        let c = self.resolve(&p.ty);
        let here = format!("<{}> at byte {}", p.name, n.range().start);
        for a in n.attributes() {
            let decl = c
                .attrs
                .iter()
                .find(|d| d.name == a.name())
                .ok_or_else(|| format!("{here}: undeclared attribute `{}`", a.name()))?;
            check_simple(&decl.ty, a.value()).map_err(|e| format!("{here}: attribute `{}`: {e}", a.name()))?;
        }
        for d in c.attrs.iter().filter(|d| d.required) {
            if n.attribute(d.name.as_str()).is_none() {
                return Err(format!("{here}: missing attribute `{}`", d.name));
            }
        }
        if n.children().any(|k| k.is_text() && !k.text().unwrap_or("").trim().is_empty()) {
            return Err(format!("{here}: unexpected text"));
        }
        let kids: Vec<Node> = n.children().filter(|k| k.is_element()).collect();
        let mut i = 0;
        for part in &c.children {
            let mut count = 0;
            while i < kids.len() && kids[i].tag_name().name() == part.name && part.max.is_none_or(|m| count < m) {
                self.element(kids[i], part)?;
                count += 1;
                i += 1;
            }
            if count < part.min {
                return Err(format!("{here}: expected at least {} <{}>", part.min, part.name));
            }
        }
        if let Some(k) = kids.get(i) {
            return Err(format!("{here}: unexpected <{}>", k.tag_name().name()));
        }
        Ok(())
    }
}

fn check_builtin(base: &str, v: &str) -> Result<(), String> {
    let ok = match base {
        "string" => true,
        "boolean" => matches!(v, "true" | "false" | "1" | "0"),
        "positiveInteger" => v.parse::<u64>().is_ok_and(|x| x > 0),
        "nonNegativeInteger" => v.parse::<u64>().is_ok(),
        other => return Err(format!("unsupported builtin type {other}")),
    };
    if ok {
        Ok(())
    } else {
        Err(format!("`{v}` is not a valid {base}"))
    }
}

fn check_simple(t: &Simple, v: &str) -> Result<(), String> {
    match t {
        Simple::Builtin(b) => check_builtin(b, v),
        Simple::Restricted { base, enums, pattern, max } => {
            check_builtin(base, v)?;
            if !enums.is_empty() && !enums.iter().any(|e| e == v) {
                return Err(format!("`{v}` is not one of {enums:?}"));
            }
            if let Some(p) = pattern {
                let re = Regex::new(&format!("^(?:{p})$")).map_err(|e| e.to_string())?;
                if !re.is_match(v) {
                    return Err(format!("`{v}` does not match {p}"));
                }
            }
            if let Some(m) = max {
                if v.parse::<u64>().map_or(true, |x| x > *m) {
                    return Err(format!("`{v}` exceeds {m}"));
                }
            }
            Ok(())
        }
    }
}
