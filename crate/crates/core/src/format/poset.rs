use std::path::Path;

use serde_json::{json, Value};

use super::{is_json, read, read_json, FormatError};
use crate::order::{Elem, FinPoset};

/// Text format: `poset <name>`, then `elem <id>` and `le <a> <b>` lines.
/// Reflexivity is implicit and the relation is closed transitively.
pub fn poset_from_text(text: &str, path: &Path) -> Result<FinPoset, FormatError> {
    let mut name = None;
    let mut elems: Vec<String> = Vec::new();
    let mut le: Vec<(String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["poset", n2] if name.is_none() => name = Some(n2.to_string()),
            ["poset", ..] => return Err(FormatError::syntax(path, n + 1, "expected a single `poset <name>` line")),
            ["elem", id] if name.is_some() => elems.push(id.to_string()),
            ["le", a, b] if name.is_some() => le.push((a.to_string(), b.to_string())),
            _ if name.is_none() => return Err(FormatError::syntax(path, n + 1, "file must start with `poset <name>`")),
            _ => return Err(FormatError::syntax(path, n + 1, format!("cannot parse `{line}`"))),
        }
    }
    let name = name.ok_or_else(|| FormatError::syntax(path, 1, "empty poset file"))?;
    FinPoset::generated(name, &elems, &le).map_err(|e| FormatError::invalid(path, e))
}

/// Writes the element list and the covering pairs.
pub fn poset_to_text(p: &FinPoset) -> String {
    let mut out = format!("poset {}\n", p.name().replace(char::is_whitespace, "_"));
    for x in p.elements() {
        out.push_str(&format!("elem {}\n", p.id(x)));
    }
    for (a, b) in p.hasse_edges() {
        out.push_str(&format!("le {} {}\n", p.id(a), p.id(b)));
    }
    out
}

fn endpoint(p: &[String], v: &Value, path: &Path) -> Result<String, FormatError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => n
            .as_u64()
            .and_then(|i| p.get(i as usize))
            .cloned()
            .ok_or_else(|| FormatError::json(path, format!("element index {n} out of range"))),
        _ => Err(FormatError::json(path, "`le` entries are element ids or indexes")),
    }
}

/// JSON format `{"name", "elements", "le"}`. The relation is taken as given and
/// must already be reflexive and transitive. `le` endpoints may be ids or
/// element indexes.
pub fn poset_from_json(v: &Value, path: &Path) -> Result<FinPoset, FormatError> {
    let name = v.get("name").and_then(Value::as_str).unwrap_or("P").to_string();
    let elements: Vec<String> = v
        .get("elements")
        .and_then(Value::as_array)
        .ok_or_else(|| FormatError::json(path, "missing `elements` array"))?
        .iter()
        .map(|e| e.as_str().map(str::to_string).ok_or_else(|| FormatError::json(path, "element ids are strings")))
        .collect::<Result<_, _>>()?;
    let mut le = Vec::new();
    for pair in v.get("le").and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]) {
        match pair.as_array().map(Vec::as_slice) {
            Some([a, b]) => le.push((endpoint(&elements, a, path)?, endpoint(&elements, b, path)?)),
            _ => return Err(FormatError::json(path, "`le` entries are pairs")),
        }
    }
    FinPoset::check(name, &elements, &le).map_err(|e| FormatError::invalid(path, e))
}

/// The full relation, reflexive pairs included, as id pairs.
pub fn poset_to_json(p: &FinPoset) -> Value {
    let le: Vec<Value> = p.relation().iter().map(|&(a, b)| json!([p.id(a), p.id(b)])).collect();
    json!({ "name": p.name(), "elements": p.ids(), "le": le })
}

pub fn load_poset(path: &Path) -> Result<FinPoset, FormatError> {
    if is_json(path) {
        poset_from_json(&read_json(path)?, path)
    } else {
        poset_from_text(&read(path)?, path)
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// The Hasse diagram, drawn with lower elements at the bottom.
pub fn poset_to_dot(p: &FinPoset) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=BT;\n  node [shape=plaintext];\n", quote(p.name()));
    for x in p.elements() {
        out.push_str(&format!("  {};\n", quote(p.id(x))));
    }
    let edges: Vec<(Elem, Elem)> = p.hasse_edges();
    for (a, b) in edges {
        out.push_str(&format!("  {} -> {};\n", quote(p.id(a)), quote(p.id(b))));
    }
    out.push_str("}\n");
    out
}
