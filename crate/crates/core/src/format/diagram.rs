use std::path::Path;

use serde_json::Value;

use super::maps::{ep_from_json, internal_kernel_from_json, strict_ep_from_json};
use super::{is_json, load_map, poset_value, read, read_json, relative_to, resolve_poset, FormatError};
use crate::diagram::{EpDiagram, PartialEpDiagram};
use crate::ep::EpPair;
use crate::lift::StrictEpPair;
use crate::order::{Elem, FinPoset, MonotoneMap};
use crate::presheaf::{BaseSite, InternalDiagram, InternalLift, InternalStrictEp, PresheafPoset};
use crate::Budget;

#[derive(Clone, Debug)]
pub enum LoadedDiagram {
    Total(EpDiagram),
    Partial(PartialEpDiagram),
    Internal(InternalDiagram),
}

impl LoadedDiagram {
    pub fn mode(&self) -> &'static str {
        match self {
            LoadedDiagram::Total(_) => "total",
            LoadedDiagram::Partial(_) => "partial",
            LoadedDiagram::Internal(_) => "internal",
        }
    }

    pub fn index(&self) -> &FinPoset {
        match self {
            LoadedDiagram::Total(d) => d.index(),
            LoadedDiagram::Partial(d) => d.index(),
            LoadedDiagram::Internal(d) => d.index(),
        }
    }
}

/// A reference inside a diagram: a path string or an inline JSON value.
enum Ref<'a> {
    Path(String),
    Inline(&'a Value),
}

struct Parts<'a> {
    mode: String,
    index: Ref<'a>,
    objects: Vec<(String, Ref<'a>)>,
    edges: Vec<(String, String, Ref<'a>)>,
}

fn json_of(origin: &Path, r: &Ref) -> Result<(Value, std::path::PathBuf), FormatError> {
    match r {
        Ref::Path(s) => {
            let p = relative_to(origin, s);
            Ok((read_json(&p)?, p))
        }
        Ref::Inline(v) => Ok(((*v).clone(), origin.to_path_buf())),
    }
}

fn poset_of(origin: &Path, r: &Ref) -> Result<FinPoset, FormatError> {
    match r {
        Ref::Path(s) => resolve_poset(origin, s),
        Ref::Inline(v) => poset_value(origin, v),
    }
}

fn presheaf_of(origin: &Path, r: &Ref) -> Result<PresheafPoset, FormatError> {
    match r {
        Ref::Path(s) => load_presheaf(&relative_to(origin, s)),
        Ref::Inline(_) => Err(FormatError::json(origin, "presheaf objects are given by file")),
    }
}

fn assemble(parts: Parts, origin: &Path, budget: &Budget) -> Result<LoadedDiagram, FormatError> {
    let index = poset_of(origin, &parts.index)?;
    let slot = |id: &str| index.require(id).map_err(|e| FormatError::invalid(origin, e));
    let mut order: Vec<Option<usize>> = vec![None; index.len()];
    for (k, (i, _)) in parts.objects.iter().enumerate() {
        let i = slot(i)?;
        if order[i].replace(k).is_some() {
            return Err(FormatError::json(origin, format!("object `{}` given twice", index.id(i))));
        }
    }
    let order: Vec<usize> = order
        .into_iter()
        .enumerate()
        .map(|(i, k)| k.ok_or_else(|| FormatError::json(origin, format!("no object for index `{}`", index.id(i)))))
        .collect::<Result<_, _>>()?;
    let mut edge_slots: Vec<(Elem, Elem)> = Vec::new();
    for (i, j, _) in &parts.edges {
        edge_slots.push((slot(i)?, slot(j)?));
    }
    match parts.mode.as_str() {
        "total" => {
            let objects = order.iter().map(|&k| poset_of(origin, &parts.objects[k].1)).collect::<Result<Vec<_>, _>>()?;
            let mut given: Vec<(Elem, Elem, EpPair)> = Vec::new();
            for ((i, j), (_, _, r)) in edge_slots.iter().zip(&parts.edges) {
                let (v, p) = json_of(origin, r)?;
                given.push((*i, *j, ep_from_json(&v, &p)?));
            }
            let d = EpDiagram::new(index, objects, given).map_err(|e| FormatError::invalid(origin, e))?;
            Ok(LoadedDiagram::Total(d))
        }
        "partial" => {
            let objects = order.iter().map(|&k| poset_of(origin, &parts.objects[k].1)).collect::<Result<Vec<_>, _>>()?;
            let mut given: Vec<(Elem, Elem, StrictEpPair)> = Vec::new();
            for ((i, j), (_, _, r)) in edge_slots.iter().zip(&parts.edges) {
                let (v, p) = json_of(origin, r)?;
                given.push((*i, *j, strict_ep_from_json(&v, &p)?));
            }
            let d = PartialEpDiagram::new(index, objects, given).map_err(|e| FormatError::invalid(origin, e))?;
            Ok(LoadedDiagram::Partial(d))
        }
        "internal" => {
            let objects =
                order.iter().map(|&k| presheaf_of(origin, &parts.objects[k].1)).collect::<Result<Vec<_>, _>>()?;
            let lifts = objects
                .iter()
                .map(|o| InternalLift::new(o, budget))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| FormatError::invalid(origin, e))?;
            let mut given: Vec<(Elem, Elem, InternalStrictEp)> = Vec::new();
            for ((i, j), (_, _, r)) in edge_slots.iter().zip(&parts.edges) {
                let (v, p) = json_of(origin, r)?;
                let k = internal_kernel_from_json(&objects[*i], &lifts[*j], &v, &p)?;
                let ep = InternalStrictEp::from_kernel(&lifts[*i], &lifts[*j], &k).map_err(|e| FormatError::invalid(&p, e))?;
                given.push((*i, *j, ep));
            }
            let d = InternalDiagram::new(index, objects, given).map_err(|e| FormatError::invalid(origin, e))?;
            Ok(LoadedDiagram::Internal(d))
        }
        m => Err(FormatError::json(origin, format!("unknown mode `{m}`, expected total, partial or internal"))),
    }
}

/// Text format: an optional `mode total|partial|internal` line, `index <poset>`,
/// `object <i> <file>` per index element and `edge <i> <j> <file>` lines.
/// Paths are relative to the diagram file.
pub fn parse_diagram_text(text: &str, path: &Path, budget: &Budget) -> Result<LoadedDiagram, FormatError> {
    let mut mode = None;
    let mut index = None;
    let mut objects = Vec::new();
    let mut edges = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["mode", m] if mode.is_none() => mode = Some(m.to_string()),
            ["index", p] if index.is_none() => index = Some(Ref::Path(p.to_string())),
            ["object", i, p] => objects.push((i.to_string(), Ref::Path(p.to_string()))),
            ["edge", i, j, p] => edges.push((i.to_string(), j.to_string(), Ref::Path(p.to_string()))),
            _ => return Err(FormatError::syntax(path, n + 1, format!("cannot parse `{line}`"))),
        }
    }
    let index = index.ok_or_else(|| FormatError::syntax(path, 1, "missing `index` line"))?;
    let parts = Parts { mode: mode.unwrap_or_else(|| "total".into()), index, objects, edges };
    assemble(parts, path, budget)
}

/// JSON mirror: `{"mode", "index", "objects": [[i, ref]], "edges": [[i, j, ref]]}`
/// where each `ref` is a path string or an inline document.
pub fn parse_diagram_json(v: &Value, path: &Path, budget: &Budget) -> Result<LoadedDiagram, FormatError> {
    let mode = v.get("mode").and_then(Value::as_str).unwrap_or("total").to_string();
    let index = as_ref(v.get("index").ok_or_else(|| FormatError::json(path, "missing `index`"))?);
    let mut objects = Vec::new();
    for o in v.get("objects").and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]) {
        match o.as_array().map(Vec::as_slice) {
            Some([Value::String(i), r]) => objects.push((i.clone(), as_ref(r))),
            _ => return Err(FormatError::json(path, "`objects` entries are `[index-id, ref]`")),
        }
    }
    let mut edges = Vec::new();
    for e in v.get("edges").and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]) {
        match e.as_array().map(Vec::as_slice) {
            Some([Value::String(i), Value::String(j), r]) => edges.push((i.clone(), j.clone(), as_ref(r))),
            _ => return Err(FormatError::json(path, "`edges` entries are `[i, j, ref]`")),
        }
    }
    assemble(Parts { mode, index, objects, edges }, path, budget)
}

fn as_ref(v: &Value) -> Ref<'_> {
    match v {
        Value::String(s) => Ref::Path(s.clone()),
        other => Ref::Inline(other),
    }
}

pub fn load_diagram(path: &Path, budget: &Budget) -> Result<LoadedDiagram, FormatError> {
    if is_json(path) {
        parse_diagram_json(&read_json(path)?, path, budget)
    } else {
        parse_diagram_text(&read(path)?, path, budget)
    }
}

/// Text format: `base <poset>`, `stage <p> <poset>` per base element, and
/// `restrict <p> <q> <mapfile>` for `q <= p` (identities may be omitted and
/// composites are filled in).
pub fn parse_presheaf_text(text: &str, path: &Path) -> Result<PresheafPoset, FormatError> {
    let mut base = None;
    let mut stages: Vec<(usize, String, String)> = Vec::new();
    let mut restricts: Vec<(usize, String, String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["base", b] if base.is_none() => base = Some(resolve_poset(path, b)?),
            ["stage", p, f] => stages.push((n + 1, p.to_string(), f.to_string())),
            ["restrict", p, q, f] => restricts.push((n + 1, p.to_string(), q.to_string(), f.to_string())),
            _ => return Err(FormatError::syntax(path, n + 1, format!("cannot parse `{line}`"))),
        }
    }
    let base = base.ok_or_else(|| FormatError::syntax(path, 1, "missing `base` line"))?;
    let site = BaseSite::new(base.clone()).map_err(|e| FormatError::invalid(path, e))?;
    let mut slots: Vec<Option<FinPoset>> = vec![None; base.len()];
    for (line, p, f) in &stages {
        let p = base.lookup(p).ok_or_else(|| FormatError::syntax(path, *line, format!("`{p}` is not in the base")))?;
        slots[p] = Some(resolve_poset(path, f)?);
    }
    let stage_list: Vec<FinPoset> = slots
        .into_iter()
        .enumerate()
        .map(|(p, s)| s.ok_or_else(|| FormatError::syntax(path, 1, format!("no stage for `{}`", base.id(p)))))
        .collect::<Result<_, _>>()?;
    let mut given: Vec<(Elem, Elem, MonotoneMap)> = Vec::new();
    for (line, p, q, f) in &restricts {
        let p = base.lookup(p).ok_or_else(|| FormatError::syntax(path, *line, format!("`{p}` is not in the base")))?;
        let q = base.lookup(q).ok_or_else(|| FormatError::syntax(path, *line, format!("`{q}` is not in the base")))?;
        given.push((p, q, load_map(&relative_to(path, f))?));
    }
    PresheafPoset::new(&site, stage_list, given).map_err(|e| FormatError::invalid(path, e))
}

pub fn load_presheaf(path: &Path) -> Result<PresheafPoset, FormatError> {
    parse_presheaf_text(&read(path)?, path)
}
