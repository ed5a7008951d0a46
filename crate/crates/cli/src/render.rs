use dinf_core::format::{poset_to_json, poset_to_text};
use dinf_core::presheaf::PresheafPoset;
use serde_json::{json, Value};

pub fn presheaf_to_json(a: &PresheafPoset) -> Value {
    let base = a.site().base();
    let stages: Vec<Value> = base
        .elements()
        .map(|p| json!({ "stage": base.id(p), "poset": poset_to_json(a.stage(p)) }))
        .collect();
    let restrictions: Vec<Value> = base
        .hasse_edges()
        .into_iter()
        .map(|(q, p)| {
            let r = a.restriction(p, q);
            let pairs: Vec<Value> =
                r.dom().elements().map(|x| json!([r.dom().id(x), r.cod().id(r.apply(x))])).collect();
            json!({ "from": base.id(p), "to": base.id(q), "map": pairs })
        })
        .collect();
    json!({ "base": poset_to_json(base), "stages": stages, "restrictions": restrictions })
}

pub fn presheaf_to_text(a: &PresheafPoset) -> String {
    let base = a.site().base();
    let mut out = String::new();
    for p in base.elements() {
        out.push_str(&format!("# stage {}\n{}", base.id(p), poset_to_text(a.stage(p))));
    }
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One cluster per stage, each drawn as its Hasse diagram.
pub fn presheaf_to_dot(a: &PresheafPoset) -> String {
    let base = a.site().base();
    let mut out = String::from("digraph presheaf {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    for p in base.elements() {
        let s = a.stage(p);
        let node = |x| quote(&format!("{}:{}", base.id(p), s.id(x)));
        out.push_str(&format!("  subgraph {} {{\n    label={};\n", quote(&format!("cluster_{}", base.id(p))), quote(base.id(p))));
        for x in s.elements() {
            out.push_str(&format!("    {} [label={}];\n", node(x), quote(s.id(x))));
        }
        for (x, y) in s.hasse_edges() {
            out.push_str(&format!("    {} -> {};\n", node(x), node(y)));
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
