use std::path::Path;

use serde_json::{json, Map, Value};

use super::{poset_to_json, poset_value, read_json, FormatError};
use crate::ep::{make_ep, EpPair};
use crate::lift::{LiftPoset, StrictEpPair, BOTTOM};
use crate::order::{Elem, FinPoset, MonotoneMap, OrderError};
use crate::presheaf::{InternalLift, InternalLiftElem, NatMap, PresheafPoset};

fn field<'a>(v: &'a Value, key: &str, path: &Path) -> Result<&'a Value, FormatError> {
    v.get(key).ok_or_else(|| FormatError::json(path, format!("missing `{key}`")))
}

fn element(p: &FinPoset, id: &str, path: &Path) -> Result<Elem, FormatError> {
    p.require(id).map_err(|e| FormatError::invalid(path, e))
}

/// Reads `"map": [[x, image], ...]` into an assignment on `dom`, every element
/// of `dom` exactly once.
fn assignment(
    dom: &FinPoset,
    v: &Value,
    path: &Path,
    image: impl Fn(&Value) -> Result<Elem, FormatError>,
) -> Result<Vec<Elem>, FormatError> {
    let pairs = v.as_array().ok_or_else(|| FormatError::json(path, "`map` must be an array of pairs"))?;
    let mut out: Vec<Option<Elem>> = vec![None; dom.len()];
    for pair in pairs {
        let (x, y) = match pair.as_array().map(Vec::as_slice) {
            Some([Value::String(x), y]) => (x, y),
            _ => return Err(FormatError::json(path, "`map` entries are `[id, image]` pairs")),
        };
        let x = element(dom, x, path)?;
        if out[x].is_some() {
            return Err(FormatError::json(path, format!("`{}` is mapped twice", dom.id(x))));
        }
        out[x] = Some(image(y)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(x, y)| y.ok_or_else(|| FormatError::invalid(path, OrderError::NotTotal(dom.id(x).to_string()))))
        .collect()
}

/// `{"dom": P, "cod": Q, "map": [[x, fx], ...]}`; posets inline or by reference.
pub fn map_from_json(v: &Value, path: &Path) -> Result<MonotoneMap, FormatError> {
    let dom = poset_value(path, field(v, "dom", path)?)?;
    let cod = poset_value(path, field(v, "cod", path)?)?;
    let assign = assignment(&dom, field(v, "map", path)?, path, |y| match y {
        Value::String(s) => element(&cod, s, path),
        _ => Err(FormatError::json(path, "images are element ids")),
    })?;
    MonotoneMap::new(&dom, &cod, assign).map_err(|e| FormatError::invalid(path, e))
}

pub fn map_to_json(f: &MonotoneMap) -> Value {
    let pairs: Vec<Value> = f.dom().elements().map(|x| json!([f.dom().id(x), f.cod().id(f.apply(x))])).collect();
    json!({ "dom": poset_to_json(f.dom()), "cod": poset_to_json(f.cod()), "map": pairs })
}

pub fn load_map(path: &Path) -> Result<MonotoneMap, FormatError> {
    map_from_json(&read_json(path)?, path)
}

pub fn ep_from_json(v: &Value, path: &Path) -> Result<EpPair, FormatError> {
    let emb = map_from_json(field(v, "emb", path)?, path)?;
    let proj = map_from_json(field(v, "proj", path)?, path)?;
    make_ep(emb, proj).map_err(|e| FormatError::invalid(path, e))
}

pub fn ep_to_json(e: &EpPair) -> Value {
    json!({ "emb": map_to_json(e.emb()), "proj": map_to_json(e.proj()) })
}

pub fn load_ep(path: &Path) -> Result<EpPair, FormatError> {
    ep_from_json(&read_json(path)?, path)
}

/// `"bot"` or `{"eta": id}`.
pub fn lifted_from_json(la: &LiftPoset, v: &Value, path: &Path) -> Result<Elem, FormatError> {
    match v {
        Value::String(s) if s == "bot" => Ok(BOTTOM),
        Value::Object(o) => match o.get("eta") {
            Some(Value::String(id)) => Ok(la.eta(element(la.base(), id, path)?)),
            _ => Err(FormatError::json(path, "a lifted element is `\"bot\"` or `{\"eta\": id}`")),
        },
        _ => Err(FormatError::json(path, "a lifted element is `\"bot\"` or `{\"eta\": id}`")),
    }
}

pub fn lifted_to_json(la: &LiftPoset, u: Elem) -> Value {
    match la.value(u) {
        None => json!("bot"),
        Some(x) => json!({ "eta": la.base().id(x) }),
    }
}

fn kernel_from_json(v: &Value, path: &Path) -> Result<MonotoneMap, FormatError> {
    let dom = poset_value(path, field(v, "dom", path)?)?;
    let cod = poset_value(path, field(v, "cod", path)?)?;
    let lc = LiftPoset::new(&cod);
    let assign = assignment(&dom, field(v, "map", path)?, path, |y| lifted_from_json(&lc, y, path))?;
    MonotoneMap::new(&dom, lc.carrier(), assign).map_err(|e| FormatError::invalid(path, e))
}

/// `{"kind": "strict", "emb": K, "proj": K}` where each `K` is a partial map
/// written as `{"dom", "cod", "map"}` with lifted images.
pub fn strict_ep_from_json(v: &Value, path: &Path) -> Result<StrictEpPair, FormatError> {
    let emb = kernel_from_json(field(v, "emb", path)?, path)?;
    let proj = kernel_from_json(field(v, "proj", path)?, path)?;
    let (a, b) = (emb.dom().clone(), proj.dom().clone());
    StrictEpPair::from_partial(&a, &b, &emb, &proj).map_err(|e| FormatError::invalid(path, e))
}

pub fn strict_ep_to_json(e: &StrictEpPair) -> Value {
    let kernel = |m: &crate::lift::StrictMap| {
        let (dom, cod) = (m.dom(), m.cod());
        let pairs: Vec<Value> = dom
            .base()
            .elements()
            .map(|x| json!([dom.base().id(x), lifted_to_json(cod, m.apply(dom.eta(x)))]))
            .collect();
        json!({ "dom": poset_to_json(dom.base()), "cod": poset_to_json(cod.base()), "map": pairs })
    };
    json!({ "kind": "strict", "emb": kernel(e.emb()), "proj": kernel(e.proj()) })
}

pub fn load_strict_ep(path: &Path) -> Result<StrictEpPair, FormatError> {
    strict_ep_from_json(&read_json(path)?, path)
}

/// An internal lifted element at stage `p`: `"bot"`, `{"eta": id}` (defined on
/// all of `↓p`), or `{"support": [q, ...], "family": {q: id, ...}}`.
pub fn internal_lifted_from_json(l: &InternalLift, p: Elem, v: &Value, path: &Path) -> Result<Elem, FormatError> {
    let site = l.site();
    let base = site.base();
    let a = l.base();
    let bad = || FormatError::json(path, "an internal lifted element is `\"bot\"`, `{\"eta\": id}` or `{\"support\", \"family\"}`");
    let x = match v {
        Value::String(s) if s == "bot" => return Ok(l.bottom()),
        Value::Object(o) if o.contains_key("eta") => {
            let id = o["eta"].as_str().ok_or_else(bad)?;
            return Ok(l.eta(p, element(a.stage(p), id, path)?));
        }
        Value::Object(o) => {
            let support = o.get("support").and_then(Value::as_array).ok_or_else(bad)?;
            let family = o.get("family").and_then(Value::as_object).ok_or_else(bad)?;
            let mut mask = 0u64;
            let mut fam = vec![None; base.len()];
            for q in support {
                let q = element(base, q.as_str().ok_or_else(bad)?, path)?;
                mask |= 1 << q;
            }
            for (q, x) in family {
                let q = element(base, q, path)?;
                fam[q] = Some(element(a.stage(q), x.as_str().ok_or_else(bad)?, path)?);
            }
            InternalLiftElem { at: p, support: mask, family: fam }
        }
        _ => return Err(bad()),
    };
    l.index_of(&x).ok_or_else(|| {
        FormatError::json(path, format!("not a partial element at stage `{}` (support must be a sieve with a compatible family)", base.id(p)))
    })
}

pub fn internal_lifted_to_json(l: &InternalLift, p: Elem, u: Elem) -> Value {
    let base = l.site().base();
    let x = l.elem(p, u);
    if x.support == 0 {
        return json!("bot");
    }
    let support: Vec<&str> = base.elements().filter(|&q| x.support >> q & 1 == 1).map(|q| base.id(q)).collect();
    let mut family = Map::new();
    for q in base.elements() {
        if let Some(v) = x.family[q] {
            family.insert(base.id(q).to_string(), json!(l.base().stage(q).id(v)));
        }
    }
    json!({ "support": support, "family": family })
}

/// `{"kind": "internal", "kernel": [{"stage": p, "map": [[x, lifted], ...]}, ...]}`:
/// the partial map `A ⇀ B` of an internal strict ep-pair, stage by stage.
pub fn internal_kernel_from_json(
    a: &PresheafPoset,
    lb: &InternalLift,
    v: &Value,
    path: &Path,
) -> Result<NatMap, FormatError> {
    let base = a.site().base().clone();
    let stages = field(v, "kernel", path)?.as_array().ok_or_else(|| FormatError::json(path, "`kernel` is a list"))?;
    let mut assigns: Vec<Option<Vec<Elem>>> = vec![None; base.len()];
    for s in stages {
        let p = element(&base, field(s, "stage", path)?.as_str().unwrap_or(""), path)?;
        let assign = assignment(a.stage(p), field(s, "map", path)?, path, |y| internal_lifted_from_json(lb, p, y, path))?;
        assigns[p] = Some(assign);
    }
    let assigns = assigns
        .into_iter()
        .enumerate()
        .map(|(p, a)| a.ok_or_else(|| FormatError::json(path, format!("no kernel at stage `{}`", base.id(p)))))
        .collect::<Result<Vec<_>, _>>()?;
    NatMap::from_assignments(a, lb.presheaf(), assigns).map_err(|e| FormatError::invalid(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ep::enumerate_ep_pairs;
    use crate::lift::enumerate_strict_ep_pairs;
    use crate::presheaf::{BaseSite, InternalStrictEp};
    use crate::Budget;

    fn here() -> &'static Path {
        Path::new("mem")
    }

    #[test]
    fn ep_round_trip() {
        for e in enumerate_ep_pairs(&FinPoset::chain(2), &FinPoset::chain(3), &Budget::default()).unwrap() {
            assert_eq!(ep_from_json(&ep_to_json(&e), here()).unwrap(), e);
        }
        for e in enumerate_strict_ep_pairs(&FinPoset::point(), &FinPoset::antichain(2), &Budget::default()).unwrap() {
            assert_eq!(strict_ep_from_json(&strict_ep_to_json(&e), here()).unwrap(), e);
        }
        let empty = StrictEpPair::from_empty(&FinPoset::point());
        assert_eq!(strict_ep_from_json(&strict_ep_to_json(&empty), here()).unwrap(), empty);
    }

    #[test]
    fn broken_ep_is_a_validation_failure() {
        let c2 = FinPoset::chain(2);
        let emb = MonotoneMap::identity(&c2);
        let proj = MonotoneMap::constant(&c2, &c2, 0);
        let v = json!({ "emb": map_to_json(&emb), "proj": map_to_json(&proj) });
        let e = ep_from_json(&v, here()).unwrap_err();
        assert!(e.is_validation(), "{e}");
    }

    #[test]
    fn missing_image_is_reported() {
        let v = json!({ "dom": "sierpinski", "cod": "1", "map": [["0", "*"]] });
        let e = map_from_json(&v, here()).unwrap_err();
        assert!(matches!(e, FormatError::Invalid { .. }), "{e}");
    }

    #[test]
    fn lifted_elements() {
        let la = LiftPoset::new(&FinPoset::chain(2));
        for u in la.carrier().elements() {
            assert_eq!(lifted_from_json(&la, &lifted_to_json(&la, u), here()).unwrap(), u);
        }
        assert_eq!(lifted_to_json(&la, 0), json!("bot"));
        assert_eq!(lifted_to_json(&la, 2), json!({"eta": "1"}));
    }

    #[test]
    fn internal_elements_round_trip() {
        let site = BaseSite::sierpinski();
        let a = PresheafPoset::constant(&site, &FinPoset::point());
        let l = InternalLift::new(&a, &Budget::default()).unwrap();
        for p in site.base().elements() {
            for u in l.stage(p).elements() {
                let v = internal_lifted_to_json(&l, p, u);
                assert_eq!(internal_lifted_from_json(&l, p, &v, here()).unwrap(), u);
            }
        }
        // the identity kernel η
        let k = json!({ "kind": "internal", "kernel": [
            { "stage": "0", "map": [["*", {"eta": "*"}]] },
            { "stage": "1", "map": [["*", {"eta": "*"}]] },
        ]});
        let kern = internal_kernel_from_json(&a, &l, &k, here()).unwrap();
        let ep = InternalStrictEp::from_kernel(&l, &l, &kern).unwrap();
        assert_eq!(ep, InternalStrictEp::identity(&l));
    }
}
