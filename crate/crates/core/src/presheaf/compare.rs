use super::{BaseSite, InternalDiagram, InternalLift, InternalLiftElem, InternalPartialBilimit, InternalStrictEp, NatMap};
use super::{internal_mu, PresheafError, PresheafPoset};
use crate::bilimit::PartialBilimit;
use crate::diagram::PartialEpDiagram;
use crate::lift::{mu, LiftPoset, BOTTOM};
use crate::order::{Elem, FinPoset, MonotoneMap};
use crate::report::Report;
use crate::Budget;

/// Over a one-point base, an internal lift element at the only stage as an
/// element of the two-valued lift.
fn to_boolean(l: &InternalLift, e: Elem) -> Elem {
    let x = l.elem(0, e);
    if x.support == 0 {
        BOTTOM
    } else {
        x.family[0].expect("defined") + 1
    }
}

fn from_boolean(l: &InternalLift, u: Elem) -> Elem {
    let x = match u.checked_sub(1) {
        None => InternalLiftElem { at: 0, support: 0, family: vec![None] },
        Some(v) => InternalLiftElem { at: 0, support: 1, family: vec![Some(v)] },
    };
    l.index_of(&x).expect("one-point lift matches the two-valued one")
}

fn check_point_site(l: &InternalLift) -> Result<(), PresheafError> {
    if l.site().len() != 1 {
        return Err(PresheafError::Mismatch("comparison needs a one-point base".into()));
    }
    Ok(())
}

/// The translation between `L A` computed internally over a point and the
/// two-valued `L A`, checked to be an order isomorphism commuting with `η`
/// and `μ`.
pub fn boolean_lift_iso(a: &FinPoset, budget: &Budget) -> Result<Report, PresheafError> {
    let site = BaseSite::point();
    let pa = PresheafPoset::constant(&site, a);
    let il = InternalLift::new(&pa, budget)?;
    let bl = LiftPoset::new(a);
    let mut r = Report::new();
    let iso = MonotoneMap::new(il.stage(0), bl.carrier(), il.stage(0).elements().map(|e| to_boolean(&il, e)).collect());
    r.record(
        "lift_iso",
        match &iso {
            Ok(m) if m.is_order_iso() => None,
            _ => Some(format!("L{} differs from its internal counterpart", a.name())),
        },
    );
    let eta_ok = a.elements().all(|x| to_boolean(&il, il.eta(0, x)) == bl.eta(x));
    r.record("eta_agrees", (!eta_ok).then(|| "η differs".to_string()));
    let ill = InternalLift::new(il.presheaf(), budget)?;
    let imu = internal_mu(&il, &ill)?;
    let bmu = mu(a);
    let lla = bmu.dom();
    // an element of L L A, translated twice
    let mu_ok = ill.stage(0).elements().all(|w| {
        let x = ill.elem(0, w);
        let outer = match x.family[0] {
            None => BOTTOM,
            Some(inner) => lla.eta(to_boolean(&il, inner)),
        };
        to_boolean(&il, imu.apply(0, w)) == bmu.apply(outer)
    });
    r.record("mu_agrees", (!mu_ok).then(|| "μ differs".to_string()));
    Ok(r)
}

/// Transports a diagram of strict ep-pairs to presheaves over a point.
pub fn from_boolean_diagram(d: &PartialEpDiagram, budget: &Budget) -> Result<InternalDiagram, PresheafError> {
    let site = BaseSite::point();
    let objects: Vec<PresheafPoset> = d.objects().iter().map(|o| PresheafPoset::constant(&site, o)).collect();
    let lifts: Vec<InternalLift> = objects
        .iter()
        .map(|o| InternalLift::new(o, budget))
        .collect::<Result<_, _>>()?;
    let mut given = Vec::new();
    for (i, j, e) in d.hasse_edges() {
        let kernel = e.emb().kernel();
        let assign = kernel.assignment().iter().map(|&u| from_boolean(&lifts[j], u)).collect();
        let k = NatMap::from_assignments(&objects[i], lifts[j].presheaf(), vec![assign])?;
        let ie = InternalStrictEp::from_kernel(&lifts[i], &lifts[j], &k)?;
        let proj_ok = lifts[j]
            .stage(0)
            .elements()
            .all(|u| to_boolean(&lifts[i], ie.proj().apply(0, u)) == e.proj().apply(to_boolean(&lifts[j], u)));
        if !proj_ok {
            return Err(PresheafError::Inconsistent("transported projection differs".into()));
        }
        given.push((i, j, ie));
    }
    Ok(InternalDiagram::new(d.index().clone(), objects, given)?)
}

/// The internal bilimit over a point against the two-valued one: the apexes
/// are matched tuple by tuple, the match must be an order isomorphism, and the
/// cone projections must agree under it.
pub fn boolean_bilimit_iso(boolean: &PartialBilimit, internal: &InternalPartialBilimit) -> Result<Report, PresheafError> {
    check_point_site(internal.lifted_apex())?;
    let idx = internal.diagram().index();
    let ia = internal.apex().stage(0);
    let mut assign = Vec::with_capacity(ia.len());
    let mut missing = None;
    for s in ia.elements() {
        let t: Vec<Elem> = internal
            .tuple(0, s)
            .iter()
            .enumerate()
            .map(|(i, &u)| to_boolean(internal.object_lift(i), u))
            .collect();
        match boolean.element_of(&t) {
            Some(b) => assign.push(b),
            None => {
                missing = Some(ia.id(s).to_string());
                break;
            }
        }
    }
    let mut r = Report::new();
    if let Some(m) = missing {
        r.fail("apex_iso", format!("internal tuple {m} has no counterpart"));
        return Ok(r);
    }
    let iso = MonotoneMap::new(ia, boolean.apex(), assign);
    let iso = match iso {
        Ok(m) if m.is_order_iso() => m,
        _ => {
            r.fail("apex_iso", "tuple matching is not an order isomorphism");
            return Ok(r);
        }
    };
    r.pass("apex_iso");
    let il = internal.lifted_apex();
    let lift_iso = |u: Elem| -> Elem {
        match to_boolean(il, u).checked_sub(1) {
            None => BOTTOM,
            Some(s) => boolean.lifted_apex().eta(iso.apply(s)),
        }
    };
    let mut witness = None;
    'outer: for i in idx.elements() {
        for u in il.stage(0).elements() {
            let via_internal = to_boolean(internal.object_lift(i), internal.cone_proj(i).apply(0, u));
            if via_internal != boolean.cone_proj(i).apply(lift_iso(u)) {
                witness = Some(format!("projection to `{}` at {}", idx.id(i), il.stage(0).id(u)));
                break 'outer;
            }
        }
    }
    r.record("cone_agrees", witness);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::StrictEpPair;

    #[test]
    fn lifts_agree_over_a_point() {
        for a in [FinPoset::empty(), FinPoset::chain(3), FinPoset::antichain(2)] {
            let r = boolean_lift_iso(&a, &Budget::default()).unwrap();
            assert!(r.all_pass(), "{}", r.render_text());
        }
    }

    #[test]
    fn empty_start_agrees_over_a_point() {
        let d = PartialEpDiagram::new(
            FinPoset::chain(2),
            vec![FinPoset::empty(), FinPoset::point()],
            vec![(0, 1, StrictEpPair::from_empty(&FinPoset::point()))],
        )
        .unwrap();
        let b = PartialBilimit::build(&d).unwrap();
        let id = from_boolean_diagram(&d, &Budget::default()).unwrap();
        let ib = InternalPartialBilimit::build(&id, &Budget::default()).unwrap();
        let r = boolean_bilimit_iso(&b, &ib).unwrap();
        assert!(r.all_pass(), "{}", r.render_text());
    }
}
