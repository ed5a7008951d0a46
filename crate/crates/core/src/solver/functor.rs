use super::{ChainMode, DomainExpr, SolverError};
use crate::ep::{make_ep, EpPair};
use crate::lift::{lift_ep, LiftPoset, StrictEpPair, BOTTOM};
use crate::order::{coproduct, function_space, product_family, Elem, FinPoset, MonotoneMap, Product};
use crate::Budget;

fn pair_product(a: &FinPoset, b: &FinPoset) -> Product {
    product_family(&["0".to_string(), "1".to_string()], &[a.clone(), b.clone()]).expect("two factors")
}

fn guard(p: FinPoset, budget: &Budget) -> Result<FinPoset, SolverError> {
    if p.len() > budget.level_size {
        return Err(SolverError::BudgetExceeded(format!(
            "a constructed poset has {} elements, the level budget is {}",
            p.len(),
            budget.level_size
        )));
    }
    Ok(p)
}

/// `F(P)`. In partial mode `A -> B` is the poset of partial maps, that is of
/// monotone maps `A -> L B` (equivalently strict maps `L A -> L B`).
pub fn functor_object(e: &DomainExpr, p: &FinPoset, mode: ChainMode, budget: &Budget) -> Result<FinPoset, SolverError> {
    let out = match e {
        DomainExpr::Var => p.clone(),
        DomainExpr::Const(_, c) => c.clone(),
        DomainExpr::Unit => FinPoset::point(),
        DomainExpr::Empty => FinPoset::empty(),
        DomainExpr::Sum(a, b) => coproduct(&functor_object(a, p, mode, budget)?, &functor_object(b, p, mode, budget)?),
        DomainExpr::Prod(a, b) => {
            pair_product(&functor_object(a, p, mode, budget)?, &functor_object(b, p, mode, budget)?).poset
        }
        DomainExpr::Arrow(a, b) => {
            let fa = functor_object(a, p, mode, budget)?;
            let fb = functor_object(b, p, mode, budget)?;
            match mode {
                ChainMode::Total => function_space(&fa, &fb, budget)?.poset,
                ChainMode::Partial => function_space(&fa, LiftPoset::new(&fb).carrier(), budget)?.poset,
            }
        }
        DomainExpr::Lift(a) => LiftPoset::new(&functor_object(a, p, mode, budget)?).carrier().clone(),
    };
    guard(out, budget)
}

/// `F` on an ep-pair `A ⇄ B`, giving `F(A) ⇄ F(B)`. Arrows act covariantly
/// through the embedding on the right and the projection on the left.
pub fn functor_ep(e: &DomainExpr, ep: &EpPair, budget: &Budget) -> Result<EpPair, SolverError> {
    let out = match e {
        DomainExpr::Var => ep.clone(),
        DomainExpr::Const(..) | DomainExpr::Unit | DomainExpr::Empty => {
            EpPair::identity(&functor_object(e, ep.lower(), ChainMode::Total, budget)?)
        }
        DomainExpr::Sum(a, b) => {
            let s = functor_ep(a, ep, budget)?;
            let t = functor_ep(b, ep, budget)?;
            let lo = coproduct(s.lower(), t.lower());
            let hi = coproduct(s.upper(), t.upper());
            let (nl, nh) = (s.lower().len(), s.upper().len());
            let emb = MonotoneMap::from_fn(&lo, &hi, |x| if x < nl { s.emb().apply(x) } else { nh + t.emb().apply(x - nl) })?;
            let proj = MonotoneMap::from_fn(&hi, &lo, |y| if y < nh { s.proj().apply(y) } else { nl + t.proj().apply(y - nh) })?;
            make_ep(emb, proj)?
        }
        DomainExpr::Prod(a, b) => {
            let s = functor_ep(a, ep, budget)?;
            let t = functor_ep(b, ep, budget)?;
            let lo = pair_product(s.lower(), t.lower());
            let hi = pair_product(s.upper(), t.upper());
            let emb = MonotoneMap::from_fn(&lo.poset, &hi.poset, |x| {
                let c = lo.tuple(x);
                hi.index_of(&[s.emb().apply(c[0]), t.emb().apply(c[1])])
            })?;
            let proj = MonotoneMap::from_fn(&hi.poset, &lo.poset, |y| {
                let c = hi.tuple(y);
                lo.index_of(&[s.proj().apply(c[0]), t.proj().apply(c[1])])
            })?;
            make_ep(emb, proj)?
        }
        DomainExpr::Arrow(a, b) => {
            let s = functor_ep(a, ep, budget)?;
            let t = functor_ep(b, ep, budget)?;
            let lo = function_space(s.lower(), t.lower(), budget)?;
            let hi = function_space(s.upper(), t.upper(), budget)?;
            let emb = arrow_action(&lo.poset, &hi, s.upper(), |f, y| t.emb().apply(lo.map(f).apply(s.proj().apply(y))))?;
            let proj = arrow_action(&hi.poset, &lo, s.lower(), |g, x| t.proj().apply(hi.map(g).apply(s.emb().apply(x))))?;
            make_ep(emb, proj)?
        }
        DomainExpr::Lift(a) => lift_ep(&functor_ep(a, ep, budget)?).as_ep(),
    };
    Ok(out)
}

/// The map on function spaces sending `f` to `x ↦ image(f, x)`, `x` ranging
/// over `domain`.
fn arrow_action(
    from: &FinPoset,
    to: &crate::order::FunctionSpace,
    domain: &FinPoset,
    image: impl Fn(Elem, Elem) -> Elem,
) -> Result<MonotoneMap, SolverError> {
    let mut assign = Vec::with_capacity(from.len());
    for f in from.elements() {
        let a: Vec<Elem> = domain.elements().map(|x| image(f, x)).collect();
        let g = to
            .index_of_assignment(&a)
            .ok_or_else(|| SolverError::Inconsistent("arrow action left the function space".into()))?;
        assign.push(g);
    }
    Ok(MonotoneMap::new(from, &to.poset, assign)?)
}

/// `F` on a strict ep-pair `L A ⇄ L B`, giving `L F(A) ⇄ L F(B)`. Sums keep a
/// summand's undefinedness; a pair is defined when both coordinates are.
pub fn functor_strict_ep(e: &DomainExpr, ep: &StrictEpPair, budget: &Budget) -> Result<StrictEpPair, SolverError> {
    let out = match e {
        DomainExpr::Var => ep.clone(),
        DomainExpr::Const(..) | DomainExpr::Unit | DomainExpr::Empty => {
            StrictEpPair::identity(&functor_object(e, ep.lower().base(), ChainMode::Partial, budget)?)
        }
        DomainExpr::Sum(a, b) => {
            let s = functor_strict_ep(a, ep, budget)?;
            let t = functor_strict_ep(b, ep, budget)?;
            let lo = coproduct(s.lower().base(), t.lower().base());
            let hi = coproduct(s.upper().base(), t.upper().base());
            let (llo, lhi) = (LiftPoset::new(&lo), LiftPoset::new(&hi));
            let (nl, nh) = (s.lower().base().len(), s.upper().base().len());
            let through = |p: &StrictEpPair, forward: bool, x: Elem| -> Option<Elem> {
                let (src, dst, m) = if forward {
                    (p.lower(), p.upper(), p.emb())
                } else {
                    (p.upper(), p.lower(), p.proj())
                };
                dst.value(m.apply(src.eta(x)))
            };
            let emb_k = MonotoneMap::from_fn(&lo, lhi.carrier(), |x| {
                let r = if x < nl { through(&s, true, x) } else { through(&t, true, x - nl).map(|y| y + nh) };
                r.map_or(BOTTOM, |y| lhi.eta(y))
            })?;
            let proj_k = MonotoneMap::from_fn(&hi, llo.carrier(), |y| {
                let r = if y < nh { through(&s, false, y) } else { through(&t, false, y - nh).map(|x| x + nl) };
                r.map_or(BOTTOM, |x| llo.eta(x))
            })?;
            StrictEpPair::from_partial(&lo, &hi, &emb_k, &proj_k)?
        }
        DomainExpr::Prod(a, b) => {
            let s = functor_strict_ep(a, ep, budget)?;
            let t = functor_strict_ep(b, ep, budget)?;
            let lo = pair_product(s.lower().base(), t.lower().base());
            let hi = pair_product(s.upper().base(), t.upper().base());
            let (llo, lhi) = (LiftPoset::new(&lo.poset), LiftPoset::new(&hi.poset));
            let emb_k = MonotoneMap::from_fn(&lo.poset, lhi.carrier(), |x| {
                let c = lo.tuple(x);
                let y0 = s.upper().value(s.emb().apply(s.lower().eta(c[0])));
                let y1 = t.upper().value(t.emb().apply(t.lower().eta(c[1])));
                match (y0, y1) {
                    (Some(y0), Some(y1)) => lhi.eta(hi.index_of(&[y0, y1])),
                    _ => BOTTOM,
                }
            })?;
            let proj_k = MonotoneMap::from_fn(&hi.poset, llo.carrier(), |y| {
                let c = hi.tuple(y);
                let x0 = s.lower().value(s.proj().apply(s.upper().eta(c[0])));
                let x1 = t.lower().value(t.proj().apply(t.upper().eta(c[1])));
                match (x0, x1) {
                    (Some(x0), Some(x1)) => llo.eta(lo.index_of(&[x0, x1])),
                    _ => BOTTOM,
                }
            })?;
            StrictEpPair::from_partial(&lo.poset, &hi.poset, &emb_k, &proj_k)?
        }
        DomainExpr::Arrow(a, b) => {
            // elements are kernels `F1 -> L F2`; act on their Kleisli extensions
            let s = functor_strict_ep(a, ep, budget)?;
            let t = functor_strict_ep(b, ep, budget)?;
            let lo = function_space(s.lower().base(), t.lower().carrier(), budget)?;
            let hi = function_space(s.upper().base(), t.upper().carrier(), budget)?;
            let (llo, lhi) = (LiftPoset::new(&lo.poset), LiftPoset::new(&hi.poset));
            let emb = arrow_action(&lo.poset, &hi, s.upper().base(), |f, y| {
                let u = s.proj().apply(s.upper().eta(y));
                s.lower().value(u).map_or(BOTTOM, |x| t.emb().apply(lo.map(f).apply(x)))
            })?;
            let proj = arrow_action(&hi.poset, &lo, s.lower().base(), |g, x| {
                let u = s.emb().apply(s.lower().eta(x));
                s.upper().value(u).map_or(BOTTOM, |y| t.proj().apply(hi.map(g).apply(y)))
            })?;
            let emb_k = MonotoneMap::from_fn(&lo.poset, lhi.carrier(), |f| lhi.eta(emb.apply(f)))?;
            let proj_k = MonotoneMap::from_fn(&hi.poset, llo.carrier(), |g| llo.eta(proj.apply(g)))?;
            StrictEpPair::from_partial(&lo.poset, &hi.poset, &emb_k, &proj_k)?
        }
        DomainExpr::Lift(a) => lift_ep(&functor_strict_ep(a, ep, budget)?.as_ep()),
    };
    Ok(out)
}
