//! Directed diagrams of ep-pairs, generic over the kind of pair.
//!
//! A diagram assigns an object to every element of a finite directed index
//! poset and an ep-pair `D_i ⇄ D_j` to every `i <= j`. Edges that are not given
//! explicitly are filled in by composing along covering pairs.

use std::fmt;

use thiserror::Error;

use crate::ep::{EpError, EpPair};
use crate::lift::{LiftError, StrictEpPair, StrictMap};
use crate::order::{Elem, FinPoset, MonotoneMap, OrderError};
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("index is not directed: {0}")]
    IndexNotDirected(String),
    #[error("functoriality fails at ({0}, {1}, {2})")]
    FunctorialityFailure(String, String, String),
    #[error("edge at `{0}` is not the identity")]
    IdentityFailure(String),
    #[error("expected {expected} objects, got {got}")]
    WrongObjectCount { expected: usize, got: usize },
    #[error("edge `{0}` -> `{1}` does not follow the index order")]
    EdgeNotInOrder(String, String),
    #[error("edge `{0}` -> `{1}` does not connect the objects at its endpoints")]
    EdgeMismatch(String, String),
    #[error("duplicate edge `{0}` -> `{1}`")]
    DuplicateEdge(String, String),
    #[error("no edge `{0}` -> `{1}` given or derivable by composition")]
    MissingEdge(String, String),
    #[error("composition failed: {0}")]
    Composition(String),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// What a diagram needs from its edges.
pub trait EpMorphism: Clone + PartialEq + fmt::Debug {
    type Object: Clone + PartialEq + fmt::Debug;
    /// Underlying maps between objects, used for `π_{j≤k} ∘ ε_{i≤k}`.
    type Map: Clone + PartialEq + fmt::Debug;

    fn source(&self) -> &Self::Object;
    fn target(&self) -> &Self::Object;
    fn identity_on(obj: &Self::Object) -> Self;
    /// `next ∘ self`.
    fn compose(&self, next: &Self) -> Result<Self, String>;
    /// `down.proj ∘ up.emb` for `up: A ⇄ C`, `down: B ⇄ C`.
    fn factor(up: &Self, down: &Self) -> Self::Map;
}

impl EpMorphism for EpPair {
    type Object = FinPoset;
    type Map = MonotoneMap;

    fn source(&self) -> &FinPoset {
        self.lower()
    }

    fn target(&self) -> &FinPoset {
        self.upper()
    }

    fn identity_on(obj: &FinPoset) -> Self {
        EpPair::identity(obj)
    }

    fn compose(&self, next: &Self) -> Result<Self, String> {
        self.then(next).map_err(|e: EpError| e.to_string())
    }

    fn factor(up: &Self, down: &Self) -> MonotoneMap {
        up.emb().then(down.proj()).expect("both pairs share their upper object")
    }
}

/// Strict pairs are indexed by the posets underneath the lifts.
impl EpMorphism for StrictEpPair {
    type Object = FinPoset;
    type Map = StrictMap;

    fn source(&self) -> &FinPoset {
        self.lower().base()
    }

    fn target(&self) -> &FinPoset {
        self.upper().base()
    }

    fn identity_on(obj: &FinPoset) -> Self {
        StrictEpPair::identity(obj)
    }

    fn compose(&self, next: &Self) -> Result<Self, String> {
        self.then(next).map_err(|e: LiftError| e.to_string())
    }

    fn factor(up: &Self, down: &Self) -> StrictMap {
        up.emb().then(down.proj()).expect("both pairs share their upper object")
    }
}

#[derive(Clone, PartialEq)]
pub struct Diagram<M: EpMorphism> {
    index: FinPoset,
    objects: Vec<M::Object>,
    edges: Vec<Option<M>>,
}

pub type EpDiagram = Diagram<EpPair>;
pub type PartialEpDiagram = Diagram<StrictEpPair>;

impl<M: EpMorphism> Diagram<M> {
    /// Assembles a diagram. Identity edges are added where missing, and every
    /// other missing edge is composed from given ones through the lowest
    /// intermediate index. Functoriality is not checked here; see `validate`.
    pub fn new(index: FinPoset, objects: Vec<M::Object>, given: Vec<(Elem, Elem, M)>) -> Result<Self, DiagramError> {
        index.directedness_witness(&index.elements().collect::<Vec<_>>()).map_err(|e| match e {
            OrderError::EmptySubset => DiagramError::IndexNotDirected("index is empty".into()),
            other => DiagramError::IndexNotDirected(other.to_string()),
        })?;
        let n = index.len();
        if objects.len() != n {
            return Err(DiagramError::WrongObjectCount { expected: n, got: objects.len() });
        }
        let mut edges: Vec<Option<M>> = vec![None; n * n];
        for (i, j, m) in given {
            let (si, sj) = (index.id(i).to_string(), index.id(j).to_string());
            if !index.leq(i, j) {
                return Err(DiagramError::EdgeNotInOrder(si, sj));
            }
            if m.source() != &objects[i] || m.target() != &objects[j] {
                return Err(DiagramError::EdgeMismatch(si, sj));
            }
            if edges[i * n + j].replace(m).is_some() {
                return Err(DiagramError::DuplicateEdge(si, sj));
            }
        }
        for i in 0..n {
            if edges[i * n + i].is_none() {
                edges[i * n + i] = Some(M::identity_on(&objects[i]));
            }
        }
        loop {
            let mut progress = false;
            let mut missing = None;
            for i in 0..n {
                for k in 0..n {
                    if !index.lt(i, k) || edges[i * n + k].is_some() {
                        continue;
                    }
                    let via = (0..n).find(|&j| {
                        index.lt(i, j) && index.lt(j, k) && edges[i * n + j].is_some() && edges[j * n + k].is_some()
                    });
                    match via {
                        Some(j) => {
                            let first = edges[i * n + j].as_ref().expect("checked");
                            let second = edges[j * n + k].as_ref().expect("checked");
                            edges[i * n + k] = Some(first.compose(second).map_err(DiagramError::Composition)?);
                            progress = true;
                        }
                        None => missing = missing.or(Some((i, k))),
                    }
                }
            }
            if !progress {
                if let Some((i, k)) = missing {
                    return Err(DiagramError::MissingEdge(index.id(i).into(), index.id(k).into()));
                }
                break;
            }
        }
        let d = Diagram { index, objects, edges };
        d.validate()?;
        Ok(d)
    }

    /// A diagram with one object and only its identity.
    pub fn single(object: M::Object) -> Self {
        Diagram::new(FinPoset::point(), vec![object], Vec::new()).expect("single-object diagram")
    }

    pub fn index(&self) -> &FinPoset {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn object(&self, i: Elem) -> &M::Object {
        &self.objects[i]
    }

    pub fn objects(&self) -> &[M::Object] {
        &self.objects
    }

    /// The edge `D_i ⇄ D_j`; panics unless `i <= j`.
    pub fn edge(&self, i: Elem, j: Elem) -> &M {
        self.edges[i * self.len() + j]
            .as_ref()
            .unwrap_or_else(|| panic!("no edge {} -> {}", self.index.id(i), self.index.id(j)))
    }

    /// Edges between distinct comparable indexes.
    pub fn proper_edges(&self) -> impl Iterator<Item = (Elem, Elem, &M)> {
        let n = self.len();
        self.edges.iter().enumerate().filter_map(move |(e, m)| {
            let (i, j) = (e / n, e % n);
            m.as_ref().filter(|_| i != j).map(|m| (i, j, m))
        })
    }

    /// Edges along covering pairs of the index.
    pub fn hasse_edges(&self) -> Vec<(Elem, Elem, M)> {
        self.index
            .hasse_edges()
            .into_iter()
            .map(|(i, j)| (i, j, self.edge(i, j).clone()))
            .collect()
    }

    pub fn top(&self) -> Elem {
        self.index.top().expect("finite directed index has a top")
    }

    /// The upper bound of `i` and `j` used to factor embeddings: the minimal
    /// upper bound with the lowest index.
    pub fn chosen_bound(&self, i: Elem, j: Elem) -> Elem {
        let ubs = self.index.upper_bounds(&[i, j]);
        self.index.minimal_among(&ubs)[0]
    }

    /// `π_{j≤k} ∘ ε_{i≤k}` for the chosen bound `k`.
    pub fn transfer(&self, i: Elem, j: Elem) -> M::Map {
        self.transfer_via(i, j, self.chosen_bound(i, j))
    }

    pub fn transfer_via(&self, i: Elem, j: Elem, k: Elem) -> M::Map {
        M::factor(self.edge(i, k), self.edge(j, k))
    }

    /// Checks identity edges and `edges(j,k) ∘ edges(i,j) = edges(i,k)`.
    pub fn validate(&self) -> Result<(), DiagramError> {
        let n = self.len();
        for i in 0..n {
            if self.edge(i, i) != &M::identity_on(&self.objects[i]) {
                return Err(DiagramError::IdentityFailure(self.index.id(i).into()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.index.leq(i, j) {
                    continue;
                }
                for k in 0..n {
                    if k == j || !self.index.leq(j, k) {
                        continue;
                    }
                    let composite = self.edge(i, j).compose(self.edge(j, k));
                    if composite.as_ref() != Ok(self.edge(i, k)) {
                        return Err(DiagramError::FunctorialityFailure(
                            self.index.id(i).into(),
                            self.index.id(j).into(),
                            self.index.id(k).into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn validation_report(&self) -> Report {
        let mut r = Report::new();
        r.pass("index_directed");
        r.record("functoriality", self.validate().err().map(|e| e.to_string()));
        r
    }

    /// For every `i, j` and every pair of upper bounds `k, k'`, the factored
    /// maps through `k` and `k'` agree.
    pub fn choice_independence(&self, i: Elem, j: Elem) -> Option<String> {
        let ubs = self.index.upper_bounds(&[i, j]);
        let reference = self.transfer(i, j);
        for &k in &ubs {
            if self.transfer_via(i, j, k) != reference {
                return Some(format!(
                    "i={}, j={}: bound {} disagrees with bound {}",
                    self.index.id(i),
                    self.index.id(j),
                    self.index.id(k),
                    self.index.id(self.chosen_bound(i, j))
                ));
            }
        }
        None
    }

    pub fn choice_independence_report(&self) -> Report {
        let mut r = Report::new();
        let witness = self
            .index
            .elements()
            .flat_map(|i| self.index.elements().map(move |j| (i, j)))
            .find_map(|(i, j)| self.choice_independence(i, j));
        r.record("choice_independence", witness);
        r
    }
}

impl<M: EpMorphism> fmt::Debug for Diagram<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Diagram")
            .field("index", &self.index)
            .field("objects", &self.objects)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ep::make_ep;

    fn bottom_segment(n: usize, m: usize) -> EpPair {
        let a = FinPoset::chain(n);
        let b = FinPoset::chain(m);
        let emb = MonotoneMap::from_fn(&a, &b, |x| x).unwrap();
        let proj = MonotoneMap::from_fn(&b, &a, |y| y.min(n - 1)).unwrap();
        make_ep(emb, proj).unwrap()
    }

    #[test]
    fn single_object_is_valid() {
        let d = EpDiagram::single(FinPoset::antichain(2));
        assert!(d.validate().is_ok());
        assert_eq!(d.edge(0, 0), &EpPair::identity(&FinPoset::antichain(2)));
    }

    #[test]
    fn chain_fills_composites() {
        let d = EpDiagram::new(
            FinPoset::chain(3),
            vec![FinPoset::chain(1), FinPoset::chain(2), FinPoset::chain(3)],
            vec![(0, 1, bottom_segment(1, 2)), (1, 2, bottom_segment(2, 3))],
        )
        .unwrap();
        assert!(d.validate().is_ok());
        assert_eq!(d.edge(0, 2), &bottom_segment(1, 3));
        assert_eq!(d.proper_edges().count(), 3);
    }

    #[test]
    fn broken_triangle_is_reported() {
        let swap = make_ep(
            MonotoneMap::new(&FinPoset::antichain(2), &FinPoset::antichain(2), vec![1, 0]).unwrap(),
            MonotoneMap::new(&FinPoset::antichain(2), &FinPoset::antichain(2), vec![1, 0]).unwrap(),
        )
        .unwrap();
        let a2 = FinPoset::antichain(2);
        let d = EpDiagram::new(
            FinPoset::chain(3),
            vec![a2.clone(), a2.clone(), a2.clone()],
            vec![(0, 1, swap.clone()), (1, 2, EpPair::identity(&a2)), (0, 2, EpPair::identity(&a2))],
        );
        assert_eq!(d.unwrap_err(), DiagramError::FunctorialityFailure("0".into(), "1".into(), "2".into()));
    }

    #[test]
    fn rejects_undirected_index() {
        let err = EpDiagram::new(FinPoset::antichain(2), vec![FinPoset::point(), FinPoset::point()], vec![]);
        assert!(matches!(err, Err(DiagramError::IndexNotDirected(_))));
    }

    #[test]
    fn missing_edges_are_reported() {
        let err = EpDiagram::new(FinPoset::chain(2), vec![FinPoset::point(), FinPoset::chain(2)], vec![]);
        assert_eq!(err.unwrap_err(), DiagramError::MissingEdge("0".into(), "1".into()));
    }

    #[test]
    fn choice_through_two_bounds() {
        // 0, 1 below 2 below 3
        let index = FinPoset::generated("v", &["0", "1", "2", "3"], &[("0", "2"), ("1", "2"), ("2", "3")]).unwrap();
        let one = FinPoset::chain(1);
        let c2 = FinPoset::chain(2);
        let c3 = FinPoset::chain(3);
        let d = EpDiagram::new(
            index,
            vec![one.clone(), one.clone(), c2, c3],
            vec![
                (0, 2, bottom_segment(1, 2)),
                (1, 2, bottom_segment(1, 2)),
                (2, 3, bottom_segment(2, 3)),
            ],
        )
        .unwrap();
        assert!(d.validate().is_ok());
        assert_eq!(d.chosen_bound(0, 1), 2);
        assert_eq!(d.index().upper_bounds(&[0, 1]), vec![2, 3]);
        assert!(d.choice_independence(0, 1).is_none());
        assert!(d.choice_independence_report().all_pass());
        // i = j = k: the factored map is the identity by the section law
        assert_eq!(d.transfer_via(2, 2, 2), MonotoneMap::identity(d.object(2)));
    }
}
