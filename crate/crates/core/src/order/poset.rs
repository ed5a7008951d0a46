use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::OrderError;

/// Index of an element inside its poset.
pub type Elem = usize;

/// A finite partial order. Elements are dense indices `0..len()`, each carrying
/// a unique string identifier used for display and serialization.
///
/// Cloning is cheap; the carrier and relation are shared.
#[derive(Clone)]
pub struct FinPoset {
    inner: Arc<PosetData>,
}

struct PosetData {
    name: String,
    ids: Vec<String>,
    index: HashMap<String, Elem>,
    words: usize,
    // row-major bitset: bit `j` of row `i` is set iff `i <= j`
    bits: Vec<u64>,
}

impl FinPoset {
    /// Validates a raw relation exactly as given: reflexivity and transitivity
    /// are checked, not closed.
    pub fn check<S: AsRef<str>>(
        name: impl Into<String>,
        elements: &[S],
        relation: &[(S, S)],
    ) -> Result<Self, OrderError> {
        let (ids, index) = index_ids(elements)?;
        let n = ids.len();
        let mut leq = vec![false; n * n];
        for (a, b) in relation {
            let a = lookup(&index, a.as_ref())?;
            let b = lookup(&index, b.as_ref())?;
            leq[a * n + b] = true;
        }
        Self::from_matrix(name.into(), ids, index, &leq)
    }

    /// Builds a poset from generating pairs: reflexivity is implicit and the
    /// relation is transitively closed before antisymmetry is checked.
    pub fn generated<S: AsRef<str>>(
        name: impl Into<String>,
        elements: &[S],
        relation: &[(S, S)],
    ) -> Result<Self, OrderError> {
        let (ids, index) = index_ids(elements)?;
        let n = ids.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in relation {
            let a = lookup(&index, a.as_ref())?;
            let b = lookup(&index, b.as_ref())?;
            leq[a * n + b] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        Self::from_matrix(name.into(), ids, index, &leq)
    }

    /// Builds a poset from an order predicate on indices; the predicate is
    /// validated like a raw relation.
    pub fn from_fn(
        name: impl Into<String>,
        ids: Vec<String>,
        leq: impl Fn(Elem, Elem) -> bool,
    ) -> Result<Self, OrderError> {
        let (ids, index) = index_ids(&ids)?;
        let n = ids.len();
        let mut m = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = leq(i, j);
            }
        }
        Self::from_matrix(name.into(), ids, index, &m)
    }

    fn from_matrix(
        name: String,
        ids: Vec<String>,
        index: HashMap<String, Elem>,
        leq: &[bool],
    ) -> Result<Self, OrderError> {
        let n = ids.len();
        let words = n.div_ceil(64).max(1);
        let mut bits = vec![0u64; n * words];
        for i in 0..n {
            for j in 0..n {
                if leq[i * n + j] {
                    bits[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        let data = PosetData { name, ids, index, words, bits };
        data.validate()?;
        Ok(FinPoset { inner: Arc::new(data) })
    }

    pub fn empty() -> Self {
        Self::from_fn("0", Vec::new(), |_, _| false).expect("empty poset")
    }

    pub fn point() -> Self {
        Self::from_fn("1", vec!["*".into()], |_, _| true).expect("point")
    }

    /// The `n`-chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let ids = (0..n).map(|i| i.to_string()).collect();
        Self::from_fn(format!("chain{n}"), ids, |a, b| a <= b).expect("chain")
    }

    /// The discrete poset on `n` elements named `a`, `b`, ...
    pub fn antichain(n: usize) -> Self {
        let ids = (0..n)
            .map(|i| {
                if i < 26 {
                    ((b'a' + i as u8) as char).to_string()
                } else {
                    format!("x{i}")
                }
            })
            .collect();
        Self::from_fn(format!("antichain{n}"), ids, |a, b| a == b).expect("antichain")
    }

    /// Same carrier and order under a different name.
    pub fn renamed(&self, name: impl Into<String>) -> Self {
        let d = &self.inner;
        FinPoset {
            inner: Arc::new(PosetData {
                name: name.into(),
                ids: d.ids.clone(),
                index: d.index.clone(),
                words: d.words,
                bits: d.bits.clone(),
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn len(&self) -> usize {
        self.inner.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.ids.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.len()
    }

    pub fn id(&self, x: Elem) -> &str {
        &self.inner.ids[x]
    }

    pub fn ids(&self) -> &[String] {
        &self.inner.ids
    }

    pub fn lookup(&self, id: &str) -> Option<Elem> {
        self.inner.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<Elem, OrderError> {
        lookup(&self.inner.index, id)
    }

    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        let d = &self.inner;
        d.bits[a * d.words + b / 64] >> (b % 64) & 1 == 1
    }

    #[inline]
    pub fn lt(&self, a: Elem, b: Elem) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: Elem, b: Elem) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// The least element, if any.
    pub fn bottom(&self) -> Option<Elem> {
        self.elements().find(|&b| self.elements().all(|x| self.leq(b, x)))
    }

    /// The greatest element, if any.
    pub fn top(&self) -> Option<Elem> {
        self.elements().find(|&t| self.elements().all(|x| self.leq(x, t)))
    }

    /// Upper bounds of `xs` within the whole poset.
    pub fn upper_bounds(&self, xs: &[Elem]) -> Vec<Elem> {
        self.elements()
            .filter(|&u| xs.iter().all(|&x| self.leq(x, u)))
            .collect()
    }

    /// Minimal elements of `xs`, in index order.
    pub fn minimal_among(&self, xs: &[Elem]) -> Vec<Elem> {
        xs.iter()
            .copied()
            .filter(|&m| !xs.iter().any(|&y| self.lt(y, m)))
            .collect()
    }

    /// The least upper bound of `xs` in the whole poset, if it exists.
    pub fn join(&self, xs: &[Elem]) -> Option<Elem> {
        let ubs = self.upper_bounds(xs);
        ubs.iter()
            .copied()
            .find(|&u| ubs.iter().all(|&v| self.leq(u, v)))
    }

    /// True iff `subset` is inhabited and every pair of members has an upper
    /// bound among the members.
    pub fn is_directed(&self, subset: &[Elem]) -> bool {
        self.directedness_witness(subset).is_ok()
    }

    /// Like [`FinPoset::is_directed`] on identifiers.
    pub fn is_directed_ids<S: AsRef<str>>(&self, subset: &[S]) -> Result<bool, OrderError> {
        let xs = subset
            .iter()
            .map(|s| self.require(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.is_directed(&xs))
    }

    /// `Ok(())` if directed, otherwise the failure with a witness pair.
    pub(crate) fn directedness_witness(&self, subset: &[Elem]) -> Result<(), OrderError> {
        if subset.is_empty() {
            return Err(OrderError::EmptySubset);
        }
        for (n, &a) in subset.iter().enumerate() {
            for &b in &subset[n + 1..] {
                if !subset.iter().any(|&u| self.leq(a, u) && self.leq(b, u)) {
                    return Err(OrderError::NotDirected(self.id(a).into(), self.id(b).into()));
                }
            }
        }
        Ok(())
    }

    /// Least upper bound of a directed family given as raw members: the
    /// greatest member, which finiteness guarantees.
    pub fn lub_of_directed(&self, members: &[Elem]) -> Result<Elem, OrderError> {
        self.directedness_witness(members)?;
        let top = members
            .iter()
            .copied()
            .find(|&m| members.iter().all(|&x| self.leq(x, m)))
            .expect("finite directed family has a greatest member");
        Ok(top)
    }

    /// Covering pairs `(x, y)` with `x < y` and nothing strictly between.
    pub fn hasse_edges(&self) -> Vec<(Elem, Elem)> {
        let mut edges = Vec::new();
        for x in self.elements() {
            for y in self.elements() {
                if self.lt(x, y) && !self.elements().any(|z| self.lt(x, z) && self.lt(z, y)) {
                    edges.push((x, y));
                }
            }
        }
        edges
    }

    /// An ordering of the elements in which every element precedes everything
    /// strictly above it. Ties broken by index.
    pub fn linear_extension(&self) -> Vec<Elem> {
        let mut placed = vec![false; self.len()];
        let mut out = Vec::with_capacity(self.len());
        while out.len() < self.len() {
            let next = self
                .elements()
                .find(|&x| !placed[x] && !self.elements().any(|y| !placed[y] && self.lt(y, x)))
                .expect("acyclic");
            placed[next] = true;
            out.push(next);
        }
        out
    }

    /// All related pairs, including reflexive ones, in row-major order.
    pub fn relation(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if self.leq(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn ptr_eq(&self, other: &FinPoset) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }
}

/// Structural equality: same identifiers in the same order and the same
/// relation. Names are ignored.
impl PartialEq for FinPoset {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other) || (self.inner.ids == other.inner.ids && self.inner.bits == other.inner.bits)
    }
}

impl Eq for FinPoset {}

impl fmt::Debug for FinPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinPoset({}; {:?})", self.name(), self.ids())
    }
}

impl PosetData {
    fn validate(&self) -> Result<(), OrderError> {
        let n = self.ids.len();
        let leq = |a: usize, b: usize| self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1;
        for a in 0..n {
            if !leq(a, a) {
                return Err(OrderError::NotReflexive(self.ids[a].clone()));
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if leq(a, b) && leq(b, a) {
                    return Err(OrderError::NotAntisymmetric(self.ids[a].clone(), self.ids[b].clone()));
                }
            }
        }
        // transitivity: whenever a <= b, row(b) must be contained in row(a)
        for a in 0..n {
            for b in 0..n {
                if a == b || !leq(a, b) {
                    continue;
                }
                for w in 0..self.words {
                    let missing = self.bits[b * self.words + w] & !self.bits[a * self.words + w];
                    if missing != 0 {
                        let c = w * 64 + missing.trailing_zeros() as usize;
                        return Err(OrderError::NotTransitive(
                            self.ids[a].clone(),
                            self.ids[b].clone(),
                            self.ids[c].clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn index_ids<S: AsRef<str>>(elements: &[S]) -> Result<(Vec<String>, HashMap<String, Elem>), OrderError> {
    let mut ids = Vec::with_capacity(elements.len());
    let mut index = HashMap::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        let id = e.as_ref().to_string();
        if index.insert(id.clone(), i).is_some() {
            return Err(OrderError::DuplicateElement(id));
        }
        ids.push(id);
    }
    Ok((ids, index))
}

fn lookup(index: &HashMap<String, Elem>, id: &str) -> Result<Elem, OrderError> {
    index
        .get(id)
        .copied()
        .ok_or_else(|| OrderError::UnknownElement(id.to_string()))
}

/// A nonempty subset whose members are pairwise bounded within the subset.
#[derive(Clone, Debug)]
pub struct DirectedSubset {
    ambient: FinPoset,
    members: Vec<Elem>,
}

impl DirectedSubset {
    pub fn new(ambient: &FinPoset, members: Vec<Elem>) -> Result<Self, OrderError> {
        if let Some(&bad) = members.iter().find(|&&m| m >= ambient.len()) {
            return Err(OrderError::UnknownElement(format!("#{bad}")));
        }
        ambient.directedness_witness(&members)?;
        Ok(DirectedSubset { ambient: ambient.clone(), members })
    }

    pub fn from_ids<S: AsRef<str>>(ambient: &FinPoset, ids: &[S]) -> Result<Self, OrderError> {
        let members = ids
            .iter()
            .map(|s| ambient.require(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ambient, members)
    }

    pub fn ambient(&self) -> &FinPoset {
        &self.ambient
    }

    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    /// The greatest member, which is the least upper bound in the ambient poset.
    pub fn lub(&self) -> Elem {
        self.ambient
            .lub_of_directed(&self.members)
            .expect("validated on construction")
    }
}

/// Least upper bound of a directed subset given by identifiers.
pub fn directed_lub<S: AsRef<str>>(poset: &FinPoset, subset: &[S]) -> Result<Elem, OrderError> {
    Ok(DirectedSubset::from_ids(poset, subset)?.lub())
}
