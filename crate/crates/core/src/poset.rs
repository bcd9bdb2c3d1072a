//! Finite posets with a decidable order.
//!
//! Elements are the dense indices `0..size`. Small carriers store the order
//! as a full boolean matrix; function spaces above [`MATRIX_LIMIT`] elements
//! decide their pointwise order on demand from the underlying tables.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constructions::FunctionSpace;
use crate::error::{Error, Result};

/// Largest carrier whose order is materialized as a matrix.
pub const MATRIX_LIMIT: usize = 4096;

/// Default bound on the base-set size accepted by [`Poset::powerset_lattice`].
pub const DEFAULT_POWERSET_BOUND: usize = 6;

#[derive(Clone)]
enum Order {
    Matrix(Vec<bool>),
    Pointwise(Arc<FunctionSpace>),
}

/// How a poset came about; only used for labels and serialization metadata.
#[derive(Clone)]
pub(crate) enum Provenance {
    Plain,
    Lifted,
    Product { left: Arc<Poset>, right: Arc<Poset> },
    Exponential(Arc<FunctionSpace>),
}

#[derive(Clone)]
pub struct Poset {
    size: usize,
    labels: Option<Vec<String>>,
    order: Order,
    provenance: Provenance,
}

impl std::fmt::Debug for Poset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Poset")
            .field("size", &self.size)
            .field("labels", &self.labels)
            .finish_non_exhaustive()
    }
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        if self.size != other.size {
            return false;
        }
        match (&self.order, &other.order) {
            (Order::Matrix(a), Order::Matrix(b)) => a == b,
            (Order::Pointwise(a), Order::Pointwise(b)) if Arc::ptr_eq(a, b) => true,
            _ => (0..self.size).all(|i| (0..self.size).all(|j| self.leq(i, j) == other.leq(i, j))),
        }
    }
}

impl Eq for Poset {}

impl Poset {
    /// Validates a relation table against the partial-order axioms.
    pub fn new(leq: Vec<Vec<bool>>) -> Result<Self> {
        let size = leq.len();
        let mut flat = Vec::with_capacity(size * size);
        for row in &leq {
            if row.len() != size {
                return Err(Error::MalformedRelation {
                    expected: size,
                    found: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(size, flat)
    }

    pub fn from_flat(size: usize, flat: Vec<bool>) -> Result<Self> {
        if flat.len() != size * size {
            return Err(Error::MalformedRelation {
                expected: size,
                found: flat.len(),
            });
        }
        let poset = Self::from_matrix_unchecked(size, flat);
        poset.check_axioms()?;
        Ok(poset)
    }

    /// Builds a poset from the listed related pairs. Reflexive pairs must be present.
    pub fn from_pairs(size: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut flat = vec![false; size * size];
        for &(i, j) in pairs {
            for index in [i, j] {
                if index >= size {
                    return Err(Error::IndexOutOfRange { index, size });
                }
            }
            flat[i * size + j] = true;
        }
        Self::from_flat(size, flat)
    }

    pub(crate) fn from_matrix_unchecked(size: usize, flat: Vec<bool>) -> Self {
        Poset {
            size,
            labels: None,
            order: Order::Matrix(flat),
            provenance: Provenance::Plain,
        }
    }

    pub(crate) fn from_fn_unchecked(size: usize, leq: impl Fn(usize, usize) -> bool) -> Self {
        let mut flat = vec![false; size * size];
        for i in 0..size {
            for j in 0..size {
                flat[i * size + j] = leq(i, j);
            }
        }
        Self::from_matrix_unchecked(size, flat)
    }

    pub(crate) fn function_space(space: Arc<FunctionSpace>) -> Self {
        let size = space.len();
        let order = if size <= MATRIX_LIMIT {
            let mut flat = vec![false; size * size];
            for i in 0..size {
                for j in 0..size {
                    flat[i * size + j] = space.pointwise_leq(i, j);
                }
            }
            Order::Matrix(flat)
        } else {
            Order::Pointwise(space.clone())
        };
        Poset {
            size,
            labels: None,
            order,
            provenance: Provenance::Exponential(space),
        }
    }

    pub(crate) fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub(crate) fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size {
            return Err(Error::MalformedRelation {
                expected: self.size,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// The one-element poset.
    pub fn one() -> Self {
        Self::chain(1)
    }

    /// The two-element chain `0 ⊑ 1`.
    pub fn two() -> Self {
        Self::chain(2)
    }

    /// The chain `0 ⊑ 1 ⊑ … ⊑ n-1`.
    pub fn chain(n: usize) -> Self {
        Self::from_fn_unchecked(n, |i, j| i <= j)
    }

    /// `n` pairwise incomparable elements.
    pub fn discrete(n: usize) -> Self {
        Self::from_fn_unchecked(n, |i, j| i == j)
    }

    /// All subsets of an `n`-element set under inclusion; element `mask` is the
    /// subset whose members are the set bits of `mask`.
    pub fn powerset_lattice(n: usize) -> Result<Self> {
        Self::powerset_lattice_bounded(n, DEFAULT_POWERSET_BOUND)
    }

    pub fn powerset_lattice_bounded(n: usize, bound: usize) -> Result<Self> {
        if n > bound {
            return Err(Error::SizeLimitExceeded {
                what: "powerset base",
                size: n,
                limit: bound,
            });
        }
        let size = 1usize << n;
        let labels = (0..size)
            .map(|mask| {
                if mask == 0 {
                    "∅".to_string()
                } else {
                    let members: Vec<String> =
                        (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b.to_string()).collect();
                    format!("{{{}}}", members.join(","))
                }
            })
            .collect();
        Self::from_fn_unchecked(size, |i, j| i & !j == 0).with_labels(labels)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        match &self.order {
            Order::Matrix(flat) => flat[i * self.size + j],
            Order::Pointwise(space) => space.pointwise_leq(i, j),
        }
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    pub fn has_matrix(&self) -> bool {
        matches!(self.order, Order::Matrix(_))
    }

    pub fn label(&self, i: usize) -> String {
        if let Some(labels) = &self.labels {
            return labels[i].clone();
        }
        match &self.provenance {
            Provenance::Exponential(space) => {
                let cells: Vec<String> =
                    space.table(i).iter().map(|&y| space.cod().label(y)).collect();
                format!("[{}]", cells.join(","))
            }
            Provenance::Product { left, right } => {
                let (a, b) = (i / right.size(), i % right.size());
                format!("({},{})", left.label(a), right.label(b))
            }
            _ => i.to_string(),
        }
    }

    pub fn explicit_labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.size {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                size: self.size,
            })
        }
    }

    pub fn check_subset(&self, subset: &[usize]) -> Result<()> {
        subset.iter().try_for_each(|&i| self.check_index(i))
    }

    /// Re-checks reflexivity, antisymmetry and transitivity exhaustively.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.size;
        for i in 0..n {
            if !self.leq(i, i) {
                return Err(Error::ReflexivityViolation(i));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.leq(i, j) && self.leq(j, i) {
                    return Err(Error::AntisymmetryViolation(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !self.leq(i, j) {
                    continue;
                }
                for k in 0..n {
                    if self.leq(j, k) && !self.leq(i, k) {
                        return Err(Error::TransitivityViolation(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    /// Every pair of members has an upper bound among the members.
    pub fn is_semidirected(&self, subset: &[usize]) -> bool {
        subset.iter().all(|&a| {
            subset
                .iter()
                .all(|&b| subset.iter().any(|&c| self.leq(a, c) && self.leq(b, c)))
        })
    }

    pub fn is_directed(&self, subset: &[usize]) -> bool {
        !subset.is_empty() && self.is_semidirected(subset)
    }

    pub fn is_upper_bound(&self, subset: &[usize], candidate: usize) -> bool {
        subset.iter().all(|&s| self.leq(s, candidate))
    }

    /// Least element of the given candidates, if one exists. Runs in linear time:
    /// a single pass keeps the running minimum candidate, then it is verified.
    fn least_among(&self, candidates: impl Iterator<Item = usize> + Clone) -> Option<usize> {
        let mut best = None;
        for c in candidates.clone() {
            match best {
                None => best = Some(c),
                Some(b) if self.leq(c, b) => best = Some(c),
                _ => {}
            }
        }
        let best = best?;
        candidates.into_iter().all(|c| self.leq(best, c)).then_some(best)
    }

    /// The least upper bound of an arbitrary subset, when it exists.
    pub fn supremum_of(&self, subset: &[usize]) -> Option<usize> {
        self.least_among(self.elements().filter(|&x| self.is_upper_bound(subset, x)))
    }

    pub fn least_element(&self) -> Option<usize> {
        self.least_among(self.elements())
    }

    pub fn greatest_element(&self) -> Option<usize> {
        let mut best = None;
        for c in self.elements() {
            match best {
                None => best = Some(c),
                Some(b) if self.leq(b, c) => best = Some(c),
                _ => {}
            }
        }
        let best = best?;
        self.elements().all(|c| self.leq(c, best)).then_some(best)
    }

    pub fn bottom(&self) -> Result<usize> {
        self.least_element().ok_or(Error::NotPointed)
    }

    pub fn is_maximal(&self, x: usize) -> bool {
        self.elements().all(|y| !self.lt(x, y))
    }

    /// Supremum of a finite prefix of an ascending chain that has visibly
    /// stabilized: either its last two entries coincide or its last entry is
    /// maximal, so every continuation stays put.
    pub fn omega_chain_sup(&self, chain: &[usize]) -> Result<usize> {
        self.check_subset(chain)?;
        for (n, w) in chain.windows(2).enumerate() {
            if !self.leq(w[0], w[1]) {
                return Err(Error::NotAscending(n));
            }
        }
        let &last = chain.last().ok_or(Error::NotStabilized)?;
        let repeated = chain.len() >= 2 && chain[chain.len() - 2] == last;
        if repeated || self.is_maximal(last) {
            Ok(last)
        } else {
            Err(Error::NotStabilized)
        }
    }

    /// Supremum of a semidirected (possibly empty) family in a pointed poset,
    /// obtained by adjoining the least element to make the family directed.
    pub fn semidirected_sup(&self, subset: &[usize]) -> Result<usize> {
        self.check_subset(subset)?;
        let bottom = self.bottom()?;
        if !self.is_semidirected(subset) {
            return Err(Error::NotSemidirected);
        }
        let mut extended = subset.to_vec();
        extended.push(bottom);
        self.supremum_of(&extended).ok_or(Error::NotSemidirected)
    }

    /// Cover pairs `(i, j)`: `i ⊏ j` with nothing strictly between.
    pub fn hasse_covers(&self) -> Vec<(usize, usize)> {
        let mut covers = Vec::new();
        for i in self.elements() {
            for j in self.elements() {
                if self.lt(i, j) && !self.elements().any(|k| self.lt(i, k) && self.lt(k, j)) {
                    covers.push((i, j));
                }
            }
        }
        covers
    }

    /// A linear extension: repeatedly takes the smallest-index element whose
    /// strict predecessors have all been emitted.
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.size;
        let mut pending: Vec<usize> = (0..n)
            .map(|j| self.elements().filter(|&i| self.lt(i, j)).count())
            .collect();
        let mut done = vec![false; n];
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let next = (0..n).find(|&j| !done[j] && pending[j] == 0).expect("orders are acyclic");
            done[next] = true;
            order.push(next);
            for (j, count) in pending.iter_mut().enumerate() {
                if self.lt(next, j) {
                    *count -= 1;
                }
            }
        }
        order
    }

    pub fn to_json(&self) -> PosetJson {
        let leq = self
            .elements()
            .flat_map(|i| self.elements().filter(move |&j| self.leq(i, j)).map(move |j| [i, j]))
            .collect();
        let (kind, dom, cod) = match &self.provenance {
            Provenance::Plain => (None, None, None),
            Provenance::Lifted => (Some("lifted".to_string()), None, None),
            Provenance::Product { left, right } => (
                Some("product".to_string()),
                Some(Box::new(left.to_json())),
                Some(Box::new(right.to_json())),
            ),
            Provenance::Exponential(space) => (
                Some("exponential".to_string()),
                Some(Box::new(space.dom().to_json())),
                Some(Box::new(space.cod().to_json())),
            ),
        };
        PosetJson {
            size: self.size,
            labels: self.labels.clone(),
            leq,
            kind,
            dom,
            cod,
            embed: None,
        }
    }

    pub fn from_json(json: &PosetJson) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = json.leq.iter().map(|p| (p[0], p[1])).collect();
        let poset = Self::from_pairs(json.size, &pairs)?;
        match &json.labels {
            Some(labels) => poset.with_labels(labels.clone()),
            None => Ok(poset),
        }
    }

    /// Graphviz rendering of the Hasse diagram, lower element pointing to upper.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph poset {\n  rankdir=BT;\n");
        for i in self.elements() {
            let label = self.label(i).replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(out, "  n{i} [label=\"{label}\"];");
        }
        for (i, j) in self.hasse_covers() {
            let _ = writeln!(out, "  n{i} -> n{j};");
        }
        out.push_str("}\n");
        out
    }
}

/// Wire format for posets. `leq` lists every related pair, reflexive ones
/// included, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub leq: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dom: Option<Box<PosetJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cod: Option<Box<PosetJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embed: Option<Vec<usize>>,
}

/// Distinct members of a subset, in ascending order.
pub fn normalize_subset(subset: &[usize]) -> Vec<usize> {
    let mut seen = HashSet::new();
    let mut out: Vec<usize> = subset.iter().copied().filter(|x| seen.insert(*x)).collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_chain() -> Poset {
        Poset::chain(3)
    }

    #[test]
    fn validate_examples() {
        let one = Poset::new(vec![vec![true]]).unwrap();
        assert_eq!(one.size(), 1);
        assert_eq!(
            Poset::new(vec![vec![false, false], vec![false, true]]).unwrap_err(),
            Error::ReflexivityViolation(0)
        );
        assert_eq!(
            Poset::new(vec![vec![true, true], vec![true, true]]).unwrap_err(),
            Error::AntisymmetryViolation(0, 1)
        );
        assert_eq!(
            Poset::from_pairs(3, &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)]).unwrap_err(),
            Error::TransitivityViolation(0, 1, 2)
        );
        assert!(matches!(
            Poset::new(vec![vec![true], vec![true, true]]),
            Err(Error::MalformedRelation { .. })
        ));
    }

    #[test]
    fn directedness() {
        let two = Poset::two();
        assert!(two.is_directed(&[0, 1]));
        assert!(!two.is_directed(&[]));
        assert!(two.is_semidirected(&[]));
        assert!(!Poset::discrete(2).is_directed(&[0, 1]));
    }

    #[test]
    fn suprema() {
        assert_eq!(Poset::two().supremum_of(&[0, 1]), Some(1));
        let p2 = Poset::powerset_lattice(2).unwrap();
        assert_eq!(p2.supremum_of(&[0b01, 0b10]), Some(0b11));
        assert_eq!(Poset::discrete(2).supremum_of(&[0, 1]), None);
        // empty family: the least element
        assert_eq!(Poset::two().supremum_of(&[]), Some(0));
    }

    #[test]
    fn least_elements() {
        assert_eq!(Poset::two().least_element(), Some(0));
        assert_eq!(Poset::discrete(2).least_element(), None);
        assert_eq!(Poset::powerset_lattice(3).unwrap().least_element(), Some(0));
        assert_eq!(Poset::chain(0).least_element(), None);
    }

    #[test]
    fn omega_chains() {
        assert_eq!(Poset::two().omega_chain_sup(&[0, 1, 1]), Ok(1));
        assert_eq!(Poset::one().omega_chain_sup(&[0]), Ok(0));
        assert_eq!(three_chain().omega_chain_sup(&[0, 1, 1, 2]), Ok(2));
        assert_eq!(three_chain().omega_chain_sup(&[0, 2, 1]), Err(Error::NotAscending(1)));
        assert_eq!(three_chain().omega_chain_sup(&[0, 1]), Err(Error::NotStabilized));
        assert_eq!(three_chain().omega_chain_sup(&[]), Err(Error::NotStabilized));
    }

    #[test]
    fn semidirected_suprema() {
        let two = Poset::two();
        assert_eq!(two.semidirected_sup(&[]), Ok(0));
        assert_eq!(two.semidirected_sup(&[1]), Ok(1));
        let p2 = Poset::powerset_lattice(2).unwrap();
        assert_eq!(p2.semidirected_sup(&[0, 0b01]), Ok(0b01));
        assert_eq!(p2.semidirected_sup(&[0b01, 0b10]), Err(Error::NotSemidirected));
        assert_eq!(Poset::discrete(2).semidirected_sup(&[0]), Err(Error::NotPointed));
    }

    #[test]
    fn covers() {
        assert_eq!(Poset::two().hasse_covers(), vec![(0, 1)]);
        assert_eq!(three_chain().hasse_covers(), vec![(0, 1), (1, 2)]);
        let p2 = Poset::powerset_lattice(2).unwrap();
        assert_eq!(p2.hasse_covers(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn powerset_sizes() {
        assert_eq!(Poset::powerset_lattice(0).unwrap().size(), 1);
        let p2 = Poset::powerset_lattice(2).unwrap();
        assert_eq!((p2.size(), p2.least_element(), p2.greatest_element()), (4, Some(0), Some(3)));
        assert_eq!(Poset::powerset_lattice(3).unwrap().size(), 8);
        assert!(matches!(Poset::powerset_lattice(7), Err(Error::SizeLimitExceeded { .. })));
    }

    #[test]
    fn json_is_sorted_and_roundtrips() {
        let two = Poset::two().with_labels(vec!["a".into(), "b".into()]).unwrap();
        let text = serde_json::to_string(&two.to_json()).unwrap();
        assert_eq!(text, r#"{"size":2,"labels":["a","b"],"leq":[[0,0],[0,1],[1,1]]}"#);
        let back = Poset::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, two);
        assert_eq!(back.label(1), "b");
    }

    #[test]
    fn dot_export() {
        let dot = Poset::two().to_dot();
        assert!(dot.contains("n0 [label=\"0\"];"));
        assert!(dot.contains("n0 -> n1;"));
        assert_eq!(dot.matches("->").count(), 1);
    }

    #[test]
    fn linear_extension_respects_order() {
        let p = Poset::powerset_lattice(3).unwrap();
        let ext = p.linear_extension();
        let pos: Vec<usize> = {
            let mut pos = vec![0; ext.len()];
            for (k, &x) in ext.iter().enumerate() {
                pos[x] = k;
            }
            pos
        };
        for i in p.elements() {
            for j in p.elements() {
                if p.lt(i, j) {
                    assert!(pos[i] < pos[j]);
                }
            }
        }
    }
}
