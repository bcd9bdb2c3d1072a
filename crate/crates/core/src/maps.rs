//! Monotone (equivalently, on finite carriers, Scott-continuous) maps.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::{Poset, Provenance};

/// Default source-size bound for the exhaustive directed-subset check.
pub const DEFAULT_CONTINUITY_BOUND: usize = 12;

/// Default cap on the number of maps produced by an enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: usize = 200_000;

pub(crate) fn same_poset(a: &Arc<Poset>, b: &Arc<Poset>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A total, order-preserving function between finite posets, given by its table.
#[derive(Clone)]
pub struct MonotoneMap {
    source: Arc<Poset>,
    target: Arc<Poset>,
    table: Vec<usize>,
}

impl std::fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MonotoneMap{:?}", self.table)
    }
}

/// Maps are equal when their tables are.
impl PartialEq for MonotoneMap {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
    }
}

impl Eq for MonotoneMap {}

impl MonotoneMap {
    pub fn new(source: Arc<Poset>, target: Arc<Poset>, table: Vec<usize>) -> Result<Self> {
        check_table_shape(&source, &target, &table)?;
        check_monotone(&source, &target, &table)?;
        Ok(MonotoneMap {
            source,
            target,
            table,
        })
    }

    /// For tables that are monotone by construction (composites and the like).
    pub(crate) fn from_trusted(source: Arc<Poset>, target: Arc<Poset>, table: Vec<usize>) -> Self {
        debug_assert_eq!(table.len(), source.size());
        MonotoneMap {
            source,
            target,
            table,
        }
    }

    pub fn identity(poset: Arc<Poset>) -> Self {
        let table = poset.elements().collect();
        Self::from_trusted(poset.clone(), poset, table)
    }

    pub fn constant(source: Arc<Poset>, target: Arc<Poset>, value: usize) -> Result<Self> {
        target.check_index(value)?;
        let table = vec![value; source.size()];
        Ok(Self::from_trusted(source, target, table))
    }

    pub fn source(&self) -> &Arc<Poset> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Poset> {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn into_table(self) -> Vec<usize> {
        self.table
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &MonotoneMap) -> Result<MonotoneMap> {
        compose(self, inner)
    }

    pub fn is_endo(&self) -> bool {
        same_poset(&self.source, &self.target)
    }

    pub fn is_scott_continuous(&self) -> Result<bool> {
        self.is_scott_continuous_bounded(DEFAULT_CONTINUITY_BOUND)
    }

    /// Checks `m(⊔S) = ⊔m(S)` over every directed subset `S` of the source.
    pub fn is_scott_continuous_bounded(&self, bound: usize) -> Result<bool> {
        preserves_directed_sups(&self.source, &self.target, &self.table, bound)
    }

    pub fn is_strict(&self) -> Result<bool> {
        Ok(self.apply(self.source.bottom()?) == self.target.bottom()?)
    }

    /// `m(x) ⊑ x` everywhere.
    pub fn is_deflation(&self) -> Result<bool> {
        if !self.is_endo() {
            return Err(Error::NotEndo);
        }
        Ok(self.source.elements().all(|x| self.source.leq(self.apply(x), x)))
    }

    /// The monotone inverse, when the map is a bijection whose inverse is monotone.
    pub fn inverse(&self) -> Option<MonotoneMap> {
        if self.source.size() != self.target.size() {
            return None;
        }
        let mut inverse = vec![usize::MAX; self.target.size()];
        for (x, &y) in self.table.iter().enumerate() {
            if inverse[y] != usize::MAX {
                return None;
            }
            inverse[y] = x;
        }
        check_monotone(&self.target, &self.source, &inverse).ok()?;
        Some(Self::from_trusted(self.target.clone(), self.source.clone(), inverse))
    }

    pub fn to_json(&self, source: &str, target: &str) -> MapJson {
        MapJson {
            source: source.to_string(),
            target: target.to_string(),
            table: self.table.clone(),
        }
    }
}

/// Wire format for maps; posets are referred to by caller-chosen ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub source: String,
    pub target: String,
    pub table: Vec<usize>,
}

pub(crate) fn check_table_shape(source: &Poset, target: &Poset, table: &[usize]) -> Result<()> {
    if table.len() != source.size() {
        return Err(Error::MalformedRelation {
            expected: source.size(),
            found: table.len(),
        });
    }
    target.check_subset(table)
}

/// Verifies order preservation. Matrix-ordered sources are checked over all
/// related pairs. Function spaces are checked over single-coordinate raises:
/// any `f ⊑ g` is reached by repeatedly raising `f` at a maximal coordinate
/// where it differs from `g`, and every intermediate stays monotone.
pub fn check_monotone(source: &Poset, target: &Poset, table: &[usize]) -> Result<()> {
    if let (false, Provenance::Exponential(space)) = (source.has_matrix(), source.provenance()) {
        let dom = space.dom();
        let cod = space.cod();
        let mut probe = Vec::with_capacity(dom.size());
        for f in 0..space.len() {
            probe.clear();
            probe.extend_from_slice(space.table(f));
            for x in dom.elements() {
                let old = probe[x];
                for v in cod.elements().filter(|&v| cod.lt(old, v)) {
                    probe[x] = v;
                    if let Some(g) = space.index_of(&probe) {
                        if !target.leq(table[f], table[g]) {
                            return Err(Error::NotMonotone(f, g));
                        }
                    }
                }
                probe[x] = old;
            }
        }
        return Ok(());
    }
    for i in source.elements() {
        for j in source.elements() {
            if source.leq(i, j) && !target.leq(table[i], table[j]) {
                return Err(Error::NotMonotone(i, j));
            }
        }
    }
    Ok(())
}

/// Directed-supremum preservation for an arbitrary table, monotone or not.
pub fn preserves_directed_sups(
    source: &Poset,
    target: &Poset,
    table: &[usize],
    bound: usize,
) -> Result<bool> {
    let n = source.size();
    if n > bound {
        return Err(Error::SizeLimitExceeded {
            what: "continuity check source",
            size: n,
            limit: bound,
        });
    }
    check_table_shape(source, target, table)?;
    let mut subset = Vec::with_capacity(n);
    let mut image = Vec::with_capacity(n);
    for mask in 1u64..(1u64 << n) {
        subset.clear();
        subset.extend((0..n).filter(|&b| mask >> b & 1 == 1));
        if !source.is_directed(&subset) {
            continue;
        }
        let sup = source
            .supremum_of(&subset)
            .expect("finite directed subsets contain their supremum");
        image.clear();
        image.extend(subset.iter().map(|&x| table[x]));
        if target.supremum_of(&image) != Some(table[sup]) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn identity(poset: Arc<Poset>) -> MonotoneMap {
    MonotoneMap::identity(poset)
}

/// `outer ∘ inner`.
pub fn compose(outer: &MonotoneMap, inner: &MonotoneMap) -> Result<MonotoneMap> {
    if !same_poset(&inner.target, &outer.source) {
        return Err(Error::SourceTargetMismatch);
    }
    let table = inner.table.iter().map(|&y| outer.table[y]).collect();
    Ok(MonotoneMap::from_trusted(inner.source.clone(), outer.target.clone(), table))
}

/// `r ∘ s = id`.
pub fn is_continuous_retract(section: &MonotoneMap, retraction: &MonotoneMap) -> Result<bool> {
    if !same_poset(&section.target, &retraction.source)
        || !same_poset(&retraction.target, &section.source)
    {
        return Err(Error::SourceTargetMismatch);
    }
    Ok(section
        .source
        .elements()
        .all(|x| retraction.apply(section.apply(x)) == x))
}

/// An embedding `D → E` with its projection `E → D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpPair {
    embedding: MonotoneMap,
    projection: MonotoneMap,
}

impl EpPair {
    /// Certifies `p ∘ e = id` and that `e ∘ p` is deflationary.
    pub fn new(embedding: MonotoneMap, projection: MonotoneMap) -> Result<Self> {
        if !same_poset(&embedding.target, &projection.source)
            || !same_poset(&projection.target, &embedding.source)
        {
            return Err(Error::SourceTargetMismatch);
        }
        if let Some(x) = embedding
            .source
            .elements()
            .find(|&x| projection.apply(embedding.apply(x)) != x)
        {
            return Err(Error::NotSection(x));
        }
        let upper = &embedding.target;
        if let Some(y) = upper
            .elements()
            .find(|&y| !upper.leq(embedding.apply(projection.apply(y)), y))
        {
            return Err(Error::NotDeflation(y));
        }
        Ok(EpPair {
            embedding,
            projection,
        })
    }

    pub fn embedding(&self) -> &MonotoneMap {
        &self.embedding
    }

    pub fn projection(&self) -> &MonotoneMap {
        &self.projection
    }

    pub fn lower(&self) -> &Arc<Poset> {
        self.embedding.source()
    }

    pub fn upper(&self) -> &Arc<Poset> {
        self.embedding.target()
    }

    /// The pair `(e' ∘ e, p ∘ p')` for `next = (e', p')` above this one.
    pub fn then(&self, next: &EpPair) -> Result<EpPair> {
        Ok(EpPair {
            embedding: compose(&next.embedding, &self.embedding)?,
            projection: compose(&self.projection, &next.projection)?,
        })
    }
}

pub fn validate_ep_pair(embedding: MonotoneMap, projection: MonotoneMap) -> Result<EpPair> {
    EpPair::new(embedding, projection)
}

/// All monotone tables `source → target`, concatenated, in lexicographic order
/// of the values assigned along `source.linear_extension()`.
///
/// Backtracks along the linear extension; the values already assigned to
/// lower elements bound each new value from below.
pub fn enumerate_monotone_tables(source: &Poset, target: &Poset, budget: usize) -> Result<Vec<Vec<usize>>> {
    let n = source.size();
    if !source.has_matrix() {
        return Err(Error::SizeLimitExceeded {
            what: "enumeration source",
            size: n,
            limit: crate::poset::MATRIX_LIMIT,
        });
    }
    let m = target.size();
    let ext = source.linear_extension();
    // positions (in extension order) of the strict predecessors of each position
    let below: Vec<Vec<usize>> = (0..n)
        .map(|k| (0..k).filter(|&p| source.lt(ext[p], ext[k])).collect())
        .collect();

    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return Ok(out);
    }
    if m == 0 {
        return Ok(out);
    }
    // values[k] is the value currently assigned at extension position k
    let mut values = vec![0usize; n];
    let mut next = vec![0usize; n];
    let mut k = 0usize;
    loop {
        let mut placed = false;
        while next[k] < m {
            let v = next[k];
            next[k] += 1;
            if below[k].iter().all(|&p| target.leq(values[p], v)) {
                values[k] = v;
                placed = true;
                break;
            }
        }
        if placed {
            if k + 1 == n {
                if out.len() == budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                let mut table = vec![0; n];
                for (pos, &x) in ext.iter().enumerate() {
                    table[x] = values[pos];
                }
                out.push(table);
            } else {
                k += 1;
                next[k] = 0;
            }
        } else {
            if k == 0 {
                break;
            }
            k -= 1;
        }
    }
    Ok(out)
}

pub fn enumerate_continuous_maps(source: &Arc<Poset>, target: &Arc<Poset>, budget: usize) -> Result<Vec<MonotoneMap>> {
    Ok(enumerate_monotone_tables(source, target, budget)?
        .into_iter()
        .map(|t| MonotoneMap::from_trusted(source.clone(), target.clone(), t))
        .collect())
}
