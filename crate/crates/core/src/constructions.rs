//! Products, exponentials and least fixed points.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::maps::{enumerate_monotone_tables, same_poset, MonotoneMap};
use crate::poset::{Poset, Provenance};

/// The monotone tables `dom → cod` with an index for reverse lookup.
pub struct FunctionSpace {
    dom: Arc<Poset>,
    cod: Arc<Poset>,
    stride: usize,
    len: usize,
    tables: Vec<usize>,
    index: HashMap<Box<[usize]>, usize>,
}

impl FunctionSpace {
    fn new(dom: Arc<Poset>, cod: Arc<Poset>, tables: Vec<Vec<usize>>) -> Self {
        let stride = dom.size();
        let len = tables.len();
        let mut flat = Vec::with_capacity(stride * len);
        let mut index = HashMap::with_capacity(len);
        for (i, t) in tables.into_iter().enumerate() {
            flat.extend_from_slice(&t);
            index.insert(t.into_boxed_slice(), i);
        }
        FunctionSpace {
            dom,
            cod,
            stride,
            len,
            tables: flat,
            index,
        }
    }

    pub fn dom(&self) -> &Arc<Poset> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<Poset> {
        &self.cod
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn table(&self, i: usize) -> &[usize] {
        &self.tables[i * self.stride..(i + 1) * self.stride]
    }

    pub fn index_of(&self, table: &[usize]) -> Option<usize> {
        self.index.get(table).copied()
    }

    pub(crate) fn pointwise_leq(&self, i: usize, j: usize) -> bool {
        let (a, b) = (self.table(i), self.table(j));
        a.iter().zip(b).all(|(&x, &y)| self.cod.leq(x, y))
    }
}

/// `left × right` under the componentwise order. Element `(a, b)` has index
/// `a * right.size() + b`.
#[derive(Debug, Clone)]
pub struct ProductPoset {
    left: Arc<Poset>,
    right: Arc<Poset>,
    poset: Arc<Poset>,
}

impl ProductPoset {
    pub fn new(left: Arc<Poset>, right: Arc<Poset>, budget: usize) -> Result<Self> {
        let size = left.size() * right.size();
        if size > budget || size > crate::poset::MATRIX_LIMIT {
            return Err(Error::BudgetExceeded(budget.min(crate::poset::MATRIX_LIMIT)));
        }
        let r = right.size();
        let poset = Poset::from_fn_unchecked(size, |i, j| {
            left.leq(i / r, j / r) && right.leq(i % r, j % r)
        })
        .with_provenance(Provenance::Product {
            left: left.clone(),
            right: right.clone(),
        });
        Ok(ProductPoset {
            left,
            right,
            poset: Arc::new(poset),
        })
    }

    pub fn left(&self) -> &Arc<Poset> {
        &self.left
    }

    pub fn right(&self) -> &Arc<Poset> {
        &self.right
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn pair(&self, a: usize, b: usize) -> usize {
        a * self.right.size() + b
    }

    pub fn unpair(&self, i: usize) -> (usize, usize) {
        (i / self.right.size(), i % self.right.size())
    }

    pub fn pr1(&self) -> MonotoneMap {
        let table = self.poset.elements().map(|i| self.unpair(i).0).collect();
        MonotoneMap::from_trusted(self.poset.clone(), self.left.clone(), table)
    }

    pub fn pr2(&self) -> MonotoneMap {
        let table = self.poset.elements().map(|i| self.unpair(i).1).collect();
        MonotoneMap::from_trusted(self.poset.clone(), self.right.clone(), table)
    }

    /// The unique map `k` with `pr1 ∘ k = f` and `pr2 ∘ k = g`.
    pub fn pair_mediator(&self, f: &MonotoneMap, g: &MonotoneMap) -> Result<MonotoneMap> {
        if !same_poset(f.source(), g.source()) {
            return Err(Error::SourceMismatch);
        }
        if !same_poset(f.target(), &self.left) || !same_poset(g.target(), &self.right) {
            return Err(Error::SourceTargetMismatch);
        }
        let table = f
            .table()
            .iter()
            .zip(g.table())
            .map(|(&a, &b)| self.pair(a, b))
            .collect();
        Ok(MonotoneMap::from_trusted(f.source().clone(), self.poset.clone(), table))
    }

    /// `f × g : A × B → C × D`, with `self` the domain product and `other` the codomain.
    pub fn map_product(&self, other: &ProductPoset, f: &MonotoneMap, g: &MonotoneMap) -> Result<MonotoneMap> {
        if !same_poset(f.source(), &self.left)
            || !same_poset(g.source(), &self.right)
            || !same_poset(f.target(), &other.left)
            || !same_poset(g.target(), &other.right)
        {
            return Err(Error::SourceTargetMismatch);
        }
        let table = self
            .poset
            .elements()
            .map(|i| {
                let (a, b) = self.unpair(i);
                other.pair(f.apply(a), g.apply(b))
            })
            .collect();
        Ok(MonotoneMap::from_trusted(self.poset.clone(), other.poset.clone(), table))
    }
}

pub fn product(left: Arc<Poset>, right: Arc<Poset>, budget: usize) -> Result<ProductPoset> {
    ProductPoset::new(left, right, budget)
}

/// The continuous maps `dom → cod` under the pointwise order, indexed in
/// canonical enumeration order.
#[derive(Clone)]
pub struct ExponentialPoset {
    space: Arc<FunctionSpace>,
    poset: Arc<Poset>,
}

impl std::fmt::Debug for ExponentialPoset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExponentialPoset")
            .field("dom", &self.space.dom.size())
            .field("cod", &self.space.cod.size())
            .field("size", &self.space.len)
            .finish()
    }
}

impl ExponentialPoset {
    pub fn new(dom: Arc<Poset>, cod: Arc<Poset>, budget: usize) -> Result<Self> {
        let tables = enumerate_monotone_tables(&dom, &cod, budget)?;
        let space = Arc::new(FunctionSpace::new(dom, cod, tables));
        let poset = Arc::new(Poset::function_space(space.clone()));
        Ok(ExponentialPoset { space, poset })
    }

    pub fn dom(&self) -> &Arc<Poset> {
        &self.space.dom
    }

    pub fn cod(&self) -> &Arc<Poset> {
        &self.space.cod
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn space(&self) -> &Arc<FunctionSpace> {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.space.len
    }

    pub fn table(&self, i: usize) -> &[usize] {
        self.space.table(i)
    }

    pub fn index_of(&self, table: &[usize]) -> Option<usize> {
        self.space.index_of(table)
    }

    pub fn index_of_map(&self, f: &MonotoneMap) -> Option<usize> {
        if !same_poset(f.source(), self.dom()) || !same_poset(f.target(), self.cod()) {
            return None;
        }
        self.index_of(f.table())
    }

    /// Element `i` as a map `dom → cod`.
    pub fn element_map(&self, i: usize) -> MonotoneMap {
        MonotoneMap::from_trusted(self.dom().clone(), self.cod().clone(), self.table(i).to_vec())
    }

    /// `ev : cod^dom × dom → cod`; `product` must be `self.poset() × dom`.
    pub fn eval_map(&self, product: &ProductPoset) -> Result<MonotoneMap> {
        if !same_poset(product.left(), &self.poset) || !same_poset(product.right(), self.dom()) {
            return Err(Error::SourceTargetMismatch);
        }
        let table = product
            .poset()
            .elements()
            .map(|i| {
                let (f, x) = product.unpair(i);
                self.table(f)[x]
            })
            .collect();
        Ok(MonotoneMap::from_trusted(product.poset().clone(), self.cod().clone(), table))
    }

    /// Transposes `f : D' × D → E` (with `product = D' × D`) into `D' → E^D`.
    pub fn curry(&self, product: &ProductPoset, f: &MonotoneMap) -> Result<MonotoneMap> {
        if !same_poset(f.source(), product.poset())
            || !same_poset(product.right(), self.dom())
            || !same_poset(f.target(), self.cod())
        {
            return Err(Error::SourceTargetMismatch);
        }
        let mut table = Vec::with_capacity(product.left().size());
        let mut row = Vec::with_capacity(self.dom().size());
        for a in product.left().elements() {
            row.clear();
            row.extend(self.dom().elements().map(|x| f.apply(product.pair(a, x))));
            let index = self.index_of(&row).ok_or_else(|| {
                // a row outside the space means f is not monotone in its second argument
                let (x, y) = first_order_violation(self.dom(), self.cod(), &row);
                Error::NotMonotone(product.pair(a, x), product.pair(a, y))
            })?;
            table.push(index);
        }
        MonotoneMap::new(product.left().clone(), self.poset.clone(), table)
    }

    /// `const_⊥` when the codomain is pointed.
    pub fn least(&self) -> Option<usize> {
        let bottom = self.cod().least_element()?;
        self.index_of(&vec![bottom; self.dom().size()])
    }
}

fn first_order_violation(dom: &Poset, cod: &Poset, row: &[usize]) -> (usize, usize) {
    for x in dom.elements() {
        for y in dom.elements() {
            if dom.leq(x, y) && !cod.leq(row[x], row[y]) {
                return (x, y);
            }
        }
    }
    (0, 0)
}

pub fn exponential(dom: Arc<Poset>, cod: Arc<Poset>, budget: usize) -> Result<ExponentialPoset> {
    ExponentialPoset::new(dom, cod, budget)
}

/// The Kleene iterates `⊥, f(⊥), f²(⊥), …` up to and including the first repeat.
pub fn kleene_chain(f: &MonotoneMap) -> Result<Vec<usize>> {
    if !f.is_endo() {
        return Err(Error::NotEndo);
    }
    let poset = f.source();
    let mut x = poset.bottom()?;
    let mut chain = vec![x];
    for _ in 0..=poset.size() {
        let y = f.apply(x);
        assert!(poset.leq(x, y), "Kleene iterates of a monotone map ascend");
        chain.push(y);
        if y == x {
            return Ok(chain);
        }
        x = y;
    }
    unreachable!("an ascending chain in a finite poset stabilizes within its size")
}

/// The least fixed point `⊔ fⁿ(⊥)`, re-checked to be fixed and below every pre-fixed point.
pub fn lfp(f: &MonotoneMap) -> Result<usize> {
    let chain = kleene_chain(f)?;
    let mu = *chain.last().expect("chain starts at bottom");
    let poset = f.source();
    assert_eq!(f.apply(mu), mu);
    assert!(poset
        .elements()
        .filter(|&y| poset.leq(f.apply(y), y))
        .all(|y| poset.leq(mu, y)));
    Ok(mu)
}

/// `f ↦ μ(f)` as a map `P^P → P`; `space` must be the exponential `P^P`.
pub fn lfp_map(space: &ExponentialPoset) -> Result<MonotoneMap> {
    if !same_poset(space.dom(), space.cod()) {
        return Err(Error::NotEndo);
    }
    let poset = space.dom();
    poset.bottom()?;
    let table = (0..space.size())
        .map(|i| lfp(&space.element_map(i)))
        .collect::<Result<Vec<_>>>()?;
    MonotoneMap::new(space.poset().clone(), poset.clone(), table)
}
