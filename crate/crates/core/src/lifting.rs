//! The lifting monad on finite sets and posets.
//!
//! A partial element is either undefined or carries a value. This is the
//! classical reading of a pair of a truth value with a map out of it; every
//! truth value here is decidable, so nothing is lost.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::maps::{same_poset, MonotoneMap};
use crate::poset::{Poset, PosetJson, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartialElement {
    Undefined,
    Defined(usize),
}

impl PartialElement {
    pub fn is_defined(self) -> bool {
        matches!(self, PartialElement::Defined(_))
    }

    pub fn value(self) -> Option<usize> {
        match self {
            PartialElement::Undefined => None,
            PartialElement::Defined(x) => Some(x),
        }
    }
}

/// A base poset with a fresh least element adjoined at index 0; base element
/// `x` sits at index `x + 1`.
#[derive(Debug, Clone)]
pub struct LiftedPoset {
    base: Arc<Poset>,
    lifted: Arc<Poset>,
}

impl LiftedPoset {
    /// The flat lifting of an `n`-element set.
    pub fn lift_set(n: usize) -> Self {
        let labels = if n == 1 {
            vec!["⋆".to_string()]
        } else {
            (0..n).map(|i| i.to_string()).collect()
        };
        let base = Poset::discrete(n).with_labels(labels).expect("label count matches");
        Self::lift_poset(Arc::new(base))
    }

    /// `l ⊑ m` iff `l = ⊥` or both are defined with related values.
    pub fn lift_poset(base: Arc<Poset>) -> Self {
        let size = base.size() + 1;
        let mut labels = vec!["⊥".to_string()];
        labels.extend(base.elements().map(|x| format!("η{}", base.label(x))));
        let lifted = Poset::from_fn_unchecked(size, |i, j| i == 0 || (j != 0 && base.leq(i - 1, j - 1)))
            .with_labels(labels)
            .expect("label count matches")
            .with_provenance(Provenance::Lifted);
        LiftedPoset {
            base,
            lifted: Arc::new(lifted),
        }
    }

    pub fn base(&self) -> &Arc<Poset> {
        &self.base
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.lifted
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn embed(&self, x: usize) -> usize {
        x + 1
    }

    pub fn index_of(&self, l: PartialElement) -> usize {
        match l {
            PartialElement::Undefined => 0,
            PartialElement::Defined(x) => x + 1,
        }
    }

    pub fn element(&self, i: usize) -> PartialElement {
        if i == 0 {
            PartialElement::Undefined
        } else {
            PartialElement::Defined(i - 1)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = PartialElement> + '_ {
        self.lifted.elements().map(|i| self.element(i))
    }

    pub fn eta(&self, x: usize) -> Result<PartialElement> {
        self.base.check_index(x)?;
        Ok(PartialElement::Defined(x))
    }

    /// `η` as a map from the base into the lifting.
    pub fn eta_map(&self) -> MonotoneMap {
        let table = self.base.elements().map(|x| self.embed(x)).collect();
        MonotoneMap::from_trusted(self.base.clone(), self.lifted.clone(), table)
    }

    pub fn to_json(&self) -> PosetJson {
        let mut json = self.lifted.to_json();
        json.embed = Some(self.base.elements().map(|x| self.embed(x)).collect());
        json
    }

    fn check_partial(&self, l: PartialElement) -> Result<()> {
        match l {
            PartialElement::Undefined => Ok(()),
            PartialElement::Defined(x) => self.base.check_index(x),
        }
    }
}

/// `f^#` at a single argument.
///
/// Unfolded, the extension sends `(P, φ)` to the partial element defined
/// exactly when some `p : P` has `f(φ(p))` defined, with that value. In the
/// two-case representation this is: undefined stays undefined, and `η x`
/// goes to `f(x)`.
pub fn extend(f: &[PartialElement], l: PartialElement) -> PartialElement {
    match l {
        PartialElement::Undefined => PartialElement::Undefined,
        PartialElement::Defined(x) => f[x],
    }
}

/// `f^# : L(X) → L(Y)` for `f : X → L(Y)`, as a map of lifted posets.
pub fn kleisli_extend(source: &LiftedPoset, target: &LiftedPoset, f: &[PartialElement]) -> Result<MonotoneMap> {
    if f.len() != source.base.size() {
        return Err(Error::MalformedRelation {
            expected: source.base.size(),
            found: f.len(),
        });
    }
    for &l in f {
        target.check_partial(l)?;
    }
    let table = source
        .elements()
        .map(|l| target.index_of(extend(f, l)))
        .collect();
    MonotoneMap::new(source.lifted.clone(), target.lifted.clone(), table)
}

/// `L(f)`: `⊥ ↦ ⊥`, `η x ↦ η f(x)`.
pub fn lift_functor(source: &LiftedPoset, target: &LiftedPoset, f: &[usize]) -> Result<MonotoneMap> {
    let composed: Vec<PartialElement> = f.iter().map(|&y| PartialElement::Defined(y)).collect();
    kleisli_extend(source, target, &composed)
}

/// The strict extension `L(X) → D` of `f : X → D` for pointed `D`, computed as
/// the supremum over the (empty or singleton) family `{f(value) | defined}`.
pub fn free_extension_set(source: &LiftedPoset, target: Arc<Poset>, f: &[usize]) -> Result<MonotoneMap> {
    if f.len() != source.base.size() {
        return Err(Error::MalformedRelation {
            expected: source.base.size(),
            found: f.len(),
        });
    }
    target.check_subset(f)?;
    target.bottom()?;
    let table = source
        .elements()
        .map(|l| {
            let family: Vec<usize> = l.value().map(|x| f[x]).into_iter().collect();
            target.semidirected_sup(&family)
        })
        .collect::<Result<Vec<_>>>()?;
    MonotoneMap::new(source.lifted.clone(), target, table)
}

/// The strict extension `L(D) → E` of a continuous `f : D → E` for pointed `E`.
pub fn free_extension_dcpo(source: &LiftedPoset, f: &MonotoneMap) -> Result<MonotoneMap> {
    if !same_poset(f.source(), &source.base) {
        return Err(Error::SourceTargetMismatch);
    }
    let target = f.target().clone();
    let bottom = target.bottom()?;
    let table = source
        .elements()
        .map(|l| l.value().map_or(bottom, |x| f.apply(x)))
        .collect();
    MonotoneMap::new(source.lifted.clone(), target, table)
}
