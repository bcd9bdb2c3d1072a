//! Towers of embedding-projection pairs and their bilimit.
//!
//! A tower is a finite prefix `D_0 → D_1 → … → D_N` of an ℕ-indexed chain.
//! Elements of the bilimit are represented by compacts `(n, x)`, standing
//! for the thread `j ↦ ρ_{n,j}(x)`, kept in lowest-level form.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{compose, same_poset, EpPair, MonotoneMap};
use crate::poset::{Poset, PosetJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CompactElement {
    pub level: usize,
    pub elem: usize,
}

impl CompactElement {
    pub fn new(level: usize, elem: usize) -> Self {
        CompactElement { level, elem }
    }
}

#[derive(Debug, Clone)]
pub struct Tower {
    levels: Vec<Arc<Poset>>,
    /// `pairs[i][j - i]` is `(ε_{i,j}, π_{i,j})`.
    pairs: Vec<Vec<EpPair>>,
    /// `preimage[n][y]` is the `x` with `ε_{n-1}(x) = y`, for `n ≥ 1`.
    preimage: Vec<Vec<Option<usize>>>,
}

impl Tower {
    /// Checks every step pair, builds the composites and checks them as well.
    pub fn build(levels: Vec<Arc<Poset>>, steps: Vec<(MonotoneMap, MonotoneMap)>) -> Result<Self> {
        if levels.is_empty() || steps.len() + 1 != levels.len() {
            return Err(Error::Format(format!(
                "a tower with {} levels needs {} step pairs, got {}",
                levels.len(),
                levels.len().saturating_sub(1),
                steps.len()
            )));
        }
        let mut step_pairs = Vec::with_capacity(steps.len());
        for (n, (e, p)) in steps.into_iter().enumerate() {
            if !same_poset(e.source(), &levels[n])
                || !same_poset(e.target(), &levels[n + 1])
                || !same_poset(p.source(), &levels[n + 1])
                || !same_poset(p.target(), &levels[n])
            {
                return Err(Error::StepTypeMismatch(n));
            }
            step_pairs.push(EpPair::new(e, p).map_err(|err| ep_violation(n, n + 1, err))?);
        }
        let mut pairs = Vec::with_capacity(levels.len());
        for (i, level) in levels.iter().enumerate() {
            let id = MonotoneMap::identity(level.clone());
            let mut row = vec![EpPair::new(id.clone(), id)?];
            for step in &step_pairs[i..] {
                let next = row.last().expect("row starts with the identity").then(step)?;
                row.push(next);
            }
            pairs.push(row);
        }
        let tower = Self::from_composites_unchecked(levels, pairs);
        tower.validate()?;
        Ok(tower)
    }

    /// Assembles a tower from precomputed composites without any checks.
    /// Meant for exercising [`Tower::validate`] and the other verifiers on
    /// deliberately broken data.
    pub fn from_composites_unchecked(levels: Vec<Arc<Poset>>, pairs: Vec<Vec<EpPair>>) -> Self {
        let preimage = (0..levels.len())
            .map(|n| {
                let mut pre = vec![None; levels[n].size()];
                if n > 0 {
                    let e = pairs[n - 1][1].embedding();
                    for x in levels[n - 1].elements() {
                        pre[e.apply(x)] = Some(x);
                    }
                }
                pre
            })
            .collect();
        Tower {
            levels,
            pairs,
            preimage,
        }
    }

    /// Re-checks the identity and composition equations and the e-p laws of
    /// every composite, exhaustively.
    pub fn validate(&self) -> Result<()> {
        let depth = self.depth();
        for i in 0..=depth {
            let id = MonotoneMap::identity(self.levels[i].clone());
            let own = &self.pairs[i][0];
            if *own.embedding() != id || *own.projection() != id {
                return Err(Error::CompatibilityViolation(i, i, i));
            }
            for j in i..=depth {
                let pair = &self.pairs[i][j - i];
                EpPair::new(pair.embedding().clone(), pair.projection().clone())
                    .map_err(|err| ep_violation(i, j, err))?;
            }
        }
        for i in 0..=depth {
            for j in i..=depth {
                for k in j..=depth {
                    let e = compose(self.eps(j, k), self.eps(i, j))?;
                    let p = compose(self.pis(i, j), self.pis(j, k))?;
                    if e != *self.eps(i, k) || p != *self.pis(i, k) {
                        return Err(Error::CompatibilityViolation(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &Arc<Poset> {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[Arc<Poset>] {
        &self.levels
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.size()).collect()
    }

    pub fn check_level(&self, level: usize) -> Result<()> {
        if level <= self.depth() {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange {
                level,
                depth: self.depth(),
            })
        }
    }

    /// `(ε_{i,j}, π_{i,j})` for `i ≤ j`.
    pub fn pair(&self, i: usize, j: usize) -> &EpPair {
        &self.pairs[i][j - i]
    }

    /// `ε_{i,j}` for `i ≤ j`.
    pub fn eps(&self, i: usize, j: usize) -> &MonotoneMap {
        self.pair(i, j).embedding()
    }

    /// `π_{i,j}` for `i ≤ j`.
    pub fn pis(&self, i: usize, j: usize) -> &MonotoneMap {
        self.pair(i, j).projection()
    }

    /// `ρ_{i,j}(x) = π_{j,k}(ε_{i,k}(x))` with `k = max(i, j)`.
    pub fn rho_apply(&self, i: usize, j: usize, x: usize) -> usize {
        if i <= j {
            self.eps(i, j).apply(x)
        } else {
            self.pis(j, i).apply(x)
        }
    }

    pub fn rho(&self, i: usize, j: usize) -> Result<MonotoneMap> {
        self.check_level(i)?;
        self.check_level(j)?;
        let k = i.max(j);
        compose(self.pis(j, k), self.eps(i, k))
    }

    /// A witness `(x, k)` where `π_{j,k}(ε_{i,k}(x))` differs from its value at
    /// `k = max(i, j)`, if any.
    pub fn kappa_witness(&self, i: usize, j: usize) -> Result<Option<(usize, usize)>> {
        self.check_level(i)?;
        self.check_level(j)?;
        let base = i.max(j);
        for x in self.levels[i].elements() {
            let expected = self.pis(j, base).apply(self.eps(i, base).apply(x));
            for k in base + 1..=self.depth() {
                if self.pis(j, k).apply(self.eps(i, k).apply(x)) != expected {
                    return Ok(Some((x, k)));
                }
            }
        }
        Ok(None)
    }

    pub fn verify_kappa_constant(&self, i: usize, j: usize) -> Result<bool> {
        Ok(self.kappa_witness(i, j)?.is_none())
    }

    /// `ε_{n,∞}(x)` in lowest-level form.
    pub fn embed_compact(&self, level: usize, elem: usize) -> Result<CompactElement> {
        self.check_level(level)?;
        self.levels[level].check_index(elem)?;
        Ok(self.canonical(level, elem))
    }

    fn canonical(&self, mut level: usize, mut elem: usize) -> CompactElement {
        while level > 0 {
            match self.preimage[level][elem] {
                Some(lower) => {
                    elem = lower;
                    level -= 1;
                }
                None => break,
            }
        }
        CompactElement { level, elem }
    }

    /// Whether `elem` at `level` is not the image of anything one level down.
    pub fn is_canonical(&self, c: CompactElement) -> bool {
        c.level == 0 || self.preimage[c.level][c.elem].is_none()
    }

    /// `π_{i,∞}` applied to a compact: its `i`-th component.
    pub fn project_compact(&self, c: CompactElement, i: usize) -> Result<usize> {
        self.check_level(i)?;
        self.check_level(c.level)?;
        Ok(self.rho_apply(c.level, i, c.elem))
    }

    /// All components `σ_0, …, σ_N`.
    pub fn components(&self, c: CompactElement) -> Vec<usize> {
        (0..=self.depth()).map(|i| self.rho_apply(c.level, i, c.elem)).collect()
    }

    /// Raises `c` to level `k ≥ c.level`.
    pub fn raise(&self, c: CompactElement, k: usize) -> usize {
        self.eps(c.level, k).apply(c.elem)
    }

    /// The pointwise order, decided at the common level `max(c.level, d.level)`.
    pub fn compact_leq(&self, c: CompactElement, d: CompactElement) -> bool {
        let k = c.level.max(d.level);
        self.levels[k].leq(self.raise(c, k), self.raise(d, k))
    }

    pub fn compact_sup(&self, family: &[CompactElement]) -> Result<CompactElement> {
        if family.is_empty() {
            return Err(Error::NotDirected);
        }
        for &c in family {
            self.check_level(c.level)?;
        }
        let directed = family.iter().all(|&a| {
            family.iter().all(|&b| {
                family
                    .iter()
                    .any(|&c| self.compact_leq(a, c) && self.compact_leq(b, c))
            })
        });
        if !directed {
            return Err(Error::NotDirected);
        }
        let k = family.iter().map(|c| c.level).max().expect("nonempty");
        let raised: Vec<usize> = family.iter().map(|&c| self.raise(c, k)).collect();
        let sup = self.levels[k]
            .supremum_of(&raised)
            .ok_or(Error::NotDirected)?;
        Ok(self.canonical(k, sup))
    }

    /// Every canonical compact with level at most `max_level`, by level then element.
    pub fn compacts(&self, max_level: usize) -> Vec<CompactElement> {
        let top = max_level.min(self.depth());
        (0..=top)
            .flat_map(|n| {
                self.levels[n]
                    .elements()
                    .map(move |x| CompactElement::new(n, x))
                    .filter(|&c| self.is_canonical(c))
            })
            .collect()
    }

    pub fn bottom(&self) -> Result<CompactElement> {
        Ok(CompactElement::new(0, self.levels[0].bottom()?))
    }

    /// The mediating map out of the bilimit for a cocone `g_i : D_i → E`.
    pub fn colimit_mediator(&self, target: &Arc<Poset>, cocone: Vec<MonotoneMap>) -> Result<ColimitMediator> {
        if cocone.len() != self.levels.len() {
            return Err(Error::Format(format!(
                "cocone needs {} legs, got {}",
                self.levels.len(),
                cocone.len()
            )));
        }
        for (i, g) in cocone.iter().enumerate() {
            if !same_poset(g.source(), &self.levels[i]) || !same_poset(g.target(), target) {
                return Err(Error::SourceTargetMismatch);
            }
        }
        for i in 0..=self.depth() {
            for j in i..=self.depth() {
                let eps = self.eps(i, j);
                if let Some(x) = self.levels[i]
                    .elements()
                    .find(|&x| cocone[i].apply(x) != cocone[j].apply(eps.apply(x)))
                {
                    return Err(Error::CoconeViolation(i, j, x));
                }
            }
        }
        Ok(ColimitMediator { legs: cocone })
    }

    /// The mediating map into the bilimit for a cone `f_i : E → D_i`.
    pub fn limit_mediator(&self, source: &Arc<Poset>, cone: Vec<MonotoneMap>) -> Result<LimitMediator> {
        if cone.len() != self.levels.len() {
            return Err(Error::Format(format!(
                "cone needs {} legs, got {}",
                self.levels.len(),
                cone.len()
            )));
        }
        for (i, f) in cone.iter().enumerate() {
            if !same_poset(f.target(), &self.levels[i]) || !same_poset(f.source(), source) {
                return Err(Error::SourceTargetMismatch);
            }
        }
        for i in 0..=self.depth() {
            for j in i..=self.depth() {
                let pis = self.pis(i, j);
                if let Some(y) = source
                    .elements()
                    .find(|&y| cone[i].apply(y) != pis.apply(cone[j].apply(y)))
                {
                    return Err(Error::ConeViolation(i, j, y));
                }
            }
        }
        Ok(LimitMediator { legs: cone })
    }

    pub fn to_json(&self, ids: &[String], posets: Option<BTreeMap<String, PosetJson>>) -> TowerJson {
        TowerJson {
            depth: self.depth(),
            levels: ids.to_vec(),
            eps: (0..self.depth()).map(|n| self.eps(n, n + 1).table().to_vec()).collect(),
            pis: (0..self.depth()).map(|n| self.pis(n, n + 1).table().to_vec()).collect(),
            posets,
        }
    }

    /// Rebuilds and fully validates a tower; `resolve` maps the level ids to posets.
    pub fn from_json(json: &TowerJson, resolve: impl FnOnce(&TowerJson) -> Result<Vec<Arc<Poset>>>) -> Result<Self> {
        if json.levels.len() != json.depth + 1 || json.eps.len() != json.depth || json.pis.len() != json.depth {
            return Err(Error::Format("tower arrays do not match its depth".into()));
        }
        let levels = resolve(json)?;
        if levels.len() != json.depth + 1 {
            return Err(Error::Format("resolver returned the wrong number of levels".into()));
        }
        let steps = (0..json.depth)
            .map(|n| {
                let e = MonotoneMap::new(levels[n].clone(), levels[n + 1].clone(), json.eps[n].clone())?;
                let p = MonotoneMap::new(levels[n + 1].clone(), levels[n].clone(), json.pis[n].clone())?;
                Ok((e, p))
            })
            .collect::<Result<Vec<_>>>()?;
        Tower::build(levels, steps)
    }
}

fn ep_violation(level: usize, upper: usize, err: Error) -> Error {
    match err {
        Error::NotSection(witness) | Error::NotDeflation(witness) => Error::EpLawViolation {
            level,
            upper,
            witness,
        },
        other => other,
    }
}

/// `g_∞(n, x) = g_n(x)`.
#[derive(Debug, Clone)]
pub struct ColimitMediator {
    legs: Vec<MonotoneMap>,
}

impl ColimitMediator {
    pub fn apply(&self, c: CompactElement) -> usize {
        self.legs[c.level].apply(c.elem)
    }
}

/// `f_∞(y) = (f_0(y), …, f_N(y))`.
#[derive(Debug, Clone)]
pub struct LimitMediator {
    legs: Vec<MonotoneMap>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thread {
    pub components: Vec<usize>,
    /// The compact with these components; in a finite tower the top component
    /// determines the rest, so one always exists.
    pub compact: CompactElement,
}

impl LimitMediator {
    pub fn apply(&self, tower: &Tower, y: usize) -> Thread {
        let components: Vec<usize> = self.legs.iter().map(|f| f.apply(y)).collect();
        let top = tower.depth();
        let compact = tower.canonical(top, components[top]);
        Thread {
            components,
            compact,
        }
    }
}

/// Wire format for towers. `levels` holds poset ids; ids that are not
/// generated by the reader must be defined in `posets`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerJson {
    pub depth: usize,
    pub levels: Vec<String>,
    pub eps: Vec<Vec<usize>>,
    pub pis: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posets: Option<BTreeMap<String, PosetJson>>,
}

/// A tower with every level `poset` and every step `(id, id)`.
pub fn constant_tower(poset: Arc<Poset>, depth: usize) -> Tower {
    let levels = vec![poset.clone(); depth + 1];
    let steps = (0..depth)
        .map(|_| (MonotoneMap::identity(poset.clone()), MonotoneMap::identity(poset.clone())))
        .collect();
    Tower::build(levels, steps).expect("identity steps form a tower")
}
