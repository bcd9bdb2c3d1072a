//! Scott's D∞: the tower `D_0 = L(1)`, `D_{n+1} = D_n^{D_n}` and the
//! isomorphism between its bilimit and the bilimit's self-exponential,
//! restricted to finitary elements.

use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::bilimit::{CompactElement, Tower};
use crate::constructions::ExponentialPoset;
use crate::error::{Error, Result};
use crate::laws::Counterexample;
use crate::lifting::LiftedPoset;
use crate::maps::{MonotoneMap, DEFAULT_ENUMERATION_BUDGET};
use crate::poset::Poset;

/// Deepest tower built without the deep override.
pub const DEFAULT_DEPTH_CAP: usize = 3;

#[derive(Debug, Clone, Copy)]
pub struct TowerOptions {
    pub budget: usize,
    pub allow_deep: bool,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            budget: DEFAULT_ENUMERATION_BUDGET,
            allow_deep: false,
        }
    }
}

/// A continuous self-map of the bilimit of the form `ε_{n-1,∞} ∘ f ∘ π_{n-1,∞}`
/// for `f` an element of `D_n`, `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FinFun {
    pub level: usize,
    pub elem: usize,
}

impl FinFun {
    pub fn new(level: usize, elem: usize) -> Self {
        FinFun { level, elem }
    }
}

/// The `D_n` tower together with the function spaces that make up its levels.
#[derive(Debug, Clone)]
pub struct DInfinity {
    tower: Tower,
    /// `spaces[n]` is `D_{n+1}` as the exponential `D_n^{D_n}`.
    spaces: Vec<ExponentialPoset>,
}

/// The levels `D_0, …, D_depth` with their exponential structure.
pub fn dn_levels(depth: usize, options: TowerOptions) -> Result<(Arc<Poset>, Vec<ExponentialPoset>)> {
    if depth > DEFAULT_DEPTH_CAP && !options.allow_deep {
        return Err(Error::DepthLimit {
            depth,
            cap: DEFAULT_DEPTH_CAP,
        });
    }
    let d0 = LiftedPoset::lift_set(1).poset().clone();
    let mut spaces: Vec<ExponentialPoset> = Vec::with_capacity(depth);
    for _ in 0..depth {
        let below = spaces.last().map_or_else(|| d0.clone(), |s| s.poset().clone());
        spaces.push(ExponentialPoset::new(below.clone(), below, options.budget)?);
    }
    Ok((d0, spaces))
}

impl DInfinity {
    pub fn build(depth: usize) -> Result<Self> {
        Self::build_with(depth, TowerOptions::default())
    }

    pub fn build_with(depth: usize, options: TowerOptions) -> Result<Self> {
        let (d0, spaces) = dn_levels(depth, options)?;
        let mut levels = vec![d0];
        levels.extend(spaces.iter().map(|s| s.poset().clone()));

        let mut eps_tables: Vec<Vec<usize>> = Vec::with_capacity(depth);
        let mut pis_tables: Vec<Vec<usize>> = Vec::with_capacity(depth);
        for n in 0..depth {
            let (e, p) = if n == 0 {
                // ε_0 sends x to the constant map at x, π_0 evaluates at ⊥
                let d1 = &spaces[0];
                let bottom = levels[0].bottom()?;
                let e: Vec<usize> = levels[0]
                    .elements()
                    .map(|x| d1.index_of(&vec![x; levels[0].size()]).expect("constants are monotone"))
                    .collect();
                let p: Vec<usize> = (0..d1.size()).map(|f| d1.table(f)[bottom]).collect();
                (e, p)
            } else {
                // ε_n(f) = ε_{n-1} ∘ f ∘ π_{n-1},  π_n(g) = π_{n-1} ∘ g ∘ ε_{n-1}
                let (lower_e, lower_p) = (&eps_tables[n - 1], &pis_tables[n - 1]);
                let here = &spaces[n - 1];
                let above = &spaces[n];
                let mut row = Vec::new();
                let e: Vec<usize> = (0..here.size())
                    .map(|f| {
                        let f = here.table(f);
                        row.clear();
                        row.extend(lower_p.iter().map(|&y| lower_e[f[y]]));
                        above.index_of(&row).expect("composites of monotone maps are monotone")
                    })
                    .collect();
                let p: Vec<usize> = (0..above.size())
                    .map(|g| {
                        let g = above.table(g);
                        row.clear();
                        row.extend(lower_e.iter().map(|&x| lower_p[g[x]]));
                        here.index_of(&row).expect("composites of monotone maps are monotone")
                    })
                    .collect();
                (e, p)
            };
            eps_tables.push(e);
            pis_tables.push(p);
        }
        let steps = (0..depth)
            .map(|n| {
                Ok((
                    MonotoneMap::new(levels[n].clone(), levels[n + 1].clone(), eps_tables[n].clone())?,
                    MonotoneMap::new(levels[n + 1].clone(), levels[n].clone(), pis_tables[n].clone())?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let tower = Tower::build(levels, steps)?;
        Ok(DInfinity { tower, spaces })
    }

    /// Wraps an already-built tower whose levels are `spaces`' posets. Used to
    /// run the isomorphism checks against a tampered tower.
    pub fn from_parts(tower: Tower, spaces: Vec<ExponentialPoset>) -> Result<Self> {
        if spaces.len() != tower.depth()
            || spaces
                .iter()
                .enumerate()
                .any(|(n, s)| !Arc::ptr_eq(s.poset(), tower.level(n + 1)))
        {
            return Err(Error::Format("function spaces do not match the tower levels".into()));
        }
        Ok(DInfinity { tower, spaces })
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn depth(&self) -> usize {
        self.tower.depth()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.tower.sizes()
    }

    /// `D_n` for `n ≥ 1` as a function space over `D_{n-1}`.
    pub fn space(&self, n: usize) -> &ExponentialPoset {
        &self.spaces[n - 1]
    }

    pub fn spaces(&self) -> &[ExponentialPoset] {
        &self.spaces
    }

    /// The least element `(0, ⊥)` of D∞.
    pub fn bottom(&self) -> CompactElement {
        self.tower.bottom().expect("D_0 is pointed")
    }

    pub fn embed(&self, level: usize, elem: usize) -> Result<CompactElement> {
        self.tower.embed_compact(level, elem)
    }

    pub fn project(&self, c: CompactElement, level: usize) -> Result<usize> {
        self.tower.project_compact(c, level)
    }

    fn check_finfun(&self, f: FinFun) -> Result<()> {
        if f.level == 0 {
            return Err(Error::LevelOutOfRange {
                level: 0,
                depth: self.depth(),
            });
        }
        self.tower.check_level(f.level)?;
        self.tower.level(f.level).check_index(f.elem)
    }

    /// Lowest-level representative of a finitary function.
    pub fn canonical_finfun(&self, f: FinFun) -> Result<FinFun> {
        self.check_finfun(f)?;
        let c = self.tower.embed_compact(f.level, f.elem)?;
        if c.level >= 1 {
            Ok(FinFun::new(c.level, c.elem))
        } else {
            Ok(FinFun::new(1, self.tower.eps(0, 1).apply(c.elem)))
        }
    }

    /// Canonical finitary functions up to `max_level`.
    pub fn finfuns(&self, max_level: usize) -> Vec<FinFun> {
        let top = max_level.min(self.depth());
        (1..=top)
            .flat_map(|n| {
                self.tower
                    .level(n)
                    .elements()
                    .map(move |x| FinFun::new(n, x))
                    .filter(move |&f| n == 1 || self.tower.is_canonical(CompactElement::new(n, f.elem)))
            })
            .collect()
    }

    /// Φ on compacts: `(n, x) ↦ Φ_n(x)`, with `Φ_0 = Φ_1 ∘ ε_0`.
    pub fn phi(&self, c: CompactElement) -> Result<FinFun> {
        self.tower.check_level(c.level)?;
        self.tower.level(c.level).check_index(c.elem)?;
        if c.level == 0 {
            if self.depth() == 0 {
                return Err(Error::LevelOutOfRange { level: 1, depth: 0 });
            }
            return Ok(FinFun::new(1, self.tower.eps(0, 1).apply(c.elem)));
        }
        self.canonical_finfun(FinFun::new(c.level, c.elem))
    }

    /// `Φ_n(f)(c) = ε_{n-1,∞}(f(π_{n-1,∞}(c)))`.
    pub fn phi_apply(&self, f: FinFun, c: CompactElement) -> Result<CompactElement> {
        self.check_finfun(f)?;
        let below = f.level - 1;
        let arg = self.tower.project_compact(c, below)?;
        let table = self.space(f.level).table(f.elem);
        self.tower.embed_compact(below, table[arg])
    }

    /// Ψ on finitary functions: `Φ_n(f) ↦ ε_{n,∞}(f)`.
    pub fn psi(&self, f: FinFun) -> Result<CompactElement> {
        self.check_finfun(f)?;
        self.tower.embed_compact(f.level, f.elem)
    }

    /// `Ψ_n(F) = π_{n,∞}(Ψ(F))`, computed from `F`'s action: for `n ≥ 1` the
    /// element of `D_n` sending `d ∈ D_{n-1}` to `π_{n-1,∞}(F(ε_{n-1,∞}(d)))`;
    /// `Ψ_0 = π_0 ∘ Ψ_1`.
    pub fn psi_n(&self, n: usize, f: FinFun) -> Result<usize> {
        self.check_finfun(f)?;
        if n == 0 {
            let one = self.psi_n(1, f)?;
            return Ok(self.tower.pis(0, 1).apply(one));
        }
        self.tower.check_level(n)?;
        let below = n - 1;
        let table = self
            .tower
            .level(below)
            .elements()
            .map(|d| {
                let arg = self.tower.embed_compact(below, d)?;
                self.tower.project_compact(self.phi_apply(f, arg)?, below)
            })
            .collect::<Result<Vec<_>>>()?;
        self.space(n)
            .index_of(&table)
            .ok_or_else(|| Error::Format(format!("Ψ_{n} produced a table outside D_{n}")))
    }

    /// The order of D∞^{D∞} on finitary functions, decided pointwise over
    /// every compact up to `max_level`.
    pub fn finfun_leq(&self, f: FinFun, g: FinFun, max_level: usize) -> Result<bool> {
        for c in self.tower.compacts(max_level) {
            if !self.tower.compact_leq(self.phi_apply(f, c)?, self.phi_apply(g, c)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Checks that Φ and Ψ are mutually inverse order isomorphisms on all
    /// representatives up to `max_level`.
    pub fn verify_iso(&self, max_level: usize) -> Result<IsoReport> {
        self.tower.check_level(max_level)?;
        let mut report = IsoReport::default();
        let compacts = self.tower.compacts(max_level);
        let finfuns = self.finfuns(max_level);

        for &c in &compacts {
            if self.depth() == 0 {
                break;
            }
            report.compacts_checked += 1;
            let back = self.psi(self.phi(c)?)?;
            if back != c {
                report.failures.push(Counterexample::new(
                    "psi-after-phi",
                    json!({ "compact": c, "got": back }),
                ));
            }
        }
        for &f in &finfuns {
            report.finfuns_checked += 1;
            let back = self.phi(self.psi(f)?)?;
            if back != f {
                report.failures.push(Counterexample::new(
                    "phi-after-psi",
                    json!({ "finfun": f, "got": back }),
                ));
            }
        }
        if self.depth() > 0 && compacts.len() <= ORDER_CHECK_LIMIT {
            // the function order ranges over the arguments that reach levels < max_level
            let images: Vec<FinFun> = compacts.iter().map(|&c| self.phi(c)).collect::<Result<_>>()?;
            for (a, &c) in compacts.iter().enumerate() {
                for (b, &d) in compacts.iter().enumerate() {
                    let lhs = self.tower.compact_leq(c, d);
                    let rhs = self.finfun_leq(images[a], images[b], max_level)?;
                    report.order_pairs_checked += 1;
                    if lhs != rhs {
                        report.failures.push(Counterexample::new(
                            "phi-order-iso",
                            json!({ "left": c, "right": d, "compact_leq": lhs, "finfun_leq": rhs }),
                        ));
                    }
                }
            }
            report.order_checked = true;
        }
        Ok(report)
    }

    /// Human-readable label of a compact: `(level) label`.
    pub fn describe(&self, c: CompactElement) -> String {
        format!("({}) {}", c.level, self.tower.level(c.level).label(c.elem))
    }
}

/// Above this many representatives the pairwise order check of
/// [`DInfinity::verify_iso`] is skipped and reported as such.
pub const ORDER_CHECK_LIMIT: usize = 2_000;

#[derive(Debug, Clone, Default, Serialize)]
pub struct IsoReport {
    pub compacts_checked: usize,
    pub finfuns_checked: usize,
    pub order_pairs_checked: usize,
    pub order_checked: bool,
    pub failures: Vec<Counterexample>,
}

impl IsoReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}
