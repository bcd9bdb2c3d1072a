//! Exhaustive law suites over all small posets and maps.
//!
//! Each suite returns a [`LawReport`]; a failing law carries a JSON witness
//! naming the inputs that break it.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{exponential, lfp, lfp_map, product};
use crate::bilimit::{CompactElement, Tower};
use crate::error::Result;
use crate::lifting::{extend, free_extension_set, LiftedPoset, PartialElement};
use crate::maps::{
    check_monotone, enumerate_continuous_maps, enumerate_monotone_tables, preserves_directed_sups,
    MonotoneMap, DEFAULT_CONTINUITY_BOUND, DEFAULT_ENUMERATION_BUDGET,
};
use crate::poset::Poset;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub law: String,
    pub witness: Value,
}

impl Counterexample {
    pub fn new(law: &str, witness: Value) -> Self {
        Counterexample {
            law: law.to_string(),
            witness,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LawReport {
    pub suite: String,
    pub checks: usize,
    pub failures: Vec<Counterexample>,
}

impl LawReport {
    fn new(suite: &str) -> Self {
        LawReport {
            suite: suite.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Records one check; keeps at most one witness per law.
    fn check(&mut self, law: &str, ok: bool, witness: impl FnOnce() -> Value) {
        self.checks += 1;
        if !ok && !self.failures.iter().any(|f| f.law == law) {
            self.failures.push(Counterexample::new(law, witness()));
        }
    }
}

/// Every poset on `n` elements up to isomorphism, as the naturally labeled
/// ones (`i ⊑ j` implies `i ≤ j`); duplicates within an isomorphism class remain.
pub fn naturally_labeled_posets(n: usize) -> Vec<Poset> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut flat = vec![false; n * n];
        for i in 0..n {
            flat[i * n + i] = true;
        }
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                flat[i * n + j] = true;
            }
        }
        if let Ok(p) = Poset::from_flat(n, flat) {
            out.push(p);
        }
    }
    out
}

/// All naturally labeled posets with at most `max` elements.
pub fn posets_up_to(max: usize) -> Vec<Arc<Poset>> {
    (0..=max).flat_map(naturally_labeled_posets).map(Arc::new).collect()
}

/// Every function `0..len → 0..range`, as tables in lexicographic order.
pub fn all_tables(len: usize, range: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current = if len == 0 || range > 0 { Some(vec![0; len]) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = current.as_mut().expect("checked above");
        let mut k = len;
        loop {
            if k == 0 {
                current = None;
                break;
            }
            k -= 1;
            next[k] += 1;
            if next[k] < range {
                break;
            }
            next[k] = 0;
        }
        Some(out)
    })
}

fn poset_json(p: &Poset) -> Value {
    serde_json::to_value(p.to_json()).unwrap_or(Value::Null)
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..(1u64 << n)).map(move |mask| (0..n).filter(|&b| mask >> b & 1 == 1).collect())
}

/// Order axioms, suprema, directed maxima, semidirected suprema and powerset unions.
pub fn poset_laws(max_size: usize) -> LawReport {
    let mut r = LawReport::new("poset");
    for p in posets_up_to(max_size) {
        r.check("order-axioms", p.check_axioms().is_ok(), || poset_json(&p));
        let bottom = p.least_element();
        for s in subsets(p.size()) {
            if let Some(sup) = p.supremum_of(&s) {
                let least = p.elements().filter(|&u| p.is_upper_bound(&s, u)).all(|u| p.leq(sup, u));
                r.check("supremum-is-least-upper-bound", p.is_upper_bound(&s, sup) && least, || {
                    json!({ "poset": poset_json(&p), "subset": s, "sup": sup })
                });
            }
            if p.is_directed(&s) {
                let sup = p.supremum_of(&s);
                r.check("directed-contains-sup", sup.is_some_and(|x| s.contains(&x)), || {
                    json!({ "poset": poset_json(&p), "subset": s })
                });
            }
            if let (Some(b), true) = (bottom, p.is_semidirected(&s)) {
                let mut with_bottom = s.clone();
                with_bottom.push(b);
                let lhs = p.semidirected_sup(&s).ok();
                r.check("semidirected-sup-adjoins-bottom", lhs == p.supremum_of(&with_bottom), || {
                    json!({ "poset": poset_json(&p), "subset": s })
                });
            }
        }
    }
    for n in 0..=max_size.min(3) {
        let p = Poset::powerset_lattice(n).expect("within bound");
        for family in subsets(p.size()) {
            let union = family.iter().fold(0, |acc, &m| acc | m);
            r.check("powerset-sup-is-union", p.supremum_of(&family) == Some(union), || {
                json!({ "n": n, "family": family })
            });
        }
    }
    r
}

/// Monotone ⇔ directed-sup preserving on every table between small posets,
/// and images of directed subsets stay directed.
pub fn continuity_laws(max_size: usize) -> LawReport {
    continuity_laws_bounded(max_size, DEFAULT_CONTINUITY_BOUND)
}

/// [`continuity_laws`] with the directed-subset search capped at sources of
/// `bound` elements.
pub fn continuity_laws_bounded(max_size: usize, bound: usize) -> LawReport {
    let mut r = LawReport::new("continuity");
    let posets = posets_up_to(max_size);
    for p in &posets {
        for q in &posets {
            for table in all_tables(p.size(), q.size()) {
                let monotone = check_monotone(p, q, &table).is_ok();
                let continuous = preserves_directed_sups(p, q, &table, bound).unwrap_or(false);
                r.check("monotone-iff-continuous", monotone == continuous, || {
                    json!({ "source": poset_json(p), "target": poset_json(q), "table": table })
                });
                if monotone && p.size() <= 5 {
                    for s in subsets(p.size()).filter(|s| p.is_directed(s)) {
                        let image: Vec<usize> = s.iter().map(|&x| table[x]).collect();
                        r.check("image-of-directed-is-directed", q.is_directed(&image), || {
                            json!({ "source": poset_json(p), "target": poset_json(q), "table": table, "subset": s })
                        });
                    }
                }
            }
        }
    }
    r
}

/// Monad laws for the Kleisli extension [`extend`].
pub fn monad_laws(max_base_size: usize) -> LawReport {
    monad_laws_with(max_base_size, &extend)
}

type Extension = dyn Fn(&[PartialElement], PartialElement) -> PartialElement;

/// Monad laws for an arbitrary candidate extension operator:
/// `η^# = id`, `f^# ∘ η = f` and `(g^# ∘ f)^# = g^# ∘ f^#`, over every pair of
/// maps between sets of size at most `max_base_size`.
pub fn monad_laws_with(max_base_size: usize, ext: &Extension) -> LawReport {
    let mut r = LawReport::new("monad");
    let partial = |l: &LiftedPoset, i: usize| l.element(i);
    for a in 0..=max_base_size {
        let la = LiftedPoset::lift_set(a);
        let eta: Vec<PartialElement> = (0..a).map(PartialElement::Defined).collect();
        for l in la.elements() {
            r.check("unit-extension-is-identity", ext(&eta, l) == l, || json!({ "size": a, "arg": format!("{l:?}") }));
        }
        for b in 0..=max_base_size {
            let lb = LiftedPoset::lift_set(b);
            let fs: Vec<Vec<PartialElement>> = all_tables(a, b + 1)
                .map(|t| t.into_iter().map(|i| partial(&lb, i)).collect())
                .collect();
            for f in &fs {
                for x in 0..a {
                    r.check("extension-after-unit", ext(f, PartialElement::Defined(x)) == f[x], || {
                        json!({ "f": format!("{f:?}"), "x": x })
                    });
                }
            }
            for c in 0..=max_base_size {
                let lc = LiftedPoset::lift_set(c);
                let gs: Vec<Vec<PartialElement>> = all_tables(b, c + 1)
                    .map(|t| t.into_iter().map(|i| partial(&lc, i)).collect())
                    .collect();
                for f in &fs {
                    for g in &gs {
                        let gf: Vec<PartialElement> = f.iter().map(|&y| ext(g, y)).collect();
                        for l in la.elements() {
                            r.check("extension-composition", ext(&gf, l) == ext(g, ext(f, l)), || {
                                json!({ "f": format!("{f:?}"), "g": format!("{g:?}"), "arg": format!("{l:?}") })
                            });
                        }
                    }
                }
            }
        }
    }
    r
}

/// For every set `X` with `|X| ≤ min(2, max_size)`, every pointed poset `D` with
/// `|D| ≤ max_size` and every `f : X → D`, exactly one strict continuous
/// `L(X) → D` restricts to `f` along `η`, and it is the free extension.
pub fn freeness_laws(max_size: usize) -> LawReport {
    let mut r = LawReport::new("free");
    for x in 0..=max_size.min(2) {
        let lx = LiftedPoset::lift_set(x);
        for d in posets_up_to(max_size) {
            let Some(bottom) = d.least_element() else { continue };
            let strict: Vec<MonotoneMap> =
                match enumerate_continuous_maps(lx.poset(), &d, DEFAULT_ENUMERATION_BUDGET) {
                    Ok(maps) => maps.into_iter().filter(|m| m.apply(0) == bottom).collect(),
                    Err(_) => continue,
                };
            for f in all_tables(x, d.size()) {
                let extending: Vec<&MonotoneMap> = strict
                    .iter()
                    .filter(|m| (0..x).all(|i| m.apply(lx.embed(i)) == f[i]))
                    .collect();
                let fbar = free_extension_set(&lx, d.clone(), &f).ok();
                let ok = extending.len() == 1 && fbar.as_ref() == Some(extending[0]);
                r.check("unique-strict-extension", ok, || {
                    json!({ "set_size": x, "target": poset_json(&d), "f": f, "count": extending.len() })
                });
            }
        }
    }
    r
}

/// Existence and uniqueness of product mediators over all posets of size ≤ `max_size`.
pub fn product_laws(max_size: usize) -> LawReport {
    let mut r = LawReport::new("product");
    let posets = posets_up_to(max_size);
    for e in &posets {
        for p in &posets {
            for q in &posets {
                let Ok(prod) = product(p.clone(), q.clone(), DEFAULT_ENUMERATION_BUDGET) else { continue };
                let Ok(ks) = enumerate_continuous_maps(e, prod.poset(), DEFAULT_ENUMERATION_BUDGET) else { continue };
                let (pr1, pr2) = (prod.pr1(), prod.pr2());
                let mut by_legs: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
                for k in &ks {
                    let legs = (
                        pr1.after(k).expect("types match").into_table(),
                        pr2.after(k).expect("types match").into_table(),
                    );
                    *by_legs.entry(legs).or_default() += 1;
                }
                let fs = enumerate_monotone_tables(e, p, DEFAULT_ENUMERATION_BUDGET).unwrap_or_default();
                let gs = enumerate_monotone_tables(e, q, DEFAULT_ENUMERATION_BUDGET).unwrap_or_default();
                for f in &fs {
                    for g in &gs {
                        let count = by_legs.get(&(f.clone(), g.clone())).copied().unwrap_or(0);
                        let fm = MonotoneMap::new(e.clone(), p.clone(), f.clone()).expect("enumerated");
                        let gm = MonotoneMap::new(e.clone(), q.clone(), g.clone()).expect("enumerated");
                        let k = prod.pair_mediator(&fm, &gm).expect("types match");
                        let commutes = pr1.after(&k).ok().as_ref() == Some(&fm) && pr2.after(&k).ok().as_ref() == Some(&gm);
                        r.check("unique-mediator", count == 1 && commutes, || {
                            json!({ "e": poset_json(e), "p": poset_json(p), "q": poset_json(q), "f": f, "g": g, "count": count })
                        });
                    }
                }
                // no mediator for pairs outside the enumerated legs
                r.check("legs-are-continuous", by_legs.len() == fs.len() * gs.len(), || {
                    json!({ "e": poset_json(e), "p": poset_json(p), "q": poset_json(q) })
                });
            }
        }
    }
    r
}

/// `ev ∘ (curry f × id) = f` and uniqueness of the transpose, over all posets
/// of size ≤ `max_size`.
pub fn exponential_laws(max_size: usize) -> LawReport {
    let mut r = LawReport::new("exponential");
    let posets = posets_up_to(max_size);
    let budget = DEFAULT_ENUMERATION_BUDGET;
    for dp in &posets {
        for d in &posets {
            for e in &posets {
                let Ok(exp) = exponential(d.clone(), e.clone(), budget) else { continue };
                if let Some(least) = exp.least() {
                    r.check("least-is-const-bottom", exp.poset().least_element() == Some(least), || {
                        json!({ "d": poset_json(d), "e": poset_json(e) })
                    });
                }
                let Ok(ev_dom) = product(exp.poset().clone(), d.clone(), budget) else { continue };
                let Ok(ev) = exp.eval_map(&ev_dom) else { continue };
                let Ok(src) = product(dp.clone(), d.clone(), budget) else { continue };
                let Ok(ks) = enumerate_continuous_maps(dp, exp.poset(), budget) else { continue };
                let id = MonotoneMap::identity(d.clone());
                let mut by_transpose: HashMap<Vec<usize>, usize> = HashMap::new();
                for k in &ks {
                    let kx = src.map_product(&ev_dom, k, &id).expect("types match");
                    *by_transpose.entry(ev.after(&kx).expect("types match").into_table()).or_default() += 1;
                }
                let Ok(fs) = enumerate_continuous_maps(src.poset(), e, budget) else { continue };
                for f in &fs {
                    let curried = exp.curry(&src, f);
                    let roundtrip = curried.as_ref().ok().and_then(|c| {
                        let kx = src.map_product(&ev_dom, c, &id).ok()?;
                        ev.after(&kx).ok()
                    });
                    let count = by_transpose.get(f.table()).copied().unwrap_or(0);
                    r.check("unique-transpose", roundtrip.as_ref() == Some(f) && count == 1, || {
                        json!({ "d'": poset_json(dp), "d": poset_json(d), "e": poset_json(e), "f": f.table(), "count": count })
                    });
                }
            }
        }
    }
    r
}

/// Least fixed points of every monotone endomap of every poset of size ≤
/// `max_size`, and monotonicity of `f ↦ μ(f)`.
pub fn lfp_laws(max_size: usize) -> LawReport {
    let mut r = LawReport::new("lfp");
    for p in posets_up_to(max_size) {
        if p.least_element().is_none() {
            continue;
        }
        let Ok(maps) = enumerate_continuous_maps(&p, &p, DEFAULT_ENUMERATION_BUDGET) else { continue };
        for f in &maps {
            let Ok(mu) = lfp(f) else {
                r.check("lfp-exists", false, || json!({ "poset": poset_json(&p), "f": f.table() }));
                continue;
            };
            let least = p.elements().filter(|&y| p.leq(f.apply(y), y)).all(|y| p.leq(mu, y));
            r.check("lfp-is-least-fixed-point", f.apply(mu) == mu && least, || {
                json!({ "poset": poset_json(&p), "f": f.table(), "mu": mu })
            });
        }
        if let Ok(space) = exponential(p.clone(), p.clone(), DEFAULT_ENUMERATION_BUDGET) {
            let ok: Result<MonotoneMap> = lfp_map(&space);
            r.check("lfp-map-monotone", ok.is_ok(), || json!({ "poset": poset_json(&p) }));
        }
    }
    r
}

pub const TOWER_ORDER_LIMIT: usize = 300;

/// The bilimit invariants of one tower: e-p composites, κ-constancy, the
/// section and deflation laws on compacts, commutation, the monotone family,
/// truncated reconstruction and the partial order on compacts. The order
/// axioms are only checked when there are at most [`TOWER_ORDER_LIMIT`] compacts.
pub fn tower_laws(tower: &Tower) -> LawReport {
    let mut r = LawReport::new("tower");
    let n = tower.depth();
    r.check("tower-valid", tower.validate().is_ok(), || {
        json!({ "error": tower.validate().err().map(|e| e.to_string()) })
    });
    for i in 0..=n {
        for j in 0..=n {
            let witness = tower.kappa_witness(i, j).ok().flatten();
            r.check("kappa-constant", witness.is_none(), || json!({ "i": i, "j": j, "x": witness.map(|w| w.0), "k": witness.map(|w| w.1) }));
        }
    }
    let compacts = tower.compacts(n);
    let at = |c: CompactElement, i: usize| tower.project_compact(c, i).expect("level checked");
    let embed = |i: usize, x: usize| tower.embed_compact(i, x).expect("level checked");
    for level in 0..=n {
        for x in tower.level(level).elements() {
            let c = embed(level, x);
            r.check("section", at(c, level) == x, || json!({ "level": level, "x": x }));
            for j in level..=n {
                let up = embed(j, tower.eps(level, j).apply(x));
                r.check("embedding-commutes", up == c, || json!({ "i": level, "j": j, "x": x }));
            }
        }
    }
    for &c in &compacts {
        for i in 0..=n {
            let truncated = embed(i, at(c, i));
            r.check("deflation", tower.compact_leq(truncated, c), || json!({ "compact": c, "level": i }));
            for j in i..=n {
                r.check("projection-commutes", at(c, i) == tower.pis(i, j).apply(at(c, j)), || {
                    json!({ "compact": c, "i": i, "j": j })
                });
                r.check("monotone-family", tower.compact_leq(truncated, embed(j, at(c, j))), || {
                    json!({ "compact": c, "i": i, "j": j })
                });
            }
        }
        let family: Vec<CompactElement> = (0..=n).map(|i| embed(i, at(c, i))).collect();
        r.check("truncated-reconstruction", tower.compact_sup(&family).ok() == Some(c), || json!({ "compact": c }));
    }
    if compacts.len() > TOWER_ORDER_LIMIT {
        return r;
    }
    for &c in &compacts {
        r.check("compact-order-reflexive", tower.compact_leq(c, c), || json!({ "compact": c }));
        for &d in &compacts {
            let both = tower.compact_leq(c, d) && tower.compact_leq(d, c);
            r.check("compact-order-antisymmetric", !both || c == d, || json!({ "left": c, "right": d }));
            if tower.compact_leq(c, d) {
                for &e in compacts.iter().filter(|&&e| tower.compact_leq(d, e)) {
                    r.check("compact-order-transitive", tower.compact_leq(c, e), || {
                        json!({ "left": c, "middle": d, "right": e })
                    });
                }
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_suite_passes_on_dn() {
        let model = crate::dinfty::DInfinity::build(2).unwrap();
        let report = tower_laws(model.tower());
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.checks > 100);
    }

    #[test]
    fn poset_counts() {
        // naturally labeled posets: 1, 1, 2, 7, 40
        let counts: Vec<usize> = (0..5).map(|n| naturally_labeled_posets(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 7, 40]);
    }

    #[test]
    fn table_enumeration() {
        assert_eq!(all_tables(2, 2).collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(all_tables(0, 3).count(), 1);
        assert_eq!(all_tables(2, 0).count(), 0);
    }

    #[test]
    fn small_suites_pass() {
        for report in [poset_laws(3), continuity_laws(2), monad_laws(2), freeness_laws(3), lfp_laws(3)] {
            assert!(report.passed(), "{}: {:?}", report.suite, report.failures);
            assert!(report.checks > 0);
        }
    }

    #[test]
    fn corrupted_extension_is_caught() {
        // forgets definedness: sends ⊥ to the first defined value when there is one
        let broken = |f: &[PartialElement], l: PartialElement| match l {
            PartialElement::Undefined => f.first().copied().unwrap_or(PartialElement::Undefined),
            PartialElement::Defined(x) => f[x],
        };
        let report = monad_laws_with(1, &broken);
        assert!(!report.passed());
        assert!(report.failures.iter().any(|f| f.law == "unit-extension-is-identity"));
    }
}
