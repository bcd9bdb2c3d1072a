mod common;

use std::sync::Arc;

use dcpo_core::{constant_tower, enumerate_continuous_maps, CompactElement, DInfinity, EpPair, MonotoneMap, Poset, Tower};

fn dn2() -> DInfinity {
    DInfinity::build(2).unwrap()
}

/// `TWO → 3-chain → 4-chain`, each step the top-preserving inclusion.
fn chain_tower() -> Tower {
    let levels: Vec<Arc<Poset>> = (2..=4).map(|n| Arc::new(Poset::chain(n))).collect();
    let steps = (0..2)
        .map(|i| {
            let (lo, hi) = (levels[i].clone(), levels[i + 1].clone());
            let e: Vec<usize> = lo.elements().map(|x| if x == 0 { 0 } else { x + 1 }).collect();
            let p: Vec<usize> = hi.elements().map(|y| y.saturating_sub(1)).collect();
            (MonotoneMap::new(lo.clone(), hi.clone(), e).unwrap(), MonotoneMap::new(hi, lo, p).unwrap())
        })
        .collect();
    Tower::build(levels, steps).unwrap()
}

fn towers() -> Vec<Tower> {
    vec![
        dn2().tower().clone(),
        chain_tower(),
        constant_tower(Arc::new(Poset::powerset_lattice(2).unwrap()), 3),
    ]
}

#[test]
fn composites_are_ep_pairs() {
    for t in towers() {
        t.validate().unwrap();
        for i in 0..=t.depth() {
            for j in i..=t.depth() {
                let (e, p) = (t.eps(i, j), t.pis(i, j));
                assert_eq!(p.after(e).unwrap(), MonotoneMap::identity(t.level(i).clone()));
                assert!(e.after(p).unwrap().is_deflation().unwrap());
            }
        }
    }
}

#[test]
fn kappa_is_constant() {
    for t in towers() {
        for i in 0..=t.depth() {
            for j in 0..=t.depth() {
                // brute force over every k, compared against ρ_{i,j}
                for x in t.level(i).elements() {
                    let rho = t.rho_apply(i, j, x);
                    for k in i.max(j)..=t.depth() {
                        assert_eq!(t.pis(j, k).apply(t.eps(i, k).apply(x)), rho);
                    }
                }
                assert!(t.verify_kappa_constant(i, j).unwrap());
            }
        }
    }
}

/// A second e-p pair `D_1 ⇄ D_2`, different from the real step.
fn alternative_step(t: &Tower) -> Option<EpPair> {
    let (d1, d2) = (t.level(1), t.level(2));
    let embeddings = enumerate_continuous_maps(d1, d2, usize::MAX).unwrap();
    let projections = enumerate_continuous_maps(d2, d1, usize::MAX).unwrap();
    for e in &embeddings {
        for p in &projections {
            if let Ok(pair) = EpPair::new(e.clone(), p.clone()) {
                if pair.embedding() != t.eps(1, 2) {
                    return Some(pair);
                }
            }
        }
    }
    None
}

#[test]
fn tampered_composite_breaks_kappa() {
    let t = dn2().tower().clone();
    let other = alternative_step(&t).expect("D_1 has another embedding into D_2");
    let pairs: Vec<Vec<EpPair>> = (0..=2)
        .map(|i| (i..=2).map(|j| if (i, j) == (1, 2) { other.clone() } else { t.pair(i, j).clone() }).collect())
        .collect();
    let broken = Tower::from_composites_unchecked(t.levels().to_vec(), pairs);
    assert!(broken.validate().is_err());
    let witnessed = (0..=2).flat_map(|i| (0..=2).map(move |j| (i, j))).any(|(i, j)| {
        broken.kappa_witness(i, j).unwrap().is_some()
    });
    assert!(witnessed);
}

#[test]
fn section_deflation_and_commutation() {
    for t in towers() {
        let n = t.depth();
        let compacts = t.compacts(n);
        for level in 0..=n {
            for x in t.level(level).elements() {
                let c = t.embed_compact(level, x).unwrap();
                assert_eq!(t.project_compact(c, level).unwrap(), x);
                for j in level..=n {
                    assert_eq!(t.embed_compact(j, t.eps(level, j).apply(x)).unwrap(), c);
                }
            }
        }
        for &c in &compacts {
            for i in 0..=n {
                let back = t.embed_compact(i, t.project_compact(c, i).unwrap()).unwrap();
                assert!(t.compact_leq(back, c));
                for j in i..=n {
                    let pj = t.project_compact(c, j).unwrap();
                    assert_eq!(t.project_compact(c, i).unwrap(), t.pis(i, j).apply(pj));
                    let later = t.embed_compact(j, pj).unwrap();
                    assert!(t.compact_leq(back, later));
                }
            }
        }
    }
}

#[test]
fn truncated_reconstruction() {
    for t in towers() {
        for c in t.compacts(t.depth()) {
            let family: Vec<CompactElement> = (0..=t.depth())
                .map(|i| t.embed_compact(i, t.project_compact(c, i).unwrap()).unwrap())
                .collect();
            assert_eq!(t.compact_sup(&family).unwrap(), c);
        }
    }
}

#[test]
fn compact_order_is_componentwise() {
    for t in towers() {
        let cs = t.compacts(t.depth());
        for &c in &cs {
            assert!(t.is_canonical(c));
            for &d in &cs {
                let (a, b) = (t.components(c), t.components(d));
                let pointwise = (0..=t.depth()).all(|i| t.level(i).leq(a[i], b[i]));
                assert_eq!(t.compact_leq(c, d), pointwise);
                if t.compact_leq(c, d) && t.compact_leq(d, c) {
                    assert_eq!(c, d);
                }
                for &e in &cs {
                    if t.compact_leq(c, d) && t.compact_leq(d, e) {
                        assert!(t.compact_leq(c, e));
                    }
                }
            }
        }
        let bottom = t.bottom().unwrap();
        assert!(cs.iter().all(|&c| t.compact_leq(bottom, c)));
    }
}

#[test]
fn mediators_exist_and_are_unique() {
    let e = Arc::new(Poset::chain(2));
    for t in towers() {
        let n = t.depth();
        let top = t.level(n).clone();
        // every cocone is induced by its top leg; the mediator agrees with it
        for g in enumerate_continuous_maps(&top, &e, usize::MAX).unwrap() {
            let legs: Vec<MonotoneMap> = (0..=n).map(|i| g.after(t.eps(i, n)).unwrap()).collect();
            let m = t.colimit_mediator(&e, legs.clone()).unwrap();
            for i in 0..=n {
                for x in t.level(i).elements() {
                    assert_eq!(m.apply(t.embed_compact(i, x).unwrap()), legs[i].apply(x));
                }
            }
            let agreeing = enumerate_continuous_maps(&top, &e, usize::MAX)
                .unwrap()
                .into_iter()
                .filter(|h| (0..=n).all(|i| h.after(t.eps(i, n)).unwrap() == legs[i]))
                .count();
            assert_eq!(agreeing, 1);
        }
        for f in enumerate_continuous_maps(&e, &top, usize::MAX).unwrap() {
            let legs: Vec<MonotoneMap> = (0..=n).map(|i| t.pis(i, n).after(&f).unwrap()).collect();
            let m = t.limit_mediator(&e, legs.clone()).unwrap();
            for y in e.elements() {
                let thread = m.apply(&t, y);
                assert_eq!(thread.components, t.components(thread.compact));
                assert_eq!(thread.components[n], f.apply(y));
            }
            let agreeing = enumerate_continuous_maps(&e, &top, usize::MAX)
                .unwrap()
                .into_iter()
                .filter(|h| (0..=n).all(|i| t.pis(i, n).after(h).unwrap() == legs[i]))
                .count();
            assert_eq!(agreeing, 1);
        }
    }
}

#[test]
fn broken_cocones_are_rejected() {
    let t = chain_tower();
    let e = Arc::new(Poset::chain(2));
    let legs: Vec<MonotoneMap> = (0..=2)
        .map(|i| MonotoneMap::constant(t.level(i).clone(), e.clone(), if i == 2 { 1 } else { 0 }).unwrap())
        .collect();
    assert!(t.colimit_mediator(&e, legs).is_err());
}

#[test]
fn tower_json_roundtrip() {
    let t = chain_tower();
    let ids: Vec<String> = (0..=2).map(|i| format!("C{i}")).collect();
    let posets = (0..=2).map(|i| (ids[i].clone(), t.level(i).to_json())).collect();
    let json = t.to_json(&ids, Some(posets));
    let text = serde_json::to_string(&json).unwrap();
    let parsed: dcpo_core::TowerJson = serde_json::from_str(&text).unwrap();
    let back = Tower::from_json(&parsed, |j| {
        let table = j.posets.as_ref().unwrap();
        j.levels.iter().map(|id| Ok(Arc::new(Poset::from_json(&table[id])?))).collect()
    })
    .unwrap();
    assert_eq!(back.sizes(), t.sizes());
    for i in 0..=2 {
        for j in i..=2 {
            assert_eq!(back.eps(i, j).table(), t.eps(i, j).table());
        }
    }
}

#[test]
fn tower_suite_reports_tampering() {
    let t = dn2().tower().clone();
    assert!(dcpo_core::laws::tower_laws(&t).passed());
    let other = alternative_step(&t).unwrap();
    let pairs: Vec<Vec<EpPair>> = (0..=2)
        .map(|i| (i..=2).map(|j| if (i, j) == (1, 2) { other.clone() } else { t.pair(i, j).clone() }).collect())
        .collect();
    let broken = Tower::from_composites_unchecked(t.levels().to_vec(), pairs);
    let report = dcpo_core::laws::tower_laws(&broken);
    assert!(report.failures.iter().any(|f| f.law == "tower-valid"));
    assert!(report.failures.iter().any(|f| f.law == "kappa-constant"));
}
