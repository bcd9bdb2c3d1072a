mod common;

use dcpo_core::Poset;
use proptest::prelude::*;

/// A random poset: transitive closure of random upward edges, then relabeled
/// by a random permutation.
fn arb_poset(max: usize) -> impl Strategy<Value = Poset> {
    (0..=max)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<bool>(), n * n),
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            )
        })
        .prop_map(|(n, bits, perm)| {
            let mut rel = vec![vec![false; n]; n];
            for i in 0..n {
                rel[i][i] = true;
                for j in i + 1..n {
                    rel[i][j] = bits[i * n + j];
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if rel[i][k] && rel[k][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
            let relabeled = (0..n).map(|i| (0..n).map(|j| rel[perm[i]][perm[j]]).collect()).collect();
            Poset::new(relabeled).unwrap()
        })
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1 << n)).map(move |m| (0..n).filter(|&b| m >> b & 1 == 1).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn axioms_hold_after_construction(p in arb_poset(8)) {
        prop_assert!(p.check_axioms().is_ok());
    }

    #[test]
    fn supremum_is_least_upper_bound(p in arb_poset(7)) {
        for s in subsets(p.size()) {
            if let Some(sup) = p.supremum_of(&s) {
                prop_assert!(p.is_upper_bound(&s, sup));
                for u in p.elements().filter(|&u| p.is_upper_bound(&s, u)) {
                    prop_assert!(p.leq(sup, u));
                }
            } else {
                // brute force: no upper bound is below all the others
                let ubs: Vec<usize> = p.elements().filter(|&u| p.is_upper_bound(&s, u)).collect();
                prop_assert!(!ubs.iter().any(|&a| ubs.iter().all(|&b| p.leq(a, b))));
            }
        }
    }

    #[test]
    fn directed_subsets_contain_their_supremum(p in arb_poset(8)) {
        for s in subsets(p.size()).filter(|s| p.is_directed(s)) {
            let sup = p.supremum_of(&s);
            prop_assert!(sup.is_some_and(|x| s.contains(&x)));
        }
    }

    #[test]
    fn json_roundtrip(p in arb_poset(6)) {
        let text = serde_json::to_string(&p.to_json()).unwrap();
        let back = Poset::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn covers_generate_the_order(p in arb_poset(7)) {
        // reflexive-transitive closure of the covers gives back the order
        let n = p.size();
        let mut reach = vec![vec![false; n]; n];
        for i in 0..n { reach[i][i] = true; }
        for (i, j) in p.hasse_covers() { reach[i][j] = true; }
        for k in 0..n { for i in 0..n { for j in 0..n {
            if reach[i][k] && reach[k][j] { reach[i][j] = true; }
        }}}
        for i in 0..n { for j in 0..n { prop_assert_eq!(reach[i][j], p.leq(i, j)); } }
    }
}

#[test]
fn semidirected_sup_adjoins_bottom() {
    for p in common::posets_iso_up_to(6) {
        let Some(bottom) = p.least_element() else { continue };
        for s in subsets(p.size()).filter(|s| p.is_semidirected(s)) {
            let mut with_bottom = s.clone();
            with_bottom.push(bottom);
            assert_eq!(p.semidirected_sup(&s).ok(), p.supremum_of(&with_bottom));
        }
    }
}

#[test]
fn powerset_sups_are_unions() {
    for n in 0..=3 {
        let p = Poset::powerset_lattice(n).unwrap();
        for family in subsets(p.size()) {
            let union = family.iter().fold(0, |a, &m| a | m);
            assert_eq!(p.supremum_of(&family), Some(union));
        }
    }
}

#[test]
fn powerset_covers_brute_force() {
    let p = Poset::powerset_lattice(2).unwrap();
    let brute: Vec<(usize, usize)> = (0usize..4)
        .flat_map(|i| (0usize..4).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && i & !j == 0 && (j & !i).count_ones() == 1)
        .collect();
    assert_eq!(p.hasse_covers(), brute);
    assert_eq!(brute.len(), 4);
}

#[test]
fn dot_lists_every_cover() {
    let p = Poset::powerset_lattice(2).unwrap();
    let dot = p.to_dot();
    for (i, j) in p.hasse_covers() {
        assert!(dot.contains(&format!("n{i} -> n{j};")));
    }
    assert!(dot.contains("label=\"{0,1}\""));
}
