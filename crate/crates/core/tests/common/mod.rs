//! Independent oracles shared by the integration tests. Nothing here calls
//! into the enumeration, canonicalization or Φ/Ψ code paths it is used to check.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use dcpo_core::lambda::Term;
use dcpo_core::{DInfinity, Poset};

/// Every poset on `n` elements up to isomorphism: all upper-triangular
/// relations that happen to be transitive.
pub fn posets_iso(n: usize) -> Vec<Arc<Poset>> {
    let mut out = Vec::new();
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    for mask in 0u32..(1 << slots.len()) {
        let mut rel = vec![vec![false; n]; n];
        for i in 0..n {
            rel[i][i] = true;
        }
        for (b, &(i, j)) in slots.iter().enumerate() {
            rel[i][j] = mask >> b & 1 == 1;
        }
        let transitive = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(rel[i][j] && rel[j][k]) || rel[i][k])));
        if transitive {
            out.push(Arc::new(Poset::new(rel).unwrap()));
        }
    }
    out
}

pub fn posets_iso_up_to(max: usize) -> Vec<Arc<Poset>> {
    (0..=max).flat_map(posets_iso).collect()
}

/// Every table `0..len → 0..range`.
pub fn every_table(len: usize, range: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..range).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn is_monotone_naive(p: &Poset, q: &Poset, t: &[usize]) -> bool {
    (0..p.size()).all(|i| (0..p.size()).all(|j| !p.leq(i, j) || q.leq(t[i], t[j])))
}

/// Naive filter over all `|Q|^|P|` tables.
pub fn naive_monotone_tables(p: &Poset, q: &Poset) -> Vec<Vec<usize>> {
    every_table(p.size(), q.size())
        .into_iter()
        .filter(|t| is_monotone_naive(p, q, t))
        .collect()
}

/// Plain recursive count of monotone self-maps, checking every related pair
/// in both directions against the values already placed (index order).
pub fn count_monotone_recursive(p: &Poset) -> usize {
    fn go(p: &Poset, t: &mut Vec<usize>, count: &mut usize) {
        let i = t.len();
        if i == p.size() {
            *count += 1;
            return;
        }
        for v in 0..p.size() {
            let ok = (0..i).all(|j| (!p.leq(j, i) || p.leq(t[j], v)) && (!p.leq(i, j) || p.leq(v, t[j])));
            if ok {
                t.push(v);
                go(p, t, count);
                t.pop();
            }
        }
    }
    let mut count = 0;
    go(p, &mut Vec::new(), &mut count);
    count
}

/// The pointwise order on a list of tables over `cod`.
pub fn pointwise_poset(tables: &[Vec<usize>], cod: &Poset) -> Poset {
    let n = tables.len();
    let rel = (0..n)
        .map(|i| (0..n).map(|j| tables[i].iter().zip(&tables[j]).all(|(&a, &b)| cod.leq(a, b))).collect())
        .collect();
    Poset::new(rel).unwrap()
}

/// A second evaluator for cutoff denotations. Values are full threads
/// `(σ_0, …, σ_N)`; the step maps are recomputed from their defining
/// equations; application uses the top component of the function thread:
/// `(σ · τ)` is the thread of `σ_N(τ_{N-1})` at level `N - 1`.
pub struct ThreadEvaluator<'a> {
    model: &'a DInfinity,
    eps: Vec<Vec<usize>>,
    pis: Vec<Vec<usize>>,
}

impl<'a> ThreadEvaluator<'a> {
    pub fn new(model: &'a DInfinity) -> Self {
        let depth = model.depth();
        let mut eps: Vec<Vec<usize>> = Vec::new();
        let mut pis: Vec<Vec<usize>> = Vec::new();
        let d0 = model.tower().level(0);
        // D_0 = {⊥, η⋆} with ⊥ at index 0
        for n in 0..depth {
            let above = model.space(n + 1);
            if n == 0 {
                eps.push((0..d0.size()).map(|x| above.index_of(&vec![x; d0.size()]).unwrap()).collect());
                pis.push((0..above.size()).map(|f| above.table(f)[0]).collect());
            } else {
                let here = model.space(n);
                let (e, p) = (eps[n - 1].clone(), pis[n - 1].clone());
                eps.push(
                    (0..here.size())
                        .map(|f| {
                            let f = here.table(f);
                            let row: Vec<usize> = (0..p.len()).map(|y| e[f[p[y]]]).collect();
                            above.index_of(&row).unwrap()
                        })
                        .collect(),
                );
                pis.push(
                    (0..above.size())
                        .map(|g| {
                            let g = above.table(g);
                            let row: Vec<usize> = (0..e.len()).map(|x| p[g[e[x]]]).collect();
                            here.index_of(&row).unwrap()
                        })
                        .collect(),
                );
            }
        }
        ThreadEvaluator { model, eps, pis }
    }

    pub fn depth(&self) -> usize {
        self.model.depth()
    }

    /// The thread of `x ∈ D_level`.
    pub fn thread(&self, level: usize, x: usize) -> Vec<usize> {
        let n = self.depth();
        let mut out = vec![0; n + 1];
        out[level] = x;
        for j in level..n {
            out[j + 1] = self.eps[j][out[j]];
        }
        for j in (0..level).rev() {
            out[j] = self.pis[j][out[j + 1]];
        }
        out
    }

    pub fn apply(&self, f: &[usize], a: &[usize]) -> Vec<usize> {
        let n = self.depth();
        let table = self.model.space(n).table(f[n]);
        self.thread(n - 1, table[a[n - 1]])
    }

    pub fn eval(&self, term: &Term, env: &HashMap<String, Vec<usize>>, cutoff: usize) -> Vec<usize> {
        match term {
            Term::Var(x) => env[x].clone(),
            Term::App(f, a) => self.apply(&self.eval(f, env, cutoff), &self.eval(a, env, cutoff)),
            Term::Lam(x, body) => {
                let level = self.model.tower().level(cutoff);
                let row: Vec<usize> = (0..level.size())
                    .map(|d| {
                        let mut env = env.clone();
                        env.insert(x.clone(), self.thread(cutoff, d));
                        self.eval(body, &env, cutoff)[cutoff]
                    })
                    .collect();
                let f = self.model.space(cutoff + 1).index_of(&row).expect("lambda tables are monotone");
                self.thread(cutoff + 1, f)
            }
        }
    }

    /// `⊥_{D_n}` at every level, computed from the step maps.
    pub fn bottom_thread(&self) -> Vec<usize> {
        self.thread(0, 0)
    }
}

/// Every λ-term with at most `max_size` nodes whose free variables lie in
/// `free`. Binders are named `v0, v1, …` by nesting depth.
pub fn terms(max_size: usize, free: &[&str]) -> Vec<Term> {
    fn go(size: usize, scope: &mut Vec<String>) -> Vec<Term> {
        let mut out = Vec::new();
        if size == 1 {
            out.extend(scope.iter().map(|x| Term::var(x)));
        }
        if size >= 2 {
            let name = format!("v{}", scope.len());
            scope.push(name.clone());
            for body in go(size - 1, scope) {
                out.push(Term::lam(&name, body));
            }
            scope.pop();
        }
        for left in 1..size.saturating_sub(1) {
            let right = size - 1 - left;
            let fs = go(left, scope);
            let args = go(right, scope);
            for f in &fs {
                for a in &args {
                    out.push(Term::app(f.clone(), a.clone()));
                }
            }
        }
        out
    }
    let mut scope: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    (1..=max_size).flat_map(|n| go(n, &mut scope)).collect()
}
