use std::collections::BTreeSet;

use proptest::prelude::*;
use qmarkov::graph::{chordal_structure, decompositions, mcs, separates, Graph};

const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Graph on the first `n` names with edges chosen by the bits of `mask`.
fn graph(n: usize, mask: u64) -> (Graph, Vec<Vec<bool>>) {
    let mut adj = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                adj[i][j] = true;
                adj[j][i] = true;
                edges.push((NAMES[i], NAMES[j]));
            }
            bit += 1;
        }
    }
    (Graph::new(NAMES[..n].to_vec(), edges).unwrap(), adj)
}

fn members(bits: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| bits >> i & 1 == 1).collect()
}

fn names(set: &[usize]) -> Vec<&'static str> {
    set.iter().map(|&i| NAMES[i]).collect()
}

/// Breadth-first search from `a` to `b` avoiding `d`.
fn bfs_separates(adj: &[Vec<bool>], a: &[usize], b: &[usize], d: &[usize]) -> bool {
    let mut seen: BTreeSet<usize> = a.iter().copied().collect();
    let mut queue: Vec<usize> = a.to_vec();
    while let Some(v) = queue.pop() {
        if b.contains(&v) {
            return false;
        }
        for (w, &e) in adj[v].iter().enumerate() {
            if e && !d.contains(&w) && seen.insert(w) {
                queue.push(w);
            }
        }
    }
    true
}

/// Chordality by repeated removal of simplicial vertices.
fn brute_chordal(adj: &[Vec<bool>]) -> bool {
    let mut alive: Vec<usize> = (0..adj.len()).collect();
    'outer: while !alive.is_empty() {
        for (pos, &v) in alive.iter().enumerate() {
            let nb: Vec<usize> = alive.iter().copied().filter(|&w| adj[v][w]).collect();
            if nb.iter().all(|&x| nb.iter().all(|&y| x == y || adj[x][y])) {
                alive.remove(pos);
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn brute_maximal_cliques(adj: &[Vec<bool>]) -> BTreeSet<Vec<String>> {
    let n = adj.len();
    let complete = |s: &[usize]| s.iter().all(|&x| s.iter().all(|&y| x == y || adj[x][y]));
    let all: Vec<Vec<usize>> = (1u32..1 << n)
        .map(|b| members(b, n))
        .filter(|s| complete(s))
        .collect();
    all.iter()
        .filter(|s| {
            !all.iter()
                .any(|t| t.len() > s.len() && s.iter().all(|x| t.contains(x)))
        })
        .map(|s| s.iter().map(|&i| NAMES[i].to_string()).collect())
        .collect()
}

fn graph_strategy() -> impl Strategy<Value = (usize, u64)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), 0u64..1 << (n * (n - 1) / 2).max(1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn separation_matches_search((n, mask) in graph_strategy(), x in any::<u32>(), y in any::<u32>(), z in any::<u32>()) {
        let (g, adj) = graph(n, mask);
        let d = members(z, n);
        let a: Vec<usize> = members(x, n).into_iter().filter(|v| !d.contains(v)).collect();
        let b: Vec<usize> = members(y, n).into_iter().filter(|v| !d.contains(v) && !a.contains(v)).collect();
        let s = separates(&g, &names(&a), &names(&b), &names(&d)).unwrap();
        prop_assert_eq!(s, bfs_separates(&adj, &a, &b, &d));
        prop_assert_eq!(s, separates(&g, &names(&b), &names(&a), &names(&d)).unwrap());
        if s && !a.is_empty() {
            // shrinking either side keeps the separation
            prop_assert!(separates(&g, &names(&a[1..]), &names(&b), &names(&d)).unwrap());
        }
    }

    #[test]
    fn chordal_structure_matches_brute_force((n, mask) in graph_strategy()) {
        let (g, adj) = graph(n, mask);
        let chordal = brute_chordal(&adj);
        prop_assert_eq!(mcs(&g).is_chordal, chordal);
        match chordal_structure(&g) {
            Ok(cs) => {
                prop_assert!(chordal);
                let got: BTreeSet<Vec<String>> = cs.cliques.iter().cloned().collect();
                prop_assert_eq!(got, brute_maximal_cliques(&adj));
                prop_assert!(cs.running_intersection_holds());
                let seps: usize = cs.separators.iter().map(|s| s.multiplicity).sum();
                prop_assert_eq!(seps + cs.component_count(), cs.cliques.len());
                prop_assert_eq!(cs.component_count(), g.component_count());
                for t in cs.recursive_decompositions() {
                    prop_assert!(separates(&g, &t.a, &t.b, &t.d).unwrap());
                    prop_assert!(g.is_complete_set(&t.d));
                }
            }
            Err(_) => prop_assert!(!chordal),
        }
    }

    #[test]
    fn listed_decompositions_are_valid((n, mask) in graph_strategy()) {
        let (g, _) = graph(n, mask);
        for t in decompositions(&g) {
            prop_assert!(!t.a.is_empty() && !t.b.is_empty());
            prop_assert_eq!(t.a.len() + t.b.len() + t.d.len(), n);
            prop_assert!(g.is_complete_set(&t.d));
            prop_assert!(separates(&g, &t.a, &t.b, &t.d).unwrap());
        }
    }
}
