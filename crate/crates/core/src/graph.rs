//! Chordal graph recognition, junction trees and graph separation.
//!
//! Subsets are canonicalized as sorted label lists and every tie is broken
//! lexicographically on labels, so structures do not depend on input order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph on string-labeled vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    vertices: Vec<String>,
    adj: Vec<BTreeSet<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;
    fn try_from(r: GraphRepr) -> Result<Self> {
        Graph::new(r.vertices, r.edges)
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            edges: g.edges(),
            vertices: g.vertices,
        }
    }
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v.dedup();
    v
}

impl Graph {
    pub fn new<V, E, A, B>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(Error::InvalidGraph(format!("duplicate vertex {v:?}")));
            }
        }
        let mut adj = vec![BTreeSet::new(); vertices.len()];
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let find = |x: &str| {
                vertices.iter().position(|v| v == x).ok_or_else(|| {
                    Error::InvalidGraph(format!("edge endpoint {x:?} is not a vertex"))
                })
            };
            let (i, j) = (find(a)?, find(b)?);
            if i == j {
                return Err(Error::InvalidGraph(format!("loop at {a:?}")));
            }
            if !adj[i].insert(j) {
                return Err(Error::InvalidGraph(format!("duplicate edge {a:?}-{b:?}")));
            }
            adj[j].insert(i);
        }
        Ok(Graph { vertices, adj })
    }

    pub fn complete<S: AsRef<str>>(labels: &[S]) -> Self {
        let n = labels.len();
        Graph {
            vertices: labels.iter().map(|s| s.as_ref().to_string()).collect(),
            adj: (0..n)
                .map(|i| (0..n).filter(|&j| j != i).collect())
                .collect(),
        }
    }

    /// Graph in which every listed subset is complete.
    pub fn from_cliques<S: AsRef<str>>(vertices: &[S], cliques: &[Vec<String>]) -> Result<Self> {
        let mut edges = BTreeSet::new();
        for c in cliques {
            for (i, a) in c.iter().enumerate() {
                for b in &c[i + 1..] {
                    let e = if a < b {
                        (a.clone(), b.clone())
                    } else {
                        (b.clone(), a.clone())
                    };
                    edges.insert(e);
                }
            }
        }
        Graph::new(vertices.iter().map(|v| v.as_ref().to_string()), edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Edges as sorted label pairs, in sorted order.
    pub fn edges(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, ns) in self.adj.iter().enumerate() {
            for &j in ns {
                let (a, b) = (&self.vertices[i], &self.vertices[j]);
                if a < b {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out.sort();
        out
    }

    fn index(&self, v: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|x| x == v)
            .ok_or_else(|| Error::SupportMismatch(format!("{v:?} is not a vertex")))
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        match (self.index(a), self.index(b)) {
            (Ok(i), Ok(j)) => self.adj[i].contains(&j),
            _ => false,
        }
    }

    pub fn is_complete_set<S: AsRef<str>>(&self, set: &[S]) -> bool {
        set.iter().enumerate().all(|(i, a)| {
            set[i + 1..]
                .iter()
                .all(|b| self.has_edge(a.as_ref(), b.as_ref()))
        })
    }

    /// Subgraph induced on `keep`.
    pub fn induced<S: AsRef<str>>(&self, keep: &[S]) -> Result<Graph> {
        for k in keep {
            self.index(k.as_ref())?;
        }
        let verts: Vec<String> = self
            .vertices
            .iter()
            .filter(|v| keep.iter().any(|k| k.as_ref() == *v))
            .cloned()
            .collect();
        let edges: Vec<(String, String)> = self
            .edges()
            .into_iter()
            .filter(|(a, b)| verts.contains(a) && verts.contains(b))
            .collect();
        Graph::new(verts, edges)
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertices.len()];
        let mut out = Vec::new();
        for s in 0..self.vertices.len() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        q.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

/// Outcome of maximum cardinality search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mcs {
    /// Vertices in the order they were numbered.
    pub order: Vec<String>,
    /// Reverse of `order`; a perfect elimination ordering iff `is_chordal`.
    pub peo: Vec<String>,
    pub is_chordal: bool,
}

/// Maximum cardinality search with lexicographic tie-breaking, followed by
/// the earlier-neighbors-form-a-clique test.
pub fn mcs(g: &Graph) -> Mcs {
    let n = g.vertices.len();
    let mut weight = vec![0usize; n];
    let mut numbered = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !numbered[v])
            .max_by(|&a, &b| {
                weight[a]
                    .cmp(&weight[b])
                    .then_with(|| g.vertices[b].cmp(&g.vertices[a]))
            })
            .expect("unnumbered vertex");
        numbered[v] = true;
        order.push(v);
        for &w in &g.adj[v] {
            if !numbered[w] {
                weight[w] += 1;
            }
        }
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let is_chordal = order.iter().all(|&v| {
        let earlier: Vec<usize> = g.adj[v]
            .iter()
            .copied()
            .filter(|&w| pos[w] < pos[v])
            .collect();
        earlier
            .iter()
            .enumerate()
            .all(|(i, &a)| earlier[i + 1..].iter().all(|&b| g.adj[a].contains(&b)))
    });
    let order: Vec<String> = order.into_iter().map(|v| g.vertices[v].clone()).collect();
    let peo = order.iter().rev().cloned().collect();
    Mcs {
        order,
        peo,
        is_chordal,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separator {
    pub subset: Vec<String>,
    pub multiplicity: usize,
}

/// Cliques, junction forest and separator multiplicities of a chordal graph.
///
/// Empty intersections between components are not junction-tree edges, so
/// `Σ ν(D) = |cliques| − #components`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChordalStructure {
    pub vertices: Vec<String>,
    pub cliques: Vec<Vec<String>>,
    pub jt_edges: Vec<(usize, usize)>,
    pub separators: Vec<Separator>,
    pub peo: Vec<String>,
}

pub fn chordal_structure(g: &Graph) -> Result<ChordalStructure> {
    let m = mcs(g);
    if !m.is_chordal {
        return Err(Error::NotChordal);
    }
    let pos: BTreeMap<&str, usize> = m
        .peo
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut candidates: Vec<Vec<String>> = Vec::new();
    for (i, v) in m.peo.iter().enumerate() {
        let vi = g.index(v)?;
        let mut c: Vec<String> = g.adj[vi]
            .iter()
            .map(|&w| g.vertices[w].clone())
            .filter(|w| pos[w.as_str()] > i)
            .collect();
        c.push(v.clone());
        candidates.push(sorted(c));
    }
    candidates.sort();
    candidates.dedup();
    let cliques: Vec<Vec<String>> = candidates
        .iter()
        .filter(|c| {
            !candidates
                .iter()
                .any(|d| d.len() > c.len() && c.iter().all(|x| d.contains(x)))
        })
        .cloned()
        .collect();

    let k = cliques.len();
    let mut cand_edges = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let w = cliques[i].iter().filter(|x| cliques[j].contains(x)).count();
            if w > 0 {
                cand_edges.push((w, i, j));
            }
        }
    }
    // Cliques are sorted, so index order is the lexicographic tie-break.
    cand_edges.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut jt_edges = Vec::new();
    for (_, i, j) in cand_edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            jt_edges.push((i, j));
        }
    }
    jt_edges.sort();
    let mut tally: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    for &(i, j) in &jt_edges {
        let s: Vec<String> = cliques[i]
            .iter()
            .filter(|x| cliques[j].contains(x))
            .cloned()
            .collect();
        *tally.entry(s).or_default() += 1;
    }
    let separators = tally
        .into_iter()
        .map(|(subset, multiplicity)| Separator {
            subset,
            multiplicity,
        })
        .collect();
    Ok(ChordalStructure {
        vertices: g.vertices.clone(),
        cliques,
        jt_edges,
        separators,
        peo: m.peo,
    })
}

/// A triple `(A, B, D)` with `A ⊥_G B | D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub d: Vec<String>,
}

impl ChordalStructure {
    fn tree_neighbors(&self, i: usize) -> Vec<usize> {
        self.jt_edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Clique path between `from` and `to` in the junction forest.
    pub fn tree_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.cliques.len()];
        prev[from] = from;
        let mut q = VecDeque::from([from]);
        while let Some(v) = q.pop_front() {
            if v == to {
                let mut path = vec![to];
                let mut c = to;
                while c != from {
                    c = prev[c];
                    path.push(c);
                }
                path.reverse();
                return Some(path);
            }
            for w in self.tree_neighbors(v) {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    q.push_back(w);
                }
            }
        }
        None
    }

    /// Every clique on the path between two cliques contains their intersection.
    pub fn running_intersection_holds(&self) -> bool {
        let k = self.cliques.len();
        (0..k).all(|i| {
            (i + 1..k).all(|j| {
                let inter: Vec<&String> = self.cliques[i]
                    .iter()
                    .filter(|x| self.cliques[j].contains(x))
                    .collect();
                match self.tree_path(i, j) {
                    Some(path) => path
                        .iter()
                        .all(|&c| inter.iter().all(|x| self.cliques[c].contains(x))),
                    None => inter.is_empty(),
                }
            })
        })
    }

    pub fn component_count(&self) -> usize {
        self.cliques.len() - self.jt_edges.len()
    }

    /// Triples visited by recursively splitting the junction forest, first
    /// across components (with empty separator) and then along tree edges.
    pub fn recursive_decompositions(&self) -> Vec<Triple> {
        let mut out = Vec::new();
        self.split(&(0..self.cliques.len()).collect::<Vec<_>>(), &mut out);
        out
    }

    fn vertices_of(&self, cliques: &[usize]) -> BTreeSet<String> {
        cliques
            .iter()
            .flat_map(|&c| self.cliques[c].iter().cloned())
            .collect()
    }

    fn reach(&self, start: usize, within: &[usize], cut: (usize, usize)) -> Vec<usize> {
        let mut seen = vec![start];
        let mut q = VecDeque::from([start]);
        while let Some(v) = q.pop_front() {
            for w in self.tree_neighbors(v) {
                let is_cut = (v, w) == cut || (w, v) == cut;
                if within.contains(&w) && !is_cut && !seen.contains(&w) {
                    seen.push(w);
                    q.push_back(w);
                }
            }
        }
        seen.sort();
        seen
    }

    fn split(&self, cliques: &[usize], out: &mut Vec<Triple>) {
        if cliques.len() < 2 {
            return;
        }
        let first = self.reach(cliques[0], cliques, (usize::MAX, usize::MAX));
        if first.len() < cliques.len() {
            let rest: Vec<usize> = cliques
                .iter()
                .copied()
                .filter(|c| !first.contains(c))
                .collect();
            out.push(Triple {
                a: self.vertices_of(&first).into_iter().collect(),
                b: self.vertices_of(&rest).into_iter().collect(),
                d: Vec::new(),
            });
            self.split(&first, out);
            self.split(&rest, out);
            return;
        }
        let Some(&(i, j)) = self
            .jt_edges
            .iter()
            .find(|(a, b)| cliques.contains(a) && cliques.contains(b))
        else {
            return;
        };
        let left = self.reach(i, cliques, (i, j));
        let right: Vec<usize> = cliques
            .iter()
            .copied()
            .filter(|c| !left.contains(c))
            .collect();
        let sep: BTreeSet<String> = self.cliques[i]
            .iter()
            .filter(|x| self.cliques[j].contains(x))
            .cloned()
            .collect();
        out.push(Triple {
            a: self.vertices_of(&left).difference(&sep).cloned().collect(),
            b: self.vertices_of(&right).difference(&sep).cloned().collect(),
            d: sep.into_iter().collect(),
        });
        self.split(&left, out);
        self.split(&right, out);
    }
}

/// Whether every path from `A` to `B` meets `D`.
pub fn separates<S: AsRef<str>>(g: &Graph, a: &[S], b: &[S], d: &[S]) -> Result<bool> {
    let idx =
        |set: &[S]| -> Result<Vec<usize>> { set.iter().map(|x| g.index(x.as_ref())).collect() };
    let (ia, ib, id) = (idx(a)?, idx(b)?, idx(d)?);
    let overlap =
        ia.iter().any(|x| ib.contains(x) || id.contains(x)) || ib.iter().any(|x| id.contains(x));
    if overlap {
        return Err(Error::SupportMismatch(
            "separation query sets overlap".into(),
        ));
    }
    let mut seen = vec![false; g.vertices.len()];
    for &x in &id {
        seen[x] = true;
    }
    let mut q = VecDeque::new();
    for &x in &ia {
        seen[x] = true;
        q.push_back(x);
    }
    while let Some(v) = q.pop_front() {
        if ib.contains(&v) {
            return Ok(false);
        }
        for &w in &g.adj[v] {
            if !seen[w] {
                seen[w] = true;
                q.push_back(w);
            }
        }
    }
    Ok(true)
}

/// All decompositions `(A, B, D)` of `g`: `V = A ∪ B ∪ D`, `D` complete,
/// `A ⊥_G B | D`, with `A`, `B` nonempty. Each unordered pair `{A, B}` is
/// listed once, with the smallest label of `A ∪ B` placed in `A`.
pub fn decompositions(g: &Graph) -> Vec<Triple> {
    enumerate_triples(g, false)
}

/// All separation statements `A ⊥_G B | D` with `A`, `B` nonempty and
/// disjoint from `D` (not necessarily covering `V`), one orientation each.
pub fn separation_triples(g: &Graph) -> Vec<Triple> {
    enumerate_triples(g, true)
}

fn enumerate_triples(g: &Graph, partial: bool) -> Vec<Triple> {
    let n = g.vertices.len();
    let mut labels: Vec<usize> = (0..n).collect();
    labels.sort_by(|&x, &y| g.vertices[x].cmp(&g.vertices[y]));
    let base: usize = if partial { 4 } else { 3 };
    let total = base.pow(n as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let (mut a, mut b, mut d) = (Vec::new(), Vec::new(), Vec::new());
        for &v in &labels {
            match c % base {
                0 => a.push(g.vertices[v].clone()),
                1 => b.push(g.vertices[v].clone()),
                2 => d.push(g.vertices[v].clone()),
                _ => {}
            }
            c /= base;
        }
        if a.is_empty() || b.is_empty() || a[0] > b[0] {
            continue;
        }
        if !partial && !g.is_complete_set(&d) {
            continue;
        }
        if separates(g, &a, &b, &d).unwrap_or(false) {
            out.push(Triple { a, b, d });
        }
    }
    out
}
