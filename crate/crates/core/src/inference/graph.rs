//! Moralization, min-fill triangulation and junction-tree construction.

use std::collections::BTreeSet;

use crate::terms::Name;

/// Undirected graph over named vertices `0..names.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    pub names: Vec<Name>,
    pub adj: Vec<BTreeSet<usize>>,
}

impl UndirectedGraph {
    pub fn new(names: Vec<Name>) -> Self {
        let adj = vec![BTreeSet::new(); names.len()];
        UndirectedGraph { names, adj }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }
}

/// Moral graph: skeleton of the DAG plus edges between co-parents.
/// `parents[i]` lists the parent indices of vertex `i`.
pub fn moralize(names: Vec<Name>, parents: &[Vec<usize>]) -> UndirectedGraph {
    let mut g = UndirectedGraph::new(names);
    for (child, ps) in parents.iter().enumerate() {
        for (k, &p) in ps.iter().enumerate() {
            g.add_edge(child, p);
            for &q in &ps[k + 1..] {
                g.add_edge(p, q);
            }
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    /// Elimination order.
    pub order: Vec<usize>,
    /// Edges added during elimination, each as `(min, max)`.
    pub fill_in: Vec<(usize, usize)>,
    /// Maximal cliques of the triangulated graph, in discovery order.
    pub cliques: Vec<BTreeSet<usize>>,
}

fn fill_count(g: &UndirectedGraph, alive: &[bool], v: usize) -> usize {
    let nbrs: Vec<usize> = g.adj[v].iter().copied().filter(|&u| alive[u]).collect();
    let mut missing = 0;
    for (k, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[k + 1..] {
            if !g.has_edge(a, b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Greedy min-fill elimination; ties go to the lexicographically smallest name.
pub fn triangulate(graph: &UndirectedGraph) -> Triangulation {
    let mut g = graph.clone();
    let n = g.names.len();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut fill_in = Vec::new();
    let mut cliques: Vec<BTreeSet<usize>> = Vec::new();
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by(|&a, &b| fill_count(&g, &alive, a).cmp(&fill_count(&g, &alive, b)).then(g.names[a].cmp(&g.names[b])))
            .expect("a live vertex remains");
        let nbrs: Vec<usize> = g.adj[v].iter().copied().filter(|&u| alive[u]).collect();
        for (k, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[k + 1..] {
                if !g.has_edge(a, b) {
                    g.add_edge(a, b);
                    fill_in.push((a.min(b), a.max(b)));
                }
            }
        }
        let mut clique: BTreeSet<usize> = nbrs.into_iter().collect();
        clique.insert(v);
        // A later clique never contains an already eliminated vertex, so only
        // earlier cliques can subsume this one.
        if !cliques.iter().any(|c| clique.is_subset(c)) {
            cliques.push(clique);
        }
        alive[v] = false;
        order.push(v);
    }
    Triangulation { order, fill_in, cliques }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JunctionTree {
    pub cliques: Vec<BTreeSet<usize>>,
    /// Tree edges `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
}

impl JunctionTree {
    pub fn separator(&self, i: usize, j: usize) -> BTreeSet<usize> {
        self.cliques[i].intersection(&self.cliques[j]).copied().collect()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .collect()
    }

    /// Running-intersection property: for every pair of cliques, their
    /// intersection is contained in every clique on the path between them.
    pub fn has_running_intersection(&self) -> bool {
        let n = self.cliques.len();
        for a in 0..n {
            for b in a + 1..n {
                let shared: BTreeSet<usize> = self.cliques[a].intersection(&self.cliques[b]).copied().collect();
                let Some(path) = self.path(a, b) else { return false };
                if path.iter().any(|&c| !shared.is_subset(&self.cliques[c])) {
                    return false;
                }
            }
        }
        true
    }

    fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.cliques.len()];
        let mut stack = vec![from];
        prev[from] = from;
        while let Some(u) = stack.pop() {
            if u == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                return Some(path);
            }
            for w in self.neighbors(u) {
                if prev[w] == usize::MAX {
                    prev[w] = u;
                    stack.push(w);
                }
            }
        }
        None
    }
}

/// Maximum-weight spanning tree over separator sizes (Kruskal; ties broken by
/// clique indices). Disconnected components are joined by empty separators.
pub fn build_junction_tree(cliques: Vec<BTreeSet<usize>>) -> JunctionTree {
    let n = cliques.len();
    let mut candidates = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = cliques[i].intersection(&cliques[j]).count();
            candidates.push((w, i, j));
        }
    }
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while root[r] != r {
            r = root[r];
        }
        let mut cur = x;
        while root[cur] != r {
            let next = root[cur];
            root[cur] = r;
            cur = next;
        }
        r
    }
    let mut edges = Vec::new();
    for (_, i, j) in candidates {
        let (ri, rj) = (find(&mut root, i), find(&mut root, j));
        if ri != rj {
            root[ri] = rj;
            edges.push((i, j));
        }
    }
    edges.sort();
    JunctionTree { cliques, edges }
}
