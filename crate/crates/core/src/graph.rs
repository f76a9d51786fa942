//! Simple undirected graphs with sorted adjacency lists.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
}

/// Counts of input irregularities dropped while normalizing an edge multiset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NormalizeStats {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

/// Immutable simple undirected graph on vertices `0..n`.
///
/// Adjacency lists are strictly ascending and symmetric; there are no loops.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// An edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a graph from an edge multiset, silently dropping loops and
    /// repeated edges. Both `{u,v}` and `{v,u}` denote the same edge.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<(Self, NormalizeStats), GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut stats = NormalizeStats::default();
        let mut raw = 0usize;
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            raw += 1;
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut twice_m = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            twice_m += list.len();
        }
        let m = twice_m / 2;
        stats.duplicate_edges = raw - m;
        Ok((Graph { adj, m }, stats))
    }

    /// Like [`Graph::from_edges`] but panics on out-of-range endpoints.
    /// Intended for fixtures and tests.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Self {
        Self::from_edges(n, edges.iter().copied())
            .expect("edge endpoint out of range")
            .0
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of vertices with at least one neighbor.
    pub fn non_isolated_count(&self) -> usize {
        self.adj.iter().filter(|a| !a.is_empty()).count()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Number of common neighbors of `u` and `v`.
    pub fn common_neighbor_count(&self, u: usize, v: usize) -> usize {
        let (a, b) = (&self.adj[u], &self.adj[v]);
        let (mut i, mut j, mut c) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    c += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        c
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }
}

/// Strictly ascending list of vertex identifiers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        VertexSet(vertices)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::from_unsorted(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A subgraph induced by a vertex set, re-indexed to `0..|s|` in parent order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub graph: Graph,
    pub to_parent: Vec<usize>,
}

impl InducedSubgraph {
    /// Maps local vertices to parent identifiers.
    pub fn lift<I: IntoIterator<Item = usize>>(&self, local: I) -> VertexSet {
        local.into_iter().map(|v| self.to_parent[v]).collect()
    }
}

/// `N₂[v]`: every vertex within distance two of `v`, including `v`.
pub fn closed_two_neighborhood(g: &Graph, v: usize) -> VertexSet {
    let mut seen = vec![false; g.n()];
    two_hop(g, v, |_| true, &mut seen)
}

/// `N₂[v]` in the subgraph induced by the vertices accepted by `alive`.
/// `seen` must be all-false and of length `n`; it is reset before returning.
pub(crate) fn two_hop<F: Fn(usize) -> bool>(
    g: &Graph,
    v: usize,
    alive: F,
    seen: &mut [bool],
) -> VertexSet {
    let mut out = vec![v];
    seen[v] = true;
    for &w in g.neighbors(v) {
        if alive(w) && !seen[w] {
            seen[w] = true;
            out.push(w);
        }
    }
    let first_ring = out.len();
    for i in 1..first_ring {
        let w = out[i];
        for &x in g.neighbors(w) {
            if alive(x) && !seen[x] {
                seen[x] = true;
                out.push(x);
            }
        }
    }
    for &x in &out {
        seen[x] = false;
    }
    VertexSet::from_unsorted(out)
}

/// Connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<VertexSet> {
    let mut comp = vec![usize::MAX; g.n()];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..g.n() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        queue.push_back(s);
        let mut members = Vec::new();
        while let Some(u) = queue.pop_front() {
            members.push(u);
            for &w in g.neighbors(u) {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    queue.push_back(w);
                }
            }
        }
        out.push(VertexSet::from_unsorted(members));
    }
    out
}

/// Subgraph induced by `s`; local ids follow the ascending order of `s`.
pub fn induced_subgraph(g: &Graph, s: &VertexSet) -> Result<InducedSubgraph, GraphError> {
    for v in s.iter() {
        g.check(v)?;
    }
    let mut local = vec![usize::MAX; g.n()];
    Ok(induce_with(g, s.as_slice(), &mut local))
}

/// Induces on `members` (ascending, in range) using a caller-owned scratch
/// map of length `n` filled with `usize::MAX`; the map is restored on return.
pub(crate) fn induce_with(g: &Graph, members: &[usize], local: &mut [usize]) -> InducedSubgraph {
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    let mut adj = Vec::with_capacity(members.len());
    let mut twice_m = 0;
    for &v in members {
        // parent lists are ascending and `local` is monotone, so this stays sorted
        let list: Vec<usize> = g
            .neighbors(v)
            .iter()
            .filter_map(|&w| (local[w] != usize::MAX).then_some(local[w]))
            .collect();
        twice_m += list.len();
        adj.push(list);
    }
    for &v in members {
        local[v] = usize::MAX;
    }
    InducedSubgraph {
        graph: Graph {
            adj,
            m: twice_m / 2,
        },
        to_parent: members.to_vec(),
    }
}

/// Small named graphs used by tests, fixtures and the CLI.
pub mod families {
    use super::Graph;

    pub fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Graph::from_edge_list(n, &e)
    }

    /// `K_{a,b}`; the first side is `0..a`.
    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..a {
            for v in a..a + b {
                e.push((u, v));
            }
        }
        Graph::from_edge_list(a + b, &e)
    }

    pub fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edge_list(n, &e)
    }

    pub fn cycle(n: usize) -> Graph {
        let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            e.push((n - 1, 0));
        }
        Graph::from_edge_list(n, &e)
    }

    /// `K_{1,leaves}` with center 0.
    pub fn star(leaves: usize) -> Graph {
        complete_bipartite(1, leaves)
    }

    /// Two hubs (0 and 1) joined to `bottom` further vertices, hubs
    /// nonadjacent. With `bottom = 3` this is the standard example where
    /// the hubs are 3-robust compatible but no 3-robust 2-club exists.
    pub fn two_hub(bottom: usize) -> Graph {
        let mut e = Vec::new();
        for b in 0..bottom {
            e.push((0, 2 + b));
            e.push((1, 2 + b));
        }
        Graph::from_edge_list(bottom + 2, &e)
    }

    /// Hub 0 adjacent to everything, plus six groups of `t` vertices
    /// arranged in a cycle with consecutive groups completely joined.
    /// It is a t-connected 2-club, but removing the hub leaves diameter 3.
    pub fn hub_and_ring(t: usize) -> Graph {
        let group = |g: usize| (0..t).map(move |i| 1 + (g % 6) * t + i);
        let mut e = Vec::new();
        for g in 0..6 {
            for a in group(g) {
                e.push((0, a));
                for b in group(g + 1) {
                    e.push((a, b));
                }
            }
        }
        Graph::from_edge_list(6 * t + 1, &e)
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;
    use proptest::prelude::*;

    fn bfs_within(g: &Graph, v: usize, depth: usize) -> VertexSet {
        let mut dist = vec![usize::MAX; g.n()];
        dist[v] = 0;
        let mut q = VecDeque::from([v]);
        while let Some(u) = q.pop_front() {
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        (0..g.n()).filter(|&u| dist[u] <= depth).collect()
    }

    #[test]
    fn from_edges_normalizes() {
        let (g, stats) = Graph::from_edges(2, [(0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(stats.duplicate_edges, 1);
        assert_eq!(stats.self_loops, 1);
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn two_neighborhood_examples() {
        assert_eq!(closed_two_neighborhood(&star(4), 1).len(), 5);
        assert_eq!(
            closed_two_neighborhood(&path(5), 0).as_slice(),
            &[0, 1, 2]
        );
        let c6 = cycle(6);
        for v in 0..6 {
            let n2 = closed_two_neighborhood(&c6, v);
            assert_eq!(n2, bfs_within(&c6, v, 2));
            assert_eq!(n2.len(), 5);
            assert!(!n2.contains((v + 3) % 6));
        }
    }

    #[test]
    fn two_neighborhood_can_reach_moore_bound() {
        // Δ = 2 here, yet N₂[v] has Δ² + 1 = 5 vertices
        assert_eq!(closed_two_neighborhood(&cycle(5), 0).len(), 5);
        assert_eq!(closed_two_neighborhood(&path(5), 2).len(), 5);
    }

    #[test]
    fn components_examples() {
        let sizes = |g: &Graph| {
            let mut s: Vec<_> = connected_components(g).iter().map(VertexSet::len).collect();
            s.sort();
            s
        };
        assert_eq!(sizes(&Graph::empty(3)), vec![1, 1, 1]);
        assert_eq!(sizes(&complete(3)), vec![3]);
        let g = Graph::from_edge_list(5, &[(0, 1), (1, 2), (0, 2), (3, 4)]);
        assert_eq!(sizes(&g), vec![2, 3]);
    }

    #[test]
    fn induced_examples() {
        let s = |v: &[usize]| VertexSet::from_unsorted(v.to_vec());
        let k3 = induced_subgraph(&complete(4), &s(&[0, 2, 3])).unwrap();
        assert_eq!(k3.graph, complete(3));
        assert_eq!(k3.to_parent, vec![0, 2, 3]);
        let p3 = induced_subgraph(&cycle(5), &s(&[1, 2, 3])).unwrap();
        assert_eq!(p3.graph, path(3));
        let side = induced_subgraph(&complete_bipartite(3, 3), &s(&[0, 1, 2])).unwrap();
        assert_eq!(side.graph, Graph::empty(3));
        assert!(induced_subgraph(&path(3), &s(&[0, 5])).is_err());
    }

    #[test]
    fn fixture_shapes() {
        let g = hub_and_ring(3);
        assert_eq!(g.n(), 19);
        assert_eq!(g.degree(0), 18);
        // each ring vertex: hub + two neighboring groups
        assert!((1..19).all(|v| g.degree(v) == 1 + 2 * 3));
        let f2 = two_hub(3);
        assert_eq!(f2.m(), 6);
        assert!(!f2.has_edge(0, 1));
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..=n * n)
                .prop_map(move |e| Graph::from_edges(n, e).unwrap().0)
        })
    }

    proptest! {
        #[test]
        fn graph_invariants(g in arb_graph(12)) {
            let mut sum = 0;
            for v in 0..g.n() {
                let a = g.neighbors(v);
                prop_assert!(a.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(!a.contains(&v));
                for &w in a {
                    prop_assert!(g.neighbors(w).contains(&v));
                }
                sum += a.len();
            }
            prop_assert_eq!(sum, 2 * g.m());
        }

        #[test]
        fn two_neighborhood_matches_bfs_and_bound(g in arb_graph(12)) {
            let delta = g.max_degree();
            for v in 0..g.n() {
                let n2 = closed_two_neighborhood(&g, v);
                prop_assert_eq!(&n2, &bfs_within(&g, v, 2));
                prop_assert!(n2.len() <= g.n().min(delta * delta + 1));
            }
        }

        #[test]
        fn induced_preserves_adjacency(g in arb_graph(10), mask in any::<u16>()) {
            let s: VertexSet = (0..g.n()).filter(|v| mask >> v & 1 == 1).collect();
            let sub = induced_subgraph(&g, &s).unwrap();
            prop_assert_eq!(sub.graph.n(), s.len());
            for a in 0..s.len() {
                for b in 0..s.len() {
                    if a != b {
                        prop_assert_eq!(
                            sub.graph.has_edge(a, b),
                            g.has_edge(sub.to_parent[a], sub.to_parent[b])
                        );
                    }
                }
            }
        }
    }
}
