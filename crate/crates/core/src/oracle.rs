//! Reference checks that follow the definitions literally.
//!
//! Nothing here touches the incremental kernel machinery: predicates are
//! evaluated on bitmask copies of the induced subgraph, t-connectivity is
//! checked by deleting every small vertex set, and the maximum is found by
//! enumerating subsets.

use thiserror::Error;

use crate::compat::KernelState;
use crate::flow;
use crate::graph::{induced_subgraph, Graph, GraphError, VertexSet};
use crate::model::{Model, ModelSpec};
use crate::solver::Solution;

/// Largest graph [`brute_force_max`] accepts.
pub const BRUTE_FORCE_MAX_N: usize = 16;

/// Hereditary sets up to this size are re-checked by deleting every set of
/// at most `t` vertices.
const HEREDITARY_LITERAL_MAX: usize = 12;

/// Budget of deletion sets for the literal t-connectivity check.
const CONNECTED_LITERAL_BUDGET: u64 = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute force is limited to {BRUTE_FORCE_MAX_N} vertices, got {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Whether `s` is a solution for `spec` in `g`.
///
/// Robust and connected sets need more than `t` vertices; any nonempty
/// clique is hereditary for every `t`.
pub fn check_solution(g: &Graph, s: &VertexSet, spec: ModelSpec) -> Result<bool, GraphError> {
    let sub = induced_subgraph(g, s)?;
    if s.len() <= 64 {
        let adj = masks(&sub.graph);
        let full = if s.len() == 64 { u64::MAX } else { (1u64 << s.len()) - 1 };
        return Ok(check_mask(&adj, full, spec));
    }
    Ok(check_large(&sub.graph, spec))
}

fn masks(g: &Graph) -> Vec<u64> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect()
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Checks the vertex set `mask` of a graph given by adjacency masks.
fn check_mask(adj: &[u64], mask: u64, spec: ModelSpec) -> bool {
    let size = mask.count_ones() as usize;
    let t = spec.t() as usize;
    if size == 0 || size < spec.min_size() {
        return false;
    }
    for i in bits(mask) {
        for j in bits(mask & !((2u64 << i) - 1)) {
            let adjacent = adj[i] >> j & 1 == 1;
            let cn = (adj[i] & adj[j] & mask).count_ones() as usize;
            let ok = match spec.model() {
                Model::Robust => usize::from(adjacent) + cn >= t,
                Model::Hereditary => adjacent || cn > t,
                Model::Connected => adjacent || cn >= 1,
            };
            if !ok {
                return false;
            }
        }
    }
    match spec.model() {
        Model::Robust => true,
        Model::Hereditary => size > HEREDITARY_LITERAL_MAX || hereditary_literal(adj, mask, t),
        Model::Connected => connected_literal(adj, mask, t).unwrap_or_else(|| {
            let members: Vec<usize> = bits(mask).collect();
            pairwise_paths(adj, &members, t)
        }),
    }
}

fn subsets_up_to(n: usize, k: usize) -> u64 {
    let mut total = 0u64;
    let mut c = 1u64;
    for i in 0..=k.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    total
}

/// Calls `f` on every subset of `mask` with at most `k` elements.
fn for_each_subset_up_to(mask: u64, k: usize, f: &mut dyn FnMut(u64) -> bool) -> bool {
    fn go(rest: u64, chosen: u64, k: usize, f: &mut dyn FnMut(u64) -> bool) -> bool {
        if !f(chosen) {
            return false;
        }
        if k == 0 {
            return true;
        }
        let mut r = rest;
        while r != 0 {
            let low = r & r.wrapping_neg();
            r &= !low;
            if !go(r, chosen | low, k - 1, f) {
                return false;
            }
        }
        true
    }
    go(mask, 0, k, f)
}

fn is_two_club(adj: &[u64], mask: u64) -> bool {
    bits(mask).all(|i| {
        bits(mask & !((2u64 << i) - 1)).all(|j| adj[i] >> j & 1 == 1 || adj[i] & adj[j] & mask != 0)
    })
}

fn is_connected(adj: &[u64], mask: u64) -> bool {
    if mask == 0 {
        return true;
    }
    let mut seen = mask & mask.wrapping_neg();
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        for v in bits(frontier) {
            next |= adj[v] & mask;
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == mask
}

/// Every deletion of at most `t` vertices leaves a 2-club.
fn hereditary_literal(adj: &[u64], mask: u64, t: usize) -> bool {
    let size = mask.count_ones() as usize;
    for_each_subset_up_to(mask, t.min(size), &mut |u| is_two_club(adj, mask & !u))
}

/// 2-club, more than `t` vertices, and connected after deleting any fewer
/// than `t`. `None` when there are too many deletion sets to try.
fn connected_literal(adj: &[u64], mask: u64, t: usize) -> Option<bool> {
    let size = mask.count_ones() as usize;
    if size <= t || !is_two_club(adj, mask) {
        return Some(false);
    }
    if subsets_up_to(size, t - 1) > CONNECTED_LITERAL_BUDGET {
        return None;
    }
    Some(for_each_subset_up_to(mask, t - 1, &mut |u| is_connected(adj, mask & !u)))
}

fn pairwise_paths(adj: &[u64], members: &[usize], t: usize) -> bool {
    let mut edges = Vec::new();
    for (a, &i) in members.iter().enumerate() {
        for (b, &j) in members.iter().enumerate().skip(a + 1) {
            if adj[i] >> j & 1 == 1 {
                edges.push((a, b));
            }
        }
    }
    let g = Graph::from_edge_list(members.len(), &edges);
    check_large(&g, ModelSpec::connected(t as u32))
}

/// Pairwise check on an explicit graph, for sets beyond bitmask size.
fn check_large(g: &Graph, spec: ModelSpec) -> bool {
    let n = g.n();
    let t = spec.t() as usize;
    if n == 0 || n < spec.min_size() {
        return false;
    }
    for u in 0..n {
        for v in u + 1..n {
            let adjacent = g.has_edge(u, v);
            let cn = g.common_neighbor_count(u, v);
            let ok = match spec.model() {
                Model::Robust => usize::from(adjacent) + cn >= t,
                Model::Hereditary => adjacent || cn > t,
                Model::Connected => (adjacent || cn >= 1) && flow::disjoint_paths(g, u, v, t) >= t,
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Maximum solution by enumerating vertex sets from the largest size down;
/// the lexicographically smallest set of the maximum size is returned.
pub fn brute_force_max(g: &Graph, spec: ModelSpec) -> Result<Option<Solution>, OracleError> {
    let n = g.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(OracleError::TooLarge(n));
    }
    let adj = masks(g);
    Ok(max_subset(&adj, (1u64 << n) - 1, 0, spec, 1).map(|mask| {
        let vertices: VertexSet = bits(mask).collect();
        Solution::new(vertices, spec, true)
    }))
}

/// Largest `S` with `required ⊆ S ⊆ allowed` and `|S| >= min_size` that is
/// a solution; lexicographically first among ties.
fn max_subset(adj: &[u64], allowed: u64, required: u64, spec: ModelSpec, min_size: usize) -> Option<u64> {
    let free: Vec<usize> = bits(allowed & !required).collect();
    let base = required.count_ones() as usize;
    for extra in (0..=free.len()).rev() {
        let size = base + extra;
        if size == 0 || size < min_size {
            break;
        }
        let mut found = None;
        combinations(free.len(), extra, &mut |idx| {
            let m = idx.iter().fold(required, |m, &i| m | 1 << free[i]);
            if check_mask(adj, m, spec) {
                found = Some(m);
                false
            } else {
                true
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Visits `k`-combinations of `0..n` in lexicographic order until `f`
/// returns false.
fn combinations(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        if !f(&idx) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        if idx[i] >= n - k + i {
            return;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Size of the largest solution inside the alive set of `state` that
/// contains every marked vertex and has at least `min_size` vertices.
/// Requires `state.size() <= 16`.
pub fn consistent_optimum(state: &KernelState, min_size: usize) -> Option<usize> {
    assert!(state.size() <= BRUTE_FORCE_MAX_N);
    let adj = masks(state.graph());
    let allowed = state.alive().fold(0u64, |m, v| m | 1 << v);
    let required = state.marked().fold(0u64, |m, v| m | 1 << v);
    if required & !allowed != 0 {
        return None;
    }
    max_subset(&adj, allowed, required, state.spec(), min_size).map(|m| m.count_ones() as usize)
}

/// Literal deletion-based hereditary check, exposed for cross-checking
/// the common-neighbor characterization. Requires `s.len() <= 64`.
pub fn hereditary_by_deletion(g: &Graph, s: &VertexSet, t: u32) -> Result<bool, GraphError> {
    let sub = induced_subgraph(g, s)?;
    assert!(s.len() <= 64);
    if s.is_empty() {
        return Ok(false);
    }
    let adj = masks(&sub.graph);
    let full = if s.len() == 64 { u64::MAX } else { (1u64 << s.len()) - 1 };
    Ok(hereditary_literal(&adj, full, t as usize))
}

/// Common-neighbor characterization of hereditary 2-clubs: every
/// nonadjacent pair has more than `t` common neighbors inside `s`.
pub fn hereditary_by_common_neighbors(g: &Graph, s: &VertexSet, t: u32) -> Result<bool, GraphError> {
    let sub = induced_subgraph(g, s)?;
    if s.is_empty() {
        return Ok(false);
    }
    let h = &sub.graph;
    Ok((0..h.n()).all(|u| {
        (u + 1..h.n()).all(|v| h.has_edge(u, v) || h.common_neighbor_count(u, v) > t as usize)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use rand::{RngExt, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn all(g: &Graph) -> VertexSet {
        (0..g.n()).collect()
    }

    #[test]
    fn check_examples() {
        let k33 = complete_bipartite(3, 3);
        assert!(check_solution(&k33, &all(&k33), ModelSpec::connected(3)).unwrap());
        assert!(!check_solution(&k33, &all(&k33), ModelSpec::connected(4)).unwrap());
        let hr = hub_and_ring(3);
        assert!(!check_solution(&hr, &all(&hr), ModelSpec::hereditary(1)).unwrap());
        assert!(check_solution(&complete(3), &all(&complete(3)), ModelSpec::hereditary(1000)).unwrap());
        assert!(!check_solution(&complete(3), &VertexSet::new(), ModelSpec::hereditary(0)).unwrap());
        assert!(check_solution(&k33, &VertexSet::from_unsorted(vec![9]), ModelSpec::robust(1)).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let sol = brute_force_max(&cycle(5), ModelSpec::connected(2)).unwrap().unwrap();
        assert_eq!(sol.size, 5);
        assert!(brute_force_max(&cycle(4), ModelSpec::robust(2)).unwrap().is_none());
        let star = brute_force_max(&star(4), ModelSpec::hereditary(1)).unwrap().unwrap();
        assert_eq!(star.vertices.as_slice(), &[0, 1]);
        assert!(brute_force_max(&Graph::empty(17), ModelSpec::robust(1)).is_err());
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        combinations(4, 2, &mut |c| {
            seen.push(c.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut count = 0;
        combinations(3, 0, &mut |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn common_neighbor_characterization_agrees_with_deletion() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(17);
        for _ in 0..60 {
            let n = rng.random_range(1..=8);
            let g = crate::generator::gnp(n, rng.random_range(0.2..0.95), &mut rng);
            for mask in 1u32..1 << n {
                let s: VertexSet = (0..n).filter(|v| mask >> v & 1 == 1).collect();
                for t in 0..=3 {
                    assert_eq!(
                        hereditary_by_deletion(&g, &s, t).unwrap(),
                        hereditary_by_common_neighbors(&g, &s, t).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn literal_connectivity_agrees_with_flow() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(23);
        for _ in 0..150 {
            let n = rng.random_range(2..=9);
            let g = crate::generator::gnp(n, rng.random_range(0.3..0.95), &mut rng);
            let adj = masks(&g);
            for t in 1..=4 {
                let literal = connected_literal(&adj, (1 << n) - 1, t).unwrap();
                assert_eq!(literal, check_large(&g, ModelSpec::connected(t as u32)));
            }
        }
    }
}
