//! Exact search: one Turing kernel `N₂[v]` per vertex, processed in
//! nondecreasing size order with the seed removed from the graph
//! afterwards, and a fix/delete branch-and-reduce inside each kernel.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::clique::clique_max_until;
use crate::compat::KernelState;
use crate::graph::{induce_with, two_hop, Graph, InducedSubgraph, VertexSet};
use crate::model::{Model, ModelSpec};
use crate::oracle::check_solution;
use crate::reductions::{apply_all, RuleFirings};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub vertices: VertexSet,
    pub spec: ModelSpec,
    pub size: usize,
    pub verified: bool,
}

impl Solution {
    pub fn new(vertices: VertexSet, spec: ModelSpec, verified: bool) -> Self {
        Solution {
            size: vertices.len(),
            vertices,
            spec,
            verified,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
}

impl Limits {
    pub fn none() -> Self {
        Limits::default()
    }

    pub fn time(limit: Duration) -> Self {
        Limits {
            time_limit: Some(limit),
            node_limit: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Counters {
    pub kernels_built: u64,
    pub kernels_skipped: u64,
    pub branch_nodes: u64,
    pub flow_calls: u64,
    pub rule_firings: RuleFirings,
    pub initial_bound: usize,
    pub clique_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub best: Option<Solution>,
    pub counters: Counters,
    pub wall_time: Duration,
    pub timed_out: bool,
}

/// A search budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interrupted;

/// `Δ + 1` with the closed neighborhood of a maximum-degree vertex in the
/// plain 2-club case, nothing otherwise.
pub fn initial_lower_bound(g: &Graph, spec: ModelSpec) -> (usize, VertexSet) {
    if !spec.is_base_case() || g.n() == 0 {
        return (0, VertexSet::new());
    }
    let v = (0..g.n()).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))).expect("nonempty");
    if spec.model() != Model::Hereditary && g.degree(v) == 0 {
        return (0, VertexSet::new());
    }
    let witness: VertexSet = std::iter::once(v).chain(g.neighbors(v).iter().copied()).collect();
    (witness.len(), witness)
}

/// Maximum solution of `g` for `spec`.
pub fn solve(g: &Graph, spec: ModelSpec, limits: &Limits) -> SolveReport {
    let start = Instant::now();
    let mut search = Search::new(spec, limits, start);
    let (lb, witness) = initial_lower_bound(g, spec);
    search.counters.initial_bound = lb;
    if lb > 0 {
        search.best = lb;
        search.best_set = Some(witness);
    }
    let timed_out = search.kernel_loop(g).is_err();

    if spec.model() == Model::Hereditary && search.best <= spec.t() as usize + 1 {
        search.counters.clique_fallback = true;
        match clique_max_until(g, search.deadline) {
            Ok(c) if c.len() > search.best => {
                search.best = c.len();
                search.best_set = Some(c);
            }
            Ok(_) => {}
            Err(_) => search.interrupted = true,
        }
    }

    let best = search.best_set.take().map(|s| {
        let verified = check_solution(g, &s, spec).unwrap_or(false);
        debug_assert!(verified, "solver produced an invalid set");
        Solution::new(s, spec, verified)
    });
    SolveReport {
        best,
        counters: search.counters,
        wall_time: start.elapsed(),
        timed_out: timed_out || search.interrupted,
    }
}

/// Best solution inside a reduced kernel state that is larger than
/// `best_size` and consistent with the marks, in parent identifiers of the
/// state's subgraph.
pub fn branch(
    state: &mut KernelState,
    best_size: usize,
    limits: &Limits,
) -> Result<Option<Solution>, Interrupted> {
    let spec = state.spec();
    let mut search = Search::new(spec, limits, Instant::now());
    search.best = best_size;
    search.branch(state)?;
    Ok(search.best_set.map(|s| Solution::new(s, spec, false)))
}

struct Search {
    spec: ModelSpec,
    deadline: Option<Instant>,
    node_limit: Option<u64>,
    best: usize,
    best_set: Option<VertexSet>,
    counters: Counters,
    interrupted: bool,
}

impl Search {
    fn new(spec: ModelSpec, limits: &Limits, start: Instant) -> Self {
        Search {
            spec,
            deadline: limits.time_limit.map(|d| start + d),
            node_limit: limits.node_limit,
            best: 0,
            best_set: None,
            counters: Counters::default(),
            interrupted: false,
        }
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
            || self.node_limit.is_some_and(|l| self.counters.branch_nodes >= l)
    }

    fn kernel_loop(&mut self, g: &Graph) -> Result<(), Interrupted> {
        let n = g.n();
        let mut alive = vec![true; n];
        let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
        let mut seen = vec![false; n];
        let mut scratch = vec![usize::MAX; n];

        let mut order: Vec<(usize, usize)> = (0..n)
            .map(|v| (two_hop(g, v, |_| true, &mut seen).len(), v))
            .collect();
        order.sort_unstable();
        peel(g, &mut alive, &mut degree, 0..n, self.spec.min_degree(), self.best, None);

        for (_, v) in order {
            if self.expired() {
                return Err(Interrupted);
            }
            if !alive[v] {
                continue;
            }
            let kernel = two_hop(g, v, |w| alive[w], &mut seen);
            if kernel.len() > self.best {
                let sub = induce_with(g, kernel.as_slice(), &mut scratch);
                let seed = kernel.as_slice().binary_search(&v).expect("seed in kernel");
                self.solve_kernel(sub, seed)?;
            } else {
                self.counters.kernels_skipped += 1;
            }
            alive[v] = false;
            for &w in g.neighbors(v) {
                if alive[w] {
                    degree[w] -= 1;
                }
            }
            peel(g, &mut alive, &mut degree, g.neighbors(v).iter().copied(), self.spec.min_degree(), self.best, None);
        }
        Ok(())
    }

    fn solve_kernel(&mut self, mut sub: InducedSubgraph, mut seed: usize) -> Result<(), Interrupted> {
        // degree peeling and re-restriction to N₂[seed] need no compatibility data
        loop {
            let k = sub.graph.n();
            let mut alive = vec![true; k];
            let mut degree: Vec<usize> = (0..k).map(|v| sub.graph.degree(v)).collect();
            if !peel(&sub.graph, &mut alive, &mut degree, 0..k, self.spec.min_degree(), self.best, Some(seed)) {
                self.counters.kernels_skipped += 1;
                return Ok(());
            }
            let mut seen = vec![false; k];
            let keep = two_hop(&sub.graph, seed, |w| alive[w], &mut seen);
            if keep.len() <= self.best {
                self.counters.kernels_skipped += 1;
                return Ok(());
            }
            if keep.len() == k {
                break;
            }
            let mut scratch = vec![usize::MAX; k];
            let inner = induce_with(&sub.graph, keep.as_slice(), &mut scratch);
            seed = keep.as_slice().binary_search(&seed).expect("seed kept");
            sub = InducedSubgraph {
                to_parent: inner.to_parent.iter().map(|&i| sub.to_parent[i]).collect(),
                graph: inner.graph,
            };
        }

        self.counters.kernels_built += 1;
        let mut state = KernelState::new(sub, self.spec, Some(seed));
        let out = apply_all(&mut state, self.best, false);
        self.counters.rule_firings += out.firings;
        let result = if out.is_prune() { Ok(()) } else { self.branch(&mut state) };
        self.counters.flow_calls += state.flow_calls();
        result
    }

    fn branch(&mut self, state: &mut KernelState) -> Result<(), Interrupted> {
        self.counters.branch_nodes += 1;
        if self.expired() {
            return Err(Interrupted);
        }
        if state.alive_count() <= self.best {
            return Ok(());
        }
        let Some((a, b)) = state.find_incompatible_pair() else {
            if state.alive_count() >= self.spec.min_size() {
                self.best = state.alive_count();
                self.best_set = Some(state.alive_in_parent());
            }
            return Ok(());
        };
        let u = match (state.is_marked(a), state.is_marked(b)) {
            (false, _) => a,
            (true, false) => b,
            (true, true) => return Ok(()),
        };

        let cp = state.checkpoint();
        state.delete_vertex(u).expect("alive and unmarked");
        self.reduce_and_branch(state)?;
        state.undo_to(cp).expect("own checkpoint");

        state.mark(u).expect("alive");
        self.reduce_and_branch(state)?;
        state.undo_to(cp).expect("own checkpoint");
        Ok(())
    }

    fn reduce_and_branch(&mut self, state: &mut KernelState) -> Result<(), Interrupted> {
        if state.alive_count() <= self.best {
            return Ok(());
        }
        let out = apply_all(state, self.best, true);
        self.counters.rule_firings += out.firings;
        if out.is_prune() {
            return Ok(());
        }
        self.branch(state)
    }
}

/// Deletes vertices of degree below `min_degree`, and degree-one vertices
/// whose neighbor has degree below `best`, until none is left; `alive` and
/// `degree` describe the current subgraph and `start` lists the vertices
/// to inspect first. Returns false iff `protect` was deleted.
fn peel(
    g: &Graph,
    alive: &mut [bool],
    degree: &mut [usize],
    start: impl IntoIterator<Item = usize>,
    min_degree: usize,
    best: usize,
    protect: Option<usize>,
) -> bool {
    let doomed = |alive: &[bool], degree: &[usize], v: usize| -> bool {
        if !alive[v] {
            return false;
        }
        let d = degree[v];
        d < min_degree
            || (d == 1 && g.neighbors(v).iter().any(|&w| alive[w] && degree[w] < best))
    };
    let mut queue: Vec<usize> = start.into_iter().collect();
    while let Some(v) = queue.pop() {
        if !doomed(alive, degree, v) {
            continue;
        }
        if protect == Some(v) {
            return false;
        }
        alive[v] = false;
        for &w in g.neighbors(v) {
            if alive[w] {
                degree[w] -= 1;
                queue.push(w);
                if degree[w] < best {
                    queue.extend(g.neighbors(w).iter().copied().filter(|&x| alive[x] && degree[x] == 1));
                }
            }
        }
    }
    true
}
