//! Per-kernel search state: compatibility bookkeeping with an undo log.
//!
//! Two alive vertices are *compatible* when they could both belong to a
//! solution as far as the alive subgraph can tell:
//!
//! * robust: adjacent with at least `t - 1` common neighbors, or at least `t`
//!   common neighbors;
//! * hereditary: adjacent, or at least `t + 1` common neighbors;
//! * connected: at distance at most two and joined by `t` internally
//!   vertex-disjoint paths of any length.
//!
//! An alive set is a solution exactly when it has no incompatible pair.
//! Deleting a vertex can only turn compatible pairs incompatible, never the
//! other way around, which is what makes the incremental updates cheap.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::flow;
use crate::graph::{induced_subgraph, Graph, InducedSubgraph, VertexSet};
use crate::model::{Model, ModelSpec};

static NEXT_STATE_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("vertex {0} is not alive")]
    Dead(usize),
    #[error("vertex {0} is marked and cannot be deleted")]
    DeleteMarked(usize),
    #[error("vertex {0} is out of range")]
    OutOfRange(usize),
    #[error("checkpoint belongs to a different kernel state")]
    ForeignCheckpoint,
    #[error("checkpoint was already undone past")]
    StaleCheckpoint,
    #[error("a vertex cannot be compared with itself")]
    SamePair,
}

/// Position in a [`KernelState`]'s undo log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint {
    owner: u64,
    len: usize,
    serial: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Entry {
    Killed(u32),
    Marked(u32),
    Incompatible(u32, u32),
    Conflict,
    Vcr(Box<VcrCache>),
}

/// Cached state of the last vertex cover bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcrCache {
    pub valid: bool,
    /// `alive - matching` when the bound was last computed; an upper bound
    /// on any solution in the subtree.
    pub bound: usize,
    pub matching: usize,
    /// Endpoints of the last maximal matching, a vertex cover of the
    /// incompatibility graph at that time.
    pub cover: FixedBitSet,
    /// Incompatibilities created since, not covered by `cover`.
    pub new_conflicts: usize,
}

impl VcrCache {
    fn empty(k: usize) -> Self {
        VcrCache {
            valid: false,
            bound: 0,
            matching: 0,
            cover: FixedBitSet::with_capacity(k),
            new_conflicts: 0,
        }
    }
}

/// Mutable state for one Turing kernel.
#[derive(Debug, Clone)]
pub struct KernelState {
    id: u64,
    sub: InducedSubgraph,
    spec: ModelSpec,
    adjacent: Vec<FixedBitSet>,
    alive: FixedBitSet,
    marked: FixedBitSet,
    alive_count: usize,
    degree: Vec<u32>,
    /// Dense `k × k` common neighbor counts among alive vertices.
    common: Vec<u32>,
    incompat: Vec<FixedBitSet>,
    /// Alive vertices compatible with `v`, counting `v` itself.
    compat_count: Vec<u32>,
    vcr: VcrCache,
    log: Vec<(u64, Entry)>,
    pushes: u64,
    flow_calls: u64,
}

impl PartialEq for KernelState {
    /// Compares everything except identity and counters.
    fn eq(&self, o: &Self) -> bool {
        self.sub == o.sub
            && self.spec == o.spec
            && self.alive == o.alive
            && self.marked == o.marked
            && self.alive_count == o.alive_count
            && self.degree == o.degree
            && self.common == o.common
            && self.incompat == o.incompat
            && self.compat_count == o.compat_count
            && self.vcr == o.vcr
            && self.log == o.log
    }
}

/// Id-independent view of the alive part of a state, keyed by the
/// state's local vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalView {
    pub alive: Vec<usize>,
    pub marked: Vec<usize>,
    pub degree: BTreeMap<usize, u32>,
    pub common: BTreeMap<(usize, usize), u32>,
    pub incompatible: Vec<(usize, usize)>,
    pub compat_count: BTreeMap<usize, u32>,
}

impl KernelState {
    /// Initializes all structures over `sub`, marking `seed` if given.
    pub fn new(sub: InducedSubgraph, spec: ModelSpec, seed: Option<usize>) -> Self {
        let k = sub.graph.n();
        let g = &sub.graph;
        let mut adjacent = vec![FixedBitSet::with_capacity(k); k];
        let mut degree = vec![0u32; k];
        let mut common = vec![0u32; k * k];
        for v in 0..k {
            let nb = g.neighbors(v);
            degree[v] = nb.len() as u32;
            for (i, &a) in nb.iter().enumerate() {
                adjacent[v].insert(a);
                for &b in &nb[i + 1..] {
                    common[a * k + b] += 1;
                    common[b * k + a] += 1;
                }
            }
        }
        let mut alive = FixedBitSet::with_capacity(k);
        alive.insert_range(..);
        let mut state = KernelState {
            id: NEXT_STATE_ID.fetch_add(1, Ordering::Relaxed),
            sub,
            spec,
            adjacent,
            alive,
            marked: FixedBitSet::with_capacity(k),
            alive_count: k,
            degree,
            common,
            incompat: vec![FixedBitSet::with_capacity(k); k],
            compat_count: vec![k as u32; k],
            vcr: VcrCache::empty(k),
            log: Vec::new(),
            pushes: 0,
            flow_calls: 0,
        };
        for a in 0..k {
            for b in a + 1..k {
                if !state.evaluate(a, b) {
                    state.set_incompatible(a, b);
                }
            }
        }
        if let Some(s) = seed {
            state.marked.insert(s);
        }
        state
    }

    /// Convenience constructor over a whole graph.
    pub fn from_graph(g: &Graph, spec: ModelSpec, seed: Option<usize>) -> Self {
        let all: VertexSet = (0..g.n()).collect();
        Self::new(induced_subgraph(g, &all).expect("in range"), spec, seed)
    }

    pub fn spec(&self) -> ModelSpec {
        self.spec
    }

    pub fn size(&self) -> usize {
        self.sub.graph.n()
    }

    pub fn graph(&self) -> &Graph {
        &self.sub.graph
    }

    pub fn subgraph(&self) -> &InducedSubgraph {
        &self.sub
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.alive.contains(v)
    }

    pub fn is_marked(&self, v: usize) -> bool {
        self.marked.contains(v)
    }

    pub fn alive(&self) -> impl Iterator<Item = usize> + '_ {
        self.alive.ones()
    }

    pub fn marked(&self) -> impl Iterator<Item = usize> + '_ {
        self.marked.ones()
    }

    pub fn marked_count(&self) -> usize {
        self.marked.count_ones(..)
    }

    /// Degree in the alive subgraph.
    pub fn degree(&self, v: usize) -> usize {
        self.degree[v] as usize
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacent[u].contains(v)
    }

    pub fn common_neighbors(&self, u: usize, v: usize) -> usize {
        self.common[u * self.size() + v] as usize
    }

    pub fn compat_count(&self, v: usize) -> usize {
        self.compat_count[v] as usize
    }

    pub fn flow_calls(&self) -> u64 {
        self.flow_calls
    }

    pub fn vcr_cache(&self) -> &VcrCache {
        &self.vcr
    }

    /// Alive vertices incompatible with `v`.
    pub fn incompatible_with(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incompat[v].intersection(&self.alive)
    }

    /// Reads the maintained compatibility relation.
    pub fn compatible(&self, u: usize, v: usize) -> Result<bool, StateError> {
        self.check_pair(u, v)?;
        Ok(!self.incompat[u].contains(v))
    }

    /// Evaluates the predicate afresh from the counters (and a max flow for
    /// the connected model) without consulting the incompatibility graph.
    pub fn evaluate_compatible(&self, u: usize, v: usize) -> Result<bool, StateError> {
        self.check_pair(u, v)?;
        let adjacent = self.adjacent(u, v);
        let cn = self.common_neighbors(u, v);
        Ok(match self.spec.counting_compatible(adjacent, cn) {
            Some(c) => c,
            None => {
                let t = self.spec.t() as usize;
                (adjacent || cn > 0) && self.internally_disjoint_paths(u, v, t)? >= t
            }
        })
    }

    /// `min(cap, number of internally vertex-disjoint u–v paths)` in the
    /// alive subgraph.
    pub fn internally_disjoint_paths(&self, u: usize, v: usize, cap: usize) -> Result<usize, StateError> {
        self.check_pair(u, v)?;
        Ok(flow::disjoint_paths_in(&self.sub.graph, |w| self.alive.contains(w), u, v, cap))
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<(), StateError> {
        for w in [u, v] {
            if w >= self.size() {
                return Err(StateError::OutOfRange(w));
            }
            if !self.alive.contains(w) {
                return Err(StateError::Dead(w));
            }
        }
        if u == v {
            return Err(StateError::SamePair);
        }
        Ok(())
    }

    /// Predicate on an alive pair; counts flow calls.
    fn evaluate(&mut self, a: usize, b: usize) -> bool {
        let adjacent = self.adjacent(a, b);
        let cn = self.common_neighbors(a, b);
        if let Some(c) = self.spec.counting_compatible(adjacent, cn) {
            return c;
        }
        let t = self.spec.t() as usize;
        if !adjacent && cn == 0 {
            return false;
        }
        // distance <= 2 already implies connectivity
        if t <= 1 {
            return true;
        }
        if (self.degree[a].min(self.degree[b]) as usize) < t {
            return false;
        }
        self.flow_calls += 1;
        let alive = &self.alive;
        flow::disjoint_paths_in(&self.sub.graph, |w| alive.contains(w), a, b, t) >= t
    }

    fn set_incompatible(&mut self, a: usize, b: usize) {
        self.incompat[a].insert(b);
        self.incompat[b].insert(a);
        self.compat_count[a] -= 1;
        self.compat_count[b] -= 1;
    }

    fn push(&mut self, e: Entry) {
        self.pushes += 1;
        self.log.push((self.pushes, e));
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            owner: self.id,
            len: self.log.len(),
            serial: self.log.last().map_or(0, |(s, _)| *s),
        }
    }

    /// Marks `v` as part of the sought solution.
    pub fn mark(&mut self, v: usize) -> Result<Checkpoint, StateError> {
        if v >= self.size() {
            return Err(StateError::OutOfRange(v));
        }
        if !self.alive.contains(v) {
            return Err(StateError::Dead(v));
        }
        let cp = self.checkpoint();
        if !self.marked.contains(v) {
            self.marked.insert(v);
            self.push(Entry::Marked(v as u32));
        }
        Ok(cp)
    }

    /// Deletes an unmarked alive vertex and brings every structure up to
    /// date. Returns the checkpoint from just before the deletion.
    pub fn delete_vertex(&mut self, v: usize) -> Result<Checkpoint, StateError> {
        if v >= self.size() {
            return Err(StateError::OutOfRange(v));
        }
        if !self.alive.contains(v) {
            return Err(StateError::Dead(v));
        }
        if self.marked.contains(v) {
            return Err(StateError::DeleteMarked(v));
        }
        let cp = self.checkpoint();
        let k = self.size();
        self.push(Entry::Killed(v as u32));

        self.alive.set(v, false);
        self.alive_count -= 1;
        for u in self.alive.ones() {
            if !self.incompat[v].contains(u) {
                self.compat_count[u] -= 1;
            }
        }
        let nb: Vec<usize> = self
            .sub
            .graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| self.alive.contains(w))
            .collect();
        for &a in &nb {
            self.degree[a] -= 1;
        }
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                self.common[a * k + b] -= 1;
                self.common[b * k + a] -= 1;
            }
        }

        if self.spec.model() == Model::Connected {
            let alive: Vec<usize> = self.alive.ones().collect();
            for (i, &a) in alive.iter().enumerate() {
                for &b in &alive[i + 1..] {
                    if !self.incompat[a].contains(b) && !self.evaluate(a, b) {
                        self.flip_incompatible(a, b);
                    }
                }
            }
        } else {
            // only pairs of neighbors of v changed their counts
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if !self.incompat[a].contains(b) && !self.evaluate(a, b) {
                        self.flip_incompatible(a, b);
                    }
                }
            }
        }
        Ok(cp)
    }

    fn flip_incompatible(&mut self, a: usize, b: usize) {
        self.set_incompatible(a, b);
        self.push(Entry::Incompatible(a as u32, b as u32));
        if self.vcr.valid && !self.vcr.cover.contains(a) && !self.vcr.cover.contains(b) {
            self.vcr.new_conflicts += 1;
            self.push(Entry::Conflict);
        }
    }

    /// Replaces the vertex cover cache, logging the previous one.
    pub(crate) fn store_vcr(&mut self, cache: VcrCache) {
        let old = std::mem::replace(&mut self.vcr, cache);
        self.push(Entry::Vcr(Box::new(old)));
    }

    /// Rolls the state back to `cp`.
    pub fn undo_to(&mut self, cp: Checkpoint) -> Result<(), StateError> {
        if cp.owner != self.id {
            return Err(StateError::ForeignCheckpoint);
        }
        if cp.len > self.log.len() || (cp.len > 0 && self.log[cp.len - 1].0 != cp.serial) {
            return Err(StateError::StaleCheckpoint);
        }
        let k = self.size();
        while self.log.len() > cp.len {
            let (_, entry) = self.log.pop().expect("nonempty");
            match entry {
                Entry::Marked(v) => self.marked.set(v as usize, false),
                Entry::Incompatible(a, b) => {
                    let (a, b) = (a as usize, b as usize);
                    self.incompat[a].set(b, false);
                    self.incompat[b].set(a, false);
                    self.compat_count[a] += 1;
                    self.compat_count[b] += 1;
                }
                Entry::Conflict => self.vcr.new_conflicts -= 1,
                Entry::Vcr(old) => self.vcr = *old,
                Entry::Killed(v) => {
                    let v = v as usize;
                    let nb: Vec<usize> = self
                        .sub
                        .graph
                        .neighbors(v)
                        .iter()
                        .copied()
                        .filter(|&w| self.alive.contains(w))
                        .collect();
                    for (i, &a) in nb.iter().enumerate() {
                        self.degree[a] += 1;
                        for &b in &nb[i + 1..] {
                            self.common[a * k + b] += 1;
                            self.common[b * k + a] += 1;
                        }
                    }
                    for u in self.alive.ones() {
                        if !self.incompat[v].contains(u) {
                            self.compat_count[u] += 1;
                        }
                    }
                    self.alive.insert(v);
                    self.alive_count += 1;
                }
            }
        }
        Ok(())
    }

    /// An incompatible alive pair `(u, v)` where `u` has the fewest
    /// compatible vertices and `v` is the incompatible partner of `u` with
    /// the fewest; ties go to smaller ids. `None` iff no pair is incompatible.
    pub fn find_incompatible_pair(&self) -> Option<(usize, usize)> {
        let mut best: Option<(u32, usize)> = None;
        for u in self.alive.ones() {
            if self.incompatible_with(u).next().is_none() {
                continue;
            }
            if best.is_none_or(|(c, _)| self.compat_count[u] < c) {
                best = Some((self.compat_count[u], u));
            }
        }
        best.map(|(_, u)| {
            let v = self
                .incompatible_with(u)
                .min_by_key(|&v| (self.compat_count[v], v))
                .expect("has partner");
            (u, v)
        })
    }

    /// Whether the alive set currently has no incompatible pair.
    pub fn is_conflict_free(&self) -> bool {
        self.alive.ones().all(|u| self.incompatible_with(u).next().is_none())
    }

    /// Alive set lifted to the identifiers of the parent graph.
    pub fn alive_in_parent(&self) -> VertexSet {
        self.sub.lift(self.alive.ones())
    }

    pub fn canonical(&self) -> CanonicalView {
        let alive: Vec<usize> = self.alive.ones().collect();
        let mut common = BTreeMap::new();
        let mut incompatible = Vec::new();
        for (i, &a) in alive.iter().enumerate() {
            for &b in &alive[i + 1..] {
                common.insert((a, b), self.common_neighbors(a, b) as u32);
                if self.incompat[a].contains(b) {
                    incompatible.push((a, b));
                }
            }
        }
        CanonicalView {
            marked: self.marked.ones().collect(),
            degree: alive.iter().map(|&v| (v, self.degree[v])).collect(),
            compat_count: alive.iter().map(|&v| (v, self.compat_count[v])).collect(),
            alive,
            common,
            incompatible,
        }
    }

    /// The view a freshly initialized state on the current alive subgraph
    /// (with the same marks) would have, in this state's ids.
    pub fn from_scratch_view(&self) -> CanonicalView {
        let alive: VertexSet = self.alive.ones().collect();
        let sub = induced_subgraph(&self.sub.graph, &alive).expect("in range");
        let map = sub.to_parent.clone();
        let mut fresh = KernelState::new(sub, self.spec, None);
        for (v, &p) in map.iter().enumerate() {
            if self.marked.contains(p) {
                fresh.marked.insert(v);
            }
        }
        let c = fresh.canonical();
        CanonicalView {
            alive: c.alive.iter().map(|&v| map[v]).collect(),
            marked: c.marked.iter().map(|&v| map[v]).collect(),
            degree: c.degree.iter().map(|(&v, &d)| (map[v], d)).collect(),
            common: c.common.iter().map(|(&(a, b), &x)| ((map[a], map[b]), x)).collect(),
            incompatible: c.incompatible.iter().map(|&(a, b)| (map[a], map[b])).collect(),
            compat_count: c.compat_count.iter().map(|(&v, &x)| (map[v], x)).collect(),
        }
    }
}
