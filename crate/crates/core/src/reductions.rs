//! Data reduction rules on a [`KernelState`].
//!
//! Every rule either shrinks the state (deleting or marking vertices),
//! proves that this branch cannot beat the incumbent, or does nothing.
//! The hereditary degree rule assumes the sought solution is not a clique;
//! the solver covers cliques separately.

use std::ops::{AddAssign, Index};

use fixedbitset::FixedBitSet;

use crate::compat::{KernelState, VcrCache};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    MarkedIncompatible,
    IncompatibleResolution,
    LowDegree,
    LowCompatibility,
    VertexCover,
    NoChoice,
}

impl Rule {
    pub const ALL: [Rule; 6] = [
        Rule::MarkedIncompatible,
        Rule::IncompatibleResolution,
        Rule::LowDegree,
        Rule::LowCompatibility,
        Rule::VertexCover,
        Rule::NoChoice,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::MarkedIncompatible => "marked_incompatible",
            Rule::IncompatibleResolution => "incompatible_resolution",
            Rule::LowDegree => "low_degree",
            Rule::LowCompatibility => "low_compatibility",
            Rule::VertexCover => "vertex_cover",
            Rule::NoChoice => "no_choice",
        }
    }
}

/// Per-rule counts of deleted or marked vertices and of prunes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RuleFirings([u64; 6]);

impl RuleFirings {
    fn add(&mut self, rule: Rule, k: u64) {
        self.0[rule as usize] += k;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Rule, u64)> + '_ {
        Rule::ALL.iter().map(move |&r| (r, self.0[r as usize]))
    }
}

impl Index<Rule> for RuleFirings {
    type Output = u64;

    fn index(&self, r: Rule) -> &u64 {
        &self.0[r as usize]
    }
}

impl AddAssign for RuleFirings {
    fn add_assign(&mut self, o: Self) {
        for i in 0..6 {
            self.0[i] += o.0[i];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    Reduced,
    Prune,
    Fixpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleOutcome {
    pub kind: OutcomeKind,
    pub firings: RuleFirings,
}

impl RuleOutcome {
    fn new() -> Self {
        RuleOutcome {
            kind: OutcomeKind::Fixpoint,
            firings: RuleFirings::default(),
        }
    }

    fn prune(mut self, rule: Rule) -> Self {
        self.firings.add(rule, 1);
        self.kind = OutcomeKind::Prune;
        self
    }

    fn fired(&mut self, rule: Rule, k: u64) {
        if k > 0 {
            self.firings.add(rule, k);
            self.kind = OutcomeKind::Reduced;
        }
    }

    pub fn is_prune(&self) -> bool {
        self.kind == OutcomeKind::Prune
    }
}

/// Aborts if two marked vertices are incompatible.
pub fn rule_marked_incompatible(state: &KernelState) -> RuleOutcome {
    let out = RuleOutcome::new();
    for m in state.marked() {
        if state.incompatible_with(m).any(|u| state.is_marked(u)) {
            return out.prune(Rule::MarkedIncompatible);
        }
    }
    out
}

/// Deletes every vertex incompatible with a marked vertex.
pub fn rule_incompatible_resolution(state: &mut KernelState) -> RuleOutcome {
    let mut out = RuleOutcome::new();
    loop {
        let doomed: FixedBitSet = {
            let mut d = FixedBitSet::with_capacity(state.size());
            for m in state.marked() {
                d.extend(state.incompatible_with(m));
            }
            d
        };
        if doomed.is_clear() {
            return out;
        }
        let mut k = 0;
        for v in doomed.ones() {
            if state.is_marked(v) {
                return out.prune(Rule::MarkedIncompatible);
            }
            if state.is_alive(v) {
                state.delete_vertex(v).expect("alive and unmarked");
                k += 1;
            }
        }
        out.fired(Rule::IncompatibleResolution, k);
    }
}

/// Deletes vertices whose alive degree is below what any (non-clique,
/// for hereditary) solution needs, and degree-one vertices whose only
/// neighbor's closed neighborhood cannot beat `best_size`. Cascades.
pub fn rule_low_degree(state: &mut KernelState, best_size: usize) -> RuleOutcome {
    let mut out = RuleOutcome::new();
    let min_degree = state.spec().min_degree();
    let doomed = |s: &KernelState, v: usize| -> bool {
        let d = s.degree(v);
        if d < min_degree {
            return true;
        }
        if d == 1 {
            let y = s
                .graph()
                .neighbors(v)
                .iter()
                .copied()
                .find(|&w| s.is_alive(w))
                .expect("degree one");
            return s.degree(y) < best_size;
        }
        false
    };
    let mut queue: Vec<usize> = state.alive().filter(|&v| doomed(state, v)).collect();
    let mut k = 0;
    while let Some(v) = queue.pop() {
        if !state.is_alive(v) || !doomed(state, v) {
            continue;
        }
        if state.is_marked(v) {
            out.fired(Rule::LowDegree, k);
            return out.prune(Rule::LowDegree);
        }
        let nb: Vec<usize> = state
            .graph()
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| state.is_alive(w))
            .collect();
        state.delete_vertex(v).expect("alive and unmarked");
        k += 1;
        for w in nb {
            if doomed(state, w) {
                queue.push(w);
            }
            // a neighbor of w may have become degree one with w now small
            if state.degree(w) < best_size {
                queue.extend(
                    state
                        .graph()
                        .neighbors(w)
                        .iter()
                        .copied()
                        .filter(|&x| state.is_alive(x) && state.degree(x) == 1),
                );
            }
        }
    }
    out.fired(Rule::LowDegree, k);
    out
}

/// Deletes vertices compatible with at most `best_size` vertices (itself
/// included): no solution through them can beat the incumbent.
pub fn rule_low_compatibility(state: &mut KernelState, best_size: usize) -> RuleOutcome {
    let mut out = RuleOutcome::new();
    loop {
        let doomed: Vec<usize> = state
            .alive()
            .filter(|&v| state.compat_count(v) <= best_size)
            .collect();
        if doomed.is_empty() {
            return out;
        }
        let mut k = 0;
        for v in doomed {
            if !state.is_alive(v) {
                continue;
            }
            if state.is_marked(v) {
                out.fired(Rule::LowCompatibility, k);
                return out.prune(Rule::LowCompatibility);
            }
            state.delete_vertex(v).expect("alive and unmarked");
            k += 1;
        }
        out.fired(Rule::LowCompatibility, k);
    }
}

/// Greedy maximal matching of the incompatibility graph, taking edges in
/// ascending `(u, v)` order. Returns its size and matched vertices.
pub fn greedy_matching(state: &KernelState) -> (usize, FixedBitSet) {
    let mut matched = FixedBitSet::with_capacity(state.size());
    let mut size = 0;
    for u in state.alive() {
        if matched.contains(u) {
            continue;
        }
        if let Some(v) = state.incompatible_with(u).find(|&v| v > u && !matched.contains(v)) {
            matched.insert(u);
            matched.insert(v);
            size += 1;
        }
    }
    (size, matched)
}

/// Prunes when `alive - b <= best_size`, where `b` is the size of a
/// maximal matching of the incompatibility graph (a vertex cover lower
/// bound). The last bound is reused while the incompatibilities created
/// since cannot push it over the threshold.
pub fn rule_vertex_cover(state: &mut KernelState, best_size: usize) -> RuleOutcome {
    let out = RuleOutcome::new();
    let cache = state.vcr_cache();
    if cache.valid {
        if cache.bound <= best_size {
            return out.prune(Rule::VertexCover);
        }
        if cache.bound - cache.new_conflicts.min(cache.bound) > best_size {
            return out;
        }
    }
    let (b, cover) = greedy_matching(state);
    let bound = state.alive_count() - b;
    state.store_vcr(VcrCache {
        valid: true,
        bound,
        matching: b,
        cover,
        new_conflicts: 0,
    });
    if bound <= best_size {
        out.prune(Rule::VertexCover)
    } else {
        out
    }
}

/// Two nonadjacent marked vertices with exactly the minimum number of
/// common neighbors their model allows need all of those neighbors.
pub fn rule_no_choice(state: &mut KernelState) -> RuleOutcome {
    let mut out = RuleOutcome::new();
    let x = state.spec().no_choice_threshold();
    loop {
        let marked: Vec<usize> = state.marked().collect();
        let mut to_mark = FixedBitSet::with_capacity(state.size());
        for (i, &a) in marked.iter().enumerate() {
            for &b in &marked[i + 1..] {
                if state.adjacent(a, b) || state.common_neighbors(a, b) != x {
                    continue;
                }
                for &w in state.graph().neighbors(a) {
                    if state.is_alive(w) && !state.is_marked(w) && state.adjacent(w, b) {
                        to_mark.insert(w);
                    }
                }
            }
        }
        if to_mark.is_clear() {
            return out;
        }
        let k = to_mark.count_ones(..) as u64;
        for w in to_mark.ones() {
            state.mark(w).expect("alive");
        }
        out.fired(Rule::NoChoice, k);
    }
}

/// Runs rules 1, 3, 2, 4, 6 until none changes the state, then the vertex
/// cover rule when `in_branching` is set.
pub fn apply_all(state: &mut KernelState, best_size: usize, in_branching: bool) -> RuleOutcome {
    let mut total = RuleOutcome::new();
    let merge = |total: &mut RuleOutcome, o: RuleOutcome| -> bool {
        total.firings += o.firings;
        match o.kind {
            OutcomeKind::Prune => {
                total.kind = OutcomeKind::Prune;
                true
            }
            OutcomeKind::Reduced => {
                total.kind = OutcomeKind::Reduced;
                false
            }
            OutcomeKind::Fixpoint => false,
        }
    };
    loop {
        let before = total.firings.total();
        if merge(&mut total, rule_marked_incompatible(state))
            || merge(&mut total, rule_low_degree(state, best_size))
            || merge(&mut total, rule_incompatible_resolution(state))
            || merge(&mut total, rule_low_compatibility(state, best_size))
            || merge(&mut total, rule_no_choice(state))
        {
            return total;
        }
        if total.firings.total() == before {
            break;
        }
    }
    if in_branching {
        merge(&mut total, rule_vertex_cover(state, best_size));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use crate::graph::Graph;
    use crate::model::ModelSpec;

    fn st(g: &Graph, spec: ModelSpec, marks: &[usize]) -> KernelState {
        let mut s = KernelState::from_graph(g, spec, None);
        for &m in marks {
            s.mark(m).unwrap();
        }
        s
    }

    #[test]
    fn marked_incompatible() {
        let f2 = two_hub(3);
        assert!(rule_marked_incompatible(&st(&f2, ModelSpec::robust(3), &[2, 3])).is_prune());
        assert!(!rule_marked_incompatible(&st(&f2, ModelSpec::robust(3), &[0, 1])).is_prune());
        assert_eq!(
            rule_marked_incompatible(&st(&complete(3), ModelSpec::robust(1), &[0, 1, 2])).kind,
            OutcomeKind::Fixpoint
        );
        assert!(rule_marked_incompatible(&st(&path(3), ModelSpec::hereditary(1), &[0, 2])).is_prune());
    }

    #[test]
    fn incompatible_resolution() {
        let mut s = st(&path(3), ModelSpec::hereditary(1), &[0]);
        let o = rule_incompatible_resolution(&mut s);
        assert_eq!(o.kind, OutcomeKind::Reduced);
        assert_eq!(o.firings[Rule::IncompatibleResolution], 1);
        assert_eq!(s.alive().collect::<Vec<_>>(), vec![0, 1]);

        let mut s = st(&path(3), ModelSpec::hereditary(1), &[]);
        assert_eq!(rule_incompatible_resolution(&mut s).kind, OutcomeKind::Fixpoint);

        // hub and bottom are adjacent without common neighbors, so both go too
        let mut s = st(&two_hub(3), ModelSpec::robust(3), &[2]);
        rule_incompatible_resolution(&mut s);
        assert_eq!(s.alive().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn low_degree() {
        let mut s = st(&star(5), ModelSpec::robust(2), &[]);
        rule_low_degree(&mut s, 0);
        assert_eq!(s.alive_count(), 0);

        let mut s = st(&complete(4), ModelSpec::hereditary(2), &[]);
        assert_eq!(rule_low_degree(&mut s, 0).kind, OutcomeKind::Fixpoint);

        // base case seeded with Δ + 1 = 3: the path peels away completely
        let mut s = st(&path(5), ModelSpec::robust(1), &[]);
        rule_low_degree(&mut s, 3);
        assert_eq!(s.alive_count(), 0);
        // without an incumbent degree one alone is no reason to delete
        let mut s = st(&path(5), ModelSpec::robust(1), &[]);
        assert_eq!(rule_low_degree(&mut s, 0).kind, OutcomeKind::Fixpoint);

        let mut s = st(&star(5), ModelSpec::robust(2), &[1]);
        assert!(rule_low_degree(&mut s, 0).is_prune());
    }

    #[test]
    fn low_compatibility() {
        let mut s = st(&path(3), ModelSpec::hereditary(1), &[]);
        rule_low_compatibility(&mut s, 2);
        assert_eq!(s.alive_count(), 0);

        let mut s = st(&path(3), ModelSpec::hereditary(1), &[]);
        assert_eq!(rule_low_compatibility(&mut s, 0).kind, OutcomeKind::Fixpoint);

        for spec in [ModelSpec::robust(1), ModelSpec::hereditary(1), ModelSpec::connected(1)] {
            let mut s = st(&complete(5), spec, &[]);
            assert_eq!(rule_low_compatibility(&mut s, 4).kind, OutcomeKind::Fixpoint);
        }
    }

    /// State whose incompatibility graph is exactly `pairs`: under
    /// hereditary t = n every nonadjacent pair is incompatible.
    fn with_incompat(n: usize, pairs: &[(usize, usize)]) -> KernelState {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if !pairs.contains(&(u, v)) {
                    e.push((u, v));
                }
            }
        }
        KernelState::from_graph(&Graph::from_edge_list(n, &e), ModelSpec::hereditary(n as u32), None)
    }

    #[test]
    fn vertex_cover() {
        let mut s = with_incompat(6, &[(0, 1), (2, 3), (4, 5)]);
        assert_eq!(greedy_matching(&s).0, 3);
        assert!(rule_vertex_cover(&mut s, 3).is_prune());
        let mut s = with_incompat(6, &[(0, 1), (2, 3), (4, 5)]);
        assert!(!rule_vertex_cover(&mut s, 2).is_prune());

        let mut s = st(&complete(5), ModelSpec::robust(1), &[]);
        assert!(!rule_vertex_cover(&mut s, 4).is_prune());
        assert_eq!(s.vcr_cache().matching, 0);

        let mut s = with_incompat(5, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(greedy_matching(&s).0, 1);
        assert!(rule_vertex_cover(&mut s, 4).is_prune());
    }

    #[test]
    fn vertex_cover_cache_is_undone() {
        let mut s = with_incompat(6, &[(0, 1), (2, 3)]);
        let cp = s.checkpoint();
        let fresh = s.clone();
        assert!(!rule_vertex_cover(&mut s, 3).is_prune());
        assert!(s.vcr_cache().valid);
        // reused: bound 4 with no new conflicts stays above 3
        assert!(!rule_vertex_cover(&mut s, 3).is_prune());
        s.undo_to(cp).unwrap();
        assert_eq!(s, fresh);
    }

    #[test]
    fn no_choice() {
        let mut s = st(&cycle(5), ModelSpec::connected(2), &[0, 2]);
        rule_no_choice(&mut s);
        assert!(s.is_marked(1));
        assert_eq!(s.marked_count(), 3);

        let mut s = st(&complete_bipartite(3, 3), ModelSpec::hereditary(2), &[0, 1]);
        rule_no_choice(&mut s);
        // 3 and 4 then share exactly 0, 1, 2, which pulls in 2
        assert_eq!(s.marked_count(), 6);

        let mut s = st(&complete(4), ModelSpec::robust(1), &[0, 1]);
        assert_eq!(rule_no_choice(&mut s).kind, OutcomeKind::Fixpoint);
    }

    #[test]
    fn apply_all_examples() {
        let mut s = st(&complete(6), ModelSpec::robust(2), &[]);
        let o = apply_all(&mut s, 0, false);
        assert_eq!(o.kind, OutcomeKind::Fixpoint);
        assert_eq!(o.firings.total(), 0);

        // the marked endpoint has degree 1 < t + 1, so the non-clique
        // search through it is hopeless
        let mut s = st(&path(3), ModelSpec::hereditary(1), &[0]);
        assert!(apply_all(&mut s, 0, false).is_prune());

        // the same resolution with the degree rule out of the way
        let mut s = st(&path(3), ModelSpec::hereditary(1), &[0]);
        let o = rule_incompatible_resolution(&mut s);
        assert_eq!(o.firings[Rule::IncompatibleResolution], 1);

        let mut s = st(&two_hub(3), ModelSpec::robust(3), &[2]);
        assert!(apply_all(&mut s, 0, false).is_prune());
    }
}
