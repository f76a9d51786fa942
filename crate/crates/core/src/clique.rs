//! Maximum clique by branch and bound with a greedy coloring bound,
//! run separately on each vertex's later neighbors in degeneracy order.

use std::time::Instant;

use fixedbitset::FixedBitSet;

use crate::graph::{Graph, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Timeout;

/// A maximum clique of `g` (empty iff `g` has no vertices).
pub fn clique_max(g: &Graph) -> VertexSet {
    clique_max_until(g, None).expect("no deadline")
}

/// Like [`clique_max`] but gives up at `deadline`.
pub fn clique_max_until(g: &Graph, deadline: Option<Instant>) -> Result<VertexSet, Timeout> {
    let n = g.n();
    if n == 0 {
        return Ok(VertexSet::new());
    }
    let order = degeneracy_order(g);
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut best: Vec<usize> = vec![order[0]];
    for &v in &order {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Timeout);
        }
        let later: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| pos[w] > pos[v]).collect();
        if later.len() < best.len() {
            continue;
        }
        let k = later.len();
        let adj: Vec<FixedBitSet> = later
            .iter()
            .map(|&a| {
                let mut row = FixedBitSet::with_capacity(k);
                for (j, &b) in later.iter().enumerate() {
                    if g.has_edge(a, b) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        let mut search = Search {
            adj: &adj,
            best: best.len() - 1,
            best_set: None,
            current: Vec::new(),
            deadline,
            steps: 0,
        };
        let cand: Vec<usize> = (0..k).collect();
        search.expand(cand)?;
        if let Some(local) = search.best_set {
            best = std::iter::once(v).chain(local.into_iter().map(|j| later[j])).collect();
        }
    }
    Ok(VertexSet::from_unsorted(best))
}

fn degeneracy_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let maxd = g.max_degree();
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); maxd + 1];
    for v in 0..n {
        buckets[deg[v]].push(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut d = 0;
    while order.len() < n {
        d = d.min(maxd);
        while buckets[d].is_empty() {
            d += 1;
        }
        let v = buckets[d].pop().expect("nonempty");
        if removed[v] || deg[v] != d {
            continue;
        }
        removed[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !removed[w] {
                deg[w] -= 1;
                buckets[deg[w]].push(w);
                d = d.min(deg[w]);
            }
        }
    }
    order
}

struct Search<'a> {
    adj: &'a [FixedBitSet],
    /// Size to beat, not counting the root vertex.
    best: usize,
    best_set: Option<Vec<usize>>,
    current: Vec<usize>,
    deadline: Option<Instant>,
    steps: u64,
}

impl Search<'_> {
    fn expand(&mut self, cand: Vec<usize>) -> Result<(), Timeout> {
        self.steps += 1;
        if self.steps.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Timeout);
        }
        if cand.is_empty() {
            if self.current.len() > self.best {
                self.best = self.current.len();
                self.best_set = Some(self.current.clone());
            }
            return Ok(());
        }
        let (order, colors) = self.color(&cand);
        for i in (0..order.len()).rev() {
            if self.current.len() + colors[i] <= self.best {
                return Ok(());
            }
            let v = order[i];
            self.current.push(v);
            let next: Vec<usize> = order[..i].iter().copied().filter(|&w| self.adj[v].contains(w)).collect();
            self.expand(next)?;
            self.current.pop();
        }
        Ok(())
    }

    /// Greedy sequential coloring; returns vertices sorted by color and
    /// the color (1-based) of each.
    fn color(&self, cand: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in cand {
            match classes.iter_mut().find(|c| c.iter().all(|&w| !self.adj[v].contains(w))) {
                Some(c) => c.push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut order = Vec::with_capacity(cand.len());
        let mut colors = Vec::with_capacity(cand.len());
        for (c, class) in classes.into_iter().enumerate() {
            for v in class {
                order.push(v);
                colors.push(c + 1);
            }
        }
        (order, colors)
    }
}
