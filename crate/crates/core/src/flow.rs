//! Local vertex connectivity by unit-capacity max flow on a split graph.
//!
//! Every vertex `w` other than the endpoints becomes `w_in -> w_out` with
//! capacity one; each edge `{a, b}` becomes `a_out -> b_in` and
//! `b_out -> a_in`. Augmenting paths are found by BFS and the search
//! stops once `cap` paths are known.

use std::collections::VecDeque;

use crate::graph::Graph;

const NONE: u32 = u32::MAX;

/// Residual network over the alive vertices of a graph.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    head: Vec<u32>,
    next: Vec<u32>,
    to: Vec<u32>,
    cap: Vec<u8>,
}

impl FlowNetwork {
    /// Builds the split network for paths from `source` to `sink`. The
    /// direct edge between them, if any, is left out.
    pub fn build<F: Fn(usize) -> bool>(g: &Graph, alive: F, source: usize, sink: usize) -> Self {
        let n = g.n();
        let mut net = FlowNetwork {
            head: vec![NONE; 2 * n],
            next: Vec::new(),
            to: Vec::new(),
            cap: Vec::new(),
        };
        for w in 0..n {
            if !alive(w) {
                continue;
            }
            // endpoints are uncapacitated, which is the same as never
            // needing their internal arc: paths start at out(source) and
            // end at in(sink)
            if w != source && w != sink {
                net.arc(2 * w, 2 * w + 1);
            }
            for &x in g.neighbors(w) {
                if !alive(x) || (w == source && x == sink) || (w == sink && x == source) {
                    continue;
                }
                net.arc(2 * w + 1, 2 * x);
            }
        }
        net
    }

    fn arc(&mut self, from: usize, to: usize) {
        for (a, b, c) in [(from, to, 1u8), (to, from, 0u8)] {
            self.to.push(b as u32);
            self.cap.push(c);
            self.next.push(self.head[a]);
            self.head[a] = (self.to.len() - 1) as u32;
        }
    }

    /// Edmonds–Karp from `s` to `t`, stopping at `limit` units.
    pub fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let mut flow = 0;
        let mut pred = vec![NONE; self.head.len()];
        let mut queue = VecDeque::new();
        while flow < limit {
            pred.iter_mut().for_each(|p| *p = NONE);
            queue.clear();
            queue.push_back(s as u32);
            let mut reached = false;
            'bfs: while let Some(u) = queue.pop_front() {
                let mut e = self.head[u as usize];
                while e != NONE {
                    let v = self.to[e as usize];
                    if self.cap[e as usize] > 0 && pred[v as usize] == NONE && v as usize != s {
                        pred[v as usize] = e;
                        if v as usize == t {
                            reached = true;
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                    e = self.next[e as usize];
                }
            }
            if !reached {
                break;
            }
            let mut v = t;
            while v != s {
                let e = pred[v] as usize;
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                v = self.to[e ^ 1] as usize;
            }
            flow += 1;
        }
        flow
    }
}

/// `min(cap, κ(u, v))` where `κ` is the maximum number of internally
/// vertex-disjoint `u`–`v` paths among the vertices accepted by `alive`.
/// A direct edge counts as one path.
pub fn disjoint_paths_in<F: Fn(usize) -> bool>(
    g: &Graph,
    alive: F,
    u: usize,
    v: usize,
    cap: usize,
) -> usize {
    assert_ne!(u, v, "endpoints must differ");
    if cap == 0 {
        return 0;
    }
    let direct = usize::from(g.has_edge(u, v));
    if direct >= cap {
        return cap;
    }
    let mut net = FlowNetwork::build(g, alive, u, v);
    direct + net.max_flow(2 * u + 1, 2 * v, cap - direct)
}

/// [`disjoint_paths_in`] over the whole graph.
pub fn disjoint_paths(g: &Graph, u: usize, v: usize, cap: usize) -> usize {
    disjoint_paths_in(g, |_| true, u, v, cap)
}
