//! Random instances with tunable density spread.
//!
//! Each vertex draws a personal probability `p_v` uniformly from `[a, b]`
//! and every pair `{u, v}` becomes an edge with probability
//! `(p_u + p_v) / 2`, so the expected density is `(a + b) / 2`. The
//! generator is Xoshiro256++ seeded through SplitMix64, which gives the
//! same stream on every platform.

use rand::{Rng, RngExt, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("need 0 <= a <= b <= 1, got a = {a}, b = {b}")]
    Probabilities { a: f64, b: f64 },
    #[error("need at least one vertex")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub seed: u64,
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.n == 0 {
            return Err(GenError::Empty);
        }
        if !(0.0 <= self.a && self.a <= self.b && self.b <= 1.0) {
            return Err(GenError::Probabilities { a: self.a, b: self.b });
        }
        Ok(())
    }
}

pub fn generate(p: &GenParams) -> Result<Graph, GenError> {
    p.validate()?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(p.seed);
    let probs: Vec<f64> = (0..p.n)
        .map(|_| p.a + (p.b - p.a) * rng.random::<f64>())
        .collect();
    let mut edges = Vec::new();
    for u in 0..p.n {
        for v in u + 1..p.n {
            // strict < so that probability 0 never and 1 always yields an edge
            if rng.random::<f64>() < (probs[u] + probs[v]) / 2.0 {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_edge_list(p.n, &edges))
}

/// Erdős–Rényi `G(n, p)` from a caller-supplied generator.
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edge_list(n, &edges)
}

pub fn density(g: &Graph) -> f64 {
    let n = g.n() as f64;
    if g.n() < 2 {
        return 0.0;
    }
    g.m() as f64 / (n * (n - 1.0) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, a: f64, b: f64, seed: u64) -> GenParams {
        GenParams { n, a, b, seed }
    }

    #[test]
    fn extremes() {
        assert_eq!(generate(&params(9, 0.0, 0.0, 1)).unwrap().m(), 0);
        assert_eq!(generate(&params(9, 1.0, 1.0, 1)).unwrap().m(), 36);
    }

    #[test]
    fn invalid() {
        assert!(generate(&params(5, 0.3, 0.2, 0)).is_err());
        assert!(generate(&params(5, -0.1, 0.2, 0)).is_err());
        assert!(generate(&params(5, 0.1, 1.2, 0)).is_err());
        assert!(generate(&params(0, 0.1, 0.2, 0)).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let p = params(60, 0.05, 0.25, 42);
        assert_eq!(generate(&p).unwrap(), generate(&p).unwrap());
        assert_ne!(generate(&p).unwrap(), generate(&params(60, 0.05, 0.25, 43)).unwrap());
    }

    #[test]
    fn uniform_case_matches_p() {
        // 50 seeds × C(100,2) pairs; chi-square with one degree of freedom
        let p = 0.2;
        let pairs = 50.0 * 4950.0;
        let edges: usize = (0..50)
            .map(|s| generate(&params(100, p, p, s)).unwrap().m())
            .sum();
        let expected = pairs * p;
        let chi2 = (edges as f64 - expected).powi(2) / (pairs * p * (1.0 - p));
        // 99.9% quantile of chi-square(1)
        assert!(chi2 < 10.83, "chi2 = {chi2}");
    }
}
