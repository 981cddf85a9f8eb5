//! Correlated stochastic block model pairs.
//!
//! `A1` is an ordinary SBM draw. Each pair `{i, j}` of `A2` is then drawn
//! conditionally on `A1`: with block probability `p` and `a = A1[i][j]`,
//! `P(A2[i][j] = 1) = p + rho * (a - p)`. Both graphs have Bernoulli(`p`)
//! marginals and edgewise Pearson correlation `rho`, and the identity is the
//! ground-truth correspondence.
//!
//! Row `i` draws from its own ChaCha8 stream, so a pair is reproducible from
//! the seed alone regardless of evaluation order.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::invalid;
use crate::graph::{GraphPair, SimpleGraph, VertexTable};
use crate::matrix::Matrix;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SbmSpec {
    pub block_sizes: Vec<usize>,
    pub block_probs: Matrix,
    pub rho: f64,
}

impl SbmSpec {
    pub fn new(block_sizes: Vec<usize>, block_probs: Matrix, rho: f64) -> Result<Self> {
        let spec = SbmSpec {
            block_sizes,
            block_probs,
            rho,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Equal-sized blocks with one within-block and one between-block
    /// probability.
    pub fn planted(
        blocks: usize,
        size: usize,
        within: f64,
        between: f64,
        rho: f64,
    ) -> Result<Self> {
        let probs = Matrix::from_fn(blocks, blocks, |a, b| if a == b { within } else { between });
        Self::new(alloc::vec![size; blocks], probs, rho)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.block_sizes.len();
        if k == 0 {
            return Err(invalid!("at least one block is required"));
        }
        if self.block_sizes.contains(&0) {
            return Err(invalid!("block sizes must be positive"));
        }
        if self.block_probs.rows() != k || self.block_probs.cols() != k {
            return Err(invalid!(
                "{}x{} probability matrix for {k} blocks",
                self.block_probs.rows(),
                self.block_probs.cols()
            ));
        }
        for a in 0..k {
            for b in 0..k {
                let p = self.block_probs[(a, b)];
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid!(
                        "block probability ({a}, {b}) = {p} outside [0, 1]"
                    ));
                }
                if p != self.block_probs[(b, a)] {
                    return Err(invalid!(
                        "block probabilities are not symmetric at ({a}, {b})"
                    ));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(invalid!("correlation {} outside [0, 1]", self.rho));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// Block id of every vertex, blocks laid out contiguously.
    pub fn blocks(&self) -> Vec<usize> {
        self.block_sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| core::iter::repeat_n(b, s))
            .collect()
    }
}

/// Samples a correlated pair; both graphs carry block labels `b0`, `b1`, ...
pub fn sample_correlated_pair(spec: &SbmSpec, rng_seed: u64) -> Result<GraphPair> {
    spec.validate()?;
    let n = spec.n();
    let blocks = spec.blocks();
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        rng.set_stream(i as u64);
        for j in i + 1..n {
            let p = spec.block_probs[(blocks[i], blocks[j])];
            let a = rng.gen::<f64>() < p;
            let q = p + spec.rho * (f64::from(u8::from(a)) - p);
            let b = rng.gen::<f64>() < q;
            if a {
                e1.push((i, j));
            }
            if b {
                e2.push((i, j));
            }
        }
    }
    let labels = blocks.iter().map(|b| alloc::format!("b{b}")).collect();
    let table = VertexTable::numbered(n).with_label_vec(labels)?;
    GraphPair::new(
        SimpleGraph::from_edges(table.clone(), e1)?,
        SimpleGraph::from_edges(table, e2)?,
    )
}

/// Pearson correlation between the upper triangles of the two adjacency
/// matrices. `NaN` when either graph is empty or complete.
pub fn edge_correlation(pair: &GraphPair) -> f64 {
    let n = pair.n();
    let (g1, g2) = (pair.g1(), pair.g2());
    let (mut s1, mut s2, mut s12, mut count) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let a = f64::from(u8::from(g1.has_edge(i, j)));
            let b = f64::from(u8::from(g2.has_edge(i, j)));
            s1 += a;
            s2 += b;
            s12 += a * b;
            count += 1.0;
        }
    }
    // Binary variables: E[x^2] = E[x].
    let (m1, m2) = (s1 / count, s2 / count);
    let cov = s12 / count - m1 * m2;
    cov / libm::sqrt(m1 * (1.0 - m1) * m2 * (1.0 - m2))
}
