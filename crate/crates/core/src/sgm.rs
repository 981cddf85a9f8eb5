//! Seeded graph matching.
//!
//! Seeds are moved to the front of both adjacency matrices, which splits
//! each into seed and non-seed blocks
//!
//! ```text
//! A = | A11  A12 |
//!     | A21  A22 |
//! ```
//!
//! Over non-seed permutations `P` the number of edge disagreements equals
//! `|E1| + |E2| - f(P)` with
//!
//! ```text
//! f(P) = <A1_22 P A2_22, P> + <A1_21 A2_21^T + A1_12^T A2_12, P> + <A1_11, A2_11>.
//! ```
//!
//! `f` is relaxed to the doubly stochastic polytope and maximized with
//! Frank-Wolfe: each step solves a linear assignment against the gradient
//! and moves with an exact line search (the objective is quadratic along the
//! segment). The final iterate is rounded to a permutation with one more
//! assignment solve.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, mismatch};
use crate::graph::{edge_disagreements, GraphPair, SimpleGraph};
use crate::lap::{self, Sense};
use crate::matrix::Matrix;
use crate::{Error, Result};

/// Seed vertices, given as indices shared by both graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    indices: Vec<usize>,
}

impl SeedSet {
    /// Validates against a graph of `n` vertices: indices in range, no
    /// duplicates, and at least one non-seed left.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.len() >= n {
            return Err(invalid!(
                "{} seeds leave no non-seed among {n} vertices",
                indices.len()
            ));
        }
        let mut seen = vec![false; n];
        for &s in &indices {
            if s >= n {
                return Err(invalid!("seed {s} out of range for {n} vertices"));
            }
            if core::mem::replace(&mut seen[s], true) {
                return Err(invalid!("seed {s} listed twice"));
            }
        }
        Ok(SeedSet { indices })
    }

    pub fn empty() -> Self {
        SeedSet {
            indices: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &s in &self.indices {
            mask[s] = true;
        }
        mask
    }
}

/// Bijection from g1 vertex indices to g2 vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    phi: Vec<usize>,
}

impl Matching {
    pub fn new(phi: Vec<usize>) -> Result<Self> {
        let n = phi.len();
        let mut seen = vec![false; n];
        for &p in &phi {
            if p >= n || core::mem::replace(&mut seen[p], true) {
                return Err(invalid!("matching is not a bijection on 0..{n}"));
            }
        }
        Ok(Matching { phi })
    }

    pub fn identity(n: usize) -> Self {
        Matching {
            phi: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.phi
    }

    pub fn get(&self, i: usize) -> usize {
        self.phi[i]
    }

    pub fn fixes(&self, seeds: &SeedSet) -> bool {
        seeds.indices.iter().all(|&s| self.phi[s] == s)
    }

    pub fn inverse(&self) -> Matching {
        let mut inv = vec![0; self.phi.len()];
        for (i, &p) in self.phi.iter().enumerate() {
            inv[p] = i;
        }
        Matching { phi: inv }
    }
}

/// Square nonnegative matrix with unit row and column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublyStochastic(Matrix);

impl DoublyStochastic {
    pub const ENTRY_TOLERANCE: f64 = 1e-12;
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(p: Matrix) -> Result<Self> {
        if !p.is_square() {
            return Err(mismatch!("{}x{} matrix is not square", p.rows(), p.cols()));
        }
        let v = Violation::of(&p);
        if !v.within_tolerance() {
            return Err(invalid!(
                "not doubly stochastic (min entry {}, max sum deviation {})",
                v.min_entry,
                v.max_sum_deviation
            ));
        }
        Ok(DoublyStochastic(p))
    }

    /// The uniform matrix `J / k`.
    pub fn barycenter(k: usize) -> Self {
        DoublyStochastic(Matrix::filled(k, k, 1.0 / k as f64))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.rows()
    }
}

/// How far a matrix is from the doubly stochastic polytope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub min_entry: f64,
    pub max_sum_deviation: f64,
}

impl Violation {
    pub fn of(p: &Matrix) -> Self {
        let k = p.cols();
        let mut col_sums = vec![0.0f64; k];
        let mut min_entry = f64::INFINITY;
        let mut max_dev = 0.0f64;
        for i in 0..p.rows() {
            let row = p.row(i);
            let mut s = 0.0;
            for (c, &x) in col_sums.iter_mut().zip(row) {
                min_entry = min_entry.min(x);
                s += x;
                *c += x;
            }
            max_dev = max_dev.max((s - 1.0).abs());
        }
        for c in col_sums {
            max_dev = max_dev.max((c - 1.0).abs());
        }
        Violation {
            min_entry,
            max_sum_deviation: max_dev,
        }
    }

    pub fn within_tolerance(&self) -> bool {
        self.min_entry >= -DoublyStochastic::ENTRY_TOLERANCE
            && self.max_sum_deviation <= DoublyStochastic::SUM_TOLERANCE
    }
}

/// Starting point for Frank-Wolfe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Initialization {
    /// The uniform doubly stochastic matrix.
    #[default]
    Barycenter,
    /// Midpoint between the barycenter and a random doubly stochastic
    /// matrix drawn from `rng_seed`.
    Perturbed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgmConfig {
    pub max_iterations: usize,
    /// Relative change in the relaxed objective below which iteration stops.
    pub tolerance: f64,
    pub rng_seed: u64,
    pub init: Initialization,
}

impl Default for SgmConfig {
    fn default() -> Self {
        SgmConfig {
            max_iterations: 20,
            tolerance: 1e-6,
            rng_seed: 0,
            init: Initialization::Barycenter,
        }
    }
}

impl SgmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(invalid!("max_iterations must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid!(
                "tolerance must be positive, got {}",
                self.tolerance
            ));
        }
        Ok(())
    }
}

/// Step size below which Frank-Wolfe is considered stalled.
const MIN_STEP: f64 = 1e-12;
/// Sinkhorn sweeps used to balance the random start.
const SINKHORN_SWEEPS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Line search chose a step below the stall threshold.
    Stalled,
    /// Relative objective change fell under the tolerance.
    Converged,
    MaxIterations,
    /// Exactly one non-seed, nothing to optimize.
    Trivial,
}

/// Per-iterate diagnostics of one Frank-Wolfe run.
#[derive(Debug, Clone, PartialEq)]
pub struct FwTrace {
    /// Relaxed disagreement count `|E1| + |E2| - f(P)`, starting with the
    /// initial point; one entry per iterate.
    pub objective: Vec<f64>,
    /// Chosen step per iteration.
    pub steps: Vec<f64>,
    /// Feasibility of each iterate, aligned with `objective`.
    pub feasibility: Vec<Violation>,
    pub stop: StopReason,
}

impl FwTrace {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    /// Largest increase between consecutive objective values (zero or
    /// negative for a monotone run).
    pub fn max_increase(&self) -> f64 {
        self.objective
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgmOutcome {
    pub matching: Matching,
    pub disagreements: usize,
    pub trace: FwTrace,
}

/// Permutes both graphs so the seeds occupy positions `0..m` in their given
/// order, followed by the non-seeds in ascending order.
///
/// Returns the reordered pair and `order`, where new index `i` holds old
/// vertex `order[i]`. The vertex tables are untouched: this is an
/// index-level relabeling.
pub fn reorder_seeds_first(pair: &GraphPair, seeds: &SeedSet) -> (GraphPair, Vec<usize>) {
    let order = seeds_first_order(pair.n(), seeds);
    (pair.permuted(&order), order)
}

fn seeds_first_order(n: usize, seeds: &SeedSet) -> Vec<usize> {
    let mask = seeds.mask(n);
    let mut order = seeds.indices.clone();
    order.extend((0..n).filter(|&i| !mask[i]));
    order
}

/// Matches g1 to g2 with the seeds held fixed.
pub fn sgm_match(pair: &GraphPair, seeds: &SeedSet, cfg: &SgmConfig) -> Result<Matching> {
    sgm_match_traced(pair, seeds, cfg).map(|o| o.matching)
}

/// [`sgm_match`] that also reports the Frank-Wolfe trace.
pub fn sgm_match_traced(pair: &GraphPair, seeds: &SeedSet, cfg: &SgmConfig) -> Result<SgmOutcome> {
    cfg.validate()?;
    let n = pair.n();
    if pair.g2().n() != n {
        return Err(Error::Unaligned(alloc::format!(
            "{} vs {} vertices",
            n,
            pair.g2().n()
        )));
    }
    let seeds = SeedSet::new(seeds.indices.clone(), n)?;
    let m = seeds.len();
    let order = seeds_first_order(n, &seeds);
    let g1 = pair.g1().permuted(&order);
    let g2 = pair.g2().permuted(&order);

    let (nonseed_perm, trace) = FrankWolfe::new(&g1, &g2, m, cfg).run()?;

    let mut phi = vec![0usize; n];
    for s in 0..m {
        phi[order[s]] = order[s];
    }
    for (i, &j) in nonseed_perm.iter().enumerate() {
        phi[order[m + i]] = order[m + j];
    }
    let matching = Matching::new(phi).expect("seed and non-seed maps combine into a bijection");
    let disagreements = edge_disagreements(pair.g1(), pair.g2(), &matching)?;
    Ok(SgmOutcome {
        matching,
        disagreements,
        trace,
    })
}

/// Working state for the relaxed problem over the non-seed block.
struct FrankWolfe<'a> {
    cfg: &'a SgmConfig,
    k: usize,
    /// Non-seed blocks `A1_22`, `A2_22`.
    b1: Matrix,
    b2: Matrix,
    /// Seed coupling `A1_21 A2_21^T + A1_12^T A2_12`.
    coupling: Matrix,
    /// `<A1_11, A2_11> - |E1| - |E2|`, so that `offset + f_free = -relaxed`.
    offset: f64,
}

impl<'a> FrankWolfe<'a> {
    fn new(g1: &SimpleGraph, g2: &SimpleGraph, m: usize, cfg: &'a SgmConfig) -> Self {
        let n = g1.n();
        let a1 = g1.to_matrix();
        let a2 = g2.to_matrix();
        let b1 = a1.block(m..n, m..n);
        let b2 = a2.block(m..n, m..n);

        let s1 = a1.block(m..n, 0..m);
        let s2 = a2.block(m..n, 0..m);
        let t1 = a1.block(0..m, m..n).transpose();
        let t2 = a2.block(0..m, m..n).transpose();
        let mut coupling = s1
            .matmul_transpose(&s2)
            .expect("matching seed block shapes");
        let reverse = t1
            .matmul_transpose(&t2)
            .expect("matching seed block shapes");
        coupling
            .as_mut_slice()
            .iter_mut()
            .zip(reverse.as_slice())
            .for_each(|(c, r)| *c += r);

        let seed_agreement = a1.block(0..m, 0..m).inner(&a2.block(0..m, 0..m));
        let offset = seed_agreement - (g1.edge_count() + g2.edge_count()) as f64;
        FrankWolfe {
            cfg,
            k: n - m,
            b1,
            b2,
            coupling,
            offset,
        }
    }

    fn initial_point(&self) -> Matrix {
        let k = self.k;
        let bary = DoublyStochastic::barycenter(k).0;
        match self.cfg.init {
            Initialization::Barycenter => bary,
            Initialization::Perturbed => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.rng_seed);
                let mut r = Matrix::from_fn(k, k, |_, _| rng.gen::<f64>() + f64::MIN_POSITIVE);
                sinkhorn(&mut r, SINKHORN_SWEEPS);
                Matrix::from_fn(k, k, |i, j| 0.5 * (bary[(i, j)] + r[(i, j)]))
            }
        }
    }

    /// `A1_22 Q A2_22` for the permutation matrix of `perm`.
    fn sandwich_permutation(&self, perm: &[usize]) -> Matrix {
        let k = self.k;
        let mut rows = Matrix::zeros(k, k);
        for (l, &q) in perm.iter().enumerate() {
            rows.row_mut(l).copy_from_slice(self.b2.row(q));
        }
        self.b1.matmul(&rows).expect("square blocks")
    }

    fn sandwich(&self, p: &Matrix) -> Matrix {
        self.b1
            .matmul(p)
            .and_then(|x| x.matmul(&self.b2))
            .expect("square blocks")
    }

    /// Negated relaxed disagreement `f(P) - |E1| - |E2|` given `H = A1_22 P A2_22`.
    fn score(&self, p: &Matrix, h: &Matrix) -> f64 {
        h.inner(p) + self.coupling.inner(p) + self.offset
    }

    fn permutation_score(&self, perm: &[usize], hq: &Matrix) -> f64 {
        perm.iter()
            .enumerate()
            .map(|(i, &j)| hq[(i, j)] + self.coupling[(i, j)])
            .sum::<f64>()
            + self.offset
    }

    /// Returns the non-seed permutation and the run's trace.
    fn run(&self) -> Result<(Vec<usize>, FwTrace)> {
        let k = self.k;
        if k == 1 {
            let p = Matrix::identity(1);
            let hq = self.sandwich_permutation(&[0]);
            let trace = FwTrace {
                objective: vec![-self.score(&p, &hq)],
                steps: Vec::new(),
                feasibility: vec![Violation::of(&p)],
                stop: StopReason::Trivial,
            };
            return Ok((vec![0], trace));
        }

        let mut p = self.initial_point();
        let mut h = match self.cfg.init {
            Initialization::Barycenter => self.barycenter_sandwich(),
            Initialization::Perturbed => self.sandwich(&p),
        };
        let mut score = self.score(&p, &h);
        let mut trace = FwTrace {
            objective: vec![-score],
            steps: Vec::new(),
            feasibility: vec![Violation::of(&p)],
            stop: StopReason::MaxIterations,
        };
        // Frank-Wolfe vertices are permutations too; the best one seen is a
        // rounding candidate alongside the rounded final iterate.
        let mut best_vertex: Option<(f64, Vec<usize>)> = None;

        for _ in 0..self.cfg.max_iterations {
            let mut grad = h.clone();
            grad.scale(2.0);
            grad.as_mut_slice()
                .iter_mut()
                .zip(self.coupling.as_slice())
                .for_each(|(g, c)| *g += c);
            let q = lap::solve_unchecked(&grad, Sense::Maximize).perm;

            let hq = self.sandwich_permutation(&q);
            let q_score = self.permutation_score(&q, &hq);
            if best_vertex.as_ref().is_none_or(|(s, _)| q_score > *s) {
                best_vertex = Some((q_score, q.clone()));
            }

            // Direction D = Q - P and its sandwich.
            let mut d = p.clone();
            d.scale(-1.0);
            for (i, &j) in q.iter().enumerate() {
                d[(i, j)] += 1.0;
            }
            let hd = hq.sub(&h);
            let linear = grad.inner(&d);
            let quadratic = hd.inner(&d);
            let step = line_search(linear, quadratic);
            trace.steps.push(step);
            if step < MIN_STEP {
                trace.stop = StopReason::Stalled;
                break;
            }

            for (x, dx) in p.as_mut_slice().iter_mut().zip(d.as_slice()) {
                *x += step * dx;
            }
            for (x, dx) in h.as_mut_slice().iter_mut().zip(hd.as_slice()) {
                *x += step * dx;
            }
            let next = self.score(&p, &h);
            trace.objective.push(-next);
            trace.feasibility.push(Violation::of(&p));

            let change = (next - score).abs() / score.abs().max(1.0);
            score = next;
            if change < self.cfg.tolerance {
                trace.stop = StopReason::Converged;
                break;
            }
        }

        let rounded = lap::solve_unchecked(&p, Sense::Maximize).perm;
        let rounded_score = self.permutation_score(&rounded, &self.sandwich_permutation(&rounded));
        let perm = match best_vertex {
            Some((s, q)) if s > rounded_score => q,
            _ => rounded,
        };
        Ok((perm, trace))
    }

    /// `A1_22 (J/k) A2_22 = d1 d2^T / k` with `d` the non-seed block degrees.
    fn barycenter_sandwich(&self) -> Matrix {
        let k = self.k;
        let d1: Vec<f64> = (0..k).map(|i| self.b1.row(i).iter().sum()).collect();
        let d2: Vec<f64> = (0..k).map(|i| self.b2.row(i).iter().sum()).collect();
        let inv = 1.0 / k as f64;
        Matrix::from_fn(k, k, |i, j| d1[i] * d2[j] * inv)
    }
}

/// Maximizes `linear * t + quadratic * t^2` over `t` in `[0, 1]`.
fn line_search(linear: f64, quadratic: f64) -> f64 {
    let gain = |t: f64| linear * t + quadratic * t * t;
    let mut best = 0.0;
    let mut best_gain = 0.0;
    if gain(1.0) > best_gain {
        best = 1.0;
        best_gain = gain(1.0);
    }
    if quadratic < 0.0 {
        let t = -linear / (2.0 * quadratic);
        if t > 0.0 && t < 1.0 && gain(t) > best_gain {
            best = t;
        }
    }
    best
}

/// Alternating row and column normalization.
fn sinkhorn(m: &mut Matrix, sweeps: usize) {
    let k = m.rows();
    for _ in 0..sweeps {
        for i in 0..k {
            let s: f64 = m.row(i).iter().sum();
            m.row_mut(i).iter_mut().for_each(|x| *x /= s);
        }
        let mut col = vec![0.0f64; k];
        for i in 0..k {
            col.iter_mut().zip(m.row(i)).for_each(|(c, x)| *c += x);
        }
        for i in 0..k {
            m.row_mut(i).iter_mut().zip(&col).for_each(|(x, c)| *x /= c);
        }
        if Violation::of(m).max_sum_deviation <= 1e-13 {
            break;
        }
    }
}

/// Fraction of non-seeds mapped as in `truth`.
pub fn matching_accuracy(found: &Matching, truth: &Matching, seeds: &SeedSet) -> Result<f64> {
    let n = found.len();
    if truth.len() != n {
        return Err(mismatch!("matchings of length {n} and {}", truth.len()));
    }
    let m = seeds.len();
    if m >= n {
        return Err(invalid!("no non-seeds: {m} seeds among {n} vertices"));
    }
    let mask = seeds.mask(n);
    let correct = (0..n)
        .filter(|&i| !mask[i] && found.phi[i] == truth.phi[i])
        .count();
    Ok(correct as f64 / (n - m) as f64)
}

/// Expected accuracy of a uniformly random non-seed alignment, `1/(n-m)`.
pub fn chance_accuracy(n: usize, m: usize) -> Result<f64> {
    if m >= n {
        return Err(invalid!("no non-seeds: {m} seeds among {n} vertices"));
    }
    Ok(1.0 / (n - m) as f64)
}
