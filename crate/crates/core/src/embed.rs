//! Omnibus matrix and adjacency spectral embedding.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::eigen::symmetric_eigen;
use crate::error::{invalid, mismatch};
use crate::graph::GraphPair;
use crate::matrix::Matrix;
use crate::{Error, Result};

/// Relative gap under which two `|eigenvalue|`s are treated as tied.
const EIGENVALUE_TIE: f64 = 1e-10;

/// The `2n x 2n` block matrix `[[A1, L], [L, A2]]` with `L = (A1 + A2) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmnibusMatrix {
    n: usize,
    matrix: Matrix,
}

impl OmnibusMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

pub fn omnibus(pair: &GraphPair) -> Result<OmnibusMatrix> {
    let (g1, g2) = (pair.g1(), pair.g2());
    let n = g1.n();
    if g2.n() != n {
        return Err(Error::Unaligned(alloc::format!(
            "{} vs {} vertices",
            n,
            g2.n()
        )));
    }
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let (r1, r2) = (g1.row(i), g2.row(i));
        for j in 0..n {
            let (a, b) = (f64::from(r1[j]), f64::from(r2[j]));
            let mean = 0.5 * (a + b);
            m[(i, j)] = a;
            m[(n + i, n + j)] = b;
            m[(i, n + j)] = mean;
            m[(n + i, j)] = mean;
        }
    }
    Ok(OmnibusMatrix { n, matrix: m })
}

/// Points in `R^d`, one per row, with the eigenvalues that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub coords: Matrix,
    /// Retained eigenvalues, `|value|` non-increasing. Signs are kept.
    pub eigenvalues: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn rows(&self) -> usize {
        self.coords.rows()
    }

    pub fn d(&self) -> usize {
        self.coords.cols()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.coords.row(i)
    }
}

/// Adjacency spectral embedding: the `d` eigenpairs of largest
/// `|eigenvalue|`, eigenvectors scaled by `sqrt(|eigenvalue|)`.
///
/// Each eigenvector is signed so that its largest-magnitude entry (first
/// one on ties) is positive. Eigenvalues whose magnitudes tie keep positive
/// values first, then ascending eigenvector order.
pub fn ase(matrix: &Matrix, d: usize) -> Result<EmbeddingMatrix> {
    SpectralEmbedder::new(matrix)?.embed(d)
}

/// One eigendecomposition, embedded at any number of dimensions.
#[derive(Debug, Clone)]
pub struct SpectralEmbedder {
    n: usize,
    /// Eigenpairs in retention order.
    pairs: Vec<(f64, Vec<f64>)>,
}

impl SpectralEmbedder {
    pub fn new(matrix: &Matrix) -> Result<Self> {
        let n = matrix.rows();
        if !matrix.is_square() {
            return Err(mismatch!("{}x{} matrix is not square", n, matrix.cols()));
        }
        let scale = matrix.frobenius_norm();
        if !matrix.is_symmetric(1e-12 * scale.max(1.0)) {
            return Err(invalid!("matrix is not symmetric"));
        }

        let eig = symmetric_eigen(matrix)?;
        let mut pairs: Vec<(f64, Vec<f64>)> = eig
            .values
            .into_iter()
            .zip(eig.vectors)
            .map(|(l, mut v)| {
                fix_sign(&mut v);
                (l, v)
            })
            .collect();

        pairs.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
        let top = pairs.first().map_or(0.0, |p| p.0.abs());
        let tie = EIGENVALUE_TIE * top.max(f64::MIN_POSITIVE);
        let mut start = 0;
        while start < pairs.len() {
            let mut end = start + 1;
            while end < pairs.len() && pairs[end - 1].0.abs() - pairs[end].0.abs() <= tie {
                end += 1;
            }
            pairs[start..end].sort_by(|a, b| {
                (a.0 < 0.0)
                    .cmp(&(b.0 < 0.0))
                    .then_with(|| lexicographic(&a.1, &b.1))
            });
            start = end;
        }
        Ok(SpectralEmbedder { n, pairs })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Eigenvalues in retention order.
    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|p| p.0)
    }

    pub fn embed(&self, d: usize) -> Result<EmbeddingMatrix> {
        let n = self.n;
        if d == 0 || d > n {
            return Err(invalid!("embedding dimension {d} outside 1..={n}"));
        }
        let mut coords = Matrix::zeros(n, d);
        for (j, (lambda, v)) in self.pairs[..d].iter().enumerate() {
            let s = libm::sqrt(lambda.abs());
            for i in 0..n {
                coords[(i, j)] = v[i] * s;
            }
        }
        Ok(EmbeddingMatrix {
            coords,
            eigenvalues: self.pairs[..d].iter().map(|p| p.0).collect(),
        })
    }
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Splits a `2n`-row omnibus embedding into the rows for g1 and for g2.
pub fn split_embedding(
    e: &EmbeddingMatrix,
    n: usize,
) -> Result<(EmbeddingMatrix, EmbeddingMatrix)> {
    if e.rows() != 2 * n {
        return Err(mismatch!(
            "embedding has {} rows, expected {}",
            e.rows(),
            2 * n
        ));
    }
    let d = e.d();
    let take = |offset: usize| EmbeddingMatrix {
        coords: e.coords.block(offset..offset + n, 0..d),
        eigenvalues: e.eigenvalues.clone(),
    };
    Ok((take(0), take(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{SimpleGraph, VertexTable};

    #[test]
    fn omnibus_blocks() {
        let t = VertexTable::numbered(2);
        let one = SimpleGraph::from_edges(t.clone(), [(0, 1)]).unwrap();
        let none = SimpleGraph::empty(t);
        let o = omnibus(&GraphPair::new(one.clone(), none).unwrap()).unwrap();
        let m = o.matrix();
        assert_eq!(m.rows(), 4);
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(2, 3)], 0.0);
        assert_eq!(m[(0, 3)], 0.5);
        assert_eq!(m[(1, 2)], 0.5);
        assert_eq!(m[(3, 0)], 0.5);
        assert_eq!(m[(0, 2)], 0.0);
        assert!(m.is_symmetric(0.0));

        let o = omnibus(&GraphPair::new(one.clone(), one.clone()).unwrap()).unwrap();
        let a = one.to_matrix();
        for (r, c) in [(0, 0), (0, 2), (2, 0), (2, 2)] {
            assert_eq!(o.matrix().block(r..r + 2, c..c + 2), a);
        }
    }

    #[test]
    fn two_cycle_embedding() {
        let m = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let e = ase(&m, 1).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-12);
        for i in 0..2 {
            assert!((e.coords[(i, 0)].abs() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
        let e = ase(&m, 2).unwrap();
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_embeds_at_origin() {
        let e = ase(&Matrix::zeros(5, 5), 1).unwrap();
        assert!(e.coords.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn dimension_checks() {
        let m = Matrix::identity(3);
        assert!(ase(&m, 0).is_err());
        assert!(ase(&m, 4).is_err());
        let mut asym = Matrix::zeros(2, 2);
        asym[(0, 1)] = 1.0;
        assert!(ase(&asym, 1).is_err());
    }

    #[test]
    fn split_rows() {
        let coords = Matrix::from_fn(4, 2, |i, j| (i * 2 + j) as f64);
        let e = EmbeddingMatrix {
            coords,
            eigenvalues: alloc::vec![2.0, 1.0],
        };
        let (u1, u2) = split_embedding(&e, 2).unwrap();
        assert_eq!(u1.point(1), &[2.0, 3.0]);
        assert_eq!(u2.point(0), &[4.0, 5.0]);
        assert!(split_embedding(&e, 3).is_err());
    }
}
