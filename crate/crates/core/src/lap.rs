//! Dense linear assignment.
//!
//! A shortest-augmenting-path solver (Jonker-Volgenant family, `O(k^3)`)
//! computes an optimal assignment together with dual potentials. The duals
//! identify every co-optimal row/column pair; a second pass then walks the
//! rows in order and picks the smallest column that still extends to an
//! optimal perfect matching, which makes the returned permutation the
//! lexicographically smallest optimum.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::invalid;
use crate::matrix::Matrix;
use crate::{Error, Result};

/// Relative slack under which a reduced cost counts as zero.
const TIE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Square matrix of finite costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix(Matrix);

impl CostMatrix {
    pub fn new(costs: Matrix) -> Result<Self> {
        if !costs.is_square() {
            return Err(invalid!(
                "cost matrix must be square, got {}x{}",
                costs.rows(),
                costs.cols()
            ));
        }
        if costs.rows() == 0 {
            return Err(invalid!("cost matrix must have at least one row"));
        }
        check_finite(&costs)?;
        Ok(CostMatrix(costs))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn k(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

fn check_finite(m: &Matrix) -> Result<()> {
    for i in 0..m.rows() {
        if let Some(j) = m.row(i).iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row: i, col: j });
        }
    }
    Ok(())
}

/// Row `i` is assigned to column `perm[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub perm: Vec<usize>,
    pub cost: f64,
}

/// Optimal assignment for `c` under `sense`; ties resolve to the
/// lexicographically smallest permutation.
pub fn solve_lap(c: &CostMatrix, sense: Sense) -> Assignment {
    solve_unchecked(&c.0, sense)
}

/// Like [`solve_lap`] but takes a bare matrix and validates it.
pub fn solve_matrix(costs: &Matrix, sense: Sense) -> Result<Assignment> {
    let c = CostMatrix::new(costs.clone())?;
    Ok(solve_lap(&c, sense))
}

pub(crate) fn solve_unchecked(costs: &Matrix, sense: Sense) -> Assignment {
    let k = costs.rows();
    let sign = match sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let cost_at = |i: usize, j: usize| sign * costs[(i, j)];

    let (mut row_to_col, mut col_to_row, u, v) = shortest_augmenting_path(k, &cost_at);

    let scale = costs.as_slice().iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let eps = TIE_TOLERANCE * scale;
    let tight = |i: usize, j: usize| cost_at(i, j) - u[i] - v[j] <= eps;
    lexicographic_refine(k, &tight, &mut row_to_col, &mut col_to_row);

    let cost = row_to_col
        .iter()
        .enumerate()
        .map(|(i, &j)| costs[(i, j)])
        .sum();
    Assignment {
        perm: row_to_col,
        cost,
    }
}

/// Returns `(row_to_col, col_to_row, u, v)` with `c[i][j] - u[i] - v[j] >= 0`
/// everywhere and equality on the assignment.
fn shortest_augmenting_path(
    k: usize,
    cost_at: &impl Fn(usize, usize) -> f64,
) -> (Vec<usize>, Vec<usize>, Vec<f64>, Vec<f64>) {
    // 1-based with a sentinel column 0.
    let mut u = vec![0.0f64; k + 1];
    let mut v = vec![0.0f64; k + 1];
    let mut owner = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    let mut minv = vec![0.0f64; k + 1];
    let mut used = vec![false; k + 1];

    for i in 1..=k {
        owner[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|x| *x = f64::INFINITY);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = cost_at(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; k];
    let mut col_to_row = vec![0usize; k];
    for j in 1..=k {
        row_to_col[owner[j] - 1] = j - 1;
        col_to_row[j - 1] = owner[j] - 1;
    }
    (row_to_col, col_to_row, u[1..].to_vec(), v[1..].to_vec())
}

/// Rewrites a perfect matching of the tight-edge graph into the
/// lexicographically smallest one.
fn lexicographic_refine(
    k: usize,
    tight: &impl Fn(usize, usize) -> bool,
    row_to_col: &mut [usize],
    col_to_row: &mut [usize],
) {
    let mut target = vec![usize::MAX; k];
    let mut good = vec![false; k];
    let mut queue = VecDeque::new();

    for i in 0..k {
        let current = row_to_col[i];
        if !(0..current).any(|j| tight(i, j)) {
            continue;
        }

        // Rows > i that can shift along tight edges so that `current` ends
        // up free once row i leaves it.
        good.iter_mut().for_each(|g| *g = false);
        queue.clear();
        queue.push_back(current);
        while let Some(c) = queue.pop_front() {
            for r in i + 1..k {
                if good[r] || row_to_col[r] == c || !tight(r, c) {
                    continue;
                }
                good[r] = true;
                target[r] = c;
                queue.push_back(row_to_col[r]);
            }
        }

        let Some(j) = (0..current).find(|&j| {
            let r = col_to_row[j];
            r > i && good[r] && tight(i, j)
        }) else {
            continue;
        };

        let mut r = col_to_row[j];
        row_to_col[i] = j;
        col_to_row[j] = i;
        loop {
            let c = target[r];
            let next = col_to_row[c];
            row_to_col[r] = c;
            col_to_row[c] = r;
            if c == current {
                break;
            }
            r = next;
        }
    }
}
