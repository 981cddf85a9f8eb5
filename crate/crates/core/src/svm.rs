//! C-support vector classification with an RBF kernel.
//!
//! Binary problems are solved with SMO using second-order working set
//! selection; multiclass prediction is one-vs-one voting.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::squared_distance;

const TAU: f64 = 1e-12;
const STOP_EPS: f64 = 1e-3;
const MAX_SMO_ITERATIONS: usize = 1_000_000;

#[inline]
fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    libm::exp(-gamma * squared_distance(a, b))
}

/// A trained two-class RBF machine; positive decision values vote for the
/// `+1` class.
#[derive(Debug, Clone)]
pub struct BinarySvm<'a> {
    support: Vec<&'a [f64]>,
    /// `alpha_i * y_i` per support vector.
    coef: Vec<f64>,
    rho: f64,
    gamma: f64,
}

impl<'a> BinarySvm<'a> {
    /// Trains on `points` with `y[i]` in `{+1, -1}`.
    pub fn train(points: &[&'a [f64]], y: &[f64], gamma: f64, c: f64) -> Self {
        let l = points.len();
        debug_assert_eq!(l, y.len());
        let mut q = vec![0.0f64; l * l];
        for i in 0..l {
            q[i * l + i] = 1.0;
            for j in i + 1..l {
                let v = y[i] * y[j] * rbf(gamma, points[i], points[j]);
                q[i * l + j] = v;
                q[j * l + i] = v;
            }
        }

        let mut alpha = vec![0.0f64; l];
        let mut grad = vec![-1.0f64; l];
        let upper = |a: f64| a >= c;
        let lower = |a: f64| a <= 0.0;

        for _ in 0..MAX_SMO_ITERATIONS {
            let mut gmax = f64::NEG_INFINITY;
            let mut sel_i = None;
            for t in 0..l {
                let score = if y[t] > 0.0 {
                    (!upper(alpha[t])).then_some(-grad[t])
                } else {
                    (!lower(alpha[t])).then_some(grad[t])
                };
                if let Some(s) = score {
                    if s >= gmax {
                        gmax = s;
                        sel_i = Some(t);
                    }
                }
            }
            let Some(i) = sel_i else { break };

            let mut gmax2 = f64::NEG_INFINITY;
            let mut best_obj = f64::INFINITY;
            let mut sel_j = None;
            for t in 0..l {
                let (diff, g2) = if y[t] > 0.0 {
                    if lower(alpha[t]) {
                        continue;
                    }
                    (gmax + grad[t], grad[t])
                } else {
                    if upper(alpha[t]) {
                        continue;
                    }
                    (gmax - grad[t], -grad[t])
                };
                gmax2 = gmax2.max(g2);
                if diff > 0.0 {
                    // Q_it carries y_i y_t; the kernel value is y_i y_t Q_it.
                    let quad = q[i * l + i] + q[t * l + t] - 2.0 * y[i] * y[t] * q[i * l + t];
                    let quad = if quad > 0.0 { quad } else { TAU };
                    let obj = -(diff * diff) / quad;
                    if obj <= best_obj {
                        best_obj = obj;
                        sel_j = Some(t);
                    }
                }
            }
            let Some(j) = sel_j.filter(|_| gmax + gmax2 >= STOP_EPS) else {
                break;
            };

            let (old_i, old_j) = (alpha[i], alpha[j]);
            let qij = q[i * l + j];
            if y[i] != y[j] {
                let quad = (q[i * l + i] + q[j * l + j] + 2.0 * qij).max(TAU);
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if diff > 0.0 {
                    if alpha[j] < 0.0 {
                        alpha[j] = 0.0;
                        alpha[i] = diff;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
                if diff > 0.0 {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = c - diff;
                    }
                } else if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            } else {
                let quad = (q[i * l + i] + q[j * l + j] - 2.0 * qij).max(TAU);
                let delta = (grad[i] - grad[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if sum > c {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = sum - c;
                    }
                } else if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if sum > c {
                    if alpha[j] > c {
                        alpha[j] = c;
                        alpha[i] = sum - c;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }

            let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
            for t in 0..l {
                grad[t] += q[t * l + i] * di + q[t * l + j] * dj;
            }
        }

        let rho = bias(&alpha, &grad, y, c);
        let mut support = Vec::new();
        let mut coef = Vec::new();
        for t in 0..l {
            if alpha[t] > 0.0 {
                support.push(points[t]);
                coef.push(alpha[t] * y[t]);
            }
        }
        BinarySvm {
            support,
            coef,
            rho,
            gamma,
        }
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(s, c)| c * rbf(self.gamma, s, x))
            .sum::<f64>()
            - self.rho
    }
}

fn bias(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else if ub.is_finite() && lb.is_finite() {
        0.5 * (ub + lb)
    } else {
        0.0
    }
}

/// One-vs-one multiclass prediction for a single point.
///
/// `labels[i]` indexes into `0..n_classes`. Vote ties go to the smaller
/// class index.
pub fn predict_one_vs_one(
    points: &[&[f64]],
    labels: &[usize],
    n_classes: usize,
    x: &[f64],
    gamma: f64,
    c: f64,
) -> usize {
    let mut present = vec![false; n_classes];
    for &l in labels {
        present[l] = true;
    }
    let classes: Vec<usize> = (0..n_classes).filter(|&k| present[k]).collect();
    if classes.len() == 1 {
        return classes[0];
    }
    let mut votes = vec![0usize; n_classes];
    for (a_pos, &a) in classes.iter().enumerate() {
        for &b in &classes[a_pos + 1..] {
            let mut sub = Vec::new();
            let mut y = Vec::new();
            for (p, &l) in points.iter().zip(labels) {
                if l == a || l == b {
                    sub.push(*p);
                    y.push(if l == a { 1.0 } else { -1.0 });
                }
            }
            let svm = BinarySvm::train(&sub, &y, gamma, c);
            if svm.decision(x) > 0.0 {
                votes[a] += 1;
            } else {
                votes[b] += 1;
            }
        }
    }
    argmax_first(&votes)
}

pub(crate) fn argmax_first(votes: &[usize]) -> usize {
    let mut best = 0;
    for (k, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = k;
        }
    }
    best
}
