//! Vertex classification on embedded coordinates.
//!
//! Two classifiers are available: Euclidean k-nearest-neighbour (the
//! default) and an RBF support vector machine. Error rates are estimated
//! with leave-one-out cross-validation over a single shared embedding: the
//! embedding never looks at labels, so only the held-out label changes
//! between folds.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::embed::{ase, omnibus, split_embedding, EmbeddingMatrix, SpectralEmbedder};
use crate::error::{invalid, mismatch};
use crate::graph::{GraphPair, SimpleGraph, VertexTable};
use crate::matrix::{squared_distance, Matrix};
use crate::svm::{argmax_first, predict_one_vs_one};
use crate::Result;

/// Which graph of a pair is being classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    G1,
    G2,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::G1 => "g1",
            Target::G2 => "g2",
        }
    }
}

/// Class names plus one class index per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexLabels {
    pub classes: Vec<String>,
    pub of_vertex: Vec<usize>,
}

impl VertexLabels {
    pub fn new(classes: Vec<String>, of_vertex: Vec<usize>) -> Result<Self> {
        if classes.is_empty() {
            return Err(invalid!("at least one class is required"));
        }
        if let Some(&bad) = of_vertex.iter().find(|&&l| l >= classes.len()) {
            return Err(invalid!(
                "label index {bad} outside {} classes",
                classes.len()
            ));
        }
        Ok(VertexLabels { classes, of_vertex })
    }

    pub fn from_table(t: &VertexTable) -> Result<Self> {
        let (classes, of_vertex) = t
            .label_classes()
            .ok_or_else(|| invalid!("vertex table carries no labels"))?;
        Self::new(classes, of_vertex)
    }

    pub fn len(&self) -> usize {
        self.of_vertex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.of_vertex.is_empty()
    }

    /// Per-class counts, aligned with `classes`.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for &l in &self.of_vertex {
            counts[l] += 1;
        }
        counts
    }
}

/// Points with one class label each.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoints {
    coords: Matrix,
    labels: VertexLabels,
}

impl LabeledPoints {
    pub fn new(coords: Matrix, labels: VertexLabels) -> Result<Self> {
        if coords.rows() != labels.len() {
            return Err(mismatch!(
                "{} points but {} labels",
                coords.rows(),
                labels.len()
            ));
        }
        if coords.rows() == 0 {
            return Err(invalid!("no points"));
        }
        Ok(LabeledPoints { coords, labels })
    }

    pub fn len(&self) -> usize {
        self.coords.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.rows() == 0
    }

    pub fn d(&self) -> usize {
        self.coords.cols()
    }

    pub fn coords(&self) -> &Matrix {
        &self.coords
    }

    pub fn labels(&self) -> &VertexLabels {
        &self.labels
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassifierConfig {
    /// Majority vote of the `k` nearest training points. Distance ties go
    /// to the smaller index, vote ties to the smaller class index.
    Knn { k: usize },
    /// One-vs-one RBF SVM. `gamma = None` uses `1 / d`.
    SvmRbf { gamma: Option<f64>, c: f64 },
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig::Knn { k: 5 }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ClassifierConfig::Knn { k } if k == 0 || k % 2 == 0 => {
                Err(invalid!("k must be odd and at least 1, got {k}"))
            }
            ClassifierConfig::SvmRbf { gamma, c } => {
                if let Some(g) = gamma {
                    if !(g > 0.0 && g.is_finite()) {
                        return Err(invalid!("gamma must be positive, got {g}"));
                    }
                }
                if !(c > 0.0 && c.is_finite()) {
                    return Err(invalid!("c must be positive, got {c}"));
                }
                Ok(())
            }
            ClassifierConfig::Knn { .. } => Ok(()),
        }
    }
}

/// Predicts the class index of `test` from all `train` points.
pub fn classify_vertex(
    train: &LabeledPoints,
    test: &[f64],
    cfg: &ClassifierConfig,
) -> Result<usize> {
    cfg.validate()?;
    if test.len() != train.d() {
        return Err(mismatch!(
            "test point has {} coordinates, training has {}",
            test.len(),
            train.d()
        ));
    }
    let rows: Vec<usize> = (0..train.len()).collect();
    Ok(predict(train, &rows, test, cfg))
}

/// Predicts using only the training rows listed in `rows`.
fn predict(train: &LabeledPoints, rows: &[usize], test: &[f64], cfg: &ClassifierConfig) -> usize {
    let n_classes = train.labels.classes.len();
    let labels = &train.labels.of_vertex;
    match *cfg {
        ClassifierConfig::Knn { k } => {
            let mut nearest: Vec<(f64, usize)> = rows
                .iter()
                .map(|&r| (squared_distance(train.coords.row(r), test), r))
                .collect();
            let k = k.min(nearest.len());
            let by_distance =
                |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < nearest.len() {
                nearest.select_nth_unstable_by(k - 1, by_distance);
            }
            let mut votes = vec![0usize; n_classes];
            for &(_, r) in &nearest[..k] {
                votes[labels[r]] += 1;
            }
            argmax_first(&votes)
        }
        ClassifierConfig::SvmRbf { gamma, c } => {
            let gamma = gamma.unwrap_or(1.0 / train.d().max(1) as f64);
            let points: Vec<&[f64]> = rows.iter().map(|&r| train.coords.row(r)).collect();
            let fold_labels: Vec<usize> = rows.iter().map(|&r| labels[r]).collect();
            predict_one_vs_one(&points, &fold_labels, n_classes, test, gamma, c)
        }
    }
}

/// Leave-one-out misclassification rate.
pub fn loocv_error(points: &LabeledPoints, cfg: &ClassifierConfig) -> Result<f64> {
    Ok(loocv_misses(points, cfg)? as f64 / points.len() as f64)
}

/// Number of points misclassified under leave-one-out.
pub fn loocv_misses(points: &LabeledPoints, cfg: &ClassifierConfig) -> Result<usize> {
    cfg.validate()?;
    let n = points.len();
    if n < 3 {
        return Err(invalid!("leave-one-out needs at least 3 points, got {n}"));
    }
    let mut rows: Vec<usize> = (1..n).collect();
    let mut misses = 0;
    for i in 0..n {
        // rows holds every index except i
        if i > 0 {
            rows[i - 1] = i - 1;
        }
        let guess = predict(points, &rows, points.coords.row(i), cfg);
        misses += usize::from(guess != points.labels.of_vertex[i]);
    }
    Ok(misses)
}

fn check_labels(n: usize, labels: &VertexLabels) -> Result<()> {
    if labels.len() != n {
        return Err(mismatch!("{} labels for {n} vertices", labels.len()));
    }
    Ok(())
}

/// Omnibus embedding of the pair at dimension `d`, split into `(U1, U2)`.
pub fn joint_embedding(pair: &GraphPair, d: usize) -> Result<(EmbeddingMatrix, EmbeddingMatrix)> {
    let o = omnibus(pair)?;
    let e = ase(o.matrix(), d)?;
    split_embedding(&e, pair.n())
}

/// LOOCV error of the target graph's rows of the joint embedding.
pub fn joint_classification_error(
    pair: &GraphPair,
    labels: &VertexLabels,
    d: usize,
    cfg: &ClassifierConfig,
    target: Target,
) -> Result<f64> {
    check_labels(pair.n(), labels)?;
    let (u1, u2) = joint_embedding(pair, d)?;
    let u = match target {
        Target::G1 => u1,
        Target::G2 => u2,
    };
    loocv_error(&LabeledPoints::new(u.coords, labels.clone())?, cfg)
}

/// LOOCV error of the embedding of a single graph.
pub fn single_classification_error(
    g: &SimpleGraph,
    labels: &VertexLabels,
    d: usize,
    cfg: &ClassifierConfig,
) -> Result<f64> {
    check_labels(g.n(), labels)?;
    let e = ase(&g.to_matrix(), d)?;
    loocv_error(&LabeledPoints::new(e.coords, labels.clone())?, cfg)
}

/// Joint and single errors for several dimensions from one
/// eigendecomposition each.
#[derive(Debug, Clone)]
pub struct ClassificationSweep {
    n: usize,
    joint: SpectralEmbedder,
    single: [SpectralEmbedder; 2],
}

impl ClassificationSweep {
    pub fn new(pair: &GraphPair) -> Result<Self> {
        let joint = SpectralEmbedder::new(omnibus(pair)?.matrix())?;
        let single = [
            SpectralEmbedder::new(&pair.g1().to_matrix())?,
            SpectralEmbedder::new(&pair.g2().to_matrix())?,
        ];
        Ok(ClassificationSweep {
            n: pair.n(),
            joint,
            single,
        })
    }

    pub fn joint_error(
        &self,
        labels: &VertexLabels,
        d: usize,
        cfg: &ClassifierConfig,
        target: Target,
    ) -> Result<f64> {
        check_labels(self.n, labels)?;
        if d > 2 * self.n || d == 0 {
            return Err(invalid!(
                "embedding dimension {d} outside 1..={}",
                2 * self.n
            ));
        }
        let (u1, u2) = split_embedding(&self.joint.embed(d)?, self.n)?;
        let u = match target {
            Target::G1 => u1,
            Target::G2 => u2,
        };
        loocv_error(&LabeledPoints::new(u.coords, labels.clone())?, cfg)
    }

    pub fn single_error(
        &self,
        labels: &VertexLabels,
        d: usize,
        cfg: &ClassifierConfig,
        target: Target,
    ) -> Result<f64> {
        check_labels(self.n, labels)?;
        let e = match target {
            Target::G1 => &self.single[0],
            Target::G2 => &self.single[1],
        }
        .embed(d)?;
        loocv_error(&LabeledPoints::new(e.coords, labels.clone())?, cfg)
    }
}
